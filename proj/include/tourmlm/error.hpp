#ifndef TOURMLM_ERROR_HPP
#define TOURMLM_ERROR_HPP

#include <stdexcept>
#include <string>

namespace tourmlm {

/// Bad input: malformed files, violated preconditions, unknown ids.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An internal invariant did not hold. Signals a bug, not bad data.
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

namespace detail {

inline void require(bool cond, const std::string& what) {
  if (!cond) throw InputError(what);
}

inline void ensure(bool cond, const std::string& what) {
  if (!cond) throw InvariantError(what);
}

}  // namespace detail
}  // namespace tourmlm

#endif
