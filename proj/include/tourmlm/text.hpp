#ifndef TOURMLM_TEXT_HPP
#define TOURMLM_TEXT_HPP

#include <string>
#include <string_view>
#include <vector>

namespace tourmlm::detail {

inline std::vector<std::string> split_fields(std::string_view line, char sep = ';') {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.emplace_back(line.substr(start));
      break;
    }
    out.emplace_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

inline void chomp(std::string& line) {
  while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
}

}  // namespace tourmlm::detail

#endif
