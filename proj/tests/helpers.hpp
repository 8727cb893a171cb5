#ifndef TOURMLM_TESTS_HELPERS_HPP
#define TOURMLM_TESTS_HELPERS_HPP

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "tourmlm/tourmlm.hpp"

namespace testing_util {

inline std::filesystem::path fixture(const std::string& name) { return std::filesystem::path(TOURMLM_FIXTURES) / name; }

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("tourmlm_" + tag + "_" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

/// Trajectory visiting `pois` an hour apart, 30 minutes at each, 3 photos each.
inline tourmlm::Trajectory make_trajectory(const std::string& seq, const std::string& user,
                                           const std::vector<tourmlm::PoiId>& pois, tourmlm::Timestamp t0 = 1000,
                                           const std::string& city = "c") {
  tourmlm::Trajectory t;
  t.seq_id = seq;
  t.user_id = user;
  t.city = city;
  for (std::size_t i = 0; i < pois.size(); ++i) {
    const tourmlm::Timestamp a = t0 + static_cast<tourmlm::Timestamp>(i) * 3600;
    t.visits.push_back({pois[i], a, a + 1800, 3});
  }
  return t;
}

/// Catalog of POIs 1..n with themes t0..t(k-1) cycling, on a small grid.
inline tourmlm::PoiCatalog make_catalog(std::size_t n, std::size_t themes = 2, const std::string& city = "c") {
  tourmlm::PoiCatalog cat(city);
  for (std::size_t i = 1; i <= n; ++i) {
    cat.add({static_cast<tourmlm::PoiId>(i), "poi" + std::to_string(i), "t" + std::to_string((i - 1) % themes),
             55.0 + 0.001 * static_cast<double>(i), -4.0 + 0.002 * static_cast<double>(i % 5)});
  }
  return cat;
}

}  // namespace testing_util

#endif
