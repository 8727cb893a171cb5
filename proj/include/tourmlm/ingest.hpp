#ifndef TOURMLM_INGEST_HPP
#define TOURMLM_INGEST_HPP

// Check-in / POI file parsing, trajectory reconstruction and the
// chronological train/validation/test split.

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "tourmlm/error.hpp"
#include "tourmlm/text.hpp"
#include "tourmlm/types.hpp"

namespace tourmlm {

inline constexpr std::array<std::string_view, 4> kCheckinColumns = {"photoID", "userID", "dateTaken",
                                                                    "poiID"};
inline constexpr std::array<std::string_view, 5> kPoiColumns = {"poiID", "poiName", "theme", "lat",
                                                                "lon"};

namespace detail {

inline std::string where(const std::string& source, std::size_t line_no, std::string_view column) {
  std::ostringstream os;
  os << source << ": row " << line_no << " column " << column;
  return os.str();
}

template <class Int>
Int parse_int(const std::string& text, const std::string& context) {
  Int value{};
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || text.empty()) {
    throw InputError(context + ": cannot parse integer '" + text + "'");
  }
  return value;
}

inline double parse_real(const std::string& text, const std::string& context) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || text.empty() || !std::isfinite(value)) {
    throw InputError(context + ": cannot parse number '" + text + "'");
  }
  return value;
}

/// Maps each required column name to its index in the header row.
template <std::size_t N>
std::array<std::size_t, N> header_positions(const std::string& header,
                                            const std::array<std::string_view, N>& required,
                                            const std::string& source) {
  auto names = split_fields(header);
  std::array<std::size_t, N> pos{};
  std::string missing;
  for (std::size_t i = 0; i < N; ++i) {
    auto it = std::find(names.begin(), names.end(), required[i]);
    if (it == names.end()) {
      missing += (missing.empty() ? "" : ", ") + std::string(required[i]);
    } else {
      pos[i] = static_cast<std::size_t>(it - names.begin());
    }
  }
  if (!missing.empty()) throw InputError(source + ": missing column(s) " + missing);
  return pos;
}

inline std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  return in;
}

}  // namespace detail

/// Parses a `photoID;userID;dateTaken;poiID` stream. Rows come back in file order.
inline std::vector<CheckIn> parse_checkins(std::istream& in, const std::string& source = "checkins") {
  std::string line;
  if (!std::getline(in, line)) throw InputError(source + ": missing header row");
  detail::chomp(line);
  const auto col = detail::header_positions(line, kCheckinColumns, source);
  const std::size_t width = *std::max_element(col.begin(), col.end()) + 1;

  std::vector<CheckIn> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    detail::chomp(line);
    if (line.empty()) continue;
    auto f = detail::split_fields(line);
    if (f.size() < width) {
      std::size_t missing = 0;
      while (col[missing] < f.size()) ++missing;
      throw InputError(detail::where(source, line_no, kCheckinColumns[missing]) + ": field missing");
    }
    CheckIn c;
    c.photo_id = f[col[0]];
    c.user_id = f[col[1]];
    if (c.photo_id.empty()) throw InputError(detail::where(source, line_no, "photoID") + ": empty");
    if (c.user_id.empty()) throw InputError(detail::where(source, line_no, "userID") + ": empty");
    c.timestamp = detail::parse_int<Timestamp>(f[col[2]], detail::where(source, line_no, "dateTaken"));
    if (c.timestamp <= 0) {
      throw InputError(detail::where(source, line_no, "dateTaken") + ": timestamp must be positive");
    }
    c.poi_id = detail::parse_int<PoiId>(f[col[3]], detail::where(source, line_no, "poiID"));
    if (c.poi_id == 0) throw InputError(detail::where(source, line_no, "poiID") + ": must be positive");
    out.push_back(std::move(c));
  }
  return out;
}

inline std::vector<CheckIn> parse_checkins(const std::filesystem::path& path) {
  auto in = detail::open_input(path);
  return parse_checkins(in, path.string());
}

/// Parses a `poiID;poiName;theme;lat;lon` stream into a catalog for `city`.
inline PoiCatalog parse_pois(std::istream& in, std::string city, const std::string& source = "pois") {
  std::string line;
  if (!std::getline(in, line)) throw InputError(source + ": missing header row");
  detail::chomp(line);
  const auto col = detail::header_positions(line, kPoiColumns, source);
  const std::size_t width = *std::max_element(col.begin(), col.end()) + 1;

  PoiCatalog catalog(std::move(city));
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    detail::chomp(line);
    if (line.empty()) continue;
    auto f = detail::split_fields(line);
    if (f.size() < width) {
      throw InputError(source + ": row " + std::to_string(line_no) + ": expected " +
                       std::to_string(width) + " fields, got " + std::to_string(f.size()));
    }
    PoiRecord rec;
    rec.poi_id = detail::parse_int<PoiId>(f[col[0]], detail::where(source, line_no, "poiID"));
    rec.name = f[col[1]];
    rec.theme = f[col[2]];
    rec.lat = detail::parse_real(f[col[3]], detail::where(source, line_no, "lat"));
    rec.lon = detail::parse_real(f[col[4]], detail::where(source, line_no, "lon"));
    try {
      catalog.add(std::move(rec));
    } catch (const InputError& e) {
      throw InputError(source + ": row " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return catalog;
}

inline PoiCatalog parse_pois(const std::filesystem::path& path, std::string city = "city") {
  auto in = detail::open_input(path);
  return parse_pois(in, std::move(city), path.string());
}

struct ReconstructOptions {
  /// A gap between consecutive photos longer than this starts a new trajectory.
  Seconds gap_threshold = 8 * 3600.0;
  std::size_t min_distinct_pois = 3;
};

struct ReconstructStats {
  std::size_t users = 0;
  std::size_t fragments = 0;
  std::size_t retained = 0;
  std::size_t dropped = 0;
};

/// Groups check-ins per user, cuts on time gaps and collapses runs at the same POI.
/// Output is sorted by (user, first arrival) and does not depend on input order.
inline std::vector<Trajectory> reconstruct_trajectories(std::vector<CheckIn> checkins,
                                                        const PoiCatalog& pois,
                                                        const ReconstructOptions& opts = {},
                                                        ReconstructStats* stats = nullptr) {
  detail::require(opts.gap_threshold > 0.0, "gap_threshold must be positive");

  std::set<PoiId> unknown;
  for (const auto& c : checkins) {
    if (!pois.contains(c.poi_id)) unknown.insert(c.poi_id);
  }
  if (!unknown.empty()) {
    std::string ids;
    for (auto id : unknown) ids += (ids.empty() ? "" : ", ") + std::to_string(id);
    throw InputError("check-ins reference unknown poi_id(s): " + ids);
  }

  std::sort(checkins.begin(), checkins.end(), [](const CheckIn& a, const CheckIn& b) {
    return std::tie(a.user_id, a.timestamp, a.poi_id, a.photo_id) <
           std::tie(b.user_id, b.timestamp, b.poi_id, b.photo_id);
  });

  ReconstructStats local;
  std::vector<Trajectory> out;
  std::size_t i = 0;
  while (i < checkins.size()) {
    const std::string& user = checkins[i].user_id;
    ++local.users;
    std::size_t fragment_index = 0;
    Trajectory current;
    auto flush = [&] {
      if (current.visits.empty()) return;
      ++local.fragments;
      std::set<PoiId> distinct;
      for (const auto& v : current.visits) distinct.insert(v.poi_id);
      if (distinct.size() >= opts.min_distinct_pois) {
        current.seq_id = user + "#" + std::to_string(fragment_index);
        out.push_back(std::move(current));
        ++local.retained;
      } else {
        ++local.dropped;
      }
      ++fragment_index;
      current = Trajectory{};
    };

    const CheckIn* prev = nullptr;
    for (; i < checkins.size() && checkins[i].user_id == user; ++i) {
      const CheckIn& c = checkins[i];
      if (prev && static_cast<Seconds>(c.timestamp - prev->timestamp) > opts.gap_threshold) flush();
      if (current.visits.empty()) {
        current.user_id = user;
        current.city = pois.city();
      }
      if (!current.visits.empty() && current.visits.back().poi_id == c.poi_id) {
        auto& v = current.visits.back();
        v.departure = c.timestamp;
        ++v.photo_count;
      } else {
        current.visits.push_back(Visit{c.poi_id, c.timestamp, c.timestamp, 1});
      }
      prev = &c;
    }
    flush();
  }
  if (stats) *stats = local;
  return out;
}

struct SplitFractions {
  double train = 0.70;
  double validation = 0.20;
  double test = 0.10;
};

struct DatasetSplit {
  std::vector<Trajectory> train;
  std::vector<Trajectory> validation;
  std::vector<Trajectory> test;
};

/// Orders trajectories by last check-in time, then takes the first
/// floor(train*n) for training, the next floor(validation*n) for validation
/// and leaves the remainder for testing.
inline DatasetSplit split_dataset(std::vector<Trajectory> trajectories, const SplitFractions& f = {}) {
  detail::require(!trajectories.empty(), "cannot split an empty trajectory list");
  detail::require(f.train >= 0 && f.validation >= 0 && f.test >= 0, "split fractions must be non-negative");
  detail::require(std::abs(f.train + f.validation + f.test - 1.0) < 1e-9, "split fractions must sum to 1");

  std::sort(trajectories.begin(), trajectories.end(), [](const Trajectory& a, const Trajectory& b) {
    return std::pair(a.last_time(), a.seq_id) < std::pair(b.last_time(), b.seq_id);
  });
  const auto n = trajectories.size();
  // The epsilon keeps products like 0.7 * 10 from rounding down to 6.
  auto n_train = static_cast<std::size_t>(std::floor(f.train * static_cast<double>(n) + 1e-9));
  auto n_val = static_cast<std::size_t>(std::floor(f.validation * static_cast<double>(n) + 1e-9));
  n_train = std::min(n_train, n);
  n_val = std::min(n_val, n - n_train);

  DatasetSplit split;
  auto first = std::make_move_iterator(trajectories.begin());
  split.train.assign(first, first + static_cast<std::ptrdiff_t>(n_train));
  split.validation.assign(first + static_cast<std::ptrdiff_t>(n_train),
                          first + static_cast<std::ptrdiff_t>(n_train + n_val));
  split.test.assign(first + static_cast<std::ptrdiff_t>(n_train + n_val),
                    std::make_move_iterator(trajectories.end()));
  return split;
}

// JSON-lines trajectory files.

inline nlohmann::json to_json(const Trajectory& t) {
  nlohmann::json visits = nlohmann::json::array();
  for (const auto& v : t.visits) {
    visits.push_back({{"poi", v.poi_id},
                      {"arrival", v.arrival},
                      {"departure", v.departure},
                      {"photos", v.photo_count}});
  }
  return {{"seq_id", t.seq_id}, {"user", t.user_id}, {"city", t.city}, {"visits", std::move(visits)}};
}

inline Trajectory trajectory_from_json(const nlohmann::json& j) {
  Trajectory t;
  t.seq_id = j.at("seq_id").get<std::string>();
  t.user_id = j.at("user").get<std::string>();
  t.city = j.at("city").get<std::string>();
  for (const auto& v : j.at("visits")) {
    Visit visit;
    visit.poi_id = v.at("poi").get<PoiId>();
    visit.arrival = v.at("arrival").get<Timestamp>();
    visit.departure = v.at("departure").get<Timestamp>();
    visit.photo_count = v.at("photos").get<std::uint32_t>();
    detail::require(visit.departure >= visit.arrival,
                    "trajectory " + t.seq_id + ": departure before arrival");
    t.visits.push_back(visit);
  }
  return t;
}

inline void write_trajectories(std::ostream& out, const std::vector<Trajectory>& trajectories) {
  for (const auto& t : trajectories) out << to_json(t).dump() << '\n';
}

inline void write_trajectories(const std::filesystem::path& path, const std::vector<Trajectory>& trajectories) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  write_trajectories(out, trajectories);
}

inline std::vector<Trajectory> read_trajectories(std::istream& in, const std::string& source = "trajectories") {
  std::vector<Trajectory> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    detail::chomp(line);
    if (line.empty()) continue;
    try {
      out.push_back(trajectory_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw InputError(source + ": line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

inline std::vector<Trajectory> read_trajectories(const std::filesystem::path& path) {
  auto in = detail::open_input(path);
  return read_trajectories(in, path.string());
}

}  // namespace tourmlm

#endif
