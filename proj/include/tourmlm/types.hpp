#ifndef TOURMLM_TYPES_HPP
#define TOURMLM_TYPES_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tourmlm/error.hpp"

namespace tourmlm {

using PoiId = std::uint32_t;
/// UTC seconds since the epoch.
using Timestamp = std::int64_t;
using Seconds = double;

struct CheckIn {
  std::string photo_id;
  std::string user_id;
  Timestamp timestamp = 0;
  PoiId poi_id = 0;

  friend bool operator==(const CheckIn&, const CheckIn&) = default;
};

struct PoiRecord {
  PoiId poi_id = 0;
  std::string name;
  std::string theme;
  double lat = 0.0;
  double lon = 0.0;
};

/// One stay at a POI, built by collapsing consecutive photos taken there.
struct Visit {
  PoiId poi_id = 0;
  Timestamp arrival = 0;
  Timestamp departure = 0;
  std::uint32_t photo_count = 0;

  Seconds duration() const { return static_cast<Seconds>(departure - arrival); }

  friend bool operator==(const Visit&, const Visit&) = default;
};

struct Trajectory {
  std::string seq_id;
  std::string user_id;
  std::string city;
  std::vector<Visit> visits;

  Timestamp first_time() const { return visits.empty() ? 0 : visits.front().arrival; }
  Timestamp last_time() const { return visits.empty() ? 0 : visits.back().departure; }

  std::vector<PoiId> poi_sequence() const {
    std::vector<PoiId> out;
    out.reserve(visits.size());
    for (const auto& v : visits) out.push_back(v.poi_id);
    return out;
  }

  friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

/// The POIs of one city, keyed by id.
class PoiCatalog {
 public:
  PoiCatalog() = default;
  explicit PoiCatalog(std::string city) : city_(std::move(city)) {}

  const std::string& city() const { return city_; }
  void set_city(std::string city) { city_ = std::move(city); }

  void add(PoiRecord rec) {
    detail::require(rec.poi_id > 0, "poi_id must be positive");
    detail::require(!rec.theme.empty(), "POI " + std::to_string(rec.poi_id) + " has an empty theme");
    detail::require(rec.lat >= -90.0 && rec.lat <= 90.0,
                    "POI " + std::to_string(rec.poi_id) + " latitude out of range");
    detail::require(rec.lon >= -180.0 && rec.lon <= 180.0,
                    "POI " + std::to_string(rec.poi_id) + " longitude out of range");
    auto [it, inserted] = pois_.emplace(rec.poi_id, std::move(rec));
    detail::require(inserted, "duplicate poi_id " + std::to_string(it->first));
  }

  bool contains(PoiId id) const { return pois_.contains(id); }

  const PoiRecord& at(PoiId id) const {
    auto it = pois_.find(id);
    detail::require(it != pois_.end(), "unknown poi_id " + std::to_string(id));
    return it->second;
  }

  const PoiRecord* find(PoiId id) const {
    auto it = pois_.find(id);
    return it == pois_.end() ? nullptr : &it->second;
  }

  std::vector<PoiId> ids() const {
    std::vector<PoiId> out;
    out.reserve(pois_.size());
    for (const auto& [id, _] : pois_) out.push_back(id);
    return out;
  }

  std::size_t size() const { return pois_.size(); }
  bool empty() const { return pois_.empty(); }

  auto begin() const { return pois_.begin(); }
  auto end() const { return pois_.end(); }

 private:
  std::string city_ = "city";
  std::map<PoiId, PoiRecord> pois_;
};

}  // namespace tourmlm

#endif
