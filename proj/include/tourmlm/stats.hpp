#ifndef TOURMLM_STATS_HPP
#define TOURMLM_STATS_HPP

// Percentile-bootstrap estimates of visit durations and photo counts per POI.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <map>
#include <numeric>
#include <ostream>
#include <random>
#include <span>
#include <vector>

#include "tourmlm/error.hpp"
#include "tourmlm/types.hpp"

namespace tourmlm {

struct CIEstimate {
  double mean = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  std::size_t n_samples = 0;
  double level = 0.90;
  std::size_t resamples = 0;
  /// Set when the POI had no observations and a city-wide median stands in.
  bool fallback = false;

  friend bool operator==(const CIEstimate&, const CIEstimate&) = default;
};

/// Empirical quantile with linear interpolation between order statistics.
inline double quantile_sorted(std::span<const double> sorted, double q) {
  detail::require(!sorted.empty(), "quantile of an empty sample");
  if (sorted.size() == 1) return sorted.front();
  const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(sorted.size() - 1);
  const auto below = static_cast<std::size_t>(std::floor(pos));
  const auto above = std::min(below + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(below);
  return sorted[below] + frac * (sorted[above] - sorted[below]);
}

inline double median(std::vector<double> values) {
  detail::require(!values.empty(), "median of an empty sample");
  std::sort(values.begin(), values.end());
  return quantile_sorted(values, 0.5);
}

/// Resamples `samples` with replacement `resamples` times and reports the
/// (1-level)/2 and 1-(1-level)/2 quantiles of the resampled means. The bounds
/// are widened to include the sample mean if resampling noise excludes it.
inline CIEstimate bootstrap_ci(std::span<const double> samples, double level = 0.90, std::size_t resamples = 1000,
                               std::uint64_t seed = 42) {
  detail::require(!samples.empty(), "bootstrap_ci needs at least one sample");
  detail::require(resamples >= 1, "bootstrap_ci needs at least one resample");
  detail::require(level > 0.0 && level < 1.0, "confidence level must lie in (0,1)");

  const auto n = samples.size();
  const double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(n);

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::vector<double> means(resamples);
  for (auto& m : means) {
    double sum = 0.0;
    for (std::size_t k = 0; k < n; ++k) sum += samples[pick(rng)];
    m = sum / static_cast<double>(n);
  }
  std::sort(means.begin(), means.end());
  const double alpha = (1.0 - level) / 2.0;

  CIEstimate est;
  est.mean = mean;
  est.lo = std::min(quantile_sorted(means, alpha), mean);
  est.hi = std::max(quantile_sorted(means, 1.0 - alpha), mean);
  est.n_samples = n;
  est.level = level;
  est.resamples = resamples;
  return est;
}

struct EstimateOptions {
  double level = 0.90;
  std::size_t resamples = 1000;
  std::uint64_t seed = 42;
  /// Budget accounting and the gate use `hi` instead of `mean` when set.
  bool use_upper_bound = false;
};

enum class Metric { Duration, Photos };

/// Per-POI duration and photo-count estimates for every POI of a catalog.
class PoiEstimates {
 public:
  PoiEstimates() = default;

  PoiEstimates(std::span<const Trajectory> train, const PoiCatalog& catalog, const EstimateOptions& opts = {})
      : opts_(opts) {
    std::map<PoiId, std::vector<double>> durations, photos;
    std::vector<double> all_durations, all_photos;
    for (const auto& t : train) {
      for (const auto& v : t.visits) {
        detail::require(catalog.contains(v.poi_id), "training visit references unknown poi_id " +
                                                        std::to_string(v.poi_id));
        durations[v.poi_id].push_back(v.duration());
        photos[v.poi_id].push_back(static_cast<double>(v.photo_count));
        all_durations.push_back(v.duration());
        all_photos.push_back(static_cast<double>(v.photo_count));
      }
    }
    detail::require(!all_durations.empty(), "no visits in the training set");
    const double median_duration = median(all_durations);
    const double median_photos = median(all_photos);

    auto fallback = [&](double value) {
      CIEstimate e;
      e.mean = e.lo = e.hi = value;
      e.level = opts_.level;
      e.fallback = true;
      return e;
    };
    for (const auto& [id, _] : catalog) {
      const std::uint64_t seed = opts_.seed ^ static_cast<std::uint64_t>(id);
      Entry entry;
      auto d = durations.find(id);
      entry.duration = d == durations.end() ? fallback(median_duration)
                                            : bootstrap_ci(d->second, opts_.level, opts_.resamples, seed);
      auto p = photos.find(id);
      entry.photos = p == photos.end() ? fallback(median_photos)
                                       : bootstrap_ci(p->second, opts_.level, opts_.resamples, seed);
      table_.emplace(id, entry);
    }
  }

  const CIEstimate& expected_duration(PoiId id) const { return entry(id).duration; }
  const CIEstimate& expected_photo_count(PoiId id) const { return entry(id).photos; }

  /// Point estimate used downstream: mean, or hi when configured.
  double duration(PoiId id) const { return point(expected_duration(id)); }
  double photo_count(PoiId id) const { return point(expected_photo_count(id)); }

  bool contains(PoiId id) const { return table_.contains(id); }
  const EstimateOptions& options() const { return opts_; }

  /// Semicolon table `poiID;metric;mean;lo;hi;n;fallback`.
  void write_table(std::ostream& out) const {
    out << "poiID;metric;mean;lo;hi;n;fallback\n";
    out << std::setprecision(17);
    for (const auto& [id, e] : table_) {
      for (auto [name, ci] : {std::pair{"duration", &e.duration}, std::pair{"photos", &e.photos}}) {
        out << id << ';' << name << ';' << ci->mean << ';' << ci->lo << ';' << ci->hi << ';' << ci->n_samples << ';'
            << (ci->fallback ? 1 : 0) << '\n';
      }
    }
  }

 private:
  struct Entry {
    CIEstimate duration;
    CIEstimate photos;
  };

  const Entry& entry(PoiId id) const {
    auto it = table_.find(id);
    detail::require(it != table_.end(), "no estimate for unknown poi_id " + std::to_string(id));
    return it->second;
  }

  double point(const CIEstimate& e) const { return opts_.use_upper_bound ? e.hi : e.mean; }

  EstimateOptions opts_;
  std::map<PoiId, Entry> table_;
};

}  // namespace tourmlm

#endif
