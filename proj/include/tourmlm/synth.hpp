#ifndef TOURMLM_SYNTH_HPP
#define TOURMLM_SYNTH_HPP

// Seeded synthetic city: POIs with themes, coordinates, dwell times and photo
// habits; users with a favourite theme; trajectories as preference-weighted
// walks; and per-POI comment embeddings whose spread encodes how coherent the
// POI's reviews are. Everything is a pure function of the config.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "tourmlm/error.hpp"
#include "tourmlm/recommender.hpp"
#include "tourmlm/sentiment.hpp"
#include "tourmlm/types.hpp"

namespace tourmlm {

struct SyntheticCityConfig {
  std::size_t n_pois = 20;
  std::size_t n_users = 50;
  std::size_t n_trajectories = 300;
  std::size_t n_themes = 4;
  /// Weight of a user's favourite theme relative to the others (1 = no preference).
  double preference_sharpness = 10.0;
  /// Fraction of POIs whose comments are coherent.
  double coherent_fraction = 0.5;
  std::size_t embedding_dim = 384;
  std::size_t min_visits = 3;
  std::size_t max_visits = 7;
  std::string city = "synthville";
  std::uint64_t seed = 42;

  void validate() const {
    detail::require(n_pois >= 3, "synthetic city needs at least 3 POIs");
    detail::require(n_users >= 1, "synthetic city needs at least one user");
    detail::require(n_themes >= 1, "synthetic city needs at least one theme");
    detail::require(preference_sharpness >= 1.0, "preference sharpness must be >= 1");
    detail::require(coherent_fraction >= 0.0 && coherent_fraction <= 1.0, "coherent fraction must lie in [0,1]");
    detail::require(embedding_dim >= 2, "embedding dimension must be at least 2");
    detail::require(min_visits >= 3 && min_visits <= max_visits, "visit range must satisfy 3 <= min <= max");
  }
};

/// Named sharpness levels accepted by the CLI.
inline double sharpness_level(const std::string& name) {
  if (name == "low") return 1.5;
  if (name == "medium") return 4.0;
  if (name == "high") return 10.0;
  try {
    std::size_t used = 0;
    const double v = std::stod(name, &used);
    if (used == name.size()) return v;
  } catch (const std::exception&) {
  }
  throw InputError("unknown preference sharpness '" + name + "' (low|medium|high|<number>)");
}

struct SyntheticPoi {
  PoiId id = 0;
  double attractiveness = 1.0;
  double mean_dwell_s = 0.0;
  double photo_rate = 0.0;
  bool coherent = false;
};

struct SyntheticCity {
  PoiCatalog catalog;
  std::vector<CheckIn> checkins;
  EmbeddingStore embeddings{384};
  std::vector<SyntheticPoi> pois;
  std::vector<std::size_t> favourite_theme;
};

inline SyntheticCity generate_synthetic_city(const SyntheticCityConfig& cfg) {
  cfg.validate();
  static constexpr std::array<const char*, 8> kThemeNames = {"museum",  "park",     "historic", "shopping",
                                                            "gallery", "landmark", "market",   "garden"};
  auto theme_name = [&](std::size_t t) {
    return t < kThemeNames.size() ? std::string(kThemeNames[t]) : "theme" + std::to_string(t);
  };

  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  SyntheticCity city;
  city.catalog = PoiCatalog(cfg.city);
  city.embeddings = EmbeddingStore(static_cast<std::uint32_t>(cfg.embedding_dim));

  constexpr double kLat = 55.8600, kLon = -4.2500;
  const auto n_coherent = static_cast<std::size_t>(std::llround(cfg.coherent_fraction * static_cast<double>(cfg.n_pois)));
  std::vector<bool> coherent(cfg.n_pois, false);
  std::fill(coherent.begin(), coherent.begin() + static_cast<std::ptrdiff_t>(n_coherent), true);
  std::shuffle(coherent.begin(), coherent.end(), rng);
  for (std::size_t i = 0; i < cfg.n_pois; ++i) {
    PoiRecord rec;
    rec.poi_id = static_cast<PoiId>(i + 1);
    rec.name = "POI " + std::to_string(i + 1);
    rec.theme = theme_name(i % cfg.n_themes);
    rec.lat = kLat + (unit(rng) - 0.5) * 0.04;
    rec.lon = kLon + (unit(rng) - 0.5) * 0.07;
    SyntheticPoi sp;
    sp.id = rec.poi_id;
    sp.coherent = coherent[i];
    sp.attractiveness = std::exp(0.5 * gauss(rng)) * (sp.coherent ? 1.5 : 1.0);
    sp.mean_dwell_s = (15.0 + 45.0 * unit(rng)) * 60.0;
    sp.photo_rate = 0.5 + 3.5 * unit(rng);
    city.catalog.add(rec);
    city.pois.push_back(sp);
  }
  for (std::size_t u = 0; u < cfg.n_users; ++u) {
    city.favourite_theme.push_back(static_cast<std::size_t>(unit(rng) * static_cast<double>(cfg.n_themes)) %
                                   cfg.n_themes);
  }

  const auto ids = city.catalog.ids();
  auto distance_km = [&](PoiId a, PoiId b) {
    return travel_time(city.catalog, a, b, 1.0) / 3600.0;
  };

  struct Photo {
    Timestamp t;
    std::string user;
    PoiId poi;
  };
  std::vector<Photo> photos;
  constexpr Timestamp kEpoch = 1'500'000'000;
  const std::size_t max_len = std::min(cfg.max_visits, cfg.n_pois);
  const std::size_t min_len = std::min(cfg.min_visits, max_len);
  for (std::size_t k = 0; k < cfg.n_trajectories; ++k) {
    const std::size_t u = static_cast<std::size_t>(unit(rng) * static_cast<double>(cfg.n_users)) % cfg.n_users;
    const std::string user = "u" + std::to_string(u);
    const std::size_t fav = city.favourite_theme[u];
    const std::size_t len = min_len + static_cast<std::size_t>(unit(rng) * static_cast<double>(max_len - min_len + 1)) %
                                          (max_len - min_len + 1);

    // Two days per trajectory keeps consecutive trips of one user far apart.
    double clock = static_cast<double>(kEpoch) + static_cast<double>(k) * 2.0 * 86400.0 + 9.0 * 3600.0 +
                   unit(rng) * 2.0 * 3600.0;
    std::vector<PoiId> walk;
    for (std::size_t step = 0; step < len; ++step) {
      std::vector<double> w(ids.size(), 0.0);
      for (std::size_t i = 0; i < ids.size(); ++i) {
        if (std::find(walk.begin(), walk.end(), ids[i]) != walk.end()) continue;
        const double pref = (i % cfg.n_themes) == fav ? cfg.preference_sharpness : 1.0;
        const double near = walk.empty() ? 1.0 : std::exp(-distance_km(walk.back(), ids[i]) / 2.0);
        w[i] = pref * city.pois[i].attractiveness * near;
      }
      std::discrete_distribution<std::size_t> pick(w.begin(), w.end());
      const std::size_t i = pick(rng);
      if (!walk.empty()) {
        clock += distance_km(walk.back(), ids[i]) / 4.0 * 3600.0 + unit(rng) * 300.0 + 60.0;
      }
      walk.push_back(ids[i]);

      const double dwell = city.pois[i].mean_dwell_s * (0.6 + 0.8 * unit(rng));
      std::poisson_distribution<int> extra(city.pois[i].photo_rate);
      const int n_photos = 1 + extra(rng);
      const auto arrival = static_cast<Timestamp>(clock);
      photos.push_back({arrival, user, ids[i]});
      if (n_photos >= 2) {
        const auto departure = static_cast<Timestamp>(clock + dwell);
        for (int p = 2; p < n_photos; ++p) {
          photos.push_back({arrival + static_cast<Timestamp>(unit(rng) * dwell), user, ids[i]});
        }
        photos.push_back({departure, user, ids[i]});
        clock += dwell;
      }
    }
  }
  std::stable_sort(photos.begin(), photos.end(), [](const Photo& a, const Photo& b) {
    return std::tie(a.t, a.user, a.poi) < std::tie(b.t, b.user, b.poi);
  });
  for (std::size_t i = 0; i < photos.size(); ++i) {
    city.checkins.push_back({"ph" + std::to_string(i + 1), photos[i].user, photos[i].t, photos[i].poi});
  }

  // Comments: unit centre per POI plus isotropic noise; coherent POIs get a
  // small spread, incoherent ones a large spread.
  const std::size_t dim = cfg.embedding_dim;
  for (const auto& p : city.pois) {
    std::vector<double> centre(dim);
    double norm = 0.0;
    for (auto& c : centre) {
      c = gauss(rng);
      norm += c * c;
    }
    for (auto& c : centre) c /= std::sqrt(norm);
    const double spread = p.coherent ? 0.5 : 2.5;
    const std::size_t m = 8 + static_cast<std::size_t>(unit(rng) * 13.0) % 13;
    for (std::size_t j = 0; j < m; ++j) {
      CommentEmbedding e;
      e.poi_id = p.id;
      e.comment_index = static_cast<std::uint32_t>(j);
      e.vector.resize(dim);
      for (std::size_t c = 0; c < dim; ++c) {
        e.vector[c] = static_cast<float>(centre[c] + spread * gauss(rng) / std::sqrt(static_cast<double>(dim)));
      }
      city.embeddings.add(std::move(e));
    }
  }
  return city;
}

inline void write_checkins(std::ostream& out, const std::vector<CheckIn>& checkins) {
  out << "photoID;userID;dateTaken;poiID\n";
  for (const auto& c : checkins) out << c.photo_id << ';' << c.user_id << ';' << c.timestamp << ';' << c.poi_id << '\n';
}

inline void write_pois(std::ostream& out, const PoiCatalog& catalog) {
  out << "poiID;poiName;theme;lat;lon\n";
  out << std::setprecision(9);
  for (const auto& [id, p] : catalog) out << id << ';' << p.name << ';' << p.theme << ';' << p.lat << ';' << p.lon << '\n';
}

struct SyntheticFiles {
  std::filesystem::path checkins, pois, embeddings;
};

/// Writes checkins.csv, pois.csv and comments.pemb into `dir`.
inline SyntheticFiles write_synthetic_city(const SyntheticCity& city, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  SyntheticFiles files{dir / "checkins.csv", dir / "pois.csv", dir / "comments.pemb"};
  {
    std::ofstream out(files.checkins, std::ios::binary);
    if (!out) throw InputError("cannot write " + files.checkins.string());
    write_checkins(out, city.checkins);
  }
  {
    std::ofstream out(files.pois, std::ios::binary);
    if (!out) throw InputError("cannot write " + files.pois.string());
    write_pois(out, city.catalog);
  }
  write_pemb(files.embeddings, city.embeddings);
  return files;
}

}  // namespace tourmlm

#endif
