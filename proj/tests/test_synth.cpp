#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "helpers.hpp"

using namespace tourmlm;
using testing_util::TempDir;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

SyntheticCityConfig small(std::uint64_t seed = 42) {
  SyntheticCityConfig c;
  c.embedding_dim = 32;
  c.n_trajectories = 120;
  c.seed = seed;
  return c;
}

std::vector<Trajectory> reconstruct(const SyntheticCity& city) {
  return reconstruct_trajectories(city.checkins, city.catalog);
}

/// Share of visits whose theme is the traveller's favourite.
double favourite_share(const SyntheticCityConfig& cfg) {
  const auto city = generate_synthetic_city(cfg);
  std::size_t hit = 0, total = 0;
  for (const auto& t : reconstruct(city)) {
    const auto u = static_cast<std::size_t>(std::stoul(t.user_id.substr(1)));
    for (const auto& v : t.visits) {
      hit += city.catalog.at(v.poi_id).theme == city.catalog.at(static_cast<PoiId>(city.favourite_theme[u] + 1)).theme;
      ++total;
    }
  }
  return static_cast<double>(hit) / static_cast<double>(total);
}

}  // namespace

TEST(Synth, ZeroTrajectoriesStillWritesHeaders) {
  auto cfg = small();
  cfg.n_trajectories = 0;
  TempDir dir("synth0");
  const auto files = write_synthetic_city(generate_synthetic_city(cfg), dir.path());
  EXPECT_EQ(slurp(files.checkins), "photoID;userID;dateTaken;poiID\n");
  EXPECT_TRUE(parse_checkins(files.checkins).empty());
  EXPECT_EQ(parse_pois(files.pois).size(), cfg.n_pois);
}

TEST(Synth, SameSeedSameBytes) {
  TempDir a("synthA"), b("synthB"), c("synthC");
  const auto fa = write_synthetic_city(generate_synthetic_city(small(7)), a.path());
  const auto fb = write_synthetic_city(generate_synthetic_city(small(7)), b.path());
  const auto fc = write_synthetic_city(generate_synthetic_city(small(8)), c.path());
  EXPECT_EQ(slurp(fa.checkins), slurp(fb.checkins));
  EXPECT_EQ(slurp(fa.pois), slurp(fb.pois));
  EXPECT_EQ(slurp(fa.embeddings), slurp(fb.embeddings));
  EXPECT_NE(slurp(fa.checkins), slurp(fc.checkins));
}

TEST(Synth, WrittenFilesParseBack) {
  TempDir dir("synthP");
  const auto city = generate_synthetic_city(small());
  const auto files = write_synthetic_city(city, dir.path());
  EXPECT_EQ(parse_checkins(files.checkins).size(), city.checkins.size());
  const auto store = load_embeddings(files.embeddings);
  EXPECT_EQ(store.dimension(), 32u);
  EXPECT_EQ(store.record_count(), city.embeddings.record_count());
  const auto cat = parse_pois(files.pois, "synthville");
  for (const auto& [id, p] : city.catalog) {
    EXPECT_EQ(cat.at(id).theme, p.theme);
    EXPECT_NEAR(cat.at(id).lat, p.lat, 1e-7);
  }
}

// Every generated trip survives reconstruction intact.
TEST(Synth, TrajectoriesReconstructOneToOne) {
  const auto cfg = small();
  const auto trajectories = reconstruct(generate_synthetic_city(cfg));
  EXPECT_EQ(trajectories.size(), cfg.n_trajectories);
  for (const auto& t : trajectories) {
    const auto s = t.poi_sequence();
    EXPECT_GE(s.size(), cfg.min_visits);
    EXPECT_LE(s.size(), cfg.max_visits);
    EXPECT_EQ(std::set<PoiId>(s.begin(), s.end()).size(), s.size());
  }
}

TEST(Synth, CoherentPoisAreCloserInTheEmittedFile) {
  TempDir dir("synthC");
  const auto city = generate_synthetic_city(small());
  const auto store = load_embeddings(write_synthetic_city(city, dir.path()).embeddings);
  double worst_coherent = 0.0, best_incoherent = 1.0;
  std::size_t n_coherent = 0;
  for (const auto& p : city.pois) {
    const double d = poi_sentiment_distance(store, p.id);
    if (p.coherent) {
      worst_coherent = std::max(worst_coherent, d);
      ++n_coherent;
    } else {
      best_incoherent = std::min(best_incoherent, d);
    }
  }
  EXPECT_EQ(n_coherent, 10u);
  EXPECT_LT(worst_coherent, best_incoherent);
}

TEST(Synth, SharperPreferencesConcentrateOnFavouriteTheme) {
  auto low = small(), high = small();
  low.preference_sharpness = sharpness_level("low");
  high.preference_sharpness = sharpness_level("high");
  const double lo = favourite_share(low), hi = favourite_share(high);
  EXPECT_GT(hi, lo);
  EXPECT_GT(hi, 0.5);
  EXPECT_LT(lo, 0.45);
}

TEST(Synth, SharpnessLevels) {
  EXPECT_EQ(sharpness_level("medium"), 4.0);
  EXPECT_EQ(sharpness_level("2.5"), 2.5);
  EXPECT_THROW(sharpness_level("extreme"), InputError);
  EXPECT_THROW(sharpness_level("2x"), InputError);
}

TEST(Synth, ConfigValidation) {
  auto c = small();
  c.n_pois = 2;
  EXPECT_THROW(generate_synthetic_city(c), InputError);
  c = small();
  c.coherent_fraction = 1.5;
  EXPECT_THROW(generate_synthetic_city(c), InputError);
  c = small();
  c.min_visits = 2;
  EXPECT_THROW(generate_synthetic_city(c), InputError);
}

TEST(Synth, PopularityF1Reproducible) {
  auto run = [] {
    const auto city = generate_synthetic_city(small(5));
    const auto split = split_dataset(reconstruct(city));
    const PoiEstimates est(split.train, city.catalog);
    const PopularityBaseline pop(split.train, city.catalog);
    return evaluate_predictor(split.test, [&](const ItineraryQuery& q) { return pop.predict(q, est, city.catalog); },
                              "popularity")
        .mean.f1;
  };
  const double a = run();
  EXPECT_EQ(a, run());
  EXPECT_GT(a, 0.0);
}
