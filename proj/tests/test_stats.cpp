#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "helpers.hpp"

using namespace tourmlm;
using testing_util::make_catalog;

TEST(Bootstrap, ZeroVariance) {
  const std::vector<double> s = {5, 5, 5};
  for (std::uint64_t seed : {1u, 2u, 99u}) {
    const auto ci = bootstrap_ci(s, 0.9, 200, seed);
    EXPECT_EQ(ci.mean, 5.0);
    EXPECT_EQ(ci.lo, 5.0);
    EXPECT_EQ(ci.hi, 5.0);
  }
}

TEST(Bootstrap, SingleSample) {
  const std::vector<double> s = {1};
  const auto ci = bootstrap_ci(s, 0.9, 100);
  EXPECT_EQ(ci.mean, 1.0);
  EXPECT_EQ(ci.lo, 1.0);
  EXPECT_EQ(ci.hi, 1.0);
  EXPECT_EQ(ci.n_samples, 1u);
}

// Two samples: the resampled mean is 0, 5 or 10 with probability 1/4, 1/2, 1/4.
// The 5% and 95% points of that law are 0 and 10.
TEST(Bootstrap, TwoSampleExhaustiveOracle) {
  const std::vector<double> s = {0, 10};
  std::map<double, double> law;
  for (double a : s) {
    for (double b : s) law[(a + b) / 2] += 0.25;
  }
  auto law_quantile = [&](double q) {
    double acc = 0;
    for (auto [v, p] : law) {
      acc += p;
      if (acc >= q) return v;
    }
    return law.rbegin()->first;
  };
  const auto ci = bootstrap_ci(s, 0.9, 20000, 7);
  EXPECT_EQ(ci.mean, 5.0);
  EXPECT_EQ(ci.lo, law_quantile(0.05));
  EXPECT_EQ(ci.hi, law_quantile(0.95));
}

TEST(Bootstrap, Preconditions) {
  EXPECT_THROW(bootstrap_ci(std::vector<double>{}, 0.9, 10), InputError);
  EXPECT_THROW(bootstrap_ci(std::vector<double>{1.0}, 0.9, 0), InputError);
  EXPECT_THROW(bootstrap_ci(std::vector<double>{1.0}, 1.0, 10), InputError);
}

TEST(Bootstrap, DeterministicPerSeed) {
  const std::vector<double> s = {3, 1, 4, 1, 5, 9, 2, 6};
  EXPECT_EQ(bootstrap_ci(s, 0.9, 500, 12), bootstrap_ci(s, 0.9, 500, 12));
}

// Property: nested levels give nested intervals, and lo <= mean <= hi inside the data range.
TEST(BootstrapProperty, MonotoneInLevelAndBracketsMean) {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> g(3.0, 2.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> s(2 + trial % 20);
    for (auto& x : s) x = g(rng);
    const auto seed = static_cast<std::uint64_t>(trial);
    const auto narrow = bootstrap_ci(s, 0.5, 300, seed);
    const auto mid = bootstrap_ci(s, 0.9, 300, seed);
    const auto wide = bootstrap_ci(s, 0.99, 300, seed);
    EXPECT_LE(wide.lo, mid.lo);
    EXPECT_LE(mid.lo, narrow.lo);
    EXPECT_GE(wide.hi, mid.hi);
    EXPECT_GE(mid.hi, narrow.hi);
    const auto [mn, mx] = std::minmax_element(s.begin(), s.end());
    for (const auto& ci : {narrow, mid, wide}) {
      EXPECT_LE(ci.lo, ci.mean);
      EXPECT_LE(ci.mean, ci.hi);
      EXPECT_GE(ci.lo, *mn - 1e-12);
      EXPECT_LE(ci.hi, *mx + 1e-12);
    }
  }
}

TEST(Quantile, LinearInterpolation) {
  const std::vector<double> s = {0, 10, 20, 30};
  EXPECT_DOUBLE_EQ(quantile_sorted(s, 0.0), 0.0);
  EXPECT_DOUBLE_EQ(quantile_sorted(s, 1.0), 30.0);
  EXPECT_DOUBLE_EQ(quantile_sorted(s, 0.5), 15.0);
  EXPECT_DOUBLE_EQ(median({3, 1, 2}), 2.0);
}

namespace {

Trajectory visits(const std::string& seq, std::vector<std::tuple<PoiId, Timestamp, std::uint32_t>> v) {
  Trajectory t;
  t.seq_id = seq;
  t.user_id = "u";
  t.city = "c";
  Timestamp clock = 1000;
  for (auto [p, d, n] : v) {
    t.visits.push_back({p, clock, clock + d, n});
    clock += d + 100;
  }
  return t;
}

}  // namespace

TEST(PoiEstimates, MeansPerPoi) {
  const std::vector<Trajectory> train = {visits("a", {{1, 600, 2}, {2, 300, 2}, {3, 0, 1}}),
                                         visits("b", {{2, 900, 2}, {3, 0, 1}, {1, 600, 2}})};
  const PoiEstimates est(train, make_catalog(4));
  EXPECT_EQ(est.expected_duration(1).mean, 600.0);
  EXPECT_EQ(est.expected_duration(2).mean, 600.0);
  EXPECT_EQ(est.expected_photo_count(1).mean, 2.0);
  EXPECT_EQ(est.expected_photo_count(1).lo, 2.0);
  EXPECT_FALSE(est.expected_duration(1).fallback);
}

TEST(PoiEstimates, UnvisitedPoiFallsBackToMedian) {
  const std::vector<Trajectory> train = {visits("a", {{1, 100, 2}, {2, 300, 3}, {3, 900, 4}})};
  const PoiEstimates est(train, make_catalog(4));
  const auto& d = est.expected_duration(4);
  EXPECT_TRUE(d.fallback);
  EXPECT_EQ(d.mean, 300.0);
  EXPECT_EQ(d.n_samples, 0u);
  EXPECT_EQ(est.expected_photo_count(4).mean, 3.0);
}

TEST(PoiEstimates, UnknownPoiRejected) {
  const std::vector<Trajectory> train = {visits("a", {{1, 100, 2}, {2, 300, 3}, {3, 900, 4}})};
  const PoiEstimates est(train, make_catalog(3));
  EXPECT_THROW(est.expected_duration(42), InputError);
}

TEST(PoiEstimates, UpperBoundOption) {
  const std::vector<Trajectory> train = {visits("a", {{1, 100, 2}, {2, 300, 3}, {3, 900, 4}}),
                                         visits("b", {{1, 500, 2}, {2, 300, 3}, {3, 900, 4}})};
  EstimateOptions opts;
  opts.use_upper_bound = true;
  const PoiEstimates est(train, make_catalog(3), opts);
  EXPECT_EQ(est.duration(1), est.expected_duration(1).hi);
  EXPECT_GT(est.duration(1), est.expected_duration(1).mean);
}

TEST(PoiEstimates, TableFormat) {
  const std::vector<Trajectory> train = {visits("a", {{1, 100, 2}, {2, 300, 3}, {3, 900, 4}})};
  const PoiEstimates est(train, make_catalog(3));
  std::ostringstream os;
  est.write_table(os);
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "poiID;metric;mean;lo;hi;n;fallback");
  std::getline(in, line);
  EXPECT_EQ(line, "1;duration;100;100;100;1;0");
}
