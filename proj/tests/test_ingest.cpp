#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "helpers.hpp"

using namespace tourmlm;
using testing_util::fixture;

namespace {

PoiCatalog three_pois() {
  std::istringstream in("poiID;poiName;theme;lat;lon\n1;A;park;55.1;-4.1\n2;B;museum;55.2;-4.2\n3;C;park;55.3;-4.3\n");
  return parse_pois(in, "c");
}

std::vector<CheckIn> trace(std::initializer_list<std::pair<Timestamp, PoiId>> rows, const std::string& user = "u1") {
  std::vector<CheckIn> out;
  int k = 0;
  for (auto [t, p] : rows) out.push_back({user + "_p" + std::to_string(k++), user, t, p});
  return out;
}

}  // namespace

TEST(ParseCheckins, EmptyBodyGivesEmptyList) {
  std::istringstream in("photoID;userID;dateTaken;poiID\n");
  EXPECT_TRUE(parse_checkins(in).empty());
}

TEST(ParseCheckins, RowMapsFieldsDirectly) {
  std::istringstream in("photoID;userID;dateTaken;poiID\np1;u1;1200;7\n");
  const auto rows = parse_checkins(in);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].photo_id, "p1");
  EXPECT_EQ(rows[0].user_id, "u1");
  EXPECT_EQ(rows[0].timestamp, 1200);
  EXPECT_EQ(rows[0].poi_id, 7u);
}

TEST(ParseCheckins, ColumnsMatchedByName) {
  std::istringstream in("poiID;dateTaken;userID;photoID\n7;1200;u1;p1\n");
  const auto rows = parse_checkins(in);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].photo_id, "p1");
  EXPECT_EQ(rows[0].poi_id, 7u);
}

TEST(ParseCheckins, BadTimestampNamesRowAndColumn) {
  std::istringstream in("photoID;userID;dateTaken;poiID\np1;u1;1200;7\np2;u1;abc;7\n");
  try {
    parse_checkins(in, "ck.csv");
    FAIL() << "expected InputError";
  } catch (const InputError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("row 3"), std::string::npos) << msg;
    EXPECT_NE(msg.find("dateTaken"), std::string::npos) << msg;
  }
}

TEST(ParseCheckins, MissingColumnRejected) {
  std::istringstream in("photoID;userID;poiID\np1;u1;7\n");
  EXPECT_THROW(parse_checkins(in), InputError);
}

TEST(ParseCheckins, NonPositiveValuesRejected) {
  std::istringstream zero_time("photoID;userID;dateTaken;poiID\np1;u1;0;7\n");
  EXPECT_THROW(parse_checkins(zero_time), InputError);
  std::istringstream zero_poi("photoID;userID;dateTaken;poiID\np1;u1;10;0\n");
  EXPECT_THROW(parse_checkins(zero_poi), InputError);
}

TEST(ParseCheckins, MissingFileRejected) {
  EXPECT_THROW(parse_checkins(std::filesystem::path("/nonexistent/checkins.csv")), InputError);
}

TEST(ParsePois, FixtureLoads) {
  const auto cat = parse_pois(fixture("pois_tiny.csv"), "glasgow");
  EXPECT_EQ(cat.size(), 3u);
  EXPECT_EQ(cat.city(), "glasgow");
  EXPECT_EQ(cat.at(2).theme, "park");
}

TEST(ParsePois, InvalidRecordsRejected) {
  std::istringstream dup("poiID;poiName;theme;lat;lon\n1;A;park;55;-4\n1;B;park;55;-4\n");
  EXPECT_THROW(parse_pois(dup, "c"), InputError);
  std::istringstream no_theme("poiID;poiName;theme;lat;lon\n1;A;;55;-4\n");
  EXPECT_THROW(parse_pois(no_theme, "c"), InputError);
  std::istringstream bad_lat("poiID;poiName;theme;lat;lon\n1;A;park;95;-4\n");
  EXPECT_THROW(parse_pois(bad_lat, "c"), InputError);
}

TEST(Reconstruct, CollapsesConsecutivePhotosAtOnePoi) {
  const auto cat = three_pois();
  const auto trajs = reconstruct_trajectories(trace({{1000, 1}, {1100, 1}, {1200, 2}, {1300, 3}}), cat);
  ASSERT_EQ(trajs.size(), 1u);
  ASSERT_EQ(trajs[0].visits.size(), 3u);
  EXPECT_EQ(trajs[0].visits[0].photo_count, 2u);
  EXPECT_EQ(trajs[0].visits[0].duration(), 100.0);
  EXPECT_EQ(trajs[0].poi_sequence(), (std::vector<PoiId>{1, 2, 3}));
}

TEST(Reconstruct, LongGapSplitsAndDropsShortFragments) {
  const auto cat = three_pois();
  ReconstructStats stats;
  const auto trajs =
      reconstruct_trajectories(trace({{1000, 1}, {1100, 1}, {1200, 2}, {1200 + 10 * 86400, 3}}), cat, {}, &stats);
  EXPECT_TRUE(trajs.empty());
  EXPECT_EQ(stats.fragments, 2u);
  EXPECT_EQ(stats.dropped, 2u);
}

TEST(Reconstruct, TwoPoisOnlyEmitsNothing) {
  EXPECT_TRUE(reconstruct_trajectories(trace({{10, 1}, {20, 2}, {30, 1}}), three_pois()).empty());
}

TEST(Reconstruct, RevisitLaterStaysSeparateVisit) {
  const auto trajs = reconstruct_trajectories(trace({{10, 1}, {20, 2}, {30, 1}, {40, 3}}), three_pois());
  ASSERT_EQ(trajs.size(), 1u);
  EXPECT_EQ(trajs[0].poi_sequence(), (std::vector<PoiId>{1, 2, 1, 3}));
}

TEST(Reconstruct, UnknownPoiListed) {
  try {
    reconstruct_trajectories(trace({{10, 1}, {20, 9}, {30, 8}}), three_pois());
    FAIL() << "expected InputError";
  } catch (const InputError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("8"), std::string::npos);
    EXPECT_NE(msg.find("9"), std::string::npos);
  }
}

TEST(Reconstruct, NonPositiveGapRejected) {
  ReconstructOptions opts;
  opts.gap_threshold = 0;
  EXPECT_THROW(reconstruct_trajectories(trace({{10, 1}}), three_pois(), opts), InputError);
}

TEST(Reconstruct, FixtureGivesOneTrajectory) {
  const auto cat = parse_pois(fixture("pois_tiny.csv"), "glasgow");
  const auto trajs = reconstruct_trajectories(parse_checkins(fixture("checkins_tiny.csv")), cat);
  ASSERT_EQ(trajs.size(), 1u);
  EXPECT_EQ(trajs[0].user_id, "u1");
  EXPECT_EQ(trajs[0].city, "glasgow");
}

// Property: shuffling the input changes nothing, and photos are conserved.
TEST(ReconstructProperty, PermutationInvariantAndConservesPhotos) {
  const auto cat = testing_util::make_catalog(6);
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<CheckIn> rows;
    std::uniform_int_distribution<int> poi(1, 6), step(1, 4000);
    for (int u = 0; u < 4; ++u) {
      Timestamp t = 1000;
      for (int k = 0; k < 15; ++k) {
        t += step(rng) * (k == 7 ? 20 : 1);
        rows.push_back({"p" + std::to_string(u) + "_" + std::to_string(k), "u" + std::to_string(u), t,
                        static_cast<PoiId>(poi(rng))});
      }
    }
    ReconstructStats stats;
    const auto base = reconstruct_trajectories(rows, cat, {}, &stats);
    auto shuffled = rows;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const auto again = reconstruct_trajectories(shuffled, cat);
    ASSERT_EQ(base.size(), again.size());
    for (std::size_t i = 0; i < base.size(); ++i) EXPECT_EQ(to_json(base[i]), to_json(again[i]));

    // Photos in retained trajectories equal rows minus rows of dropped fragments.
    std::size_t kept = 0;
    for (const auto& t : base) {
      for (const auto& v : t.visits) kept += v.photo_count;
      for (std::size_t i = 1; i < t.visits.size(); ++i) {
        EXPECT_NE(t.visits[i].poi_id, t.visits[i - 1].poi_id);
        EXPECT_LT(t.visits[i - 1].arrival, t.visits[i].arrival);
      }
    }
    std::size_t covered = 0;
    for (const auto& r : rows) {
      for (const auto& t : base) {
        if (t.user_id == r.user_id && r.timestamp >= t.first_time() && r.timestamp <= t.last_time()) {
          ++covered;
          break;
        }
      }
    }
    EXPECT_EQ(kept, covered);
    EXPECT_EQ(stats.retained, base.size());
  }
}

TEST(Split, FloorArithmetic) {
  auto make = [](std::size_t n) {
    std::vector<Trajectory> v;
    for (std::size_t i = 0; i < n; ++i) {
      v.push_back(testing_util::make_trajectory("s" + std::to_string(i), "u", {1, 2, 3},
                                                static_cast<Timestamp>(1000 + 100000 * (n - i))));
    }
    return v;
  };
  auto s10 = split_dataset(make(10));
  EXPECT_EQ(s10.train.size(), 7u);
  EXPECT_EQ(s10.validation.size(), 2u);
  EXPECT_EQ(s10.test.size(), 1u);
  auto s3 = split_dataset(make(3));
  EXPECT_EQ(s3.train.size(), 2u);
  EXPECT_EQ(s3.validation.size(), 0u);
  EXPECT_EQ(s3.test.size(), 1u);
  auto s1 = split_dataset(make(1));
  EXPECT_EQ(s1.train.size(), 0u);
  EXPECT_EQ(s1.validation.size(), 0u);
  EXPECT_EQ(s1.test.size(), 1u);
  EXPECT_THROW(split_dataset({}), InputError);
}

TEST(SplitProperty, DisjointChronologicalAndComplete) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 40; ++trial) {
    std::uniform_int_distribution<std::size_t> count(1, 60);
    std::uniform_int_distribution<Timestamp> start(1, 1'000'000);
    const auto n = count(rng);
    std::vector<Trajectory> v;
    for (std::size_t i = 0; i < n; ++i) v.push_back(testing_util::make_trajectory("s" + std::to_string(i), "u", {1, 2, 3}, start(rng)));
    const auto s = split_dataset(v);
    EXPECT_EQ(s.train.size() + s.validation.size() + s.test.size(), n);
    std::set<std::string> ids;
    for (const auto* part : {&s.train, &s.validation, &s.test}) {
      for (const auto& t : *part) EXPECT_TRUE(ids.insert(t.seq_id).second);
    }
    Timestamp max_train = 0;
    for (const auto& t : s.train) max_train = std::max(max_train, t.last_time());
    for (const auto& t : s.test) EXPECT_LE(max_train, t.last_time());
  }
}

TEST(TrajectoryJson, RoundTrip) {
  std::vector<Trajectory> v = {testing_util::make_trajectory("a#0", "a", {3, 1, 2}),
                               testing_util::make_trajectory("b#1", "b", {2, 3, 1, 4}, 99999)};
  std::stringstream ss;
  write_trajectories(ss, v);
  const auto back = read_trajectories(ss);
  ASSERT_EQ(back.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) EXPECT_EQ(to_json(back[i]), to_json(v[i]));
}

TEST(TrajectoryJson, MalformedLineRejected) {
  std::istringstream in("{\"seq_id\": \"x\"}\n");
  EXPECT_THROW(read_trajectories(in), InputError);
}
