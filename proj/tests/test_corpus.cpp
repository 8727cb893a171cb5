#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "helpers.hpp"

using namespace tourmlm;
using testing_util::make_catalog;
using testing_util::make_trajectory;

namespace {

std::vector<Trajectory> two_users() {
  return {make_trajectory("a#0", "ua", {1, 2, 3}), make_trajectory("b#0", "ub", {3, 2, 1})};
}

}  // namespace

TEST(Vocabulary, SizeByConstructionRule) {
  const auto v = build_vocabulary(two_users(), make_catalog(3, 2));
  EXPECT_EQ(v.size(), 5 + 3 + 2 + 1 + 2);
  EXPECT_EQ(v.count(TokenKind::Poi), 3u);
  EXPECT_EQ(v.count(TokenKind::Theme), 2u);
}

TEST(Vocabulary, FixedOrdering) {
  const auto v = build_vocabulary(two_users(), make_catalog(3, 2));
  EXPECT_EQ(to_string(v.token(kClsId)), "[CLS]");
  EXPECT_EQ(to_string(v.token(kSepId)), "[SEP]");
  EXPECT_EQ(to_string(v.token(kMaskId)), "[MASK]");
  EXPECT_EQ(to_string(v.token(kPadId)), "[PAD]");
  EXPECT_EQ(to_string(v.token(kUnkId)), "[UNK]");
  std::vector<std::string> rest;
  for (TokenId i = kNumSpecial; i < v.size(); ++i) rest.push_back(to_string(v.token(i)));
  EXPECT_EQ(rest, (std::vector<std::string>{"POI:1", "POI:2", "POI:3", "THEME:t0", "THEME:t1", "CITY:c", "USER:ua",
                                            "USER:ub"}));
  EXPECT_EQ(v.first_poi_token(), 5);
  EXPECT_EQ(v.poi_count(), 3);
}

TEST(Vocabulary, EmptyTrainingSetRejected) {
  EXPECT_THROW(build_vocabulary(std::vector<Trajectory>{}, make_catalog(3)), InputError);
}

TEST(Vocabulary, RebuildIsIdenticalAndUnknownsMapToUnk) {
  const auto a = build_vocabulary(two_users(), make_catalog(3));
  const auto b = build_vocabulary(two_users(), make_catalog(3));
  EXPECT_TRUE(a == b);
  EXPECT_EQ(a.hash(), b.hash());
  EXPECT_EQ(a.user_token("nobody"), kUnkId);
  EXPECT_EQ(a.poi_token(99), kUnkId);
}

TEST(Vocabulary, JsonRoundTripKeepsHash) {
  const auto a = build_vocabulary(two_users(), make_catalog(3));
  const auto b = Vocabulary::from_json(a.to_json());
  EXPECT_TRUE(a == b);
  EXPECT_EQ(a.hash(), b.hash());
}

TEST(Vocabulary, HashSeesThemeMap) {
  const auto a = build_vocabulary(two_users(), make_catalog(3, 2));
  auto cat = make_catalog(3, 2);
  PoiCatalog swapped("c");
  for (const auto& [id, p] : cat) {
    auto q = p;
    q.theme = id == 1 ? "t1" : (id == 2 ? "t0" : p.theme);
    swapped.add(q);
  }
  const auto b = build_vocabulary(two_users(), swapped);
  EXPECT_NE(a.hash(), b.hash());
}

TEST(Samples, FourVisitsGiveSix) {
  const auto trajs = std::vector{make_trajectory("a#0", "ua", {1, 2, 3, 4})};
  const auto v = build_vocabulary(trajs, make_catalog(4));
  EXPECT_EQ(generate_training_samples(trajs[0], v).size(), 6u);
}

TEST(Samples, ThreeVisitsEnumerated) {
  const auto trajs = std::vector{make_trajectory("a#0", "ua", {1, 2, 3})};
  const auto v = build_vocabulary(trajs, make_catalog(3));
  const auto samples = generate_training_samples(trajs[0], v);
  ASSERT_EQ(samples.size(), 3u);
  std::vector<std::pair<std::vector<std::string>, std::string>> got;
  for (const auto& s : samples) got.emplace_back(decode(s.input_ids, v), to_string(v.token(s.label_id)));
  using S = std::vector<std::string>;
  EXPECT_EQ(got[0].first, (S{"[CLS]", "USER:ua", "CITY:c", "THEME:t0", "POI:1", "[MASK]", "[SEP]"}));
  EXPECT_EQ(got[0].second, "POI:2");
  EXPECT_EQ(got[1].first,
            (S{"[CLS]", "USER:ua", "CITY:c", "THEME:t0", "POI:1", "THEME:t1", "POI:2", "[MASK]", "[SEP]"}));
  EXPECT_EQ(got[1].second, "POI:3");
  EXPECT_EQ(got[2].first, (S{"[CLS]", "USER:ua", "CITY:c", "THEME:t1", "POI:2", "[MASK]", "[SEP]"}));
  EXPECT_EQ(got[2].second, "POI:3");
}

TEST(Samples, TwoVisitsRejected) {
  const auto t = make_trajectory("a#0", "ua", {1, 2});
  const auto v = build_vocabulary(std::vector{make_trajectory("b#0", "ua", {1, 2, 3})}, make_catalog(3));
  EXPECT_THROW(generate_training_samples(t, v), InputError);
}

TEST(Samples, LeftTruncationKeepsMask) {
  const auto trajs = std::vector{make_trajectory("a#0", "ua", {1, 2, 3, 4, 5, 6, 7, 8})};
  const auto v = build_vocabulary(trajs, make_catalog(8));
  CorpusOptions opts;
  opts.max_len = 9;  // CLS USER CITY + 2 groups + MASK SEP
  for (const auto& s : generate_training_samples(trajs[0], v, opts)) {
    EXPECT_LE(s.input_ids.size(), 9u);
    EXPECT_EQ(s.input_ids[s.mask_position], kMaskId);
    EXPECT_EQ(s.input_ids.front(), kClsId);
    EXPECT_EQ(s.input_ids.back(), kSepId);
  }
  // (1..7) -> 8 keeps only the newest two visits 6 and 7.
  const auto all = generate_training_samples(trajs[0], v, opts);
  const auto& last = all[6];
  EXPECT_EQ(decode(last.input_ids, v),
            (std::vector<std::string>{"[CLS]", "USER:ua", "CITY:c", "THEME:t1", "POI:6", "THEME:t0", "POI:7",
                                      "[MASK]", "[SEP]"}));
}

TEST(Samples, RepeatUserLayout) {
  const auto trajs = std::vector{make_trajectory("a#0", "ua", {1, 2, 3})};
  const auto v = build_vocabulary(trajs, make_catalog(3));
  CorpusOptions opts;
  opts.repeat_user_tokens = true;
  const PoiId pre[] = {1}, suf[] = {3};
  EXPECT_EQ(decode(encode_prediction_query("ua", "c", pre, suf, v, opts), v),
            (std::vector<std::string>{"[CLS]", "CITY:c", "USER:ua", "THEME:t0", "POI:1", "[MASK]", "USER:ua",
                                      "THEME:t0", "POI:3", "[SEP]"}));
}

TEST(Query, NineTokenTemplate) {
  const auto v = build_vocabulary(two_users(), make_catalog(3));
  const PoiId pre[] = {1}, suf[] = {3};
  const auto q = encode_prediction_query("ua", "c", pre, suf, v);
  EXPECT_EQ(q.size(), 9u);
  EXPECT_EQ(std::count(q.begin(), q.end(), kMaskId), 1);
  EXPECT_EQ(q.front(), kClsId);
  EXPECT_EQ(q.back(), kSepId);
}

TEST(Query, UnknownUserBecomesUnk) {
  const auto v = build_vocabulary(two_users(), make_catalog(3));
  const PoiId pre[] = {1}, suf[] = {3};
  const auto q = encode_prediction_query("stranger", "c", pre, suf, v);
  EXPECT_EQ(q[1], kUnkId);
  EXPECT_EQ(q.size(), 9u);
}

TEST(Query, EmptySidesRejected) {
  const auto v = build_vocabulary(two_users(), make_catalog(3));
  const PoiId one[] = {1};
  EXPECT_THROW(encode_prediction_query("ua", "c", {}, one, v), InputError);
  EXPECT_THROW(encode_prediction_query("ua", "c", one, {}, v), InputError);
}

// Property: count law, label reachability and decode/encode identity on random trajectories.
TEST(SamplesProperty, CountLawLabelsAndRoundTrip) {
  std::mt19937_64 rng(5);
  const auto cat = make_catalog(12, 3);
  for (int trial = 0; trial < 60; ++trial) {
    std::uniform_int_distribution<std::size_t> len(3, 12);
    const auto n = len(rng);
    std::vector<PoiId> pois(12);
    std::iota(pois.begin(), pois.end(), 1);
    std::shuffle(pois.begin(), pois.end(), rng);
    pois.resize(n);
    const auto trajs = std::vector{make_trajectory("x#0", "u" + std::to_string(trial % 3), pois)};
    const auto v = build_vocabulary(trajs, cat);
    CorpusOptions opts;
    opts.max_len = trial % 2 ? 128 : 11;
    const auto samples = generate_training_samples(trajs[0], v, opts);
    EXPECT_EQ(samples.size(), n * (n - 1) / 2);
    for (const auto& s : samples) {
      EXPECT_TRUE(v.is_poi(s.label_id));
      EXPECT_EQ(s.input_ids[s.mask_position], kMaskId);
      EXPECT_LE(s.input_ids.size(), opts.max_len);
      const auto text = decode(s.input_ids, v);
      EXPECT_EQ(encode(text, v), s.input_ids);
    }
    std::stringstream ss;
    write_samples(ss, samples);
    const auto back = read_samples(ss);
    ASSERT_EQ(back.size(), samples.size());
    for (std::size_t i = 0; i < back.size(); ++i) {
      EXPECT_EQ(back[i].input_ids, samples[i].input_ids);
      EXPECT_EQ(back[i].mask_position, samples[i].mask_position);
      EXPECT_EQ(back[i].label_id, samples[i].label_id);
    }
  }
}

TEST(SampleText, MisplacedMaskRejected) {
  std::istringstream in("0 5 2 1\t1\t5\n");
  EXPECT_THROW(read_samples(in), InputError);
}
