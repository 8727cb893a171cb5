#ifndef TOURMLM_RECOMMENDER_HPP
#define TOURMLM_RECOMMENDER_HPP

// Time-budgeted itinerary prediction by iterative masked insertion.
//
// Starting from [start, end], every round builds one masked query per gap of
// the current itinerary, gates each unvisited POI's masked probability by its
// comment coherence and expected photo count, and inserts the single best
// (gap, POI) pair. The loop stops before the first insertion that would push
// the estimated time over budget, or when no candidates remain.

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "tourmlm/corpus.hpp"
#include "tourmlm/error.hpp"
#include "tourmlm/model.hpp"
#include "tourmlm/sentiment.hpp"
#include "tourmlm/stats.hpp"
#include "tourmlm/types.hpp"

namespace tourmlm {

inline constexpr double kEarthRadiusKm = 6371.0;

struct ItineraryQuery {
  std::string city;
  PoiId start_poi = 0;
  PoiId end_poi = 0;
  Seconds time_budget = 0.0;
  bool include_travel_time = false;
  double travel_speed_kmh = 4.0;

  void validate() const {
    detail::require(start_poi != end_poi, "query start and end POI must differ");
    detail::require(time_budget > 0.0, "query time budget must be positive");
    detail::require(!include_travel_time || travel_speed_kmh > 0.0, "travel speed must be positive");
  }
};

struct GateConfig {
  double epsilon = 0.1;
  /// Exponent on the sentiment-distance divisor; 0 disables it.
  double beta = 1.0;
  /// Exponent on the (1 + photo count) divisor; 0 disables it.
  double gamma = 1.0;
  DistanceAggregate aggregate = DistanceAggregate::Mean;

  void validate() const {
    detail::require(epsilon > 0.0, "gate epsilon must be positive");
    detail::require(beta >= 0.0 && gamma >= 0.0, "gate exponents must be non-negative");
  }
};

struct InsertionRecord {
  std::size_t position = 0;
  PoiId poi = 0;
  double mlm_prob = 0.0;
  double sentiment_distance = 0.0;
  double photo_count = 0.0;
  double gate_score = 0.0;
};

struct PredictedItinerary {
  std::string method;
  std::vector<PoiId> pois;
  std::vector<InsertionRecord> steps;
  Seconds estimated_time = 0.0;
  std::string reference_user;
  /// The endpoints alone already exceed the budget.
  bool budget_warning = false;
};

/// p / ((epsilon + dist)^beta * (1 + photos)^gamma).
inline double next_pop_gate(double p_mlm, double sentiment_dist, double photo_count, const GateConfig& cfg = {}) {
  const double sentiment = cfg.beta == 0.0 ? 1.0 : std::pow(cfg.epsilon + sentiment_dist, cfg.beta);
  const double photos = cfg.gamma == 0.0 ? 1.0 : std::pow(1.0 + photo_count, cfg.gamma);
  return p_mlm / (sentiment * photos);
}

/// Great-circle walking time in seconds at `speed_kmh`.
inline Seconds travel_time(const PoiRecord& a, const PoiRecord& b, double speed_kmh) {
  detail::require(speed_kmh > 0.0, "travel speed must be positive");
  detail::require(std::isfinite(a.lat) && std::isfinite(a.lon) && std::isfinite(b.lat) && std::isfinite(b.lon),
                  "travel_time: missing coordinates");
  constexpr double deg = std::numbers::pi / 180.0;
  const double dlat = (b.lat - a.lat) * deg;
  const double dlon = (b.lon - a.lon) * deg;
  const double h = std::sin(dlat / 2) * std::sin(dlat / 2) +
                   std::cos(a.lat * deg) * std::cos(b.lat * deg) * std::sin(dlon / 2) * std::sin(dlon / 2);
  const double km = 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(h)));
  return km / speed_kmh * 3600.0;
}

inline Seconds travel_time(const PoiCatalog& catalog, PoiId a, PoiId b, double speed_kmh) {
  const auto* pa = catalog.find(a);
  const auto* pb = catalog.find(b);
  detail::require(pa && pb, "travel_time: POI without coordinates");
  return travel_time(*pa, *pb, speed_kmh);
}

/// Sum of expected visit durations, plus leg travel times when enabled.
inline Seconds estimate_itinerary_time(std::span<const PoiId> seq, const PoiEstimates& estimates,
                                       const PoiCatalog& catalog, const ItineraryQuery& query) {
  Seconds total = 0.0;
  for (auto p : seq) total += estimates.duration(p);
  if (query.include_travel_time) {
    for (std::size_t i = 1; i < seq.size(); ++i) {
      total += travel_time(catalog, seq[i - 1], seq[i], query.travel_speed_kmh);
    }
  }
  return total;
}

/// Per-POI gate inputs: coherence distance and point-estimated photo count.
struct GateInputs {
  std::map<PoiId, double> sentiment_distance;
  std::map<PoiId, double> photo_count;

  GateInputs() = default;
  GateInputs(std::span<const PoiId> pois, const EmbeddingStore& store, const PoiEstimates& estimates,
             DistanceAggregate agg = DistanceAggregate::Mean) {
    for (auto p : pois) {
      sentiment_distance[p] = poi_sentiment_distance(store, p, agg);
      photo_count[p] = estimates.photo_count(p);
    }
  }
};

/// Joint argmax over (position, candidate). `per_position[j]` is the masked
/// distribution for inserting before index j + 1. Ties go to the lower POI
/// id, then the earlier position.
inline std::optional<InsertionRecord> best_insertion(std::span<const PoiDistribution> per_position,
                                                     std::span<const PoiId> candidates, const Vocabulary& vocab,
                                                     const GateInputs& inputs, const GateConfig& gate) {
  std::optional<InsertionRecord> best;
  for (std::size_t j = 0; j < per_position.size(); ++j) {
    for (auto c : candidates) {
      InsertionRecord r;
      r.position = j + 1;
      r.poi = c;
      r.mlm_prob = per_position[j].of_token(vocab.poi_token(c));
      r.sentiment_distance = inputs.sentiment_distance.at(c);
      r.photo_count = inputs.photo_count.at(c);
      r.gate_score = next_pop_gate(r.mlm_prob, r.sentiment_distance, r.photo_count, gate);
      const bool better = !best || r.gate_score > best->gate_score ||
                          (r.gate_score == best->gate_score &&
                           (r.poi < best->poi || (r.poi == best->poi && r.position < best->position)));
      if (better) best = r;
    }
  }
  return best;
}

struct ReferenceUser {
  std::string user;
  double score = 0.0;
};

/// Scores `[CLS] USER CITY THEME(start) POI(start) [MASK] THEME(end) POI(end) [SEP]`
/// for every training user by its highest POI probability and returns the
/// argmax; ties go to the lexicographically smaller user id.
template <class T>
ReferenceUser select_reference_user(const Transformer<T>& model, const Vocabulary& vocab,
                                    const ItineraryQuery& query) {
  const auto users = vocab.users();
  // Endpoints unseen in training encode as [UNK]; the query stays valid.
  detail::require(!users.empty(), "no training users to choose a reference user from");
  const auto opts = model.config().corpus_options();
  const PoiId start[] = {query.start_poi};
  const PoiId end[] = {query.end_poi};
  ReferenceUser best{users.front(), -1.0};
  for (const auto& u : users) {
    const auto q = encode_prediction_query(u, query.city, start, end, vocab, opts);
    const auto dist = mlm_predict(model, q);
    const double score = *std::max_element(dist.probs.begin(), dist.probs.end());
    if (score > best.score) best = {u, score};
  }
  return best;
}

/// Bundles the immutable inputs of prediction. Safe to share across threads.
class ItineraryRecommender {
 public:
  ItineraryRecommender(const Model& model, const Vocabulary& vocab, const PoiEstimates& estimates,
                       const EmbeddingStore& store, const PoiCatalog& catalog, GateConfig gate = {})
      : model_(&model), vocab_(&vocab), estimates_(&estimates), catalog_(&catalog), gate_(gate) {
    gate_.validate();
    detail::require(model.vocab_size() == vocab.size(), "model and vocabulary disagree in size");
    for (auto p : vocab.poi_ids()) {
      detail::require(estimates.contains(p), "no duration estimate for vocabulary POI " + std::to_string(p));
    }
    inputs_ = GateInputs(vocab.poi_ids(), store, estimates, gate_.aggregate);
  }

  const GateConfig& gate() const { return gate_; }
  const GateInputs& gate_inputs() const { return inputs_; }

  ReferenceUser reference_user(const ItineraryQuery& query) const {
    return select_reference_user(*model_, *vocab_, query);
  }

  /// Masked distributions for every gap of `seq`, from the reference user's view.
  std::vector<PoiDistribution> gap_distributions(std::span<const PoiId> seq, TokenId user,
                                                 const std::string& city) const {
    std::vector<PoiDistribution> out;
    out.reserve(seq.size() - 1);
    const auto opts = model_->config().corpus_options();
    for (std::size_t j = 1; j < seq.size(); ++j) {
      const auto q = encode_prediction_query(user, city, seq.subspan(0, j), seq.subspan(j), *vocab_, opts);
      out.push_back(mlm_predict(*model_, q));
    }
    return out;
  }

  PredictedItinerary predict(const ItineraryQuery& query) const {
    query.validate();
    PredictedItinerary it;
    it.method = "gated-mlm";
    it.pois = {query.start_poi, query.end_poi};
    it.estimated_time = estimate_itinerary_time(it.pois, *estimates_, *catalog_, query);
    const auto ref = reference_user(query);
    it.reference_user = ref.user;
    if (it.estimated_time > query.time_budget) {
      it.budget_warning = true;
      return it;
    }
    const TokenId user = vocab_->user_token(ref.user);

    while (true) {
      std::vector<PoiId> candidates;
      for (auto p : vocab_->poi_ids()) {
        if (std::find(it.pois.begin(), it.pois.end(), p) == it.pois.end()) candidates.push_back(p);
      }
      if (candidates.empty()) break;
      const auto dists = gap_distributions(it.pois, user, query.city);
      const auto best = best_insertion(dists, candidates, *vocab_, inputs_, gate_);
      if (!best) break;
      auto next = it.pois;
      next.insert(next.begin() + static_cast<std::ptrdiff_t>(best->position), best->poi);
      const Seconds t = estimate_itinerary_time(next, *estimates_, *catalog_, query);
      if (t > query.time_budget) break;
      it.pois = std::move(next);
      it.estimated_time = t;
      it.steps.push_back(*best);
    }
    return it;
  }

 private:
  const Model* model_;
  const Vocabulary* vocab_;
  const PoiEstimates* estimates_;
  const PoiCatalog* catalog_;
  GateConfig gate_;
  GateInputs inputs_;
};

inline PredictedItinerary predict_itinerary(const Model& model, const Vocabulary& vocab,
                                            const PoiEstimates& estimates, const EmbeddingStore& store,
                                            const PoiCatalog& catalog, const ItineraryQuery& query,
                                            const GateConfig& gate = {}) {
  return ItineraryRecommender(model, vocab, estimates, store, catalog, gate).predict(query);
}

namespace detail {

/// Greedy extension shared by the baselines: `next(seq)` proposes the next
/// POI to insert before the end POI, or nothing.
template <class Next>
PredictedItinerary grow_before_end(std::string method, const ItineraryQuery& query, const PoiEstimates& estimates,
                                   const PoiCatalog& catalog, Next&& next) {
  query.validate();
  PredictedItinerary it;
  it.method = std::move(method);
  it.pois = {query.start_poi, query.end_poi};
  it.estimated_time = estimate_itinerary_time(it.pois, estimates, catalog, query);
  if (it.estimated_time > query.time_budget) {
    it.budget_warning = true;
    return it;
  }
  while (true) {
    const std::optional<PoiId> cand = next(it.pois);
    if (!cand) break;
    auto seq = it.pois;
    seq.insert(seq.end() - 1, *cand);
    const Seconds t = estimate_itinerary_time(seq, estimates, catalog, query);
    if (t > query.time_budget) break;
    InsertionRecord rec;
    rec.position = seq.size() - 2;
    rec.poi = *cand;
    it.steps.push_back(rec);
    it.pois = std::move(seq);
    it.estimated_time = t;
  }
  return it;
}

}  // namespace detail

/// Inserts the most-visited unvisited POIs (ties: lower id) before the end.
class PopularityBaseline {
 public:
  PopularityBaseline(std::span<const Trajectory> train, const PoiCatalog& catalog) {
    std::map<PoiId, std::size_t> counts;
    for (auto id : catalog.ids()) counts[id] = 0;
    for (const auto& t : train) {
      for (const auto& v : t.visits) ++counts[v.poi_id];
    }
    for (const auto& [id, n] : counts) ranking_.emplace_back(id, n);
    std::stable_sort(ranking_.begin(), ranking_.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
  }

  const std::vector<std::pair<PoiId, std::size_t>>& ranking() const { return ranking_; }

  PredictedItinerary predict(const ItineraryQuery& query, const PoiEstimates& estimates,
                             const PoiCatalog& catalog) const {
    return detail::grow_before_end("popularity", query, estimates, catalog,
                                   [&](const std::vector<PoiId>& seq) -> std::optional<PoiId> {
                                     for (const auto& [id, _] : ranking_) {
                                       if (std::find(seq.begin(), seq.end(), id) == seq.end()) return id;
                                     }
                                     return std::nullopt;
                                   });
  }

 private:
  std::vector<std::pair<PoiId, std::size_t>> ranking_;
};

/// First-order transition model with add-one smoothing over the catalog.
class MarkovBaseline {
 public:
  MarkovBaseline(std::span<const Trajectory> train, const PoiCatalog& catalog) : states_(catalog.ids()) {
    for (const auto& t : train) {
      for (std::size_t i = 1; i < t.visits.size(); ++i) {
        ++counts_[t.visits[i - 1].poi_id][t.visits[i].poi_id];
        ++totals_[t.visits[i - 1].poi_id];
      }
    }
  }

  /// P(to | from) = (count + 1) / (total + |states|).
  double probability(PoiId from, PoiId to) const {
    double c = 0.0, total = 0.0;
    if (auto it = counts_.find(from); it != counts_.end()) {
      if (auto jt = it->second.find(to); jt != it->second.end()) c = static_cast<double>(jt->second);
    }
    if (auto it = totals_.find(from); it != totals_.end()) total = static_cast<double>(it->second);
    return (c + 1.0) / (total + static_cast<double>(states_.size()));
  }

  PredictedItinerary predict(const ItineraryQuery& query, const PoiEstimates& estimates,
                             const PoiCatalog& catalog) const {
    return detail::grow_before_end(
        "markov", query, estimates, catalog, [&](const std::vector<PoiId>& seq) -> std::optional<PoiId> {
          const PoiId from = seq[seq.size() - 2];
          std::optional<PoiId> best;
          double best_p = -1.0;
          for (auto to : states_) {
            if (std::find(seq.begin(), seq.end(), to) != seq.end()) continue;
            const double p = probability(from, to);
            if (p > best_p) {
              best_p = p;
              best = to;
            }
          }
          return best;
        });
  }

 private:
  std::vector<PoiId> states_;
  std::map<PoiId, std::map<PoiId, std::size_t>> counts_;
  std::map<PoiId, std::size_t> totals_;
};

inline PredictedItinerary popularity_baseline(std::span<const Trajectory> train, const PoiEstimates& estimates,
                                              const PoiCatalog& catalog, const ItineraryQuery& query) {
  return PopularityBaseline(train, catalog).predict(query, estimates, catalog);
}

inline PredictedItinerary markov_baseline(std::span<const Trajectory> train, const PoiEstimates& estimates,
                                          const PoiCatalog& catalog, const ItineraryQuery& query) {
  return MarkovBaseline(train, catalog).predict(query, estimates, catalog);
}

inline nlohmann::json to_json(const ItineraryQuery& q) {
  return {{"city", q.city},
          {"start", q.start_poi},
          {"end", q.end_poi},
          {"time_budget_s", q.time_budget},
          {"include_travel_time", q.include_travel_time},
          {"travel_speed_kmh", q.travel_speed_kmh}};
}

inline nlohmann::json to_json(const PredictedItinerary& it, const ItineraryQuery& q) {
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& s : it.steps) {
    steps.push_back({{"position", s.position},
                     {"poi", s.poi},
                     {"mlm_prob", s.mlm_prob},
                     {"sentiment_distance", s.sentiment_distance},
                     {"photo_count", s.photo_count},
                     {"gate_score", s.gate_score}});
  }
  return {{"method", it.method},
          {"query", to_json(q)},
          {"reference_user", it.reference_user},
          {"pois", it.pois},
          {"steps", std::move(steps)},
          {"estimated_time_s", it.estimated_time},
          {"budget_warning", it.budget_warning}};
}

}  // namespace tourmlm

#endif
