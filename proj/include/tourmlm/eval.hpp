#ifndef TOURMLM_EVAL_HPP
#define TOURMLM_EVAL_HPP

// Itinerary scoring, the held-out evaluation loop and the epoch sweep.
//
// Metric naming follows the published definitions, which swap the usual
// denominators:
//   recall    = |S_h ∩ S_p| / |S_p|
//   precision = |S_h ∩ S_p| / |S_h|
// Intersections are taken over distinct POI ids of the full sequences.

#include <algorithm>
#include <chrono>
#include <functional>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tourmlm/corpus.hpp"
#include "tourmlm/error.hpp"
#include "tourmlm/model.hpp"
#include "tourmlm/recommender.hpp"
#include "tourmlm/sentiment.hpp"
#include "tourmlm/stats.hpp"
#include "tourmlm/types.hpp"

namespace tourmlm {

struct EvalScores {
  double recall = 0.0;
  double precision = 0.0;
  double f1 = 0.0;
};

inline EvalScores score(std::span<const PoiId> actual, std::span<const PoiId> predicted) {
  detail::require(!actual.empty(), "score: actual sequence is empty");
  detail::require(!predicted.empty(), "score: predicted sequence is empty");
  const std::set<PoiId> h(actual.begin(), actual.end());
  const std::set<PoiId> p(predicted.begin(), predicted.end());
  std::size_t common = 0;
  for (auto id : h) common += p.count(id);
  EvalScores s;
  s.recall = static_cast<double>(common) / static_cast<double>(p.size());
  s.precision = static_cast<double>(common) / static_cast<double>(h.size());
  s.f1 = (s.recall + s.precision) == 0.0 ? 0.0 : 2.0 * s.recall * s.precision / (s.recall + s.precision);
  return s;
}

inline EvalScores score(const std::vector<PoiId>& actual, const std::vector<PoiId>& predicted) {
  return score(std::span<const PoiId>(actual), std::span<const PoiId>(predicted));
}

/// Endpoints and first-to-last photo span of a held-out trajectory.
inline ItineraryQuery trajectory_to_query(const Trajectory& t) {
  detail::require(!t.visits.empty(), "trajectory " + t.seq_id + " has no visits");
  ItineraryQuery q;
  q.city = t.city;
  q.start_poi = t.visits.front().poi_id;
  q.end_poi = t.visits.back().poi_id;
  q.time_budget = static_cast<Seconds>(t.last_time() - t.first_time());
  detail::require(q.start_poi != q.end_poi, "trajectory " + t.seq_id + " starts and ends at the same POI");
  return q;
}

struct TrajectoryResult {
  std::string seq_id;
  EvalScores scores;
  std::vector<PoiId> actual;
  std::vector<PoiId> predicted;
};

struct SkippedTrajectory {
  std::string seq_id;
  std::string reason;
};

struct ExperimentReport {
  std::string method;
  std::vector<TrajectoryResult> results;
  std::vector<SkippedTrajectory> skipped;
  EvalScores mean;
  std::size_t chosen_epoch = 0;
  nlohmann::json config = nlohmann::json::object();
  double wall_clock_s = 0.0;
};

using Predictor = std::function<PredictedItinerary(const ItineraryQuery&)>;

/// Runs `predict` on every test trajectory and averages the scores. Results
/// are ordered by seq_id so the means do not depend on input order.
inline ExperimentReport evaluate_predictor(std::span<const Trajectory> testset, const Predictor& predict,
                                           std::string method) {
  const auto started = std::chrono::steady_clock::now();
  std::vector<const Trajectory*> order;
  for (const auto& t : testset) order.push_back(&t);
  std::sort(order.begin(), order.end(), [](auto* a, auto* b) { return a->seq_id < b->seq_id; });

  ExperimentReport report;
  report.method = std::move(method);
  for (const auto* t : order) {
    ItineraryQuery q;
    try {
      q = trajectory_to_query(*t);
    } catch (const InputError& e) {
      report.skipped.push_back({t->seq_id, e.what()});
      continue;
    }
    const auto it = predict(q);
    TrajectoryResult r;
    r.seq_id = t->seq_id;
    r.actual = t->poi_sequence();
    r.predicted = it.pois;
    r.scores = score(r.actual, r.predicted);
    report.results.push_back(std::move(r));
  }
  if (!report.results.empty()) {
    const auto n = static_cast<double>(report.results.size());
    for (const auto& r : report.results) {
      report.mean.recall += r.scores.recall;
      report.mean.precision += r.scores.precision;
      report.mean.f1 += r.scores.f1;
    }
    report.mean.recall /= n;
    report.mean.precision /= n;
    report.mean.f1 /= n;
  }
  report.wall_clock_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return report;
}

inline ExperimentReport evaluate(const Model& model, const Vocabulary& vocab, const PoiEstimates& estimates,
                                 const EmbeddingStore& store, const PoiCatalog& catalog,
                                 std::span<const Trajectory> testset, const GateConfig& gate = {}) {
  const ItineraryRecommender rec(model, vocab, estimates, store, catalog, gate);
  auto report = evaluate_predictor(testset, [&](const ItineraryQuery& q) { return rec.predict(q); }, "gated-mlm");
  report.config = {{"model", to_json(model.config())},
                   {"gate", {{"epsilon", gate.epsilon}, {"beta", gate.beta}, {"gamma", gate.gamma}}}};
  return report;
}

struct SweepResult {
  std::size_t best_epoch = 0;
  /// (epoch count, validation mean F1) in the order evaluated.
  std::vector<std::pair<std::size_t, double>> validation_f1;
  std::vector<double> loss_history;
  Model best_model;
};

/// Trains once, pausing at each listed epoch count to score the validation
/// set. Returns the epoch with the highest mean F1 (ties: fewer epochs).
inline SweepResult sweep_epochs(Model model, const Vocabulary& vocab, std::span<const TrainingSample> samples,
                                std::span<const Trajectory> validation, std::vector<std::size_t> epoch_list,
                                const PoiEstimates& estimates, const EmbeddingStore& store,
                                const PoiCatalog& catalog, const GateConfig& gate = {}) {
  detail::require(!epoch_list.empty(), "epoch list is empty");
  detail::require(!validation.empty(), "validation set is empty");
  std::sort(epoch_list.begin(), epoch_list.end());
  epoch_list.erase(std::unique(epoch_list.begin(), epoch_list.end()), epoch_list.end());
  detail::require(epoch_list.front() >= 1, "epoch counts must be at least 1");

  SweepResult out;
  Trainer<float> trainer(model);
  double best_f1 = -1.0;
  for (auto target : epoch_list) {
    while (trainer.epochs_completed() < target) out.loss_history.push_back(trainer.run_epoch(samples));
    const auto report = evaluate(model, vocab, estimates, store, catalog, validation, gate);
    out.validation_f1.emplace_back(target, report.mean.f1);
    if (report.mean.f1 > best_f1) {
      best_f1 = report.mean.f1;
      out.best_epoch = target;
      out.best_model = model;
    }
  }
  return out;
}

inline nlohmann::json to_json(const EvalScores& s) {
  return {{"recall", s.recall}, {"precision", s.precision}, {"f1", s.f1}};
}

inline nlohmann::json to_json(const ExperimentReport& r) {
  nlohmann::json per = nlohmann::json::array();
  for (const auto& t : r.results) {
    per.push_back({{"seq_id", t.seq_id}, {"actual", t.actual}, {"predicted", t.predicted}, {"scores", to_json(t.scores)}});
  }
  nlohmann::json skipped = nlohmann::json::array();
  for (const auto& s : r.skipped) skipped.push_back({{"seq_id", s.seq_id}, {"reason", s.reason}});
  return {{"method", r.method},
          {"n", r.results.size()},
          {"mean", to_json(r.mean)},
          {"mean_f1", r.mean.f1},
          {"chosen_epoch", r.chosen_epoch},
          {"skipped", std::move(skipped)},
          {"per_trajectory", std::move(per)},
          {"config", r.config},
          {"wall_clock_s", r.wall_clock_s}};
}

inline std::string summary_header() { return "method;n;skipped;recall;precision;f1"; }

inline std::string summary_row(const ExperimentReport& r) {
  std::ostringstream os;
  os << std::setprecision(6) << std::fixed;
  os << r.method << ';' << r.results.size() << ';' << r.skipped.size() << ';' << r.mean.recall << ';'
     << r.mean.precision << ';' << r.mean.f1;
  return os.str();
}

}  // namespace tourmlm

#endif
