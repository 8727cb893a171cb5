#ifndef TOURMLM_CLI_HPP
#define TOURMLM_CLI_HPP

// The `tourmlm` command line. run_cli() is the whole program; main() only
// forwards to it so tests can drive every subcommand in-process.
//
// Exit codes: 0 success, 2 usage or input error, 3 internal invariant
// violation. JSON goes to `out`, progress lines to `err`.
//
// Settings resolve in this order (later wins): built-in default, SBT_SEED
// (seed only), `--config` file of `key = value` lines, explicit flag.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tourmlm/checkpoint.hpp"
#include "tourmlm/corpus.hpp"
#include "tourmlm/error.hpp"
#include "tourmlm/eval.hpp"
#include "tourmlm/ingest.hpp"
#include "tourmlm/model.hpp"
#include "tourmlm/recommender.hpp"
#include "tourmlm/sentiment.hpp"
#include "tourmlm/stats.hpp"
#include "tourmlm/synth.hpp"
#include "tourmlm/text.hpp"

namespace tourmlm {

namespace cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitInternal = 3;

/// Keys accepted in a config file.
inline const std::set<std::string>& config_keys() {
  static const std::set<std::string> keys = {
      "d_model",   "n_layers",    "n_heads",       "ffn_dim",         "max_len",    "dropout",
      "learning_rate", "batch_size", "seed",       "repeat_user_tokens", "epochs",  "gap_hours",
      "gate_beta", "gate_gamma",  "gate_epsilon",  "ci_level",        "resamples",  "use_upper_bound",
      "travel_time", "travel_speed_kmh", "city"};
  return keys;
}

inline std::map<std::string, std::string> read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config file " + path.string());
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t row = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return std::string();
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++row;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = path.string() + ":" + std::to_string(row);
    if (eq == std::string::npos) throw InputError(where + ": expected 'key = value'");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (!config_keys().contains(key)) throw InputError(where + ": unknown config key '" + key + "'");
    if (value.empty()) throw InputError(where + ": empty value for '" + key + "'");
    kv[key] = value;
  }
  return kv;
}

template <class T>
T parse_value(const std::string& key, const std::string& text) {
  T v{};
  if constexpr (std::is_same_v<T, bool>) {
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    throw InputError("config value for '" + key + "' is not a boolean: " + text);
  } else if constexpr (std::is_same_v<T, std::string>) {
    return text;
  } else {
    std::istringstream is(text);
    is >> v;
    if (!is || !is.eof()) throw InputError("config value for '" + key + "' is not a number: " + text);
    if constexpr (std::is_unsigned_v<T>) {
      if (text.starts_with('-')) throw InputError("config value for '" + key + "' must be non-negative");
    }
    return v;
  }
}

/// One resolved setting: flag beats config beats fallback.
class Settings {
 public:
  std::map<std::string, std::string> file;
  std::string source;

  template <class T>
  T get(const std::string& key, const std::optional<T>& flag, T fallback) const {
    if (flag) return *flag;
    if (auto it = file.find(key); it != file.end()) {
      try {
        return parse_value<T>(key, it->second);
      } catch (const InputError& e) {
        throw InputError(source + ": " + e.what());
      }
    }
    return fallback;
  }
};

inline std::uint64_t env_seed() {
  const char* s = std::getenv("SBT_SEED");
  if (!s || !*s) return 42;
  return parse_value<std::uint64_t>("SBT_SEED", s);
}

/// Flags shared by every subcommand that trains or scores.
struct Common {
  std::optional<std::string> config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> city;
  Settings settings;

  void load() {
    if (!config_path) return;
    settings.file = read_config_file(*config_path);
    settings.source = *config_path;
  }
  std::uint64_t resolved_seed() const { return settings.get<std::uint64_t>("seed", seed, env_seed()); }
};

struct ModelFlags {
  std::optional<std::size_t> d_model, n_layers, n_heads, ffn_dim, max_len, batch_size;
  std::optional<double> dropout, learning_rate;
  std::optional<bool> repeat_user_tokens;

  void attach(CLI::App* app) {
    app->add_option("--d-model", d_model, "embedding width");
    app->add_option("--layers", n_layers, "encoder layers");
    app->add_option("--heads", n_heads, "attention heads");
    app->add_option("--ffn-dim", ffn_dim, "feed-forward width");
    app->add_option("--max-len", max_len, "maximum sequence length");
    app->add_option("--batch-size", batch_size, "minibatch size");
    app->add_option("--dropout", dropout, "dropout rate");
    app->add_option("--lr", learning_rate, "Adam learning rate");
    app->add_flag("--repeat-user-tokens{true}", repeat_user_tokens, "USER token before every THEME/POI pair");
  }

  ModelConfig resolve(const Common& c) const {
    const ModelConfig d;
    ModelConfig m;
    const auto& s = c.settings;
    m.d_model = s.get("d_model", d_model, d.d_model);
    m.n_layers = s.get("n_layers", n_layers, d.n_layers);
    m.n_heads = s.get("n_heads", n_heads, d.n_heads);
    m.ffn_dim = s.get("ffn_dim", ffn_dim, d.ffn_dim);
    m.max_len = s.get("max_len", max_len, d.max_len);
    m.batch_size = s.get("batch_size", batch_size, d.batch_size);
    m.dropout = s.get("dropout", dropout, d.dropout);
    m.learning_rate = s.get("learning_rate", learning_rate, d.learning_rate);
    m.repeat_user_tokens = s.get("repeat_user_tokens", repeat_user_tokens, d.repeat_user_tokens);
    m.seed = c.resolved_seed();
    m.validate();
    return m;
  }
};

struct GateFlags {
  std::optional<double> beta, gamma, epsilon;
  std::optional<bool> travel;
  std::optional<double> speed;
  std::optional<double> ci_level;
  std::optional<std::size_t> resamples;
  std::optional<bool> upper;

  void attach(CLI::App* app) {
    app->add_option("--gate-beta", beta, "sentiment-distance exponent");
    app->add_option("--gate-gamma", gamma, "photo-count exponent");
    app->add_option("--gate-epsilon", epsilon, "sentiment-distance offset");
    app->add_flag("--travel-time{true}", travel, "count walking time against the budget");
    app->add_option("--speed-kmh", speed, "walking speed for --travel-time");
    app->add_option("--ci-level", ci_level, "bootstrap interval level");
    app->add_option("--resamples", resamples, "bootstrap resamples");
    app->add_flag("--upper-bound{true}", upper, "budget with the interval's upper end instead of the mean");
  }

  GateConfig gate(const Common& c) const {
    GateConfig g;
    g.beta = c.settings.get("gate_beta", beta, g.beta);
    g.gamma = c.settings.get("gate_gamma", gamma, g.gamma);
    g.epsilon = c.settings.get("gate_epsilon", epsilon, g.epsilon);
    g.validate();
    return g;
  }

  EstimateOptions estimates(const Common& c) const {
    EstimateOptions e;
    e.level = c.settings.get("ci_level", ci_level, e.level);
    e.resamples = c.settings.get("resamples", resamples, e.resamples);
    e.use_upper_bound = c.settings.get("use_upper_bound", upper, e.use_upper_bound);
    e.seed = c.resolved_seed();
    detail::require(e.level > 0.0 && e.level < 1.0, "ci level must lie in (0,1)");
    detail::require(e.resamples >= 1, "resamples must be at least 1");
    return e;
  }

  void apply(const Common& c, ItineraryQuery& q) const {
    q.include_travel_time = c.settings.get("travel_time", travel, false);
    q.travel_speed_kmh = c.settings.get("travel_speed_kmh", speed, q.travel_speed_kmh);
  }
};

inline void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config_path, "file of 'key = value' settings");
  app->add_option("--seed", c.seed, "random seed (default: SBT_SEED or 42)");
}

inline std::vector<std::size_t> parse_epoch_list(const std::string& text) {
  std::vector<std::size_t> out;
  for (const auto& field : detail::split_fields(text, ',')) {
    out.push_back(parse_value<std::size_t>("--epoch-list", field));
  }
  detail::require(!out.empty(), "--epoch-list is empty");
  for (auto e : out) detail::require(e >= 1, "--epoch-list entries must be at least 1");
  return out;
}

inline std::string default_city(const Vocabulary& vocab, const Common& c) {
  const auto city = c.settings.get<std::string>("city", c.city, "");
  if (!city.empty()) return city;
  const auto cities = vocab.cities();
  detail::require(cities.size() == 1, "vocabulary holds " + std::to_string(cities.size()) +
                                          " cities; pass --city");
  return cities.front();
}

/// Scoring inputs shared by sweep, predict and evaluate.
struct Scene {
  PoiCatalog catalog;
  std::vector<Trajectory> train;
  PoiEstimates estimates;
  EmbeddingStore store;
};

inline Scene load_scene(const std::string& pois, const std::string& train, const std::string& embeddings,
                        const EstimateOptions& est, const std::string& city) {
  Scene s;
  s.catalog = parse_pois(std::filesystem::path(pois), city);
  s.train = read_trajectories(std::filesystem::path(train));
  s.estimates = PoiEstimates(s.train, s.catalog, est);
  s.store = load_embeddings(embeddings);
  return s;
}

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"POI itinerary recommendation with a masked-language-model transformer", "tourmlm"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);

  Common common;
  ModelFlags model_flags;
  GateFlags gate_flags;

  // ingest
  std::string checkins_path, pois_path, out_dir;
  std::optional<double> gap_hours;
  auto* ingest = app.add_subcommand("ingest", "check-ins to trajectories, split 70/20/10 by time");
  ingest->add_option("--checkins", checkins_path, "photoID;userID;dateTaken;poiID file")->required();
  ingest->add_option("--pois", pois_path, "poiID;poiName;theme;lat;lon file")->required();
  ingest->add_option("--gap-hours", gap_hours, "gap that starts a new trajectory (default 8)");
  ingest->add_option("--out", out_dir, "output directory")->required();
  ingest->add_option("--city", common.city, "city name recorded on trajectories");
  add_common(ingest, common);

  // train
  std::string trajectories_path, checkpoint_out;
  std::optional<std::size_t> epochs;
  auto* train_cmd = app.add_subcommand("train", "train the masked-language model");
  train_cmd->add_option("--trajectories", trajectories_path, "training trajectories (JSON lines)")->required();
  train_cmd->add_option("--pois", pois_path, "POI file")->required();
  train_cmd->add_option("--epochs", epochs, "training epochs (default 10)");
  train_cmd->add_option("--checkpoint-out", checkpoint_out, "checkpoint to write")->required();
  train_cmd->add_option("--city", common.city, "city name for the POI catalog");
  add_common(train_cmd, common);
  model_flags.attach(train_cmd);

  // sweep
  std::string val_path, epoch_list, embeddings_path;
  auto* sweep = app.add_subcommand("sweep", "pick the epoch count by validation F1");
  sweep->add_option("--trajectories", trajectories_path, "training trajectories")->required();
  sweep->add_option("--val", val_path, "validation trajectories")->required();
  sweep->add_option("--epoch-list", epoch_list, "comma-separated epoch counts, e.g. 1,5,10")->required();
  sweep->add_option("--pois", pois_path, "POI file")->required();
  sweep->add_option("--embeddings", embeddings_path, "comment embeddings (PEMB or JSON)")->required();
  sweep->add_option("--checkpoint-out", checkpoint_out, "write the best model here");
  sweep->add_option("--city", common.city, "city name for the POI catalog");
  add_common(sweep, common);
  model_flags.attach(sweep);
  gate_flags.attach(sweep);

  // predict
  std::string checkpoint_path;
  PoiId start = 0, end = 0;
  double budget_min = 0.0;
  auto* predict = app.add_subcommand("predict", "recommend one itinerary");
  predict->add_option("--checkpoint", checkpoint_path, "trained checkpoint")->required();
  predict->add_option("--start", start, "start POI id")->required();
  predict->add_option("--end", end, "end POI id")->required();
  predict->add_option("--budget-min", budget_min, "time budget in minutes")->required();
  predict->add_option("--train", trajectories_path, "training trajectories for duration estimates")->required();
  predict->add_option("--pois", pois_path, "POI file")->required();
  predict->add_option("--embeddings", embeddings_path, "comment embeddings")->required();
  predict->add_option("--city", common.city, "query city (default: the checkpoint's only city)");
  add_common(predict, common);
  gate_flags.attach(predict);

  // evaluate
  std::string test_path;
  bool baselines = false;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "score a checkpoint on held-out trajectories");
  evaluate_cmd->add_option("--checkpoint", checkpoint_path, "trained checkpoint")->required();
  evaluate_cmd->add_option("--test", test_path, "test trajectories")->required();
  evaluate_cmd->add_flag("--baselines", baselines, "also score popularity and Markov baselines");
  evaluate_cmd->add_option("--train", trajectories_path, "training trajectories")->required();
  evaluate_cmd->add_option("--pois", pois_path, "POI file")->required();
  evaluate_cmd->add_option("--embeddings", embeddings_path, "comment embeddings")->required();
  evaluate_cmd->add_option("--city", common.city, "city name for the POI catalog");
  add_common(evaluate_cmd, common);
  gate_flags.attach(evaluate_cmd);

  // synth
  SyntheticCityConfig synth_cfg;
  std::string sharpness = "high";
  auto* synth = app.add_subcommand("synth", "generate a synthetic city");
  synth->add_option("--out", out_dir, "output directory")->required();
  synth->add_option("--n-pois", synth_cfg.n_pois, "POIs")->capture_default_str();
  synth->add_option("--n-users", synth_cfg.n_users, "users")->capture_default_str();
  synth->add_option("--n-trajectories", synth_cfg.n_trajectories, "trajectories")->capture_default_str();
  synth->add_option("--themes", synth_cfg.n_themes, "theme count")->capture_default_str();
  synth->add_option("--sharpness", sharpness, "preference sharpness: low|medium|high|<number>")
      ->capture_default_str();
  synth->add_option("--coherent-fraction", synth_cfg.coherent_fraction, "share of POIs with coherent comments")
      ->capture_default_str();
  synth->add_option("--embedding-dim", synth_cfg.embedding_dim, "comment embedding width")->capture_default_str();
  synth->add_option("--city", synth_cfg.city, "city name")->capture_default_str();
  add_common(synth, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  auto log = [&](const std::string& msg) { err << "tourmlm: " << msg << '\n'; };

  try {
    common.load();
    const std::string city = common.settings.get<std::string>("city", common.city, "city");

    if (*ingest) {
      ReconstructOptions ro;
      ro.gap_threshold = common.settings.get("gap_hours", gap_hours, 8.0) * 3600.0;
      detail::require(ro.gap_threshold > 0.0, "--gap-hours must be positive");
      const auto catalog = parse_pois(std::filesystem::path(pois_path), city);
      const auto checkins = parse_checkins(std::filesystem::path(checkins_path));
      ReconstructStats stats;
      const auto trajectories = reconstruct_trajectories(checkins, catalog, ro, &stats);
      const auto split = split_dataset(trajectories);
      const std::filesystem::path dir(out_dir);
      std::filesystem::create_directories(dir);
      write_trajectories(dir / "trajectories.jsonl", trajectories);
      write_trajectories(dir / "train.jsonl", split.train);
      write_trajectories(dir / "validation.jsonl", split.validation);
      write_trajectories(dir / "test.jsonl", split.test);
      log("wrote " + std::to_string(trajectories.size()) + " trajectories to " + dir.string());
      out << nlohmann::json{{"users", stats.users},
                            {"fragments", stats.fragments},
                            {"trajectories", stats.retained},
                            {"dropped", stats.dropped},
                            {"train", split.train.size()},
                            {"validation", split.validation.size()},
                            {"test", split.test.size()},
                            {"out", dir.string()}}
                 .dump(2)
          << '\n';
      return kExitOk;
    }

    if (*train_cmd) {
      const auto cfg = model_flags.resolve(common);
      const auto n_epochs = common.settings.get("epochs", epochs, std::size_t{10});
      detail::require(n_epochs >= 1, "--epochs must be at least 1");
      const auto catalog = parse_pois(std::filesystem::path(pois_path), city);
      const auto trajectories = read_trajectories(std::filesystem::path(trajectories_path));
      const auto vocab = build_vocabulary(trajectories, catalog);
      const auto samples = generate_corpus(trajectories, vocab, cfg.corpus_options());
      log(std::to_string(samples.size()) + " samples, vocabulary " + std::to_string(vocab.size()));
      auto model = init_model(cfg, vocab, cfg.seed);
      Trainer<float> trainer(model);
      std::vector<double> history;
      for (std::size_t e = 0; e < n_epochs; ++e) {
        history.push_back(trainer.run_epoch(samples));
        log("epoch " + std::to_string(e + 1) + " loss " + std::to_string(history.back()));
      }
      const TrainingMetadata meta{n_epochs, history.back(), cfg.seed, history};
      save_checkpoint(std::filesystem::path(checkpoint_out), model, vocab, meta);
      out << nlohmann::json{{"checkpoint", checkpoint_out},
                            {"epochs", n_epochs},
                            {"samples", samples.size()},
                            {"vocab_size", vocab.size()},
                            {"vocab_hash", detail::hex64(vocab.hash())},
                            {"loss_history", history},
                            {"final_loss", history.back()},
                            {"config", to_json(cfg)}}
                 .dump(2)
          << '\n';
      return kExitOk;
    }

    if (*sweep) {
      const auto cfg = model_flags.resolve(common);
      const auto list = parse_epoch_list(epoch_list);
      const auto gate = gate_flags.gate(common);
      const auto scene = load_scene(pois_path, trajectories_path, embeddings_path, gate_flags.estimates(common), city);
      const auto validation = read_trajectories(std::filesystem::path(val_path));
      const auto vocab = build_vocabulary(scene.train, scene.catalog);
      const auto samples = generate_corpus(scene.train, vocab, cfg.corpus_options());
      auto result = sweep_epochs(init_model(cfg, vocab, cfg.seed), vocab, samples, validation, list, scene.estimates,
                                 scene.store, scene.catalog, gate);
      for (const auto& [e, f1] : result.validation_f1) log("epochs " + std::to_string(e) + " validation F1 " + std::to_string(f1));
      nlohmann::json per = nlohmann::json::array();
      for (const auto& [e, f1] : result.validation_f1) per.push_back({{"epochs", e}, {"mean_f1", f1}});
      if (!checkpoint_out.empty()) {
        const std::vector<double> upto(result.loss_history.begin(),
                                       result.loss_history.begin() + static_cast<std::ptrdiff_t>(result.best_epoch));
        save_checkpoint(std::filesystem::path(checkpoint_out), result.best_model, vocab,
                        {result.best_epoch, upto.back(), cfg.seed, upto});
      }
      out << nlohmann::json{{"best_epoch", result.best_epoch},
                            {"validation", per},
                            {"loss_history", result.loss_history},
                            {"config", to_json(cfg)}}
                 .dump(2)
          << '\n';
      return kExitOk;
    }

    if (*predict) {
      detail::require(budget_min > 0.0, "--budget-min must be positive");
      const auto ck = load_checkpoint(checkpoint_path);
      const auto gate = gate_flags.gate(common);
      const auto scene = load_scene(pois_path, trajectories_path, embeddings_path, gate_flags.estimates(common),
                                    default_city(ck.vocab, common));
      ItineraryQuery q;
      q.city = scene.catalog.city();
      q.start_poi = start;
      q.end_poi = end;
      q.time_budget = budget_min * 60.0;
      gate_flags.apply(common, q);
      for (auto id : {start, end}) {
        detail::require(scene.catalog.contains(id), "POI " + std::to_string(id) + " is not in " + pois_path);
      }
      const ItineraryRecommender rec(ck.model, ck.vocab, scene.estimates, scene.store, scene.catalog, gate);
      const auto it = rec.predict(q);
      if (it.budget_warning) log("budget does not cover the two endpoints");
      out << to_json(it, q).dump(2) << '\n';
      return kExitOk;
    }

    if (*evaluate_cmd) {
      const auto ck = load_checkpoint(checkpoint_path);
      const auto gate = gate_flags.gate(common);
      const auto scene = load_scene(pois_path, trajectories_path, embeddings_path, gate_flags.estimates(common),
                                    default_city(ck.vocab, common));
      const auto test = read_trajectories(std::filesystem::path(test_path));
      ItineraryQuery shape;
      gate_flags.apply(common, shape);
      auto with_shape = [&](const ItineraryQuery& q0) {
        auto q = q0;
        q.include_travel_time = shape.include_travel_time;
        q.travel_speed_kmh = shape.travel_speed_kmh;
        return q;
      };
      const ItineraryRecommender rec(ck.model, ck.vocab, scene.estimates, scene.store, scene.catalog, gate);
      std::vector<ExperimentReport> reports;
      reports.push_back(evaluate_predictor(test, [&](const ItineraryQuery& q) { return rec.predict(with_shape(q)); },
                                           "gated-mlm"));
      reports.back().chosen_epoch = ck.training.epochs;
      reports.back().config = {{"model", to_json(ck.model.config())},
                               {"gate", {{"epsilon", gate.epsilon}, {"beta", gate.beta}, {"gamma", gate.gamma}}},
                               {"travel_time", shape.include_travel_time}};
      if (baselines) {
        const PopularityBaseline pop(scene.train, scene.catalog);
        const MarkovBaseline markov(scene.train, scene.catalog);
        reports.push_back(evaluate_predictor(
            test, [&](const ItineraryQuery& q) { return pop.predict(with_shape(q), scene.estimates, scene.catalog); },
            "popularity"));
        reports.push_back(evaluate_predictor(
            test,
            [&](const ItineraryQuery& q) { return markov.predict(with_shape(q), scene.estimates, scene.catalog); },
            "markov"));
      }
      log(summary_header());
      nlohmann::json rows = nlohmann::json::array();
      for (const auto& r : reports) {
        log(summary_row(r));
        rows.push_back(to_json(r));
      }
      out << nlohmann::json{{"mean_f1", reports.front().mean.f1}, {"reports", rows}}.dump(2) << '\n';
      return kExitOk;
    }

    if (*synth) {
      synth_cfg.preference_sharpness = sharpness_level(sharpness);
      synth_cfg.seed = common.resolved_seed();
      const auto city_data = generate_synthetic_city(synth_cfg);
      const auto files = write_synthetic_city(city_data, out_dir);
      log("wrote synthetic city '" + synth_cfg.city + "' to " + out_dir);
      out << nlohmann::json{{"city", synth_cfg.city},
                            {"seed", synth_cfg.seed},
                            {"pois", city_data.catalog.size()},
                            {"checkins", city_data.checkins.size()},
                            {"comments", city_data.embeddings.record_count()},
                            {"files",
                             {{"checkins", files.checkins.string()},
                              {"pois", files.pois.string()},
                              {"embeddings", files.embeddings.string()}}}}
                 .dump(2)
          << '\n';
      return kExitOk;
    }
  } catch (const InputError& e) {
    err << "tourmlm: error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "tourmlm: error: " << e.what() << '\n';
    return kExitInput;
  } catch (const nlohmann::json::exception& e) {
    err << "tourmlm: error: malformed JSON input: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    err << "tourmlm: internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitInternal;
}

}  // namespace cli

inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  return cli::run(argc, argv, out, err);
}

}  // namespace tourmlm

#endif
