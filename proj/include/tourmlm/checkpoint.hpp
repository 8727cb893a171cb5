#ifndef TOURMLM_CHECKPOINT_HPP
#define TOURMLM_CHECKPOINT_HPP

// Checkpoint container:
//   "SBTC" | u32 version | u32 header_bytes | header (UTF-8 JSON) | tensor data
// The header holds the model config, the vocabulary and its hash, a tensor
// directory (name, shape, byte offset into the data section) and training
// metadata. Tensor data is float32 little-endian, row-major.

#include <array>
#include <bit>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tourmlm/corpus.hpp"
#include "tourmlm/error.hpp"
#include "tourmlm/model.hpp"
#include "tourmlm/sentiment.hpp"

namespace tourmlm {

inline constexpr std::array<char, 4> kCheckpointMagic = {'S', 'B', 'T', 'C'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct TrainingMetadata {
  std::size_t epochs = 0;
  double final_loss = 0.0;
  std::uint64_t seed = 0;
  std::vector<double> loss_history;

  friend bool operator==(const TrainingMetadata&, const TrainingMetadata&) = default;
};

struct Checkpoint {
  Model model;
  Vocabulary vocab;
  TrainingMetadata training;
};

inline nlohmann::json to_json(const ModelConfig& c) {
  return {{"d_model", c.d_model},       {"n_layers", c.n_layers},
          {"n_heads", c.n_heads},       {"ffn_dim", c.ffn_dim},
          {"max_len", c.max_len},       {"dropout", c.dropout},
          {"learning_rate", c.learning_rate}, {"batch_size", c.batch_size},
          {"seed", c.seed},             {"repeat_user_tokens", c.repeat_user_tokens}};
}

inline ModelConfig model_config_from_json(const nlohmann::json& j) {
  ModelConfig c;
  c.d_model = j.at("d_model").get<std::size_t>();
  c.n_layers = j.at("n_layers").get<std::size_t>();
  c.n_heads = j.at("n_heads").get<std::size_t>();
  c.ffn_dim = j.at("ffn_dim").get<std::size_t>();
  c.max_len = j.at("max_len").get<std::size_t>();
  c.dropout = j.at("dropout").get<double>();
  c.learning_rate = j.at("learning_rate").get<double>();
  c.batch_size = j.at("batch_size").get<std::size_t>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.repeat_user_tokens = j.at("repeat_user_tokens").get<bool>();
  return c;
}

namespace detail {

inline std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

}  // namespace detail

/// Serialises any-precision weights; values are narrowed to float32.
template <class T>
void save_checkpoint(std::ostream& out, const Transformer<T>& model, const Vocabulary& vocab,
                     const TrainingMetadata& training = {}) {
  detail::require(model.vocab_size() == vocab.size() && model.first_poi() == vocab.first_poi_token() &&
                      model.poi_count() == vocab.poi_count(),
                  "model shape does not match the vocabulary");
  nlohmann::json tensors = nlohmann::json::array();
  std::uint64_t offset = 0;
  const auto& params = model.parameters();
  const auto& names = model.parameter_names();
  for (std::size_t i = 0; i < params.size(); ++i) {
    tensors.push_back({{"name", names[i]}, {"shape", {params[i].rows, params[i].cols}}, {"offset", offset}});
    offset += 4 * params[i].size();
  }
  nlohmann::json header = {
      {"config", to_json(model.config())},
      {"vocab", vocab.to_json()},
      {"vocab_hash", detail::hex64(vocab.hash())},
      {"tensors", std::move(tensors)},
      {"data_bytes", offset},
      {"training",
       {{"epochs", training.epochs},
        {"final_loss", training.final_loss},
        {"seed", training.seed},
        {"loss_history", training.loss_history}}},
  };
  const std::string text = header.dump();
  out.write(kCheckpointMagic.data(), 4);
  detail::write_u32_le(out, kCheckpointVersion);
  detail::write_u32_le(out, static_cast<std::uint32_t>(text.size()));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  for (const auto& p : params) {
    for (auto v : p.data) detail::write_f32_le(out, static_cast<float>(v));
  }
}

template <class T>
void save_checkpoint(const std::filesystem::path& path, const Transformer<T>& model, const Vocabulary& vocab,
                     const TrainingMetadata& training = {}) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  save_checkpoint(out, model, vocab, training);
  if (!out) throw InputError("failed writing " + path.string());
}

inline Checkpoint parse_checkpoint(std::span<const unsigned char> bytes) {
  auto fail = [](const std::string& what) { return InputError("checkpoint: " + what); };
  if (bytes.size() < 12) throw fail("truncated header");
  for (std::size_t i = 0; i < 4; ++i) {
    if (bytes[i] != static_cast<unsigned char>(kCheckpointMagic[i])) throw fail("bad magic");
  }
  const auto version = detail::read_u32_le(bytes.data() + 4);
  if (version != kCheckpointVersion) throw fail("unsupported version " + std::to_string(version));
  const auto header_len = detail::read_u32_le(bytes.data() + 8);
  if (bytes.size() - 12 < header_len) throw fail("truncated JSON header");

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(bytes.begin() + 12, bytes.begin() + 12 + header_len);
  } catch (const nlohmann::json::exception& e) {
    throw fail(std::string("malformed JSON header: ") + e.what());
  }

  Checkpoint ck;
  try {
    ck.vocab = Vocabulary::from_json(header.at("vocab"));
    if (header.at("vocab_hash").get<std::string>() != detail::hex64(ck.vocab.hash())) {
      throw fail("vocabulary hash does not match the stored vocabulary");
    }
    const auto cfg = model_config_from_json(header.at("config"));
    ck.model = Model(cfg, ck.vocab.size(), ck.vocab.first_poi_token(), ck.vocab.poi_count());

    const auto& tr = header.at("training");
    ck.training.epochs = tr.at("epochs").get<std::size_t>();
    ck.training.final_loss = tr.at("final_loss").get<double>();
    ck.training.seed = tr.at("seed").get<std::uint64_t>();
    ck.training.loss_history = tr.at("loss_history").get<std::vector<double>>();

    const auto& dir = header.at("tensors");
    auto& params = ck.model.parameters();
    const auto& names = ck.model.parameter_names();
    if (dir.size() != params.size()) throw fail("tensor count mismatch");
    const std::size_t data_start = 12 + header_len;
    const auto data_bytes = header.at("data_bytes").get<std::uint64_t>();
    if (bytes.size() - data_start != data_bytes) throw fail("tensor data size mismatch");
    for (std::size_t i = 0; i < params.size(); ++i) {
      const auto& entry = dir[i];
      if (entry.at("name").get<std::string>() != names[i]) throw fail("unexpected tensor " + entry.at("name").dump());
      const auto shape = entry.at("shape").get<std::vector<std::size_t>>();
      if (shape.size() != 2 || shape[0] != params[i].rows || shape[1] != params[i].cols) {
        throw fail("shape mismatch for tensor " + names[i]);
      }
      const auto off = entry.at("offset").get<std::uint64_t>();
      if (off + 4 * params[i].size() > data_bytes) throw fail("tensor " + names[i] + " extends past the data section");
      const unsigned char* src = bytes.data() + data_start + off;
      for (std::size_t k = 0; k < params[i].size(); ++k) params[i].data[k] = detail::read_f32_le(src + 4 * k);
    }
  } catch (const nlohmann::json::exception& e) {
    throw fail(std::string("malformed header: ") + e.what());
  }
  return ck;
}

inline Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return parse_checkpoint(bytes);
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

/// Loads and additionally checks the checkpoint was trained on `expected`.
inline Checkpoint load_checkpoint(const std::filesystem::path& path, const Vocabulary& expected) {
  auto ck = load_checkpoint(path);
  if (ck.vocab.hash() != expected.hash()) {
    throw InputError(path.string() + ": checkpoint vocabulary hash " + detail::hex64(ck.vocab.hash()) +
                     " differs from the current vocabulary " + detail::hex64(expected.hash()));
  }
  return ck;
}

}  // namespace tourmlm

#endif
