#ifndef TOURMLM_SENTIMENT_HPP
#define TOURMLM_SENTIMENT_HPP

// Per-POI comment embeddings and the comment-coherence signal: the mean
// normalized cosine distance (1 - cos) / 2 over all comment pairs of a POI.
//
// PEMB file layout (all integers little-endian):
//   "PEMB" | u32 version = 1 | u32 dim | u32 count |
//   count x ( u32 poi_id | u32 comment_index | dim x f32 )

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "tourmlm/error.hpp"
#include "tourmlm/types.hpp"

namespace tourmlm {

inline constexpr std::array<char, 4> kPembMagic = {'P', 'E', 'M', 'B'};
inline constexpr std::uint32_t kPembVersion = 1;
inline constexpr std::size_t kMaxCommentsPerPoi = 20;
inline constexpr double kNeutralSentimentDistance = 0.5;

struct CommentEmbedding {
  PoiId poi_id = 0;
  std::uint32_t comment_index = 0;
  std::vector<float> vector;

  friend bool operator==(const CommentEmbedding&, const CommentEmbedding&) = default;
};

enum class DistanceAggregate { Mean, Min, Sum };

/// Normalized cosine distance in [0,1]: 0 for parallel, 1 for antipodal vectors.
template <class A, class B>
double pair_distance(std::span<const A> a, std::span<const B> b) {
  detail::require(a.size() == b.size(), "pair_distance: dimension mismatch");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double x = a[i], y = b[i];
    dot += x * y;
    na += x * x;
    nb += y * y;
  }
  detail::require(na > 0.0 && nb > 0.0, "pair_distance: zero-norm vector");
  const double cosine = std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
  return (1.0 - cosine) / 2.0;
}

inline double pair_distance(const std::vector<double>& a, const std::vector<double>& b) {
  return pair_distance(std::span<const double>(a), std::span<const double>(b));
}

inline double pair_distance(const std::vector<float>& a, const std::vector<float>& b) {
  return pair_distance(std::span<const float>(a), std::span<const float>(b));
}

/// Immutable after loading; holds at most kMaxCommentsPerPoi comments per POI
/// (the lowest comment indices win).
class EmbeddingStore {
 public:
  explicit EmbeddingStore(std::uint32_t dim = 384) : dim_(dim) {
    detail::require(dim > 0, "embedding dimension must be positive");
  }

  std::uint32_t dimension() const { return dim_; }

  void add(CommentEmbedding e) {
    detail::require(e.vector.size() == dim_, "embedding for POI " + std::to_string(e.poi_id) + " has dimension " +
                                                 std::to_string(e.vector.size()) + ", store expects " +
                                                 std::to_string(dim_));
    double norm = 0.0;
    for (float x : e.vector) norm += static_cast<double>(x) * x;
    detail::require(std::isfinite(norm) && norm > 0.0,
                    "embedding for POI " + std::to_string(e.poi_id) + " has zero or non-finite norm");
    auto& list = by_poi_[e.poi_id];
    auto pos = std::lower_bound(list.begin(), list.end(), e.comment_index,
                                [](const CommentEmbedding& c, std::uint32_t idx) { return c.comment_index < idx; });
    detail::require(pos == list.end() || pos->comment_index != e.comment_index,
                    "duplicate comment " + std::to_string(e.comment_index) + " for POI " + std::to_string(e.poi_id));
    list.insert(pos, std::move(e));
    if (list.size() > kMaxCommentsPerPoi) list.pop_back();
  }

  std::span<const CommentEmbedding> comments(PoiId id) const {
    auto it = by_poi_.find(id);
    if (it == by_poi_.end()) return {};
    return it->second;
  }

  std::size_t poi_count() const { return by_poi_.size(); }

  std::size_t record_count() const {
    std::size_t n = 0;
    for (const auto& [_, list] : by_poi_) n += list.size();
    return n;
  }

  auto begin() const { return by_poi_.begin(); }
  auto end() const { return by_poi_.end(); }

 private:
  std::uint32_t dim_;
  std::map<PoiId, std::vector<CommentEmbedding>> by_poi_;
};

/// Aggregated pairwise distance over a POI's comments; 0.5 with fewer than two.
inline double poi_sentiment_distance(const EmbeddingStore& store, PoiId id,
                                     DistanceAggregate agg = DistanceAggregate::Mean) {
  auto list = store.comments(id);
  if (list.size() < 2) return kNeutralSentimentDistance;
  double sum = 0.0, lowest = 1.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < list.size(); ++i) {
    for (std::size_t j = i + 1; j < list.size(); ++j) {
      const double d = pair_distance(std::span<const float>(list[i].vector), std::span<const float>(list[j].vector));
      sum += d;
      lowest = std::min(lowest, d);
      ++pairs;
    }
  }
  switch (agg) {
    case DistanceAggregate::Min: return lowest;
    case DistanceAggregate::Sum: return sum;
    case DistanceAggregate::Mean: break;
  }
  return sum / static_cast<double>(pairs);
}

namespace detail {

inline std::uint32_t read_u32_le(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

inline void write_u32_le(std::ostream& out, std::uint32_t v) {
  const char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                     static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
  out.write(b, 4);
}

inline float read_f32_le(const unsigned char* p) { return std::bit_cast<float>(read_u32_le(p)); }

inline void write_f32_le(std::ostream& out, float f) { write_u32_le(out, std::bit_cast<std::uint32_t>(f)); }

}  // namespace detail

/// Parses a PEMB image held in memory. Errors carry the byte offset.
inline EmbeddingStore parse_pemb(std::span<const unsigned char> bytes) {
  auto fail = [](std::size_t offset, const std::string& what) -> InputError {
    return InputError("PEMB: " + what + " at byte offset " + std::to_string(offset));
  };
  if (bytes.size() < 16) throw fail(bytes.size(), "truncated header");
  if (!std::equal(kPembMagic.begin(), kPembMagic.end(), bytes.begin(),
                  [](char a, unsigned char b) { return static_cast<unsigned char>(a) == b; })) {
    throw fail(0, "bad magic");
  }
  const auto version = detail::read_u32_le(bytes.data() + 4);
  if (version != kPembVersion) throw fail(4, "unsupported version " + std::to_string(version));
  const auto dim = detail::read_u32_le(bytes.data() + 8);
  if (dim == 0) throw fail(8, "zero dimension");
  const auto count = detail::read_u32_le(bytes.data() + 12);

  EmbeddingStore store(dim);
  const std::size_t record_size = 8 + 4 * static_cast<std::size_t>(dim);
  std::size_t offset = 16;
  for (std::uint32_t r = 0; r < count; ++r) {
    if (bytes.size() - offset < record_size) throw fail(offset, "truncated record " + std::to_string(r));
    CommentEmbedding e;
    e.poi_id = detail::read_u32_le(bytes.data() + offset);
    e.comment_index = detail::read_u32_le(bytes.data() + offset + 4);
    e.vector.resize(dim);
    for (std::uint32_t k = 0; k < dim; ++k) e.vector[k] = detail::read_f32_le(bytes.data() + offset + 8 + 4 * k);
    try {
      store.add(std::move(e));
    } catch (const InputError& err) {
      throw fail(offset, err.what());
    }
    offset += record_size;
  }
  if (offset != bytes.size()) throw fail(offset, "trailing bytes after last record");
  return store;
}

/// JSON mirror: {"dim": d, "records": [{"poi": .., "idx": .., "vec": [..]}]}.
inline EmbeddingStore parse_embedding_json(const nlohmann::json& j) {
  EmbeddingStore store(j.at("dim").get<std::uint32_t>());
  for (const auto& r : j.at("records")) {
    CommentEmbedding e;
    e.poi_id = r.at("poi").get<PoiId>();
    e.comment_index = r.at("idx").get<std::uint32_t>();
    e.vector = r.at("vec").get<std::vector<float>>();
    store.add(std::move(e));
  }
  return store;
}

/// Loads a PEMB file, or its JSON mirror when the file starts with '{'.
inline EmbeddingStore load_embeddings(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  auto first = std::find_if(bytes.begin(), bytes.end(), [](unsigned char c) { return !std::isspace(c); });
  if (first != bytes.end() && *first == '{') {
    try {
      return parse_embedding_json(nlohmann::json::parse(bytes.begin(), bytes.end()));
    } catch (const nlohmann::json::exception& e) {
      throw InputError(path.string() + ": " + e.what());
    }
  }
  try {
    return parse_pemb(bytes);
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

/// Writes records in (poi_id, comment_index) order.
inline void write_pemb(std::ostream& out, const EmbeddingStore& store) {
  out.write(kPembMagic.data(), 4);
  detail::write_u32_le(out, kPembVersion);
  detail::write_u32_le(out, store.dimension());
  detail::write_u32_le(out, static_cast<std::uint32_t>(store.record_count()));
  for (const auto& [id, list] : store) {
    for (const auto& e : list) {
      detail::write_u32_le(out, e.poi_id);
      detail::write_u32_le(out, e.comment_index);
      for (float x : e.vector) detail::write_f32_le(out, x);
    }
  }
}

inline void write_pemb(const std::filesystem::path& path, const EmbeddingStore& store) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  write_pemb(out, store);
}

}  // namespace tourmlm

#endif
