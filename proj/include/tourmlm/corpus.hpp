#ifndef TOURMLM_CORPUS_HPP
#define TOURMLM_CORPUS_HPP

// Token vocabulary and masked-prediction training samples.
//
// Default sentence layout:
//   [CLS] USER CITY THEME(c_i) POI(p_i) ... THEME(c_{j-1}) POI(p_{j-1}) [MASK] [SEP]
// With repeat_user_tokens the USER token moves from the header into every
// THEME/POI group:
//   [CLS] CITY USER THEME POI ... USER THEME POI [MASK] [SEP]

#include <algorithm>
#include <compare>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "tourmlm/error.hpp"
#include "tourmlm/text.hpp"
#include "tourmlm/types.hpp"

namespace tourmlm {

using TokenId = std::int32_t;

enum class TokenKind : std::uint8_t { Cls, Sep, Mask, Pad, Unk, User, City, Theme, Poi };

inline constexpr TokenId kClsId = 0;
inline constexpr TokenId kSepId = 1;
inline constexpr TokenId kMaskId = 2;
inline constexpr TokenId kPadId = 3;
inline constexpr TokenId kUnkId = 4;
inline constexpr TokenId kNumSpecial = 5;

struct Token {
  TokenKind kind = TokenKind::Unk;
  std::string payload;

  static Token user(std::string u) { return {TokenKind::User, std::move(u)}; }
  static Token city(std::string c) { return {TokenKind::City, std::move(c)}; }
  static Token theme(std::string t) { return {TokenKind::Theme, std::move(t)}; }
  static Token poi(PoiId p) { return {TokenKind::Poi, std::to_string(p)}; }

  bool is_special() const { return kind <= TokenKind::Unk; }

  friend auto operator<=>(const Token&, const Token&) = default;
  friend bool operator==(const Token&, const Token&) = default;
};

inline std::string to_string(const Token& t) {
  switch (t.kind) {
    case TokenKind::Cls: return "[CLS]";
    case TokenKind::Sep: return "[SEP]";
    case TokenKind::Mask: return "[MASK]";
    case TokenKind::Pad: return "[PAD]";
    case TokenKind::Unk: return "[UNK]";
    case TokenKind::User: return "USER:" + t.payload;
    case TokenKind::City: return "CITY:" + t.payload;
    case TokenKind::Theme: return "THEME:" + t.payload;
    case TokenKind::Poi: return "POI:" + t.payload;
  }
  return "[UNK]";
}

inline Token token_from_string(std::string_view s) {
  if (s == "[CLS]") return {TokenKind::Cls, {}};
  if (s == "[SEP]") return {TokenKind::Sep, {}};
  if (s == "[MASK]") return {TokenKind::Mask, {}};
  if (s == "[PAD]") return {TokenKind::Pad, {}};
  if (s == "[UNK]") return {TokenKind::Unk, {}};
  auto colon = s.find(':');
  detail::require(colon != std::string_view::npos, "malformed token '" + std::string(s) + "'");
  auto prefix = s.substr(0, colon);
  std::string payload(s.substr(colon + 1));
  detail::require(!payload.empty(), "token without payload '" + std::string(s) + "'");
  if (prefix == "USER") return Token::user(payload);
  if (prefix == "CITY") return Token::city(payload);
  if (prefix == "THEME") return Token::theme(payload);
  if (prefix == "POI") {
    Token t{TokenKind::Poi, payload};
    return t;
  }
  throw InputError("unknown token kind in '" + std::string(s) + "'");
}

/// Bijection between tokens and dense ids. Specials occupy ids 0-4, then POIs
/// by numeric id, themes, cities and users in lexicographic order. Also keeps
/// the theme of every POI so queries can be encoded without the catalog.
class Vocabulary {
 public:
  Vocabulary() { add_specials(); }

  TokenId size() const { return static_cast<TokenId>(tokens_.size()); }

  const Token& token(TokenId id) const {
    detail::require(id >= 0 && id < size(), "token id out of range: " + std::to_string(id));
    return tokens_[static_cast<std::size_t>(id)];
  }

  std::optional<TokenId> find(const Token& t) const {
    auto it = index_.find(t);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  /// Unknown tokens map to [UNK].
  TokenId id(const Token& t) const { return find(t).value_or(kUnkId); }
  TokenId poi_token(PoiId p) const { return id(Token::poi(p)); }
  TokenId user_token(const std::string& u) const { return id(Token::user(u)); }
  TokenId city_token(const std::string& c) const { return id(Token::city(c)); }

  TokenId theme_token_of_poi(PoiId p) const {
    auto it = poi_theme_.find(p);
    if (it == poi_theme_.end()) return kUnkId;
    return id(Token::theme(it->second));
  }

  bool is_poi(TokenId id) const { return id >= 0 && id < size() && tokens_[static_cast<std::size_t>(id)].kind == TokenKind::Poi; }

  PoiId poi_of(TokenId id) const {
    detail::require(is_poi(id), "token " + std::to_string(id) + " is not a POI token");
    return poi_ids_[static_cast<std::size_t>(id - first_poi_)];
  }

  /// POI token ids form one contiguous block.
  TokenId first_poi_token() const { return first_poi_; }
  TokenId poi_count() const { return static_cast<TokenId>(poi_ids_.size()); }
  const std::vector<PoiId>& poi_ids() const { return poi_ids_; }

  std::vector<std::string> users() const { return payloads(TokenKind::User); }
  std::vector<std::string> themes() const { return payloads(TokenKind::Theme); }
  std::vector<std::string> cities() const { return payloads(TokenKind::City); }

  std::size_t count(TokenKind k) const {
    return static_cast<std::size_t>(std::count_if(tokens_.begin(), tokens_.end(),
                                                  [k](const Token& t) { return t.kind == k; }));
  }

  const std::map<PoiId, std::string>& poi_themes() const { return poi_theme_; }

  /// FNV-1a over the canonical token listing and the POI theme map.
  std::uint64_t hash() const {
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](std::string_view s) {
      for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
      }
      h ^= 0xff;
      h *= 1099511628211ull;
    };
    for (const auto& t : tokens_) mix(to_string(t));
    for (const auto& [p, theme] : poi_theme_) mix(std::to_string(p) + "=" + theme);
    return h;
  }

  nlohmann::json to_json() const {
    nlohmann::json toks = nlohmann::json::array();
    for (const auto& t : tokens_) toks.push_back(to_string(t));
    nlohmann::json themes = nlohmann::json::object();
    for (const auto& [p, theme] : poi_theme_) themes[std::to_string(p)] = theme;
    return {{"tokens", std::move(toks)}, {"poi_themes", std::move(themes)}};
  }

  static Vocabulary from_json(const nlohmann::json& j) {
    std::vector<Token> tokens;
    for (const auto& s : j.at("tokens")) tokens.push_back(token_from_string(s.get<std::string>()));
    std::map<PoiId, std::string> themes;
    for (const auto& [k, v] : j.at("poi_themes").items()) {
      themes[static_cast<PoiId>(std::stoul(k))] = v.get<std::string>();
    }
    return from_parts(std::move(tokens), std::move(themes));
  }

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.tokens_ == b.tokens_ && a.poi_theme_ == b.poi_theme_;
  }

  /// Builds a vocabulary from an explicit token listing (specials first).
  static Vocabulary from_parts(std::vector<Token> tokens, std::map<PoiId, std::string> poi_themes) {
    detail::require(tokens.size() >= static_cast<std::size_t>(kNumSpecial), "vocabulary lacks special tokens");
    Vocabulary v;
    for (TokenId i = 0; i < kNumSpecial; ++i) {
      detail::require(tokens[static_cast<std::size_t>(i)] == v.tokens_[static_cast<std::size_t>(i)],
                      "special tokens out of place");
    }
    for (std::size_t i = static_cast<std::size_t>(kNumSpecial); i < tokens.size(); ++i) v.push(tokens[i]);
    v.poi_theme_ = std::move(poi_themes);
    v.finalize();
    return v;
  }

 private:
  friend Vocabulary build_vocabulary(std::span<const Trajectory>, const PoiCatalog&);

  void add_specials() {
    for (auto k : {TokenKind::Cls, TokenKind::Sep, TokenKind::Mask, TokenKind::Pad, TokenKind::Unk}) {
      push(Token{k, {}});
    }
  }

  void push(Token t) {
    detail::require(t.is_special() == t.payload.empty(), "token payload mismatch for " + to_string(t));
    auto [it, inserted] = index_.emplace(t, static_cast<TokenId>(tokens_.size()));
    detail::require(inserted, "duplicate token " + to_string(t));
    tokens_.push_back(std::move(t));
  }

  void finalize() {
    poi_ids_.clear();
    first_poi_ = size();
    for (TokenId i = 0; i < size(); ++i) {
      const auto& t = tokens_[static_cast<std::size_t>(i)];
      if (t.kind != TokenKind::Poi) continue;
      if (poi_ids_.empty()) first_poi_ = i;
      detail::require(i == first_poi_ + static_cast<TokenId>(poi_ids_.size()), "POI tokens must be contiguous");
      poi_ids_.push_back(static_cast<PoiId>(std::stoul(t.payload)));
    }
  }

  std::vector<std::string> payloads(TokenKind k) const {
    std::vector<std::string> out;
    for (const auto& t : tokens_) {
      if (t.kind == k) out.push_back(t.payload);
    }
    return out;
  }

  std::vector<Token> tokens_;
  std::map<Token, TokenId> index_;
  std::map<PoiId, std::string> poi_theme_;
  std::vector<PoiId> poi_ids_;
  TokenId first_poi_ = kNumSpecial;
};

/// Vocabulary over everything observed in the training trajectories.
inline Vocabulary build_vocabulary(std::span<const Trajectory> train, const PoiCatalog& pois) {
  detail::require(!train.empty(), "cannot build a vocabulary from an empty training set");
  std::set<PoiId> poi_set;
  std::set<std::string> themes, cities, users;
  std::map<PoiId, std::string> poi_theme;
  for (const auto& t : train) {
    users.insert(t.user_id);
    cities.insert(t.city);
    for (const auto& v : t.visits) {
      const auto& rec = pois.at(v.poi_id);
      poi_set.insert(v.poi_id);
      themes.insert(rec.theme);
      poi_theme[v.poi_id] = rec.theme;
    }
  }
  Vocabulary vocab;
  for (auto p : poi_set) vocab.push(Token::poi(p));
  for (const auto& s : themes) vocab.push(Token::theme(s));
  for (const auto& s : cities) vocab.push(Token::city(s));
  for (const auto& s : users) vocab.push(Token::user(s));
  vocab.poi_theme_ = std::move(poi_theme);
  vocab.finalize();
  return vocab;
}

struct CorpusOptions {
  std::size_t max_len = 128;
  bool repeat_user_tokens = false;
};

struct TrainingSample {
  std::vector<TokenId> input_ids;
  std::size_t mask_position = 0;
  TokenId label_id = kUnkId;

  friend bool operator==(const TrainingSample&, const TrainingSample&) = default;
};

namespace detail {

/// Assembles header + prefix groups + MASK + suffix groups + SEP, dropping the
/// oldest prefix groups (then the farthest suffix groups) to fit max_len.
inline std::vector<TokenId> assemble(TokenId user, TokenId city, std::span<const PoiId> prefix,
                                     std::span<const PoiId> suffix, const Vocabulary& vocab,
                                     const CorpusOptions& opts, std::size_t* mask_position) {
  const std::size_t group = opts.repeat_user_tokens ? 3 : 2;
  const std::size_t header = opts.repeat_user_tokens ? 2 : 3;  // CLS (USER) CITY
  detail::require(opts.max_len >= header + group + 2, "max_len too small for a single context group");

  std::size_t keep_prefix = prefix.size();
  std::size_t keep_suffix = suffix.size();
  auto length = [&] { return header + group * (keep_prefix + keep_suffix) + 2; };
  while (length() > opts.max_len && keep_prefix > 1) --keep_prefix;
  while (length() > opts.max_len && keep_suffix > 0) --keep_suffix;
  while (length() > opts.max_len && keep_prefix > 0) --keep_prefix;

  std::vector<TokenId> ids;
  ids.reserve(length());
  ids.push_back(kClsId);
  if (!opts.repeat_user_tokens) ids.push_back(user);
  ids.push_back(city);
  auto emit = [&](PoiId p) {
    if (opts.repeat_user_tokens) ids.push_back(user);
    ids.push_back(vocab.theme_token_of_poi(p));
    ids.push_back(vocab.poi_token(p));
  };
  for (std::size_t i = prefix.size() - keep_prefix; i < prefix.size(); ++i) emit(prefix[i]);
  *mask_position = ids.size();
  ids.push_back(kMaskId);
  for (std::size_t i = 0; i < keep_suffix; ++i) emit(suffix[i]);
  ids.push_back(kSepId);
  return ids;
}

}  // namespace detail

/// One sample per index pair i < j: context visits i..j-1, label visit j.
/// Yields n(n-1)/2 samples for an n-visit trajectory.
inline std::vector<TrainingSample> generate_training_samples(const Trajectory& trajectory, const Vocabulary& vocab,
                                                             const CorpusOptions& opts = {}) {
  const auto n = trajectory.visits.size();
  detail::require(n >= 3, "trajectory " + trajectory.seq_id + " has fewer than 3 visits");
  const auto pois = trajectory.poi_sequence();
  const TokenId user = vocab.user_token(trajectory.user_id);
  const TokenId city = vocab.city_token(trajectory.city);

  std::vector<TrainingSample> out;
  out.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      TrainingSample s;
      s.label_id = vocab.poi_token(pois[j]);
      detail::require(vocab.is_poi(s.label_id),
                      "label POI " + std::to_string(pois[j]) + " is not in the vocabulary");
      s.input_ids = detail::assemble(user, city, std::span(pois).subspan(i, j - i), {}, vocab, opts,
                                     &s.mask_position);
      out.push_back(std::move(s));
    }
  }
  return out;
}

inline std::vector<TrainingSample> generate_corpus(std::span<const Trajectory> trajectories, const Vocabulary& vocab,
                                                   const CorpusOptions& opts = {}) {
  std::vector<TrainingSample> out;
  for (const auto& t : trajectories) {
    auto s = generate_training_samples(t, vocab, opts);
    out.insert(out.end(), std::make_move_iterator(s.begin()), std::make_move_iterator(s.end()));
  }
  return out;
}

/// Query with a single MASK between `prefix` and `suffix`; unknown users and
/// POIs encode as [UNK].
inline std::vector<TokenId> encode_prediction_query(const std::string& user, const std::string& city,
                                                    std::span<const PoiId> prefix, std::span<const PoiId> suffix,
                                                    const Vocabulary& vocab, const CorpusOptions& opts = {}) {
  detail::require(!prefix.empty(), "prediction query needs a non-empty prefix");
  detail::require(!suffix.empty(), "prediction query needs a non-empty suffix");
  std::size_t mask = 0;
  return detail::assemble(vocab.user_token(user), vocab.city_token(city), prefix, suffix, vocab, opts, &mask);
}

/// Same, for callers that already hold the user token id.
inline std::vector<TokenId> encode_prediction_query(TokenId user, const std::string& city, std::span<const PoiId> prefix,
                                                    std::span<const PoiId> suffix, const Vocabulary& vocab,
                                                    const CorpusOptions& opts = {}) {
  detail::require(!prefix.empty(), "prediction query needs a non-empty prefix");
  detail::require(!suffix.empty(), "prediction query needs a non-empty suffix");
  std::size_t mask = 0;
  return detail::assemble(user, vocab.city_token(city), prefix, suffix, vocab, opts, &mask);
}

inline std::vector<std::string> decode(std::span<const TokenId> ids, const Vocabulary& vocab) {
  std::vector<std::string> out;
  out.reserve(ids.size());
  for (auto id : ids) out.push_back(to_string(vocab.token(id)));
  return out;
}

inline std::vector<TokenId> encode(std::span<const std::string> tokens, const Vocabulary& vocab) {
  std::vector<TokenId> out;
  out.reserve(tokens.size());
  for (const auto& s : tokens) out.push_back(vocab.id(token_from_string(s)));
  return out;
}

// Line format: space-separated ids <TAB> mask position <TAB> label id.

inline void write_samples(std::ostream& out, std::span<const TrainingSample> samples) {
  for (const auto& s : samples) {
    for (std::size_t i = 0; i < s.input_ids.size(); ++i) out << (i ? " " : "") << s.input_ids[i];
    out << '\t' << s.mask_position << '\t' << s.label_id << '\n';
  }
}

inline std::vector<TrainingSample> read_samples(std::istream& in) {
  std::vector<TrainingSample> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto f = detail::split_fields(line, '\t');
    detail::require(f.size() == 3, "sample line " + std::to_string(line_no) + ": expected 3 tab-separated fields");
    TrainingSample s;
    std::istringstream ids(f[0]);
    TokenId id = 0;
    while (ids >> id) s.input_ids.push_back(id);
    s.mask_position = std::stoul(f[1]);
    s.label_id = static_cast<TokenId>(std::stol(f[2]));
    detail::require(s.mask_position < s.input_ids.size() && s.input_ids[s.mask_position] == kMaskId,
                    "sample line " + std::to_string(line_no) + ": mask position does not hold [MASK]");
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace tourmlm

#endif
