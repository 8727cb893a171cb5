#ifndef TOURMLM_MODEL_HPP
#define TOURMLM_MODEL_HPP

// A small pre-LayerNorm transformer encoder with a masked-token head tied to
// the token embeddings. The head only scores POI tokens, so training and
// inference never assign mass to users, themes or specials.
//
// Gradients are hand-derived; `Transformer<double>` exists so they can be
// checked against finite differences on the same code path as training.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "tourmlm/corpus.hpp"
#include "tourmlm/error.hpp"
#include "tourmlm/tensor.hpp"

namespace tourmlm {

struct ModelConfig {
  std::size_t d_model = 64;
  std::size_t n_layers = 2;
  std::size_t n_heads = 4;
  std::size_t ffn_dim = 128;
  std::size_t max_len = 128;
  double dropout = 0.1;
  double learning_rate = 1e-3;
  std::size_t batch_size = 32;
  std::uint64_t seed = 42;
  bool repeat_user_tokens = false;

  CorpusOptions corpus_options() const { return {max_len, repeat_user_tokens}; }

  void validate() const {
    detail::require(d_model > 0 && n_layers > 0 && n_heads > 0 && ffn_dim > 0 && max_len > 0 && batch_size > 0,
                    "model dimensions must be positive");
    detail::require(d_model % n_heads == 0, "d_model (" + std::to_string(d_model) +
                                                ") must be divisible by n_heads (" + std::to_string(n_heads) + ")");
    detail::require(dropout >= 0.0 && dropout < 1.0, "dropout must lie in [0,1)");
    detail::require(learning_rate > 0.0, "learning_rate must be positive");
  }

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

/// Probabilities over the contiguous POI block of the vocabulary.
struct PoiDistribution {
  TokenId first_poi = 0;
  std::vector<double> probs;

  /// Zero for every non-POI token.
  double of_token(TokenId id) const {
    if (id < first_poi || id >= first_poi + static_cast<TokenId>(probs.size())) return 0.0;
    return probs[static_cast<std::size_t>(id - first_poi)];
  }

  std::vector<double> full(TokenId vocab_size) const {
    std::vector<double> out(static_cast<std::size_t>(vocab_size), 0.0);
    std::copy(probs.begin(), probs.end(), out.begin() + first_poi);
    return out;
  }

  TokenId argmax() const {
    auto it = std::max_element(probs.begin(), probs.end());
    return first_poi + static_cast<TokenId>(it - probs.begin());
  }

  friend bool operator==(const PoiDistribution&, const PoiDistribution&) = default;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c = 0) {
  return splitmix64(splitmix64(splitmix64(a) ^ b) ^ c);
}

constexpr double kGeluC = 0.7978845608028654;  // sqrt(2/pi)
constexpr double kGeluA = 0.044715;

template <class T>
T gelu(T x) {
  const double xd = x;
  return static_cast<T>(0.5 * xd * (1.0 + std::tanh(kGeluC * (xd + kGeluA * xd * xd * xd))));
}

template <class T>
T gelu_grad(T x) {
  const double xd = x;
  const double t = std::tanh(kGeluC * (xd + kGeluA * xd * xd * xd));
  return static_cast<T>(0.5 * (1.0 + t) + 0.5 * xd * (1.0 - t * t) * kGeluC * (1.0 + 3.0 * kGeluA * xd * xd));
}

}  // namespace detail

template <class T>
class Transformer {
 public:
  static constexpr double kLayerNormEps = 1e-5;
  static constexpr std::size_t kParamsPerLayer = 16;

  // Per-layer parameter offsets.
  enum LayerParam : std::size_t {
    kLn1Gain, kLn1Bias, kWq, kBq, kWk, kBk, kWv, kBv, kWo, kBo,
    kLn2Gain, kLn2Bias, kW1, kB1, kW2, kB2
  };

  Transformer() = default;

  /// Zero-initialised weights with the right shapes; see init_model().
  Transformer(const ModelConfig& cfg, TokenId vocab_size, TokenId first_poi, TokenId poi_count)
      : cfg_(cfg), vocab_size_(vocab_size), first_poi_(first_poi), poi_count_(poi_count) {
    cfg_.validate();
    detail::require(vocab_size > 0 && poi_count > 0, "vocabulary needs at least one POI token");
    detail::require(first_poi >= 0 && first_poi + poi_count <= vocab_size, "POI block outside the vocabulary");
    const auto d = cfg_.d_model, f = cfg_.ffn_dim, v = static_cast<std::size_t>(vocab_size);
    add("tok_emb", v, d);
    add("pos_emb", cfg_.max_len, d);
    for (std::size_t l = 0; l < cfg_.n_layers; ++l) {
      const std::string p = "layer" + std::to_string(l) + ".";
      add(p + "ln1.gain", 1, d);
      add(p + "ln1.bias", 1, d);
      add(p + "attn.wq", d, d);
      add(p + "attn.bq", 1, d);
      add(p + "attn.wk", d, d);
      add(p + "attn.bk", 1, d);
      add(p + "attn.wv", d, d);
      add(p + "attn.bv", 1, d);
      add(p + "attn.wo", d, d);
      add(p + "attn.bo", 1, d);
      add(p + "ln2.gain", 1, d);
      add(p + "ln2.bias", 1, d);
      add(p + "ffn.w1", d, f);
      add(p + "ffn.b1", 1, f);
      add(p + "ffn.w2", f, d);
      add(p + "ffn.b2", 1, d);
    }
    add("final_ln.gain", 1, d);
    add("final_ln.bias", 1, d);
    add("out_bias", 1, v);
  }

  const ModelConfig& config() const { return cfg_; }
  TokenId vocab_size() const { return vocab_size_; }
  TokenId first_poi() const { return first_poi_; }
  TokenId poi_count() const { return poi_count_; }

  std::vector<Matrix<T>>& parameters() { return params_; }
  const std::vector<Matrix<T>>& parameters() const { return params_; }
  const std::vector<std::string>& parameter_names() const { return names_; }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (const auto& p : params_) n += p.size();
    return n;
  }

  /// Intermediate activations of one forward pass, kept for backprop.
  struct LayerCache {
    Matrix<T> xhat1, a, q, k, v, o, drop1, xhat2, b, u, g, drop2;
    std::vector<T> rstd1, rstd2;
    std::vector<Matrix<T>> probs;
  };

  struct Cache {
    std::vector<TokenId> ids;
    std::size_t mask = 0;
    Matrix<T> drop0;
    std::vector<LayerCache> layers;
    Matrix<T> xhatf, f;
    std::vector<T> rstdf;
  };

  /// Checks that a sequence is well formed for this model.
  void validate_input(std::span<const TokenId> ids, std::size_t mask) const {
    detail::require(!ids.empty(), "empty input sequence");
    detail::require(ids.size() <= cfg_.max_len, "sequence of length " + std::to_string(ids.size()) +
                                                    " exceeds max_len " + std::to_string(cfg_.max_len));
    detail::require(mask < ids.size() && ids[mask] == kMaskId, "mask position does not hold [MASK]");
    for (auto id : ids) detail::require(id >= 0 && id < vocab_size_, "token id out of range: " + std::to_string(id));
  }

  /// Logits over the POI block at the masked position. `rng` enables dropout.
  std::vector<T> forward(std::span<const TokenId> ids, std::size_t mask, Cache& cache,
                         std::mt19937_64* rng = nullptr) const {
    const std::size_t L = ids.size(), d = cfg_.d_model, H = cfg_.n_heads, dh = d / H;
    const bool drop = rng != nullptr && cfg_.dropout > 0.0;
    cache.ids.assign(ids.begin(), ids.end());
    cache.mask = mask;
    cache.layers.resize(cfg_.n_layers);

    Matrix<T> x(L, d);
    const auto& emb = params_[0];
    const auto& pos = params_[1];
    for (std::size_t t = 0; t < L; ++t) {
      auto e = emb.row(static_cast<std::size_t>(ids[t]));
      auto p = pos.row(t);
      for (std::size_t c = 0; c < d; ++c) x(t, c) = e[c] + p[c];
    }
    cache.drop0 = drop ? dropout_mask(L, d, *rng) : Matrix<T>{};
    if (drop) hadamard_in_place(x, cache.drop0);

    const T scale = static_cast<T>(1.0 / std::sqrt(static_cast<double>(dh)));
    for (std::size_t l = 0; l < cfg_.n_layers; ++l) {
      auto& lc = cache.layers[l];
      const std::size_t base = layer_base(l);
      layer_norm(x, params_[base + kLn1Gain], params_[base + kLn1Bias], lc.xhat1, lc.rstd1, lc.a);
      matmul(lc.a, params_[base + kWq], lc.q);
      add_row(lc.q, params_[base + kBq]);
      matmul(lc.a, params_[base + kWk], lc.k);
      add_row(lc.k, params_[base + kBk]);
      matmul(lc.a, params_[base + kWv], lc.v);
      add_row(lc.v, params_[base + kBv]);

      lc.o = Matrix<T>(L, d);
      lc.probs.assign(H, Matrix<T>(L, L));
      std::vector<double> row(L);
      for (std::size_t h = 0; h < H; ++h) {
        const std::size_t off = h * dh;
        auto& P = lc.probs[h];
        for (std::size_t i = 0; i < L; ++i) {
          double mx = -1e300;
          for (std::size_t j = 0; j < L; ++j) {
            T s{};
            for (std::size_t c = 0; c < dh; ++c) s += lc.q(i, off + c) * lc.k(j, off + c);
            row[j] = static_cast<double>(s * scale);
            mx = std::max(mx, row[j]);
          }
          double z = 0.0;
          for (std::size_t j = 0; j < L; ++j) z += (row[j] = std::exp(row[j] - mx));
          for (std::size_t j = 0; j < L; ++j) {
            const T pij = static_cast<T>(row[j] / z);
            P(i, j) = pij;
            for (std::size_t c = 0; c < dh; ++c) lc.o(i, off + c) += pij * lc.v(j, off + c);
          }
        }
      }
      Matrix<T> y;
      matmul(lc.o, params_[base + kWo], y);
      add_row(y, params_[base + kBo]);
      lc.drop1 = drop ? dropout_mask(L, d, *rng) : Matrix<T>{};
      if (drop) hadamard_in_place(y, lc.drop1);
      add_in_place(x, y);

      layer_norm(x, params_[base + kLn2Gain], params_[base + kLn2Bias], lc.xhat2, lc.rstd2, lc.b);
      matmul(lc.b, params_[base + kW1], lc.u);
      add_row(lc.u, params_[base + kB1]);
      lc.g = lc.u;
      for (auto& val : lc.g.data) val = detail::gelu(val);
      Matrix<T> z;
      matmul(lc.g, params_[base + kW2], z);
      add_row(z, params_[base + kB2]);
      lc.drop2 = drop ? dropout_mask(L, d, *rng) : Matrix<T>{};
      if (drop) hadamard_in_place(z, lc.drop2);
      add_in_place(x, z);
    }
    const std::size_t fin = final_base();
    layer_norm(x, params_[fin], params_[fin + 1], cache.xhatf, cache.rstdf, cache.f);

    std::vector<T> logits(static_cast<std::size_t>(poi_count_));
    const auto fm = cache.f.row(mask);
    const auto& out_bias = params_[fin + 2];
    for (TokenId k = 0; k < poi_count_; ++k) {
      const auto tok = static_cast<std::size_t>(first_poi_ + k);
      auto e = emb.row(tok);
      T s = out_bias.data[tok];
      for (std::size_t c = 0; c < d; ++c) s += fm[c] * e[c];
      logits[static_cast<std::size_t>(k)] = s;
    }
    return logits;
  }

  /// Accumulates d(loss)/d(params) into `grads` given d(loss)/d(logits).
  void backward(const Cache& cache, std::span<const T> dlogits, std::vector<Matrix<T>>& grads) const {
    const std::size_t L = cache.ids.size(), d = cfg_.d_model, H = cfg_.n_heads, dh = d / H;
    const std::size_t fin = final_base();
    const auto& emb = params_[0];
    auto& d_emb = grads[0];
    auto& d_out_bias = grads[fin + 2];

    Matrix<T> df(L, d);
    const auto fm = cache.f.row(cache.mask);
    for (TokenId k = 0; k < poi_count_; ++k) {
      const T gk = dlogits[static_cast<std::size_t>(k)];
      if (gk == T{}) continue;
      const auto tok = static_cast<std::size_t>(first_poi_ + k);
      auto e = emb.row(tok);
      auto de = d_emb.row(tok);
      for (std::size_t c = 0; c < d; ++c) {
        df(cache.mask, c) += gk * e[c];
        de[c] += gk * fm[c];
      }
      d_out_bias.data[tok] += gk;
    }
    Matrix<T> dx;
    layer_norm_backward(df, cache.xhatf, cache.rstdf, params_[fin], grads[fin], grads[fin + 1], dx);

    const T scale = static_cast<T>(1.0 / std::sqrt(static_cast<double>(dh)));
    for (std::size_t li = cfg_.n_layers; li-- > 0;) {
      const auto& lc = cache.layers[li];
      const std::size_t base = layer_base(li);

      // Feed-forward branch: x_out = x_mid + drop2 * (gelu(b W1 + b1) W2 + b2).
      Matrix<T> dz = dx;
      if (!lc.drop2.empty()) hadamard_in_place(dz, lc.drop2);
      matmul_tn_acc(lc.g, dz, grads[base + kW2]);
      column_sums_acc(dz, grads[base + kB2]);
      Matrix<T> du;
      matmul_nt(dz, params_[base + kW2], du);
      for (std::size_t i = 0; i < du.data.size(); ++i) du.data[i] *= detail::gelu_grad(lc.u.data[i]);
      matmul_tn_acc(lc.b, du, grads[base + kW1]);
      column_sums_acc(du, grads[base + kB1]);
      Matrix<T> db;
      matmul_nt(du, params_[base + kW1], db);
      Matrix<T> dln2;
      layer_norm_backward(db, lc.xhat2, lc.rstd2, params_[base + kLn2Gain], grads[base + kLn2Gain],
                          grads[base + kLn2Bias], dln2);
      add_in_place(dx, dln2);

      // Attention branch: x_mid = x_in + drop1 * (attn(a) Wo + bo).
      Matrix<T> dy = dx;
      if (!lc.drop1.empty()) hadamard_in_place(dy, lc.drop1);
      matmul_tn_acc(lc.o, dy, grads[base + kWo]);
      column_sums_acc(dy, grads[base + kBo]);
      Matrix<T> d_o;
      matmul_nt(dy, params_[base + kWo], d_o);

      Matrix<T> dq(L, d), dk(L, d), dv(L, d);
      std::vector<T> dp(L);
      for (std::size_t h = 0; h < H; ++h) {
        const std::size_t off = h * dh;
        const auto& P = lc.probs[h];
        for (std::size_t i = 0; i < L; ++i) {
          T dot{};
          for (std::size_t j = 0; j < L; ++j) {
            T s{};
            for (std::size_t c = 0; c < dh; ++c) s += d_o(i, off + c) * lc.v(j, off + c);
            dp[j] = s;
            dot += s * P(i, j);
            const T pij = P(i, j);
            for (std::size_t c = 0; c < dh; ++c) dv(j, off + c) += pij * d_o(i, off + c);
          }
          for (std::size_t j = 0; j < L; ++j) {
            const T ds = P(i, j) * (dp[j] - dot) * scale;
            if (ds == T{}) continue;
            for (std::size_t c = 0; c < dh; ++c) {
              dq(i, off + c) += ds * lc.k(j, off + c);
              dk(j, off + c) += ds * lc.q(i, off + c);
            }
          }
        }
      }
      matmul_tn_acc(lc.a, dq, grads[base + kWq]);
      column_sums_acc(dq, grads[base + kBq]);
      matmul_tn_acc(lc.a, dk, grads[base + kWk]);
      column_sums_acc(dk, grads[base + kBk]);
      matmul_tn_acc(lc.a, dv, grads[base + kWv]);
      column_sums_acc(dv, grads[base + kBv]);
      Matrix<T> da;
      matmul_nt(dq, params_[base + kWq], da);
      matmul_nt(dk, params_[base + kWk], da, true);
      matmul_nt(dv, params_[base + kWv], da, true);
      Matrix<T> dln1;
      layer_norm_backward(da, lc.xhat1, lc.rstd1, params_[base + kLn1Gain], grads[base + kLn1Gain],
                          grads[base + kLn1Bias], dln1);
      add_in_place(dx, dln1);
    }

    if (!cache.drop0.empty()) hadamard_in_place(dx, cache.drop0);
    auto& d_pos = grads[1];
    for (std::size_t t = 0; t < L; ++t) {
      auto de = d_emb.row(static_cast<std::size_t>(cache.ids[t]));
      auto dp_row = d_pos.row(t);
      for (std::size_t c = 0; c < d; ++c) {
        de[c] += dx(t, c);
        dp_row[c] += dx(t, c);
      }
    }
  }

  std::vector<Matrix<T>> zero_gradients() const {
    std::vector<Matrix<T>> g;
    g.reserve(params_.size());
    for (const auto& p : params_) g.emplace_back(p.rows, p.cols);
    return g;
  }

 private:
  void add(std::string name, std::size_t rows, std::size_t cols) {
    names_.push_back(std::move(name));
    params_.emplace_back(rows, cols);
  }

  static std::size_t layer_base(std::size_t l) { return 2 + l * kParamsPerLayer; }
  std::size_t final_base() const { return 2 + cfg_.n_layers * kParamsPerLayer; }

  Matrix<T> dropout_mask(std::size_t r, std::size_t c, std::mt19937_64& rng) const {
    Matrix<T> m(r, c);
    const T keep = static_cast<T>(1.0 / (1.0 - cfg_.dropout));
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (auto& v : m.data) v = u(rng) < cfg_.dropout ? T{} : keep;
    return m;
  }

  static void layer_norm(const Matrix<T>& x, const Matrix<T>& gain, const Matrix<T>& bias, Matrix<T>& xhat,
                         std::vector<T>& rstd, Matrix<T>& y) {
    const std::size_t L = x.rows, d = x.cols;
    xhat = Matrix<T>(L, d);
    y = Matrix<T>(L, d);
    rstd.assign(L, T{});
    for (std::size_t i = 0; i < L; ++i) {
      double mu = 0.0;
      for (std::size_t c = 0; c < d; ++c) mu += x(i, c);
      mu /= static_cast<double>(d);
      double var = 0.0;
      for (std::size_t c = 0; c < d; ++c) {
        const double diff = x(i, c) - mu;
        var += diff * diff;
      }
      var /= static_cast<double>(d);
      const T r = static_cast<T>(1.0 / std::sqrt(var + kLayerNormEps));
      rstd[i] = r;
      for (std::size_t c = 0; c < d; ++c) {
        const T xh = static_cast<T>((x(i, c) - mu)) * r;
        xhat(i, c) = xh;
        y(i, c) = gain.data[c] * xh + bias.data[c];
      }
    }
  }

  static void layer_norm_backward(const Matrix<T>& dy, const Matrix<T>& xhat, const std::vector<T>& rstd,
                                  const Matrix<T>& gain, Matrix<T>& dgain, Matrix<T>& dbias, Matrix<T>& dx) {
    const std::size_t L = dy.rows, d = dy.cols;
    dx = Matrix<T>(L, d);
    std::vector<T> dxhat(d);
    for (std::size_t i = 0; i < L; ++i) {
      T mean_dxhat{}, mean_dxhat_xhat{};
      for (std::size_t c = 0; c < d; ++c) {
        const T g = dy(i, c);
        dgain.data[c] += g * xhat(i, c);
        dbias.data[c] += g;
        dxhat[c] = g * gain.data[c];
        mean_dxhat += dxhat[c];
        mean_dxhat_xhat += dxhat[c] * xhat(i, c);
      }
      mean_dxhat /= static_cast<T>(d);
      mean_dxhat_xhat /= static_cast<T>(d);
      for (std::size_t c = 0; c < d; ++c) {
        dx(i, c) = rstd[i] * (dxhat[c] - mean_dxhat - xhat(i, c) * mean_dxhat_xhat);
      }
    }
  }

  ModelConfig cfg_;
  TokenId vocab_size_ = 0;
  TokenId first_poi_ = 0;
  TokenId poi_count_ = 0;
  std::vector<std::string> names_;
  std::vector<Matrix<T>> params_;
};

using Model = Transformer<float>;

/// Scaled-uniform initialisation, deterministic in `seed`: Glorot bounds for
/// weight matrices, +-0.1 for embeddings, unit LayerNorm gains, zero biases.
template <class T = float>
Transformer<T> init_model(const ModelConfig& cfg, const Vocabulary& vocab, std::uint64_t seed) {
  Transformer<T> model(cfg, vocab.size(), vocab.first_poi_token(), vocab.poi_count());
  std::mt19937_64 rng(seed);
  const auto& names = model.parameter_names();
  auto& params = model.parameters();
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& name = names[i];
    auto& p = params[i];
    auto ends_with = [&](std::string_view s) { return name.size() >= s.size() && name.ends_with(s); };
    if (ends_with("gain")) {
      std::fill(p.data.begin(), p.data.end(), T{1});
    } else if (p.rows == 1) {
      // biases stay zero
    } else {
      const double bound =
          (name == "tok_emb" || name == "pos_emb") ? 0.1 : std::sqrt(6.0 / static_cast<double>(p.rows + p.cols));
      std::uniform_real_distribution<double> u(-bound, bound);
      for (auto& v : p.data) v = static_cast<T>(u(rng));
    }
  }
  return model;
}

/// Softmax of `logits` computed in double precision.
template <class T>
std::vector<double> softmax(std::span<const T> logits) {
  std::vector<double> p(logits.size());
  double mx = -1e300;
  for (auto v : logits) mx = std::max(mx, static_cast<double>(v));
  double z = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) z += (p[i] = std::exp(static_cast<double>(logits[i]) - mx));
  for (auto& v : p) v /= z;
  return p;
}

/// Distribution over POI tokens for a query holding exactly one [MASK].
template <class T>
PoiDistribution mlm_predict(const Transformer<T>& model, std::span<const TokenId> query) {
  const auto masks = std::count(query.begin(), query.end(), kMaskId);
  detail::require(masks == 1, "query must contain exactly one [MASK], found " + std::to_string(masks));
  const auto mask = static_cast<std::size_t>(std::find(query.begin(), query.end(), kMaskId) - query.begin());
  model.validate_input(query, mask);
  typename Transformer<T>::Cache cache;
  const auto logits = model.forward(query, mask, cache);
  return {model.first_poi(), softmax<T>(logits)};
}

template <class T>
PoiDistribution mlm_predict(const Transformer<T>& model, const std::vector<TokenId>& query) {
  return mlm_predict(model, std::span<const TokenId>(query));
}

/// Mean masked cross-entropy over `samples` and its gradient (no dropout).
template <class T>
double loss_and_gradients(const Transformer<T>& model, std::span<const TrainingSample> samples,
                          std::vector<Matrix<T>>& grads) {
  grads = model.zero_gradients();
  if (samples.empty()) return 0.0;
  const T inv_n = static_cast<T>(1.0 / static_cast<double>(samples.size()));
  double total = 0.0;
  typename Transformer<T>::Cache cache;
  for (const auto& s : samples) {
    model.validate_input(s.input_ids, s.mask_position);
    const auto logits = model.forward(s.input_ids, s.mask_position, cache);
    auto p = softmax<T>(logits);
    const auto label = static_cast<std::size_t>(s.label_id - model.first_poi());
    total -= std::log(std::max(p[label], 1e-300));
    std::vector<T> dlogits(p.size());
    for (std::size_t k = 0; k < p.size(); ++k) dlogits[k] = static_cast<T>(p[k] - (k == label ? 1.0 : 0.0)) * inv_n;
    model.backward(cache, dlogits, grads);
  }
  return total / static_cast<double>(samples.size());
}

/// Adam optimiser state plus the epoch counter, so training can resume.
template <class T>
class Trainer {
 public:
  static constexpr double kBeta1 = 0.9;
  static constexpr double kBeta2 = 0.999;
  static constexpr double kEps = 1e-8;

  explicit Trainer(Transformer<T>& model) : model_(&model) {
    m_ = model.zero_gradients();
    v_ = model.zero_gradients();
  }

  std::size_t epochs_completed() const { return epochs_; }

  /// One pass over `samples` in a (seed, epoch)-determined order. Returns the
  /// mean training loss of the pass.
  double run_epoch(std::span<const TrainingSample> samples) {
    detail::require(!samples.empty(), "cannot train on an empty corpus");
    const auto& cfg = model_->config();
    for (const auto& s : samples) {
      model_->validate_input(s.input_ids, s.mask_position);
      detail::require(s.label_id >= model_->first_poi() && s.label_id < model_->first_poi() + model_->poi_count(),
                      "training label is not a POI token");
    }
    std::vector<std::size_t> order(samples.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 shuffle_rng(detail::mix_seed(cfg.seed, epochs_, 0x5eed));
    std::shuffle(order.begin(), order.end(), shuffle_rng);

    auto grads = model_->zero_gradients();
    typename Transformer<T>::Cache cache;
    double total = 0.0;
    std::size_t batch_index = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size, ++batch_index) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      const T inv_b = static_cast<T>(1.0 / static_cast<double>(end - start));
      for (auto& g : grads) g.zero();
      std::mt19937_64 drop_rng(detail::mix_seed(cfg.seed, epochs_, batch_index + 1));
      for (std::size_t i = start; i < end; ++i) {
        const auto& s = samples[order[i]];
        const auto logits = model_->forward(s.input_ids, s.mask_position, cache, &drop_rng);
        const auto p = softmax<T>(logits);
        const auto label = static_cast<std::size_t>(s.label_id - model_->first_poi());
        total -= std::log(std::max(p[label], 1e-300));
        std::vector<T> dlogits(p.size());
        for (std::size_t k = 0; k < p.size(); ++k) {
          dlogits[k] = static_cast<T>(p[k] - (k == label ? 1.0 : 0.0)) * inv_b;
        }
        model_->backward(cache, dlogits, grads);
      }
      step(grads);
    }
    ++epochs_;
    return total / static_cast<double>(samples.size());
  }

  std::vector<double> run(std::span<const TrainingSample> samples, std::size_t epochs) {
    detail::require(epochs >= 1, "epochs must be at least 1");
    std::vector<double> history;
    history.reserve(epochs);
    for (std::size_t e = 0; e < epochs; ++e) history.push_back(run_epoch(samples));
    return history;
  }

 private:
  void step(const std::vector<Matrix<T>>& grads) {
    ++t_;
    const double lr = model_->config().learning_rate;
    const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(t_));
    auto& params = model_->parameters();
    for (std::size_t i = 0; i < params.size(); ++i) {
      auto& p = params[i].data;
      auto& m = m_[i].data;
      auto& v = v_[i].data;
      const auto& g = grads[i].data;
      for (std::size_t k = 0; k < p.size(); ++k) {
        const double gk = g[k];
        const double mk = kBeta1 * m[k] + (1.0 - kBeta1) * gk;
        const double vk = kBeta2 * v[k] + (1.0 - kBeta2) * gk * gk;
        m[k] = static_cast<T>(mk);
        v[k] = static_cast<T>(vk);
        p[k] -= static_cast<T>(lr * (mk / c1) / (std::sqrt(vk / c2) + kEps));
      }
    }
  }

  Transformer<T>* model_;
  std::vector<Matrix<T>> m_, v_;
  std::size_t t_ = 0;
  std::size_t epochs_ = 0;
};

/// Trains `model` in place for `epochs` passes; returns per-epoch mean loss.
template <class T>
std::vector<double> train(Transformer<T>& model, std::span<const TrainingSample> samples, std::size_t epochs) {
  detail::require(epochs >= 1, "epochs must be at least 1");
  detail::require(!samples.empty(), "cannot train on an empty corpus");
  Trainer<T> trainer(model);
  return trainer.run(samples, epochs);
}

}  // namespace tourmlm

#endif
