#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "potion/category.hpp"
#include "potion/corpus.hpp"
#include "potion/error.hpp"
#include "potion/featurizer.hpp"
#include "potion/rng.hpp"
#include "potion/tokenizer.hpp"

namespace potion {

// Dense row-major matrix.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

  friend bool operator==(const Matrix&, const Matrix&) = default;
};

struct TrainConfig {
  double learning_rate = 0.05;
  std::size_t epochs = 200;
  std::size_t batch_size = 8;
  double l2 = 1e-4;
  std::uint64_t seed = 0;
  std::size_t hidden_size = 32;

  void validate() const {
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate))
      throw InvalidConfig("learning_rate must be positive");
    if (batch_size < 1) throw InvalidConfig("batch_size must be positive");
    if (!(l2 >= 0.0) || !std::isfinite(l2)) throw InvalidConfig("l2 must be non-negative");
  }

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

// Trainable tensors. With hidden size 0 the model is plain softmax
// regression: w1/b1 are empty and w2 maps features straight to logits.
struct Weights {
  Matrix w1;               // [H x F]
  std::vector<double> b1;  // [H]
  Matrix w2;               // [11 x H] or [11 x F]
  std::vector<double> b2;  // [11]

  static Weights zeros(std::size_t features, std::size_t hidden) {
    Weights w;
    w.w1 = Matrix(hidden, hidden ? features : 0);
    w.b1.assign(hidden, 0.0);
    w.w2 = Matrix(kNumCategories, hidden ? hidden : features);
    w.b2.assign(kNumCategories, 0.0);
    return w;
  }

  std::size_t hidden() const { return w1.rows; }
  std::size_t features() const { return hidden() ? w1.cols : w2.cols; }

  void check_shapes() const {
    const std::size_t h = hidden();
    if (b1.size() != h) throw ShapeMismatch("b1 length does not match hidden size");
    if (h == 0 && w1.cols != 0) throw ShapeMismatch("w1 has columns but no rows");
    if (w2.rows != kNumCategories) throw ShapeMismatch("w2 must have 11 rows");
    if (h && w2.cols != h) throw ShapeMismatch("w2 columns do not match hidden size");
    if (b2.size() != kNumCategories) throw ShapeMismatch("b2 must have 11 entries");
    if (w1.data.size() != w1.rows * w1.cols || w2.data.size() != w2.rows * w2.cols)
      throw ShapeMismatch("matrix storage does not match its shape");
  }

  bool all_finite() const {
    auto finite = [](const std::vector<double>& v) {
      return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
    };
    return finite(w1.data) && finite(b1) && finite(w2.data) && finite(b2);
  }

  friend bool operator==(const Weights&, const Weights&) = default;
};

struct ModelMeta {
  static constexpr std::uint32_t kVersion = 1;

  TokenizerConfig tokenizer;
  Featurizer featurizer;
  TrainConfig train;
  std::vector<std::string> categories;
  std::string rng = std::string(Rng::kName);
  double final_loss = 0.0;

  friend bool operator==(const ModelMeta&, const ModelMeta&) = default;
};

struct ModelParams {
  Weights weights;
  ModelMeta meta;

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

struct Prediction {
  std::array<double, kNumCategories> probs{};
  CategoryId top_index = 0;
  double top_prob = 0.0;

  friend bool operator==(const Prediction&, const Prediction&) = default;
};

struct Example {
  std::vector<double> x;
  CategoryId label = 0;
};

inline std::array<double, kNumCategories> softmax(const std::array<double, kNumCategories>& logits) {
  const double mx = *std::max_element(logits.begin(), logits.end());
  std::array<double, kNumCategories> p{};
  double sum = 0.0;
  for (std::size_t c = 0; c < kNumCategories; ++c) {
    p[c] = std::exp(logits[c] - mx);
    sum += p[c];
  }
  for (double& v : p) v /= sum;
  return p;
}

// Lowest index wins ties.
inline Prediction make_prediction(const std::array<double, kNumCategories>& probs) {
  Prediction pred;
  pred.probs = probs;
  for (std::size_t c = 1; c < kNumCategories; ++c)
    if (probs[c] > probs[pred.top_index]) pred.top_index = c;
  pred.top_prob = probs[pred.top_index];
  return pred;
}

namespace detail {

struct Activations {
  std::vector<double> pre_hidden;  // W1 x + b1
  std::vector<double> hidden;      // relu(pre_hidden), or x itself when H = 0
  std::array<double, kNumCategories> logits{};
};

inline Activations run_forward(std::span<const double> x, const Weights& w) {
  if (x.size() != w.features())
    throw ShapeMismatch("feature vector has " + std::to_string(x.size()) + " entries, model expects " +
                        std::to_string(w.features()));
  Activations a;
  const std::size_t h = w.hidden();
  if (h) {
    a.pre_hidden = w.b1;
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (x[j] == 0.0) continue;
      for (std::size_t r = 0; r < h; ++r) a.pre_hidden[r] += w.w1(r, j) * x[j];
    }
    a.hidden.resize(h);
    for (std::size_t r = 0; r < h; ++r) a.hidden[r] = a.pre_hidden[r] > 0.0 ? a.pre_hidden[r] : 0.0;
  } else {
    a.hidden.assign(x.begin(), x.end());
  }
  for (std::size_t c = 0; c < kNumCategories; ++c) {
    double z = w.b2[c];
    for (std::size_t j = 0; j < a.hidden.size(); ++j)
      if (a.hidden[j] != 0.0) z += w.w2(c, j) * a.hidden[j];
    a.logits[c] = z;
  }
  return a;
}

inline double squared_norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

}  // namespace detail

inline Prediction forward(std::span<const double> x, const Weights& w) {
  w.check_shapes();
  return make_prediction(softmax(detail::run_forward(x, w).logits));
}

struct LossGrad {
  double loss = 0.0;
  Weights grads;
};

// Mean cross-entropy over the batch plus (l2/2)(|W1|^2 + |W2|^2); biases
// are not penalized. Gradients are exact.
namespace detail {

inline LossGrad loss_and_grad(std::span<const Example* const> batch, const Weights& w, double l2) {
  if (batch.empty()) throw DegenerateDataset();
  w.check_shapes();
  const std::size_t h = w.hidden();
  LossGrad out;
  out.grads = Weights::zeros(w.features(), h);
  Weights& g = out.grads;
  const double inv_n = 1.0 / static_cast<double>(batch.size());

  double data_loss = 0.0;
  for (const Example* exp : batch) {
    const Example& ex = *exp;
    if (ex.label >= kNumCategories) throw ShapeMismatch("label out of range");
    const detail::Activations a = detail::run_forward(ex.x, w);
    const auto p = softmax(a.logits);
    data_loss -= std::log(std::max(p[ex.label], 1e-300));

    std::array<double, kNumCategories> dlogits{};
    for (std::size_t c = 0; c < kNumCategories; ++c)
      dlogits[c] = (p[c] - (c == ex.label ? 1.0 : 0.0)) * inv_n;

    for (std::size_t c = 0; c < kNumCategories; ++c) {
      g.b2[c] += dlogits[c];
      for (std::size_t j = 0; j < a.hidden.size(); ++j)
        if (a.hidden[j] != 0.0) g.w2(c, j) += dlogits[c] * a.hidden[j];
    }
    if (!h) continue;

    std::vector<double> dpre(h, 0.0);
    for (std::size_t r = 0; r < h; ++r) {
      if (a.pre_hidden[r] <= 0.0) continue;
      double s = 0.0;
      for (std::size_t c = 0; c < kNumCategories; ++c) s += w.w2(c, r) * dlogits[c];
      dpre[r] = s;
    }
    for (std::size_t r = 0; r < h; ++r) g.b1[r] += dpre[r];
    for (std::size_t j = 0; j < ex.x.size(); ++j) {
      if (ex.x[j] == 0.0) continue;
      for (std::size_t r = 0; r < h; ++r) g.w1(r, j) += dpre[r] * ex.x[j];
    }
  }

  if (l2 > 0.0) {
    for (std::size_t i = 0; i < g.w1.data.size(); ++i) g.w1.data[i] += l2 * w.w1.data[i];
    for (std::size_t i = 0; i < g.w2.data.size(); ++i) g.w2.data[i] += l2 * w.w2.data[i];
  }
  out.loss = data_loss * inv_n +
             0.5 * l2 * (detail::squared_norm(w.w1.data) + detail::squared_norm(w.w2.data));
  return out;
}

}  // namespace detail

inline LossGrad loss_and_grad(std::span<const Example> batch, const Weights& w, double l2) {
  std::vector<const Example*> ptrs;
  ptrs.reserve(batch.size());
  for (const Example& ex : batch) ptrs.push_back(&ex);
  return detail::loss_and_grad(ptrs, w, l2);
}

inline std::vector<double> features_of(const std::string& text, const TokenizerConfig& tok,
                                       const Featurizer& f) {
  return featurize(tokenize(text, tok), f);
}

// Uniform +-1/sqrt(fan_in) weights and zero biases, drawn W1 then W2 in
// row-major order.
inline Weights init_weights(std::size_t features, std::size_t hidden, Rng& rng) {
  Weights w = Weights::zeros(features, hidden);
  auto fill = [&](Matrix& m) {
    const double bound = m.cols ? 1.0 / std::sqrt(static_cast<double>(m.cols)) : 0.0;
    for (double& v : m.data) v = (2.0 * rng.uniform01() - 1.0) * bound;
  };
  fill(w.w1);
  fill(w.w2);
  return w;
}

using EpochCallback = std::function<void(std::size_t epoch, double full_loss)>;

// Mini-batch SGD over precomputed features. The same generator drives
// initialization and the per-epoch shuffles, so the result is a pure
// function of (examples, cfg).
inline Weights train_weights(std::span<const Example> examples, std::size_t features,
                             const TrainConfig& cfg, double* final_loss = nullptr,
                             const EpochCallback& on_epoch = {}) {
  cfg.validate();
  if (examples.empty()) throw DegenerateDataset();
  Rng rng(cfg.seed);
  Weights w = init_weights(features, cfg.hidden_size, rng);

  std::vector<std::size_t> order(examples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<const Example*> batch;
  batch.reserve(cfg.batch_size);
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t stop = std::min(order.size(), start + cfg.batch_size);
      batch.clear();
      for (std::size_t i = start; i < stop; ++i) batch.push_back(&examples[order[i]]);
      const LossGrad lg = detail::loss_and_grad(batch, w, cfg.l2);
      auto step = [&](std::vector<double>& p, const std::vector<double>& gp) {
        for (std::size_t i = 0; i < p.size(); ++i) p[i] -= cfg.learning_rate * gp[i];
      };
      step(w.w1.data, lg.grads.w1.data);
      step(w.b1, lg.grads.b1);
      step(w.w2.data, lg.grads.w2.data);
      step(w.b2, lg.grads.b2);
    }
    if (on_epoch) on_epoch(epoch, loss_and_grad(examples, w, cfg.l2).loss);
  }
  if (!w.all_finite()) throw DomainError("training diverged to non-finite parameters");
  if (final_loss) *final_loss = loss_and_grad(examples, w, cfg.l2).loss;
  return w;
}

inline std::vector<Example> make_examples(const Dataset& dataset, const TokenizerConfig& tok,
                                          const Featurizer& f) {
  std::vector<Example> examples;
  examples.reserve(dataset.size());
  for (const auto& r : dataset.recipes) {
    if (!r.label) throw InvalidConfig("training recipe '" + r.id + "' has no label");
    examples.push_back({features_of(r.raw_text, tok, f), *r.label});
  }
  return examples;
}

inline ModelParams train(const Dataset& dataset, const Featurizer& f, const TrainConfig& cfg,
                         const TokenizerConfig& tok = {}, const EpochCallback& on_epoch = {}) {
  if (dataset.empty()) throw DegenerateDataset();
  f.validate();
  tok.validate();
  cfg.validate();
  ModelParams m;
  m.meta.tokenizer = tok;
  m.meta.featurizer = f;
  m.meta.train = cfg;
  for (const auto& c : kCategories) m.meta.categories.emplace_back(c.name);
  const auto examples = make_examples(dataset, tok, f);
  m.weights = train_weights(examples, f.width(), cfg, &m.meta.final_loss, on_epoch);
  return m;
}

inline Prediction predict(const ModelParams& model, const Recipe& recipe) {
  return forward(features_of(recipe.raw_text, model.meta.tokenizer, model.meta.featurizer),
                 model.weights);
}

// Fraction of held-out recipes whose top category equals their label.
inline double evaluate_holdout(const ModelParams& model, const Dataset& held) {
  if (held.empty()) throw DegenerateDataset();
  std::size_t correct = 0;
  for (const auto& r : held.recipes)
    if (r.label && predict(model, r).top_index == *r.label) ++correct;
  return static_cast<double>(correct) / static_cast<double>(held.size());
}

}  // namespace potion
