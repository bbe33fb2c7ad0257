// SPDX-License-Identifier: Apache-2.0

#include "covert/nnet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "covert/dataset.hpp"

namespace covert {

std::string_view to_string(Label label) {
  return label == Label::kSignal ? "signal" : "noise";
}

Label argmax(const Probabilities& p) {
  return p[1] > p[0] ? Label::kNoise : Label::kSignal;
}

void validate(const Architecture& arch) {
  if (arch.filters == 0) throw std::invalid_argument("architecture: filters must be >= 1");
  if (arch.hidden == 0) throw std::invalid_argument("architecture: hidden must be >= 1");
  if (!(arch.dropout_rate >= 0.0 && arch.dropout_rate < 1.0)) {
    throw std::invalid_argument("architecture: dropout rate must be in [0, 1)");
  }
}

double cross_entropy(const Probabilities& p, Label target) {
  const double q = std::clamp(p[static_cast<std::size_t>(target)], kProbabilityClamp, 1.0 - kProbabilityClamp);
  return -std::log(q);
}

namespace {

constexpr std::size_t kRowLength = kConvOutputWidth;

double log_sum_exp(const std::array<double, kNumClasses>& z) {
  const double m = std::max(z[0], z[1]);
  return m + std::log(std::exp(z[0] - m) + std::exp(z[1] - m));
}

Probabilities softmax(const std::array<double, kNumClasses>& z) {
  const double lse = log_sum_exp(z);
  return {std::exp(z[0] - lse), std::exp(z[1] - lse)};
}

void require_finite(const IqBlock& x) {
  if (!all_finite(x)) throw std::invalid_argument("classifier input contains non-finite samples");
}

}  // namespace

struct Classifier::Activations {
  std::vector<double> conv;    // pre-activation, F*28
  std::vector<double> hidden;  // pre-activation, H
  std::vector<double> mask;    // dropout scale per hidden unit (0 or 1/(1-p))
  std::vector<double> hidden_out;
  std::array<double, kNumClasses> logits{};
};

Classifier::Classifier(Architecture arch) : arch_(arch) {
  validate(arch_);
  conv_w_ = 0;
  conv_b_ = conv_w_ + arch_.filters * kKernelWidth;
  hidden_w_ = conv_b_ + arch_.filters;
  hidden_b_ = hidden_w_ + arch_.hidden * feature_count();
  out_w_ = hidden_b_ + arch_.hidden;
  out_b_ = out_w_ + kNumClasses * arch_.hidden;
  params_.assign(out_b_ + kNumClasses, 0.0);
}

Classifier Classifier::initialized(Architecture arch, std::uint64_t seed) {
  Classifier model(arch);
  Rng rng = make_rng(seed);
  auto fill = [&rng](std::span<double> w, double fan_in, double fan_out) {
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (auto& v : w) v = dist(rng);
  };
  const auto f = static_cast<double>(arch.filters);
  const auto h = static_cast<double>(arch.hidden);
  fill(model.conv_weights(), kKernelWidth, kKernelWidth * f);
  fill(model.hidden_weights(), static_cast<double>(model.feature_count()), h);
  fill(model.output_weights(), h, kNumClasses);
  return model;
}

void Classifier::run_forward(const IqTensor& x, bool training, Rng* rng, Activations& act) const {
  const std::size_t F = arch_.filters;
  const std::size_t H = arch_.hidden;
  const std::size_t D = feature_count();
  const double* cw = params_.data() + conv_w_;
  const double* cb = params_.data() + conv_b_;
  const double* hw = params_.data() + hidden_w_;
  const double* hb = params_.data() + hidden_b_;
  const double* ow = params_.data() + out_w_;
  const double* ob = params_.data() + out_b_;

  act.conv.resize(D);
  for (std::size_t f = 0; f < F; ++f) {
    for (std::size_t row = 0; row < 2; ++row) {
      const double* in = x.data() + row * kBlockLength;
      double* out = act.conv.data() + f * 2 * kRowLength + row * kRowLength;
      for (std::size_t j = 0; j < kRowLength; ++j) {
        double s = cb[f];
        for (std::size_t k = 0; k < kKernelWidth; ++k) s += cw[f * kKernelWidth + k] * in[j + k];
        out[j] = s;
      }
    }
  }

  std::vector<double> features(D);
  for (std::size_t i = 0; i < D; ++i) features[i] = std::max(act.conv[i], 0.0);

  act.hidden.resize(H);
  act.hidden_out.resize(H);
  act.mask.assign(H, 1.0);
  if (training && arch_.dropout_rate > 0.0) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double keep_scale = 1.0 / (1.0 - arch_.dropout_rate);
    for (auto& m : act.mask) m = u(*rng) < arch_.dropout_rate ? 0.0 : keep_scale;
  }
  for (std::size_t h = 0; h < H; ++h) {
    const double* w = hw + h * D;
    double s = hb[h];
    for (std::size_t i = 0; i < D; ++i) s += w[i] * features[i];
    act.hidden[h] = s;
    act.hidden_out[h] = std::max(s, 0.0) * act.mask[h];
  }

  for (std::size_t c = 0; c < kNumClasses; ++c) {
    double s = ob[c];
    for (std::size_t h = 0; h < H; ++h) s += ow[c * H + h] * act.hidden_out[h];
    act.logits[c] = s;
  }
}

void Classifier::run_backward(const IqTensor& x, const Activations& act, Label target,
                              std::span<double>* param_grad, IqTensor* input_grad) const {
  const std::size_t F = arch_.filters;
  const std::size_t H = arch_.hidden;
  const std::size_t D = feature_count();
  const double* cw = params_.data() + conv_w_;
  const double* hw = params_.data() + hidden_w_;
  const double* ow = params_.data() + out_w_;

  // d loss / d logits = softmax - onehot
  const Probabilities p = softmax(act.logits);
  std::array<double, kNumClasses> g_out{p[0], p[1]};
  g_out[static_cast<std::size_t>(target)] -= 1.0;

  std::vector<double> g_hidden(H);
  for (std::size_t h = 0; h < H; ++h) {
    double s = 0.0;
    for (std::size_t c = 0; c < kNumClasses; ++c) s += ow[c * H + h] * g_out[c];
    g_hidden[h] = act.hidden[h] > 0.0 ? s * act.mask[h] : 0.0;
  }

  std::vector<double> g_features(D, 0.0);
  for (std::size_t h = 0; h < H; ++h) {
    if (g_hidden[h] == 0.0) continue;
    const double* w = hw + h * D;
    for (std::size_t i = 0; i < D; ++i) g_features[i] += w[i] * g_hidden[h];
  }
  for (std::size_t i = 0; i < D; ++i) {
    if (act.conv[i] <= 0.0) g_features[i] = 0.0;
  }

  if (param_grad != nullptr) {
    double* g = param_grad->data();
    for (std::size_t c = 0; c < kNumClasses; ++c) {
      for (std::size_t h = 0; h < H; ++h) g[out_w_ + c * H + h] += g_out[c] * act.hidden_out[h];
      g[out_b_ + c] += g_out[c];
    }
    for (std::size_t h = 0; h < H; ++h) {
      if (g_hidden[h] == 0.0) continue;
      double* gw = g + hidden_w_ + h * D;
      for (std::size_t i = 0; i < D; ++i) gw[i] += g_hidden[h] * std::max(act.conv[i], 0.0);
      g[hidden_b_ + h] += g_hidden[h];
    }
    for (std::size_t f = 0; f < F; ++f) {
      for (std::size_t row = 0; row < 2; ++row) {
        const double* in = x.data() + row * kBlockLength;
        const double* gf = g_features.data() + f * 2 * kRowLength + row * kRowLength;
        for (std::size_t j = 0; j < kRowLength; ++j) {
          for (std::size_t k = 0; k < kKernelWidth; ++k) g[conv_w_ + f * kKernelWidth + k] += gf[j] * in[j + k];
          g[conv_b_ + f] += gf[j];
        }
      }
    }
  }

  if (input_grad != nullptr) {
    input_grad->fill(0.0);
    for (std::size_t f = 0; f < F; ++f) {
      for (std::size_t row = 0; row < 2; ++row) {
        double* gin = input_grad->data() + row * kBlockLength;
        const double* gf = g_features.data() + f * 2 * kRowLength + row * kRowLength;
        for (std::size_t j = 0; j < kRowLength; ++j) {
          for (std::size_t k = 0; k < kKernelWidth; ++k) gin[j + k] += gf[j] * cw[f * kKernelWidth + k];
        }
      }
    }
  }
}

std::array<double, kNumClasses> Classifier::logits(const IqBlock& x) const {
  require_finite(x);
  Activations act;
  run_forward(to_tensor(x), false, nullptr, act);
  return act.logits;
}

Probabilities Classifier::forward(const IqBlock& x) const {
  return softmax(logits(x));
}

Probabilities Classifier::forward(const IqBlock& x, bool training, Rng& rng) const {
  require_finite(x);
  Activations act;
  run_forward(to_tensor(x), training, &rng, act);
  return softmax(act.logits);
}

double Classifier::loss(const IqBlock& x, Label target) const {
  const auto z = logits(x);
  return log_sum_exp(z) - z[static_cast<std::size_t>(target)];
}

IqTensor Classifier::input_gradient(const IqBlock& x, Label target) const {
  require_finite(x);
  const IqTensor t = to_tensor(x);
  Activations act;
  run_forward(t, false, nullptr, act);
  IqTensor grad{};
  run_backward(t, act, target, nullptr, &grad);
  return grad;
}

double Classifier::accumulate_gradient(const IqBlock& x, Label target, bool training, Rng& rng,
                                       std::span<double> grad) const {
  if (grad.size() != params_.size()) throw std::invalid_argument("gradient buffer has the wrong size");
  require_finite(x);
  const IqTensor t = to_tensor(x);
  Activations act;
  run_forward(t, training, &rng, act);
  run_backward(t, act, target, &grad, nullptr);
  return log_sum_exp(act.logits) - act.logits[static_cast<std::size_t>(target)];
}

// --- training ---

void validate(const TrainConfig& cfg) {
  if (cfg.epochs < 1) throw std::invalid_argument("train: epochs must be >= 1");
  if (cfg.batch_size < 1) throw std::invalid_argument("train: batch size must be >= 1");
  if (!(cfg.learning_rate > 0.0)) throw std::invalid_argument("train: learning rate must be positive");
  if (!(cfg.beta1 >= 0.0 && cfg.beta1 < 1.0 && cfg.beta2 >= 0.0 && cfg.beta2 < 1.0)) {
    throw std::invalid_argument("train: Adam betas must be in [0, 1)");
  }
  if (!(cfg.epsilon > 0.0)) throw std::invalid_argument("train: Adam epsilon must be positive");
}

AdamOptimizer::AdamOptimizer(std::size_t n, const TrainConfig& cfg)
    : lr_(cfg.learning_rate), beta1_(cfg.beta1), beta2_(cfg.beta2), eps_(cfg.epsilon), m_(n, 0.0), v_(n, 0.0) {}

void AdamOptimizer::step(std::span<double> params, std::span<const double> grad) {
  if (params.size() != m_.size() || grad.size() != m_.size()) {
    throw std::invalid_argument("adam: size mismatch");
  }
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grad[i];
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grad[i] * grad[i];
    const double m_hat = m_[i] / c1;
    const double v_hat = v_[i] / c2;
    params[i] -= lr_ * m_hat / (std::sqrt(v_hat) + eps_);
  }
}

namespace {

struct SplitStats {
  double loss = 0.0;
  double accuracy = 0.0;
};

SplitStats measure(const Classifier& model, std::span<const IqBlock> blocks, std::span<const Label> labels) {
  SplitStats s;
  if (blocks.empty()) {
    s.loss = s.accuracy = std::numeric_limits<double>::quiet_NaN();
    return s;
  }
  std::size_t correct = 0;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const auto z = model.logits(blocks[i]);
    s.loss += log_sum_exp(z) - z[static_cast<std::size_t>(labels[i])];
    correct += (argmax(softmax(z)) == labels[i]);
  }
  s.loss /= static_cast<double>(blocks.size());
  s.accuracy = static_cast<double>(correct) / static_cast<double>(blocks.size());
  return s;
}

}  // namespace

TrainResult train(Classifier model, const LabeledDataset& data, const TrainConfig& cfg) {
  validate(cfg);
  validate(data);
  const auto train_blocks = data.train_blocks();
  const auto train_labels = data.train_labels();
  if (train_blocks.empty()) throw std::invalid_argument("train: empty training split");

  Rng shuffle_rng = make_stream(cfg.seed, 1);
  Rng dropout_rng = make_stream(cfg.seed, 2);

  TrainResult result{model, measure(model, train_blocks, train_labels).loss, {}};
  Classifier& m = result.model;
  AdamOptimizer adam(m.parameter_count(), cfg);
  std::vector<double> grad(m.parameter_count());
  std::vector<std::size_t> order(train_blocks.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(start + cfg.batch_size, order.size());
      std::fill(grad.begin(), grad.end(), 0.0);
      double batch_loss = 0.0;
      for (std::size_t i = start; i < end; ++i) {
        batch_loss += m.accumulate_gradient(train_blocks[order[i]], train_labels[order[i]], true, dropout_rng, grad);
      }
      if (!std::isfinite(batch_loss)) {
        throw TrainingDivergedError("training diverged: non-finite loss in epoch " + std::to_string(epoch + 1) +
                                    " at example " + std::to_string(start));
      }
      const double inv = 1.0 / static_cast<double>(end - start);
      for (auto& g : grad) g *= inv;
      adam.step(m.parameters(), grad);
    }

    const SplitStats tr = measure(m, train_blocks, train_labels);
    if (!std::isfinite(tr.loss)) {
      throw TrainingDivergedError("training diverged: non-finite loss after epoch " + std::to_string(epoch + 1));
    }
    const SplitStats va = measure(m, data.validation_blocks(), data.validation_labels());
    result.history.push_back({epoch + 1, tr.loss, tr.accuracy, va.accuracy});
  }
  return result;
}

}  // namespace covert
