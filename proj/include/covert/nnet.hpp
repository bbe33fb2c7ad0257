// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "covert/iq_block.hpp"
#include "covert/rng.hpp"

namespace covert {

/// Class indices of the eavesdropper's detector.
enum class Label : int { kSignal = 0, kNoise = 1 };

inline constexpr std::size_t kNumClasses = 2;

std::string_view to_string(Label label);

/// Softmax output, indexed by Label.
using Probabilities = std::array<double, kNumClasses>;

/// Index of the larger probability; ties go to kSignal.
Label argmax(const Probabilities& p);

inline constexpr std::size_t kKernelWidth = 3;
inline constexpr std::size_t kConvOutputWidth = kBlockLength - kKernelWidth + 1;

struct Architecture {
  std::size_t filters = 16;
  std::size_t hidden = 64;
  double dropout_rate = 0.1;  ///< applied to the hidden layer during training

  bool operator==(const Architecture&) const = default;
};

void validate(const Architecture& arch);

/// Probability clamp used by cross_entropy().
inline constexpr double kProbabilityClamp = 1e-12;

/// -log p[target] with p clamped to [1e-12, 1 - 1e-12].
double cross_entropy(const Probabilities& p, Label target);

class TrainingDivergedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Eavesdropper CNN: the 2x16 I/Q array is treated as a one-channel image.
///
///   conv   F filters of 1x3, valid padding, stride 1 -> F x 2 x 14, ReLU
///   dense  H units, ReLU, dropout (training only)
///   dense  2 units, softmax
///
/// Parameters live in one flat vector in the order conv weights [F][3],
/// conv bias [F], hidden weights [H][F*28], hidden bias [H], output weights
/// [2][H], output bias [2]. The flattened conv feature index is
/// f*28 + row*14 + column. This is also the on-disk order.
class Classifier {
 public:
  /// All-zero weights.
  explicit Classifier(Architecture arch = {});

  /// Glorot-uniform weights, zero biases, deterministic in seed.
  static Classifier initialized(Architecture arch, std::uint64_t seed);

  const Architecture& architecture() const { return arch_; }
  std::size_t feature_count() const { return arch_.filters * 2 * kConvOutputWidth; }
  std::size_t parameter_count() const { return params_.size(); }

  std::span<double> parameters() { return params_; }
  std::span<const double> parameters() const { return params_; }

  std::span<double> conv_weights() { return slice(conv_w_, arch_.filters * kKernelWidth); }
  std::span<double> conv_bias() { return slice(conv_b_, arch_.filters); }
  std::span<double> hidden_weights() { return slice(hidden_w_, arch_.hidden * feature_count()); }
  std::span<double> hidden_bias() { return slice(hidden_b_, arch_.hidden); }
  std::span<double> output_weights() { return slice(out_w_, kNumClasses * arch_.hidden); }
  std::span<double> output_bias() { return slice(out_b_, kNumClasses); }

  std::span<const double> conv_weights() const { return slice(conv_w_, arch_.filters * kKernelWidth); }
  std::span<const double> conv_bias() const { return slice(conv_b_, arch_.filters); }
  std::span<const double> hidden_weights() const { return slice(hidden_w_, arch_.hidden * feature_count()); }
  std::span<const double> hidden_bias() const { return slice(hidden_b_, arch_.hidden); }
  std::span<const double> output_weights() const { return slice(out_w_, kNumClasses * arch_.hidden); }
  std::span<const double> output_bias() const { return slice(out_b_, kNumClasses); }

  /// Inference (dropout off). Throws std::invalid_argument for non-finite input.
  Probabilities forward(const IqBlock& x) const;
  Probabilities forward(const IqBlock& x, bool training, Rng& rng) const;

  std::array<double, kNumClasses> logits(const IqBlock& x) const;

  Label classify(const IqBlock& x) const { return argmax(forward(x)); }

  /// Cross-entropy of the inference output against a one-hot target,
  /// evaluated as logsumexp(z) - z[target] so it stays finite and
  /// differentiable for saturated outputs.
  double loss(const IqBlock& x, Label target) const;

  /// d loss(x, target) / d x as a 2x16 array (I row, Q row), dropout off.
  IqTensor input_gradient(const IqBlock& x, Label target) const;

  /// Adds d loss / d parameters for one example to `grad` and returns the
  /// loss. With training = true a dropout mask is drawn from rng.
  double accumulate_gradient(const IqBlock& x, Label target, bool training, Rng& rng,
                             std::span<double> grad) const;

 private:
  struct Activations;

  std::span<double> slice(std::size_t offset, std::size_t n) { return {params_.data() + offset, n}; }
  std::span<const double> slice(std::size_t offset, std::size_t n) const { return {params_.data() + offset, n}; }
  void run_forward(const IqTensor& x, bool training, Rng* rng, Activations& act) const;
  void run_backward(const IqTensor& x, const Activations& act, Label target, std::span<double>* param_grad,
                    IqTensor* input_grad) const;

  Architecture arch_;
  std::vector<double> params_;
  std::size_t conv_w_ = 0, conv_b_ = 0, hidden_w_ = 0, hidden_b_ = 0, out_w_ = 0, out_b_ = 0;
};

struct TrainConfig {
  std::size_t epochs = 50;
  std::size_t batch_size = 64;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t seed = 1;
};

void validate(const TrainConfig& cfg);

/// Adam with bias correction.
class AdamOptimizer {
 public:
  AdamOptimizer(std::size_t n, const TrainConfig& cfg);
  void step(std::span<double> params, std::span<const double> grad);
  std::size_t steps() const { return t_; }

 private:
  double lr_, beta1_, beta2_, eps_;
  std::vector<double> m_, v_;
  std::size_t t_ = 0;
};

struct LabeledDataset;

struct EpochStats {
  std::size_t epoch = 0;
  double train_loss = 0.0;  ///< inference-mode mean loss on the training split after the epoch
  double train_accuracy = 0.0;
  double validation_accuracy = 0.0;  ///< NaN when there is no validation split
};

struct TrainResult {
  Classifier model;
  double initial_loss = 0.0;  ///< mean training-split loss before any update
  std::vector<EpochStats> history;
};

/// Mini-batch Adam on the mean cross-entropy. The shuffle order and dropout
/// masks come from cfg.seed only. Throws TrainingDivergedError on a
/// non-finite loss.
TrainResult train(Classifier model, const LabeledDataset& data, const TrainConfig& cfg);

}  // namespace covert
