// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "covert/channel.hpp"
#include "covert/nnet.hpp"
#include "covert/signal.hpp"

namespace covert {

/// Blocks with labels. The first train_count entries form the training
/// split, the rest the validation split.
struct LabeledDataset {
  std::vector<IqBlock> blocks;
  std::vector<Label> labels;
  std::size_t train_count = 0;

  std::size_t size() const { return blocks.size(); }
  std::span<const IqBlock> train_blocks() const { return {blocks.data(), train_count}; }
  std::span<const Label> train_labels() const { return {labels.data(), train_count}; }
  std::span<const IqBlock> validation_blocks() const {
    return std::span<const IqBlock>(blocks).subspan(train_count);
  }
  std::span<const Label> validation_labels() const { return std::span<const Label>(labels).subspan(train_count); }
};

/// Throws std::invalid_argument unless the dataset is nonempty, lengths
/// agree, the split marker is in range and both classes are present.
void validate(const LabeledDataset& data);

struct DatasetSpec {
  SignalType signal = SignalType::kQpsk;
  double snr_db = 10.0;
  Topology topology;
  std::size_t n_symbols = 20000;  ///< signal-class samples; must be a multiple of 16
  double validation_fraction = 0.2;
  OfdmConfig ofdm;
};

/// Noise variance at the eavesdropper for the given SNR, where SNR is the
/// received (after h_te) signal power over the noise power.
double eavesdropper_noise_power(SignalType signal, double snr_db, const Topology& topology,
                                const OfdmConfig& ofdm = {});

/// n_symbols/16 signal blocks (transmitter -> eavesdropper link with noise)
/// plus the same number of pure-noise blocks of equal noise variance,
/// shuffled, then split into training and validation parts.
LabeledDataset build_dataset(const DatasetSpec& spec, Rng& rng);

struct Evaluation {
  std::size_t total = 0;
  std::size_t correct = 0;
  /// confusion[true label][predicted label]
  std::array<std::array<std::size_t, kNumClasses>, kNumClasses> confusion{};

  double accuracy() const;
  /// Recall of one class; NaN if the class is absent.
  double class_accuracy(Label label) const;
};

/// Argmax labelling of every block. Throws std::invalid_argument if empty.
Evaluation evaluate(const Classifier& model, std::span<const IqBlock> blocks, std::span<const Label> labels);
Evaluation evaluate(const Classifier& model, const LabeledDataset& data);

}  // namespace covert
