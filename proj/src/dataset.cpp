// SPDX-License-Identifier: Apache-2.0

#include "covert/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace covert {

void validate(const LabeledDataset& data) {
  if (data.blocks.empty()) throw std::invalid_argument("dataset is empty");
  if (data.blocks.size() != data.labels.size()) throw std::invalid_argument("dataset: blocks/labels length mismatch");
  if (data.train_count > data.blocks.size()) throw std::invalid_argument("dataset: split marker out of range");
  const bool has_signal = std::find(data.labels.begin(), data.labels.end(), Label::kSignal) != data.labels.end();
  const bool has_noise = std::find(data.labels.begin(), data.labels.end(), Label::kNoise) != data.labels.end();
  if (!has_signal || !has_noise) throw std::invalid_argument("dataset: both classes must be present");
}

double eavesdropper_noise_power(SignalType signal, double snr_db, const Topology& topology, const OfdmConfig& ofdm) {
  const double h_te = path_gain(topology.link(topology.d_te));
  return noise_power_for_snr(snr_db, h_te * h_te * nominal_signal_power(signal, ofdm));
}

LabeledDataset build_dataset(const DatasetSpec& spec, Rng& rng) {
  if (spec.n_symbols == 0 || spec.n_symbols % kBlockLength != 0) {
    throw std::invalid_argument("build_dataset: n_symbols must be a positive multiple of 16, got " +
                                std::to_string(spec.n_symbols));
  }
  if (!(spec.validation_fraction >= 0.0 && spec.validation_fraction < 1.0)) {
    throw std::invalid_argument("build_dataset: validation fraction must be in [0, 1)");
  }
  validate(spec.topology);
  const std::size_t n_blocks = spec.n_symbols / kBlockLength;
  const double noise_power = eavesdropper_noise_power(spec.signal, spec.snr_db, spec.topology, spec.ofdm);
  const LinkSpec link = spec.topology.link(spec.topology.d_te, noise_power);

  std::vector<IqBlock> blocks;
  std::vector<Label> labels;
  blocks.reserve(2 * n_blocks);
  labels.reserve(2 * n_blocks);

  while (blocks.size() < n_blocks) {
    const TxFrame frame = make_frame(spec.signal, rng, spec.ofdm);
    for (const auto& b : split_blocks(apply_link(frame.samples, link, rng))) {
      if (blocks.size() == n_blocks) break;
      blocks.push_back(b);
      labels.push_back(Label::kSignal);
    }
  }
  for (std::size_t i = 0; i < n_blocks; ++i) {
    const SymbolVector n = complex_gaussian(kBlockLength, noise_power, rng);
    IqBlock b{};
    std::copy(n.begin(), n.end(), b.begin());
    blocks.push_back(b);
    labels.push_back(Label::kNoise);
  }

  std::vector<std::size_t> order(blocks.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);

  LabeledDataset data;
  data.blocks.reserve(blocks.size());
  data.labels.reserve(blocks.size());
  for (auto i : order) {
    data.blocks.push_back(blocks[i]);
    data.labels.push_back(labels[i]);
  }
  const auto n_val = static_cast<std::size_t>(std::llround(spec.validation_fraction * static_cast<double>(blocks.size())));
  data.train_count = blocks.size() - n_val;
  return data;
}

double Evaluation::accuracy() const {
  return total == 0 ? std::numeric_limits<double>::quiet_NaN()
                    : static_cast<double>(correct) / static_cast<double>(total);
}

double Evaluation::class_accuracy(Label label) const {
  const auto& row = confusion[static_cast<std::size_t>(label)];
  const std::size_t n = row[0] + row[1];
  if (n == 0) return std::numeric_limits<double>::quiet_NaN();
  return static_cast<double>(row[static_cast<std::size_t>(label)]) / static_cast<double>(n);
}

Evaluation evaluate(const Classifier& model, std::span<const IqBlock> blocks, std::span<const Label> labels) {
  if (blocks.empty()) throw std::invalid_argument("evaluate: empty dataset");
  if (blocks.size() != labels.size()) throw std::invalid_argument("evaluate: blocks/labels length mismatch");
  Evaluation ev;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const Label predicted = model.classify(blocks[i]);
    ++ev.confusion[static_cast<std::size_t>(labels[i])][static_cast<std::size_t>(predicted)];
    ev.correct += (predicted == labels[i]);
    ++ev.total;
  }
  return ev;
}

Evaluation evaluate(const Classifier& model, const LabeledDataset& data) {
  return evaluate(model, data.blocks, data.labels);
}

}  // namespace covert
