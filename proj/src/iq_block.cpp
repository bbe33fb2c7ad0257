// SPDX-License-Identifier: Apache-2.0

#include "covert/iq_block.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace covert {

IqTensor to_tensor(const IqBlock& block) {
  IqTensor t{};
  for (std::size_t i = 0; i < kBlockLength; ++i) {
    t[i] = block[i].real();
    t[kBlockLength + i] = block[i].imag();
  }
  return t;
}

IqBlock to_block(const IqTensor& tensor) {
  IqBlock b{};
  for (std::size_t i = 0; i < kBlockLength; ++i) b[i] = {tensor[i], tensor[kBlockLength + i]};
  return b;
}

double squared_norm(const IqBlock& block) {
  double s = 0.0;
  for (const auto& v : block) s += std::norm(v);
  return s;
}

double squared_norm(const IqTensor& tensor) {
  double s = 0.0;
  for (double v : tensor) s += v * v;
  return s;
}

IqBlock operator+(const IqBlock& a, const IqBlock& b) {
  IqBlock out{};
  for (std::size_t i = 0; i < kBlockLength; ++i) out[i] = a[i] + b[i];
  return out;
}

IqBlock operator-(const IqBlock& a, const IqBlock& b) {
  IqBlock out{};
  for (std::size_t i = 0; i < kBlockLength; ++i) out[i] = a[i] - b[i];
  return out;
}

IqBlock operator*(double s, const IqBlock& a) {
  IqBlock out{};
  for (std::size_t i = 0; i < kBlockLength; ++i) out[i] = s * a[i];
  return out;
}

std::vector<IqBlock> split_blocks(std::span<const Complex> samples) {
  if (samples.size() % kBlockLength != 0) {
    throw std::invalid_argument("split_blocks: " + std::to_string(samples.size()) +
                                " samples is not a multiple of the block length");
  }
  std::vector<IqBlock> blocks(samples.size() / kBlockLength);
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    for (std::size_t i = 0; i < kBlockLength; ++i) blocks[b][i] = samples[b * kBlockLength + i];
  }
  return blocks;
}

SymbolVector join_blocks(std::span<const IqBlock> blocks) {
  SymbolVector out;
  out.reserve(blocks.size() * kBlockLength);
  for (const auto& b : blocks) out.insert(out.end(), b.begin(), b.end());
  return out;
}

bool all_finite(const IqBlock& block) {
  for (const auto& v : block) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  }
  return true;
}

}  // namespace covert
