// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "covert/modem.hpp"

namespace covert {

/// Samples per classifier input.
inline constexpr std::size_t kBlockLength = 16;

/// One classifier input: 16 complex baseband samples.
using IqBlock = std::array<Complex, kBlockLength>;

/// The same block as a 2x16 real array, row-major: I row then Q row.
using IqTensor = std::array<double, 2 * kBlockLength>;

IqTensor to_tensor(const IqBlock& block);
IqBlock to_block(const IqTensor& tensor);

double squared_norm(const IqBlock& block);
double squared_norm(const IqTensor& tensor);

IqBlock operator+(const IqBlock& a, const IqBlock& b);
IqBlock operator-(const IqBlock& a, const IqBlock& b);
IqBlock operator*(double s, const IqBlock& a);

/// Splits a sample stream into consecutive blocks. Throws
/// std::invalid_argument if the length is not a multiple of kBlockLength.
std::vector<IqBlock> split_blocks(std::span<const Complex> samples);
SymbolVector join_blocks(std::span<const IqBlock> blocks);

bool all_finite(const IqBlock& block);

}  // namespace covert
