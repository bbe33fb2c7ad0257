// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>

#include "covert/modem.hpp"

namespace covert {

/// Unitary DFT pair (scaled by 1/sqrt(N) in both directions), backed by FFTW.
/// `in` and `out` must have equal length; they may alias.
void unitary_dft(std::span<const Complex> in, std::span<Complex> out);
void unitary_idft(std::span<const Complex> in, std::span<Complex> out);

}  // namespace covert
