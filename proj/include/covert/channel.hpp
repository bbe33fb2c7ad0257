// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>

#include "covert/modem.hpp"
#include "covert/rng.hpp"

namespace covert {

inline constexpr double kDefaultReferenceDistance = 1.0;
inline constexpr double kDefaultPathLossExponent = 2.8;

/// One directed, flat (H = h I) link with additive circular complex noise.
struct LinkSpec {
  double distance = 1.0;
  double reference_distance = kDefaultReferenceDistance;
  double path_loss_exponent = kDefaultPathLossExponent;
  double noise_power = 0.0;  ///< variance per complex sample
};

/// Distances from the transmitter (t) and the cooperative jammer (c) to the
/// receiver (r) and the eavesdropper (e).
struct Topology {
  double d_tr = 1.0;
  double d_te = 1.0;
  double d_cr = 1.0;
  double d_ce = 1.0;
  double reference_distance = kDefaultReferenceDistance;
  double path_loss_exponent = kDefaultPathLossExponent;

  LinkSpec link(double distance, double noise_power = 0.0) const {
    return {distance, reference_distance, path_loss_exponent, noise_power};
  }
};

void validate(const LinkSpec& link);
void validate(const Topology& topology);

/// h = (d0 / d)^gamma. Throws std::invalid_argument for d <= 0 or other
/// invalid link parameters.
double path_gain(const LinkSpec& link);

/// n circularly-symmetric complex Gaussian samples, E|n|^2 = variance.
/// Draw order is real then imaginary part per sample.
SymbolVector complex_gaussian(std::size_t n, double variance, Rng& rng);

/// h x + n with n ~ CN(0, noise_power).
SymbolVector apply_link(std::span<const Complex> x, const LinkSpec& link, Rng& rng);

double ratio_from_db(double db);
/// Throws std::invalid_argument for ratio <= 0.
double db_from_ratio(double ratio);

/// Noise variance that puts a signal of the given received power at snr_db.
double noise_power_for_snr(double snr_db, double received_signal_power);

}  // namespace covert
