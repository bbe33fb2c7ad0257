// SPDX-License-Identifier: Apache-2.0

#include "covert/channel.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace covert {

void validate(const LinkSpec& link) {
  if (!(link.distance > 0.0)) {
    throw std::invalid_argument("link distance must be positive, got " + std::to_string(link.distance));
  }
  if (!(link.reference_distance > 0.0)) throw std::invalid_argument("reference distance must be positive");
  if (!(link.path_loss_exponent >= 0.0)) throw std::invalid_argument("path-loss exponent must be >= 0");
  if (!(link.noise_power >= 0.0)) throw std::invalid_argument("noise power must be >= 0");
}

void validate(const Topology& topology) {
  for (double d : {topology.d_tr, topology.d_te, topology.d_cr, topology.d_ce}) {
    validate(topology.link(d));
  }
}

double path_gain(const LinkSpec& link) {
  validate(link);
  return std::pow(link.reference_distance / link.distance, link.path_loss_exponent);
}

SymbolVector complex_gaussian(std::size_t n, double variance, Rng& rng) {
  SymbolVector out(n);
  if (variance == 0.0) return out;
  std::normal_distribution<double> normal(0.0, std::sqrt(variance / 2.0));
  for (auto& s : out) {
    const double re = normal(rng);
    const double im = normal(rng);
    s = {re, im};
  }
  return out;
}

SymbolVector apply_link(std::span<const Complex> x, const LinkSpec& link, Rng& rng) {
  const double h = path_gain(link);
  SymbolVector out = complex_gaussian(x.size(), link.noise_power, rng);
  for (std::size_t i = 0; i < x.size(); ++i) out[i] += h * x[i];
  return out;
}

double ratio_from_db(double db) {
  return std::pow(10.0, db / 10.0);
}

double db_from_ratio(double ratio) {
  if (!(ratio > 0.0)) throw std::invalid_argument("db_from_ratio: ratio must be positive");
  return 10.0 * std::log10(ratio);
}

double noise_power_for_snr(double snr_db, double received_signal_power) {
  if (!(received_signal_power > 0.0)) {
    throw std::invalid_argument("noise_power_for_snr: signal power must be positive");
  }
  return received_signal_power / ratio_from_db(snr_db);
}

}  // namespace covert
