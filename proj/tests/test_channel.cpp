// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "covert/channel.hpp"

using namespace covert;

TEST_CASE("path_gain") {
  CHECK(path_gain({1.0, 1.0, 2.8, 0.0}) == 1.0);
  // exp(2.8 ln 2) and (2/3)^2.8
  CHECK(path_gain({0.5, 1.0, 2.8, 0.0}) == doctest::Approx(std::exp(2.8 * std::log(2.0))).epsilon(1e-12));
  CHECK(path_gain({0.5, 1.0, 2.8, 0.0}) == doctest::Approx(6.9644).epsilon(1e-4));
  CHECK(path_gain({1.5, 1.0, 2.8, 0.0}) == doctest::Approx(0.3211).epsilon(1e-3));
  CHECK_THROWS_AS(path_gain({0.0, 1.0, 2.8, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(path_gain({-1.0, 1.0, 2.8, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(path_gain({1.0, 0.0, 2.8, 0.0}), std::invalid_argument);

  double prev = path_gain({0.1, 1.0, 2.8, 0.0});
  for (double d = 0.2; d < 5.0; d += 0.1) {
    const double h = path_gain({d, 1.0, 2.8, 0.0});
    CHECK(h < prev);
    prev = h;
  }
}

TEST_CASE("apply_link: identity, determinism, linearity") {
  Rng rng = make_rng(1);
  const SymbolVector x = complex_gaussian(64, 1.0, rng);

  Rng r0 = make_rng(2);
  CHECK(apply_link(x, {1.0, 1.0, 2.8, 0.0}, r0) == x);

  const LinkSpec link{0.7, 1.0, 2.8, 0.3};
  Rng a = make_rng(9), b = make_rng(9);
  CHECK(apply_link(x, link, a) == apply_link(x, link, b));

  // apply_link(a x) with the same noise draw equals a (h x) + n
  const double scale = -2.5;
  SymbolVector ax(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) ax[i] = scale * x[i];
  Rng n1 = make_rng(4), n2 = make_rng(4);
  const SymbolVector y = apply_link(ax, link, n1);
  const SymbolVector noise = complex_gaussian(x.size(), link.noise_power, n2);
  const double h = path_gain(link);
  for (std::size_t i = 0; i < x.size(); ++i) {
    CHECK(std::abs(y[i] - (scale * h * x[i] + noise[i])) < 1e-12);
  }
}

TEST_CASE("noise statistics") {
  const std::size_t n = 100000;
  Rng rng = make_rng(77);
  const SymbolVector zeros(n);
  const double sigma2 = 1.0;
  const SymbolVector y = apply_link(zeros, {1.0, 1.0, 2.8, sigma2}, rng);
  double p = 0.0, mr = 0.0, mi = 0.0;
  for (const auto& v : y) {
    p += std::norm(v);
    mr += v.real();
    mi += v.imag();
  }
  p /= n;
  mr /= n;
  mi /= n;
  CHECK(p >= 0.98);
  CHECK(p <= 1.02);

  // Per-axis mean 0 and variance sigma^2/2 within 3 standard errors.
  const double var_axis = sigma2 / 2.0;
  const double se_mean = std::sqrt(var_axis / n);
  CHECK(std::abs(mr) < 3 * se_mean);
  CHECK(std::abs(mi) < 3 * se_mean);
  double vr = 0.0, vi = 0.0;
  for (const auto& v : y) {
    vr += (v.real() - mr) * (v.real() - mr);
    vi += (v.imag() - mi) * (v.imag() - mi);
  }
  vr /= (n - 1);
  vi /= (n - 1);
  const double se_var = var_axis * std::sqrt(2.0 / (n - 1));
  CHECK(std::abs(vr - var_axis) < 3 * se_var);
  CHECK(std::abs(vi - var_axis) < 3 * se_var);
}

TEST_CASE("dB conversions and SNR accounting") {
  CHECK(ratio_from_db(0) == 1.0);
  CHECK(ratio_from_db(10) == doctest::Approx(10.0));
  CHECK(ratio_from_db(-8) == doctest::Approx(std::pow(10.0, -0.8)));
  CHECK(ratio_from_db(-8) == doctest::Approx(0.1585).epsilon(1e-3));
  for (double db : {-30.0, -8.0, 0.0, 3.0, 17.5}) CHECK(db_from_ratio(ratio_from_db(db)) == doctest::Approx(db));
  CHECK_THROWS_AS(db_from_ratio(0.0), std::invalid_argument);
  CHECK_THROWS_AS(db_from_ratio(-1.0), std::invalid_argument);

  CHECK(noise_power_for_snr(0, 1) == 1.0);
  CHECK(noise_power_for_snr(3, 1) == doctest::Approx(std::pow(10.0, -0.3)));
  CHECK(noise_power_for_snr(3, 1) == doctest::Approx(0.5012).epsilon(1e-3));
  CHECK(noise_power_for_snr(10, 2) == doctest::Approx(0.2));
  CHECK_THROWS_AS(noise_power_for_snr(3, 0), std::invalid_argument);
}
