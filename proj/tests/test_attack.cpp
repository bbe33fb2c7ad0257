// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "covert/attack.hpp"
#include "covert/channel.hpp"

using namespace covert;

namespace {

IqBlock random_block(Rng& rng, double variance = 1.0) {
  const auto s = complex_gaussian(kBlockLength, variance, rng);
  IqBlock b{};
  std::copy(s.begin(), s.end(), b.begin());
  return b;
}

Classifier always_signal() {
  Classifier m(Architecture{2, 2, 0.0});
  m.output_bias()[0] = 10.0;
  m.output_bias()[1] = -10.0;
  return m;
}

// Noise logit sum_j relu(I[j+1]) - 4 over the 14 conv columns, signal logit 0.
Classifier threshold_model() {
  Classifier m(Architecture{1, 1, 0.0});
  m.conv_weights()[1] = 1.0;
  for (std::size_t j = 0; j < kConvOutputWidth; ++j) m.hidden_weights()[j] = 1.0;
  m.output_weights()[1] = 1.0;
  m.output_bias()[1] = -4.0;
  return m;
}

// Just above the ReLU kink so the gradient is defined; noise logit -3.86.
IqBlock small_positive() {
  IqBlock x{};
  x.fill({0.01, 0.0});
  return x;
}

}  // namespace

TEST_CASE("fgm_direction: unit norm, collinear with the gradient") {
  Rng rng = make_rng(1);
  for (std::uint64_t i = 0; i < 50; ++i) {
    const auto m = Classifier::initialized({8, 16, 0.1}, i);
    const IqBlock x = random_block(rng);
    const IqTensor d = fgm_direction(m, x, Label::kNoise);
    CHECK(std::abs(std::sqrt(squared_norm(d)) - 1.0) < 1e-9);
    const IqTensor g = m.input_gradient(x, Label::kNoise);
    const double gn = std::sqrt(squared_norm(g));
    for (std::size_t k = 0; k < d.size(); ++k) CHECK(d[k] * gn == doctest::Approx(g[k]).epsilon(1e-12).scale(1e-15));
  }
  CHECK_THROWS_AS(fgm_direction(Classifier{}, IqBlock{}, Label::kNoise), FlatGradientError);
}

TEST_CASE("fgm_direction: small step against it lowers the target loss") {
  Rng rng = make_rng(2);
  int lowered = 0;
  const int trials = 200;
  for (int i = 0; i < trials; ++i) {
    const auto m = Classifier::initialized({16, 64, 0.1}, 100 + static_cast<std::uint64_t>(i));
    const IqBlock x = random_block(rng);
    const IqBlock d = to_block(fgm_direction(m, x, Label::kNoise));
    lowered += m.loss(x - 1e-3 * d, Label::kNoise) < m.loss(x, Label::kNoise);
  }
  CHECK(lowered >= trials * 95 / 100);
}

TEST_CASE("craft: already noise needs nothing") {
  const auto m = threshold_model();
  IqBlock x{};
  x.fill({1.0, 0.0});  // noise logit 14 - 4 > 0
  REQUIRE(m.classify(x) == Label::kNoise);
  const auto r = craft_perturbation(m, x, {4.0, 0.1});
  CHECK(r.success);
  CHECK(r.epsilon == 0.0);
  CHECK(r.iterations == 0);
  CHECK(squared_norm(r.delta) == 0.0);
}

TEST_CASE("craft: an unfoolable model exhausts the budget") {
  Rng rng = make_rng(3);
  const auto r = craft_perturbation(always_signal(), random_block(rng), {9.0, 0.1});
  CHECK_FALSE(r.success);
  CHECK(r.epsilon == 3.0);
  CHECK(r.flat_gradient);
  CHECK(squared_norm(r.delta) == 0.0);

  // Non-flat but too weak: the threshold model needs sum(relu(I)) > 4.
  const auto m = threshold_model();
  const IqBlock x = small_positive();
  const auto weak = craft_perturbation(m, x, {0.01, 0.001});
  CHECK_FALSE(weak.success);
  CHECK(weak.epsilon == doctest::Approx(0.1));
  CHECK_FALSE(weak.flat_gradient);
  CHECK(weak.iterations <= max_attack_iterations({0.01, 0.001}));
}

TEST_CASE("craft: threshold model, closed-form minimum") {
  // The gradient points along +I on samples 1..14 only (column j reads
  // x[j+1]), so each rises by eps/sqrt(14) and the flip happens once
  // 0.14 + sqrt(14) * eps > 4.
  const auto m = threshold_model();
  const IqBlock x = small_positive();
  const AttackConfig cfg{4.0, 1e-6};
  const auto r = craft_perturbation(m, x, cfg);
  CHECK(r.success);
  const double expect = 3.86 / std::sqrt(14.0);
  CHECK(r.epsilon >= expect);
  CHECK(r.epsilon - expect <= cfg.eps_acc);
  CHECK(r.lower_bracket < expect);
  CHECK(m.classify(x + r.received_delta) == Label::kNoise);
}

TEST_CASE("craft: iteration count with eps_acc = sqrt(P)/16") {
  Rng rng = make_rng(4);
  for (std::uint64_t i = 0; i < 100; ++i) {
    const auto m = Classifier::initialized({8, 16, 0.1}, 200 + i);
    const AttackConfig cfg{4.0, 2.0 / 16};
    CHECK(max_attack_iterations(cfg) == 5);
    const auto r = craft_perturbation(m, random_block(rng), cfg);
    CHECK(r.iterations <= 5);  // the probe plus at most four halvings of the bracket
  }
}

TEST_CASE("craft: rounding in the bracket never costs an extra iteration") {
  // sqrt(p_max) has a full mantissa, so bracket ends like 3/128 of it are
  // rounded and their difference can exceed eps_acc by an ulp.
  const auto m = threshold_model();
  for (int i = 0; i < 200; ++i) {
    IqBlock x{};
    x.fill({0.01 + 0.0013 * i, 0.0});
    for (double p : {2.0, 3.0, 7.0, 0.3}) {
      const AttackConfig cfg{p, std::sqrt(p) / 128};
      CHECK(craft_perturbation(m, x, cfg).iterations <= max_attack_iterations(cfg));
    }
  }
}

TEST_CASE("craft: properties over random models, inputs and budgets") {
  Rng rng = make_rng(5);
  int successes = 0, attempted = 0;
  for (std::uint64_t i = 0; i < 300; ++i) {
    const auto m = Classifier::initialized({16, 64, 0.1}, 300 + i);
    const IqBlock x = random_block(rng, 0.5);
    AttackConfig cfg;
    cfg.p_max = std::exp(std::uniform_real_distribution<double>(-3.0, 4.0)(rng));
    cfg.eps_acc = std::sqrt(cfg.p_max) / std::uniform_real_distribution<double>(2.0, 1000.0)(rng);
    cfg.h_ce = std::uniform_real_distribution<double>(0.3, 3.0)(rng);
    cfg.rule = (i % 5 == 0) ? BisectionRule::kLiteral : BisectionRule::kMinimalPower;
    const auto r = craft_perturbation(m, x, cfg);

    CHECK(squared_norm(r.delta) <= cfg.p_max + 1e-9);
    CHECK(r.iterations <= max_attack_iterations(cfg));
    CHECK(std::abs(std::sqrt(squared_norm(r.delta)) - (r.flat_gradient ? 0.0 : r.epsilon)) < 1e-9);
    for (std::size_t k = 0; k < kBlockLength; ++k) {
      CHECK(std::abs(cfg.h_ce * r.delta[k] - r.received_delta[k]) < 1e-12);
    }
    CHECK(r.success == (m.classify(x + r.received_delta) == Label::kNoise));

    if (cfg.rule == BisectionRule::kMinimalPower && m.classify(x) == Label::kSignal) {
      ++attempted;
      if (r.success) {
        ++successes;
        CHECK(r.epsilon > 0.0);
        CHECK(r.epsilon - r.lower_bracket <= cfg.eps_acc + 1e-12);
        const IqBlock dir = (1.0 / (cfg.h_ce * r.epsilon)) * r.received_delta;
        CHECK(m.classify(x + (cfg.h_ce * r.lower_bracket) * dir) == Label::kSignal);
      }
    }
  }
  CHECK(attempted > 20);
  CHECK(successes > 0);
}

TEST_CASE("craft: literal rule walks away from the threshold") {
  const auto m = threshold_model();
  const IqBlock x = small_positive();
  AttackConfig cfg{9.0, 1e-3};
  cfg.rule = BisectionRule::kLiteral;
  // First midpoint 1.5 fools, so every later midpoint does too and the
  // search climbs to the full budget.
  const auto up = craft_perturbation(m, x, cfg);
  CHECK(up.epsilon == doctest::Approx(3.0).epsilon(1e-3));
  CHECK(up.success);
  CHECK(up.iterations <= max_attack_iterations(cfg));

  // First midpoint 1.0 sits below the flip point, so it collapses to zero.
  cfg.p_max = 4.0;
  const auto down = craft_perturbation(m, x, cfg);
  CHECK(down.epsilon <= cfg.eps_acc);
  CHECK_FALSE(down.success);
}

TEST_CASE("craft: config validation") {
  const auto m = threshold_model();
  CHECK_THROWS_AS(craft_perturbation(m, {}, {0.0, 0.1}), std::invalid_argument);
  CHECK_THROWS_AS(craft_perturbation(m, {}, {1.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(craft_perturbation(m, {}, {1.0, 0.0}), std::invalid_argument);
  AttackConfig bad{1.0, 0.1};
  bad.h_ce = 0.0;
  CHECK_THROWS_AS(craft_perturbation(m, {}, bad), std::invalid_argument);
}

TEST_CASE("received_to_transmit") {
  Rng rng = make_rng(6);
  const IqBlock x = random_block(rng);
  CHECK(received_to_transmit(x, 1.0) == x);

  IqBlock unit{};
  unit[0] = 1.0;
  CHECK(std::sqrt(squared_norm(received_to_transmit(unit, 2.0))) == doctest::Approx(0.5));

  for (int i = 0; i < 20; ++i) {
    const double h = path_gain(LinkSpec{std::uniform_real_distribution<double>(0.2, 5.0)(rng), 1.0, 2.8, 1.0});
    const IqBlock d = random_block(rng);
    const IqBlock back = h * received_to_transmit(d, h);
    for (std::size_t k = 0; k < kBlockLength; ++k) CHECK(std::abs(back[k] - d[k]) < 1e-12 * (1 + std::abs(d[k])));
  }
  CHECK_THROWS_AS(received_to_transmit(x, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(received_to_transmit(x, -1.0), std::invalid_argument);
}

TEST_CASE("gaussian_jam") {
  Rng rng = make_rng(7);
  CHECK(squared_norm(gaussian_jam(0.0, rng)) == 0.0);
  CHECK_THROWS_AS(gaussian_jam(-1.0, rng), std::invalid_argument);

  const int n = 10000;
  double total = 0.0;
  for (int i = 0; i < n; ++i) total += squared_norm(gaussian_jam(0.25, rng));
  CHECK(std::abs(total / n - 0.25) < 0.03 * 0.25);

  // Same sample positions from two seeds are uncorrelated.
  Rng a = make_rng(8), b = make_rng(9);
  double sab = 0, saa = 0, sbb = 0;
  for (int i = 0; i < n; ++i) {
    const Complex u = gaussian_jam(1.0, a)[0];
    const Complex v = gaussian_jam(1.0, b)[0];
    sab += u.real() * v.real();
    saa += u.real() * u.real();
    sbb += v.real() * v.real();
  }
  CHECK(std::abs(sab / std::sqrt(saa * sbb)) < 0.05);
}
