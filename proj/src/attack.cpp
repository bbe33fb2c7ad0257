// SPDX-License-Identifier: Apache-2.0

#include "covert/attack.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "covert/channel.hpp"

namespace covert {

void validate(const AttackConfig& cfg) {
  if (!(cfg.p_max > 0.0)) throw std::invalid_argument("attack: p_max must be positive");
  if (!(cfg.eps_acc > 0.0 && cfg.eps_acc < std::sqrt(cfg.p_max))) {
    throw std::invalid_argument("attack: eps_acc must be in (0, sqrt(p_max)), got " + std::to_string(cfg.eps_acc));
  }
  if (!(cfg.h_ce > 0.0)) throw std::invalid_argument("attack: h_ce must be positive");
}

int max_attack_iterations(const AttackConfig& cfg) {
  return static_cast<int>(std::ceil(std::log2(std::sqrt(cfg.p_max) / cfg.eps_acc))) + 1;
}

IqTensor fgm_direction(const Classifier& model, const IqBlock& input, Label target) {
  IqTensor g = model.input_gradient(input, target);
  const double norm = std::sqrt(squared_norm(g));
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw FlatGradientError("flat loss surface: zero input gradient towards class '" +
                            std::string(to_string(target)) + "'");
  }
  for (auto& v : g) v /= norm;
  return g;
}

AttackResult craft_perturbation(const Classifier& model, const IqBlock& input, const AttackConfig& cfg) {
  validate(cfg);
  const double eps_max = std::sqrt(cfg.p_max);
  AttackResult result;

  IqBlock direction{};
  try {
    direction = to_block(fgm_direction(model, input, cfg.target));
  } catch (const FlatGradientError&) {
    result.flat_gradient = true;
  }

  // Candidates are built in the eavesdropper's received space, then mapped
  // back through the jammer link.
  auto received = [&](double eps) { return -(cfg.h_ce * eps) * direction; };
  auto fools = [&](double eps) {
    ++result.iterations;
    return model.classify(input + received(eps)) == cfg.target;
  };
  auto finish = [&](double eps) {
    result.epsilon = eps;
    result.received_delta = received(eps);
    result.delta = received_to_transmit(result.received_delta, cfg.h_ce);
    // Recompute instead of trusting the bracket so the flag always matches a
    // fresh forward pass on exactly the returned perturbation.
    result.success = model.classify(input + result.received_delta) == cfg.target;
    return result;
  };

  if (result.flat_gradient) {
    result.epsilon = eps_max;
    result.lower_bracket = eps_max;
    result.success = model.classify(input) == cfg.target;
    return result;
  }

  // Bracket ends are rounded sums, so a width of exactly eps_acc can come out
  // an ulp wider; the slack keeps the iteration count at its bound.
  const double width = cfg.eps_acc * (1.0 + 1e-9);
  double lo = 0.0;
  double hi = eps_max;
  if (cfg.rule == BisectionRule::kMinimalPower) {
    if (model.classify(input) == cfg.target) return finish(0.0);
    // The response is not monotone in eps: a full-budget candidate can
    // overshoot past the noise region. Halve the upper end until a candidate
    // fools the classifier; each halving saves one bisection step, so the
    // iteration bound is unchanged.
    while (!fools(hi)) {
      if (hi <= width) {
        result.lower_bracket = hi;
        return finish(eps_max);
      }
      hi *= 0.5;
    }
    while (hi - lo > width) {
      const double mid = 0.5 * (lo + hi);
      if (fools(mid)) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
  } else {
    while (hi - lo > width) {
      const double mid = 0.5 * (lo + hi);
      if (fools(mid)) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
  }
  result.lower_bracket = lo;
  return finish(hi);
}

IqBlock received_to_transmit(const IqBlock& delta_received, double h_ce) {
  if (!(h_ce > 0.0)) throw std::invalid_argument("received_to_transmit: h_ce must be positive");
  return (1.0 / h_ce) * delta_received;
}

IqBlock gaussian_jam(double power, Rng& rng) {
  if (!(power >= 0.0)) throw std::invalid_argument("gaussian_jam: power must be >= 0");
  const SymbolVector s = complex_gaussian(kBlockLength, power / static_cast<double>(kBlockLength), rng);
  IqBlock b{};
  std::copy(s.begin(), s.end(), b.begin());
  return b;
}

}  // namespace covert
