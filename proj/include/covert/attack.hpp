// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>

#include "covert/iq_block.hpp"
#include "covert/nnet.hpp"
#include "covert/rng.hpp"

namespace covert {

/// Raised when the target-class loss has a zero input gradient, so no FGM
/// direction exists.
class FlatGradientError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// How the bisection bracket moves after probing a candidate scale.
enum class BisectionRule {
  /// A fooling candidate shrinks the upper end; the smallest scale seen to
  /// fool the classifier is returned. Preceded by a feasibility probe at the
  /// full budget; if that fails the upper end is halved until a candidate
  /// fools the classifier or the bracket is narrower than eps_acc.
  kMinimalPower,
  /// A fooling candidate raises the lower end and the final upper end is
  /// returned, with no feasibility probe. Kept for comparison runs.
  kLiteral,
};

struct AttackConfig {
  double p_max = 1.0;    ///< transmit-space budget on ||delta||^2 per block
  double eps_acc = 0.1;  ///< bisection accuracy on the transmit amplitude
  Label target = Label::kNoise;
  double h_ce = 1.0;  ///< jammer -> eavesdropper gain
  BisectionRule rule = BisectionRule::kMinimalPower;
};

void validate(const AttackConfig& cfg);

struct AttackResult {
  IqBlock delta{};           ///< transmitted by the jammer
  IqBlock received_delta{};  ///< h_ce * delta, as seen by the eavesdropper
  double epsilon = 0.0;      ///< transmit amplitude ||delta||_2
  bool success = false;      ///< perturbed crafting input is labelled cfg.target
  int iterations = 0;        ///< classifier evaluations after the initial check
  double lower_bracket = 0.0;  ///< final lower end; its candidate was not labelled target
  bool flat_gradient = false;
};

/// Upper bound on AttackResult::iterations: ceil(log2(sqrt(p_max)/eps_acc)) + 1.
int max_attack_iterations(const AttackConfig& cfg);

/// Unit-norm input gradient of the loss towards `target`. Throws
/// FlatGradientError if the gradient is zero.
IqTensor fgm_direction(const Classifier& model, const IqBlock& input, Label target);

/// Targeted FGM with a bisection on the scale. Candidates are
/// input - h_ce * eps * direction for eps in [0, sqrt(p_max)]. The returned
/// delta = -epsilon * direction always satisfies ||delta||^2 <= p_max.
///
/// Already-target inputs return epsilon 0 with no iterations. If no probed
/// scale fools the classifier (or the gradient is flat) the result has
/// success = false and epsilon = sqrt(p_max).
AttackResult craft_perturbation(const Classifier& model, const IqBlock& input, const AttackConfig& cfg);

/// delta_received / h_ce. Throws std::invalid_argument unless h_ce > 0.
IqBlock received_to_transmit(const IqBlock& delta_received, double h_ce);

/// 16 i.i.d. CN(0, power/16) samples, so E||block||^2 = power.
IqBlock gaussian_jam(double power, Rng& rng);

}  // namespace covert
