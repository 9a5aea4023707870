// Minimax training engines over the discriminator circuits: adversarial
// swap-test training, the frozen perfect-test baseline, and the
// Helstrom-POVM baseline with full or partial inner optimization.
#pragma once

#include <eqgan/swap_test.hpp>

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

namespace eqgan {

enum class TrainMode { EQGAN, FROZEN_SWAP, QUGAN_FULL, QUGAN_PARTIAL };
enum class GradientMethod { FINITE_DIFF, PARAM_SHIFT };
enum class Optimizer { SGD, ADAM };

const char* mode_name(TrainMode mode);
TrainMode mode_from_name(const std::string& name);
const char* gradient_method_name(GradientMethod method);
GradientMethod gradient_method_from_name(const std::string& name);

/// Objective backed by a circuit evaluation. The evaluator is handed the
/// circuit explicitly so the shift rule can re-evaluate with a single gate
/// occurrence pinned to an offset angle.
struct CircuitObjective {
  ParameterizedCircuit circuit;
  std::function<double(const ParameterizedCircuit&, const ParamMap&)> eval;

  double operator()(const ParamMap& params) const { return eval(circuit, params); }
};

/// Central differences, usable on any black-box objective.
Eigen::VectorXd finite_diff_gradient(const std::function<double(const ParamMap&)>& f,
                                     const std::vector<std::string>& names, const ParamMap& at,
                                     double fd_step);

/// Gradient of the objective w.r.t. `names` at `at`. PARAM_SHIFT applies
/// the exact shift rule per gate occurrence (period-2pi rotations shift by
/// pi/2 with weight 1/2; the swap exponential has period pi and shifts by
/// pi/4 with weight 1), scaled by each occurrence's symbol coefficient.
Eigen::VectorXd gradient(const CircuitObjective& objective,
                         const std::vector<std::string>& names, const ParamMap& at,
                         GradientMethod method, double fd_step = 1e-4);

/// Binomial shot estimate of a probability; shots = 0 returns p exactly.
double sampled_probability(double p, int shots, std::mt19937_64& rng);

struct EpochsPerPhase {
  int generator = 1;
  int discriminator = 1;
};

using TargetState = std::variant<StateVector, DensityMatrix>;

struct TrainingConfig {
  ParameterizedCircuit generator{1};
  DiscriminatorSpec discriminator{};
  TargetState true_state{StateVector::zero_state(1)};
  TrainMode mode = TrainMode::EQGAN;
  EpochsPerPhase epochs_per_phase{};
  int outer_iterations = 200;
  double learning_rate_g = 0.05;
  double learning_rate_d = 0.05;
  GradientMethod gradient = GradientMethod::PARAM_SHIFT;
  double fd_step = 1e-4;
  std::optional<NoiseModel> noise;
  bool pretrain = false;
  // Cap on the supervised warm-up phase. Unset: the warm-up may spend the
  // whole outer budget waiting for its convergence window.
  std::optional<int> pretrain_iterations;
  Optimizer optimizer = Optimizer::SGD;
  // > 0 replaces every analytic pass probability seen by the optimizer
  // with a binomial estimate from that many draws.
  int shots = 0;
  std::uint64_t seed = 0;
  // Missing generator symbols start at 0; missing discriminator symbols
  // start at their optimal values.
  ParamMap init_generator_params;
  ParamMap init_discriminator_params;
};

struct TrainIterate {
  double generator_loss = 0.0;
  double discriminator_loss = 0.0;
  double fidelity_to_true = 0.0;  // always noise-free
  ParamMap generator_params;
  ParamMap discriminator_params;
  StateVector generated{1, Vector::Unit(2, 0)};
};

struct TrainHistory {
  std::vector<TrainIterate> iterates;
  int best_fidelity_index = -1;
  int min_disc_loss_index = -1;

  const TrainIterate& best() const { return iterates.at(best_fidelity_index); }
  const TrainIterate& final() const { return iterates.back(); }
};

/// The swap-test minimax value 1 - D(theta_d, rho(theta_g)) with the true
/// state on the first register, under cfg.noise when present. The
/// generator descends on it. The discriminator trains on discrimination
/// power, rejecting the generated pair while still accepting a true-true
/// pair; for the ancilla ansatz the acceptance term is constant and this
/// reduces to plain ascent on the value.
double eqgan_value(const ParamMap& theta_g, const ParamMap& theta_d,
                   const TrainingConfig& cfg);

/// Helstrom game value Tr[T sigma] - Tr[T rho].
double helstrom_value(const HermitianOperator& t, const DensityMatrix& sigma,
                      const DensityMatrix& rho);

/// Partial-discriminator ascent step: eigenvalue-clip T + lr (sigma - rho)
/// back into the POVM interval [0, 1].
HermitianOperator clipped_helstrom_step(const HermitianOperator& t, const DensityMatrix& sigma,
                                        const DensityMatrix& rho, double lr);

TrainHistory train(const TrainingConfig& cfg);

/// The flat-landscape showcase: generator RX(alpha) RZ(beta), data
/// prepared by the same circuit at (pi/2, pi/2), start at (0, 0) where
/// every derivative of the overlap vanishes.
struct VanishingGradientInstance {
  ParameterizedCircuit generator;
  StateVector data;
  ParamMap initial_params;
};
VanishingGradientInstance vanishing_gradient_instance();

}  // namespace eqgan
