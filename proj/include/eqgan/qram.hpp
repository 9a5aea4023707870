// Variational QRAM: binned two-peak datasets, exact empirical
// superpositions, the shallow peak ansatz, and adversarial training of
// the ansatz against the exact superposition.
#pragma once

#include <eqgan/training.hpp>

#include <cstdint>
#include <vector>

namespace eqgan {

struct Dataset {
  std::vector<int> values;  // bin index per sample, in [0, 2^n_qubits)
  std::vector<int> labels;  // class per sample, 0 or 1
  int n_qubits = 0;
  std::vector<int> train_indices;
  std::vector<int> test_indices;
};

struct TwoPeakParams {
  int n_qubits = 4;
  double class0_mean = 7.5;
  double class0_std = 1.5;
  double class1_mean = 11.5;
  double class1_std = 1.5;
  int n_samples = 120;  // split evenly between the classes
  std::uint64_t seed = 0;
};

/// Gaussian draws per class, rounded to the nearest bin and clamped to the
/// grid. Within each class, samples alternate train/test, so the default
/// 120 samples give balanced 60/60 splits with 30 per class in each.
Dataset sample_two_peak(const TwoPeakParams& params);

/// Normalized bin histogram of one class over the training split.
Eigen::VectorXd empirical_histogram(const Dataset& d, int class_id);

/// Superposition whose amplitude at bin i is sqrt(count_i / N_class),
/// counted over the training split. All amplitudes real non-negative.
StateVector empirical_superposition(const Dataset& d, int class_id);

/// Shallow peak preparation: RY on every qubit plus one compiled
/// controlled-RY per qubit after the first (qubit 1 conditioned on qubit 0,
/// deeper qubits on qubit 1), so amplitudes form mirrored exponential
/// tails around a half- or quarter-grid boundary. 2n-1 symbols
/// "theta_0".."theta_{2n-2}", exactly n-1 two-qubit gates. Class 1 appends
/// an X on the top qubit, shifting the peak by half the bin range.
ParameterizedCircuit build_peak_ansatz(int n_qubits, int class_id);

struct QramTrainResult {
  ParamMap params;       // parameters of the best-fidelity iterate
  double fidelity = 0.0;
  TrainHistory history;
};

/// Adversarial training of the peak ansatz against the class's exact
/// empirical superposition. `base` supplies mode, budgets, rates and
/// discriminator form; generator, register width, and target are filled
/// in here. Empty init_generator_params default to the uniform
/// superposition (base rotations pi/2, conditional offsets 0), which
/// overlaps every bin; the all-zero corner parks the state on one basis
/// bin where most gradients die.
QramTrainResult train_qram(const Dataset& d, int class_id, const TrainingConfig& base);

/// Multinomial draw of basis-state counts from the state's distribution.
std::vector<int> sample_basis_counts(const StateVector& state, int shots,
                                     std::mt19937_64& rng);

/// Total variation distance between two distributions on the same grid.
double total_variation(const Eigen::VectorXd& p, const Eigen::VectorXd& q);

}  // namespace eqgan
