// Binary classifier over basis-encoded integers: a readout qubit coupled to
// every data qubit through parameterized entangling phases, trained on
// individual examples or on per-class superpositions with equal circuit
// budgets.
#pragma once

#include <eqgan/qram.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace eqgan {

struct QnnModel {
  int n_data_qubits = 4;
  int layers = 2;
  Eigen::VectorXd params;  // [layer * n_data_qubits + qubit], symbols g_*
};

/// Zero-initialized model; the register is data qubits [0, n) plus a
/// readout qubit at index n.
QnnModel make_qnn_model(int n_data_qubits = 4, int layers = 2);

/// The model's circuit over n+1 qubits: H on the readout, per layer one
/// entangling phase gate between each data qubit and the readout (symbols
/// "g_0".."g_{layers*n-1}"), then a closing H on the readout.
ParameterizedCircuit qnn_circuit(const QnnModel& m);

/// Expectation of sigma-z on the readout after running the circuit on
/// input (x) |0>. Always in [-1, 1]; analytic, no shot noise.
double qnn_predict(const QnnModel& m, const StateVector& input);

/// d(prediction)/d(params), via shifted circuit evaluations or central
/// differences.
Eigen::VectorXd qnn_predict_gradient(const QnnModel& m, const StateVector& input,
                                     GradientMethod method = GradientMethod::PARAM_SHIFT,
                                     double fd_step = 1e-4);

/// max(0, 1 - label * prediction); labels live in {-1, +1}.
double hinge_loss(double prediction, int label);

/// Class 0 -> +1, class 1 -> -1.
int class_label(int class_id);

enum class QnnTrainMode { SAMPLING, SUPERPOSITION };

const char* qnn_mode_name(QnnTrainMode mode);
QnnTrainMode qnn_mode_from_name(const std::string& name);

/// Tuned step sizes, one per training mode.
inline constexpr double kQnnSamplingLearningRate = 1.1748975549395297e-4;      // 10^-3.93
inline constexpr double kQnnSuperpositionLearningRate = 1.4791083881682074e-2;  // 10^-1.83

struct QnnTrainConfig {
  QnnTrainMode mode = QnnTrainMode::SAMPLING;
  int budget = 60;  // loss-circuit evaluations; one gradient step each
  std::optional<double> learning_rate;  // defaults to the mode's tuned rate
  Optimizer optimizer = Optimizer::ADAM;
  GradientMethod gradient = GradientMethod::PARAM_SHIFT;
  double fd_step = 1e-4;
  int layers = 2;
  double init_scale = 0.1;  // params start uniform in [-init_scale, init_scale]
  std::uint64_t seed = 0;   // drives the init draw and the sampling order
  std::optional<QnnModel> init_model;  // overrides the random init
  // Trained peak-ansatz parameters per class; required in SUPERPOSITION mode.
  std::optional<ParamMap> qram_params_class0;
  std::optional<ParamMap> qram_params_class1;
};

struct QnnIterate {
  double loss = 0.0;
  double prediction = 0.0;
  int label = 0;
};

struct QnnTrainResult {
  QnnModel model;
  std::vector<QnnIterate> iterates;
  // Simulator-invocation counters; equal across modes at equal budgets.
  long long loss_evaluations = 0;
  long long gradient_evaluations = 0;
};

/// SAMPLING: one gradient step per training example, examples shuffled once
/// and visited cyclically. SUPERPOSITION: classes alternate, each encoded as
/// its trained peak-ansatz state. Both modes issue exactly `budget` loss
/// evaluations plus a fixed number of gradient evaluations per step.
QnnTrainResult train_qnn(const Dataset& d, const QnnTrainConfig& cfg);

enum class Split { TRAIN, TEST };

/// Fraction of the split classified correctly, each example encoded as a
/// basis state. A prediction of exactly zero counts as an error.
double evaluate_accuracy(const QnnModel& m, const Dataset& d, Split split);

/// Plain-text serialization, one key=value per line; full round trip.
std::string qnn_model_to_text(const QnnModel& m);
QnnModel qnn_model_from_text(const std::string& text);

/// Rewrites every entangling phase gate into two CZ conjugated by Hadamards
/// around a middle RZ, dropping a global phase per gate. Layout pass for a
/// CZ-native gate set; other gates pass through untouched.
ParameterizedCircuit compile_entanglers_to_cz(const ParameterizedCircuit& circuit);

}  // namespace eqgan
