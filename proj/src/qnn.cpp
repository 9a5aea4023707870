#include <eqgan/qnn.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <stdexcept>

namespace eqgan {
namespace {

void validate_shape(int n_data_qubits, int layers) {
  if (n_data_qubits < 1 || n_data_qubits + 1 > kMaxQubits) {
    throw std::invalid_argument("QnnModel: data register plus readout must fit in " +
                                std::to_string(kMaxQubits) + " qubits");
  }
  if (layers < 1) throw std::invalid_argument("QnnModel: layers must be at least 1");
}

StateVector with_readout(const StateVector& input) {
  Vector joint(input.dim() * 2);
  joint.setZero();
  for (Eigen::Index i = 0; i < input.dim(); ++i) {
    joint[2 * i] = input.amplitudes()[i];  // readout is the least significant bit
  }
  return StateVector(input.n_qubits() + 1, std::move(joint));
}

ParamMap to_map(const std::vector<std::string>& names, const Eigen::VectorXd& params) {
  ParamMap m;
  for (Eigen::Index i = 0; i < params.size(); ++i) m[names[i]] = params[i];
  return m;
}

double parse_strict_double(const std::string& text) {
  std::size_t used = 0;
  double v = std::stod(text, &used);
  if (used != text.size()) throw std::invalid_argument("trailing characters after number");
  return v;
}

}  // namespace

QnnModel make_qnn_model(int n_data_qubits, int layers) {
  validate_shape(n_data_qubits, layers);
  QnnModel m;
  m.n_data_qubits = n_data_qubits;
  m.layers = layers;
  m.params = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(layers) * n_data_qubits);
  return m;
}

ParameterizedCircuit qnn_circuit(const QnnModel& m) {
  validate_shape(m.n_data_qubits, m.layers);
  if (m.params.size() != static_cast<Eigen::Index>(m.layers) * m.n_data_qubits) {
    throw std::invalid_argument("QnnModel: params length must be layers * n_data_qubits");
  }
  const int readout = m.n_data_qubits;
  ParameterizedCircuit c(m.n_data_qubits + 1);
  c.add(GateKind::H, {readout});
  for (int layer = 0; layer < m.layers; ++layer) {
    for (int k = 0; k < m.n_data_qubits; ++k) {
      c.add(GateKind::G_ENTANGLE, {k, readout},
            "g_" + std::to_string(layer * m.n_data_qubits + k));
    }
  }
  c.add(GateKind::H, {readout});
  return c;
}

double qnn_predict(const QnnModel& m, const StateVector& input) {
  if (input.n_qubits() != m.n_data_qubits) {
    throw std::invalid_argument("qnn_predict: input has " + std::to_string(input.n_qubits()) +
                                " qubits, model expects " + std::to_string(m.n_data_qubits));
  }
  ParameterizedCircuit c = qnn_circuit(m);
  StateVector out = simulate(c, to_map(c.parameter_names(), m.params), with_readout(input));
  return 2.0 * prob_zero(out, m.n_data_qubits) - 1.0;
}

Eigen::VectorXd qnn_predict_gradient(const QnnModel& m, const StateVector& input,
                                     GradientMethod method, double fd_step) {
  if (input.n_qubits() != m.n_data_qubits) {
    throw std::invalid_argument("qnn_predict_gradient: input width mismatch");
  }
  StateVector joint = with_readout(input);
  const int readout = m.n_data_qubits;
  CircuitObjective objective{
      qnn_circuit(m), [joint, readout](const ParameterizedCircuit& c, const ParamMap& p) {
        return 2.0 * prob_zero(simulate(c, p, joint), readout) - 1.0;
      }};
  const auto& names = objective.circuit.parameter_names();
  return gradient(objective, names, to_map(names, m.params), method, fd_step);
}

double hinge_loss(double prediction, int label) {
  return std::max(0.0, 1.0 - label * prediction);
}

int class_label(int class_id) {
  if (class_id == 0) return 1;
  if (class_id == 1) return -1;
  throw std::invalid_argument("class_label: class_id must be 0 or 1");
}

const char* qnn_mode_name(QnnTrainMode mode) {
  switch (mode) {
    case QnnTrainMode::SAMPLING: return "SAMPLING";
    case QnnTrainMode::SUPERPOSITION: return "SUPERPOSITION";
  }
  throw std::invalid_argument("unknown QnnTrainMode");
}

QnnTrainMode qnn_mode_from_name(const std::string& name) {
  if (name == "SAMPLING") return QnnTrainMode::SAMPLING;
  if (name == "SUPERPOSITION") return QnnTrainMode::SUPERPOSITION;
  throw std::invalid_argument("unknown QNN training mode: " + name);
}

QnnTrainResult train_qnn(const Dataset& d, const QnnTrainConfig& cfg) {
  if (cfg.budget < 0) throw std::invalid_argument("train_qnn: budget must be non-negative");
  if (cfg.fd_step <= 0.0) throw std::invalid_argument("train_qnn: fd_step must be positive");
  if (cfg.learning_rate && *cfg.learning_rate <= 0.0) {
    throw std::invalid_argument("train_qnn: learning_rate must be positive");
  }
  if (cfg.init_scale < 0.0) throw std::invalid_argument("train_qnn: init_scale must be non-negative");

  QnnTrainResult result;
  std::mt19937_64 rng(cfg.seed);
  if (cfg.init_model) {
    if (cfg.init_model->n_data_qubits != d.n_qubits) {
      throw std::invalid_argument("train_qnn: init_model width does not match the dataset");
    }
    result.model = *cfg.init_model;
    validate_shape(result.model.n_data_qubits, result.model.layers);
  } else {
    result.model = make_qnn_model(d.n_qubits, cfg.layers);
    std::uniform_real_distribution<double> init(-cfg.init_scale, cfg.init_scale);
    for (Eigen::Index i = 0; i < result.model.params.size(); ++i) {
      result.model.params[i] = init(rng);
    }
  }
  const double lr = cfg.learning_rate.value_or(cfg.mode == QnnTrainMode::SAMPLING
                                                   ? kQnnSamplingLearningRate
                                                   : kQnnSuperpositionLearningRate);

  // Per-iteration inputs.
  std::vector<int> order;
  StateVector class_states[2] = {StateVector::zero_state(1), StateVector::zero_state(1)};
  if (cfg.mode == QnnTrainMode::SAMPLING) {
    if (cfg.budget > 0 && d.train_indices.empty()) {
      throw std::invalid_argument("train_qnn: sampling mode needs training examples");
    }
    order = d.train_indices;
    std::shuffle(order.begin(), order.end(), rng);
  } else {
    if (!cfg.qram_params_class0 || !cfg.qram_params_class1) {
      throw std::invalid_argument(
          "train_qnn: superposition mode needs trained peak-ansatz parameters for both classes");
    }
    class_states[0] = simulate(build_peak_ansatz(d.n_qubits, 0), *cfg.qram_params_class0);
    class_states[1] = simulate(build_peak_ansatz(d.n_qubits, 1), *cfg.qram_params_class1);
  }

  const int readout = result.model.n_data_qubits;
  ParameterizedCircuit circuit = qnn_circuit(result.model);
  const std::vector<std::string> names = circuit.parameter_names();
  Eigen::VectorXd& params = result.model.params;

  // Adam state (unused under SGD).
  Eigen::VectorXd adam_m = Eigen::VectorXd::Zero(params.size());
  Eigen::VectorXd adam_v = Eigen::VectorXd::Zero(params.size());
  constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kEps = 1e-8;

  StateVector joint = StateVector::zero_state(readout + 1);
  auto run = [&](const ParameterizedCircuit& c, const ParamMap& p) {
    return 2.0 * prob_zero(simulate(c, p, joint), readout) - 1.0;
  };
  CircuitObjective counted{circuit, [&](const ParameterizedCircuit& c, const ParamMap& p) {
                             ++result.gradient_evaluations;
                             return run(c, p);
                           }};

  for (int iter = 0; iter < cfg.budget; ++iter) {
    int label;
    if (cfg.mode == QnnTrainMode::SAMPLING) {
      const int idx = order[iter % order.size()];
      joint = with_readout(StateVector::basis_state(d.n_qubits, d.values[idx]));
      label = class_label(d.labels[idx]);
    } else {
      const int class_id = iter % 2;
      joint = with_readout(class_states[class_id]);
      label = class_label(class_id);
    }

    const ParamMap at = to_map(names, params);
    ++result.loss_evaluations;
    const double pred = run(circuit, at);
    result.iterates.push_back({hinge_loss(pred, label), pred, label});

    // The shifted evaluations run on every iteration so each step costs the
    // same number of circuit invocations regardless of the margin; a
    // satisfied margin just zeroes the classical factor.
    Eigen::VectorXd grad_pred = gradient(counted, names, at, cfg.gradient, cfg.fd_step);
    const double factor = 1.0 - label * pred > 0.0 ? -static_cast<double>(label) : 0.0;
    Eigen::VectorXd g = factor * grad_pred;

    if (cfg.optimizer == Optimizer::SGD) {
      params -= lr * g;
    } else {
      adam_m = kBeta1 * adam_m + (1.0 - kBeta1) * g;
      adam_v = kBeta2 * adam_v + (1.0 - kBeta2) * g.cwiseProduct(g).eval();
      const double t = iter + 1;
      const Eigen::VectorXd m_hat = adam_m / (1.0 - std::pow(kBeta1, t));
      const Eigen::VectorXd v_hat = adam_v / (1.0 - std::pow(kBeta2, t));
      params -= lr * (m_hat.array() / (v_hat.array().sqrt() + kEps)).matrix();
    }
  }
  return result;
}

double evaluate_accuracy(const QnnModel& m, const Dataset& d, Split split) {
  const std::vector<int>& indices =
      split == Split::TRAIN ? d.train_indices : d.test_indices;
  if (indices.empty()) throw std::invalid_argument("evaluate_accuracy: empty split");
  int correct = 0;
  for (int idx : indices) {
    const double pred = qnn_predict(m, StateVector::basis_state(d.n_qubits, d.values[idx]));
    const int label = class_label(d.labels[idx]);
    if ((pred > 0.0 && label > 0) || (pred < 0.0 && label < 0)) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(indices.size());
}

std::string qnn_model_to_text(const QnnModel& m) {
  std::ostringstream out;
  out << "n_data_qubits=" << m.n_data_qubits << "\n";
  out << "layers=" << m.layers << "\n";
  char buf[64];
  for (Eigen::Index i = 0; i < m.params.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", m.params[i]);
    out << "g_" << i << "=" << buf << "\n";
  }
  return out.str();
}

QnnModel qnn_model_from_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int n_data_qubits = -1, layers = -1;
  std::map<long, double> values;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("model text line " + std::to_string(line_no) +
                                  ": expected key=value");
    }
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 1);
    try {
      if (key == "n_data_qubits") {
        n_data_qubits = static_cast<int>(parse_strict_double(value));
      } else if (key == "layers") {
        layers = static_cast<int>(parse_strict_double(value));
      } else if (key.rfind("g_", 0) == 0) {
        values[std::stol(key.substr(2))] = parse_strict_double(value);
      } else {
        throw std::invalid_argument("unknown key '" + key + "'");
      }
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("model text line " + std::to_string(line_no) + ": " +
                                  e.what());
    }
  }
  if (n_data_qubits < 0 || layers < 0) {
    throw std::invalid_argument("model text: missing n_data_qubits or layers");
  }
  QnnModel m = make_qnn_model(n_data_qubits, layers);
  if (static_cast<Eigen::Index>(values.size()) != m.params.size()) {
    throw std::invalid_argument("model text: expected " + std::to_string(m.params.size()) +
                                " couplings, got " + std::to_string(values.size()));
  }
  for (const auto& [i, v] : values) {
    if (i < 0 || i >= m.params.size()) {
      throw std::invalid_argument("model text: coupling index g_" + std::to_string(i) +
                                  " out of range");
    }
    m.params[i] = v;
  }
  return m;
}

ParameterizedCircuit compile_entanglers_to_cz(const ParameterizedCircuit& circuit) {
  ParameterizedCircuit out(circuit.n_qubits());
  for (const Gate& gate : circuit.gates()) {
    if (gate.kind != GateKind::G_ENTANGLE) {
      out.add(gate);
      continue;
    }
    const int a = gate.qubits[0];
    const int b = gate.qubits[1];
    // diag(1, e^{-it}, e^{-it}, 1) equals exp(+i t ZZ / 2) up to the global
    // phase e^{-it/2}, and the ZZ rotation is an RZ conjugated by CNOT =
    // (H on target) CZ (H on target).
    GateParameter inner = *gate.parameter;
    if (inner.is_symbolic()) {
      inner.coeff = -inner.coeff;
    } else {
      inner.value = -inner.value;
    }
    out.add(GateKind::H, {b});
    out.add(GateKind::CZ, {a, b});
    out.add(GateKind::H, {b});
    out.add(Gate{GateKind::RZ, {b}, inner, {}});
    out.add(GateKind::H, {b});
    out.add(GateKind::CZ, {a, b});
    out.add(GateKind::H, {b});
  }
  return out;
}

}  // namespace eqgan
