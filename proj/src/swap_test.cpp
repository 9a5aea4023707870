#include <eqgan/swap_test.hpp>

#include <cmath>
#include <stdexcept>

namespace eqgan {

namespace {

void validate_spec(const DiscriminatorSpec& spec) {
  if (spec.n_data_qubits < 1)
    throw std::invalid_argument("DiscriminatorSpec: n_data_qubits must be positive");
  if (discriminator_width(spec) > kMaxQubits)
    throw std::invalid_argument("DiscriminatorSpec: register exceeds the simulator cap");
}

}  // namespace

const char* form_name(DiscriminatorForm form) {
  switch (form) {
    case DiscriminatorForm::ANCILLA_EXP_SWAP: return "ANCILLA_EXP_SWAP";
    case DiscriminatorForm::DESTRUCTIVE: return "DESTRUCTIVE";
    case DiscriminatorForm::CZ_WITH_PHASES: return "CZ_WITH_PHASES";
  }
  throw std::invalid_argument("form_name: unknown discriminator form");
}

DiscriminatorForm form_from_name(const std::string& name) {
  for (DiscriminatorForm f : {DiscriminatorForm::ANCILLA_EXP_SWAP, DiscriminatorForm::DESTRUCTIVE,
                              DiscriminatorForm::CZ_WITH_PHASES})
    if (name == form_name(f)) return f;
  throw std::invalid_argument("unknown discriminator form '" + name + "'");
}

int discriminator_width(const DiscriminatorSpec& spec) {
  return 2 * spec.n_data_qubits + (spec.form == DiscriminatorForm::ANCILLA_EXP_SWAP ? 1 : 0);
}

int ancilla_index(const DiscriminatorSpec& spec) {
  if (spec.form != DiscriminatorForm::ANCILLA_EXP_SWAP)
    throw std::invalid_argument("ancilla_index: this discriminator form has no ancilla");
  return 2 * spec.n_data_qubits;
}

ParameterizedCircuit build_discriminator(const DiscriminatorSpec& spec) {
  validate_spec(spec);
  const int n = spec.n_data_qubits;
  ParameterizedCircuit circuit(discriminator_width(spec));

  switch (spec.form) {
    case DiscriminatorForm::ANCILLA_EXP_SWAP: {
      const int anc = 2 * n;
      // One controlled exponential of the full register swap. Splitting
      // it into per-pair gates would not preserve the closed-form pass
      // probability for multi-qubit registers.
      std::vector<int> qubits{anc};
      for (int k = 0; k < n; ++k) {
        qubits.push_back(k);      // true_k
        qubits.push_back(n + k);  // fake_k
      }
      circuit.add(GateKind::H, {anc});
      circuit.add(GateKind::CSWAP_EXP, qubits, "theta_d");
      circuit.add(GateKind::H, {anc});
      break;
    }
    case DiscriminatorForm::DESTRUCTIVE: {
      for (int k = 0; k < n; ++k) {
        circuit.add(GateKind::CNOT, {n + k, k});
        circuit.add(GateKind::H, {n + k});
      }
      break;
    }
    case DiscriminatorForm::CZ_WITH_PHASES: {
      for (int k = 0; k < n; ++k) {
        circuit.add(GateKind::H, {k});
        circuit.add(GateKind::CZ, {n + k, k});
        circuit.add(GateKind::RZ, {n + k}, "phi_" + std::to_string(2 * k));
        circuit.add(GateKind::RZ, {k}, "phi_" + std::to_string(2 * k + 1));
        circuit.add(GateKind::H, {k});
        circuit.add(GateKind::H, {n + k});
      }
      break;
    }
  }
  return circuit;
}

ParamMap optimal_discriminator_params(const DiscriminatorSpec& spec) {
  validate_spec(spec);
  ParamMap params;
  switch (spec.form) {
    case DiscriminatorForm::ANCILLA_EXP_SWAP:
      params["theta_d"] = std::acos(-1.0) / 2;
      break;
    case DiscriminatorForm::DESTRUCTIVE:
      break;
    case DiscriminatorForm::CZ_WITH_PHASES:
      for (int i = 0; i < 2 * spec.n_data_qubits; ++i)
        params["phi_" + std::to_string(i)] = 0.0;
      break;
  }
  return params;
}

StateVector joint_input(const DiscriminatorSpec& spec, const StateVector& true_state,
                        const StateVector& fake_state) {
  validate_spec(spec);
  const int n = spec.n_data_qubits;
  if (true_state.n_qubits() != n || fake_state.n_qubits() != n)
    throw std::invalid_argument("joint_input: state width does not match the spec");
  Vector amps = kron(true_state.amplitudes(), fake_state.amplitudes());
  if (spec.form == DiscriminatorForm::ANCILLA_EXP_SWAP) {
    Vector anc = Vector::Zero(2);
    anc(0) = Complex(1, 0);
    amps = kron(amps, anc).eval();
  }
  return StateVector(discriminator_width(spec), std::move(amps));
}

double even_pair_parity_probability(const StateVector& state, int n_data_qubits) {
  const int n = n_data_qubits;
  if (state.n_qubits() != 2 * n)
    throw std::invalid_argument("even_pair_parity_probability: state must hold 2n qubits");
  double p = 0.0;
  for (Eigen::Index idx = 0; idx < state.dim(); ++idx) {
    // Pair k fires when both true_k (bit position 2n-1-k) and fake_k
    // (position n-1-k) read one.
    Eigen::Index fired = (idx >> n) & idx & ((Eigen::Index(1) << n) - 1);
    int parity = 0;
    for (Eigen::Index b = fired; b; b >>= 1) parity ^= static_cast<int>(b & 1);
    if (!parity) p += std::norm(state.amplitudes()(idx));
  }
  return p;
}

double discriminator_pass_probability(const DiscriminatorSpec& spec,
                                      const ParameterizedCircuit& circuit,
                                      const ParamMap& params, const StateVector& true_state,
                                      const StateVector& fake_state) {
  if (circuit.n_qubits() != discriminator_width(spec))
    throw std::invalid_argument(
        "discriminator_pass_probability: circuit width does not match the spec");
  StateVector out = simulate(circuit, params, joint_input(spec, true_state, fake_state));
  if (spec.form == DiscriminatorForm::ANCILLA_EXP_SWAP)
    return prob_zero(out, ancilla_index(spec));
  return even_pair_parity_probability(out, spec.n_data_qubits);
}

double discriminator_pass_probability(const DiscriminatorSpec& spec, const ParamMap& params,
                                      const StateVector& true_state,
                                      const StateVector& fake_state) {
  return discriminator_pass_probability(spec, build_discriminator(spec), params, true_state,
                                        fake_state);
}

double swap_test_pass_probability(double theta_d, double fidelity) {
  double s = std::sin(theta_d);
  double c = std::cos(theta_d);
  return 0.5 * (1.0 + c * c + s * s * fidelity);
}

}  // namespace eqgan
