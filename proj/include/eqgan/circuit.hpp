#pragma once

// Gate-level circuit intermediate representation and dense simulator.
//
// Gates act on explicit qubit index lists. For multi-qubit gates the first
// listed qubit is the most significant bit of the gate's local basis index,
// matching the register-level convention in state.hpp.

#include <eqgan/state.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace eqgan {

enum class GateKind { H, X, RX, RZ, RY, CZ, CNOT, CSWAP_EXP, G_ENTANGLE, RAW_UNITARY };

const char* kind_name(GateKind kind);
GateKind kind_from_name(const std::string& name);

/// Rotation angle of a gate: either a fixed value or coeff * (named symbol).
struct GateParameter {
  std::string symbol;  // empty means fixed
  double coeff = 1.0;  // scales the bound symbol value
  double value = 0.0;  // fixed angle when symbol is empty

  bool is_symbolic() const { return !symbol.empty(); }

  static GateParameter fixed(double v) { return GateParameter{"", 1.0, v}; }
  static GateParameter symbolic(std::string name, double coeff = 1.0) {
    return GateParameter{std::move(name), coeff, 0.0};
  }
};

struct Gate {
  GateKind kind = GateKind::H;
  std::vector<int> qubits;
  std::optional<GateParameter> parameter;
  Matrix matrix;  // RAW_UNITARY payload, unused otherwise
};

/// Symbol bindings for one evaluation of a parameterized circuit.
/// Ordered map so that iteration order is deterministic.
using ParamMap = std::map<std::string, double>;

/// Ordered list of gates over a fixed-width register with named parameters.
class ParameterizedCircuit {
 public:
  explicit ParameterizedCircuit(int n_qubits);

  /// Appends a gate after validating arity, qubit indices and parameter shape.
  void add(Gate gate);

  void add(GateKind kind, std::vector<int> qubits);
  void add(GateKind kind, std::vector<int> qubits, double fixed_angle);
  void add(GateKind kind, std::vector<int> qubits, const std::string& symbol,
           double coeff = 1.0);
  void add_raw_unitary(std::vector<int> qubits, Matrix unitary);

  int n_qubits() const { return n_qubits_; }
  const std::vector<Gate>& gates() const { return gates_; }

  /// Distinct symbol names in order of first appearance.
  const std::vector<std::string>& parameter_names() const { return parameter_names_; }

  /// Number of gates acting on two or more qubits.
  int multi_qubit_gate_count() const;

 private:
  int n_qubits_;
  std::vector<Gate> gates_;
  std::vector<std::string> parameter_names_;
};

/// Systematic coherent-error model: after every gate whose kind is in
/// `target_kinds`, an RZ(eps) is inserted on each operand qubit with eps
/// drawn once per insertion from Normal(rz_bias_mean, rz_bias_std).
struct NoiseModel {
  double rz_bias_mean = 0.3;
  double rz_bias_std = 0.05;
  std::set<GateKind> target_kinds = {GateKind::CZ};
  std::uint64_t seed = 0;
};

/// Resolved rotation angle of a gate under the given bindings.
double bound_angle(const Gate& gate, const ParamMap& params);

/// Local unitary of a single gate (dimension 2^arity).
Matrix gate_matrix(const Gate& gate, const ParamMap& params = {});

/// Expands a local gate unitary to the full 2^n register space.
Matrix embed_gate(int n_qubits, const std::vector<int>& qubits, const Matrix& local);

/// Full-register unitary of the circuit under the given bindings.
Matrix circuit_unitary(const ParameterizedCircuit& circuit, const ParamMap& params = {});

/// Applies the circuit to an initial state. All symbols must be bound.
StateVector simulate(const ParameterizedCircuit& circuit, const ParamMap& params,
                     const StateVector& initial);

/// Applies the circuit to |0...0>.
StateVector simulate(const ParameterizedCircuit& circuit, const ParamMap& params = {});

/// Marginal probability that measuring `qubit` in the computational basis
/// yields 0.
double prob_zero(const StateVector& state, int qubit);

/// Rewrites the circuit with noise insertions. Deterministic given the seed.
ParameterizedCircuit apply_noise(const ParameterizedCircuit& circuit, const NoiseModel& noise);

/// Line-oriented text form: one gate per line,
///   KIND q0[,q1,...] [param=<float|symbol|coeff*symbol>]
/// RAW_UNITARY gates carry their matrix as matrix=re:im,re:im,... row-major.
std::string to_text(const ParameterizedCircuit& circuit);

/// Parses the text form. When n_qubits is negative the register width is
/// inferred as max qubit index + 1. Blank lines and lines starting with '#'
/// are skipped. Errors name the offending line.
ParameterizedCircuit circuit_from_text(const std::string& text, int n_qubits = -1);

}  // namespace eqgan
