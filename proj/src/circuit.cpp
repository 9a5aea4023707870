#include <eqgan/circuit.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <sstream>
#include <stdexcept>

namespace eqgan {

namespace {

struct KindInfo {
  GateKind kind;
  const char* name;
};

constexpr KindInfo kKindTable[] = {
    {GateKind::H, "H"},
    {GateKind::X, "X"},
    {GateKind::RX, "RX"},
    {GateKind::RZ, "RZ"},
    {GateKind::RY, "RY"},
    {GateKind::CZ, "CZ"},
    {GateKind::CNOT, "CNOT"},
    {GateKind::CSWAP_EXP, "CSWAP_EXP"},
    {GateKind::G_ENTANGLE, "G_ENTANGLE"},
    {GateKind::RAW_UNITARY, "RAW_UNITARY"},
};

bool takes_parameter(GateKind kind) {
  switch (kind) {
    case GateKind::RX:
    case GateKind::RZ:
    case GateKind::RY:
    case GateKind::CSWAP_EXP:
    case GateKind::G_ENTANGLE:
      return true;
    default:
      return false;
  }
}

void validate_gate(int n_qubits, const Gate& gate) {
  const std::string name = kind_name(gate.kind);
  const size_t arity = gate.qubits.size();

  for (int q : gate.qubits) {
    if (q < 0 || q >= n_qubits)
      throw std::invalid_argument(name + ": qubit index " + std::to_string(q) +
                                  " out of range for " + std::to_string(n_qubits) +
                                  " qubits");
  }
  std::vector<int> sorted = gate.qubits;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw std::invalid_argument(name + ": duplicate qubit index");

  switch (gate.kind) {
    case GateKind::H:
    case GateKind::X:
    case GateKind::RX:
    case GateKind::RZ:
    case GateKind::RY:
      if (arity != 1) throw std::invalid_argument(name + ": expects exactly 1 qubit");
      break;
    case GateKind::CZ:
    case GateKind::CNOT:
    case GateKind::G_ENTANGLE:
      if (arity != 2) throw std::invalid_argument(name + ": expects exactly 2 qubits");
      break;
    case GateKind::CSWAP_EXP:
      // Odd arity: control followed by swapped pairs. Even arity: pairs only.
      if (arity < 2 || (arity % 2 == 1 && arity < 3))
        throw std::invalid_argument(
            "CSWAP_EXP: expects 2k qubits (pair swaps) or 2k+1 (control plus pairs)");
      break;
    case GateKind::RAW_UNITARY: {
      if (arity < 1) throw std::invalid_argument("RAW_UNITARY: expects at least 1 qubit");
      Eigen::Index dim = Eigen::Index(1) << arity;
      if (gate.matrix.rows() != dim || gate.matrix.cols() != dim)
        throw std::invalid_argument("RAW_UNITARY: matrix dimension does not match qubit count");
      if (!is_unitary(gate.matrix, 1e-10))
        throw std::invalid_argument("RAW_UNITARY: matrix is not unitary within 1e-10");
      break;
    }
  }

  if (takes_parameter(gate.kind)) {
    if (!gate.parameter) throw std::invalid_argument(name + ": missing rotation parameter");
    if (gate.parameter->is_symbolic() && gate.parameter->coeff == 0.0)
      throw std::invalid_argument(name + ": symbolic parameter has zero coefficient");
  } else if (gate.parameter) {
    throw std::invalid_argument(name + ": does not take a parameter");
  }
}

/// Permutation index map of the (controlled) register swap generating
/// CSWAP_EXP. Local ordering: optional control first, then swapped pairs.
Eigen::Index swap_permuted_index(Eigen::Index idx, size_t arity) {
  const bool controlled = arity % 2 == 1;
  const int m = static_cast<int>(arity);
  const int first_pair = controlled ? 1 : 0;
  if (controlled) {
    int control_bit = static_cast<int>((idx >> (m - 1)) & 1);
    if (!control_bit) return idx;
  }
  Eigen::Index out = idx;
  for (int i = first_pair; i < m; i += 2) {
    int pos_a = m - 1 - i;
    int pos_b = m - 1 - (i + 1);
    Eigen::Index bit_a = (idx >> pos_a) & 1;
    Eigen::Index bit_b = (idx >> pos_b) & 1;
    out &= ~((Eigen::Index(1) << pos_a) | (Eigen::Index(1) << pos_b));
    out |= (bit_b << pos_a) | (bit_a << pos_b);
  }
  return out;
}

void apply_gate_in_place(Vector& amps, int n_qubits, const std::vector<int>& qubits,
                         const Matrix& local) {
  const int m = static_cast<int>(qubits.size());
  const Eigen::Index local_dim = Eigen::Index(1) << m;
  const Eigen::Index dim = amps.size();

  Eigen::Index target_mask = 0;
  for (int q : qubits) target_mask |= Eigen::Index(1) << (n_qubits - 1 - q);

  std::vector<Eigen::Index> offsets(local_dim);
  for (Eigen::Index j = 0; j < local_dim; ++j) {
    Eigen::Index off = 0;
    for (int i = 0; i < m; ++i)
      off |= ((j >> (m - 1 - i)) & 1) << (n_qubits - 1 - qubits[i]);
    offsets[j] = off;
  }

  Vector scratch(local_dim);
  for (Eigen::Index base = 0; base < dim; ++base) {
    if (base & target_mask) continue;
    for (Eigen::Index j = 0; j < local_dim; ++j) scratch(j) = amps(base | offsets[j]);
    scratch = (local * scratch).eval();
    for (Eigen::Index j = 0; j < local_dim; ++j) amps(base | offsets[j]) = scratch(j);
  }
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

const char* kind_name(GateKind kind) {
  for (const auto& entry : kKindTable)
    if (entry.kind == kind) return entry.name;
  throw std::invalid_argument("kind_name: unknown gate kind");
}

GateKind kind_from_name(const std::string& name) {
  for (const auto& entry : kKindTable)
    if (name == entry.name) return entry.kind;
  throw std::invalid_argument("unknown gate name '" + name + "'");
}

ParameterizedCircuit::ParameterizedCircuit(int n_qubits) : n_qubits_(n_qubits) {
  detail::check_qubit_count(n_qubits_, "ParameterizedCircuit");
}

void ParameterizedCircuit::add(Gate gate) {
  validate_gate(n_qubits_, gate);
  if (gate.parameter && gate.parameter->is_symbolic()) {
    const std::string& sym = gate.parameter->symbol;
    if (std::find(parameter_names_.begin(), parameter_names_.end(), sym) ==
        parameter_names_.end())
      parameter_names_.push_back(sym);
  }
  gates_.push_back(std::move(gate));
}

void ParameterizedCircuit::add(GateKind kind, std::vector<int> qubits) {
  add(Gate{kind, std::move(qubits), std::nullopt, {}});
}

void ParameterizedCircuit::add(GateKind kind, std::vector<int> qubits, double fixed_angle) {
  add(Gate{kind, std::move(qubits), GateParameter::fixed(fixed_angle), {}});
}

void ParameterizedCircuit::add(GateKind kind, std::vector<int> qubits,
                               const std::string& symbol, double coeff) {
  add(Gate{kind, std::move(qubits), GateParameter::symbolic(symbol, coeff), {}});
}

void ParameterizedCircuit::add_raw_unitary(std::vector<int> qubits, Matrix unitary) {
  add(Gate{GateKind::RAW_UNITARY, std::move(qubits), std::nullopt, std::move(unitary)});
}

int ParameterizedCircuit::multi_qubit_gate_count() const {
  int count = 0;
  for (const Gate& g : gates_)
    if (g.qubits.size() >= 2) ++count;
  return count;
}

double bound_angle(const Gate& gate, const ParamMap& params) {
  if (!gate.parameter) return 0.0;
  if (!gate.parameter->is_symbolic()) return gate.parameter->value;
  auto it = params.find(gate.parameter->symbol);
  if (it == params.end())
    throw std::invalid_argument("unbound circuit parameter '" + gate.parameter->symbol + "'");
  return gate.parameter->coeff * it->second;
}

Matrix gate_matrix(const Gate& gate, const ParamMap& params) {
  const double theta = bound_angle(gate, params);
  const Complex i_unit(0, 1);
  switch (gate.kind) {
    case GateKind::H: {
      Matrix m(2, 2);
      m << 1, 1, 1, -1;
      return m / std::sqrt(2.0);
    }
    case GateKind::X: {
      Matrix m(2, 2);
      m << 0, 1, 1, 0;
      return m;
    }
    case GateKind::RX: {
      Matrix m(2, 2);
      m << std::cos(theta / 2), -i_unit * std::sin(theta / 2), -i_unit * std::sin(theta / 2),
          std::cos(theta / 2);
      return m;
    }
    case GateKind::RY: {
      Matrix m(2, 2);
      m << std::cos(theta / 2), -std::sin(theta / 2), std::sin(theta / 2), std::cos(theta / 2);
      return m;
    }
    case GateKind::RZ: {
      Matrix m = Matrix::Zero(2, 2);
      m(0, 0) = std::exp(-i_unit * (theta / 2));
      m(1, 1) = std::exp(i_unit * (theta / 2));
      return m;
    }
    case GateKind::CZ: {
      Matrix m = Matrix::Identity(4, 4);
      m(3, 3) = -1;
      return m;
    }
    case GateKind::CNOT: {
      Matrix m = Matrix::Zero(4, 4);
      m(0, 0) = 1;
      m(1, 1) = 1;
      m(2, 3) = 1;
      m(3, 2) = 1;
      return m;
    }
    case GateKind::G_ENTANGLE: {
      Matrix m = Matrix::Identity(4, 4);
      m(1, 1) = std::exp(-i_unit * theta);
      m(2, 2) = std::exp(-i_unit * theta);
      return m;
    }
    case GateKind::CSWAP_EXP: {
      // The generator is the (controlled) product of pair swaps, an
      // involutory permutation P, so exp(-i theta P) = cos(theta) I
      // - i sin(theta) P.
      const size_t arity = gate.qubits.size();
      const Eigen::Index dim = Eigen::Index(1) << arity;
      Matrix m = Matrix::Identity(dim, dim) * std::cos(theta);
      for (Eigen::Index idx = 0; idx < dim; ++idx)
        m(swap_permuted_index(idx, arity), idx) -= i_unit * std::sin(theta);
      return m;
    }
    case GateKind::RAW_UNITARY:
      return gate.matrix;
  }
  throw std::invalid_argument("gate_matrix: unknown gate kind");
}

Matrix embed_gate(int n_qubits, const std::vector<int>& qubits, const Matrix& local) {
  const Eigen::Index dim = Eigen::Index(1) << n_qubits;
  Matrix full = Matrix::Zero(dim, dim);
  Vector basis = Vector::Zero(dim);
  for (Eigen::Index col = 0; col < dim; ++col) {
    basis.setZero();
    basis(col) = Complex(1, 0);
    apply_gate_in_place(basis, n_qubits, qubits, local);
    full.col(col) = basis;
  }
  return full;
}

Matrix circuit_unitary(const ParameterizedCircuit& circuit, const ParamMap& params) {
  const Eigen::Index dim = Eigen::Index(1) << circuit.n_qubits();
  Matrix u = Matrix::Identity(dim, dim);
  for (const Gate& gate : circuit.gates())
    u = (embed_gate(circuit.n_qubits(), gate.qubits, gate_matrix(gate, params)) * u).eval();
  return u;
}

StateVector simulate(const ParameterizedCircuit& circuit, const ParamMap& params,
                     const StateVector& initial) {
  if (initial.n_qubits() != circuit.n_qubits())
    throw std::invalid_argument("simulate: initial state width does not match circuit");
  for (const std::string& sym : circuit.parameter_names())
    if (params.find(sym) == params.end())
      throw std::invalid_argument("simulate: unbound circuit parameter '" + sym + "'");
  Vector amps = initial.amplitudes();
  for (const Gate& gate : circuit.gates())
    apply_gate_in_place(amps, circuit.n_qubits(), gate.qubits, gate_matrix(gate, params));
  return StateVector(circuit.n_qubits(), std::move(amps));
}

StateVector simulate(const ParameterizedCircuit& circuit, const ParamMap& params) {
  return simulate(circuit, params, StateVector::zero_state(circuit.n_qubits()));
}

double prob_zero(const StateVector& state, int qubit) {
  const int n = state.n_qubits();
  if (qubit < 0 || qubit >= n) throw std::invalid_argument("prob_zero: qubit out of range");
  const Eigen::Index mask = Eigen::Index(1) << (n - 1 - qubit);
  double p = 0.0;
  for (Eigen::Index i = 0; i < state.dim(); ++i)
    if (!(i & mask)) p += std::norm(state.amplitudes()(i));
  return p;
}

ParameterizedCircuit apply_noise(const ParameterizedCircuit& circuit, const NoiseModel& noise) {
  if (noise.rz_bias_std < 0)
    throw std::invalid_argument("NoiseModel: rz_bias_std must be non-negative");
  std::mt19937_64 rng(noise.seed);
  std::normal_distribution<double> gauss(noise.rz_bias_mean, noise.rz_bias_std);
  ParameterizedCircuit out(circuit.n_qubits());
  for (const Gate& gate : circuit.gates()) {
    out.add(gate);
    if (noise.target_kinds.count(gate.kind)) {
      for (int q : gate.qubits) {
        double eps = noise.rz_bias_std == 0.0 ? noise.rz_bias_mean : gauss(rng);
        out.add(GateKind::RZ, {q}, eps);
      }
    }
  }
  return out;
}

std::string to_text(const ParameterizedCircuit& circuit) {
  std::ostringstream os;
  for (const Gate& gate : circuit.gates()) {
    os << kind_name(gate.kind) << ' ';
    for (size_t i = 0; i < gate.qubits.size(); ++i) {
      if (i) os << ',';
      os << gate.qubits[i];
    }
    if (gate.parameter) {
      os << " param=";
      if (gate.parameter->is_symbolic()) {
        if (gate.parameter->coeff != 1.0) os << format_double(gate.parameter->coeff) << '*';
        os << gate.parameter->symbol;
      } else {
        os << format_double(gate.parameter->value);
      }
    }
    if (gate.kind == GateKind::RAW_UNITARY) {
      os << " matrix=";
      bool first = true;
      for (Eigen::Index r = 0; r < gate.matrix.rows(); ++r)
        for (Eigen::Index c = 0; c < gate.matrix.cols(); ++c) {
          if (!first) os << ',';
          first = false;
          os << format_double(gate.matrix(r, c).real()) << ':'
             << format_double(gate.matrix(r, c).imag());
        }
    }
    os << '\n';
  }
  return os.str();
}

namespace {

bool parse_full_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size();
}

bool valid_symbol(const std::string& s) {
  if (s.empty()) return false;
  if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_') return false;
  for (char c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  return true;
}

[[noreturn]] void parse_fail(int line_no, const std::string& message) {
  throw std::invalid_argument("line " + std::to_string(line_no) + ": " + message);
}

GateParameter parse_parameter(int line_no, const std::string& token) {
  double v = 0.0;
  if (parse_full_double(token, v)) return GateParameter::fixed(v);
  auto star = token.find('*');
  if (star != std::string::npos) {
    double coeff = 0.0;
    if (!parse_full_double(token.substr(0, star), coeff))
      parse_fail(line_no, "bad parameter coefficient '" + token.substr(0, star) + "'");
    std::string sym = token.substr(star + 1);
    if (!valid_symbol(sym)) parse_fail(line_no, "bad parameter symbol '" + sym + "'");
    return GateParameter::symbolic(sym, coeff);
  }
  if (!valid_symbol(token)) parse_fail(line_no, "bad parameter token '" + token + "'");
  return GateParameter::symbolic(token);
}

Matrix parse_matrix(int line_no, const std::string& body, size_t arity) {
  const Eigen::Index dim = Eigen::Index(1) << arity;
  std::vector<Complex> entries;
  std::istringstream is(body);
  std::string cell;
  while (std::getline(is, cell, ',')) {
    auto colon = cell.find(':');
    double re = 0.0, im = 0.0;
    if (colon == std::string::npos || !parse_full_double(cell.substr(0, colon), re) ||
        !parse_full_double(cell.substr(colon + 1), im))
      parse_fail(line_no, "bad matrix cell '" + cell + "'");
    entries.emplace_back(re, im);
  }
  if (static_cast<Eigen::Index>(entries.size()) != dim * dim)
    parse_fail(line_no, "matrix entry count does not match gate arity");
  Matrix m(dim, dim);
  for (Eigen::Index r = 0; r < dim; ++r)
    for (Eigen::Index c = 0; c < dim; ++c) m(r, c) = entries[r * dim + c];
  return m;
}

}  // namespace

ParameterizedCircuit circuit_from_text(const std::string& text, int n_qubits) {
  struct PendingGate {
    int line_no;
    Gate gate;
  };
  std::vector<PendingGate> pending;
  int max_qubit = -1;

  std::istringstream is(text);
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string head;
    if (!(ls >> head) || head[0] == '#') continue;

    Gate gate;
    try {
      gate.kind = kind_from_name(head);
    } catch (const std::invalid_argument& e) {
      parse_fail(line_no, e.what());
    }

    std::string qubit_list;
    if (!(ls >> qubit_list)) parse_fail(line_no, "missing qubit list");
    std::istringstream qs(qubit_list);
    std::string q;
    while (std::getline(qs, q, ',')) {
      double qv = 0.0;
      if (!parse_full_double(q, qv) || qv != std::floor(qv) || qv < 0)
        parse_fail(line_no, "bad qubit index '" + q + "'");
      gate.qubits.push_back(static_cast<int>(qv));
      max_qubit = std::max(max_qubit, gate.qubits.back());
    }

    std::string token;
    while (ls >> token) {
      if (token.rfind("param=", 0) == 0) {
        gate.parameter = parse_parameter(line_no, token.substr(6));
      } else if (token.rfind("matrix=", 0) == 0) {
        gate.matrix = parse_matrix(line_no, token.substr(7), gate.qubits.size());
      } else {
        parse_fail(line_no, "unknown token '" + token + "'");
      }
    }
    pending.push_back({line_no, std::move(gate)});
  }

  int width = n_qubits >= 0 ? n_qubits : max_qubit + 1;
  if (width < 1) throw std::invalid_argument("circuit text contains no gates");
  ParameterizedCircuit circuit(width);
  for (auto& p : pending) {
    try {
      circuit.add(std::move(p.gate));
    } catch (const std::invalid_argument& e) {
      parse_fail(p.line_no, e.what());
    }
  }
  return circuit;
}

}  // namespace eqgan
