#include <eqgan/training.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace eqgan {

namespace {

const double kPi = std::acos(-1.0);

struct ModeInfo {
  TrainMode mode;
  const char* name;
};

constexpr ModeInfo kModeTable[] = {
    {TrainMode::EQGAN, "EQGAN"},
    {TrainMode::FROZEN_SWAP, "FROZEN_SWAP"},
    {TrainMode::QUGAN_FULL, "QUGAN_FULL"},
    {TrainMode::QUGAN_PARTIAL, "QUGAN_PARTIAL"},
};

void validate_config(const TrainingConfig& cfg) {
  if (cfg.learning_rate_g <= 0 || cfg.learning_rate_d <= 0)
    throw std::invalid_argument("TrainingConfig: learning rates must be positive");
  if (cfg.fd_step <= 0) throw std::invalid_argument("TrainingConfig: fd_step must be positive");
  if (cfg.outer_iterations < 1)
    throw std::invalid_argument("TrainingConfig: outer_iterations must be at least 1");
  if (cfg.epochs_per_phase.generator < 1 || cfg.epochs_per_phase.discriminator < 1)
    throw std::invalid_argument("TrainingConfig: epochs_per_phase counts must be at least 1");
  if (cfg.shots < 0) throw std::invalid_argument("TrainingConfig: shots must be non-negative");
  if (cfg.pretrain_iterations &&
      (*cfg.pretrain_iterations < 0 || *cfg.pretrain_iterations > cfg.outer_iterations))
    throw std::invalid_argument(
        "TrainingConfig: pretrain_iterations must lie in [0, outer_iterations]");
}

DensityMatrix target_density(const TargetState& target) {
  if (std::holds_alternative<DensityMatrix>(target)) return std::get<DensityMatrix>(target);
  return to_density(std::get<StateVector>(target));
}

const StateVector& target_pure(const TargetState& target) {
  if (!std::holds_alternative<StateVector>(target))
    throw std::invalid_argument("this training mode compares pure states; pass a StateVector");
  return std::get<StateVector>(target);
}

double fidelity_against(const StateVector& generated, const TargetState& target) {
  if (std::holds_alternative<StateVector>(target))
    return fidelity_pure(generated, std::get<StateVector>(target));
  const DensityMatrix& sigma = std::get<DensityMatrix>(target);
  if (sigma.n_qubits() != generated.n_qubits())
    throw std::invalid_argument("fidelity: register widths differ");
  const Vector& a = generated.amplitudes();
  return (a.adjoint() * sigma.matrix() * a)(0, 0).real();
}

/// Fill every listed symbol: user value if given, else the fallback map,
/// else zero. Unknown user keys are a symbol mismatch.
ParamMap resolve_init(const std::vector<std::string>& names, const ParamMap& given,
                      const ParamMap& fallback, const char* who) {
  ParamMap out;
  for (const std::string& name : names) {
    auto it = given.find(name);
    if (it != given.end()) {
      out[name] = it->second;
    } else {
      auto fb = fallback.find(name);
      out[name] = fb != fallback.end() ? fb->second : 0.0;
    }
  }
  for (const auto& [key, value] : given) {
    (void)value;
    if (std::find(names.begin(), names.end(), key) == names.end())
      throw std::invalid_argument(std::string(who) + ": unknown parameter '" + key + "'");
  }
  return out;
}

struct ParamOptimizer {
  Optimizer kind = Optimizer::SGD;
  double lr = 0.0;
  std::map<std::string, double> m, v;
  int t = 0;

  void step(ParamMap& params, const std::vector<std::string>& names,
            const Eigen::VectorXd& grad) {
    ++t;
    for (size_t i = 0; i < names.size(); ++i) {
      double g = grad(static_cast<Eigen::Index>(i));
      if (kind == Optimizer::SGD) {
        params[names[i]] -= lr * g;
        continue;
      }
      double& mi = m[names[i]];
      double& vi = v[names[i]];
      mi = 0.9 * mi + 0.1 * g;
      vi = 0.999 * vi + 0.001 * g * g;
      double mhat = mi / (1.0 - std::pow(0.9, t));
      double vhat = vi / (1.0 - std::pow(0.999, t));
      params[names[i]] -= lr * mhat / (std::sqrt(vhat) + 1e-8);
    }
  }
};

ParameterizedCircuit with_pinned_gate(const ParameterizedCircuit& circuit, size_t index,
                                      double angle) {
  ParameterizedCircuit out(circuit.n_qubits());
  for (size_t i = 0; i < circuit.gates().size(); ++i) {
    Gate g = circuit.gates()[i];
    if (i == index) g.parameter = GateParameter::fixed(angle);
    out.add(std::move(g));
  }
  return out;
}

void finalize(TrainHistory& history) {
  double best_f = -std::numeric_limits<double>::infinity();
  double min_d = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < history.iterates.size(); ++i) {
    if (history.iterates[i].fidelity_to_true > best_f) {
      best_f = history.iterates[i].fidelity_to_true;
      history.best_fidelity_index = static_cast<int>(i);
    }
    if (history.iterates[i].discriminator_loss < min_d) {
      min_d = history.iterates[i].discriminator_loss;
      history.min_disc_loss_index = static_cast<int>(i);
    }
  }
}

}  // namespace

const char* mode_name(TrainMode mode) {
  for (const auto& entry : kModeTable)
    if (entry.mode == mode) return entry.name;
  throw std::invalid_argument("mode_name: unknown mode");
}

TrainMode mode_from_name(const std::string& name) {
  for (const auto& entry : kModeTable)
    if (name == entry.name) return entry.mode;
  throw std::invalid_argument("unknown training mode '" + name + "'");
}

const char* gradient_method_name(GradientMethod method) {
  return method == GradientMethod::FINITE_DIFF ? "FINITE_DIFF" : "PARAM_SHIFT";
}

GradientMethod gradient_method_from_name(const std::string& name) {
  if (name == "FINITE_DIFF") return GradientMethod::FINITE_DIFF;
  if (name == "PARAM_SHIFT") return GradientMethod::PARAM_SHIFT;
  throw std::invalid_argument("unknown gradient method '" + name + "'");
}

Eigen::VectorXd finite_diff_gradient(const std::function<double(const ParamMap&)>& f,
                                     const std::vector<std::string>& names, const ParamMap& at,
                                     double fd_step) {
  if (fd_step <= 0) throw std::invalid_argument("finite_diff_gradient: fd_step must be positive");
  Eigen::VectorXd grad(static_cast<Eigen::Index>(names.size()));
  for (size_t i = 0; i < names.size(); ++i) {
    if (!at.count(names[i]))
      throw std::invalid_argument("finite_diff_gradient: '" + names[i] + "' missing from point");
    ParamMap p = at;
    p[names[i]] = at.at(names[i]) + fd_step;
    double up = f(p);
    p[names[i]] = at.at(names[i]) - fd_step;
    double down = f(p);
    grad(static_cast<Eigen::Index>(i)) = (up - down) / (2 * fd_step);
  }
  return grad;
}

Eigen::VectorXd gradient(const CircuitObjective& objective,
                         const std::vector<std::string>& names, const ParamMap& at,
                         GradientMethod method, double fd_step) {
  if (method == GradientMethod::FINITE_DIFF) {
    auto f = [&](const ParamMap& p) { return objective.eval(objective.circuit, p); };
    return finite_diff_gradient(f, names, at, fd_step);
  }

  Eigen::VectorXd grad = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(names.size()));
  for (size_t i = 0; i < names.size(); ++i) {
    if (!at.count(names[i]))
      throw std::invalid_argument("gradient: '" + names[i] + "' missing from point");
    double total = 0.0;
    for (size_t gi = 0; gi < objective.circuit.gates().size(); ++gi) {
      const Gate& gate = objective.circuit.gates()[gi];
      if (!gate.parameter || !gate.parameter->is_symbolic() ||
          gate.parameter->symbol != names[i])
        continue;
      if (gate.kind == GateKind::RAW_UNITARY)
        throw std::invalid_argument("shift rule is undefined for raw unitary gates");
      double angle = bound_angle(gate, at);
      // The swap exponential's spectrum gives the objective period pi in
      // its angle; the standard rotations give period 2 pi.
      double shift = gate.kind == GateKind::CSWAP_EXP ? kPi / 4 : kPi / 2;
      double weight = gate.kind == GateKind::CSWAP_EXP ? 1.0 : 0.5;
      double up = objective.eval(with_pinned_gate(objective.circuit, gi, angle + shift), at);
      double down = objective.eval(with_pinned_gate(objective.circuit, gi, angle - shift), at);
      total += gate.parameter->coeff * weight * (up - down);
    }
    grad(static_cast<Eigen::Index>(i)) = total;
  }
  return grad;
}

double sampled_probability(double p, int shots, std::mt19937_64& rng) {
  if (shots < 0) throw std::invalid_argument("sampled_probability: shots must be non-negative");
  if (shots == 0) return p;
  double clamped = std::min(1.0, std::max(0.0, p));
  std::binomial_distribution<int> bin(shots, clamped);
  return static_cast<double>(bin(rng)) / shots;
}

double helstrom_value(const HermitianOperator& t, const DensityMatrix& sigma,
                      const DensityMatrix& rho) {
  return expectation(sigma, t) - expectation(rho, t);
}

HermitianOperator clipped_helstrom_step(const HermitianOperator& t, const DensityMatrix& sigma,
                                        const DensityMatrix& rho, double lr) {
  if (lr <= 0) throw std::invalid_argument("clipped_helstrom_step: lr must be positive");
  Matrix m = t.matrix() + lr * (sigma.matrix() - rho.matrix());
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  Eigen::VectorXd clipped = es.eigenvalues().cwiseMax(0.0).cwiseMin(1.0);
  Matrix out = es.eigenvectors() * clipped.asDiagonal() * es.eigenvectors().adjoint();
  return HermitianOperator(t.n_qubits(), out);
}

double eqgan_value(const ParamMap& theta_g, const ParamMap& theta_d,
                   const TrainingConfig& cfg) {
  const StateVector& sigma = target_pure(cfg.true_state);
  ParameterizedCircuit disc = build_discriminator(cfg.discriminator);
  if (cfg.noise) disc = apply_noise(disc, *cfg.noise);
  StateVector fake = simulate(cfg.generator, theta_g);
  return 1.0 - discriminator_pass_probability(cfg.discriminator, disc, theta_d, sigma, fake);
}

VanishingGradientInstance vanishing_gradient_instance() {
  ParameterizedCircuit gen(1);
  gen.add(GateKind::RX, {0}, "alpha");
  gen.add(GateKind::RZ, {0}, "beta");
  StateVector data = simulate(gen, {{"alpha", kPi / 2}, {"beta", kPi / 2}});
  return {std::move(gen), std::move(data), {{"alpha", 0.0}, {"beta", 0.0}}};
}

namespace {

TrainHistory train_swap_mode(const TrainingConfig& cfg) {
  const StateVector& sigma = target_pure(cfg.true_state);
  if (sigma.n_qubits() != cfg.discriminator.n_data_qubits)
    throw std::invalid_argument("train: true state width does not match the discriminator");
  if (cfg.generator.n_qubits() != cfg.discriminator.n_data_qubits)
    throw std::invalid_argument("train: generator width does not match the discriminator");

  ParameterizedCircuit canonical = build_discriminator(cfg.discriminator);
  ParameterizedCircuit effective = cfg.noise ? apply_noise(canonical, *cfg.noise) : canonical;

  const std::vector<std::string> gen_names = cfg.generator.parameter_names();
  const std::vector<std::string> disc_names = canonical.parameter_names();
  const ParamMap opt_values = optimal_discriminator_params(cfg.discriminator);
  const ParamMap opt_d = resolve_init(disc_names, {}, opt_values, "discriminator");

  ParamMap theta_g = resolve_init(gen_names, cfg.init_generator_params, {}, "generator");
  ParamMap theta_d =
      resolve_init(disc_names, cfg.init_discriminator_params, opt_values, "discriminator");
  if (cfg.mode == TrainMode::FROZEN_SWAP || cfg.pretrain) theta_d = opt_d;

  std::mt19937_64 shot_rng(cfg.seed);

  auto pass_prob = [&](const ParameterizedCircuit& disc_circ, const ParamMap& td,
                       const ParameterizedCircuit& gen_circ, const ParamMap& tg) {
    return discriminator_pass_probability(cfg.discriminator, disc_circ, td,
                                          sigma, simulate(gen_circ, tg));
  };

  CircuitObjective gen_objective{
      cfg.generator, [&](const ParameterizedCircuit& c, const ParamMap& p) {
        return 1.0 - sampled_probability(pass_prob(effective, theta_d, c, p), cfg.shots,
                                         shot_rng);
      }};
  // The discriminator trains on discrimination power: accept the paired
  // true state, reject the generated one. For the ancilla ansatz the
  // acceptance term is identically 1, reducing to plain rejection; for
  // phased ansatze it anchors the phases to a working test instead of
  // letting them run off toward rejecting everything.
  CircuitObjective disc_objective{
      effective, [&](const ParameterizedCircuit& c, const ParamMap& p) {
        double on_fake = sampled_probability(pass_prob(c, p, cfg.generator, theta_g),
                                             cfg.shots, shot_rng);
        double on_true = sampled_probability(
            discriminator_pass_probability(cfg.discriminator, c, p, sigma, sigma), cfg.shots,
            shot_rng);
        return on_fake - on_true;
      }};

  ParamOptimizer gen_opt{cfg.optimizer, cfg.learning_rate_g, {}, {}, 0};
  ParamOptimizer disc_opt{cfg.optimizer, cfg.learning_rate_d, {}, {}, 0};

  TrainHistory history;
  auto record = [&]() {
    TrainIterate it;
    it.generated = simulate(cfg.generator, theta_g);
    double d = pass_prob(effective, theta_d, cfg.generator, theta_g);
    it.generator_loss = 1.0 - d;
    it.discriminator_loss = d;
    it.fidelity_to_true = fidelity_pure(it.generated, sigma);
    it.generator_params = theta_g;
    it.discriminator_params = theta_d;
    history.iterates.push_back(std::move(it));
  };

  auto generator_step = [&]() {
    if (gen_names.empty()) return;
    gen_opt.step(theta_g, gen_names,
                 gradient(gen_objective, gen_names, theta_g, cfg.gradient, cfg.fd_step));
  };

  int iter = 0;
  if (cfg.mode == TrainMode::EQGAN && cfg.pretrain) {
    // Supervised warm-up against the frozen sharpest test; stop once the
    // loss moves less than 1e-6 across a 10-step window, or the phase
    // budget runs out.
    const int warmup_cap = std::min(cfg.outer_iterations,
                                    cfg.pretrain_iterations.value_or(cfg.outer_iterations));
    std::vector<double> losses;
    while (iter < warmup_cap) {
      generator_step();
      record();
      ++iter;
      losses.push_back(history.iterates.back().generator_loss);
      if (losses.size() >= 11 &&
          std::abs(losses.back() - losses[losses.size() - 11]) < 1e-6)
        break;
    }
  }

  while (iter < cfg.outer_iterations) {
    for (int e = 0; e < cfg.epochs_per_phase.generator; ++e) generator_step();
    if (cfg.mode == TrainMode::EQGAN && !disc_names.empty()) {
      for (int e = 0; e < cfg.epochs_per_phase.discriminator; ++e)
        disc_opt.step(theta_d, disc_names,
                      gradient(disc_objective, disc_names, theta_d, cfg.gradient, cfg.fd_step));
    }
    record();
    ++iter;
  }

  finalize(history);
  return history;
}

TrainHistory train_qugan(const TrainingConfig& cfg) {
  DensityMatrix sigma = target_density(cfg.true_state);
  if (cfg.generator.n_qubits() != sigma.n_qubits())
    throw std::invalid_argument("train: generator width does not match the target");

  const std::vector<std::string> gen_names = cfg.generator.parameter_names();
  ParamMap theta_g = resolve_init(gen_names, cfg.init_generator_params, {}, "generator");
  StateVector gen_state = simulate(cfg.generator, theta_g);

  const bool closed_form =
      cfg.mode == TrainMode::QUGAN_FULL && cfg.generator.n_qubits() == 1;
  const Eigen::Index dim = Eigen::Index(1) << sigma.n_qubits();
  HermitianOperator t_op(sigma.n_qubits(), Matrix::Zero(dim, dim));

  CircuitObjective gen_objective{
      cfg.generator, [&](const ParameterizedCircuit& c, const ParamMap& p) {
        return helstrom_value(t_op, sigma, to_density(simulate(c, p)));
      }};

  TrainHistory history;
  ParamOptimizer partial_gen_opt{cfg.optimizer, cfg.learning_rate_g, {}, {}, 0};
  for (int iter = 0; iter < cfg.outer_iterations; ++iter) {
    DensityMatrix rho = to_density(gen_state);

    if (cfg.mode == TrainMode::QUGAN_FULL) {
      t_op = helstrom_positive(sigma, rho);
      if (closed_form) {
        // The best pure state against a POVM element is its top
        // eigenvector; a vanishing projector means sigma = rho already
        // and the state stays put.
        Eigen::SelfAdjointEigenSolver<Matrix> es(t_op.matrix());
        Eigen::Index top;
        if (es.eigenvalues().maxCoeff(&top) > 1e-12)
          gen_state = StateVector(sigma.n_qubits(), es.eigenvectors().col(top));
      } else {
        ParamOptimizer inner{cfg.optimizer, cfg.learning_rate_g, {}, {}, 0};
        double prev = std::numeric_limits<double>::infinity();
        for (int s = 0; s < 10000 && !gen_names.empty(); ++s) {
          inner.step(theta_g, gen_names,
                     gradient(gen_objective, gen_names, theta_g, cfg.gradient, cfg.fd_step));
          double v = gen_objective.eval(cfg.generator, theta_g);
          if (std::abs(v - prev) < 1e-8) break;
          prev = v;
        }
        gen_state = simulate(cfg.generator, theta_g);
      }
    } else {  // QUGAN_PARTIAL
      for (int e = 0; e < cfg.epochs_per_phase.discriminator; ++e)
        t_op = clipped_helstrom_step(t_op, sigma, to_density(gen_state), cfg.learning_rate_d);
      for (int e = 0; e < cfg.epochs_per_phase.generator && !gen_names.empty(); ++e)
        partial_gen_opt.step(
            theta_g, gen_names,
            gradient(gen_objective, gen_names, theta_g, cfg.gradient, cfg.fd_step));
      gen_state = simulate(cfg.generator, theta_g);
    }

    TrainIterate it;
    it.generated = gen_state;
    it.generator_loss = helstrom_value(t_op, sigma, to_density(gen_state));
    it.discriminator_loss = -it.generator_loss;
    it.fidelity_to_true = fidelity_against(gen_state, cfg.true_state);
    it.generator_params = theta_g;
    history.iterates.push_back(std::move(it));
  }

  finalize(history);
  return history;
}

}  // namespace

TrainHistory train(const TrainingConfig& cfg) {
  validate_config(cfg);
  switch (cfg.mode) {
    case TrainMode::EQGAN:
    case TrainMode::FROZEN_SWAP:
      return train_swap_mode(cfg);
    case TrainMode::QUGAN_FULL:
    case TrainMode::QUGAN_PARTIAL:
      return train_qugan(cfg);
  }
  throw std::invalid_argument("train: unknown mode");
}

}  // namespace eqgan
