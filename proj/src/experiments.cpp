#include <eqgan/experiments.hpp>

#include <eqgan/swap_test.hpp>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

namespace eqgan {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

constexpr double kPi = std::numbers::pi;
constexpr int kHistogramShots = 10000;

std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::string fmt1e(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.1e", v);
  return buf;
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double stddev_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string yes_no(bool b) { return b ? "yes" : "no"; }

// --- config plumbing -------------------------------------------------------

const char* kExperimentNames[] = {"MODE_COLLAPSE", "EQGAN_VS_FROZEN_NOISY",
                                  "VANISHING_GRADIENT", "QRAM_TRAIN",
                                  "QNN_COMPARE", "SWEEP"};

std::string valid_experiment_list() {
  std::string out;
  for (const char* n : kExperimentNames) {
    if (!out.empty()) out += ", ";
    out += n;
  }
  return out;
}

std::string lowercase(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::vector<int> iota_seeds(int n) {
  std::vector<int> s(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) s[static_cast<std::size_t>(i)] = i;
  return s;
}

// Applies one JSON object onto config fields, collecting type errors and
// unknown-key diagnostics under a dotted path prefix. Explicit null keeps
// the default (and clears optional fields).
class Overlay {
 public:
  Overlay(const json& obj, std::string prefix, std::vector<std::string>& diags)
      : obj_(obj), prefix_(std::move(prefix)), diags_(diags) {}

  void number(const char* key, double& out) {
    const json* v = fetch(key);
    if (!v) return;
    if (!v->is_number()) return type_error(key, "a number");
    out = v->get<double>();
  }

  void opt_number(const char* key, std::optional<double>& out) {
    const json* v = fetch(key, &out);
    if (!v) return;
    if (!v->is_number()) return type_error(key, "a number or null");
    out = v->get<double>();
  }

  void integer(const char* key, int& out) {
    const json* v = fetch(key);
    if (!v) return;
    if (!v->is_number_integer()) return type_error(key, "an integer");
    out = v->get<int>();
  }

  void opt_integer(const char* key, std::optional<int>& out) {
    const json* v = fetch(key, &out);
    if (!v) return;
    if (!v->is_number_integer()) return type_error(key, "an integer or null");
    out = v->get<int>();
  }

  void seed64(const char* key, std::uint64_t& out) {
    const json* v = fetch(key);
    if (!v) return;
    if (!v->is_number_integer() || v->get<long long>() < 0)
      return type_error(key, "a non-negative integer");
    out = v->get<std::uint64_t>();
  }

  void boolean(const char* key, bool& out) {
    const json* v = fetch(key);
    if (!v) return;
    if (!v->is_boolean()) return type_error(key, "a boolean");
    out = v->get<bool>();
  }

  void text(const char* key, std::string& out) {
    const json* v = fetch(key);
    if (!v) return;
    if (!v->is_string()) return type_error(key, "a string");
    out = v->get<std::string>();
  }

  void int_list(const char* key, std::vector<int>& out) {
    const json* v = fetch(key);
    if (!v) return;
    if (!v->is_array()) return type_error(key, "an array of integers");
    std::vector<int> parsed;
    for (const json& e : *v) {
      if (!e.is_number_integer()) return type_error(key, "an array of integers");
      parsed.push_back(e.get<int>());
    }
    out = std::move(parsed);
  }

  // Returns the nested object for `key`, or nullptr when absent/null.
  const json* object(const char* key) {
    const json* v = fetch(key);
    if (!v) return nullptr;
    if (!v->is_object()) {
      type_error(key, "an object");
      return nullptr;
    }
    return v;
  }

  // For keys consumed outside the overlay.
  void mark_seen(const char* key) {
    if (obj_.contains(key)) seen_.insert(key);
  }

  // Diagnostics for keys nobody asked about.
  void finish() {
    for (auto it = obj_.begin(); it != obj_.end(); ++it) {
      if (!seen_.count(it.key()))
        diags_.push_back(path(it.key().c_str()) + ": unknown field");
    }
  }

 private:
  template <typename Opt = std::nullptr_t>
  const json* fetch(const char* key, Opt* cleared = nullptr) {
    auto it = obj_.find(key);
    if (it == obj_.end()) return nullptr;
    seen_.insert(key);
    if (it->is_null()) {
      if constexpr (!std::is_same_v<Opt, std::nullptr_t>) cleared->reset();
      return nullptr;
    }
    return &*it;
  }

  std::string path(const char* key) const { return prefix_ + key; }

  void type_error(const char* key, const char* want) {
    diags_.push_back(path(key) + ": expected " + want);
  }

  const json& obj_;
  std::string prefix_;
  std::vector<std::string>& diags_;
  std::set<std::string> seen_;
};

void check(bool ok, const std::string& message, std::vector<std::string>& diags) {
  if (!ok) diags.push_back(message);
}

// Value constraints, applied after the overlay so `validate` reports the
// offending resolved values.
void validate_values(const ExperimentConfig& cfg, std::vector<std::string>& diags) {
  check(!cfg.output_dir.empty(), "output_dir: must not be empty", diags);
  check(!cfg.seeds.empty(), "seeds: must not be empty", diags);
  for (int s : cfg.seeds)
    check(s >= 0, "seeds: must be non-negative (got " + std::to_string(s) + ")", diags);

  const TrainingSettings& t = cfg.training;
  check(t.outer_iterations >= 1,
        "training.outer_iterations: must be at least 1 (got " +
            std::to_string(t.outer_iterations) + ")",
        diags);
  check(t.learning_rate_g > 0.0,
        "training.learning_rate_g: must be positive (got " + format_full(t.learning_rate_g) + ")",
        diags);
  check(t.learning_rate_d > 0.0,
        "training.learning_rate_d: must be positive (got " + format_full(t.learning_rate_d) + ")",
        diags);
  if (t.pretrain_iterations)
    check(*t.pretrain_iterations >= 0 && *t.pretrain_iterations <= t.outer_iterations,
          "training.pretrain_iterations: must lie in [0, training.outer_iterations] (got " +
              std::to_string(*t.pretrain_iterations) + ")",
          diags);
  check(t.shots >= 0, "training.shots: must be non-negative (got " + std::to_string(t.shots) + ")",
        diags);

  const TwoPeakParams& d = cfg.dataset;
  check(d.n_qubits >= 1 && d.n_qubits <= 5,
        "dataset.n_qubits: must lie in [1, 5] so the adversarial register fits (got " +
            std::to_string(d.n_qubits) + ")",
        diags);
  check(d.class0_std > 0.0,
        "dataset.class0_std: must be positive (got " + format_full(d.class0_std) + ")", diags);
  check(d.class1_std > 0.0,
        "dataset.class1_std: must be positive (got " + format_full(d.class1_std) + ")", diags);
  check(d.n_samples >= 4 && d.n_samples % 2 == 0,
        "dataset.n_samples: must be an even count of at least 4 (got " +
            std::to_string(d.n_samples) + ")",
        diags);

  check(cfg.noise.rz_bias_std >= 0.0,
        "noise.rz_bias_std: must be non-negative (got " + format_full(cfg.noise.rz_bias_std) + ")",
        diags);

  check(cfg.qram.learning_rate > 0.0,
        "qram.learning_rate: must be positive (got " + format_full(cfg.qram.learning_rate) + ")",
        diags);
  check(cfg.qram.outer_iterations >= 1,
        "qram.outer_iterations: must be at least 1 (got " +
            std::to_string(cfg.qram.outer_iterations) + ")",
        diags);

  const QnnSettings& q = cfg.qnn;
  check(q.budget >= 0, "qnn.budget: must be non-negative (got " + std::to_string(q.budget) + ")",
        diags);
  check(q.layers >= 1, "qnn.layers: must be at least 1 (got " + std::to_string(q.layers) + ")",
        diags);
  check(q.init_scale >= 0.0,
        "qnn.init_scale: must be non-negative (got " + format_full(q.init_scale) + ")", diags);
  if (q.learning_rate_sampling)
    check(*q.learning_rate_sampling > 0.0,
          "qnn.learning_rate_sampling: must be positive (got " +
              format_full(*q.learning_rate_sampling) + ")",
          diags);
  if (q.learning_rate_superposition)
    check(*q.learning_rate_superposition > 0.0,
          "qnn.learning_rate_superposition: must be positive (got " +
              format_full(*q.learning_rate_superposition) + ")",
          diags);

  check(cfg.sweep.points >= 1,
        "sweep.points: must be at least 1 (got " + std::to_string(cfg.sweep.points) + ")", diags);
  check(cfg.sweep.min_log10 <= cfg.sweep.max_log10,
        "sweep.min_log10: must not exceed sweep.max_log10 (got " +
            format_full(cfg.sweep.min_log10) + " > " + format_full(cfg.sweep.max_log10) + ")",
        diags);
}

ordered_json config_json(const ExperimentConfig& cfg) {
  ordered_json j;
  j["experiment"] = experiment_name(cfg.experiment);
  j["output_dir"] = cfg.output_dir;
  j["seeds"] = cfg.seeds;
  ordered_json t;
  t["outer_iterations"] = cfg.training.outer_iterations;
  t["learning_rate_g"] = cfg.training.learning_rate_g;
  t["learning_rate_d"] = cfg.training.learning_rate_d;
  t["pretrain"] = cfg.training.pretrain;
  t["pretrain_iterations"] =
      cfg.training.pretrain_iterations ? ordered_json(*cfg.training.pretrain_iterations)
                                       : ordered_json(nullptr);
  t["shots"] = cfg.training.shots;
  j["training"] = t;
  ordered_json d;
  d["n_qubits"] = cfg.dataset.n_qubits;
  d["class0_mean"] = cfg.dataset.class0_mean;
  d["class0_std"] = cfg.dataset.class0_std;
  d["class1_mean"] = cfg.dataset.class1_mean;
  d["class1_std"] = cfg.dataset.class1_std;
  d["n_samples"] = cfg.dataset.n_samples;
  d["seed"] = cfg.dataset.seed;
  j["dataset"] = d;
  ordered_json n;
  n["rz_bias_mean"] = cfg.noise.rz_bias_mean;
  n["rz_bias_std"] = cfg.noise.rz_bias_std;
  j["noise"] = n;
  ordered_json r;
  r["learning_rate"] = cfg.qram.learning_rate;
  r["outer_iterations"] = cfg.qram.outer_iterations;
  j["qram"] = r;
  ordered_json q;
  q["budget"] = cfg.qnn.budget;
  q["layers"] = cfg.qnn.layers;
  q["init_scale"] = cfg.qnn.init_scale;
  q["learning_rate_sampling"] = cfg.qnn.learning_rate_sampling
                                    ? ordered_json(*cfg.qnn.learning_rate_sampling)
                                    : ordered_json(nullptr);
  q["learning_rate_superposition"] = cfg.qnn.learning_rate_superposition
                                         ? ordered_json(*cfg.qnn.learning_rate_superposition)
                                         : ordered_json(nullptr);
  j["qnn"] = q;
  ordered_json w;
  w["min_log10"] = cfg.sweep.min_log10;
  w["max_log10"] = cfg.sweep.max_log10;
  w["points"] = cfg.sweep.points;
  j["sweep"] = w;
  return j;
}

// --- shared experiment pieces ----------------------------------------------

ParameterizedCircuit xz_generator() {
  ParameterizedCircuit c(1);
  c.add(GateKind::RX, {0}, "alpha");
  c.add(GateKind::RZ, {0}, "beta");
  return c;
}

StateVector plus_state() {
  Vector amps(2);
  amps << 1.0 / std::numbers::sqrt2, 1.0 / std::numbers::sqrt2;
  return StateVector(1, amps);
}

// Collects files and keeps names for the manifest.
struct Outputs {
  fs::path dir;
  std::vector<std::string> files;

  void write(const std::string& name, const std::string& content) {
    write_text_file((dir / name).string(), content);
    files.push_back(name);
  }
};

// Smallest period p in [1, 4] such that every iterate from the second one
// matches the iterate p steps later to within 1e-6 trace distance. 0 when
// the sequence settles into no short cycle.
int detect_period(const TrainHistory& h) {
  const auto& its = h.iterates;
  for (int p = 1; p <= 4; ++p) {
    bool any = false;
    double worst = 0.0;
    for (std::size_t k = 1; k + static_cast<std::size_t>(p) < its.size(); ++k) {
      any = true;
      worst = std::max(worst,
                       trace_distance(to_density(its[k].generated).matrix(),
                                      to_density(its[k + static_cast<std::size_t>(p)].generated)
                                          .matrix()));
    }
    if (any && worst < 1e-6) return p;
  }
  return 0;
}

std::string run_mode_collapse(const ExperimentConfig& cfg, Outputs& out) {
  TrainingConfig base;
  base.generator = xz_generator();
  base.discriminator = {DiscriminatorForm::ANCILLA_EXP_SWAP, 1};
  base.true_state = simulate(xz_generator(), {{"alpha", kPi / 2}, {"beta", 2 * kPi / 3}});
  base.init_generator_params = {{"alpha", kPi / 2}, {"beta", kPi / 3}};
  base.outer_iterations = cfg.training.outer_iterations;
  base.learning_rate_g = cfg.training.learning_rate_g;
  base.learning_rate_d = cfg.training.learning_rate_d;
  base.shots = cfg.training.shots;
  base.seed = static_cast<std::uint64_t>(cfg.seeds.front());

  TrainingConfig full = base;
  full.mode = TrainMode::QUGAN_FULL;
  TrainHistory hf = train(full);
  out.write("qugan_full_history.csv", history_csv(hf));

  TrainingConfig partial = base;
  partial.mode = TrainMode::QUGAN_PARTIAL;
  TrainHistory hp = train(partial);
  out.write("qugan_partial_history.csv", history_csv(hp));

  TrainingConfig eq = base;
  eq.mode = TrainMode::EQGAN;
  eq.pretrain = cfg.training.pretrain;
  eq.pretrain_iterations = cfg.training.pretrain_iterations;
  TrainHistory he = train(eq);
  out.write("eqgan_history.csv", history_csv(he));

  // Plateau level of the oscillating run: mean fidelity past the first
  // iterate, plus the largest excursion from it.
  double plateau = 0.0;
  for (std::size_t k = 1; k < hf.iterates.size(); ++k) plateau += hf.iterates[k].fidelity_to_true;
  if (hf.iterates.size() > 1) plateau /= static_cast<double>(hf.iterates.size() - 1);
  double excursion = 0.0;
  for (std::size_t k = 1; k < hf.iterates.size(); ++k)
    excursion = std::max(excursion, std::abs(hf.iterates[k].fidelity_to_true - plateau));

  const int pf = detect_period(hf);
  const int pp = detect_period(hp);

  std::ostringstream s;
  s << "experiment: MODE_COLLAPSE\n";
  s << "instance: single-qubit target and start tilted pi/3 apart on the equator"
       " (overlap 0.750000)\n\n";
  if (pf > 0)
    s << "qugan_full: oscillation detected: period " << pf << "\n";
  else
    s << "qugan_full: no oscillation detected\n";
  s << "qugan_full: fidelity plateau at " << fmt6(plateau) << " (largest excursion "
    << fmt1e(excursion) << " over " << hf.iterates.size() << " iterates)\n";
  s << "qugan_partial: final fidelity " << fmt6(hp.final().fidelity_to_true)
    << " (oscillation broken: " << yes_no(pp != 2) << ")\n";
  s << "eqgan: final fidelity " << fmt6(he.final().fidelity_to_true) << ", best "
    << fmt6(he.best().fidelity_to_true) << " at iteration " << he.best_fidelity_index << "\n";
  s << "eqgan converged above 0.99: " << yes_no(he.final().fidelity_to_true >= 0.99) << "\n";
  return s.str();
}

std::string run_noisy_comparison(const ExperimentConfig& cfg, Outputs& out) {
  std::vector<double> eq_best, eq_final, fr_best, fr_final;
  std::ostringstream table;
  table << "seed,eqgan_best,eqgan_final,frozen_best,frozen_final\n";
  int wins_best = 0;
  int wins_final = 0;
  for (int seed : cfg.seeds) {
    TrainHistory he = train(noisy_comparison_config(cfg, seed, TrainMode::EQGAN));
    TrainHistory hf = train(noisy_comparison_config(cfg, seed, TrainMode::FROZEN_SWAP));
    out.write("eqgan_seed" + std::to_string(seed) + "_history.csv", history_csv(he));
    out.write("frozen_seed" + std::to_string(seed) + "_history.csv", history_csv(hf));
    eq_best.push_back(he.best().fidelity_to_true);
    eq_final.push_back(he.final().fidelity_to_true);
    fr_best.push_back(hf.best().fidelity_to_true);
    fr_final.push_back(hf.final().fidelity_to_true);
    wins_best += eq_best.back() > fr_best.back() ? 1 : 0;
    wins_final += eq_final.back() > fr_final.back() ? 1 : 0;
    table << seed << ',' << fmt6(eq_best.back()) << ',' << fmt6(eq_final.back()) << ','
          << fmt6(fr_best.back()) << ',' << fmt6(fr_final.back()) << '\n';
  }
  const int n = static_cast<int>(cfg.seeds.size());

  std::vector<double> eq_err, fr_err;
  for (double f : eq_best) eq_err.push_back(1.0 - f);
  for (double f : fr_best) fr_err.push_back(1.0 - f);

  std::ostringstream s;
  s << "experiment: EQGAN_VS_FROZEN_NOISY\n";
  s << "noise: Z-phase bias N(" << fmt6(cfg.noise.rz_bias_mean) << ", "
    << fmt6(cfg.noise.rz_bias_std) << ") appended after every discriminator CZ\n";
  s << "seeds: " << n << "\n\n";
  s << table.str() << "\n";
  s << "best fidelity, trainable test: median " << fmt6(median_of(eq_best)) << ", min "
    << fmt6(*std::min_element(eq_best.begin(), eq_best.end())) << ", max "
    << fmt6(*std::max_element(eq_best.begin(), eq_best.end())) << "\n";
  s << "best fidelity, frozen test:    median " << fmt6(median_of(fr_best)) << ", min "
    << fmt6(*std::min_element(fr_best.begin(), fr_best.end())) << ", max "
    << fmt6(*std::max_element(fr_best.begin(), fr_best.end())) << "\n";
  s << "trainable beats frozen on best fidelity: " << wins_best << " of " << n << " seeds\n";
  s << "trainable beats frozen on final fidelity: " << wins_final << " of " << n << " seeds\n";
  s << "fidelity error (1 - best fidelity), mean +/- two standard deviations:\n";
  s << "  trainable " << fmt6(mean_of(eq_err)) << " +/- " << fmt6(2 * stddev_of(eq_err)) << "\n";
  s << "  frozen    " << fmt6(mean_of(fr_err)) << " +/- " << fmt6(2 * stddev_of(fr_err)) << "\n";
  s << "Uncertainties show two standard deviations.\n";
  return s.str();
}

std::string run_vanishing_gradient(const ExperimentConfig& cfg, Outputs& out) {
  const VanishingGradientInstance inst = vanishing_gradient_instance();
  const DiscriminatorSpec spec{DiscriminatorForm::ANCILLA_EXP_SWAP, 1};
  const ParameterizedCircuit disc = build_discriminator(spec);
  const ParamMap opt = optimal_discriminator_params(spec);
  CircuitObjective overlap_loss{
      inst.generator, [&](const ParameterizedCircuit& c, const ParamMap& p) {
        return 1.0 - discriminator_pass_probability(spec, disc, opt, inst.data, simulate(c, p));
      }};
  const Eigen::VectorXd g = gradient(overlap_loss, {"alpha", "beta"}, inst.initial_params,
                                     GradientMethod::PARAM_SHIFT);
  const double flat = g.cwiseAbs().maxCoeff();

  const double f0 = fidelity_pure(simulate(inst.generator, inst.initial_params), inst.data);

  TrainingConfig frozen;
  frozen.generator = inst.generator;
  frozen.discriminator = spec;
  frozen.true_state = inst.data;
  frozen.mode = TrainMode::FROZEN_SWAP;
  frozen.outer_iterations = cfg.training.outer_iterations;
  frozen.learning_rate_g = cfg.training.learning_rate_g;
  frozen.shots = cfg.training.shots;
  frozen.seed = static_cast<std::uint64_t>(cfg.seeds.front());
  frozen.init_generator_params = inst.initial_params;
  TrainHistory hf = train(frozen);
  out.write("frozen_history.csv", history_csv(hf));

  TrainingConfig eq = frozen;
  eq.discriminator = {DiscriminatorForm::CZ_WITH_PHASES, 1};
  eq.mode = TrainMode::EQGAN;
  eq.pretrain = cfg.training.pretrain;
  eq.pretrain_iterations = cfg.training.pretrain_iterations;
  eq.learning_rate_d = cfg.training.learning_rate_d;
  eq.init_discriminator_params = {{"phi_0", 0.2}, {"phi_1", 0.2}};
  TrainHistory he = train(eq);
  out.write("eqgan_history.csv", history_csv(he));

  const double moved = std::abs(hf.final().fidelity_to_true - f0);
  std::ostringstream s;
  s << "experiment: VANISHING_GRADIENT\n";
  s << "instance: generator RX(alpha) RZ(beta); data at (pi/2, pi/2); start at (0, 0)\n";
  s << "initial overlap: " << fmt6(f0) << "\n";
  s << "largest overlap-gradient component at the start: " << fmt1e(flat)
    << " (flat within 1e-8: " << yes_no(flat < 1e-8) << ")\n";
  s << "frozen_swap: final fidelity " << fmt6(hf.final().fidelity_to_true) << ", moved "
    << fmt1e(moved) << " from the start (unchanged within 1e-6: " << yes_no(moved < 1e-6)
    << ")\n";
  s << "eqgan: final fidelity " << fmt6(he.final().fidelity_to_true)
    << " (escaped above 0.97: " << yes_no(he.final().fidelity_to_true >= 0.97) << ")\n";
  return s.str();
}

TrainingConfig qram_base(const ExperimentConfig& cfg) {
  TrainingConfig base;
  base.mode = TrainMode::EQGAN;
  base.pretrain = true;
  base.outer_iterations = cfg.qram.outer_iterations;
  base.learning_rate_g = cfg.qram.learning_rate;
  return base;
}

std::vector<double> to_std(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

std::string run_qram_train(const ExperimentConfig& cfg, Outputs& out) {
  const Dataset d = sample_two_peak(cfg.dataset);
  out.write("dataset.csv", dataset_csv(d));

  std::ostringstream s;
  s << "experiment: QRAM_TRAIN\n";
  s << "dataset: " << d.values.size() << " samples over " << (1 << d.n_qubits)
    << " bins, train/test " << d.train_indices.size() << "/" << d.test_indices.size()
    << " (seed " << cfg.dataset.seed << ")\n\n";

  for (int class_id : {0, 1}) {
    const QramTrainResult r = train_qram(d, class_id, qram_base(cfg));
    const std::string tag = "class" + std::to_string(class_id);
    out.write(tag + "_history.csv", history_csv(r.history));

    const Eigen::VectorXd target = empirical_histogram(d, class_id);
    out.write(tag + "_train_histogram.csv", histogram_csv(to_std(target)));

    const StateVector state = simulate(build_peak_ansatz(d.n_qubits, class_id), r.params);
    Eigen::VectorXd model(state.dim());
    for (Eigen::Index i = 0; i < state.dim(); ++i) model[i] = std::norm(state.amplitudes()[i]);
    out.write(tag + "_model_histogram.csv", histogram_csv(to_std(model)));

    std::mt19937_64 rng(9000 + static_cast<std::uint64_t>(class_id));
    const std::vector<int> counts = sample_basis_counts(state, kHistogramShots, rng);
    Eigen::VectorXd sampled(static_cast<Eigen::Index>(counts.size()));
    for (std::size_t i = 0; i < counts.size(); ++i)
      sampled[static_cast<Eigen::Index>(i)] =
          static_cast<double>(counts[i]) / static_cast<double>(kHistogramShots);
    out.write(tag + "_sampled_histogram.csv", histogram_csv(to_std(sampled)));

    const double tv = total_variation(sampled, target);
    s << "class " << class_id << ": best fidelity to the empirical superposition "
      << fmt6(r.fidelity);
    if (class_id == 0) s << " (target >= 0.95: " << yes_no(r.fidelity >= 0.95) << ")";
    s << "\n";
    s << "class " << class_id << ": total variation, " << kHistogramShots
      << " samples vs training histogram: " << fmt6(tv) << " (below 0.15: " << yes_no(tv < 0.15)
      << ")\n";
  }
  return s.str();
}

struct QnnRun {
  double train_acc = 0.0;
  double test_acc = 0.0;
  long long loss_evals = 0;
  long long gradient_evals = 0;
};

QnnRun run_one_qnn(const Dataset& d, const ExperimentConfig& cfg, QnnTrainMode mode, int seed,
                   std::optional<double> lr, const ParamMap& p0, const ParamMap& p1,
                   Outputs* out) {
  QnnTrainConfig qc;
  qc.mode = mode;
  qc.budget = cfg.qnn.budget;
  qc.layers = cfg.qnn.layers;
  qc.init_scale = cfg.qnn.init_scale;
  qc.seed = static_cast<std::uint64_t>(seed);
  qc.learning_rate = lr;
  if (mode == QnnTrainMode::SUPERPOSITION) {
    qc.qram_params_class0 = p0;
    qc.qram_params_class1 = p1;
  }
  const QnnTrainResult r = train_qnn(d, qc);
  if (out) {
    const std::string tag = std::string(qnn_mode_name(mode)) + "_seed" + std::to_string(seed);
    out->write(lowercase(tag) + "_history.csv", qnn_history_csv(r.iterates));
    out->write(lowercase(tag) + "_model.txt", qnn_model_to_text(r.model));
  }
  QnnRun run;
  run.train_acc = evaluate_accuracy(r.model, d, Split::TRAIN);
  run.test_acc = evaluate_accuracy(r.model, d, Split::TEST);
  run.loss_evals = r.loss_evaluations;
  run.gradient_evals = r.gradient_evaluations;
  return run;
}

std::string run_qnn_compare(const ExperimentConfig& cfg, Outputs& out) {
  const Dataset d = sample_two_peak(cfg.dataset);
  out.write("dataset.csv", dataset_csv(d));
  const ParamMap p0 = train_qram(d, 0, qram_base(cfg)).params;
  const ParamMap p1 = train_qram(d, 1, qram_base(cfg)).params;

  std::vector<double> sam_train, sam_test, sup_train, sup_test;
  std::ostringstream acc;
  acc << "seed,sampling_train_accuracy,sampling_test_accuracy,"
         "superposition_train_accuracy,superposition_test_accuracy\n";
  long long loss_evals = -1;
  long long grad_evals = -1;
  bool budgets_match = true;
  for (int seed : cfg.seeds) {
    const QnnRun sam = run_one_qnn(d, cfg, QnnTrainMode::SAMPLING, seed,
                                   cfg.qnn.learning_rate_sampling, p0, p1, &out);
    const QnnRun sup = run_one_qnn(d, cfg, QnnTrainMode::SUPERPOSITION, seed,
                                   cfg.qnn.learning_rate_superposition, p0, p1, &out);
    if (loss_evals < 0) loss_evals = sam.loss_evals;
    if (grad_evals < 0) grad_evals = sam.gradient_evals;
    budgets_match &= sam.loss_evals == loss_evals && sup.loss_evals == loss_evals &&
                     sam.gradient_evals == grad_evals && sup.gradient_evals == grad_evals;
    sam_train.push_back(sam.train_acc);
    sam_test.push_back(sam.test_acc);
    sup_train.push_back(sup.train_acc);
    sup_test.push_back(sup.test_acc);
    acc << seed << ',' << fmt6(sam.train_acc) << ',' << fmt6(sam.test_acc) << ','
        << fmt6(sup.train_acc) << ',' << fmt6(sup.test_acc) << '\n';
  }
  out.write("accuracy.csv", acc.str());

  std::ostringstream s;
  s << "experiment: QNN_COMPARE\n";
  s << "dataset: " << d.values.size() << " samples over " << (1 << d.n_qubits)
    << " bins (seed " << cfg.dataset.seed << "); " << cfg.seeds.size()
    << " seeds; budget " << cfg.qnn.budget << " loss evaluations per run\n";
  s << "circuit evaluations per run: " << loss_evals << " loss + " << grad_evals
    << " gradient (identical across modes: " << yes_no(budgets_match) << ")\n\n";
  s << "test accuracy, median: sampling " << fmt6(median_of(sam_test)) << ", superposition "
    << fmt6(median_of(sup_test)) << "\n";
  s << "superposition beats sampling on median test accuracy: "
    << yes_no(median_of(sup_test) > median_of(sam_test)) << "\n";
  s << "test accuracy, mean +/- two standard deviations:\n";
  s << "  sampling      " << fmt6(mean_of(sam_test)) << " +/- " << fmt6(2 * stddev_of(sam_test))
    << "\n";
  s << "  superposition " << fmt6(mean_of(sup_test)) << " +/- " << fmt6(2 * stddev_of(sup_test))
    << "\n";
  s << "train accuracy, mean +/- two standard deviations:\n";
  s << "  sampling      " << fmt6(mean_of(sam_train)) << " +/- "
    << fmt6(2 * stddev_of(sam_train)) << "\n";
  s << "  superposition " << fmt6(mean_of(sup_train)) << " +/- "
    << fmt6(2 * stddev_of(sup_train)) << "\n";
  s << "Uncertainties show two standard deviations.\n";
  return s.str();
}

std::string run_sweep(const ExperimentConfig& cfg, Outputs& out) {
  const Dataset d = sample_two_peak(cfg.dataset);
  out.write("dataset.csv", dataset_csv(d));
  const ParamMap p0 = train_qram(d, 0, qram_base(cfg)).params;
  const ParamMap p1 = train_qram(d, 1, qram_base(cfg)).params;

  std::vector<double> rates;
  for (int i = 0; i < cfg.sweep.points; ++i) {
    const double t = cfg.sweep.points == 1
                         ? 0.0
                         : static_cast<double>(i) / static_cast<double>(cfg.sweep.points - 1);
    rates.push_back(std::pow(10.0, cfg.sweep.min_log10 +
                                       t * (cfg.sweep.max_log10 - cfg.sweep.min_log10)));
  }

  std::ostringstream rows;
  rows << "mode,learning_rate,seed,train_accuracy,test_accuracy\n";
  std::ostringstream table;
  table << "mode       learning_rate  median_test_accuracy\n";
  std::ostringstream best;
  best << "best by median test accuracy:\n";
  for (QnnTrainMode mode : {QnnTrainMode::SAMPLING, QnnTrainMode::SUPERPOSITION}) {
    double best_median = -1.0;
    double best_rate = rates.front();
    for (double lr : rates) {
      std::vector<double> tests;
      for (int seed : cfg.seeds) {
        const QnnRun r = run_one_qnn(d, cfg, mode, seed, lr, p0, p1, nullptr);
        tests.push_back(r.test_acc);
        rows << qnn_mode_name(mode) << ',' << format_full(lr) << ',' << seed << ','
             << fmt6(r.train_acc) << ',' << fmt6(r.test_acc) << '\n';
      }
      const double med = median_of(tests);
      char line[128];
      std::snprintf(line, sizeof(line), "%-13s %12.6g  %.6f\n", qnn_mode_name(mode), lr, med);
      table << line;
      if (med > best_median) {
        best_median = med;
        best_rate = lr;
      }
    }
    best << "  " << qnn_mode_name(mode) << ": learning rate " << format_full(best_rate)
         << " reaches median test accuracy " << fmt6(best_median) << "\n";
  }
  out.write("sweep.csv", rows.str());

  std::ostringstream s;
  s << "experiment: SWEEP\n";
  s << "grid: " << cfg.sweep.points << " learning rates spanning [1e" << cfg.sweep.min_log10
    << ", 1e" << cfg.sweep.max_log10 << "], " << cfg.seeds.size() << " seeds per point, budget "
    << cfg.qnn.budget << "\n\n";
  s << table.str() << "\n";
  s << best.str();
  return s.str();
}

std::string iso_timestamp() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

const char* experiment_name(Experiment e) {
  return kExperimentNames[static_cast<int>(e)];
}

Experiment experiment_from_name(const std::string& name) {
  for (Experiment e : all_experiments())
    if (name == experiment_name(e)) return e;
  throw std::invalid_argument("unknown experiment '" + name +
                              "' (valid: " + valid_experiment_list() + ")");
}

std::vector<Experiment> all_experiments() {
  return {Experiment::MODE_COLLAPSE, Experiment::EQGAN_VS_FROZEN_NOISY,
          Experiment::VANISHING_GRADIENT, Experiment::QRAM_TRAIN, Experiment::QNN_COMPARE,
          Experiment::SWEEP};
}

ExperimentConfig default_config(Experiment e) {
  ExperimentConfig cfg;
  cfg.experiment = e;
  cfg.output_dir = lowercase(experiment_name(e));
  switch (e) {
    case Experiment::MODE_COLLAPSE:
      cfg.seeds = {0};
      cfg.training = {300, 0.3, 0.05, true, std::nullopt, 0};
      break;
    case Experiment::EQGAN_VS_FROZEN_NOISY:
      cfg.seeds = iota_seeds(10);
      cfg.training = {300, 0.1, 0.1, true, 100, 0};
      break;
    case Experiment::VANISHING_GRADIENT:
      cfg.seeds = {0};
      cfg.training = {400, 0.1, 0.02, false, std::nullopt, 0};
      break;
    case Experiment::QRAM_TRAIN:
      cfg.seeds = {0};
      break;
    case Experiment::QNN_COMPARE:
      cfg.seeds = iota_seeds(20);
      break;
    case Experiment::SWEEP:
      cfg.seeds = iota_seeds(5);
      break;
  }
  return cfg;
}

ConfigLoad parse_config_text(const std::string& text) {
  const bool blank =
      std::all_of(text.begin(), text.end(),
                  [](unsigned char c) { return std::isspace(c) != 0; });
  json j;
  try {
    j = json::parse(blank ? std::string("{}") : text, nullptr, true,
                    /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(e.what());
  }
  if (!j.is_object()) throw std::runtime_error("config root must be a JSON object");

  ConfigLoad load;
  // The experiment picks the defaults, so resolve it before everything else.
  Experiment exp = Experiment::MODE_COLLAPSE;
  if (auto it = j.find("experiment"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) {
      load.diagnostics.push_back("experiment: expected a string");
    } else {
      try {
        exp = experiment_from_name(it->get<std::string>());
      } catch (const std::invalid_argument& e) {
        load.diagnostics.push_back(std::string("experiment: ") + e.what());
      }
    }
  }
  ExperimentConfig& cfg = load.config;
  cfg = default_config(exp);

  Overlay top(j, "", load.diagnostics);
  top.mark_seen("experiment");
  top.text("output_dir", cfg.output_dir);
  top.int_list("seeds", cfg.seeds);
  if (const json* t = top.object("training")) {
    Overlay o(*t, "training.", load.diagnostics);
    o.integer("outer_iterations", cfg.training.outer_iterations);
    o.number("learning_rate_g", cfg.training.learning_rate_g);
    o.number("learning_rate_d", cfg.training.learning_rate_d);
    o.boolean("pretrain", cfg.training.pretrain);
    o.opt_integer("pretrain_iterations", cfg.training.pretrain_iterations);
    o.integer("shots", cfg.training.shots);
    o.finish();
  }
  if (const json* t = top.object("dataset")) {
    Overlay o(*t, "dataset.", load.diagnostics);
    o.integer("n_qubits", cfg.dataset.n_qubits);
    o.number("class0_mean", cfg.dataset.class0_mean);
    o.number("class0_std", cfg.dataset.class0_std);
    o.number("class1_mean", cfg.dataset.class1_mean);
    o.number("class1_std", cfg.dataset.class1_std);
    o.integer("n_samples", cfg.dataset.n_samples);
    o.seed64("seed", cfg.dataset.seed);
    o.finish();
  }
  if (const json* t = top.object("noise")) {
    Overlay o(*t, "noise.", load.diagnostics);
    o.number("rz_bias_mean", cfg.noise.rz_bias_mean);
    o.number("rz_bias_std", cfg.noise.rz_bias_std);
    o.finish();
  }
  if (const json* t = top.object("qram")) {
    Overlay o(*t, "qram.", load.diagnostics);
    o.number("learning_rate", cfg.qram.learning_rate);
    o.integer("outer_iterations", cfg.qram.outer_iterations);
    o.finish();
  }
  if (const json* t = top.object("qnn")) {
    Overlay o(*t, "qnn.", load.diagnostics);
    o.integer("budget", cfg.qnn.budget);
    o.integer("layers", cfg.qnn.layers);
    o.number("init_scale", cfg.qnn.init_scale);
    o.opt_number("learning_rate_sampling", cfg.qnn.learning_rate_sampling);
    o.opt_number("learning_rate_superposition", cfg.qnn.learning_rate_superposition);
    o.finish();
  }
  if (const json* t = top.object("sweep")) {
    Overlay o(*t, "sweep.", load.diagnostics);
    o.number("min_log10", cfg.sweep.min_log10);
    o.number("max_log10", cfg.sweep.max_log10);
    o.integer("points", cfg.sweep.points);
    o.finish();
  }
  top.finish();

  validate_values(cfg, load.diagnostics);
  return load;
}

ConfigLoad load_config_file(const std::string& path) {
  return parse_config_text(read_text_file(path));
}

std::string render_config(const ExperimentConfig& cfg) {
  return config_json(cfg).dump(2) + "\n";
}

TrainingConfig noisy_comparison_config(const ExperimentConfig& cfg, int seed, TrainMode mode) {
  TrainingConfig c;
  c.generator = xz_generator();
  c.discriminator = {DiscriminatorForm::CZ_WITH_PHASES, 1};
  c.true_state = plus_state();
  c.mode = mode;
  c.outer_iterations = cfg.training.outer_iterations;
  c.learning_rate_g = cfg.training.learning_rate_g;
  c.learning_rate_d = cfg.training.learning_rate_d;
  c.shots = cfg.training.shots;
  c.seed = static_cast<std::uint64_t>(seed);
  NoiseModel noise;
  noise.rz_bias_mean = cfg.noise.rz_bias_mean;
  noise.rz_bias_std = cfg.noise.rz_bias_std;
  noise.target_kinds = {GateKind::CZ};
  noise.seed = 1000 + static_cast<std::uint64_t>(seed);
  c.noise = noise;
  if (mode == TrainMode::EQGAN) {
    c.pretrain = cfg.training.pretrain;
    c.pretrain_iterations = cfg.training.pretrain_iterations;
  }
  // Both arms start from the same generator draw, away from the poles.
  std::mt19937_64 rng(static_cast<std::uint64_t>(seed));
  std::uniform_real_distribution<double> angle(0.15 * kPi, 0.85 * kPi);
  const double alpha = angle(rng);
  const double beta = angle(rng);
  c.init_generator_params = {{"alpha", alpha}, {"beta", beta}};
  return c;
}

RunResult run_experiment(const ExperimentConfig& cfg, const std::string& output_root) {
  std::vector<std::string> diags;
  validate_values(cfg, diags);
  if (!diags.empty()) {
    std::string joined = "config rejected:";
    for (const std::string& d : diags) joined += "\n  " + d;
    throw std::invalid_argument(joined);
  }

  const fs::path rel(cfg.output_dir);
  Outputs out;
  out.dir = rel.is_absolute() ? rel : fs::path(output_root) / rel;
  fs::create_directories(out.dir);

  std::string summary;
  switch (cfg.experiment) {
    case Experiment::MODE_COLLAPSE:
      summary = run_mode_collapse(cfg, out);
      break;
    case Experiment::EQGAN_VS_FROZEN_NOISY:
      summary = run_noisy_comparison(cfg, out);
      break;
    case Experiment::VANISHING_GRADIENT:
      summary = run_vanishing_gradient(cfg, out);
      break;
    case Experiment::QRAM_TRAIN:
      summary = run_qram_train(cfg, out);
      break;
    case Experiment::QNN_COMPARE:
      summary = run_qnn_compare(cfg, out);
      break;
    case Experiment::SWEEP:
      summary = run_sweep(cfg, out);
      break;
  }
  out.write("summary.txt", summary);

  ordered_json manifest;
  manifest["tool"] = "eqgan";
  manifest["version"] = tool_version();
  manifest["experiment"] = experiment_name(cfg.experiment);
  manifest["generated_at"] = iso_timestamp();
  manifest["config"] = config_json(cfg);
  std::vector<std::string> listed = out.files;
  listed.push_back("manifest.json");
  std::sort(listed.begin(), listed.end());
  manifest["outputs"] = listed;
  out.write("manifest.json", manifest.dump(2) + "\n");

  RunResult result;
  result.directory = out.dir.string();
  result.files = std::move(out.files);
  result.summary = std::move(summary);
  return result;
}

const char* tool_version() { return "0.1.0"; }

}  // namespace eqgan
