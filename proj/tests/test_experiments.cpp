#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <eqgan/experiments.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <stdexcept>
#include <string>
#include <variant>

using namespace eqgan;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

bool any_diag(const ConfigLoad& load, const std::string& needle) {
  return std::any_of(load.diagnostics.begin(), load.diagnostics.end(),
                     [&](const std::string& d) { return contains(d, needle); });
}

// Fresh scratch directory per test case.
fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "eqgan_exp_test" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::vector<std::string> csv_like_files(const fs::path& dir) {
  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.ends_with(".csv") || name == "summary.txt") names.push_back(name);
  }
  std::sort(names.begin(), names.end());
  return names;
}

// Byte-compares every CSV and the summary between two run directories.
void check_identical_outputs(const fs::path& a, const fs::path& b) {
  const std::vector<std::string> names = csv_like_files(a);
  REQUIRE(names == csv_like_files(b));
  REQUIRE(!names.empty());
  for (const std::string& name : names) {
    CHECK_MESSAGE(read_text_file((a / name).string()) == read_text_file((b / name).string()),
                  "differs: ", name);
  }
}

}  // namespace

TEST_CASE("experiment names round trip and bad names list the choices") {
  for (Experiment e : all_experiments()) CHECK(experiment_from_name(experiment_name(e)) == e);
  CHECK(all_experiments().size() == 6);
  try {
    (void)experiment_from_name("QGAN");
    FAIL("expected a throw");
  } catch (const std::invalid_argument& e) {
    CHECK(contains(e.what(), "QGAN"));
    CHECK(contains(e.what(), "MODE_COLLAPSE"));
    CHECK(contains(e.what(), "SWEEP"));
  }
}

TEST_CASE("defaults: per-experiment seeds and output directories") {
  CHECK(default_config(Experiment::MODE_COLLAPSE).seeds.size() == 1);
  CHECK(default_config(Experiment::EQGAN_VS_FROZEN_NOISY).seeds.size() == 10);
  CHECK(default_config(Experiment::VANISHING_GRADIENT).seeds.size() == 1);
  CHECK(default_config(Experiment::QRAM_TRAIN).seeds.size() == 1);
  CHECK(default_config(Experiment::QNN_COMPARE).seeds.size() == 20);
  CHECK(default_config(Experiment::SWEEP).seeds.size() == 5);
  CHECK(default_config(Experiment::QNN_COMPARE).output_dir == "qnn_compare");
  CHECK(default_config(Experiment::EQGAN_VS_FROZEN_NOISY).training.pretrain_iterations == 100);
  CHECK(!default_config(Experiment::MODE_COLLAPSE).training.pretrain_iterations.has_value());
}

TEST_CASE("empty text resolves to the full default config") {
  for (const char* text : {"", "  \n\t", "{}"}) {
    const ConfigLoad load = parse_config_text(text);
    CHECK(load.diagnostics.empty());
    CHECK(load.config.experiment == Experiment::MODE_COLLAPSE);
    CHECK(render_config(load.config) == render_config(default_config(Experiment::MODE_COLLAPSE)));
  }
}

TEST_CASE("comments and overrides parse; unset fields keep defaults") {
  const std::string text = R"({
    // pick the classifier comparison with a small budget
    "experiment": "QNN_COMPARE",
    "seeds": [0, 1, 2],
    "qnn": {"budget": 10, "learning_rate_sampling": 0.001},
    "training": {"shots": 100}
  })";
  const ConfigLoad load = parse_config_text(text);
  CHECK(load.diagnostics.empty());
  CHECK(load.config.experiment == Experiment::QNN_COMPARE);
  CHECK(load.config.seeds == std::vector<int>{0, 1, 2});
  CHECK(load.config.qnn.budget == 10);
  CHECK(load.config.qnn.learning_rate_sampling == 0.001);
  CHECK(!load.config.qnn.learning_rate_superposition.has_value());
  CHECK(load.config.training.shots == 100);
  CHECK(load.config.qnn.layers == 2);           // untouched default
  CHECK(load.config.output_dir == "qnn_compare");
}

TEST_CASE("render and parse are a fixpoint for every default config") {
  for (Experiment e : all_experiments()) {
    const std::string rendered = render_config(default_config(e));
    const ConfigLoad load = parse_config_text(rendered);
    CHECK(load.diagnostics.empty());
    CHECK(render_config(load.config) == rendered);
  }
}

TEST_CASE("diagnostics name the field and the constraint") {
  SUBCASE("negative learning rate") {
    const ConfigLoad load =
        parse_config_text(R"({"training": {"learning_rate_g": -0.5}})");
    REQUIRE(load.diagnostics.size() == 1);
    CHECK(contains(load.diagnostics[0], "training.learning_rate_g"));
    CHECK(contains(load.diagnostics[0], "positive"));
    CHECK(contains(load.diagnostics[0], "-0.5"));
  }
  SUBCASE("unknown experiment") {
    const ConfigLoad load = parse_config_text(R"({"experiment": "FOO"})");
    REQUIRE(!load.diagnostics.empty());
    CHECK(any_diag(load, "unknown experiment 'FOO'"));
    CHECK(any_diag(load, "MODE_COLLAPSE"));
  }
  SUBCASE("unknown fields at both levels") {
    const ConfigLoad load =
        parse_config_text(R"({"outputdir": "x", "training": {"lr": 0.1}})");
    CHECK(any_diag(load, "outputdir: unknown field"));
    CHECK(any_diag(load, "training.lr: unknown field"));
  }
  SUBCASE("type mismatches") {
    const ConfigLoad load = parse_config_text(
        R"({"seeds": [1, "two"], "training": {"pretrain": 1}, "qnn": "fast"})");
    CHECK(any_diag(load, "seeds: expected an array of integers"));
    CHECK(any_diag(load, "training.pretrain: expected a boolean"));
    CHECK(any_diag(load, "qnn: expected an object"));
  }
  SUBCASE("cross-field constraints") {
    const ConfigLoad load = parse_config_text(
        R"({"seeds": [-1], "sweep": {"min_log10": -1, "max_log10": -3, "points": 0},
            "training": {"outer_iterations": 10, "pretrain_iterations": 20}})");
    CHECK(any_diag(load, "seeds: must be non-negative"));
    CHECK(any_diag(load, "sweep.points: must be at least 1"));
    CHECK(any_diag(load, "sweep.min_log10: must not exceed sweep.max_log10"));
    CHECK(any_diag(load, "training.pretrain_iterations: must lie in"));
  }
}

TEST_CASE("null clears optional fields and keeps scalar defaults") {
  const ConfigLoad load = parse_config_text(R"({
    "experiment": "EQGAN_VS_FROZEN_NOISY",
    "training": {"pretrain_iterations": null, "learning_rate_g": null}
  })");
  CHECK(load.diagnostics.empty());
  CHECK(!load.config.training.pretrain_iterations.has_value());
  CHECK(load.config.training.learning_rate_g == 0.1);  // the experiment default
}

TEST_CASE("syntax errors throw with a line-anchored message") {
  try {
    (void)parse_config_text("{\n  \"experiment\": \n}");
    FAIL("expected a throw");
  } catch (const std::runtime_error& e) {
    CHECK(contains(e.what(), "line"));
  }
  CHECK_THROWS_AS((void)parse_config_text("[1, 2]"), std::runtime_error);
}

TEST_CASE("noisy comparison arms share their start but differ in mode") {
  const ExperimentConfig cfg = default_config(Experiment::EQGAN_VS_FROZEN_NOISY);
  const TrainingConfig eq = noisy_comparison_config(cfg, 3, TrainMode::EQGAN);
  const TrainingConfig fr = noisy_comparison_config(cfg, 3, TrainMode::FROZEN_SWAP);
  CHECK(eq.mode == TrainMode::EQGAN);
  CHECK(fr.mode == TrainMode::FROZEN_SWAP);
  CHECK(eq.init_generator_params == fr.init_generator_params);
  for (const auto& kv : eq.init_generator_params) {
    CHECK(kv.second >= 0.15 * kPi);
    CHECK(kv.second <= 0.85 * kPi);
  }
  REQUIRE(eq.noise.has_value());
  CHECK(eq.noise->seed == 1003);
  CHECK(eq.noise->rz_bias_mean == 0.3);
  CHECK(eq.pretrain);
  CHECK(eq.pretrain_iterations == 100);
  CHECK(!fr.pretrain);
  CHECK(eq.discriminator.form == DiscriminatorForm::CZ_WITH_PHASES);
  const StateVector& target = std::get<StateVector>(eq.true_state);
  Vector plus(2);
  plus << 1.0 / std::numbers::sqrt2, 1.0 / std::numbers::sqrt2;
  CHECK(std::abs(fidelity_pure(target, StateVector(1, plus)) - 1.0) < 1e-12);

  // A different seed draws a different start.
  const TrainingConfig other = noisy_comparison_config(cfg, 4, TrainMode::EQGAN);
  CHECK(other.init_generator_params != eq.init_generator_params);
}

TEST_CASE("run_experiment rejects a config with diagnostics") {
  ExperimentConfig cfg = default_config(Experiment::MODE_COLLAPSE);
  cfg.seeds.clear();
  CHECK_THROWS_AS((void)run_experiment(cfg, scratch("reject").string()),
                  std::invalid_argument);
}

TEST_CASE("mode collapse run: artifacts, summary phrases, bitwise rerun") {
  ExperimentConfig cfg = default_config(Experiment::MODE_COLLAPSE);
  cfg.training.outer_iterations = 30;
  const fs::path root_a = scratch("collapse_a");
  const fs::path root_b = scratch("collapse_b");
  const RunResult r = run_experiment(cfg, root_a.string());
  CHECK(r.directory == (root_a / "mode_collapse").string());

  CHECK(contains(r.summary, "oscillation detected: period 2"));
  CHECK(contains(r.summary, "fidelity plateau at 0.750000"));
  CHECK(contains(r.summary, "qugan_partial"));
  CHECK(contains(r.summary, "eqgan"));

  for (const char* name : {"qugan_full_history.csv", "qugan_partial_history.csv",
                           "eqgan_history.csv", "summary.txt", "manifest.json"}) {
    CHECK_MESSAGE(fs::exists(fs::path(r.directory) / name), "missing: ", name);
  }
  const std::string history = read_text_file((fs::path(r.directory) / "eqgan_history.csv").string());
  CHECK(history.starts_with("iteration,gen_loss,disc_loss,fidelity\n"));
  CHECK(read_text_file((fs::path(r.directory) / "summary.txt").string()) == r.summary);

  const std::string manifest =
      read_text_file((fs::path(r.directory) / "manifest.json").string());
  CHECK(contains(manifest, "\"version\": \"0.1.0\""));
  CHECK(contains(manifest, "\"qugan_full_history.csv\""));
  CHECK(contains(manifest, "\"summary.txt\""));
  CHECK(contains(manifest, "\"manifest.json\""));
  CHECK(contains(manifest, "\"generated_at\""));

  // Same config, fresh root, then again over the first root: bytes match.
  (void)run_experiment(cfg, root_b.string());
  check_identical_outputs(root_a / "mode_collapse", root_b / "mode_collapse");
  (void)run_experiment(cfg, root_a.string());
  check_identical_outputs(root_a / "mode_collapse", root_b / "mode_collapse");
}

TEST_CASE("vanishing gradient run reports the flat start and the frozen stall") {
  ExperimentConfig cfg = default_config(Experiment::VANISHING_GRADIENT);
  cfg.training.outer_iterations = 40;
  cfg.output_dir = "vg";
  const fs::path root = scratch("vanishing");
  const RunResult r = run_experiment(cfg, root.string());
  CHECK(contains(r.summary, "initial overlap: 0.500000"));
  CHECK(contains(r.summary, "flat within 1e-8: yes"));
  CHECK(contains(r.summary, "unchanged within 1e-6: yes"));
  CHECK(fs::exists(root / "vg" / "frozen_history.csv"));
  CHECK(fs::exists(root / "vg" / "eqgan_history.csv"));
}

TEST_CASE("qram run: histograms, dataset round trip, bitwise rerun") {
  ExperimentConfig cfg = default_config(Experiment::QRAM_TRAIN);
  cfg.qram.outer_iterations = 40;
  const fs::path root_a = scratch("qram_a");
  const fs::path root_b = scratch("qram_b");
  const RunResult r = run_experiment(cfg, root_a.string());
  const fs::path dir = r.directory;

  for (const char* name :
       {"dataset.csv", "class0_history.csv", "class1_history.csv",
        "class0_train_histogram.csv", "class0_model_histogram.csv",
        "class0_sampled_histogram.csv", "class1_sampled_histogram.csv"}) {
    CHECK_MESSAGE(fs::exists(dir / name), "missing: ", name);
  }
  const Dataset d = dataset_from_csv(read_text_file((dir / "dataset.csv").string()), 4);
  CHECK(d.values.size() == 120);
  CHECK(d.train_indices.size() == 60);
  CHECK(contains(r.summary, "best fidelity to the empirical superposition"));
  CHECK(contains(r.summary, "total variation"));

  // Sampled histogram probabilities sum to one.
  const std::string sampled =
      read_text_file((dir / "class0_sampled_histogram.csv").string());
  double total = 0.0;
  std::size_t pos = sampled.find('\n') + 1;
  while (pos < sampled.size()) {
    const std::size_t comma = sampled.find(',', pos);
    const std::size_t end = sampled.find('\n', comma);
    total += std::stod(sampled.substr(comma + 1, end - comma - 1));
    pos = end + 1;
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));

  (void)run_experiment(cfg, root_b.string());
  check_identical_outputs(root_a / "qram_train", root_b / "qram_train");
}

TEST_CASE("qnn comparison run writes per-seed artifacts and spread lines") {
  ExperimentConfig cfg = default_config(Experiment::QNN_COMPARE);
  cfg.seeds = {0, 1, 2};
  cfg.qnn.budget = 10;
  cfg.qram.outer_iterations = 30;
  const fs::path root_a = scratch("qnn_a");
  const fs::path root_b = scratch("qnn_b");
  const RunResult r = run_experiment(cfg, root_a.string());
  const fs::path dir = r.directory;

  const std::string acc = read_text_file((dir / "accuracy.csv").string());
  CHECK(acc.starts_with(
      "seed,sampling_train_accuracy,sampling_test_accuracy,"
      "superposition_train_accuracy,superposition_test_accuracy\n"));
  CHECK(std::count(acc.begin(), acc.end(), '\n') == 4);  // header + 3 seeds
  for (const char* name : {"sampling_seed0_history.csv", "superposition_seed2_history.csv",
                           "sampling_seed1_model.txt", "dataset.csv"}) {
    CHECK_MESSAGE(fs::exists(dir / name), "missing: ", name);
  }
  CHECK(contains(r.summary, "Uncertainties show two standard deviations."));
  CHECK(contains(r.summary, "identical across modes: yes"));

  (void)run_experiment(cfg, root_b.string());
  check_identical_outputs(root_a / "qnn_compare", root_b / "qnn_compare");
}

TEST_CASE("sweep run covers the grid for both modes") {
  ExperimentConfig cfg = default_config(Experiment::SWEEP);
  cfg.seeds = {0};
  cfg.sweep.points = 2;
  cfg.qnn.budget = 10;
  cfg.qram.outer_iterations = 30;
  const fs::path root = scratch("sweep");
  const RunResult r = run_experiment(cfg, root.string());

  const std::string rows = read_text_file((fs::path(r.directory) / "sweep.csv").string());
  CHECK(rows.starts_with("mode,learning_rate,seed,train_accuracy,test_accuracy\n"));
  CHECK(std::count(rows.begin(), rows.end(), '\n') == 5);  // header + 2 modes * 2 rates
  CHECK(contains(rows, "SAMPLING,0.0001"));
  CHECK(contains(rows, "SUPERPOSITION,0.1"));
  CHECK(contains(r.summary, "best by median test accuracy:"));
}

TEST_CASE("absolute output directories ignore the root") {
  ExperimentConfig cfg = default_config(Experiment::VANISHING_GRADIENT);
  cfg.training.outer_iterations = 5;
  const fs::path abs_dir = scratch("absolute") / "direct";
  cfg.output_dir = abs_dir.string();
  const RunResult r = run_experiment(cfg, scratch("ignored_root").string());
  CHECK(r.directory == abs_dir.string());
  CHECK(fs::exists(abs_dir / "summary.txt"));
}
