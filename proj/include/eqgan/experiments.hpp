// Experiment harness: named end-to-end runs behind one config struct,
// loadable from commented JSON. Each run writes per-seed CSV histories, a
// deterministic summary.txt, and a manifest.json into its output directory.
#pragma once

#include <eqgan/csv.hpp>

#include <string>
#include <vector>

namespace eqgan {

enum class Experiment {
  MODE_COLLAPSE,            // Helstrom-game oscillation vs adversarial swap test
  EQGAN_VS_FROZEN_NOISY,    // biased-CZ comparison, trainable vs frozen test
  VANISHING_GRADIENT,       // flat-landscape escape
  QRAM_TRAIN,               // peak ansatz vs exact two-peak superpositions
  QNN_COMPARE,              // classifier: per-example sampling vs superpositions
  SWEEP,                    // learning-rate grid for both classifier modes
};

const char* experiment_name(Experiment e);
/// Throws std::invalid_argument listing the valid names.
Experiment experiment_from_name(const std::string& name);
std::vector<Experiment> all_experiments();

struct TrainingSettings {
  int outer_iterations = 300;
  double learning_rate_g = 0.1;
  double learning_rate_d = 0.05;
  bool pretrain = true;
  std::optional<int> pretrain_iterations;
  int shots = 0;
};

struct NoiseSettings {
  double rz_bias_mean = 0.3;
  double rz_bias_std = 0.05;
};

struct QramSettings {
  double learning_rate = 0.3;
  int outer_iterations = 400;
};

struct QnnSettings {
  int budget = 60;
  int layers = 2;
  double init_scale = 0.1;
  // Unset: the mode's tuned rate.
  std::optional<double> learning_rate_sampling;
  std::optional<double> learning_rate_superposition;
};

struct SweepSettings {
  double min_log10 = -4.0;  // grid spans [10^min, 10^max]
  double max_log10 = -1.0;
  int points = 10;
};

struct ExperimentConfig {
  Experiment experiment = Experiment::MODE_COLLAPSE;
  std::string output_dir;  // default: lowercase experiment name
  std::vector<int> seeds;  // default depends on the experiment
  TrainingSettings training;
  TwoPeakParams dataset;
  NoiseSettings noise;
  QramSettings qram;
  QnnSettings qnn;
  SweepSettings sweep;
};

/// Fully resolved defaults for one experiment (seeds, budgets, rates).
ExperimentConfig default_config(Experiment e);

struct ConfigLoad {
  ExperimentConfig config;
  // Field-anchored problems: value constraints, unknown fields, type
  // mismatches. Empty means the config is runnable.
  std::vector<std::string> diagnostics;
};

/// Parses commented JSON. Unset fields keep the experiment's defaults; an
/// empty document resolves to default_config. Syntax errors throw
/// std::runtime_error with the parser's line/column message.
ConfigLoad parse_config_text(const std::string& text);
ConfigLoad load_config_file(const std::string& path);

/// The resolved config echoed back as pretty JSON.
std::string render_config(const ExperimentConfig& cfg);

/// Per-seed training configuration used by the noisy comparison; `mode`
/// selects the trainable (EQGAN) or frozen (FROZEN_SWAP) arm.
TrainingConfig noisy_comparison_config(const ExperimentConfig& cfg, int seed, TrainMode mode);

struct RunResult {
  std::string directory;           // resolved output directory
  std::vector<std::string> files;  // written files, relative to directory
  std::string summary;             // contents of summary.txt
};

/// Runs the experiment and writes its artifacts under
/// output_root / cfg.output_dir (an absolute output_dir wins). Reruns with
/// the same config overwrite and produce byte-identical CSV and summary
/// files; only the manifest timestamp moves. Throws on config diagnostics
/// (std::invalid_argument) and on I/O failure (std::runtime_error).
RunResult run_experiment(const ExperimentConfig& cfg, const std::string& output_root = ".");

const char* tool_version();

}  // namespace eqgan
