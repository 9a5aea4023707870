// Command-line front end: run or validate experiment configs, or list the
// experiments the harness knows about.
//
// Exit codes: 0 success, 1 runtime failure, 2 config or usage error.
// EQGAN_OUTPUT_ROOT, when set, roots every relative output directory.

#include <eqgan/experiments.hpp>

#include <CLI11.hpp>

#include <cstdlib>
#include <exception>
#include <iostream>
#include <string>

namespace {

const char* describe(eqgan::Experiment e) {
  switch (e) {
    case eqgan::Experiment::MODE_COLLAPSE:
      return "Helstrom-game oscillation against the adversarial swap test";
    case eqgan::Experiment::EQGAN_VS_FROZEN_NOISY:
      return "trainable vs frozen swap test under biased CZ phases";
    case eqgan::Experiment::VANISHING_GRADIENT:
      return "flat-landscape escape with the phase discriminator";
    case eqgan::Experiment::QRAM_TRAIN:
      return "peak ansatz trained against exact two-peak superpositions";
    case eqgan::Experiment::QNN_COMPARE:
      return "classifier trained on samples vs class superpositions";
    case eqgan::Experiment::SWEEP:
      return "learning-rate grid for both classifier modes";
  }
  return "";
}

int load_or_fail(const std::string& path, eqgan::ConfigLoad& load) {
  try {
    load = eqgan::load_config_file(path);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

int cmd_run(const std::string& path) {
  eqgan::ConfigLoad load;
  if (int rc = load_or_fail(path, load); rc != 0) return rc;
  if (!load.diagnostics.empty()) {
    std::cerr << "config rejected:\n";
    for (const std::string& d : load.diagnostics) std::cerr << "  - " << d << "\n";
    return 2;
  }
  const char* root = std::getenv("EQGAN_OUTPUT_ROOT");
  try {
    const eqgan::RunResult r = eqgan::run_experiment(load.config, root ? root : ".");
    std::cout << "wrote " << r.files.size() + 1 << " files to " << r.directory << "\n\n";
    std::cout << r.summary;
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "run failed: " << e.what() << "\n";
    return 1;
  }
}

int cmd_validate(const std::string& path) {
  eqgan::ConfigLoad load;
  if (int rc = load_or_fail(path, load); rc != 0) return rc;
  std::cout << eqgan::render_config(load.config);
  if (load.diagnostics.empty()) {
    std::cout << "no diagnostics\n";
    return 0;
  }
  std::cout << "diagnostics:\n";
  for (const std::string& d : load.diagnostics) std::cout << "  - " << d << "\n";
  return 2;
}

int cmd_list() {
  for (eqgan::Experiment e : eqgan::all_experiments()) {
    std::printf("%-22s %s\n", eqgan::experiment_name(e), describe(e));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum GAN training harness"};
  app.set_version_flag("--version", eqgan::tool_version());
  app.require_subcommand(1);

  std::string run_path;
  CLI::App* run = app.add_subcommand("run", "Run an experiment and write its artifacts");
  run->add_option("config", run_path, "config file, JSON with // comments")->required();

  std::string validate_path;
  CLI::App* validate =
      app.add_subcommand("validate", "Echo the resolved config and its diagnostics");
  validate->add_option("config", validate_path, "config file, JSON with // comments")
      ->required();

  app.add_subcommand("list-experiments", "List the experiments this tool can run");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;  // help/version exit clean; usage errors are config errors
  }

  if (run->parsed()) return cmd_run(run_path);
  if (validate->parsed()) return cmd_validate(validate_path);
  return cmd_list();
}
