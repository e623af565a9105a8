#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tswlad/errors.hpp"
#include "tswlad/experiment.hpp"
#include "tswlad/version.hpp"

namespace {

constexpr int exit_config_error = 2;
constexpr int exit_data_error = 3;
constexpr int exit_numerical_error = 4;

void print_report_summary(const tswlad::RunReport& report) {
  std::cout << "experiment " << report.name << " (config " <<
      report.config_digest << ", " << report.seeds.size() << " seeds)\n";
  if (report.tswlad_final_err) {
    std::printf("  tswlad       final ||err||  median %.6g  [q25 %.6g, q75 %.6g]\n",
                report.tswlad_final_err->median, report.tswlad_final_err->q25,
                report.tswlad_final_err->q75);
  }
  if (report.baseline_final_err) {
    std::printf("  baseline (%s) final ||err||  median %.6g  [q25 %.6g, q75 %.6g]\n",
                report.baseline_label.c_str(),
                report.baseline_final_err->median,
                report.baseline_final_err->q25,
                report.baseline_final_err->q75);
  }
}

void write_report(const tswlad::RunReport& report,
                  const std::string& out_dir) {
  if (out_dir.empty()) return;
  std::filesystem::path path(out_dir);
  std::filesystem::create_directories(path);
  path /= report.name + "_report.json";
  std::ofstream out(path, std::ios::binary);
  out << report.to_json() << "\n";
  if (!out) {
    throw tswlad::DataError("failed to write report to " + path.string());
  }
  std::cout << "  report: " << path.string() << "\n";
}

int run_command(const std::string& config_path, const std::string& preset_name,
                std::optional<long> seed_count,
                const std::string& out_dir, const std::string& algo) {
  std::vector<tswlad::ExperimentConfig> configs;
  if (!preset_name.empty()) {
    configs = tswlad::preset(preset_name);
  } else if (!config_path.empty()) {
    configs.push_back(tswlad::parse_config_file(config_path));
  } else {
    throw tswlad::ConfigError("run needs --config or --preset");
  }

  for (tswlad::ExperimentConfig& cfg : configs) {
    if (seed_count) {
      if (*seed_count < 1) {
        throw tswlad::ConfigError("--seeds must be >= 1");
      }
      cfg.seeds.resize(static_cast<std::size_t>(*seed_count));
      for (std::size_t i = 0; i < cfg.seeds.size(); ++i) {
        cfg.seeds[i] = i + 1;
      }
    }
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    if (!algo.empty()) cfg.algorithm = tswlad::algorithm_from_string(algo);

    const tswlad::RunReport report = tswlad::run_experiment(cfg);
    print_report_summary(report);
    write_report(report, cfg.output_dir);
  }
  return 0;
}

int validate_command(const std::string& config_path) {
  const tswlad::ExperimentConfig cfg = tswlad::parse_config_file(config_path);
  tswlad::validate_config(cfg);
  std::cout << "OK: " << cfg.name << " (config hash "
            << tswlad::config_hash(cfg) << ")\n";
  return 0;
}

int dataset_check_command(const std::string& path) {
  const tswlad::Dataset ds = tswlad::load_dataset(path);
  double wmin = 1.0, wmax = 0.0;
  for (const auto& row : ds.rows) {
    wmin = std::min(wmin, row.weight);
    wmax = std::max(wmax, row.weight);
  }
  std::cout << "OK: " << ds.rows.size() << " rows, dimension " << ds.dimension
            << (ds.has_weights ? ", with weights" : ", unit weights");
  if (ds.has_weights && !ds.rows.empty()) {
    std::cout << " in [" << wmin << ", " << wmax << "]";
  }
  std::cout << "\n";
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"TSWLAD saturated-observation adaptive identification"};
  app.set_version_flag("--version", std::string(tswlad::artifact_version));
  app.require_subcommand(1);

  std::string config_path, preset_name, out_dir, algo, dataset_path;
  std::optional<long> seed_count;

  CLI::App* run = app.add_subcommand("run", "Run an experiment");
  run->add_option("--config", config_path, "Experiment config JSON file");
  run->add_option("--preset", preset_name,
                  "Built-in preset: table1, fig-regret, sentencing-demo");
  run->add_option("--seeds", seed_count, "Override: run seeds 1..N");
  run->add_option("--out", out_dir, "Output directory for CSV series/report");
  run->add_option("--algo", algo, "tswlad, baseline, or both")
      ->check(CLI::IsMember({"tswlad", "baseline", "both"}));

  CLI::App* validate = app.add_subcommand("validate", "Validate a config");
  validate->add_option("--config", config_path, "Experiment config JSON file")
      ->required();

  CLI::App* dataset = app.add_subcommand("dataset", "Dataset utilities");
  dataset->require_subcommand(1);
  CLI::App* check = dataset->add_subcommand("check", "Check a dataset file");
  check->add_option("file", dataset_path, "Dataset CSV file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      return run_command(config_path, preset_name, seed_count, out_dir, algo);
    }
    if (validate->parsed()) {
      return validate_command(config_path);
    }
    if (dataset->parsed()) {
      return dataset_check_command(dataset_path);
    }
  } catch (const tswlad::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return exit_config_error;
  } catch (const tswlad::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return exit_data_error;
  } catch (const tswlad::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return exit_numerical_error;
  }
  return 0;
}
