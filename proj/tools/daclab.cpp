#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "daclab/acceptance.hpp"
#include "daclab/estimators.hpp"
#include "daclab/experiments.hpp"
#include "daclab/theory.hpp"

namespace {

using daclab::experiments::ExperimentConfig;
using daclab::experiments::Format;
using daclab::experiments::TrialRecord;

nlohmann::json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open config file '" + path + "'");
  }
  nlohmann::json j;
  in >> j;
  return j;
}

// --param lambda=0.1,1,10 entries into the sweep map.
void apply_param_overrides(ExperimentConfig& cfg,
                           const std::vector<std::string>& params) {
  for (const auto& p : params) {
    const auto eq = p.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error("--param expects key=v1,v2,...: '" + p + "'");
    }
    const std::string key = p.substr(0, eq);
    std::vector<double> values;
    std::stringstream ss(p.substr(eq + 1));
    std::string item;
    while (std::getline(ss, item, ',')) {
      values.push_back(std::stod(item));
    }
    cfg.sweep[key] = values;
  }
}

std::vector<TrialRecord> dispatch(const ExperimentConfig& cfg) {
  if (cfg.preset == "example_4_1") return daclab::experiments::run_linear_sweep(cfg);
  if (cfg.preset == "example_4_2") return daclab::experiments::run_logistic_sweep(cfg);
  if (cfg.preset == "example_6") return daclab::experiments::run_misspec_sweep(cfg);
  if (cfg.preset == "example_C1") return daclab::experiments::run_domain_adaptation(cfg);
  throw std::runtime_error("no runner for preset '" + cfg.preset + "'");
}

int run_experiment(ExperimentConfig cfg) {
  const auto records = dispatch(cfg);
  if (cfg.output_path.empty()) {
    cfg.output_path = cfg.preset + (cfg.format == Format::kCsv ? ".csv" : ".json");
  }
  daclab::experiments::emit(records, cfg.format, cfg.output_path, cfg.to_json());
  std::cout << records.size() << " records -> " << cfg.output_path << "\n";
  return 0;
}

// Builds the instance the `theory` subcommand reports on: either an
// inline {model, augmentation, n} document or a preset cell.
nlohmann::json theory_report_from_config(const nlohmann::json& j) {
  const std::uint64_t seed = j.value("seed", std::uint64_t{0});
  daclab::Rng rng = daclab::Rng::substream(seed, 0x7e0);

  if (j.contains("model")) {
    const auto model = daclab::datagen::LinearModelSpec::from_json(j.at("model"));
    const auto aug_spec =
        daclab::augment::AugmentationSpec::from_json(j.at("augmentation"));
    const int n = j.at("n").get<int>();
    const auto x = daclab::datagen::gaussian_matrix(n, model.d, rng);
    const auto aug = daclab::augment::build_augmented(
        x, x * model.theta_star, aug_spec, rng);
    return daclab::theory::build_report(aug, model.theta_star, model.sigma)
        .to_json();
  }

  const auto p = daclab::datagen::preset(j.at("preset").get<std::string>());
  if (p.cells.empty()) {
    throw std::runtime_error("preset '" + p.name + "' has no linear cells");
  }
  std::size_t cell_index = j.value("cell_index", 0);
  if (j.contains("d_aug")) {
    const int want = j.at("d_aug").get<int>();
    for (std::size_t i = 0; i < p.cells.size(); ++i) {
      if (p.cells[i].d_aug == want) {
        cell_index = i;
        break;
      }
    }
  }
  const auto& cell = p.cells.at(cell_index);
  const auto model = p.name == "example_6" ? p.materialize_misspec(rng)
                                           : p.materialize_linear(rng);
  const auto x = daclab::datagen::gaussian_matrix(p.n, p.d, rng);
  const auto aug =
      daclab::augment::build_augmented(x, x * model.theta_star, cell.aug, rng);
  nlohmann::json out;
  try {
    out = daclab::theory::build_report(aug, model.theta_star, model.sigma)
              .to_json();
  } catch (const std::runtime_error&) {
    // Deterministic augmentations can leave Sigma_S singular, in which
    // case the distortion factors do not exist; report the risk part.
    const auto dp = daclab::augment::d_prime(aug);
    out = {{"d", p.d},
           {"d_aug", dp.d_aug},
           {"d_prime", dp.value},
           {"dac_risk_pred",
            daclab::theory::dac_risk_pred(p.d, static_cast<int>(dp.d_aug),
                                          model.sigma, p.n)},
           {"da_erm_risk_pred",
            daclab::theory::da_erm_risk_pred(p.d, static_cast<int>(dp.d_aug),
                                             dp.value, model.sigma, p.n)}};
  }
  out["cell"] = cell.params;
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"daclab: augmentation-consistency numerical laboratory"};
  app.require_subcommand(1);

  std::string config_path, out_path, format = "csv", preset;
  std::uint64_t seed = 0;
  int trials = 0;
  std::vector<std::string> param_overrides;
  bool have_seed_flag = false;

  auto* theory_cmd = app.add_subcommand("theory", "print a TheoryReport as JSON");
  theory_cmd->add_option("--config", config_path, "config JSON")->required();
  theory_cmd->add_option("--out", out_path, "write to file instead of stdout");

  auto* run_cmd = app.add_subcommand("run", "run a preset experiment");
  run_cmd->add_option("preset", preset, "preset name");
  run_cmd->add_option("--config", config_path, "config JSON (flags override)");
  run_cmd->add_option("--trials", trials, "Monte Carlo trials");
  run_cmd->add_option("--seed", seed, "master seed")
      ->each([&](const std::string&) { have_seed_flag = true; });
  run_cmd->add_option("--out", out_path, "output path");
  run_cmd->add_option("--format", format, "csv|json");

  auto* sweep_cmd = app.add_subcommand("sweep", "run with sweep overrides");
  sweep_cmd->add_option("preset", preset, "preset name");
  sweep_cmd->add_option("--config", config_path, "config JSON (flags override)");
  sweep_cmd->add_option("--trials", trials, "Monte Carlo trials");
  sweep_cmd->add_option("--seed", seed, "master seed")
      ->each([&](const std::string&) { have_seed_flag = true; });
  sweep_cmd->add_option("--out", out_path, "output path");
  sweep_cmd->add_option("--format", format, "csv|json");
  sweep_cmd->add_option("--param", param_overrides,
                        "sweep override key=v1,v2,... (repeatable)");

  auto* expansion_cmd = app.add_subcommand("expansion", "minority-set bound fuzzing");
  int fuzz_trials = 200;
  expansion_cmd->add_option("--fuzz", fuzz_trials, "number of random spaces");
  expansion_cmd->add_option("--seed", seed, "master seed");
  expansion_cmd->add_option("--out", out_path, "write report JSON to file");

  auto* verify_cmd = app.add_subcommand("verify", "run the acceptance suite");
  std::uint64_t verify_seed = daclab::acceptance::kDefaultSeed;
  verify_cmd->add_option("--seed", verify_seed, "acceptance seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (theory_cmd->parsed()) {
      const auto report = theory_report_from_config(load_json(config_path));
      if (out_path.empty()) {
        std::cout << report.dump(2) << "\n";
      } else {
        std::ofstream out(out_path);
        out << report.dump(2) << "\n";
      }
      return 0;
    }

    if (run_cmd->parsed() || sweep_cmd->parsed()) {
      ExperimentConfig cfg;
      if (!config_path.empty()) {
        cfg = ExperimentConfig::from_json(load_json(config_path));
      }
      if (!preset.empty()) cfg.preset = preset;
      if (trials > 0) cfg.trials = trials;
      if (have_seed_flag) cfg.seed = seed;
      if (!out_path.empty()) cfg.output_path = out_path;
      cfg.format = format == "json" ? Format::kJson : Format::kCsv;
      apply_param_overrides(cfg, param_overrides);
      if (cfg.preset.empty()) {
        throw std::runtime_error("no preset given (positional or config)");
      }
      return run_experiment(std::move(cfg));
    }

    if (expansion_cmd->parsed()) {
      ExperimentConfig cfg;
      cfg.trials = fuzz_trials;
      cfg.seed = seed;
      const auto rep = daclab::experiments::run_expansion_fuzz(cfg);
      const auto j = rep.to_json();
      if (out_path.empty()) {
        std::cout << j.dump(2) << "\n";
      } else {
        std::ofstream out(out_path);
        out << j.dump(2) << "\n";
      }
      return (rep.a_violations == 0 && rep.b_violations == 0) ? 0 : 1;
    }

    if (verify_cmd->parsed()) {
      const auto results = daclab::acceptance::run_all(verify_seed, std::cout);
      return daclab::acceptance::all_passed(results) ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
