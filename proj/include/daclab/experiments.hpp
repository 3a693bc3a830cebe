#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "daclab/datagen.hpp"
#include "daclab/expansion.hpp"
#include "daclab/theory.hpp"

#include <json.hpp>

namespace daclab {
inline constexpr const char* kVersion = "0.1.0";
}

namespace daclab::experiments {

enum class Format { kCsv, kJson };

struct ExperimentConfig {
  std::string preset;
  int trials = 0;  // 0: use the preset default
  std::uint64_t seed = 0;
  std::vector<std::string> methods;  // empty: runner defaults
  // Recognized sweep keys per runner: linear {d_aug}, logistic
  // {d_aug, alpha}, misspec {d_aug, lambda}, domain {sigma_t}.
  std::map<std::string, std::vector<double>> sweep;
  std::optional<bool> fixed_design;
  std::string output_path;
  Format format = Format::kCsv;

  nlohmann::json to_json() const;
  static ExperimentConfig from_json(const nlohmann::json& j);
};

struct TrialRecord {
  int trial = 0;
  std::string method;
  std::vector<std::pair<std::string, double>> params;
  double excess_risk = 0.0;
  std::map<std::string, double> aux;
};

bool operator==(const TrialRecord& a, const TrialRecord& b);

/// example_4_1 preset: fixed-design BlockScale grid, DAC vs DA-ERM
/// excess risk on the augmented design, predictions attached per cell.
std::vector<TrialRecord> run_linear_sweep(const ExperimentConfig& cfg);

/// example_4_2 preset: random-design logistic cells over (d_aug,
/// alpha); the primary metric is held-out classification error.
std::vector<TrialRecord> run_logistic_sweep(const ExperimentConfig& cfg);

/// example_6 preset: fixed-design misspecified jitter, lambda sweep
/// plus the closed-form lambda*; original-design excess risk.
std::vector<TrialRecord> run_misspec_sweep(const ExperimentConfig& cfg);

/// example_C1 preset: source-trained DAC vs DA-ERM evaluated on the
/// target distribution across sigma_t values.
std::vector<TrialRecord> run_domain_adaptation(const ExperimentConfig& cfg);

struct ExpansionFuzzReport {
  int trials = 0;
  int a_applicable = 0;
  int b_applicable = 0;
  int a_violations = 0;
  int b_violations = 0;
  int inapplicable = 0;  // neither premise held
  int strict_spaces = 0;
  nlohmann::json to_json() const;
};

/// Random finite spaces + classifiers through verify_lemma_c3; the
/// assertion of interest is zero violations among premise-satisfying
/// instances.
ExpansionFuzzReport run_expansion_fuzz(const ExperimentConfig& cfg);

/// CSV columns: trial,method,<param columns>,excess_risk,aux_<keys>.
/// JSON: array of record objects. A sidecar <path>.meta.json records the
/// full config, seed, and library version.
void emit(const std::vector<TrialRecord>& records, Format format,
          const std::string& path, const nlohmann::json& config_json);

std::vector<TrialRecord> parse_records_json(const std::string& path);

// Mean / standard-error reduction used by the acceptance checks.
struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
  int count = 0;
};
MeanSe mean_se(const std::vector<double>& values);

/// Pulls the excess_risk column of records matching method and an
/// optional (param, value) filter.
std::vector<double> risks_of(const std::vector<TrialRecord>& records,
                             const std::string& method,
                             const std::string& param = "",
                             double value = 0.0, double tol = 1e-12);

}  // namespace daclab::experiments
