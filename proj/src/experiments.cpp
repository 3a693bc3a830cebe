#include "daclab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "daclab/estimators.hpp"

namespace daclab::experiments {

namespace {

using augment::AugmentedDataset;
using datagen::Matrix;
using datagen::Vector;
using matkit::Index;

// Substream tags; every consumer of randomness gets its own lane.
enum : std::uint64_t {
  kTagTheta = 1,
  kTagCell = 2,
  kTagNoise = 3,
  kTagModel = 4,
  kTagAug = 5,
  kTagTest = 6,
  kTagTrial = 7,
  kTagFuzz = 8,
};

double clamped_risk(double r) {
  if (r < -1e-12) {
    throw std::logic_error("TrialRecord: negative excess risk " +
                           std::to_string(r));
  }
  return r < 0.0 ? 0.0 : r;
}

const datagen::Preset& require_preset(const ExperimentConfig& cfg,
                                      const std::string& expected,
                                      datagen::Preset& storage) {
  storage = datagen::preset(cfg.preset.empty() ? expected : cfg.preset);
  if (storage.name != expected) {
    throw std::invalid_argument("runner expects preset '" + expected +
                                "', got '" + storage.name + "'");
  }
  return storage;
}

void require_sweep_keys(const ExperimentConfig& cfg,
                        const std::set<std::string>& allowed) {
  for (const auto& [key, values] : cfg.sweep) {
    if (!allowed.contains(key)) {
      throw std::invalid_argument("unrecognized sweep parameter '" + key + "'");
    }
    if (values.empty()) {
      throw std::invalid_argument("sweep parameter '" + key + "' is empty");
    }
  }
}

bool sweep_keeps(const ExperimentConfig& cfg, const std::string& key,
                 double value) {
  auto it = cfg.sweep.find(key);
  if (it == cfg.sweep.end()) return true;
  for (double v : it->second) {
    if (std::abs(v - value) < 1e-9) return true;
  }
  return false;
}

std::uint64_t fnv1a(const double* data, std::size_t count) {
  std::uint64_t h = 1469598103934665603ULL;
  const auto* bytes = reinterpret_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < count * sizeof(double); ++i) {
    h ^= bytes[i];
    h *= 1099511628211ULL;
  }
  return h;
}

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json sweep_json = nlohmann::json::object();
  for (const auto& [k, v] : sweep) sweep_json[k] = v;
  nlohmann::json j = {{"preset", preset},
                      {"trials", trials},
                      {"seed", seed},
                      {"methods", methods},
                      {"sweep", sweep_json},
                      {"output_path", output_path},
                      {"format", format == Format::kCsv ? "csv" : "json"}};
  if (fixed_design.has_value()) j["fixed_design"] = *fixed_design;
  return j;
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  ExperimentConfig cfg;
  cfg.preset = j.value("preset", std::string{});
  cfg.trials = j.value("trials", 0);
  if (cfg.trials < 0) throw std::invalid_argument("config: trials < 0");
  cfg.seed = j.value("seed", std::uint64_t{0});
  cfg.methods = j.value("methods", std::vector<std::string>{});
  if (j.contains("sweep")) {
    for (const auto& [k, v] : j.at("sweep").items()) {
      cfg.sweep[k] = v.get<std::vector<double>>();
    }
  }
  if (j.contains("fixed_design")) cfg.fixed_design = j.at("fixed_design").get<bool>();
  cfg.output_path = j.value("output_path", std::string{});
  const std::string fmt = j.value("format", "csv");
  if (fmt == "csv") {
    cfg.format = Format::kCsv;
  } else if (fmt == "json") {
    cfg.format = Format::kJson;
  } else {
    throw std::invalid_argument("config: unknown format '" + fmt + "'");
  }
  return cfg;
}

bool operator==(const TrialRecord& a, const TrialRecord& b) {
  return a.trial == b.trial && a.method == b.method && a.params == b.params &&
         a.excess_risk == b.excess_risk && a.aux == b.aux;
}

std::vector<TrialRecord> run_linear_sweep(const ExperimentConfig& cfg) {
  datagen::Preset storage;
  const auto& p = require_preset(cfg, "example_4_1", storage);
  require_sweep_keys(cfg, {"d_aug"});
  const int trials = cfg.trials > 0 ? cfg.trials : p.trials;

  Rng theta_rng = Rng::substream(cfg.seed, kTagTheta);
  const auto model = p.materialize_linear(theta_rng);

  std::vector<TrialRecord> records;
  for (std::size_t ci = 0; ci < p.cells.size(); ++ci) {
    const auto& cell = p.cells[ci];
    if (!sweep_keeps(cfg, "d_aug", cell.d_aug)) continue;

    Rng cell_rng = Rng::substream(cfg.seed, kTagCell, ci);
    const Matrix x = datagen::gaussian_matrix(p.n, p.d, cell_rng);
    AugmentedDataset aug =
        augment::build_augmented(x, x * model.theta_star, cell.aug, cell_rng);
    const std::uint64_t design_hash =
        fnv1a(aug.x_aug_stacked.data(), aug.x_aug_stacked.size());

    // The deterministic BlockScale augmentation leaves Sigma_S singular
    // (the sign-flipped block cancels in S), so only the label-invariant
    // risk quantities are defined for these cells.
    const auto dp = augment::d_prime(aug);
    const double theory_dac = theory::dac_risk_pred(
        p.d, static_cast<int>(dp.d_aug), model.sigma, p.n);
    const double theory_da_erm = theory::da_erm_risk_pred(
        p.d, static_cast<int>(dp.d_aug), dp.value, model.sigma, p.n);

    // The LS estimators are linear in y; solve operators are factored out
    // once per cell and cross-checked against the estimator path below.
    const Matrix q = matkit::null_space_basis(aug.delta, aug.tol);
    const Matrix t_dac = q * matkit::pinv(x * q, aug.tol);
    const Matrix t_da = matkit::pinv(aug.x_aug_stacked, aug.tol);

    const double stack = static_cast<double>((1 + aug.alpha) * aug.n());
    const Matrix gram_aug =
        aug.x_aug_stacked.transpose() * aug.x_aug_stacked / stack;

    Vector eps(p.n);
    for (int t = 0; t < trials; ++t) {
      Rng noise = Rng::substream(cfg.seed, kTagNoise, ci, t);
      for (Index i = 0; i < eps.size(); ++i) {
        eps(i) = noise.normal(0.0, model.sigma);
      }
      const Vector y = x * model.theta_star + eps;
      Vector my((1 + aug.alpha) * p.n);
      for (int j = 0; j <= aug.alpha; ++j) my.segment(j * p.n, p.n) = y;

      const Vector th_dac = t_dac * y;
      const Vector th_da = t_da * my;
      if (t == 0) {
        aug.y = y;
        const auto ref_dac = estimators::dac_hard_ls(aug);
        const auto ref_da = estimators::da_erm_ls(aug);
        if ((ref_dac.theta_hat - th_dac).cwiseAbs().maxCoeff() > 1e-9 ||
            (ref_da.theta_hat - th_da).cwiseAbs().maxCoeff() > 1e-9) {
          throw std::logic_error("linear sweep: solve operator mismatch");
        }
      }

      for (const auto& [name, th] :
           {std::pair<const char*, const Vector&>{"dac_hard", th_dac},
            std::pair<const char*, const Vector&>{"da_erm", th_da}}) {
        TrialRecord rec;
        rec.trial = t;
        rec.method = name;
        rec.params = {{"d_aug", static_cast<double>(cell.d_aug)},
                      {"d_c1", cell.params.at("d_c1").get<double>()},
                      {"d_e1", cell.params.at("d_e1").get<double>()}};
        const Vector diff = th - model.theta_star;
        rec.excess_risk = clamped_risk(diff.dot(gram_aug * diff));
        rec.aux["d_prime"] = dp.value;
        rec.aux["theory_dac"] = theory_dac;
        rec.aux["theory_da_erm"] = theory_da_erm;
        records.push_back(std::move(rec));
      }
    }

    // Fixed-design contract: the cell design must be bit-identical across
    // the whole trial loop.
    if (fnv1a(aug.x_aug_stacked.data(), aug.x_aug_stacked.size()) !=
        design_hash) {
      throw std::logic_error("linear sweep: fixed design drifted");
    }
  }
  return records;
}

std::vector<TrialRecord> run_logistic_sweep(const ExperimentConfig& cfg) {
  datagen::Preset storage;
  const auto& p = require_preset(cfg, "example_4_2", storage);
  require_sweep_keys(cfg, {"d_aug", "alpha"});
  const int trials = cfg.trials > 0 ? cfg.trials : p.trials;

  estimators::OptimizerConfig opt;
  opt.max_iters = 800;
  opt.step_size = 0.25;
  opt.grad_tol = 1e-6;

  std::vector<TrialRecord> records;
  for (const int d_aug : p.d_aug_grid) {
    if (!sweep_keeps(cfg, "d_aug", d_aug)) continue;
    for (const int alpha : p.alpha_grid) {
      if (!sweep_keeps(cfg, "alpha", alpha)) continue;
      augment::AugmentationSpec aug_spec;
      aug_spec.kind = augment::CoordinateResample{d_aug};
      aug_spec.alpha = alpha;

      for (int t = 0; t < trials; ++t) {
        // Model, training draw and test draw share a stream across the
        // alpha cells (common random numbers); only the augmentation
        // stream depends on alpha. DAC results are then comparable
        // across alpha exactly as the theory says they should be.
        Rng model_rng = Rng::substream(cfg.seed, kTagModel, d_aug, t);
        const auto model = p.materialize_logistic(model_rng);
        const auto [x, y] = datagen::gen_logistic(model, p.n, model_rng);

        Rng aug_rng = Rng::substream(
            cfg.seed, kTagAug, d_aug * 1000 + static_cast<std::uint64_t>(alpha),
            t);
        const AugmentedDataset aug =
            augment::build_augmented(x, y, aug_spec, aug_rng);

        const auto fit_dac = estimators::logistic_fit(
            aug, estimators::LogisticMode::kDacHard, p.c0, opt);
        const auto fit_da = estimators::logistic_fit(
            aug, estimators::LogisticMode::kDaErm, p.c0, opt);

        Rng test_rng = Rng::substream(cfg.seed, kTagTest, d_aug, t);
        const auto [xt, yt] = datagen::gen_logistic(model, p.test_size, test_rng);

        const auto test_error = [&](const Vector& theta) {
          int wrong = 0;
          const Vector s = xt * theta;
          for (Index i = 0; i < s.size(); ++i) {
            const double pred = s(i) > 0 ? 1.0 : 0.0;
            if (pred != yt(i)) ++wrong;
          }
          return static_cast<double>(wrong) / static_cast<double>(s.size());
        };
        const double bayes = test_error(model.theta_star);

        for (const auto& [name, fit] :
             {std::pair<const char*, const estimators::LinearEstimate&>{
                  "dac_hard", fit_dac},
              std::pair<const char*, const estimators::LinearEstimate&>{
                  "da_erm", fit_da}}) {
          TrialRecord rec;
          rec.trial = t;
          rec.method = name;
          rec.params = {{"d_aug", static_cast<double>(d_aug)},
                        {"alpha", static_cast<double>(alpha)}};
          const double err = test_error(fit.theta_hat);
          rec.excess_risk = clamped_risk(err);
          rec.aux["test_error"] = err;
          rec.aux["bayes_test_error"] = bayes;
          rec.aux["converged"] = fit.diagnostics.at("converged");
          records.push_back(std::move(rec));
        }
      }
    }
  }
  return records;
}

std::vector<TrialRecord> run_misspec_sweep(const ExperimentConfig& cfg) {
  datagen::Preset storage;
  const auto& p = require_preset(cfg, "example_6", storage);
  require_sweep_keys(cfg, {"d_aug", "lambda"});
  const int trials = cfg.trials > 0 ? cfg.trials : p.trials;

  Rng theta_rng = Rng::substream(cfg.seed, kTagTheta);
  const auto model = p.materialize_misspec(theta_rng);

  std::vector<double> lambda_grid = p.lambda_grid;
  if (auto it = cfg.sweep.find("lambda"); it != cfg.sweep.end()) {
    lambda_grid = it->second;
  }

  std::vector<TrialRecord> records;
  for (std::size_t ci = 0; ci < p.cells.size(); ++ci) {
    const auto& cell = p.cells[ci];
    if (!sweep_keeps(cfg, "d_aug", cell.d_aug)) continue;

    Rng cell_rng = Rng::substream(cfg.seed, kTagCell, ci);
    const Matrix x = datagen::gaussian_matrix(p.n, p.d, cell_rng);
    AugmentedDataset aug =
        augment::build_augmented(x, x * model.theta_star, cell.aug, cell_rng);
    const std::uint64_t design_hash =
        fnv1a(aug.x_aug_stacked.data(), aug.x_aug_stacked.size());

    const Matrix sigma_x = x.transpose() * x / static_cast<double>(p.n);
    const auto lam_star = theory::optimal_lambda(aug, model.theta_star, model.sigma);

    std::vector<std::pair<double, bool>> lambdas;  // (lambda, is_lambda_star)
    for (double l : lambda_grid) lambdas.emplace_back(l, false);
    if (!lam_star.label_invariant) {
      lambdas.emplace_back(lam_star.value, true);
      lambdas.emplace_back(lam_star.value / 100.0, false);
      lambdas.emplace_back(lam_star.value * 100.0, false);
    }

    // Per-lambda solve operators plus hard-DAC and DA-ERM operators.
    const Matrix sigma_d = aug.delta.transpose() * aug.delta /
                           static_cast<double>((1 + aug.alpha) * p.n);
    std::vector<Matrix> t_soft;
    std::vector<theory::SoftBiasVariance> sbv;
    for (const auto& [lam, unused] : lambdas) {
      t_soft.push_back(matkit::pinv(sigma_x + lam * sigma_d, 1e-13) *
                       x.transpose() / static_cast<double>(p.n));
      sbv.push_back(theory::soft_bias_variance(aug, model.theta_star,
                                               model.sigma, lam));
    }
    const Matrix q = matkit::null_space_basis(aug.delta, aug.tol);
    const Matrix t_hard = q * matkit::pinv(x * q, aug.tol);
    const Matrix t_da = matkit::pinv(aug.x_aug_stacked, aug.tol);

    Vector eps(p.n);
    for (int t = 0; t < trials; ++t) {
      Rng noise = Rng::substream(cfg.seed, kTagNoise, ci, t);
      for (Index i = 0; i < eps.size(); ++i) {
        eps(i) = noise.normal(0.0, model.sigma);
      }
      const Vector y = x * model.theta_star + eps;
      Vector my((1 + aug.alpha) * p.n);
      for (int j = 0; j <= aug.alpha; ++j) my.segment(j * p.n, p.n) = y;

      if (t == 0) {
        aug.y = y;
        const auto ref = estimators::dac_soft_ls(aug, lambdas.front().first);
        if ((ref.theta_hat - Vector(t_soft.front() * y)).cwiseAbs().maxCoeff() >
            1e-9) {
          throw std::logic_error("misspec sweep: soft operator mismatch");
        }
      }

      const auto risk_of = [&](const Vector& th) {
        const Vector diff = th - model.theta_star;
        return clamped_risk(diff.dot(sigma_x * diff));
      };

      for (std::size_t li = 0; li < lambdas.size(); ++li) {
        TrialRecord rec;
        rec.trial = t;
        rec.method = "dac_soft";
        rec.params = {{"d_aug", static_cast<double>(cell.d_aug)},
                      {"lambda", lambdas[li].first}};
        rec.excess_risk = risk_of(t_soft[li] * y);
        rec.aux["is_lambda_star"] = lambdas[li].second ? 1.0 : 0.0;
        rec.aux["lambda_star"] =
            lam_star.label_invariant ? -1.0 : lam_star.value;
        rec.aux["theory_var"] = sbv[li].var;
        rec.aux["theory_bias"] = sbv[li].bias;
        records.push_back(std::move(rec));
      }
      for (const auto& [name, th] :
           {std::pair<const char*, Vector>{"dac_hard", t_hard * y},
            std::pair<const char*, Vector>{"da_erm", t_da * my}}) {
        TrialRecord rec;
        rec.trial = t;
        rec.method = name;
        rec.params = {{"d_aug", static_cast<double>(cell.d_aug)},
                      {"lambda", -1.0}};
        rec.excess_risk = risk_of(th);
        rec.aux["lambda_star"] =
            lam_star.label_invariant ? -1.0 : lam_star.value;
        records.push_back(std::move(rec));
      }
    }

    if (fnv1a(aug.x_aug_stacked.data(), aug.x_aug_stacked.size()) !=
        design_hash) {
      throw std::logic_error("misspec sweep: fixed design drifted");
    }
  }
  return records;
}

std::vector<TrialRecord> run_domain_adaptation(const ExperimentConfig& cfg) {
  datagen::Preset storage;
  const auto& p = require_preset(cfg, "example_C1", storage);
  require_sweep_keys(cfg, {"sigma_t"});
  const int trials = cfg.trials > 0 ? cfg.trials : p.trials;

  Rng setup_rng = Rng::substream(cfg.seed, kTagTheta);
  datagen::DomainSpec spec = p.materialize_domain(1.0, setup_rng);

  std::vector<double> sigma_ts = p.sigma_t_grid;
  if (auto it = cfg.sweep.find("sigma_t"); it != cfg.sweep.end()) {
    sigma_ts = it->second;
  }

  std::vector<TrialRecord> records;
  for (int t = 0; t < trials; ++t) {
    Rng trial_rng = Rng::substream(cfg.seed, kTagTrial, t);
    const auto aug_spec = p.materialize_linear_maps(spec, trial_rng);
    const auto [x, y] = datagen::gen_domain(spec, datagen::Domain::kSource,
                                            p.n, trial_rng);
    const AugmentedDataset aug =
        augment::build_augmented(x, y, aug_spec, trial_rng);

    const auto fit_dac = estimators::dac_hard_ls(aug);
    const auto fit_da = estimators::da_erm_ls(aug);
    const auto eer = theory::eer_e(aug, spec, 100, trial_rng);

    // Map-conditioning scalars of the drawn augmentations.
    const auto& maps = std::get<augment::LinearMaps>(aug_spec.kind).maps;
    double nu1 = 1.0;
    Matrix avg = Matrix::Identity(p.d, p.d);
    for (const auto& a : maps) {
      Eigen::JacobiSVD<Matrix> svd(a);
      nu1 = std::max(nu1, svd.singularValues()(0));
      avg += a;
    }
    avg /= static_cast<double>(1 + p.alpha);
    Eigen::JacobiSVD<Matrix> svd_avg(avg);
    const double nu2 = svd_avg.singularValues().tail(1)(0);

    for (const double st : sigma_ts) {
      datagen::DomainSpec spec_t = spec;
      spec_t.sigma_t = st;
      for (const auto& [name, fit] :
           {std::pair<const char*, const estimators::LinearEstimate&>{
                "dac_hard", fit_dac},
            std::pair<const char*, const estimators::LinearEstimate&>{
                "da_erm", fit_da}}) {
        TrialRecord rec;
        rec.trial = t;
        rec.method = name;
        rec.params = {{"sigma_t", st}};
        rec.excess_risk = clamped_risk(
            theory::domain_target_quantities(spec_t, fit.theta_hat)
                .target_excess);
        rec.aux["eer_e"] = eer.value;
        rec.aux["nu1"] = nu1;
        rec.aux["nu2"] = nu2;
        if (auto it = fit.diagnostics.find("constraint_residual");
            it != fit.diagnostics.end()) {
          rec.aux["constraint_residual"] = it->second;
        }
        records.push_back(std::move(rec));
      }
    }
  }
  return records;
}

ExpansionFuzzReport run_expansion_fuzz(const ExperimentConfig& cfg) {
  const int trials = cfg.trials > 0 ? cfg.trials : 200;
  ExpansionFuzzReport rep;
  rep.trials = trials;
  for (int t = 0; t < trials; ++t) {
    Rng rng = Rng::substream(cfg.seed, kTagFuzz, t);
    const auto space = expansion::random_space(12, 2, rng);
    const auto h = expansion::random_classifier(space, rng);
    const double q = rng.uniform(0.05, 0.45);
    const double c = rng.uniform(1.05, 3.0);
    const auto r = expansion::verify_lemma_c3(space, h, q, c);
    if (r.strict_augmentation) ++rep.strict_spaces;
    if (r.a_applicable) {
      ++rep.a_applicable;
      if (!r.a_holds) ++rep.a_violations;
    }
    if (r.b_applicable) {
      ++rep.b_applicable;
      if (!r.b_holds) ++rep.b_violations;
    }
    if (!r.a_applicable && !r.b_applicable) ++rep.inapplicable;
  }
  return rep;
}

nlohmann::json ExpansionFuzzReport::to_json() const {
  return {{"trials", trials},
          {"a_applicable", a_applicable},
          {"b_applicable", b_applicable},
          {"a_violations", a_violations},
          {"b_violations", b_violations},
          {"inapplicable", inapplicable},
          {"strict_spaces", strict_spaces}};
}

void emit(const std::vector<TrialRecord>& records, Format format,
          const std::string& path, const nlohmann::json& config_json) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("emit: cannot open '" + path + "' for writing");
  }

  if (format == Format::kCsv) {
    std::vector<std::string> param_names;
    std::set<std::string> aux_names;
    for (const auto& r : records) {
      for (const auto& [k, v] : r.params) {
        if (std::find(param_names.begin(), param_names.end(), k) ==
            param_names.end()) {
          param_names.push_back(k);
        }
      }
      for (const auto& [k, v] : r.aux) aux_names.insert(k);
    }
    out << "trial,method";
    for (const auto& k : param_names) out << ',' << k;
    out << ",excess_risk";
    for (const auto& k : aux_names) out << ",aux_" << k;
    out << '\n';
    for (const auto& r : records) {
      out << r.trial << ',' << r.method;
      for (const auto& k : param_names) {
        out << ',';
        for (const auto& [pk, pv] : r.params) {
          if (pk == k) {
            out << format_double(pv);
            break;
          }
        }
      }
      out << ',' << format_double(r.excess_risk);
      for (const auto& k : aux_names) {
        out << ',';
        if (auto it = r.aux.find(k); it != r.aux.end()) {
          out << format_double(it->second);
        }
      }
      out << '\n';
    }
  } else {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : records) {
      nlohmann::json params = nlohmann::json::object();
      for (const auto& [k, v] : r.params) params[k] = v;
      arr.push_back({{"trial", r.trial},
                     {"method", r.method},
                     {"params", params},
                     {"excess_risk", r.excess_risk},
                     {"aux", r.aux}});
    }
    out << arr.dump(2) << '\n';
  }
  if (!out) {
    throw std::runtime_error("emit: write failed for '" + path + "'");
  }
  out.close();

  std::ofstream meta(path + ".meta.json");
  if (!meta) {
    throw std::runtime_error("emit: cannot open sidecar for '" + path + "'");
  }
  const nlohmann::json sidecar = {{"config", config_json},
                                  {"version", kVersion}};
  meta << sidecar.dump(2) << '\n';
}

std::vector<TrialRecord> parse_records_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("parse_records_json: cannot open '" + path + "'");
  }
  nlohmann::json arr;
  in >> arr;
  std::vector<TrialRecord> records;
  for (const auto& j : arr) {
    TrialRecord r;
    r.trial = j.at("trial").get<int>();
    r.method = j.at("method").get<std::string>();
    for (const auto& [k, v] : j.at("params").items()) {
      r.params.emplace_back(k, v.get<double>());
    }
    r.excess_risk = j.at("excess_risk").get<double>();
    for (const auto& [k, v] : j.at("aux").items()) {
      r.aux[k] = v.get<double>();
    }
    records.push_back(std::move(r));
  }
  return records;
}

MeanSe mean_se(const std::vector<double>& values) {
  MeanSe out;
  out.count = static_cast<int>(values.size());
  if (values.empty()) return out;
  double sum = 0.0;
  for (double v : values) sum += v;
  out.mean = sum / out.count;
  double ss = 0.0;
  for (double v : values) ss += (v - out.mean) * (v - out.mean);
  if (out.count > 1) {
    out.se = std::sqrt(ss / (out.count - 1) / out.count);
  }
  return out;
}

std::vector<double> risks_of(const std::vector<TrialRecord>& records,
                             const std::string& method,
                             const std::string& param, double value,
                             double tol) {
  std::vector<double> out;
  for (const auto& r : records) {
    if (r.method != method) continue;
    if (!param.empty()) {
      bool match = false;
      for (const auto& [k, v] : r.params) {
        if (k == param && std::abs(v - value) <= tol) {
          match = true;
          break;
        }
      }
      if (!match) continue;
    }
    out.push_back(r.excess_risk);
  }
  return out;
}

}  // namespace daclab::experiments
