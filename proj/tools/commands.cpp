#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>
#include <utility>

#include <CLI11.hpp>

#include "xover/errors.hpp"
#include "xover/estimators.hpp"
#include "xover/inference.hpp"
#include "xover/io.hpp"
#include "xover/power_study.hpp"
#include "xover/rng.hpp"
#include "xover/simulation.hpp"
#include "xover/version.hpp"

namespace xover::cli {

using ojson = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// JSON serialization
// ---------------------------------------------------------------------------

namespace {

void dump_value(const ojson& j, std::string& out, int indent, int depth) {
  auto newline = [&](int d) {
    if (indent > 0) {
      out.push_back('\n');
      out.append(static_cast<std::size_t>(indent * d), ' ');
    }
  };
  switch (j.type()) {
    case ojson::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out.push_back('{');
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out.push_back(',');
        first = false;
        newline(depth + 1);
        out += ojson(it.key()).dump();
        out += indent > 0 ? ": " : ":";
        dump_value(it.value(), out, indent, depth + 1);
      }
      newline(depth);
      out.push_back('}');
      return;
    }
    case ojson::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out.push_back('[');
      bool first = true;
      for (const auto& v : j) {
        if (!first) out.push_back(',');
        first = false;
        newline(depth + 1);
        dump_value(v, out, indent, depth + 1);
      }
      newline(depth);
      out.push_back(']');
      return;
    }
    case ojson::value_t::number_float: {
      double v = j.get<double>();
      if (!std::isfinite(v))
        throw InvalidInput("refusing to serialize a non-finite number");
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      out += buf;
      return;
    }
    default:
      // integers, strings, booleans, null: the stock serializer is exact
      out += j.dump();
      return;
  }
}

}  // namespace

std::string dump_json_g17(const ojson& j, int indent) {
  std::string out;
  dump_value(j, out, indent, 0);
  return out;
}

// ---------------------------------------------------------------------------
// Shared helpers
// ---------------------------------------------------------------------------

namespace {

ojson engine_json() {
  return ojson{{"name", "xover"}, {"version", kVersion}};
}

std::vector<Method> resolve_methods(const std::vector<std::string>& names,
                                    bool have_covariates) {
  std::vector<std::string> wanted = names;
  if (wanted.empty()) {
    wanted = {"cr", "cr_alt", "pr"};
    if (have_covariates) {
      wanted.push_back("cr_adj");
      wanted.push_back("pr_adj");
    }
  }
  std::vector<Method> out;
  for (const auto& w : wanted) {
    auto m = method_from_name(w);
    if (!m)
      throw ConfigError("unknown method '" + w +
                        "' (expected cr, cr_alt, pr, cr_adj or pr_adj)");
    out.push_back(*m);
  }
  return out;
}

ojson common_config(const CommonOptions& c) {
  return ojson{{"pi1", c.pi1},
               {"alpha", c.alpha},
               {"theta_star", c.theta_star},
               {"impute_mode", c.impute},
               {"seed", c.seed}};
}

ojson test_outcome_json(const TestOutcome& t) {
  return ojson{{"statistic", t.statistic},
               {"p_value", t.p_value},
               {"critical_value", t.critical_value},
               {"reject", t.reject}};
}

}  // namespace

// ---------------------------------------------------------------------------
// estimate
// ---------------------------------------------------------------------------

std::string cmd_estimate(const EstimateOptions& opts) {
  if (opts.data_path.empty())
    throw ConfigError("estimate: --data <trial.csv> is required");
  TrialDataset ds =
      io::read_trial_csv_file(opts.data_path, opts.pi1, opts.impute);
  std::vector<Method> methods =
      resolve_methods(opts.methods, ds.covariates.cols() > 0);

  DesignParams design{ds.n(), opts.pi1, opts.alpha, opts.theta_star};

  ojson config = ojson{{"data", opts.data_path}};
  ojson method_names = ojson::array();
  for (Method m : methods) method_names.push_back(method_name(m));
  config["methods"] = method_names;
  config.update(common_config(opts));

  ojson results = ojson::object();
  for (Method m : methods) {
    EstimateReport r = estimate(ds, m);
    ojson entry{{"estimate", r.estimate},
                {"asymptotic_variance", r.asymptotic_variance},
                {"standard_error", r.standard_error}};
    try {
      TestOutcome t = one_sided_test(r, design);
      entry.update(test_outcome_json(t));
    } catch (const DegenerateVariance&) {
      entry["statistic"] = nullptr;
      entry["p_value"] = nullptr;
      entry["reject"] = false;
      entry["warning"] = "degenerate_variance";
    }
    if (r.degenerate_variance && !entry.contains("warning"))
      entry["warning"] = "degenerate_variance";
    results[method_name(m)] = std::move(entry);
  }

  ojson out{{"command", "estimate"},
            {"engine", engine_json()},
            {"config", std::move(config)},
            {"n", ds.n()},
            {"results", std::move(results)}};
  return dump_json_g17(out);
}

// ---------------------------------------------------------------------------
// power
// ---------------------------------------------------------------------------

std::string cmd_power(const PowerOptions& opts) {
  if (!(opts.theta_step > 0.0))
    throw ConfigError("power: --theta-step must be positive");
  if (opts.theta_max < opts.theta_min)
    throw ConfigError("power: --theta-max must be >= --theta-min");
  if (opts.n < 1) throw ConfigError("power: --n must be >= 1");

  std::size_t steps = static_cast<std::size_t>(
      std::floor((opts.theta_max - opts.theta_min) / opts.theta_step + 1e-9));

  std::string csv = "theta,lambda,b,test,analytic_power\n";
  DesignParams design{opts.n, opts.pi1, opts.alpha, opts.theta_star};
  for (double b : opts.bs) {
    GaussianDgpParams gp;
    gp.b = b;
    GaussianTruths truths = gaussian_dgp_truths(gp);
    for (double lambda : opts.lambdas) {
      for (std::size_t i = 0; i <= steps; ++i) {
        double theta = opts.theta_min + static_cast<double>(i) * opts.theta_step;
        const std::pair<const char*, double> rows[] = {
            {"pr", power_parallel(theta, truths.sigma2_pr, design)},
            {"pr_adj", power_parallel(theta, truths.sigma2_pr_adj, design)},
            {"cr",
             power_crossover(theta, 2.0 * lambda, truths.sigma2_cr, design)},
            {"cr_adj", power_crossover(theta, 2.0 * lambda,
                                       truths.sigma2_cr_adj, design)},
        };
        for (const auto& [name, value] : rows) {
          csv += io::format_double(theta);
          csv += ',';
          csv += io::format_double(lambda);
          csv += ',';
          csv += io::format_double(b);
          csv += ',';
          csv += name;
          csv += ',';
          csv += io::format_double(value);
          csv += '\n';
        }
      }
    }
  }
  return csv;
}

// ---------------------------------------------------------------------------
// samplesize
// ---------------------------------------------------------------------------

std::string cmd_samplesize(const SampleSizeOptions& opts) {
  double sigma2_cr, sigma2_pr;
  if (opts.have_icc) {
    if (opts.have_sigma2_cr || opts.have_sigma2_pr)
      throw ConfigError(
          "samplesize: give either --sigma2-cr/--sigma2-pr or --sigma2/--rho, "
          "not both");
    if (!(opts.sigma2 > 0.0))
      throw ConfigError("samplesize: --sigma2 must be positive");
    if (!(opts.rho > -1.0) || !(opts.rho < 1.0))
      throw ConfigError("samplesize: --rho must lie in (-1,1)");
    // Equal per-period variance sigma2 with within-subject correlation rho,
    // equal allocation.
    sigma2_cr = 2.0 * (1.0 - opts.rho) * opts.sigma2;
    sigma2_pr = 4.0 * opts.sigma2;
  } else {
    if (!opts.have_sigma2_cr || !opts.have_sigma2_pr)
      throw ConfigError(
          "samplesize: variance inputs required (--sigma2-cr and --sigma2-pr, "
          "or --sigma2 with --rho)");
    sigma2_cr = opts.sigma2_cr;
    sigma2_pr = opts.sigma2_pr;
  }

  double e = opts.effect - opts.theta_star;
  double carry = opts.lambda0 + opts.lambda1;

  SampleSizeResult n_cr = sample_size(SampleSizeKind::cr_no_carryover, e, 0.0,
                                      sigma2_cr, opts.alpha, opts.beta);
  SampleSizeResult n_cr_carry = sample_size(SampleSizeKind::cr_carryover, e,
                                            carry, sigma2_cr, opts.alpha,
                                            opts.beta);
  SampleSizeResult n_pr = sample_size(SampleSizeKind::pr, e, 0.0, sigma2_pr,
                                      opts.alpha, opts.beta);
  double are = pitman_are(sigma2_cr, sigma2_pr, e, carry);
  double breakeven =
      carryover_breakeven(e, std::sqrt(sigma2_cr), std::sqrt(sigma2_pr));

  ojson config{{"effect", opts.effect}, {"lambda0", opts.lambda0},
               {"lambda1", opts.lambda1}, {"beta", opts.beta},
               {"sigma2_cr", sigma2_cr}, {"sigma2_pr", sigma2_pr}};
  config.update(common_config(opts));

  ojson results{
      {"n_cr", n_cr.n},
      {"n_cr_exact", n_cr.n_exact},
      {"n_cr_carryover", n_cr_carry.n},
      {"n_cr_carryover_exact", n_cr_carry.n_exact},
      {"n_pr", n_pr.n},
      {"n_pr_exact", n_pr.n_exact},
      {"are", are},
      {"breakeven_carryover", breakeven},
  };

  ojson out{{"command", "samplesize"},
            {"engine", engine_json()},
            {"config", std::move(config)},
            {"results", std::move(results)}};
  return dump_json_g17(out);
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

namespace {

const TestTally* find_tally(const PowerStudyResult& r, Method m) {
  for (const auto& t : r.tests)
    if (t.method == m) return &t;
  return nullptr;
}

}  // namespace

SimulateOutput cmd_simulate(const SimulateOptions& opts) {
  if (opts.dgp != "gaussian" && opts.dgp != "resample")
    throw ConfigError("simulate: --dgp must be 'gaussian' or 'resample'");
  if (opts.reps < 1) throw ConfigError("simulate: --reps must be >= 1");
  if (opts.ns.empty() || opts.lambdas.empty() || opts.thetas.empty())
    throw ConfigError("simulate: --n, --lambda and --theta must be non-empty");

  std::vector<Method> tests;
  for (const auto& t : opts.tests) {
    auto m = method_from_name(t);
    if (!m) throw ConfigError("simulate: unknown test '" + t + "'");
    tests.push_back(*m);
  }
  if (tests.empty()) throw ConfigError("simulate: --tests must be non-empty");

  const bool resample = opts.dgp == "resample";
  const double tau = opts.resolved_tau();

  CohortData cohort;
  if (resample) {
    cohort = opts.cohort_csv.empty()
                 ? synthetic_cohort()
                 : io::read_cohort_csv_file(opts.cohort_csv, opts.impute);
    if (!opts.write_cohort.empty())
      io::write_cohort_csv_file(opts.write_cohort, cohort);
  }

  // Config echo: exactly the keys that determine the result, so a re-run
  // from this object reproduces the bytes.  Execution knobs (threads,
  // output paths) are deliberately absent.
  ojson config = ojson::object();
  config["dgp"] = opts.dgp;
  config["n"] = opts.ns;
  config["lambda"] = opts.lambdas;
  config["theta"] = opts.thetas;
  config["tau"] = tau;
  if (!resample) config["b"] = opts.b;
  if (resample) {
    config["rho"] = opts.rho;
    config["cohort_csv"] = opts.cohort_csv;
  }
  config["reps"] = opts.reps;
  config["tests"] = opts.tests;
  config.update(common_config(opts));

  ojson cells = ojson::array();
  std::string csv = "n,lambda,theta,power_pr,power_pr_adj,power_cr,power_cr_adj\n";

  std::uint64_t cell_index = 0;
  for (std::size_t n : opts.ns) {
    for (double lambda : opts.lambdas) {
      for (double theta : opts.thetas) {
        PowerStudyConfig pc;
        pc.design = DesignParams{n, opts.pi1, opts.alpha, opts.theta_star};
        pc.tests = tests;
        pc.replications = opts.reps;
        pc.seed = rng::derive_seed(opts.seed, cell_index);
        pc.threads = opts.threads;
        if (resample) {
          pc.dgp = DgpKind::resample;
          pc.resample =
              ResampleDgpConfig{cohort, theta, lambda, tau, opts.rho, n,
                                opts.pi1};
        } else {
          pc.dgp = DgpKind::gaussian;
          pc.gaussian = GaussianDgpParams{theta,  theta, tau, lambda,
                                          lambda, opts.b, n,  opts.pi1};
        }

        PowerStudyResult result = run_power_study(pc);

        ojson tally_json = ojson::object();
        for (const auto& t : result.tests) {
          tally_json[method_name(t.method)] =
              ojson{{"power", t.power},
                    {"rejections", t.rejections},
                    {"replications", result.replications},
                    {"mc_se", t.mc_se},
                    {"mean_estimate", t.mean_estimate},
                    {"estimate_mc_se", t.estimate_mc_se},
                    {"mean_asymptotic_variance", t.mean_asymptotic_variance}};
        }
        cells.push_back(ojson{{"n", n},
                              {"lambda", lambda},
                              {"theta", theta},
                              {"cell_seed", pc.seed},
                              {"redraws", result.redraws},
                              {"tests", std::move(tally_json)}});

        csv += std::to_string(n);
        csv += ',';
        csv += io::format_double(lambda);
        csv += ',';
        csv += io::format_double(theta);
        for (Method m : {Method::pr, Method::pr_adj, Method::cr,
                         Method::cr_adj}) {
          csv += ',';
          const TestTally* t = find_tally(result, m);
          if (t) csv += io::format_double(t->power);
        }
        csv += '\n';
        ++cell_index;
      }
    }
  }

  ojson out{{"command", "simulate"}, {"engine", engine_json()},
            {"seed", opts.seed},     {"config", std::move(config)},
            {"cells", std::move(cells)}};
  return SimulateOutput{dump_json_g17(out), std::move(csv)};
}

// ---------------------------------------------------------------------------
// sensitivity
// ---------------------------------------------------------------------------

std::string cmd_sensitivity(const SensitivityOptions& opts) {
  if (opts.data_path.empty())
    throw ConfigError("sensitivity: --data <trial.csv> is required");
  auto m = method_from_name(opts.method);
  if (!m) throw ConfigError("sensitivity: unknown method '" + opts.method + "'");
  for (double shift : opts.lambda_grid)
    if (shift > 0.0)
      throw ConfigError(
          "sensitivity: --lambda-grid values must be <= 0 (adverse shifts)");

  TrialDataset ds =
      io::read_trial_csv_file(opts.data_path, opts.pi1, opts.impute);
  EstimateReport report = estimate(ds, *m);
  DesignParams design{ds.n(), opts.pi1, opts.alpha, opts.theta_star};

  double tip = tipping_point(report, design);

  ojson grid = ojson::array();
  for (double shift : opts.lambda_grid) {
    TestOutcome t = sensitivity_test(report, design, SensitivitySpec{shift});
    ojson entry{{"lambda", shift}};
    entry.update(test_outcome_json(t));
    grid.push_back(std::move(entry));
  }

  ojson config{{"data", opts.data_path},
               {"method", method_name(*m)},
               {"lambda_grid", opts.lambda_grid}};
  config.update(common_config(opts));

  ojson results{{"estimate", report.estimate},
                {"standard_error", report.standard_error},
                {"n", report.n},
                {"tipping_point", tip},
                {"grid", std::move(grid)}};
  if (tip > 0.0)
    results["note"] =
        "estimate falls short of the margin even unshifted; no lambda <= 0 "
        "rejects";

  ojson out{{"command", "sensitivity"},
            {"engine", engine_json()},
            {"config", std::move(config)},
            {"results", std::move(results)}};
  return dump_json_g17(out);
}

// ---------------------------------------------------------------------------
// CLI wiring
// ---------------------------------------------------------------------------

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return 2;
  if (dynamic_cast<const ParseError*>(&e)) return 3;
  return 4;
}

namespace {

struct Binding {
  CLI::Option* opt = nullptr;
  std::function<void(const ojson&)> apply;
};
using Bindings = std::map<std::string, Binding>;

[[noreturn]] void config_type_error(const std::string& key,
                                    const char* expected) {
  throw ConfigError("config key '" + key + "': expected " + expected);
}

void bind_double(Bindings& b, const std::string& key, CLI::Option* opt,
                 double* target) {
  b[key] = {opt, [key, target](const ojson& v) {
              if (!v.is_number()) config_type_error(key, "a number");
              *target = v.get<double>();
            }};
}

void bind_bool(Bindings& b, const std::string& key, CLI::Option* opt,
               bool* target) {
  b[key] = {opt, [key, target](const ojson& v) {
              if (!v.is_boolean()) config_type_error(key, "a boolean");
              *target = v.get<bool>();
            }};
}

void bind_u64(Bindings& b, const std::string& key, CLI::Option* opt,
              std::uint64_t* target) {
  b[key] = {opt, [key, target](const ojson& v) {
              if (!v.is_number_integer() && !v.is_number_unsigned())
                config_type_error(key, "an integer");
              *target = v.get<std::uint64_t>();
            }};
}

void bind_size(Bindings& b, const std::string& key, CLI::Option* opt,
               std::size_t* target) {
  b[key] = {opt, [key, target](const ojson& v) {
              if (!v.is_number_integer() && !v.is_number_unsigned())
                config_type_error(key, "an integer");
              *target = v.get<std::size_t>();
            }};
}

void bind_string(Bindings& b, const std::string& key, CLI::Option* opt,
                 std::string* target) {
  b[key] = {opt, [key, target](const ojson& v) {
              if (!v.is_string()) config_type_error(key, "a string");
              *target = v.get<std::string>();
            }};
}

void bind_dvec(Bindings& b, const std::string& key, CLI::Option* opt,
               std::vector<double>* target) {
  b[key] = {opt, [key, target](const ojson& v) {
              if (v.is_number()) {
                *target = {v.get<double>()};
                return;
              }
              if (!v.is_array()) config_type_error(key, "an array of numbers");
              target->clear();
              for (const auto& x : v) {
                if (!x.is_number()) config_type_error(key, "an array of numbers");
                target->push_back(x.get<double>());
              }
            }};
}

void bind_nvec(Bindings& b, const std::string& key, CLI::Option* opt,
               std::vector<std::size_t>* target) {
  b[key] = {opt, [key, target](const ojson& v) {
              auto one = [&](const ojson& x) {
                if (!x.is_number_integer() && !x.is_number_unsigned())
                  config_type_error(key, "an array of integers");
                target->push_back(x.get<std::size_t>());
              };
              target->clear();
              if (v.is_array())
                for (const auto& x : v) one(x);
              else
                one(v);
            }};
}

void bind_svec(Bindings& b, const std::string& key, CLI::Option* opt,
               std::vector<std::string>* target) {
  b[key] = {opt, [key, target](const ojson& v) {
              if (v.is_string()) {
                *target = {v.get<std::string>()};
                return;
              }
              if (!v.is_array()) config_type_error(key, "an array of strings");
              target->clear();
              for (const auto& x : v) {
                if (!x.is_string()) config_type_error(key, "an array of strings");
                target->push_back(x.get<std::string>());
              }
            }};
}

void merge_config_file(const std::string& path, const Bindings& bindings) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file '" + path + "'");
  ojson cfg;
  try {
    cfg = ojson::parse(f);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config file '" + path + "': " + e.what());
  }
  if (!cfg.is_object())
    throw ConfigError("config file '" + path + "' must hold a JSON object");
  for (auto it = cfg.begin(); it != cfg.end(); ++it) {
    auto b = bindings.find(it.key());
    if (b == bindings.end())
      throw ConfigError("config file '" + path + "': unknown key '" +
                        it.key() + "'");
    // Command-line flags outrank the file.
    if (b->second.opt != nullptr && b->second.opt->count() > 0) continue;
    b->second.apply(it.value());
  }
}

void emit(const std::string& content, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << content;
    if (content.empty() || content.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream f(out_path);
  if (!f) throw ConfigError("cannot open output file '" + out_path + "'");
  f << content;
  if (content.empty() || content.back() != '\n') f << '\n';
}

std::string default_csv_path(const std::string& json_path) {
  std::string base = json_path;
  std::size_t dot = base.rfind('.');
  std::size_t slash = base.find_last_of("/\\");
  if (dot != std::string::npos && (slash == std::string::npos || dot > slash))
    base.resize(dot);
  return base + ".csv";
}

struct CommonCli {
  std::string config_path;
  std::string out_path;
};

void add_common(CLI::App* sub, CommonOptions* c, CommonCli* cc, Bindings* b) {
  sub->add_option("--config", cc->config_path,
                  "JSON config file; explicit flags override its values");
  sub->add_option("--out", cc->out_path, "output path (default: stdout)");
  bind_u64(*b, "seed", sub->add_option("--seed", c->seed, "master RNG seed"),
           &c->seed);
  bind_double(*b, "pi1",
              sub->add_option("--pi1", c->pi1,
                              "probability of assignment to sequence 1"),
              &c->pi1);
  bind_double(*b, "alpha",
              sub->add_option("--alpha", c->alpha, "one-sided test level"),
              &c->alpha);
  bind_double(
      *b, "theta_star",
      sub->add_option("--theta-star", c->theta_star, "noninferiority margin"),
      &c->theta_star);
  bind_bool(*b, "impute_mode",
            sub->add_flag("--impute-mode", c->impute,
                          "fill missing covariate cells instead of failing"),
            &c->impute);
}

void validate_common(const CommonOptions& c) {
  if (!(c.pi1 > 0.0) || !(c.pi1 < 1.0))
    throw ConfigError("--pi1 must lie in (0,1)");
  if (!(c.alpha > 0.0) || !(c.alpha < 1.0))
    throw ConfigError("--alpha must lie in (0,1)");
  if (!std::isfinite(c.theta_star))
    throw ConfigError("--theta-star must be finite");
}

void log_resolved(const std::string& command, const ojson& config) {
  ojson line{{"command", command}, {"config", config}};
  std::cerr << "xover: resolved " << dump_json_g17(line, 0) << '\n';
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"two-treatment two-period crossover trials: estimation, "
               "analytic power and Monte Carlo studies"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  EstimateOptions est;
  PowerOptions pow;
  SampleSizeOptions ssz;
  SimulateOptions sim;
  SensitivityOptions sen;
  CommonCli est_cli, pow_cli, ssz_cli, sim_cli, sen_cli;
  Bindings est_b, pow_b, ssz_b, sim_b, sen_b;

  // NaN sentinels distinguish "not provided" from explicit zeros.
  double ssz_sigma2_cr = std::numeric_limits<double>::quiet_NaN();
  double ssz_sigma2_pr = std::numeric_limits<double>::quiet_NaN();
  double ssz_sigma2 = std::numeric_limits<double>::quiet_NaN();
  double ssz_rho = std::numeric_limits<double>::quiet_NaN();
  double sim_tau = std::numeric_limits<double>::quiet_NaN();

  CLI::App* c_est = app.add_subcommand(
      "estimate", "analyze one trial CSV with the chosen estimators");
  add_common(c_est, &est, &est_cli, &est_b);
  bind_string(est_b, "data",
              c_est->add_option("--data", est.data_path, "trial CSV path"),
              &est.data_path);
  bind_svec(est_b, "methods",
            c_est->add_option("--methods", est.methods,
                              "comma-separated estimator list")
                ->delimiter(','),
            &est.methods);

  CLI::App* c_pow = app.add_subcommand(
      "power", "analytic power curves over a theta/lambda/b grid (CSV)");
  add_common(c_pow, &pow, &pow_cli, &pow_b);
  bind_double(pow_b, "theta_min",
              c_pow->add_option("--theta-min", pow.theta_min, "grid start"),
              &pow.theta_min);
  bind_double(pow_b, "theta_max",
              c_pow->add_option("--theta-max", pow.theta_max, "grid end"),
              &pow.theta_max);
  bind_double(pow_b, "theta_step",
              c_pow->add_option("--theta-step", pow.theta_step, "grid step"),
              &pow.theta_step);
  bind_dvec(pow_b, "lambda",
            c_pow->add_option("--lambda", pow.lambdas,
                              "carry-over values (use --lambda=v1,v2 for "
                              "negatives)")
                ->delimiter(','),
            &pow.lambdas);
  bind_dvec(pow_b, "b",
            c_pow->add_option("--b", pow.bs,
                              "second-period covariate slope values")
                ->delimiter(','),
            &pow.bs);
  bind_size(pow_b, "n", c_pow->add_option("--n", pow.n, "trial size"), &pow.n);

  CLI::App* c_ssz = app.add_subcommand(
      "samplesize", "required n for crossover and parallel designs (JSON)");
  add_common(c_ssz, &ssz, &ssz_cli, &ssz_b);
  bind_double(ssz_b, "effect",
              c_ssz->add_option("--effect", ssz.effect,
                                "alternative effect size (both periods)"),
              &ssz.effect);
  bind_double(ssz_b, "lambda0",
              c_ssz->add_option("--lambda0", ssz.lambda0,
                                "carry-over onto second-period control"),
              &ssz.lambda0);
  bind_double(ssz_b, "lambda1",
              c_ssz->add_option("--lambda1", ssz.lambda1,
                                "carry-over onto second-period treatment"),
              &ssz.lambda1);
  bind_double(ssz_b, "beta",
              c_ssz->add_option("--beta", ssz.beta, "target type II error"),
              &ssz.beta);
  bind_double(ssz_b, "sigma2_cr",
              c_ssz->add_option("--sigma2-cr", ssz_sigma2_cr,
                                "asymptotic variance of the crossover "
                                "estimator"),
              &ssz_sigma2_cr);
  bind_double(ssz_b, "sigma2_pr",
              c_ssz->add_option("--sigma2-pr", ssz_sigma2_pr,
                                "asymptotic variance of the first-period "
                                "estimator"),
              &ssz_sigma2_pr);
  bind_double(ssz_b, "sigma2",
              c_ssz->add_option("--sigma2", ssz_sigma2,
                                "per-period outcome variance (with --rho)"),
              &ssz_sigma2);
  bind_double(ssz_b, "rho",
              c_ssz->add_option("--rho", ssz_rho,
                                "within-subject correlation (with --sigma2)"),
              &ssz_rho);

  CLI::App* c_sim = app.add_subcommand(
      "simulate", "Monte Carlo power study (JSON + CSV)");
  add_common(c_sim, &sim, &sim_cli, &sim_b);
  bind_string(sim_b, "dgp",
              c_sim->add_option("--dgp", sim.dgp, "gaussian or resample"),
              &sim.dgp);
  bind_nvec(sim_b, "n",
            c_sim->add_option("--n", sim.ns, "trial sizes")->delimiter(','),
            &sim.ns);
  bind_dvec(sim_b, "lambda",
            c_sim->add_option("--lambda", sim.lambdas,
                              "carry-over values (--lambda=v1,v2 for "
                              "negatives)")
                ->delimiter(','),
            &sim.lambdas);
  bind_dvec(sim_b, "theta",
            c_sim->add_option("--theta", sim.thetas, "effect sizes")
                ->delimiter(','),
            &sim.thetas);
  bind_double(sim_b, "b",
              c_sim->add_option("--b", sim.b,
                                "gaussian: second-period covariate slope"),
              &sim.b);
  bind_double(sim_b, "tau",
              c_sim->add_option("--tau", sim_tau,
                                "period drift (default 0 gaussian, -0.05 "
                                "resample)"),
              &sim_tau);
  bind_double(sim_b, "rho",
              c_sim->add_option("--rho", sim.rho,
                                "resample: within-subject correlation of "
                                "control outcomes"),
              &sim.rho);
  bind_string(sim_b, "cohort_csv",
              c_sim->add_option("--cohort-csv", sim.cohort_csv,
                                "resample: cohort CSV (default: bundled "
                                "synthetic cohort)"),
              &sim.cohort_csv);
  bind_size(sim_b, "reps",
            c_sim->add_option("--reps", sim.reps, "Monte Carlo replications"),
            &sim.reps);
  bind_svec(sim_b, "tests",
            c_sim->add_option("--tests", sim.tests,
                              "comma-separated test list")
                ->delimiter(','),
            &sim.tests);
  c_sim->add_option("--threads", sim.threads,
                    "worker threads (0 = all cores); does not affect results");
  c_sim->add_option("--write-cohort", sim.write_cohort,
                    "dump the cohort actually used to this CSV path");
  std::string sim_csv_path;
  c_sim->add_option("--csv", sim_csv_path,
                    "CSV output path (default: alongside --out)");

  CLI::App* c_sen = app.add_subcommand(
      "sensitivity", "carry-over sensitivity analysis of one trial (JSON)");
  add_common(c_sen, &sen, &sen_cli, &sen_b);
  bind_string(sen_b, "data",
              c_sen->add_option("--data", sen.data_path, "trial CSV path"),
              &sen.data_path);
  bind_string(sen_b, "method",
              c_sen->add_option("--method", sen.method, "estimator to probe"),
              &sen.method);
  bind_dvec(sen_b, "lambda_grid",
            c_sen->add_option("--lambda-grid", sen.lambda_grid,
                              "adverse shifts <= 0 (--lambda-grid=v1,v2)")
                ->delimiter(','),
            &sen.lambda_grid);

  try {
    app.parse(argc, argv);

    struct Active {
      CLI::App* sub;
      CommonCli* cli;
      Bindings* bindings;
    };
    const Active table[] = {{c_est, &est_cli, &est_b},
                            {c_pow, &pow_cli, &pow_b},
                            {c_ssz, &ssz_cli, &ssz_b},
                            {c_sim, &sim_cli, &sim_b},
                            {c_sen, &sen_cli, &sen_b}};
    const Active* active = nullptr;
    for (const auto& row : table)
      if (app.got_subcommand(row.sub)) active = &row;
    if (!active) throw ConfigError("no subcommand given");

    if (!active->cli->config_path.empty())
      merge_config_file(active->cli->config_path, *active->bindings);

    if (active->sub == c_est) {
      validate_common(est);
      std::string json = cmd_estimate(est);
      ojson parsed = ojson::parse(json);
      log_resolved("estimate", parsed["config"]);
      emit(json, est_cli.out_path);
    } else if (active->sub == c_pow) {
      validate_common(pow);
      ojson cfg{{"theta_min", pow.theta_min}, {"theta_max", pow.theta_max},
                {"theta_step", pow.theta_step}, {"lambda", pow.lambdas},
                {"b", pow.bs},                 {"n", pow.n}};
      cfg.update(common_config(pow));
      log_resolved("power", cfg);
      emit(cmd_power(pow), pow_cli.out_path);
    } else if (active->sub == c_ssz) {
      validate_common(ssz);
      ssz.have_sigma2_cr = !std::isnan(ssz_sigma2_cr);
      ssz.have_sigma2_pr = !std::isnan(ssz_sigma2_pr);
      ssz.have_icc = !std::isnan(ssz_sigma2) || !std::isnan(ssz_rho);
      if (ssz.have_icc && (std::isnan(ssz_sigma2) || std::isnan(ssz_rho)))
        throw ConfigError("samplesize: --sigma2 and --rho go together");
      ssz.sigma2_cr = ssz_sigma2_cr;
      ssz.sigma2_pr = ssz_sigma2_pr;
      ssz.sigma2 = ssz_sigma2;
      ssz.rho = ssz_rho;
      std::string json = cmd_samplesize(ssz);
      log_resolved("samplesize", ojson::parse(json)["config"]);
      emit(json, ssz_cli.out_path);
    } else if (active->sub == c_sim) {
      validate_common(sim);
      if (!std::isnan(sim_tau)) {
        sim.tau = sim_tau;
        sim.have_tau = true;
      }
      SimulateOutput out = cmd_simulate(sim);
      log_resolved("simulate", ojson::parse(out.json)["config"]);
      emit(out.json, sim_cli.out_path);
      if (!sim_csv_path.empty())
        emit(out.csv, sim_csv_path);
      else if (!sim_cli.out_path.empty())
        emit(out.csv, default_csv_path(sim_cli.out_path));
    } else {
      validate_common(sen);
      std::string json = cmd_sensitivity(sen);
      log_resolved("sensitivity", ojson::parse(json)["config"]);
      emit(json, sen_cli.out_path);
    }
    return 0;
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);  // prints help or the parse message
    return rc == 0 ? 0 : 2;
  } catch (const Error& e) {
    ojson err{{"error", ojson{{"code", e.code()}, {"message", e.what()}}}};
    std::cerr << dump_json_g17(err, 0) << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    ojson err{{"error",
               ojson{{"code", "internal_error"}, {"message", e.what()}}}};
    std::cerr << dump_json_g17(err, 0) << '\n';
    return 4;
  }
}

}  // namespace xover::cli
