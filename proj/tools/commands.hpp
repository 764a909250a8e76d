#pragma once

#include <cstdint>
#include <exception>
#include <string>
#include <vector>

#include <json.hpp>

namespace xover::cli {

// Options shared by every subcommand.  Fields arrive resolved: defaults,
// then config-file values, then explicit flags, last writer wins.
struct CommonOptions {
  std::uint64_t seed = 0;
  double pi1 = 0.5;
  double alpha = 0.025;      // one-sided level
  double theta_star = 0.0;   // noninferiority margin
  bool impute = false;       // fill missing covariate cells
};

struct EstimateOptions : CommonOptions {
  std::string data_path;
  std::vector<std::string> methods;  // empty = all applicable
};

struct PowerOptions : CommonOptions {
  double theta_min = 0.0;
  double theta_max = 0.5;
  double theta_step = 0.01;
  std::vector<double> lambdas = {-0.1, 0.0, 0.1, 0.3};
  std::vector<double> bs = {0.0, 1.0 / 3.0};
  std::size_t n = 500;
};

struct SampleSizeOptions : CommonOptions {
  double effect = 0.0;
  double lambda0 = 0.0;
  double lambda1 = 0.0;
  double beta = 0.1;  // target type II error
  // Variances either explicitly...
  double sigma2_cr = 0.0;
  double sigma2_pr = 0.0;
  bool have_sigma2_cr = false;
  bool have_sigma2_pr = false;
  // ...or through the equicorrelated shorthand sigma2 + rho.
  double sigma2 = 0.0;
  double rho = 0.0;
  bool have_icc = false;
};

struct SimulateOptions : CommonOptions {
  std::string dgp = "gaussian";  // or "resample"
  std::vector<std::size_t> ns = {500};
  std::vector<double> lambdas = {0.0};
  std::vector<double> thetas = {0.3};
  double b = 0.0;           // gaussian only
  double tau = 0.0;         // period drift; see resolved_tau()
  bool have_tau = false;
  double rho = 0.33;        // resample only
  std::string cohort_csv;   // resample: empty = bundled synthetic cohort
  std::size_t reps = 1000;
  unsigned threads = 0;     // execution knob, not part of the config echo
  std::vector<std::string> tests = {"pr", "pr_adj", "cr", "cr_adj"};
  std::string write_cohort;  // optional path to dump the cohort actually used

  double resolved_tau() const {
    if (have_tau) return tau;
    return dgp == "resample" ? -0.05 : 0.0;
  }
};

struct SensitivityOptions : CommonOptions {
  std::string data_path;
  std::string method = "cr";
  std::vector<double> lambda_grid = {0.0, -0.05, -0.10, -0.15, -0.20};
};

// Command cores.  Pure: same options, same bytes out.  They throw the
// library error types; run_cli translates those into exit codes.
std::string cmd_estimate(const EstimateOptions& opts);
std::string cmd_power(const PowerOptions& opts);
std::string cmd_samplesize(const SampleSizeOptions& opts);
std::string cmd_sensitivity(const SensitivityOptions& opts);

struct SimulateOutput {
  std::string json;
  std::string csv;
};
SimulateOutput cmd_simulate(const SimulateOptions& opts);

// JSON serialization with floating-point numbers at 17 significant digits
// (lossless round trip) and object keys in insertion order.
std::string dump_json_g17(const nlohmann::ordered_json& j, int indent = 2);

// 0 success; 2 config/usage; 3 data parse; 4 numerical/statistical failure.
int exit_code_for(const std::exception& e);

int run_cli(int argc, const char* const* argv);

}  // namespace xover::cli
