#pragma once

// Sharpness examples, parameter sweeps and the verification suites.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dyadlab/dyadic.hpp"
#include "dyadlab/norms.hpp"
#include "dyadlab/rational.hpp"

namespace dyadlab {

struct ExperimentRecord {
  double p = 2.0;
  double epsilon = 1.0;
  double ap_char = 1.0;
  double ratio = 0.0;
  std::string op;
  std::string norm_kind;
  std::uint64_t seed = 0;
  std::string notes;
};

struct ExampleResult {
  std::vector<ExperimentRecord> records;
  std::optional<FitResult> fit;
};

// {2^-first, ..., 2^-last}, decreasing.
std::vector<double> dyadic_epsilons(int first, int last);

// Dyadic A_p characteristic of x^{eps-1}, attained on every [0, 2^-j):
// 1 / (eps (1 + (1 - eps)/(p - 1))^{p-1}).
double power_weight_ap(double epsilon, double p);

// Haar square function tested on 1_[0,1) against x^{eps-1}. Needs M >= 6.
ExampleResult example_power_weight(double p, std::span<const double> epsilons, const Domain& d);

// eps = 1 reference point (Lebesgue weight); not part of any fit.
ExperimentRecord lebesgue_reference(double p, const Domain& d);

// <a_k w>_{[0, 2^-k)} for w = x^{eps-1}, by the series
// c (2^eps - 1)/eps 2^{k(1-eps)} sum_m m^{-alpha} 2^{-eps m}.
double dual_testing_average(double alpha, double epsilon, int k, double rel_tol = 1e-10);

// Same quantity by midpoint quadrature in u = x^eps on 2^resolution points.
double dual_testing_average_quadrature(double alpha, double epsilon, int k, int resolution);

struct DualTestingPoint {
  double epsilon = 0.0;
  double ap_char = 0.0;
  double log_lhs = 0.0;  // log of the integral of (sum_k <a_k w>^2 1_{[0,2^-k)})^{p'/2} dsigma over [0,1]
  double lorentz = 0.0;  // ||(sum_k a_k^2)^{1/2}||_{L^{p',1}(w)}
  double ratio = 0.0;    // lhs^{1/p'} / lorentz
  std::int64_t bands = 0;
};

// Bands [2^-j, 2^-j+1) are summed in closed form up to `bands`; 0 picks
// ceil(60/eps) + 50, past which both sides change by < 1e-9 relative.
DualTestingPoint dual_testing_point(double p, double alpha, double epsilon, std::int64_t bands = 0);

ExampleResult example_dual_testing(double p, double alpha, std::span<const double> epsilons, std::int64_t bands = 0);

// ---- sweeps ----

enum class SweepOperator { haar, sparse, maximal, dual_testing, intrinsic };

const char* to_string(SweepOperator op) noexcept;
SweepOperator parse_sweep_operator(const std::string& name);

struct SweepConfig {
  std::vector<double> p_list;
  std::vector<double> epsilon_list;
  int M = 8;
  int J = 14;
  Rational rho{1};
  SweepOperator op = SweepOperator::haar;
  double alpha = 0.75;
  std::vector<std::uint64_t> seeds{0};
  std::string output_path;

  // Parses the flat JSON object; unknown keys and bad values throw FormatError.
  static SweepConfig from_json(const std::string& text);
  static SweepConfig load(const std::string& path);
  // Throws PreconditionError on bad ranges or the cell guard.
  void validate() const;
};

inline constexpr int kMaxCellsLog2 = 24;
inline constexpr std::size_t kRandomBatch = 200;
inline constexpr double kEnvelopeLimit = 10.0;

struct SweepSummary {
  std::string op;
  double p = 2.0;
  std::optional<FitResult> fit;
  std::optional<double> expected_slope;
  double tolerance = 0.0;
  bool slope_ok = true;
  // max over eps of envelope / ([w]^{max(1/2,1/p)} (1 + log [w]))
  std::optional<double> envelope_constant;
  bool envelope_ok = true;
};

struct SweepResult {
  std::vector<ExperimentRecord> records;  // sorted by (p, eps, seed, norm_kind)
  std::vector<SweepSummary> summaries;
  bool lower_le_upper = true;
  bool passed = true;
};

SweepResult run_sweep(const SweepConfig& config);

std::string records_csv(const std::vector<ExperimentRecord>& records);
std::string summary_json(const SweepConfig& config, const SweepResult& result);

// Runs the sweep and writes the CSV to output_path and the summary next to
// it (<output_path>.summary.json). Returns the process exit code.
int sweep(const SweepConfig& config);

// Runs fn(i) for i in [0, n) on a small thread pool; results must be written
// to per-index slots by the caller.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

// ---- verification suites ----

struct VerifyEntry {
  std::string suite;
  std::string name;
  bool pass = false;
  std::string detail;
};

struct VerifyReport {
  std::vector<VerifyEntry> entries;
  bool passed() const;
  std::string to_json() const;
};

// suite is one of core, proof, examples, all.
VerifyReport verify(const std::string& suite);

}  // namespace dyadlab
