#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "quantguard/estimator.hpp"
#include "quantguard/guarantees.hpp"
#include "quantguard/sources.hpp"

namespace quantguard {

enum class SamplingMode { iid_fresh, sequential_trajectory, random_subsample };

const char* sampling_mode_name(SamplingMode mode);

/// One Monte-Carlo experiment: repeat threshold estimation n_trials times and
/// evaluate each threshold's empirical false alarm rate on a large validation
/// set drawn once per batch (sorted once, binary-searched per trial —
/// numerically identical to direct counting).
struct TrialPlan {
  SourceSpec source;
  GuaranteeParams guarantee;
  Method method = Method::beta;
  std::int64_t n_trials = 0;
  std::int64_t validation_size = 0;
  SamplingMode sampling_mode = SamplingMode::iid_fresh;
  double beta_weight = 0.0;
  std::uint64_t master_seed = 0;
};

/// Fixed-width bins aligned to 0: bin i counts values in [i*w, (i+1)*w).
struct Histogram {
  double bin_width = 0.0;
  std::vector<std::int64_t> counts;  ///< from bin 0 through the last occupied bin
};

struct FiveNumberSummary {
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
};

/// Full echo of the run inputs; with the seed this reproduces the run exactly.
struct RunMetadata {
  std::string source_text;
  std::string gamma;
  double epsilon = 0.0;
  double rho = 0.0;
  std::string method;
  std::string sampling_mode;
  std::int64_t n_trials = 0;
  std::int64_t training_size = 0;    ///< N per trial
  std::int64_t validation_size = 0;  ///< M (test remainder size in split mode)
  double beta_weight = 0.0;
  std::uint64_t master_seed = 0;
};

struct ValidationReport {
  std::vector<double> empirical_fars;
  double band_lower = 0.0;  ///< max(0, 1-gamma-epsilon)
  double band_upper = 0.0;  ///< min(1, 1-gamma+epsilon)
  double fraction_outside = 0.0;
  Histogram histogram;
  FiveNumberSummary summary;
  std::vector<double> thresholds;
  RunMetadata metadata;
};

/// Fraction of rates outside the closed band [1-gamma-eps, 1-gamma+eps]
/// (clipped to [0,1]). Boundary values count as inside; comparisons carry a
/// 1e-12 absolute slack so exact-boundary membership is not at the mercy of
/// double rounding.
double outside_band_fraction(const std::vector<double>& fars, RationalLevel gamma,
                             double epsilon);

/// Histogram of non-negative values with the given positive bin width.
Histogram make_histogram(const std::vector<double>& values, double bin_width);

/// i.i.d.-fresh or sequential-trajectory Monte Carlo per the plan.
/// Deterministic given master_seed: trial t draws from substream
/// (master_seed, training_trial, t), the shared validation set from
/// (master_seed, validation, 0).
ValidationReport run_monte_carlo(const TrialPlan& plan, double bin_width = 0.001);

/// Repeated Training/Test Splits over a fixed dataset: each trial samples the
/// method's N indices uniformly without replacement (Floyd's algorithm) as
/// the training set and evaluates the empirical false alarm rate on all
/// remaining points. Throws a dataset-too-small error when size <= N.
ValidationReport run_repeated_splits(const SampleSet& dataset, const GuaranteeParams& guarantee,
                                     Method method, std::int64_t n_trials, double beta_weight,
                                     std::uint64_t master_seed, double bin_width = 0.001);

struct SweepEntry {
  RationalLevel gamma;
  std::optional<ValidationReport> report;
  std::string error;  ///< nonempty when this gamma failed; other gammas still run
};

/// Split-mode sweep over gamma values on one dataset (same master seed per
/// gamma, so each entry equals a standalone run_repeated_splits call).
std::vector<SweepEntry> sweep_gammas(const SampleSet& dataset,
                                     const std::vector<RationalLevel>& gammas, double epsilon,
                                     double rho, Method method, std::int64_t n_trials,
                                     double beta_weight, std::uint64_t master_seed,
                                     double bin_width = 0.001);

/// Monte-Carlo-mode sweep over gamma values on one source.
std::vector<SweepEntry> sweep_gammas(const SourceSpec& source, SamplingMode mode,
                                     const std::vector<RationalLevel>& gammas, double epsilon,
                                     double rho, Method method, std::int64_t n_trials,
                                     std::int64_t validation_size, double beta_weight,
                                     std::uint64_t master_seed, double bin_width = 0.001);

}  // namespace quantguard
