#include "quantguard/harness.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "quantguard/errors.hpp"

namespace quantguard {

const char* sampling_mode_name(SamplingMode mode) {
  switch (mode) {
    case SamplingMode::iid_fresh: return "iid-fresh";
    case SamplingMode::sequential_trajectory: return "sequential-trajectory";
    case SamplingMode::random_subsample: return "random-subsample";
  }
  throw std::logic_error("unreachable");
}

namespace {

constexpr double kBandSlack = 1e-12;

/// Threshold per estimator rule using nth_element selection; reorders buf.
/// Returns the threshold and the count of training values strictly above it.
struct ThresholdCount {
  double threshold = 0.0;
  std::int64_t train_above = 0;
};

ThresholdCount select_threshold(std::vector<double>& buf, const EstimatorRule& rule,
                                double beta_weight) {
  const auto n = static_cast<std::int64_t>(buf.size());
  if (rule.lower_index < 1 || rule.upper_index > n) {
    throw MathPreconditionError("estimator rule indices (" + std::to_string(rule.lower_index) +
                                ", " + std::to_string(rule.upper_index) + ") leave [1, " +
                                std::to_string(n) + "]");
  }
  ThresholdCount out;
  std::int64_t scan_from;
  if (rule.lower_index == rule.upper_index || beta_weight == 0.0) {
    const std::int64_t pos = (rule.lower_index == rule.upper_index ? rule.lower_index
                                                                   : rule.upper_index) - 1;
    std::nth_element(buf.begin(), buf.begin() + pos, buf.end());
    out.threshold = buf[static_cast<std::size_t>(pos)];
    scan_from = pos + 1;
  } else {
    const std::int64_t pos = rule.lower_index - 1;
    std::nth_element(buf.begin(), buf.begin() + pos, buf.end());
    const double y_lower = buf[static_cast<std::size_t>(pos)];
    const double y_upper = *std::min_element(buf.begin() + pos + 1, buf.end());
    out.threshold = beta_weight * y_lower + (1.0 - beta_weight) * y_upper;
    scan_from = pos;  // everything before pos is <= y_lower <= threshold
  }
  for (std::int64_t i = scan_from; i < n; ++i) {
    if (buf[static_cast<std::size_t>(i)] > out.threshold) ++out.train_above;
  }
  return out;
}

std::vector<double> draw_batch(const SourceKind& kind, std::int64_t count,
                               GaussianStream& stream) {
  if (is_trajectory_source(kind)) {
    return cusum_trajectory(std::get<CusumIidSpec>(kind), count, stream);
  }
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(count));
  for (std::int64_t i = 0; i < count; ++i) out.push_back(draw_scalar(kind, stream));
  return out;
}

double quantile_type7(const std::vector<double>& sorted, double p) {
  const auto n = sorted.size();
  const double h = static_cast<double>(n - 1) * p;
  const auto lo = static_cast<std::size_t>(h);
  const double frac = h - static_cast<double>(lo);
  if (lo + 1 >= n) return sorted.back();
  return sorted[lo] * (1.0 - frac) + sorted[lo + 1] * frac;
}

FiveNumberSummary summarize(const std::vector<double>& values) {
  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  FiveNumberSummary s;
  s.min = sorted.front();
  s.q1 = quantile_type7(sorted, 0.25);
  s.median = quantile_type7(sorted, 0.5);
  s.q3 = quantile_type7(sorted, 0.75);
  s.max = sorted.back();
  return s;
}

ValidationReport assemble_report(std::vector<double> fars, std::vector<double> thresholds,
                                 const GuaranteeParams& guarantee, double bin_width,
                                 RunMetadata metadata) {
  ValidationReport report;
  report.band_lower = std::max(0.0, guarantee.gamma.complement() - guarantee.epsilon);
  report.band_upper = std::min(1.0, guarantee.gamma.complement() + guarantee.epsilon);
  report.fraction_outside = outside_band_fraction(fars, guarantee.gamma, guarantee.epsilon);
  report.histogram = make_histogram(fars, bin_width);
  report.summary = summarize(fars);
  report.empirical_fars = std::move(fars);
  report.thresholds = std::move(thresholds);
  report.metadata = std::move(metadata);
  return report;
}

}  // namespace

double outside_band_fraction(const std::vector<double>& fars, RationalLevel gamma,
                             double epsilon) {
  if (fars.empty()) throw MathPreconditionError("outside_band_fraction: empty rate list");
  const double target = gamma.complement();
  const double lower = std::max(0.0, target - epsilon);
  const double upper = std::min(1.0, target + epsilon);
  std::int64_t outside = 0;
  for (double f : fars) {
    if (f < lower - kBandSlack || f > upper + kBandSlack) ++outside;
  }
  return static_cast<double>(outside) / static_cast<double>(fars.size());
}

Histogram make_histogram(const std::vector<double>& values, double bin_width) {
  if (!(bin_width > 0.0)) throw MathPreconditionError("make_histogram: bin width must be > 0");
  Histogram hist;
  hist.bin_width = bin_width;
  for (double v : values) {
    if (v < 0.0) throw MathPreconditionError("make_histogram: negative value");
    const auto bin = static_cast<std::size_t>(std::floor(v / bin_width));
    if (bin >= hist.counts.size()) hist.counts.resize(bin + 1, 0);
    ++hist.counts[bin];
  }
  return hist;
}

ValidationReport run_monte_carlo(const TrialPlan& plan, double bin_width) {
  if (plan.n_trials < 1) throw UsageError("run_monte_carlo: n_trials must be >= 1");
  if (plan.validation_size < 1) throw UsageError("run_monte_carlo: validation_size must be >= 1");
  switch (plan.sampling_mode) {
    case SamplingMode::iid_fresh:
      if (!is_scalar_source(plan.source.kind)) {
        throw UsageError("run_monte_carlo: iid-fresh sampling needs a scalar i.i.d. source "
                         "(uniform, chi2, levy); got " + canonical_source_text(plan.source.kind));
      }
      break;
    case SamplingMode::sequential_trajectory:
      if (!is_trajectory_source(plan.source.kind)) {
        throw UsageError("run_monte_carlo: sequential-trajectory sampling needs a trajectory "
                         "source (cusum); got " + canonical_source_text(plan.source.kind));
      }
      break;
    case SamplingMode::random_subsample:
      throw UsageError("run_monte_carlo: random-subsample runs over a dataset; use "
                       "run_repeated_splits");
  }

  const SampleSizeResult size = sample_size(plan.method, plan.guarantee);

  GaussianStream validation_stream(plan.master_seed, stream_id(StreamDomain::validation, 0));
  std::vector<double> validation =
      draw_batch(plan.source.kind, plan.validation_size, validation_stream);
  std::sort(validation.begin(), validation.end());
  const auto m = static_cast<double>(validation.size());

  std::vector<double> fars;
  std::vector<double> thresholds;
  fars.reserve(static_cast<std::size_t>(plan.n_trials));
  thresholds.reserve(static_cast<std::size_t>(plan.n_trials));
  for (std::int64_t trial = 0; trial < plan.n_trials; ++trial) {
    GaussianStream stream(plan.master_seed,
                          stream_id(StreamDomain::training_trial, static_cast<std::uint64_t>(trial)));
    std::vector<double> buf = draw_batch(plan.source.kind, size.n_samples, stream);
    const double threshold = select_threshold(buf, size.estimator_rule, plan.beta_weight).threshold;
    const auto above = validation.end() -
                       std::upper_bound(validation.begin(), validation.end(), threshold);
    fars.push_back(static_cast<double>(above) / m);
    thresholds.push_back(threshold);
  }

  RunMetadata meta;
  meta.source_text = canonical_source_text(plan.source.kind);
  meta.gamma = plan.guarantee.gamma.str();
  meta.epsilon = plan.guarantee.epsilon;
  meta.rho = plan.guarantee.rho;
  meta.method = method_name(plan.method);
  meta.sampling_mode = sampling_mode_name(plan.sampling_mode);
  meta.n_trials = plan.n_trials;
  meta.training_size = size.n_samples;
  meta.validation_size = plan.validation_size;
  meta.beta_weight = plan.beta_weight;
  meta.master_seed = plan.master_seed;
  return assemble_report(std::move(fars), std::move(thresholds), plan.guarantee, bin_width,
                         std::move(meta));
}

ValidationReport run_repeated_splits(const SampleSet& dataset, const GuaranteeParams& guarantee,
                                     Method method, std::int64_t n_trials, double beta_weight,
                                     std::uint64_t master_seed, double bin_width) {
  if (n_trials < 1) throw UsageError("run_repeated_splits: n_trials must be >= 1");
  const SampleSizeResult size = sample_size(method, guarantee);
  const std::int64_t n = size.n_samples;
  const std::int64_t total = dataset.size();
  if (total <= n) {
    throw DataError("run_repeated_splits: dataset too small: method " +
                    std::string(method_name(method)) + " at gamma=" + guarantee.gamma.str() +
                    " requires N=" + std::to_string(n) +
                    " training samples plus a nonempty test remainder, dataset has " +
                    std::to_string(total));
  }
  const auto& values = dataset.values();
  const auto& sorted_all = dataset.sorted();
  const auto test_size = static_cast<double>(total - n);

  std::vector<char> marked(static_cast<std::size_t>(total), 0);
  std::vector<std::uint64_t> picks;
  picks.reserve(static_cast<std::size_t>(n));
  std::vector<double> buf(static_cast<std::size_t>(n));
  std::vector<double> fars;
  std::vector<double> thresholds;
  fars.reserve(static_cast<std::size_t>(n_trials));
  thresholds.reserve(static_cast<std::size_t>(n_trials));

  for (std::int64_t trial = 0; trial < n_trials; ++trial) {
    RandomStream stream(master_seed,
                        stream_id(StreamDomain::split_trial, static_cast<std::uint64_t>(trial)));
    picks.clear();
    // Floyd's uniform N-subset without replacement over [0, total).
    for (auto j = static_cast<std::uint64_t>(total - n); j < static_cast<std::uint64_t>(total);
         ++j) {
      std::uint64_t pick = stream.next_below(j + 1);
      if (marked[pick]) pick = j;
      marked[pick] = 1;
      picks.push_back(pick);
    }
    for (std::size_t i = 0; i < picks.size(); ++i) buf[i] = values[picks[i]];
    const ThresholdCount tc = select_threshold(buf, size.estimator_rule, beta_weight);
    const auto total_above =
        sorted_all.end() - std::upper_bound(sorted_all.begin(), sorted_all.end(), tc.threshold);
    fars.push_back(static_cast<double>(total_above - tc.train_above) / test_size);
    thresholds.push_back(tc.threshold);
    for (std::uint64_t pick : picks) marked[pick] = 0;
  }

  RunMetadata meta;
  meta.source_text = "dataset:size=" + std::to_string(total);
  meta.gamma = guarantee.gamma.str();
  meta.epsilon = guarantee.epsilon;
  meta.rho = guarantee.rho;
  meta.method = method_name(method);
  meta.sampling_mode = sampling_mode_name(SamplingMode::random_subsample);
  meta.n_trials = n_trials;
  meta.training_size = n;
  meta.validation_size = total - n;
  meta.beta_weight = beta_weight;
  meta.master_seed = master_seed;
  return assemble_report(std::move(fars), std::move(thresholds), guarantee, bin_width,
                         std::move(meta));
}

std::vector<SweepEntry> sweep_gammas(const SampleSet& dataset,
                                     const std::vector<RationalLevel>& gammas, double epsilon,
                                     double rho, Method method, std::int64_t n_trials,
                                     double beta_weight, std::uint64_t master_seed,
                                     double bin_width) {
  std::vector<SweepEntry> entries;
  entries.reserve(gammas.size());
  for (const RationalLevel& gamma : gammas) {
    SweepEntry entry{gamma, std::nullopt, {}};
    try {
      const GuaranteeParams params(gamma, epsilon, rho);
      entry.report = run_repeated_splits(dataset, params, method, n_trials, beta_weight,
                                         master_seed, bin_width);
    } catch (const std::exception& e) {
      entry.error = e.what();
    }
    entries.push_back(std::move(entry));
  }
  return entries;
}

std::vector<SweepEntry> sweep_gammas(const SourceSpec& source, SamplingMode mode,
                                     const std::vector<RationalLevel>& gammas, double epsilon,
                                     double rho, Method method, std::int64_t n_trials,
                                     std::int64_t validation_size, double beta_weight,
                                     std::uint64_t master_seed, double bin_width) {
  std::vector<SweepEntry> entries;
  entries.reserve(gammas.size());
  for (const RationalLevel& gamma : gammas) {
    SweepEntry entry{gamma, std::nullopt, {}};
    try {
      const GuaranteeParams params(gamma, epsilon, rho);
      const TrialPlan plan{source,          params,      method,      n_trials,
                           validation_size, mode,        beta_weight, master_seed};
      entry.report = run_monte_carlo(plan, bin_width);
    } catch (const std::exception& e) {
      entry.error = e.what();
    }
    entries.push_back(std::move(entry));
  }
  return entries;
}

}  // namespace quantguard
