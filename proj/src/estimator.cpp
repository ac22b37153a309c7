#include "quantguard/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "quantguard/errors.hpp"

namespace quantguard {

SampleSet::SampleSet(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw DataError("sample set is empty");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw DataError("sample set contains a non-finite value at position " +
                      std::to_string(i + 1));
    }
  }
  sorted_ = values_;
  std::stable_sort(sorted_.begin(), sorted_.end());
}

double SampleSet::order_statistic(std::int64_t i) const {
  if (i < 1 || i > size()) {
    throw MathPreconditionError("order_statistic: index " + std::to_string(i) +
                                " outside [1, " + std::to_string(size()) + "]");
  }
  return sorted_[static_cast<std::size_t>(i - 1)];
}

double SampleSet::empirical_cdf(double x) const {
  const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
  return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
}

double SampleSet::empirical_false_alarm_rate(double threshold) const {
  // count exceedances directly so the rate is an exactly rounded ratio,
  // not 1 - cdf with its cancellation error
  const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), threshold);
  return static_cast<double>(sorted_.end() - it) / static_cast<double>(sorted_.size());
}

std::int64_t floor_n_gamma(std::int64_t n, RationalLevel gamma) {
  if (n < 1) throw MathPreconditionError("floor_n_gamma: n must be >= 1");
  const __int128 p = static_cast<__int128>(n) * static_cast<__int128>(gamma.n1);
  return static_cast<std::int64_t>(p / static_cast<__int128>(gamma.n2));
}

ThresholdEstimate estimate_threshold(const SampleSet& samples, RationalLevel gamma,
                                     double beta_weight) {
  if (!(beta_weight >= 0.0) || !(beta_weight < 1.0)) {
    throw MathPreconditionError("estimate_threshold: beta weight must lie in [0,1)");
  }
  const std::int64_t n = samples.size();
  const std::int64_t lower = floor_n_gamma(n, gamma);
  if (lower < 1 || lower + 1 > n) {
    throw MathPreconditionError(
        "estimate_threshold: insufficient samples for gamma=" + gamma.str() + ": indices (" +
        std::to_string(lower) + ", " + std::to_string(lower + 1) + ") leave [1, " +
        std::to_string(n) + "]");
  }
  ThresholdEstimate est;
  est.lower_index = lower;
  est.upper_index = lower + 1;
  est.beta_weight = beta_weight;
  est.n_samples = n;
  est.gamma = gamma;
  est.value = beta_weight * samples.order_statistic(lower) +
              (1.0 - beta_weight) * samples.order_statistic(lower + 1);
  return est;
}

double threshold_from_rule(const SampleSet& samples, const EstimatorRule& rule,
                           double beta_weight) {
  if (rule.lower_index == rule.upper_index) {
    return samples.order_statistic(rule.lower_index);
  }
  if (beta_weight == 0.0) {
    return samples.order_statistic(rule.upper_index);
  }
  return beta_weight * samples.order_statistic(rule.lower_index) +
         (1.0 - beta_weight) * samples.order_statistic(rule.upper_index);
}

}  // namespace quantguard
