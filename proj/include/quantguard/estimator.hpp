#pragma once

#include <cstdint>
#include <vector>

#include "quantguard/guarantees.hpp"
#include "quantguard/rational.hpp"

namespace quantguard {

/// Immutable set of detector outputs with a sorted view for order-statistic
/// queries. Construction rejects NaN/infinite entries (silent drops would
/// change N and invalidate every guarantee) and empty input.
class SampleSet {
 public:
  explicit SampleSet(std::vector<double> values);

  std::int64_t size() const { return static_cast<std::int64_t>(values_.size()); }
  const std::vector<double>& values() const { return values_; }
  const std::vector<double>& sorted() const { return sorted_; }

  /// y_(i), 1-based. Ties keep their (stable-sorted) value.
  double order_statistic(std::int64_t i) const;

  /// F_N(x) = #{y_i <= x} / N, by binary search on the sorted view.
  double empirical_cdf(double x) const;

  /// 1 - F_N(threshold): alarms are strict exceedances y > J.
  double empirical_false_alarm_rate(double threshold) const;

 private:
  std::vector<double> values_;
  std::vector<double> sorted_;
};

/// The estimate J~ = beta * y_(floor(N*gamma)) + (1-beta) * y_(floor(N*gamma)+1).
struct ThresholdEstimate {
  double value = 0.0;
  std::int64_t lower_index = 0;  ///< floor(N*gamma), 1-based
  std::int64_t upper_index = 0;  ///< floor(N*gamma)+1
  double beta_weight = 0.0;
  std::int64_t n_samples = 0;
  RationalLevel gamma;
};

/// floor(N*gamma) computed exactly from the rational gamma.
std::int64_t floor_n_gamma(std::int64_t n, RationalLevel gamma);

/// Order-statistic interpolation estimator. beta_weight in [0,1); throws an
/// insufficient-samples error when the index pair leaves [1, N].
ThresholdEstimate estimate_threshold(const SampleSet& samples, RationalLevel gamma,
                                     double beta_weight = 0.0);

/// Threshold according to a method's estimator rule (single order statistic
/// for vp/beta, Eq.-style interpolation for dkw). `rule` indices must fit N.
double threshold_from_rule(const SampleSet& samples, const EstimatorRule& rule,
                           double beta_weight);

}  // namespace quantguard
