#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "quantguard/rational.hpp"

namespace quantguard {

/// (gamma, epsilon, rho): ask for |F(J~) - gamma| <= epsilon with probability
/// at least 1 - rho, distribution-free.
struct GuaranteeParams {
  RationalLevel gamma;
  double epsilon = 0.0;
  double rho = 0.0;
  /// Set when epsilon > min(gamma, 1-gamma) — the estimate band then sticks
  /// out of (0,1) on one side, which makes the request vacuous there.
  bool epsilon_warning = false;

  GuaranteeParams(RationalLevel gamma, double epsilon, double rho);
};

enum class Method { dkw, vp, beta };

const char* method_name(Method m);
Method method_from_name(const std::string& name);

/// How the guarantee's proof expects the threshold to be read off the order
/// statistics of the N samples.
struct EstimatorRule {
  std::int64_t lower_index = 0;  ///< 1-based; equal to upper_index for single-index rules
  std::int64_t upper_index = 0;
  std::string beta_weight_constraint;
};

struct SampleSizeResult {
  Method method = Method::dkw;
  std::int64_t n_samples = 0;  ///< N
  std::int64_t k = 0;          ///< internal multiplier
  EstimatorRule estimator_rule;
  std::vector<std::pair<std::string, bool>> conditions_checked;
};

/// Mean/variance of F(y_(m)) for N i.i.d. continuous samples:
/// F(y_(m)) ~ Beta(m, N+1-m).
struct BetaMoments {
  double mean = 0.0;
  double variance = 0.0;
};

/// One-sided deviation bounds for F(y_(m)) around gamma_hat = m/N, accurate
/// up to O(N^(-3/2)).
struct ConfidenceBounds {
  double eps_lower = 0.0;
  double eps_upper = 0.0;
};

/// DKW-based size: k = ceil(ln(2/rho) / (2 eps^2 n2)), N = k*n2.
/// Estimator: any beta in [0,1) between indices (floor(N*gamma), floor(N*gamma)+1).
SampleSizeResult dkw_sample_size(const GuaranteeParams& params);

/// Vysochanskij–Petunin-based size: k = ceil((1/n2)(4 g(1-g)/(9 rho eps^2) - 1)),
/// N = k*n2 - 1. Requires 4g(1-g) > 9 rho eps^2 and 6 rho <= 1; throws a
/// MathPreconditionError naming the violated inequality otherwise.
/// Estimator: the single order statistic at floor(N*gamma)+1.
SampleSizeResult vp_sample_size(const GuaranteeParams& params);

/// Beta-confidence-interval size: N = k*n2 with k from the closed form in
/// ConfidenceBounds (eps_lower <= epsilon solved for k). gamma < 0.5 is
/// computed at 1-gamma (same k, same N — the bounds are symmetric in the pair)
/// and the estimator index stays N*gamma, exact because n2 | N.
/// Estimator: the single order statistic at N*gamma.
SampleSizeResult beta_sample_size(const GuaranteeParams& params);

/// Convenience: all three methods at once.
std::vector<SampleSizeResult> all_sample_sizes(const GuaranteeParams& params);
SampleSizeResult sample_size(Method method, const GuaranteeParams& params);

/// Lemma-1 moments of F(y_(m)) for sample size n. Requires 1 <= m <= n.
BetaMoments order_statistic_cdf_moments(std::int64_t m, std::int64_t n);

/// Lemma-2 bounds at gamma_hat = m/N (any gamma_hat in (0,1) accepted):
///   eps_u = z sqrt(gh - gh^2)/sqrt(N) + (2(0.5-gh) z^2 - 1 - gh)/(3N)
///   eps_l = z sqrt(gh - gh^2)/sqrt(N) - (2(0.5-gh) z^2 - 1 - gh)/(3N)
/// with z = upper_gaussian_quantile(rho/2).
ConfidenceBounds beta_confidence_bounds(double gamma_hat, double rho, std::int64_t n);

/// Exact audit oracle: P(gamma - epsilon <= F(y_(m)) <= gamma + epsilon)
/// = I_{min(1,g+e)}(m, n+1-m) - I_{max(0,g-e)}(m, n+1-m).
double coverage_probability(std::int64_t m, std::int64_t n, double gamma, double epsilon);

/// true iff epsilon <= min(gamma, 1-gamma).
bool epsilon_reasonableness(const GuaranteeParams& params);

}  // namespace quantguard
