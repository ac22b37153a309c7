#include "quantguard/guarantees.hpp"

#include <cmath>
#include <stdexcept>

#include "quantguard/errors.hpp"
#include "quantguard/special_functions.hpp"

namespace quantguard {

GuaranteeParams::GuaranteeParams(RationalLevel gamma_, double epsilon_, double rho_)
    : gamma(gamma_), epsilon(epsilon_), rho(rho_) {
  if (!(epsilon > 0.0) || !(epsilon < 1.0)) {
    throw MathPreconditionError("epsilon must lie in (0,1), got " + std::to_string(epsilon));
  }
  if (!(rho > 0.0) || !(rho < 1.0)) {
    throw MathPreconditionError("rho must lie in (0,1), got " + std::to_string(rho));
  }
  epsilon_warning = !epsilon_reasonableness(*this);
}

const char* method_name(Method m) {
  switch (m) {
    case Method::dkw: return "dkw";
    case Method::vp: return "vp";
    case Method::beta: return "beta";
  }
  throw std::logic_error("unreachable");
}

Method method_from_name(const std::string& name) {
  if (name == "dkw") return Method::dkw;
  if (name == "vp") return Method::vp;
  if (name == "beta") return Method::beta;
  throw UsageError("unknown method '" + name + "' (expected dkw, vp, or beta)");
}

namespace {

std::int64_t checked_ceil(double x, const char* what) {
  if (!(x < 9.0e18)) {
    throw MathPreconditionError(std::string(what) + ": required sample size overflows");
  }
  const double c = std::ceil(x);
  return c < 1.0 ? 1 : static_cast<std::int64_t>(c);
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b, const char* what) {
  const __int128 p = static_cast<__int128>(a) * b;
  if (p > static_cast<__int128>(1) << 62) {
    throw MathPreconditionError(std::string(what) + ": required sample size overflows");
  }
  return static_cast<std::int64_t>(p);
}

std::pair<std::string, bool> reasonableness_condition(const GuaranteeParams& params) {
  return {"epsilon <= min(gamma, 1-gamma)", epsilon_reasonableness(params)};
}

}  // namespace

SampleSizeResult dkw_sample_size(const GuaranteeParams& params) {
  const auto n2 = static_cast<double>(params.gamma.n2);
  const double raw = std::log(2.0 / params.rho) / (2.0 * params.epsilon * params.epsilon * n2);
  const std::int64_t k = checked_ceil(raw, "dkw_sample_size");
  const std::int64_t n = checked_mul(k, static_cast<std::int64_t>(params.gamma.n2), "dkw_sample_size");
  // N*gamma = k*n1 exactly since n2 | N.
  const std::int64_t lower = checked_mul(k, static_cast<std::int64_t>(params.gamma.n1), "dkw_sample_size");
  SampleSizeResult r;
  r.method = Method::dkw;
  r.n_samples = n;
  r.k = k;
  r.estimator_rule = {lower, lower + 1, "any beta in [0,1)"};
  r.conditions_checked = {reasonableness_condition(params)};
  return r;
}

SampleSizeResult vp_sample_size(const GuaranteeParams& params) {
  const double g = params.gamma.value();
  const double lhs = 4.0 * g * (1.0 - g);
  const double rhs = 9.0 * params.rho * params.epsilon * params.epsilon;
  const bool variance_ok = lhs > rhs;
  const bool rho_ok = 6.0 * params.rho <= 1.0;
  SampleSizeResult r;
  r.method = Method::vp;
  r.conditions_checked = {{"4*gamma*(1-gamma) > 9*rho*epsilon^2", variance_ok},
                          {"6*rho <= 1", rho_ok},
                          reasonableness_condition(params)};
  if (!variance_ok) {
    throw MathPreconditionError("vp_sample_size: condition 4*gamma*(1-gamma) > 9*rho*epsilon^2 violated");
  }
  if (!rho_ok) {
    throw MathPreconditionError("vp_sample_size: condition 6*rho <= 1 violated");
  }
  const auto n2 = static_cast<double>(params.gamma.n2);
  const double raw = (lhs / rhs - 1.0) / n2;
  const std::int64_t k = checked_ceil(raw, "vp_sample_size");
  r.k = k;
  r.n_samples = checked_mul(k, static_cast<std::int64_t>(params.gamma.n2), "vp_sample_size") - 1;
  // floor(N*gamma)+1 = k*n1 exactly: N*gamma = k*n1 - n1/n2 with 0 < n1/n2 < 1.
  const std::int64_t m = checked_mul(k, static_cast<std::int64_t>(params.gamma.n1), "vp_sample_size");
  r.estimator_rule = {m, m, "beta fixed to 0 (single order statistic at floor(N*gamma)+1)"};
  return r;
}

SampleSizeResult beta_sample_size(const GuaranteeParams& params) {
  const bool mapped = 2 * params.gamma.n1 < params.gamma.n2;  // gamma < 0.5
  // Same denominator either way, so k and N are shared with 1-gamma.
  const auto n1p = mapped ? params.gamma.n2 - params.gamma.n1 : params.gamma.n1;
  const auto n2 = static_cast<double>(params.gamma.n2);
  const double g = static_cast<double>(n1p) / n2;
  const double z = upper_gaussian_quantile(params.rho / 2.0);
  const double eps = params.epsilon;
  const double a = z * std::sqrt(g - g * g) / (2.0 * eps * std::sqrt(n2));
  const double root =
      std::sqrt(a * a + 2.0 * (g - 0.5) * z * z / (3.0 * n2 * eps) + (1.0 + g) / (3.0 * n2 * eps));
  const std::int64_t k = checked_ceil((a + root) * (a + root), "beta_sample_size");
  SampleSizeResult r;
  r.method = Method::beta;
  r.k = k;
  r.n_samples = checked_mul(k, static_cast<std::int64_t>(params.gamma.n2), "beta_sample_size");
  // Index N*gamma = k*n1 of the *requested* gamma, exact because n2 | N.
  const std::int64_t m = checked_mul(k, static_cast<std::int64_t>(params.gamma.n1), "beta_sample_size");
  r.estimator_rule = {m, m, "single order statistic at N*gamma (exact integer)"};
  r.conditions_checked = {reasonableness_condition(params),
                          {"gamma >= 0.5 (else symmetry-mapped through 1-gamma)", !mapped}};
  return r;
}

SampleSizeResult sample_size(Method method, const GuaranteeParams& params) {
  switch (method) {
    case Method::dkw: return dkw_sample_size(params);
    case Method::vp: return vp_sample_size(params);
    case Method::beta: return beta_sample_size(params);
  }
  throw std::logic_error("unreachable");
}

std::vector<SampleSizeResult> all_sample_sizes(const GuaranteeParams& params) {
  return {dkw_sample_size(params), vp_sample_size(params), beta_sample_size(params)};
}

BetaMoments order_statistic_cdf_moments(std::int64_t m, std::int64_t n) {
  if (m < 1 || m > n) {
    throw MathPreconditionError("order_statistic_cdf_moments: need 1 <= m <= n, got m=" +
                                std::to_string(m) + ", n=" + std::to_string(n));
  }
  const double md = static_cast<double>(m);
  const double np1 = static_cast<double>(n) + 1.0;
  BetaMoments out;
  out.mean = md / np1;
  out.variance = md * (np1 - md) / (np1 * np1 * (np1 + 1.0));
  return out;
}

ConfidenceBounds beta_confidence_bounds(double gamma_hat, double rho, std::int64_t n) {
  if (!(gamma_hat > 0.0) || !(gamma_hat < 1.0)) {
    throw MathPreconditionError("beta_confidence_bounds: gamma_hat must lie in (0,1)");
  }
  if (!(rho > 0.0) || !(rho < 1.0)) {
    throw MathPreconditionError("beta_confidence_bounds: rho must lie in (0,1)");
  }
  if (n < 1) throw MathPreconditionError("beta_confidence_bounds: n must be >= 1");
  const double z = upper_gaussian_quantile(rho / 2.0);
  const double nd = static_cast<double>(n);
  const double lead = z * std::sqrt(gamma_hat - gamma_hat * gamma_hat) / std::sqrt(nd);
  const double corr = (2.0 * (0.5 - gamma_hat) * z * z - 1.0 - gamma_hat) / (3.0 * nd);
  return ConfidenceBounds{lead - corr, lead + corr};
}

double coverage_probability(std::int64_t m, std::int64_t n, double gamma, double epsilon) {
  if (m < 1 || m > n) {
    throw MathPreconditionError("coverage_probability: need 1 <= m <= n, got m=" +
                                std::to_string(m) + ", n=" + std::to_string(n));
  }
  if (!(epsilon > 0.0)) {
    throw MathPreconditionError("coverage_probability: epsilon must be positive");
  }
  const double a = static_cast<double>(m);
  const double b = static_cast<double>(n - m) + 1.0;
  const double hi = std::min(1.0, gamma + epsilon);
  const double lo = std::max(0.0, gamma - epsilon);
  if (hi <= 0.0 || lo >= 1.0) return 0.0;
  return regularized_incomplete_beta(a, b, hi) - regularized_incomplete_beta(a, b, lo);
}

bool epsilon_reasonableness(const GuaranteeParams& params) {
  const auto narrow = std::min(params.gamma.n1, params.gamma.n2 - params.gamma.n1);
  return params.epsilon <= static_cast<double>(narrow) / static_cast<double>(params.gamma.n2);
}

}  // namespace quantguard
