#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "quantguard/errors.hpp"
#include "quantguard/format.hpp"
#include "quantguard/philox.hpp"
#include "quantguard/sources.hpp"
#include "quantguard/special_functions.hpp"

using namespace quantguard;

namespace {

// One-sample Kolmogorov-Smirnov distance against a continuous CDF.
double ks_distance(std::vector<double> values, const std::function<double(double)>& cdf) {
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  double d = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double f = cdf(values[i]);
    d = std::max(d, std::abs(f - static_cast<double>(i) / n));
    d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
  }
  return d;
}

int ks_passes_at_1pct(const std::function<double(GaussianStream&)>& draw,
                      const std::function<double(double)>& cdf) {
  const int n_per_seed = 2000;
  const double critical = 1.6276 / std::sqrt(static_cast<double>(n_per_seed));
  int passes = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    GaussianStream gs(seed, stream_id(StreamDomain::aux, 20));
    std::vector<double> values(n_per_seed);
    for (double& v : values) v = draw(gs);
    if (ks_distance(values, cdf) < critical) ++passes;
  }
  return passes;
}

}  // namespace

TEST_CASE("canonical source text round trips through the grammar") {
  CHECK(canonical_source_text(UniformSpec{}) == "uniform");
  CHECK(canonical_source_text(ChiSquareSpec{4}) == "chi2:dof=4");
  CHECK(canonical_source_text(LevySpec{}) == "levy");
  CHECK(canonical_source_text(CusumIidSpec{6.0, 4}) == "cusum:delta=6,dim=4");
  CHECK(canonical_source_text(CusumIidSpec{2.5, 2}) == "cusum:delta=2.5,dim=2");
}

TEST_CASE("source kind classification") {
  CHECK(is_scalar_source(UniformSpec{}));
  CHECK(is_scalar_source(ChiSquareSpec{1}));
  CHECK(is_scalar_source(LevySpec{}));
  CHECK_FALSE(is_scalar_source(CusumIidSpec{}));
  CHECK(is_trajectory_source(CusumIidSpec{}));
  CHECK_FALSE(is_trajectory_source(UniformSpec{}));
  GaussResidualSpec gauss;
  gauss.mean = Eigen::VectorXd::Zero(2);
  gauss.cov = Eigen::MatrixXd::Identity(2, 2);
  CHECK_FALSE(is_scalar_source(gauss));
  CHECK_FALSE(is_trajectory_source(gauss));
}

TEST_CASE("uniform moments at scale") {
  GaussianStream gs(5150, stream_id(StreamDomain::aux, 21));
  const int n = 1000000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += draw_scalar(UniformSpec{}, gs);
  CHECK(sum / n == doctest::Approx(0.5).epsilon(0.003));
}

TEST_CASE("normal moments at scale") {
  GaussianStream gs(5151, stream_id(StreamDomain::aux, 21));
  const int n = 1000000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = standard_normal(gs);
    sum += z;
    sum2 += z * z;
  }
  CHECK(sum / n == doctest::Approx(0.0).scale(1.0).epsilon(0.004));
  CHECK(sum2 / n == doctest::Approx(1.0).epsilon(0.006));
}

TEST_CASE("chi-square(4) moments at scale") {
  GaussianStream gs(5152, stream_id(StreamDomain::aux, 21));
  const int n = 1000000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = chi_square_sample(4, gs);
    CHECK(x >= 0.0);
    sum += x;
    sum2 += x * x;
  }
  const double mean = sum / n;
  const double var = sum2 / n - mean * mean;
  CHECK(mean == doctest::Approx(4.0).epsilon(0.003));   // 4 +- 0.012
  CHECK(var == doctest::Approx(8.0).epsilon(0.01));     // 8 +- 0.08
}

TEST_CASE("chi-square(1) is the square of the same stream's normal") {
  GaussianStream a(606, stream_id(StreamDomain::aux, 22));
  GaussianStream b(606, stream_id(StreamDomain::aux, 22));
  for (int i = 0; i < 1000; ++i) {
    const double z = standard_normal(a);
    CHECK(chi_square_sample(1, b) == z * z);
  }
}

TEST_CASE("levy draws are positive with the right median") {
  GaussianStream gs(5153, stream_id(StreamDomain::aux, 23));
  const int n = 1000000;
  std::vector<double> values(n);
  for (double& v : values) {
    v = levy_sample(gs);
    REQUIRE(v > 0.0);
  }
  std::nth_element(values.begin(), values.begin() + n / 2, values.end());
  CHECK(values[n / 2] == doctest::Approx(2.1981093383177326).epsilon(0.015));
}

TEST_CASE("distributional KS checks at the 1% level over 100 seeds") {
  CHECK(ks_passes_at_1pct([](GaussianStream& gs) { return draw_scalar(UniformSpec{}, gs); },
                          [](double x) { return x; }) >= 95);
  CHECK(ks_passes_at_1pct([](GaussianStream& gs) { return standard_normal(gs); },
                          [](double x) { return normal_cdf(x); }) >= 95);
  CHECK(ks_passes_at_1pct([](GaussianStream& gs) { return chi_square_sample(4, gs); },
                          [](double x) { return chi_square_cdf(x, 4); }) >= 95);
  CHECK(ks_passes_at_1pct([](GaussianStream& gs) { return levy_sample(gs); },
                          [](double x) { return levy_cdf(x); }) >= 95);
}

TEST_CASE("draw_scalar rejects non-scalar kinds") {
  GaussianStream gs(1, stream_id(StreamDomain::aux, 0));
  CHECK_THROWS_AS(draw_scalar(CusumIidSpec{}, gs), UsageError);
}

TEST_CASE("cusum validation") {
  GaussianStream gs(1, stream_id(StreamDomain::aux, 0));
  CHECK_THROWS_AS(cusum_trajectory(CusumIidSpec{6.0, 4}, 0, gs), MathPreconditionError);
  CHECK_THROWS_AS(cusum_trajectory(CusumIidSpec{6.0, 0}, 10, gs), MathPreconditionError);
  CHECK_THROWS_AS(cusum_trajectory(CusumIidSpec{0.0, 4}, 10, gs), MathPreconditionError);
  CHECK_THROWS_AS(cusum_trajectory(CusumIidSpec{-1.0, 4}, 10, gs), MathPreconditionError);
}

TEST_CASE("cusum with an enormous drift never leaves zero") {
  GaussianStream gs(2, stream_id(StreamDomain::aux, 24));
  const std::vector<double> y = cusum_trajectory(CusumIidSpec{1e6, 4}, 5000, gs);
  REQUIRE(y.size() == 5000);
  CHECK(*std::max_element(y.begin(), y.end()) == 0.0);
}

TEST_CASE("cusum outputs are non-negative, deterministic, and drift-stable") {
  GaussianStream a(3, stream_id(StreamDomain::aux, 25));
  GaussianStream b(3, stream_id(StreamDomain::aux, 25));
  const std::vector<double> ya = cusum_trajectory(CusumIidSpec{6.0, 4}, 100000, a);
  const std::vector<double> yb = cusum_trajectory(CusumIidSpec{6.0, 4}, 100000, b);
  CHECK(ya == yb);
  double above_a = 0.0;
  for (double v : ya) {
    REQUIRE(v >= 0.0);
    if (v > 0.0) above_a += 1.0;
  }
  GaussianStream c(4, stream_id(StreamDomain::aux, 26));
  const std::vector<double> yc = cusum_trajectory(CusumIidSpec{6.0, 4}, 100000, c);
  double above_c = 0.0;
  for (double v : yc) {
    if (v > 0.0) above_c += 1.0;
  }
  // occupancy above zero is a stable property of (delta, dim), not of the seed
  CHECK(above_a / above_c == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("cusum recursion matches a hand-rolled replay") {
  GaussianStream gs(5, stream_id(StreamDomain::aux, 27));
  GaussianStream replay(5, stream_id(StreamDomain::aux, 27));
  const CusumIidSpec spec{6.0, 3};
  const std::vector<double> y = cusum_trajectory(spec, 200, gs);
  double state = 0.0;
  for (int k = 0; k < 200; ++k) {
    double norm2 = 0.0;
    for (int d = 0; d < 3; ++d) {
      const double z = standard_normal(replay);
      norm2 += z * z;
    }
    state = std::max(0.0, state + norm2 - spec.delta);
    CHECK(y[static_cast<std::size_t>(k)] == doctest::Approx(state).epsilon(1e-15));
  }
}

TEST_CASE("estimate_mean_cov recovers a known model") {
  Eigen::VectorXd mean(2);
  mean << 1.0, 2.0;
  Eigen::MatrixXd cov(2, 2);
  cov << 2.0, 0.5, 0.5, 1.0;
  const Eigen::MatrixXd chol_l = Eigen::LLT<Eigen::MatrixXd>(cov).matrixL();
  GaussianStream gs(6, stream_id(StreamDomain::aux, 28));
  std::vector<Eigen::VectorXd> residuals;
  const int n = 20000;
  residuals.reserve(n);
  for (int i = 0; i < n; ++i) residuals.push_back(gauss_residual(mean, chol_l, gs));

  const WhiteningModel model = estimate_mean_cov(residuals);
  // 4-sigma bands: se(mu_i) = sqrt(cov_ii / n)
  CHECK(model.mu_hat(0) == doctest::Approx(1.0).scale(1.0).epsilon(4.0 * std::sqrt(2.0 / n)));
  CHECK(model.mu_hat(1) == doctest::Approx(2.0).scale(1.0).epsilon(4.0 * std::sqrt(1.0 / n)));
  CHECK(model.sigma_hat(0, 0) == doctest::Approx(2.0).epsilon(0.1));
  CHECK(model.sigma_hat(0, 1) == doctest::Approx(0.5).epsilon(0.25));
  CHECK(model.sigma_hat(1, 1) == doctest::Approx(1.0).epsilon(0.1));

  // inv_sqrt * sigma_hat * inv_sqrt == identity
  const Eigen::MatrixXd should_be_identity = model.inv_sqrt * model.sigma_hat * model.inv_sqrt;
  CHECK((should_be_identity - Eigen::MatrixXd::Identity(2, 2)).norm() < 1e-8);
}

TEST_CASE("estimate_mean_cov rejects degenerate input") {
  std::vector<Eigen::VectorXd> constant_dim;
  GaussianStream gs(7, stream_id(StreamDomain::aux, 29));
  for (int i = 0; i < 100; ++i) {
    Eigen::VectorXd v(2);
    v << standard_normal(gs), 3.0;  // second coordinate constant => singular covariance
    constant_dim.push_back(v);
  }
  CHECK_THROWS_AS(estimate_mean_cov(constant_dim), MathPreconditionError);

  std::vector<Eigen::VectorXd> too_few(2, Eigen::VectorXd::Zero(3));
  CHECK_THROWS_AS(estimate_mean_cov(too_few), MathPreconditionError);
}

TEST_CASE("whiten standardizes residuals") {
  WhiteningModel identity_model;
  identity_model.mu_hat = Eigen::VectorXd::Zero(2);
  identity_model.sigma_hat = Eigen::MatrixXd::Identity(2, 2);
  identity_model.inv_sqrt = Eigen::MatrixXd::Identity(2, 2);
  Eigen::VectorXd r(2);
  r << 1.5, -2.5;
  CHECK((whiten(identity_model, r) - r).norm() == 0.0);

  Eigen::VectorXd wrong_dim(3);
  wrong_dim.setZero();
  CHECK_THROWS_AS(whiten(identity_model, wrong_dim), MathPreconditionError);

  // whitened draws from a correlated model have ||r||^2 ~ chi2(dim)
  Eigen::VectorXd mean(2);
  mean << 1.0, 2.0;
  Eigen::MatrixXd cov(2, 2);
  cov << 2.0, 0.5, 0.5, 1.0;
  const Eigen::MatrixXd chol_l = Eigen::LLT<Eigen::MatrixXd>(cov).matrixL();
  GaussianStream fit_stream(8, stream_id(StreamDomain::aux, 30));
  std::vector<Eigen::VectorXd> fit(10000);
  for (auto& v : fit) v = gauss_residual(mean, chol_l, fit_stream);
  const WhiteningModel model = estimate_mean_cov(fit);

  GaussianStream eval_stream(9, stream_id(StreamDomain::aux, 31));
  const int n = 100000;
  double sum_norm2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd w = whiten(model, gauss_residual(mean, chol_l, eval_stream));
    sum_norm2 += w.squaredNorm();
  }
  CHECK(sum_norm2 / n == doctest::Approx(2.0).epsilon(0.02));
}

TEST_CASE("reference dataset recipe is pinned") {
  const DatasetRecipe recipe = reference_dataset_recipe();
  CHECK(recipe.seed == 104729);
  CHECK(recipe.n_points == 13601);
  CHECK(recipe.delta == 3.0);
  CHECK(recipe.calibration_size == 10000);
  REQUIRE(recipe.mean.size() == 2);
  CHECK(recipe.mean(0) == 1.0);
  CHECK(recipe.mean(1) == 2.0);
  CHECK(recipe.cov(0, 0) == 2.0);
  CHECK(recipe.cov(0, 1) == 0.5);
  CHECK(recipe.cov(1, 1) == 1.0);
}

TEST_CASE("committed dataset regenerates byte-for-byte") {
  const char* path = std::getenv("QUANTGUARD_DATA");
  REQUIRE_MESSAGE(path != nullptr, "QUANTGUARD_DATA must point at the committed dataset");
  std::ifstream in(path);
  REQUIRE_MESSAGE(in.good(), "cannot open the committed dataset");
  std::ostringstream committed;
  committed << in.rdbuf();

  std::ostringstream regenerated;
  for (double v : generate_cusum_residual_dataset(reference_dataset_recipe())) {
    regenerated << format_double(v) << "\n";
  }
  CHECK(committed.str() == regenerated.str());
}
