#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "quantguard/philox.hpp"

namespace quantguard {

// Detector-output models. Canonical textual forms (CLI grammar, parsed in io):
//   uniform | chi2:dof=<int> | levy | cusum:delta=<real>,dim=<int>
//   gauss:dim=<int>[,mean=<v;...>][,cov=<row-major v;...>]
struct UniformSpec {};
struct ChiSquareSpec {
  std::int64_t dof = 4;
};
struct LevySpec {};
struct CusumIidSpec {
  double delta = 6.0;
  std::int64_t dim = 4;
};
struct GaussResidualSpec {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

using SourceKind = std::variant<UniformSpec, ChiSquareSpec, LevySpec, CusumIidSpec, GaussResidualSpec>;

struct SourceSpec {
  SourceKind kind;
  std::uint64_t seed = 0;
};

/// true for sources whose outputs form a serially correlated trajectory
/// (CUSUM) rather than i.i.d. scalar draws.
bool is_trajectory_source(const SourceKind& kind);
/// true for scalar sources usable in i.i.d. sampling mode.
bool is_scalar_source(const SourceKind& kind);

/// Canonical textual form of a source kind (the CLI grammar, parsed in io).
std::string canonical_source_text(const SourceKind& kind);

double standard_normal(GaussianStream& stream);

/// Sum of dof squared independent standard normals.
double chi_square_sample(std::int64_t dof, GaussianStream& stream);

/// Standard Levy via X = 1/Z^2, Z standard normal (Z = 0 redrawn).
double levy_sample(GaussianStream& stream);

/// One scalar i.i.d. draw from a uniform/chi2/levy kind. Throws for
/// trajectory or vector kinds.
double draw_scalar(const SourceKind& kind, GaussianStream& stream);

/// Non-parametric CUSUM without resetting: y(0) = 0,
/// y(k+1) = max(0, y(k) + ||r(k)||^2 - delta) with r(k) i.i.d. dim-dimensional
/// standard normal. Returns (y(1), ..., y(length)).
std::vector<double> cusum_trajectory(const CusumIidSpec& spec, std::int64_t length,
                                     GaussianStream& stream);

/// Estimated residual normalization: mu_hat, Sigma_hat, and the symmetric
/// inverse square root of Sigma_hat.
struct WhiteningModel {
  Eigen::VectorXd mu_hat;
  Eigen::MatrixXd sigma_hat;
  Eigen::MatrixXd inv_sqrt;
};

/// Sample mean + unbiased sample covariance + symmetric inverse square root
/// via eigendecomposition. Requires at least dim+1 vectors; throws when the
/// smallest eigenvalue of Sigma_hat is <= 1e-12 times the largest.
WhiteningModel estimate_mean_cov(const std::vector<Eigen::VectorXd>& residuals);

/// r = Sigma_hat^(-1/2) (residual - mu_hat).
Eigen::VectorXd whiten(const WhiteningModel& model, const Eigen::VectorXd& residual);

/// One N(mean, cov) draw through the Cholesky factor `chol_l`.
Eigen::VectorXd gauss_residual(const Eigen::VectorXd& mean, const Eigen::MatrixXd& chol_l,
                               GaussianStream& stream);

/// Recipe for the stored split-evaluation trajectory: correlated CUSUM output
/// of whitened Gaussian residuals, with the whitening model estimated from a
/// separate calibration stream.
struct DatasetRecipe {
  std::uint64_t seed = 0;
  std::int64_t n_points = 0;
  double delta = 3.0;
  std::int64_t calibration_size = 10000;
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

/// The committed data/cusum_residual_trajectory.txt recipe (13601 points,
/// delta = 3, dim = 2, seed pinned).
DatasetRecipe reference_dataset_recipe();

std::vector<double> generate_cusum_residual_dataset(const DatasetRecipe& recipe);

}  // namespace quantguard
