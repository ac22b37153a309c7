#include "quantguard/sources.hpp"

#include <cmath>
#include <string>

#include "quantguard/errors.hpp"
#include "quantguard/format.hpp"

namespace quantguard {

bool is_trajectory_source(const SourceKind& kind) {
  return std::holds_alternative<CusumIidSpec>(kind);
}

bool is_scalar_source(const SourceKind& kind) {
  return std::holds_alternative<UniformSpec>(kind) ||
         std::holds_alternative<ChiSquareSpec>(kind) || std::holds_alternative<LevySpec>(kind);
}

std::string canonical_source_text(const SourceKind& kind) {
  if (std::holds_alternative<UniformSpec>(kind)) return "uniform";
  if (const auto* chi = std::get_if<ChiSquareSpec>(&kind)) {
    return "chi2:dof=" + std::to_string(chi->dof);
  }
  if (std::holds_alternative<LevySpec>(kind)) return "levy";
  if (const auto* cusum = std::get_if<CusumIidSpec>(&kind)) {
    return "cusum:delta=" + format_double(cusum->delta) + ",dim=" + std::to_string(cusum->dim);
  }
  const auto& gauss = std::get<GaussResidualSpec>(kind);
  std::string text = "gauss:dim=" + std::to_string(gauss.mean.size());
  text += ",mean=";
  for (Eigen::Index i = 0; i < gauss.mean.size(); ++i) {
    if (i > 0) text += ";";
    text += format_double(gauss.mean(i));
  }
  text += ",cov=";
  for (Eigen::Index r = 0; r < gauss.cov.rows(); ++r) {
    for (Eigen::Index c = 0; c < gauss.cov.cols(); ++c) {
      if (r > 0 || c > 0) text += ";";
      text += format_double(gauss.cov(r, c));
    }
  }
  return text;
}

double standard_normal(GaussianStream& stream) { return stream.next(); }

double chi_square_sample(std::int64_t dof, GaussianStream& stream) {
  if (dof < 1) throw MathPreconditionError("chi_square_sample: dof must be >= 1");
  double sum = 0.0;
  for (std::int64_t i = 0; i < dof; ++i) {
    const double z = stream.next();
    sum += z * z;
  }
  return sum;
}

double levy_sample(GaussianStream& stream) {
  double z;
  do {
    z = stream.next();
  } while (z == 0.0);
  return 1.0 / (z * z);
}

double draw_scalar(const SourceKind& kind, GaussianStream& stream) {
  if (std::holds_alternative<UniformSpec>(kind)) return stream.raw().next_uniform();
  if (const auto* chi = std::get_if<ChiSquareSpec>(&kind)) {
    return chi_square_sample(chi->dof, stream);
  }
  if (std::holds_alternative<LevySpec>(kind)) return levy_sample(stream);
  throw UsageError("draw_scalar: source kind is not a scalar i.i.d. source");
}

std::vector<double> cusum_trajectory(const CusumIidSpec& spec, std::int64_t length,
                                     GaussianStream& stream) {
  if (length < 1) throw MathPreconditionError("cusum_trajectory: length must be >= 1");
  if (spec.dim < 1) throw MathPreconditionError("cusum_trajectory: dim must be >= 1");
  if (!(spec.delta > 0.0)) throw MathPreconditionError("cusum_trajectory: delta must be > 0");
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(length));
  double y = 0.0;
  for (std::int64_t k = 0; k < length; ++k) {
    double norm2 = 0.0;
    for (std::int64_t d = 0; d < spec.dim; ++d) {
      const double z = stream.next();
      norm2 += z * z;
    }
    y = std::max(0.0, y + norm2 - spec.delta);
    out.push_back(y);
  }
  return out;
}

WhiteningModel estimate_mean_cov(const std::vector<Eigen::VectorXd>& residuals) {
  if (residuals.empty()) throw MathPreconditionError("estimate_mean_cov: no residuals");
  const auto dim = residuals.front().size();
  const auto n = static_cast<Eigen::Index>(residuals.size());
  if (n < dim + 1) {
    throw MathPreconditionError("estimate_mean_cov: need at least dim+1 = " +
                                std::to_string(dim + 1) + " residuals, got " + std::to_string(n));
  }
  Eigen::VectorXd mu = Eigen::VectorXd::Zero(dim);
  for (const auto& r : residuals) {
    if (r.size() != dim) throw MathPreconditionError("estimate_mean_cov: mixed dimensions");
    mu += r;
  }
  mu /= static_cast<double>(n);
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(dim, dim);
  for (const auto& r : residuals) {
    const Eigen::VectorXd c = r - mu;
    sigma += c * c.transpose();
  }
  sigma /= static_cast<double>(n - 1);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sigma);
  if (eig.info() != Eigen::Success) {
    throw MathPreconditionError("estimate_mean_cov: eigendecomposition failed");
  }
  const Eigen::VectorXd& vals = eig.eigenvalues();
  const double largest = vals.maxCoeff();
  if (!(largest > 0.0) || vals.minCoeff() <= 1e-12 * largest) {
    throw MathPreconditionError("estimate_mean_cov: sample covariance is singular");
  }
  const Eigen::MatrixXd inv_sqrt =
      eig.eigenvectors() * vals.cwiseInverse().cwiseSqrt().asDiagonal() *
      eig.eigenvectors().transpose();
  return WhiteningModel{std::move(mu), std::move(sigma), inv_sqrt};
}

Eigen::VectorXd whiten(const WhiteningModel& model, const Eigen::VectorXd& residual) {
  if (residual.size() != model.mu_hat.size()) {
    throw MathPreconditionError("whiten: residual dimension " + std::to_string(residual.size()) +
                                " does not match model dimension " +
                                std::to_string(model.mu_hat.size()));
  }
  return model.inv_sqrt * (residual - model.mu_hat);
}

Eigen::VectorXd gauss_residual(const Eigen::VectorXd& mean, const Eigen::MatrixXd& chol_l,
                               GaussianStream& stream) {
  Eigen::VectorXd z(mean.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = stream.next();
  return mean + chol_l * z;
}

DatasetRecipe reference_dataset_recipe() {
  DatasetRecipe recipe;
  recipe.seed = 104729;
  recipe.n_points = 13601;
  recipe.delta = 3.0;
  recipe.calibration_size = 10000;
  recipe.mean = Eigen::Vector2d(1.0, 2.0);
  recipe.cov = Eigen::Matrix2d{{2.0, 0.5}, {0.5, 1.0}};
  return recipe;
}

std::vector<double> generate_cusum_residual_dataset(const DatasetRecipe& recipe) {
  const Eigen::LLT<Eigen::MatrixXd> llt(recipe.cov);
  if (llt.info() != Eigen::Success) {
    throw MathPreconditionError("generate_cusum_residual_dataset: covariance is not positive definite");
  }
  const Eigen::MatrixXd chol_l = llt.matrixL();

  GaussianStream calibration(recipe.seed, stream_id(StreamDomain::dataset_gen, 0));
  std::vector<Eigen::VectorXd> residuals;
  residuals.reserve(static_cast<std::size_t>(recipe.calibration_size));
  for (std::int64_t i = 0; i < recipe.calibration_size; ++i) {
    residuals.push_back(gauss_residual(recipe.mean, chol_l, calibration));
  }
  const WhiteningModel model = estimate_mean_cov(residuals);

  GaussianStream stream(recipe.seed, stream_id(StreamDomain::dataset_gen, 1));
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(recipe.n_points));
  double y = 0.0;
  for (std::int64_t k = 0; k < recipe.n_points; ++k) {
    const Eigen::VectorXd r = whiten(model, gauss_residual(recipe.mean, chol_l, stream));
    y = std::max(0.0, y + r.squaredNorm() - recipe.delta);
    out.push_back(y);
  }
  return out;
}

}  // namespace quantguard
