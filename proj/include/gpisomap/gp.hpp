#pragma once

#include "gpisomap/geometry.hpp"
#include "gpisomap/spectral.hpp"
#include "gpisomap/types.hpp"

#include <atomic>
#include <memory>
#include <utility>
#include <vector>

namespace gpi {

// Gaussian-process regressor from geodesic space onto the embedding
// coordinates, one output dimension per retained eigenpair. The kernel is
// the matrix exponential exp(-gram / (2 ell^2)), which shares eigenvectors
// with the embedding, so everything the predictor needs reduces to a few
// per-eigenpair coefficients:
//   kernel_coeff[i] = exp(-lambda_i / (2 ell^2)) - 1
//   noise_shrink    = 1 / (1 + noise_var)        (signal variance fixed at 1)
//   weights.col(i)  = (K + noise_var I)^-1 * coords.row(i)^T
// and the weights have the closed form
//   noise_shrink * sqrt(lambda_i) / (1 + noise_shrink * kernel_coeff[i]) * q_i.
struct GpModel {
  double ell = 1.0;
  double noise_var = 0.0;        // observation noise variance
  double signal_var = 1.0;       // fixed by construction
  Embedding embedding;
  double noise_shrink = 1.0;
  Vector kernel_coeff;           // dim entries
  Matrix weights;                // n x dim
  // Number of predictions whose model variance went negative and was
  // clamped (possible when the probe vector is inconsistent with the
  // low-rank kernel). Shared across copies; prediction stays const.
  std::shared_ptr<std::atomic<long long>> clamp_count;

  Index size() const { return embedding.size(); }
  int dim() const { return embedding.dim; }
};

struct GpPrediction {
  Vector mean;      // dim entries
  double variance;  // scalar, shared across output dimensions
};

// Builds a model at fixed hyperparameters (no selection).
GpModel make_gp(const Embedding& embedding, double ell, double noise_var);

// Dense kernel matrix I + Q diag(kernel_coeff) Q^T. Always positive
// definite: its eigenvalues are exp(-lambda_i / 2 ell^2) and 1.
Matrix kernel_matrix(const Embedding& embedding, double ell);

// Elementwise reading exp(-gram_ij / 2 ell^2) of the same expression;
// diagnostic only - it differs from the matrix exponential and none of the
// closed forms below apply to it.
Matrix elementwise_kernel(const Matrix& gram, double ell);

// Closed-form regression weights, one column per output dimension.
Matrix lowrank_solve(const Embedding& embedding, double noise_var, double ell);

// Closed-form (K + noise_var I)^-1 =
//   a I - a^2 sum_i c_i/(1 + a c_i) q_i q_i^T,  a = noise_shrink.
Matrix lowrank_inverse(const Embedding& embedding, double noise_var, double ell);

// Summed per-dimension marginal log-likelihood, all in closed form:
//   sum_i [ -1/2 a lambda_i/(1 + a c_i) ] - d/2 logdet - n d/2 log(2 pi)
//   logdet = (n - d) log(1 + noise_var)
//            + sum_i log(exp(-lambda_i / 2 ell^2) + noise_var).
double marginal_log_likelihood(const Embedding& embedding, double ell,
                               double noise_var);

// Log-spaced hyperparameter grid: ell_count length scales spanning
// [ell_lo, ell_hi] x the median off-diagonal geodesic distance, crossed
// with noise_count noise variances spanning [noise_lo, noise_hi].
struct GpGridSpec {
  int ell_count = 16;
  double ell_lo = 0.1;
  double ell_hi = 100.0;
  int noise_count = 8;
  double noise_lo = 1e-4;
  double noise_hi = 1.0;
};
std::vector<std::pair<double, double>> default_grid(const GeodesicSet& geo,
                                                    const GpGridSpec& spec = {});
double median_geodesic(const GeodesicSet& geo);

// Exhaustive likelihood maximisation over (ell, noise_var) candidates.
// Ties go to the larger ell, then the smaller noise_var.
GpModel fit_hyperparams(const Embedding& embedding,
                        const std::vector<std::pair<double, double>>& grid);

// Prediction for one out-of-batch point described by its squared geodesic
// distances to the batch. The probe vector is k*_j = exp(-sq_geo_j/2 ell^2);
// mean_i = weights.col(i) . k*, and the variance is
//   signal_var - k*^T (K + noise_var I)^-1 k*   (clamped at 0)  + noise_var.
GpPrediction gp_predict(const GpModel& model,
                        const Eigen::Ref<const Vector>& sq_geodesics);

}  // namespace gpi
