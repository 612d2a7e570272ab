#include "gpisomap/gp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace gpi {

namespace {

Vector make_kernel_coeff(const Vector& eigenvalues, double ell) {
  if (!(ell > 0.0)) throw std::invalid_argument("gp: length scale must be positive");
  return (-eigenvalues.array() / (2.0 * ell * ell)).exp() - 1.0;
}

void check_noise(double noise_var) {
  if (noise_var < 0.0 || !std::isfinite(noise_var))
    throw std::invalid_argument("gp: noise variance must be finite and >= 0");
}

}  // namespace

Matrix kernel_matrix(const Embedding& e, double ell) {
  Vector c = make_kernel_coeff(e.eigenvalues, ell);
  Matrix k = Matrix::Identity(e.size(), e.size());
  for (int i = 0; i < e.dim; ++i)
    k += c[i] * e.eigenvectors.col(i) * e.eigenvectors.col(i).transpose();
  return k;
}

Matrix elementwise_kernel(const Matrix& gram, double ell) {
  if (!(ell > 0.0)) throw std::invalid_argument("gp: length scale must be positive");
  return (-gram.array() / (2.0 * ell * ell)).exp();
}

Matrix lowrank_solve(const Embedding& e, double noise_var, double ell) {
  check_noise(noise_var);
  Vector c = make_kernel_coeff(e.eigenvalues, ell);
  double a = 1.0 / (1.0 + noise_var);
  Matrix w(e.size(), e.dim);
  for (int i = 0; i < e.dim; ++i) {
    double scale = a * std::sqrt(e.eigenvalues[i]) / (1.0 + a * c[i]);
    w.col(i) = scale * e.eigenvectors.col(i);
  }
  return w;
}

Matrix lowrank_inverse(const Embedding& e, double noise_var, double ell) {
  check_noise(noise_var);
  Vector c = make_kernel_coeff(e.eigenvalues, ell);
  double a = 1.0 / (1.0 + noise_var);
  Matrix inv = a * Matrix::Identity(e.size(), e.size());
  for (int i = 0; i < e.dim; ++i)
    inv -= (a * a * c[i] / (1.0 + a * c[i])) * e.eigenvectors.col(i) *
           e.eigenvectors.col(i).transpose();
  return inv;
}

double marginal_log_likelihood(const Embedding& e, double ell, double noise_var) {
  check_noise(noise_var);
  const double n = static_cast<double>(e.size());
  const int d = e.dim;
  Vector c = make_kernel_coeff(e.eigenvalues, ell);
  double a = 1.0 / (1.0 + noise_var);

  double logdet = (n - d) * std::log1p(noise_var);
  for (int i = 0; i < d; ++i)
    logdet += std::log(std::exp(-e.eigenvalues[i] / (2.0 * ell * ell)) + noise_var);

  double ll = 0.0;
  for (int i = 0; i < d; ++i)
    ll += -0.5 * a * e.eigenvalues[i] / (1.0 + a * c[i]);
  ll += -0.5 * d * logdet - 0.5 * n * d * std::log(2.0 * std::numbers::pi);
  return ll;
}

GpModel make_gp(const Embedding& embedding, double ell, double noise_var) {
  GpModel m;
  m.ell = ell;
  m.noise_var = noise_var;
  m.embedding = embedding;
  m.noise_shrink = 1.0 / (1.0 + noise_var);
  m.kernel_coeff = make_kernel_coeff(embedding.eigenvalues, ell);
  m.weights = lowrank_solve(embedding, noise_var, ell);
  m.clamp_count = std::make_shared<std::atomic<long long>>(0);
  return m;
}

double median_geodesic(const GeodesicSet& geo) {
  const Index n = geo.size();
  std::vector<double> upper;
  upper.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) upper.push_back(geo.dist(i, j));
  if (upper.empty()) throw std::invalid_argument("median_geodesic: need n >= 2");
  std::size_t mid = upper.size() / 2;
  std::nth_element(upper.begin(), upper.begin() + mid, upper.end());
  return upper[mid];
}

std::vector<std::pair<double, double>> default_grid(const GeodesicSet& geo,
                                                    const GpGridSpec& spec) {
  if (spec.ell_count < 1 || spec.noise_count < 1)
    throw std::invalid_argument("default_grid: counts must be positive");
  double med = median_geodesic(geo);
  if (!(med > 0.0)) throw std::invalid_argument("default_grid: degenerate distances");

  auto log_space = [](double lo, double hi, int count) {
    std::vector<double> out;
    out.reserve(count);
    if (count == 1) {
      out.push_back(lo);
      return out;
    }
    double step = (std::log(hi) - std::log(lo)) / (count - 1);
    for (int i = 0; i < count; ++i) out.push_back(std::exp(std::log(lo) + step * i));
    return out;
  };

  auto ells = log_space(spec.ell_lo * med, spec.ell_hi * med, spec.ell_count);
  auto noises = log_space(spec.noise_lo, spec.noise_hi, spec.noise_count);
  std::vector<std::pair<double, double>> grid;
  grid.reserve(ells.size() * noises.size());
  for (double ell : ells)
    for (double nv : noises) grid.emplace_back(ell, nv);
  return grid;
}

GpModel fit_hyperparams(const Embedding& embedding,
                        const std::vector<std::pair<double, double>>& grid) {
  if (grid.empty()) throw std::invalid_argument("fit_hyperparams: empty grid");
  double best_ll = -std::numeric_limits<double>::infinity();
  double best_ell = 0.0, best_noise = 0.0;
  bool first = true;
  for (const auto& [ell, noise_var] : grid) {
    double ll = marginal_log_likelihood(embedding, ell, noise_var);
    bool better = first || ll > best_ll ||
                  (ll == best_ll && (ell > best_ell ||
                                     (ell == best_ell && noise_var < best_noise)));
    if (better) {
      best_ll = ll;
      best_ell = ell;
      best_noise = noise_var;
      first = false;
    }
  }
  return make_gp(embedding, best_ell, best_noise);
}

GpPrediction gp_predict(const GpModel& m, const Eigen::Ref<const Vector>& sq_geodesics) {
  if (sq_geodesics.size() != m.size())
    throw std::invalid_argument("gp_predict: probe length mismatch");
  if (!sq_geodesics.allFinite() || (sq_geodesics.array() < 0.0).any())
    throw std::invalid_argument(
        "gp_predict: squared geodesics must be finite and non-negative");

  Vector probe = (-sq_geodesics.array() / (2.0 * m.ell * m.ell)).exp();

  GpPrediction out;
  out.mean = m.weights.transpose() * probe;

  // Quadratic form against the closed-form inverse without materialising it.
  double a = m.noise_shrink;
  double quad = a * probe.squaredNorm();
  for (int i = 0; i < m.dim(); ++i) {
    double proj = m.embedding.eigenvectors.col(i).dot(probe);
    quad -= a * a * m.kernel_coeff[i] / (1.0 + a * m.kernel_coeff[i]) * proj * proj;
  }

  double model_var = m.signal_var - quad;
  if (model_var < 0.0) {
    model_var = 0.0;
    if (m.clamp_count) m.clamp_count->fetch_add(1, std::memory_order_relaxed);
  }
  out.variance = model_var + m.noise_var;
  return out;
}

}  // namespace gpi
