#include "gpisomap/evaluation.hpp"

#include <Eigen/Cholesky>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace gpi {

double procrustes_error(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("procrustes_error: shape mismatch");
  if (a.cols() < 2)
    throw std::invalid_argument("procrustes_error: need at least two points");

  Matrix ac = a.colwise() - Vector(a.rowwise().mean());
  Matrix bc = b.colwise() - Vector(b.rowwise().mean());
  double na = ac.norm();
  double nb = bc.norm();
  if (na == 0.0 || nb == 0.0)
    throw std::invalid_argument("procrustes_error: degenerate configuration (all points equal)");

  // Optimal rotation from the SVD of the cross-covariance; the optimal
  // scale then follows from the singular values. The residual is formed
  // from the explicitly aligned configuration: the algebraic shortcut
  // na^2 - trace^2/nb^2 cancels catastrophically near zero.
  Eigen::JacobiSVD<Matrix> svd(ac * bc.transpose(),
                               Eigen::ComputeFullU | Eigen::ComputeFullV);
  double trace = svd.singularValues().sum();
  double s = trace / (nb * nb);
  Matrix r = svd.matrixU() * svd.matrixV().transpose();
  return (ac - s * r * bc).norm() / na;
}

ThresholdParams ThresholdParams::from_graph_rule(double lambda2, double epsilon,
                                                 double ball_count,
                                                 double unit_ball_volume, int dim,
                                                 double sampling_rate,
                                                 double failure_prob) {
  ThresholdParams p;
  p.delta = lambda2 * epsilon / 4.0;
  p.ball_count = ball_count;
  p.unit_ball_volume = unit_ball_volume;
  p.dim = dim;
  p.sampling_rate = sampling_rate;
  p.failure_prob = failure_prob;
  return p;
}

double theoretical_threshold(const ThresholdParams& p) {
  if (!(p.delta > 0.0) || !(p.unit_ball_volume > 0.0) || p.dim < 1)
    throw std::invalid_argument("theoretical_threshold: delta, ball volume and dim must be positive");
  if (!(p.ball_count > 0.0) || !(p.failure_prob > 0.0))
    throw std::invalid_argument("theoretical_threshold: ball count and failure probability must be positive");
  if (!(p.sampling_rate > 0.0))
    throw std::invalid_argument("theoretical_threshold: sampling rate must be positive");

  double half_ball = p.unit_ball_volume * std::pow(p.delta / 2.0, p.dim);
  if (!(half_ball > 0.0))
    throw std::invalid_argument("theoretical_threshold: ball volume underflows to zero");
  return std::log(p.ball_count / p.failure_prob) / (p.sampling_rate * half_ball);
}

Index estimate_ball_count(const Matrix& points, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("estimate_ball_count: radius must be positive");
  const Index n = points.rows();
  if (n < 1) throw std::invalid_argument("estimate_ball_count: no points");

  std::vector<char> covered(n, 0);
  double r_sq = radius * radius;
  Index balls = 0;
  for (Index i = 0; i < n; ++i) {
    if (covered[i]) continue;
    ++balls;
    for (Index j = i; j < n; ++j)
      if (!covered[j] && (points.row(i) - points.row(j)).squaredNorm() <= r_sq)
        covered[j] = 1;
  }
  return balls;
}

namespace {

std::vector<double> ranks(const std::vector<double>& xs) {
  const std::size_t n = xs.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
  std::vector<double> rank(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && xs[order[j + 1]] == xs[order[i]]) ++j;
    double mean_rank = 0.5 * (i + j) + 1.0;  // average rank for the tie group
    for (std::size_t k = i; k <= j; ++k) rank[order[k]] = mean_rank;
    i = j + 1;
  }
  return rank;
}

}  // namespace

double spearman(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 2)
    throw std::invalid_argument("spearman: need two equal-length series");
  auto rx = ranks(xs);
  auto ry = ranks(ys);
  double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / rx.size();
  double my = std::accumulate(ry.begin(), ry.end(), 0.0) / ry.size();
  double num = 0.0, dx = 0.0, dy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    num += (rx[i] - mx) * (ry[i] - my);
    dx += (rx[i] - mx) * (rx[i] - mx);
    dy += (ry[i] - my) * (ry[i] - my);
  }
  if (dx == 0.0 || dy == 0.0)
    throw std::invalid_argument("spearman: a series is constant");
  return num / std::sqrt(dx * dy);
}

std::vector<double> equivalence_test(const Embedding& embedding,
                                     const GeodesicSet& geo, double noise_var,
                                     const std::vector<Vector>& stream_sq_geo,
                                     const std::vector<double>& ells) {
  if (stream_sq_geo.size() < 2)
    throw std::invalid_argument("equivalence_test: need at least two probes");
  if (ells.empty()) throw std::invalid_argument("equivalence_test: empty ell series");

  const int d = embedding.dim;
  const Index m = static_cast<Index>(stream_sq_geo.size());

  // Landmark reference: tau_i = sqrt(lambda_i) q_i . f with the simple
  // row-mean recentring. Fixed across the ell sweep.
  Vector row_mean = geo.sq_dist.rowwise().mean();
  Matrix reference(d, m);
  for (Index s = 0; s < m; ++s) {
    Vector f = 0.5 * (row_mean - stream_sq_geo[s]);
    for (int i = 0; i < d; ++i)
      reference(i, s) = std::sqrt(embedding.eigenvalues[i]) *
                        embedding.eigenvectors.col(i).dot(f);
  }

  std::vector<double> errors;
  errors.reserve(ells.size());
  for (double ell : ells) {
    GpModel model = make_gp(embedding, ell, noise_var);
    Matrix predicted(d, m);
    for (Index s = 0; s < m; ++s)
      predicted.col(s) = gp_predict(model, stream_sq_geo[s]).mean;
    errors.push_back(procrustes_error(reference, predicted));
  }
  return errors;
}

double euclidean_kernel_baseline(const PointCloud& batch, const Embedding& embedding,
                                 const PointCloud& stream, const Matrix& stream_truth,
                                 const GpGridSpec& grid_spec) {
  const Index n = batch.size();
  if (embedding.size() != n)
    throw std::invalid_argument("euclidean_kernel_baseline: embedding/batch mismatch");
  if (stream_truth.cols() != stream.size())
    throw std::invalid_argument("euclidean_kernel_baseline: truth/stream mismatch");

  // The full pipeline - spectral embedding, likelihood grid search, low-rank
  // GP, out-of-sample prediction - rerun with straight-line ambient distances
  // substituted for graph distances. A complete graph's shortest paths ARE
  // the straight-line distances (triangle inequality), so the distance set
  // is filled directly instead of running a redundant search.
  GeodesicSet ambient;
  ambient.dist = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) {
      double d = (batch.points.row(i) - batch.points.row(j)).norm();
      ambient.dist(i, j) = d;
      ambient.dist(j, i) = d;
    }
  ambient.sq_dist = ambient.dist.array().square();
  ambient.gram = double_center(ambient.sq_dist);

  Embedding flat = isomap_embed(ambient, embedding.dim);
  GpModel model = fit_hyperparams(flat, default_grid(ambient, grid_spec));

  Matrix predicted(embedding.dim, stream.size());
  for (Index s = 0; s < stream.size(); ++s) {
    Vector sq(n);
    for (Index i = 0; i < n; ++i)
      sq[i] = (stream.points.row(s) - batch.points.row(i)).squaredNorm();
    predicted.col(s) = gp_predict(model, sq).mean;
  }
  return procrustes_error(stream_truth, predicted);
}

std::vector<ConvergencePoint> convergence_curve(const SwissRollSpec& generator,
                                                const std::vector<Index>& sizes,
                                                int k_graph, int dim) {
  if (sizes.empty()) throw std::invalid_argument("convergence_curve: no sizes");

  std::vector<ConvergencePoint> curve;
  curve.reserve(sizes.size());
  for (std::size_t s = 0; s < sizes.size(); ++s) {
    SwissRollSpec spec = generator;
    spec.n_per_mode = sizes[s];
    for (auto& mode : spec.modes) mode.count = 0;  // all modes scale with n
    spec.seed = generator.seed + s;
    LabeledDataset data = gen_swiss_roll(spec);

    int k = k_graph == 0 ? static_cast<int>(data.cloud.size()) - 1 : k_graph;
    auto graph = build_knn_graph(data.cloud, k);
    GeodesicSet geo = geodesic_distances(graph);
    Embedding embedding = isomap_embed(geo, dim);
    curve.push_back({data.cloud.size(),
                     procrustes_error(data.truth.transpose(), embedding.coords)});
  }
  return curve;
}

}  // namespace gpi
