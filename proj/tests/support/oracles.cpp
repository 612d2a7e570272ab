#include "oracles.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace oracle {

std::pair<Vector, Matrix> jacobi_eigen(Matrix sym, int sweeps) {
  const Index n = sym.rows();
  Matrix vecs = Matrix::Identity(n, n);

  for (int sweep = 0; sweep < sweeps; ++sweep) {
    double off = 0.0;
    for (Index p = 0; p < n; ++p)
      for (Index q = p + 1; q < n; ++q) off += sym(p, q) * sym(p, q);
    if (off < 1e-26 * std::max(1.0, sym.squaredNorm())) break;

    for (Index p = 0; p < n; ++p) {
      for (Index q = p + 1; q < n; ++q) {
        if (sym(p, q) == 0.0) continue;
        double theta = (sym(q, q) - sym(p, p)) / (2.0 * sym(p, q));
        double t = (theta >= 0 ? 1.0 : -1.0) /
                   (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0);
        double s = t * c;
        // Apply the rotation to rows/columns p and q.
        for (Index k = 0; k < n; ++k) {
          double akp = sym(k, p), akq = sym(k, q);
          sym(k, p) = c * akp - s * akq;
          sym(k, q) = s * akp + c * akq;
        }
        for (Index k = 0; k < n; ++k) {
          double apk = sym(p, k), aqk = sym(q, k);
          sym(p, k) = c * apk - s * aqk;
          sym(q, k) = s * apk + c * aqk;
        }
        for (Index k = 0; k < n; ++k) {
          double vkp = vecs(k, p), vkq = vecs(k, q);
          vecs(k, p) = c * vkp - s * vkq;
          vecs(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<Index> order(n);
  std::iota(order.begin(), order.end(), Index{0});
  std::sort(order.begin(), order.end(),
            [&](Index a, Index b) { return sym(a, a) > sym(b, b); });
  Vector values(n);
  Matrix sorted(n, n);
  for (Index i = 0; i < n; ++i) {
    values[i] = sym(order[i], order[i]);
    sorted.col(i) = vecs.col(order[i]);
  }
  return {values, sorted};
}

Matrix mds(const Matrix& sq_dists, int d) {
  const Index n = sq_dists.rows();
  Matrix h = Matrix::Identity(n, n) - Matrix::Constant(n, n, 1.0 / n);
  Matrix gram = -0.5 * h * sq_dists * h;
  auto [values, vectors] = jacobi_eigen(gram);
  Matrix coords(n, d);
  for (int i = 0; i < d; ++i) {
    if (values[i] <= 0.0) throw std::runtime_error("oracle::mds: spectrum deficit");
    coords.col(i) = std::sqrt(values[i]) * vectors.col(i);
  }
  return coords;
}

Matrix expm(const Matrix& m) {
  const Index n = m.rows();
  // Scale until the norm is small, series-sum, then square back up.
  double norm = m.cwiseAbs().rowwise().sum().maxCoeff();
  int squarings = 0;
  double scale = 1.0;
  while (norm * scale > 0.5) {
    scale *= 0.5;
    ++squarings;
  }
  Matrix x = m * scale;
  Matrix term = Matrix::Identity(n, n);
  Matrix sum = term;
  for (int k = 1; k <= 30; ++k) {
    term = term * x / static_cast<double>(k);
    sum += term;
    if (term.cwiseAbs().maxCoeff() < 1e-18) break;
  }
  for (int s = 0; s < squarings; ++s) sum = sum * sum;
  return sum;
}

Vector dijkstra(const gpi::NeighborhoodGraph& graph, Index source) {
  const Index n = graph.size();
  constexpr double kInf = std::numeric_limits<double>::infinity();
  Vector dist = Vector::Constant(n, kInf);
  std::vector<char> done(n, 0);
  dist[source] = 0.0;
  for (Index round = 0; round < n; ++round) {
    Index v = -1;
    double best = kInf;
    for (Index i = 0; i < n; ++i)
      if (!done[i] && dist[i] < best) {
        best = dist[i];
        v = i;
      }
    if (v < 0) break;
    done[v] = 1;
    for (const auto& [w, len] : graph.adjacency[v])
      dist[w] = std::min(dist[w], dist[v] + len);
  }
  return dist;
}

Vector inserted_point_sq_geodesics(const Eigen::Ref<const Vector>& point,
                                   const gpi::PointCloud& cloud,
                                   const gpi::NeighborhoodGraph& graph, int k) {
  const Index n = cloud.size();
  std::vector<std::pair<double, Index>> order;
  for (Index j = 0; j < n; ++j)
    order.emplace_back((cloud.points.row(j).transpose() - point).norm(), j);
  std::sort(order.begin(), order.end());

  gpi::NeighborhoodGraph extended = graph;
  extended.adjacency.emplace_back();
  for (int r = 0; r < k && r < static_cast<int>(order.size()); ++r) {
    auto [w, j] = order[r];
    extended.adjacency[n].emplace_back(j, w);
    extended.adjacency[j].emplace_back(n, w);
  }

  Vector dist = dijkstra(extended, n);
  Vector sq(n);
  for (Index i = 0; i < n; ++i) sq[i] = dist[i] * dist[i];
  return sq;
}

UnionFind::UnionFind(Index n) : parent_(n) {
  std::iota(parent_.begin(), parent_.end(), Index{0});
}

Index UnionFind::find(Index v) {
  while (parent_[v] != v) {
    parent_[v] = parent_[parent_[v]];
    v = parent_[v];
  }
  return v;
}

void UnionFind::unite(Index a, Index b) { parent_[find(a)] = find(b); }

Index UnionFind::components() {
  Index count = 0;
  for (Index v = 0; v < static_cast<Index>(parent_.size()); ++v)
    if (find(v) == v) ++count;
  return count;
}

Matrix ridge_normal_equations(const Matrix& global_coords, const Matrix& local_coords,
                              double ridge) {
  const Index m = local_coords.cols();
  const Index dj = local_coords.rows();
  Matrix a(dj + 1, m);
  a.topRows(dj) = local_coords;
  a.row(dj).setOnes();
  Matrix lhs = a * a.transpose() + ridge * Matrix::Identity(dj + 1, dj + 1);
  return global_coords * a.transpose() * lhs.fullPivLu().inverse();
}

namespace {

double planar_fit_residual(const Matrix& a, const Matrix& b, double angle, double flip) {
  Eigen::Matrix2d rot;
  rot << std::cos(angle), -flip * std::sin(angle), std::sin(angle), flip * std::cos(angle);
  Matrix ac = a.colwise() - Vector(a.rowwise().mean());
  Matrix bc = rot * (b.colwise() - Vector(b.rowwise().mean()));
  double denom = bc.squaredNorm();
  double scale = denom > 0 ? (ac.array() * bc.array()).sum() / denom : 0.0;
  return (scale * bc - ac).norm() / ac.norm();
}

}  // namespace

double planar_procrustes_search(const Matrix& a, const Matrix& b) {
  if (a.rows() != 2 || b.rows() != 2)
    throw std::invalid_argument("planar_procrustes_search: 2-D only");

  double best = std::numeric_limits<double>::infinity();
  double best_angle = 0.0, best_flip = 1.0;
  const int steps = 4096;
  for (double flip : {1.0, -1.0}) {
    for (int i = 0; i < steps; ++i) {
      double angle = 2.0 * std::numbers::pi * i / steps;
      double r = planar_fit_residual(a, b, angle, flip);
      if (r < best) {
        best = r;
        best_angle = angle;
        best_flip = flip;
      }
    }
  }
  // Golden-section refinement around the best coarse angle.
  double lo = best_angle - 2.0 * std::numbers::pi / steps;
  double hi = best_angle + 2.0 * std::numbers::pi / steps;
  const double gold = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - gold * (hi - lo), x2 = lo + gold * (hi - lo);
  double f1 = planar_fit_residual(a, b, x1, best_flip);
  double f2 = planar_fit_residual(a, b, x2, best_flip);
  for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - gold * (hi - lo);
      f1 = planar_fit_residual(a, b, x1, best_flip);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + gold * (hi - lo);
      f2 = planar_fit_residual(a, b, x2, best_flip);
    }
  }
  return std::min({best, f1, f2});
}

DenseGpResult dense_gp(const Matrix& kernel, double noise_var, const Matrix& targets,
                       const Vector& probe, double probe_self) {
  const Index n = kernel.rows();
  Matrix shifted = kernel + noise_var * Matrix::Identity(n, n);
  Eigen::FullPivLU<Matrix> lu(shifted);
  Matrix solved = lu.solve(targets);

  DenseGpResult out;
  out.mean = solved.transpose() * probe;
  Vector kinv_probe = lu.solve(probe);
  double model_var = probe_self - probe.dot(kinv_probe);
  out.variance = std::max(0.0, model_var) + noise_var;
  return out;
}

double dense_log_likelihood(const Matrix& kernel, double noise_var,
                            const Matrix& targets) {
  const Index n = kernel.rows();
  Matrix shifted = kernel + noise_var * Matrix::Identity(n, n);
  Eigen::LLT<Matrix> llt(shifted);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("oracle::dense_log_likelihood: kernel not positive definite");
  double logdet = 0.0;
  for (Index i = 0; i < n; ++i) logdet += 2.0 * std::log(llt.matrixL()(i, i));

  double ll = 0.0;
  for (Index c = 0; c < targets.cols(); ++c) {
    Vector y = targets.col(c);
    ll += -0.5 * y.dot(llt.solve(y)) - 0.5 * logdet -
          0.5 * n * std::log(2.0 * std::numbers::pi);
  }
  return ll;
}

Matrix random_orthonormal(std::mt19937_64& rng, Index n, Index d) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix raw(n, d);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < d; ++j) raw(i, j) = gauss(rng);
  Eigen::HouseholderQR<Matrix> qr(raw);
  Matrix q = qr.householderQ() * Matrix::Identity(n, d);
  return q;
}

gpi::Embedding synthetic_embedding(std::mt19937_64& rng, Index n, int d, double scale) {
  std::uniform_real_distribution<double> unit(0.5, 2.0);
  Vector values(d);
  for (int i = 0; i < d; ++i) values[i] = unit(rng) * scale;
  std::sort(values.data(), values.data() + d, std::greater<>());

  gpi::Embedding e;
  e.eigenvalues = values;
  e.eigenvectors = random_orthonormal(rng, n, d);
  e.dim = d;
  e.coords.resize(d, n);
  for (int i = 0; i < d; ++i)
    e.coords.row(i) = std::sqrt(values[i]) * e.eigenvectors.col(i).transpose();
  e.full_spectrum = values;
  return e;
}

}  // namespace oracle
