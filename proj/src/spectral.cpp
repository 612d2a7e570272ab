#include "gpisomap/spectral.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace gpi {

Embedding Embedding::empty(Index n) {
  Embedding e;
  e.eigenvalues.resize(0);
  e.eigenvectors.resize(n, 0);
  e.coords.resize(0, n);
  e.dim = 0;
  e.full_spectrum.resize(0);
  return e;
}

namespace {

// Full symmetric eigendecomposition sorted descending, signs fixed.
void eigen_descending(const Matrix& sym, Vector& values, Matrix& vectors) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("top_eigen: eigendecomposition failed to converge");
  const Index n = sym.rows();
  values.resize(n);
  vectors.resize(n, n);
  // Eigen returns ascending order; reverse it.
  for (Index i = 0; i < n; ++i) {
    values[i] = solver.eigenvalues()[n - 1 - i];
    vectors.col(i) = solver.eigenvectors().col(n - 1 - i);
  }
  // Deterministic sign: largest-magnitude entry positive, first wins ties.
  for (Index i = 0; i < n; ++i) {
    Index arg = 0;
    double big = -1.0;
    for (Index r = 0; r < n; ++r) {
      double mag = std::abs(vectors(r, i));
      if (mag > big) {
        big = mag;
        arg = r;
      }
    }
    if (vectors(arg, i) < 0.0) vectors.col(i) = -vectors.col(i);
  }
}

}  // namespace

namespace {

// Shared validation + floor check; returns the full sorted decomposition.
void checked_eigen(const Matrix& sym, int d, Vector& values, Matrix& vectors) {
  const Index n = sym.rows();
  if (n != sym.cols() || n < 1)
    throw std::invalid_argument("top_eigen: matrix must be square");
  if (d < 1 || d > n) throw std::invalid_argument("top_eigen: need 1 <= d <= n");
  if (!sym.isApprox(sym.transpose(), 1e-12))
    throw std::invalid_argument("top_eigen: matrix is not symmetric");

  eigen_descending(sym, values, vectors);

  double floor = 1e-10 * values.cwiseAbs().maxCoeff();
  Index usable = 0;
  while (usable < n && values[usable] > floor) ++usable;
  if (usable < d)
    throw std::runtime_error("top_eigen: only " + std::to_string(usable) +
                             " eigenvalues exceed the positive floor, need " +
                             std::to_string(d));
}

}  // namespace

std::pair<Vector, Matrix> top_eigen(const Matrix& sym, int d) {
  Vector values;
  Matrix vectors;
  checked_eigen(sym, d, values, vectors);
  return {values.head(d), vectors.leftCols(d)};
}

Embedding embed_gram(const Matrix& gram, int d) {
  Vector values;
  Matrix vectors;
  checked_eigen(gram, d, values, vectors);

  Embedding e;
  e.eigenvalues = values.head(d);
  e.eigenvectors = vectors.leftCols(d);
  e.dim = d;
  e.coords.resize(d, gram.rows());
  for (int i = 0; i < d; ++i)
    e.coords.row(i) = std::sqrt(values[i]) * vectors.col(i).transpose();
  // Keep the whole spectrum around; the size of the negative tail is a
  // useful health signal for how Euclidean the input distances were.
  e.full_spectrum = values;
  return e;
}

Embedding isomap_embed(const GeodesicSet& geo, int d) {
  return embed_gram(geo.gram, d);
}

Matrix classical_mds(const Matrix& sq_dists, int d) {
  Embedding e = embed_gram(double_center(sq_dists), d);
  return e.coords.transpose();
}

}  // namespace gpi
