#pragma once

#include "gpisomap/geometry.hpp"
#include "gpisomap/types.hpp"

#include <utility>

namespace gpi {

// Truncated spectral decomposition of a centred Gram matrix, plus the
// low-dimensional coordinates derived from it. Row i of coords is
// sqrt(eigenvalues[i]) * eigenvectors.col(i)^T, so coords is dim x n and
// each coordinate row has squared norm equal to its eigenvalue.
struct Embedding {
  Vector eigenvalues;   // dim entries, strictly decreasing order, positive
  Matrix eigenvectors;  // n x dim, orthonormal columns, deterministic signs
  Matrix coords;        // dim x n
  int dim = 0;
  Vector full_spectrum;  // all n eigenvalues, descending (diagnostics)

  Index size() const { return eigenvectors.rows(); }

  // A zero-dimensional embedding over n points (kernel degenerates to the
  // identity); useful for diagnostics and edge-case tests.
  static Embedding empty(Index n);
};

// Top d eigenpairs of a symmetric matrix, eigenvalues descending.
// Each eigenvector's sign is fixed so its largest-magnitude entry is
// positive (first such entry on a tie), making the output deterministic.
// Throws if fewer than d eigenvalues exceed 1e-10 * max(|lambda|).
std::pair<Vector, Matrix> top_eigen(const Matrix& sym, int d);

// Isomap coordinates for a batch: spectral truncation of geo.gram.
Embedding isomap_embed(const GeodesicSet& geo, int d);

// Classical multidimensional scaling of a squared-distance matrix;
// returns m x d coordinates (one row per point).
Matrix classical_mds(const Matrix& sq_dists, int d);

// Shared construction: embedding from an already-centred Gram matrix.
Embedding embed_gram(const Matrix& gram, int d);

}  // namespace gpi
