#include "gpisomap/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace gpi {

DensityClusterer::DensityClusterer(double eps, int min_pts)
    : eps_(eps), min_pts_(min_pts) {
  if (!(eps > 0.0)) throw std::invalid_argument("DensityClusterer: eps must be positive");
  if (min_pts < 1) throw std::invalid_argument("DensityClusterer: min_pts must be >= 1");
}

ClusterAssignment DensityClusterer::cluster(const PointCloud& cloud) const {
  const Index n = cloud.size();
  const double eps_sq = eps_ * eps_;

  std::vector<std::vector<Index>> within(n);  // eps-neighbourhoods, self included
  for (Index i = 0; i < n; ++i) {
    within[i].push_back(i);
    for (Index j = i + 1; j < n; ++j)
      if ((cloud.points.row(i) - cloud.points.row(j)).squaredNorm() <= eps_sq) {
        within[i].push_back(j);
        within[j].push_back(i);
      }
  }
  std::vector<char> core(n, 0);
  for (Index i = 0; i < n; ++i)
    core[i] = within[i].size() >= static_cast<std::size_t>(min_pts_);

  ClusterAssignment ca;
  ca.labels.assign(n, -1);
  // Grow clusters from core points in index order; only core points expand.
  for (Index seed = 0; seed < n; ++seed) {
    if (!core[seed] || ca.labels[seed] != -1) continue;
    int label = ca.count++;
    std::vector<Index> queue{seed};
    ca.labels[seed] = label;
    while (!queue.empty()) {
      Index v = queue.back();
      queue.pop_back();
      if (!core[v]) continue;
      for (Index w : within[v])
        if (ca.labels[w] == -1) {
          ca.labels[w] = label;
          queue.push_back(w);
        }
    }
  }

  if (ca.count == 0)
    throw std::runtime_error(
        "DensityClusterer: no dense region found; increase eps (currently " +
        std::to_string(eps_) + ") or lower min_pts");

  // Attach leftover noise to the nearest clustered point so the labels
  // partition the batch.
  for (Index i = 0; i < n; ++i) {
    if (ca.labels[i] != -1) continue;
    double best = std::numeric_limits<double>::infinity();
    int best_label = 0;
    for (Index j = 0; j < n; ++j) {
      if (ca.labels[j] == -1) continue;
      double d = (cloud.points.row(i) - cloud.points.row(j)).squaredNorm();
      if (d < best) {
        best = d;
        best_label = ca.labels[j];
      }
    }
    ca.labels[i] = best_label;
  }
  return ca;
}

ClusterAssignment cluster_batch(const PointCloud& cloud, double eps) {
  return DensityClusterer(eps).cluster(cloud);
}

namespace {

void validate_assignment(const ClusterAssignment& ca, Index n) {
  if (ca.labels.size() != static_cast<std::size_t>(n) || ca.count < 1)
    throw std::invalid_argument("cluster assignment does not cover the batch");
  std::vector<Index> sizes(ca.count, 0);
  for (int label : ca.labels) {
    if (label < 0 || label >= ca.count)
      throw std::invalid_argument("cluster assignment has an out-of-range label");
    ++sizes[label];
  }
  for (int c = 0; c < ca.count; ++c)
    if (sizes[c] == 0)
      throw std::invalid_argument("cluster " + std::to_string(c) + " is empty");
}

}  // namespace

SupportSet build_support_set(const PointCloud& cloud, const ClusterAssignment& ca,
                             int near_pairs, int far_pairs) {
  validate_assignment(ca, cloud.size());
  if (ca.count < 2)
    throw std::invalid_argument("build_support_set: need at least two clusters");
  if (near_pairs < 0 || far_pairs < 0 || near_pairs + far_pairs < 1)
    throw std::invalid_argument("build_support_set: need near_pairs + far_pairs >= 1");

  std::vector<std::vector<Index>> members(ca.count);
  for (Index i = 0; i < cloud.size(); ++i) members[ca.labels[i]].push_back(i);

  std::set<Index> picked;
  bool clipped = false;
  for (int a = 0; a < ca.count; ++a) {
    for (int b = a + 1; b < ca.count; ++b) {
      // All cross pairs, ordered by distance with index tie-breaks.
      std::vector<std::tuple<double, Index, Index>> cross;
      cross.reserve(members[a].size() * members[b].size());
      for (Index i : members[a])
        for (Index j : members[b])
          cross.emplace_back((cloud.points.row(i) - cloud.points.row(j)).norm(), i, j);
      std::sort(cross.begin(), cross.end());

      std::size_t take_near = std::min<std::size_t>(near_pairs, cross.size());
      std::size_t take_far = std::min<std::size_t>(far_pairs, cross.size());
      if (static_cast<std::size_t>(near_pairs) + far_pairs > cross.size()) clipped = true;
      for (std::size_t r = 0; r < take_near; ++r) {
        picked.insert(std::get<1>(cross[r]));
        picked.insert(std::get<2>(cross[r]));
      }
      for (std::size_t r = 0; r < take_far; ++r) {
        picked.insert(std::get<1>(cross[cross.size() - 1 - r]));
        picked.insert(std::get<2>(cross[cross.size() - 1 - r]));
      }
    }
  }

  SupportSet out;
  out.rows.assign(picked.begin(), picked.end());
  out.clipped = clipped;
  return out;
}

std::vector<AffineMap> learn_transforms(const std::vector<Matrix>& global_coords,
                                        const std::vector<Matrix>& local_coords,
                                        double ridge) {
  if (global_coords.size() != local_coords.size())
    throw std::invalid_argument("learn_transforms: per-cluster lists differ in length");
  if (ridge < 0.0) throw std::invalid_argument("learn_transforms: ridge must be >= 0");

  std::vector<AffineMap> maps;
  maps.reserve(global_coords.size());
  for (std::size_t j = 0; j < global_coords.size(); ++j) {
    const Matrix& g = global_coords[j];
    const Matrix& l = local_coords[j];
    const Index m = l.cols();
    const Index dj = l.rows();
    if (g.cols() != m)
      throw std::invalid_argument("learn_transforms: cluster " + std::to_string(j) +
                                  " coordinate counts disagree");
    if (m < dj + 1)
      throw std::invalid_argument(
          "learn_transforms: cluster " + std::to_string(j) + " has " +
          std::to_string(m) + " support points, need at least " + std::to_string(dj + 1));

    Matrix a(dj + 1, m);  // homogeneous local coordinates
    a.topRows(dj) = l;
    a.row(dj).setOnes();
    Matrix gram = a * a.transpose() + ridge * Matrix::Identity(dj + 1, dj + 1);
    Eigen::LDLT<Matrix> ldlt(gram);
    // LDLT accepts semidefinite input, so a rank check is needed on top of
    // the factorisation status: a zero pivot means the support points are
    // affinely degenerate and no ridge is there to regularise them.
    double pivot_floor = 1e-13 * std::max(1.0, gram.diagonal().maxCoeff());
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
        ldlt.vectorD().minCoeff() < pivot_floor)
      throw std::runtime_error("learn_transforms: cluster " + std::to_string(j) +
                               " support points are affinely degenerate");
    // [linear | offset] = G A^T (A A^T + ridge I)^-1, solved transposed.
    Matrix hom = ldlt.solve(a * g.transpose()).transpose();

    AffineMap map;
    map.linear = hom.leftCols(dj);
    map.offset = hom.col(dj);
    maps.push_back(std::move(map));
  }
  return maps;
}

ManifoldAtlas batch_phase(const PointCloud& cloud, const BatchParams& params,
                          const Clusterer* clusterer) {
  cloud.validate();
  if (params.dim < 1) throw std::invalid_argument("batch_phase: dim must be >= 1");
  if (params.k_graph < 1) throw std::invalid_argument("batch_phase: k_graph must be >= 1");

  ManifoldAtlas atlas;
  atlas.cloud = cloud;
  atlas.params = params;

  DensityClusterer fallback(params.eps, params.min_pts);
  const Clusterer& chosen = clusterer ? *clusterer : fallback;
  ClusterAssignment ca = chosen.cluster(cloud);
  validate_assignment(ca, cloud.size());
  if (ca.count > params.max_clusters)
    atlas.warnings.push_back("batch_phase: " + std::to_string(ca.count) +
                             " clusters exceed the configured cap of " +
                             std::to_string(params.max_clusters));

  std::vector<std::vector<Index>> members(ca.count);
  for (Index i = 0; i < cloud.size(); ++i) members[ca.labels[i]].push_back(i);

  for (int c = 0; c < ca.count; ++c) {
    ClusterModel model;
    model.rows = members[c];
    model.cloud = cloud.subset(model.rows);
    if (model.cloud.size() < params.dim + 2)
      throw std::runtime_error("batch_phase: cluster " + std::to_string(c) +
                               " has only " + std::to_string(model.cloud.size()) +
                               " points, too few for a " + std::to_string(params.dim) +
                               "-dimensional embedding");

    int k = params.k_graph;
    if (k >= model.cloud.size()) {
      k = static_cast<int>(model.cloud.size()) - 1;
      atlas.warnings.push_back("batch_phase: cluster " + std::to_string(c) +
                               " is smaller than k_graph, using k=" + std::to_string(k));
    }
    auto graph = build_knn_graph(model.cloud, k);
    model.geo = geodesic_distances(graph);
    model.embedding = isomap_embed(model.geo, params.dim);
    model.gp = fit_hyperparams(model.embedding, default_grid(model.geo, params.grid));
    atlas.clusters.push_back(std::move(model));
  }

  atlas.global_dim = params.dim;
  if (ca.count == 1) {
    AffineMap identity;
    identity.linear = Matrix::Identity(params.dim, params.dim);
    identity.offset = Vector::Zero(params.dim);
    atlas.transforms.push_back(std::move(identity));
    return atlas;
  }

  SupportSet support = build_support_set(cloud, ca, params.support_near, params.support_far);
  if (support.clipped)
    atlas.warnings.push_back("batch_phase: support pairs clipped by small clusters");
  atlas.support_rows = support.rows;

  // Global frame: MDS of the support points under ambient Euclidean
  // distances, then one ridge-learned affine map per cluster.
  const Index m = static_cast<Index>(support.rows.size());
  Matrix sq(m, m);
  for (Index i = 0; i < m; ++i) {
    sq(i, i) = 0.0;
    for (Index j = i + 1; j < m; ++j) {
      double d2 = (cloud.points.row(support.rows[i]) - cloud.points.row(support.rows[j]))
                      .squaredNorm();
      sq(i, j) = d2;
      sq(j, i) = d2;
    }
  }
  Matrix global_embed = classical_mds(sq, params.dim);  // m x dim

  std::vector<Matrix> global_coords(ca.count), local_coords(ca.count);
  std::vector<std::vector<Index>> local_cols(ca.count);
  for (Index s = 0; s < m; ++s) {
    Index row = support.rows[s];
    int c = ca.labels[row];
    auto& rows = atlas.clusters[c].rows;
    Index local = std::distance(rows.begin(), std::find(rows.begin(), rows.end(), row));
    local_cols[c].push_back(local);
    Index at = global_coords[c].cols();
    global_coords[c].conservativeResize(params.dim, at + 1);
    global_coords[c].col(at) = global_embed.row(s).transpose();
  }
  for (int c = 0; c < ca.count; ++c) {
    local_coords[c].resize(params.dim, static_cast<Index>(local_cols[c].size()));
    for (std::size_t s = 0; s < local_cols[c].size(); ++s)
      local_coords[c].col(static_cast<Index>(s)) =
          atlas.clusters[c].embedding.coords.col(local_cols[c][s]);
    if (global_coords[c].size() == 0) global_coords[c].resize(params.dim, 0);
  }
  atlas.transforms = learn_transforms(global_coords, local_coords, params.ridge);
  return atlas;
}

}  // namespace gpi
