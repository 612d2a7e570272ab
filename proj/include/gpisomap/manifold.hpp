#pragma once

#include "gpisomap/geometry.hpp"
#include "gpisomap/gp.hpp"
#include "gpisomap/spectral.hpp"
#include "gpisomap/types.hpp"

#include <memory>
#include <string>
#include <vector>

namespace gpi {

struct ClusterAssignment {
  std::vector<int> labels;  // 0..count-1, every point labelled
  int count = 0;
};

// Pluggable batch clustering stage.
class Clusterer {
 public:
  virtual ~Clusterer() = default;
  virtual ClusterAssignment cluster(const PointCloud& cloud) const = 0;
};

// Density clustering (DBSCAN-flavoured): core points have at least min_pts
// neighbours within eps (self included); clusters grow from core points in
// index order, so labels are deterministic. Border/noise points are attached
// to the cluster of their nearest clustered point - the assignment must
// partition the batch. All-noise input is an error suggesting a larger eps.
class DensityClusterer : public Clusterer {
 public:
  explicit DensityClusterer(double eps, int min_pts = 5);
  ClusterAssignment cluster(const PointCloud& cloud) const override;

 private:
  double eps_;
  int min_pts_;
};

// Convenience wrapper with the default clusterer.
ClusterAssignment cluster_batch(const PointCloud& cloud, double eps);

// Affine map from cluster-local embedding coordinates into the shared
// global space: y = linear * x + offset.
struct AffineMap {
  Matrix linear;  // global_dim x local_dim
  Vector offset;  // global_dim

  Vector apply(const Eigen::Ref<const Vector>& x) const {
    return linear * x + offset;
  }
};

// Cross-cluster anchor points: for each unordered cluster pair, the
// near_pairs nearest and far_pairs farthest point pairs (by Euclidean
// distance, ties broken by indices). `clipped` reports pairs limited by
// small clusters.
struct SupportSet {
  std::vector<Index> rows;  // sorted unique batch rows
  bool clipped = false;
};

SupportSet build_support_set(const PointCloud& cloud, const ClusterAssignment& ca,
                             int near_pairs, int far_pairs);

// Ridge-regressed affine maps, one per cluster. For cluster j with support
// points at global coordinates G (dg x m) and local coordinates L (d_j x m),
// the homogeneous system A = [L; 1^T] gives
//   [linear | offset] = G A^T (A A^T + ridge I)^-1.
// Throws (naming the cluster) when m < d_j + 1.
std::vector<AffineMap> learn_transforms(const std::vector<Matrix>& global_coords,
                                        const std::vector<Matrix>& local_coords,
                                        double ridge);

struct BatchParams {
  double eps = 1.0;          // density clustering radius
  int min_pts = 5;
  int k_graph = 8;
  int dim = 2;               // target embedding dimension per cluster
  int support_near = 16;     // nearest cross pairs per cluster pair
  int support_far = 1;       // farthest cross pairs per cluster pair
  double ridge = 0.005;
  GpGridSpec grid{};
  int max_clusters = 16;     // warn (not fail) above this
};

// Everything the batch phase learned for one cluster.
struct ClusterModel {
  std::vector<Index> rows;  // batch rows in this cluster
  PointCloud cloud;
  GeodesicSet geo;
  Embedding embedding;
  GpModel gp;
};

struct ManifoldAtlas {
  PointCloud cloud;  // the full batch
  std::vector<ClusterModel> clusters;
  std::vector<AffineMap> transforms;  // one per cluster, into global space
  int global_dim = 0;
  std::vector<Index> support_rows;
  BatchParams params;
  std::vector<std::string> warnings;

  int cluster_count() const { return static_cast<int>(clusters.size()); }
};

// The batch phase: cluster, embed each cluster via geodesic spectral
// truncation, fit a GP per cluster on its own hyperparameter grid, then
// stitch cluster frames together through an MDS of the support points.
// With a single cluster the global frame is the cluster frame (identity
// transform). A custom clusterer overrides the density default.
ManifoldAtlas batch_phase(const PointCloud& cloud, const BatchParams& params,
                          const Clusterer* clusterer = nullptr);

}  // namespace gpi
