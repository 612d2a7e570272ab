#pragma once

#include "gpisomap/types.hpp"

#include <utility>
#include <vector>

namespace gpi {

// Symmetric k-nearest-neighbour graph over a point cloud. Edges carry
// Euclidean weights; adjacency lists are sorted by neighbour index.
struct NeighborhoodGraph {
  std::vector<std::vector<std::pair<Index, double>>> adjacency;
  int k_graph = 0;
  // Row of the originating cloud behind each vertex. Identity unless the
  // graph was restricted to its largest connected component.
  std::vector<Index> vertex_rows;

  Index size() const { return static_cast<Index>(adjacency.size()); }
};

// All-pairs shortest-path distances over a neighbourhood graph, together
// with the derived matrices every later stage consumes: elementwise squares
// and the double-centred Gram matrix -H * sq_dist * H / 2.
struct GeodesicSet {
  Matrix dist;
  Matrix sq_dist;
  Matrix gram;

  Index size() const { return dist.rows(); }
};

enum class Disconnected {
  Error,             // refuse to build a disconnected graph
  LargestComponent,  // keep the largest component, drop the rest
};

// Builds the symmetric kNN graph (union rule: an edge exists if either
// endpoint selects the other). Distance ties are broken by lower point
// index. Throws if k_graph is out of range, if two points coincide (zero
// edge weights would break the metric downstream), or - under the Error
// policy - if the graph is disconnected.
NeighborhoodGraph build_knn_graph(const PointCloud& cloud, int k_graph,
                                  Disconnected policy = Disconnected::Error);

// Dijkstra from every source. Each unordered pair is computed once and
// mirrored, so dist is exactly symmetric. Throws if any pair is unreachable.
GeodesicSet geodesic_distances(const NeighborhoodGraph& graph);

// Squared graph distances from one out-of-batch point to every batch point:
// the point is linked to its k_graph nearest batch neighbours j and
// d(i) = min_j (|point - y_j| + dist(i, j)). Equivalent to inserting the
// point into the graph and running one more Dijkstra. cloud/geo must be the
// pair the graph was built from.
Vector stream_geodesics(const Eigen::Ref<const Vector>& point,
                        const PointCloud& cloud, const GeodesicSet& geo,
                        int k_graph);

// -H * M * H / 2 with H = I - ones/n; row and column sums of the result
// vanish up to rounding.
Matrix double_center(const Matrix& sq_dists);

// Connected components as a label per vertex (labels ordered by first
// occurrence). Exposed for tests and diagnostics.
std::vector<int> graph_components(const NeighborhoodGraph& graph);

}  // namespace gpi
