#include "gpisomap/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>

namespace gpi {

namespace {

// Indices of the k nearest rows of cloud to `point`, excluding `self`
// (pass -1 to keep all rows). Ties broken by lower index.
std::vector<Index> nearest_rows(const Eigen::Ref<const Vector>& point,
                                const PointCloud& cloud, int k, Index self) {
  const Index n = cloud.size();
  std::vector<std::pair<double, Index>> order;
  order.reserve(n);
  for (Index j = 0; j < n; ++j) {
    if (j == self) continue;
    order.emplace_back((cloud.points.row(j).transpose() - point).norm(), j);
  }
  auto cmp = [](const auto& a, const auto& b) {
    return a.first < b.first || (a.first == b.first && a.second < b.second);
  };
  std::size_t kk = std::min<std::size_t>(k, order.size());
  std::partial_sort(order.begin(), order.begin() + kk, order.end(), cmp);
  std::vector<Index> out;
  out.reserve(kk);
  for (std::size_t r = 0; r < kk; ++r) out.push_back(order[r].second);
  return out;
}

}  // namespace

std::vector<int> graph_components(const NeighborhoodGraph& graph) {
  const Index n = graph.size();
  std::vector<int> label(n, -1);
  int next = 0;
  std::vector<Index> stack;
  for (Index s = 0; s < n; ++s) {
    if (label[s] != -1) continue;
    label[s] = next;
    stack.push_back(s);
    while (!stack.empty()) {
      Index v = stack.back();
      stack.pop_back();
      for (const auto& [w, _] : graph.adjacency[v])
        if (label[w] == -1) {
          label[w] = next;
          stack.push_back(w);
        }
    }
    ++next;
  }
  return label;
}

NeighborhoodGraph build_knn_graph(const PointCloud& cloud, int k_graph,
                                  Disconnected policy) {
  cloud.validate();
  const Index n = cloud.size();
  if (k_graph < 1 || k_graph >= n)
    throw std::invalid_argument("build_knn_graph: need 1 <= k_graph < n, got k_graph=" +
                                std::to_string(k_graph) + ", n=" + std::to_string(n));

  // Directed kNN selection, then union-symmetrised.
  std::vector<std::vector<std::pair<Index, double>>> adj(n);
  for (Index i = 0; i < n; ++i) {
    for (Index j : nearest_rows(cloud.points.row(i).transpose(), cloud, k_graph, i)) {
      double w = (cloud.points.row(i) - cloud.points.row(j)).norm();
      if (w <= 0.0)
        throw std::invalid_argument(
            "build_knn_graph: coincident points " + std::to_string(i) + " and " +
            std::to_string(j) + " give a zero-weight edge");
      adj[i].emplace_back(j, w);
      adj[j].emplace_back(i, w);
    }
  }
  for (auto& nbrs : adj) {
    std::sort(nbrs.begin(), nbrs.end());
    nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
  }

  NeighborhoodGraph graph;
  graph.adjacency = std::move(adj);
  graph.k_graph = k_graph;
  graph.vertex_rows.resize(n);
  std::iota(graph.vertex_rows.begin(), graph.vertex_rows.end(), Index{0});

  auto comp = graph_components(graph);
  int ncomp = *std::max_element(comp.begin(), comp.end()) + 1;
  if (ncomp == 1) return graph;

  if (policy == Disconnected::Error)
    throw std::runtime_error(
        "build_knn_graph: graph has " + std::to_string(ncomp) +
        " components; raise k_graph or opt into the largest component");

  // Keep the largest component (lowest label on a tie) and renumber.
  std::vector<Index> count(ncomp, 0);
  for (int c : comp) ++count[c];
  int keep = static_cast<int>(std::max_element(count.begin(), count.end()) - count.begin());
  std::vector<Index> newid(n, -1);
  NeighborhoodGraph sub;
  sub.k_graph = k_graph;
  for (Index i = 0; i < n; ++i)
    if (comp[i] == keep) {
      newid[i] = static_cast<Index>(sub.vertex_rows.size());
      sub.vertex_rows.push_back(i);
    }
  sub.adjacency.resize(sub.vertex_rows.size());
  for (Index i = 0; i < n; ++i) {
    if (newid[i] < 0) continue;
    for (const auto& [j, w] : graph.adjacency[i])
      sub.adjacency[newid[i]].emplace_back(newid[j], w);
  }
  return sub;
}

namespace {

// Single-source Dijkstra over the adjacency lists; fills `out` with
// distances from `source`.
void dijkstra(const NeighborhoodGraph& graph, Index source, Vector& out) {
  const Index n = graph.size();
  constexpr double kInf = std::numeric_limits<double>::infinity();
  out.setConstant(n, kInf);
  out[source] = 0.0;
  using Entry = std::pair<double, Index>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
  heap.emplace(0.0, source);
  while (!heap.empty()) {
    auto [d, v] = heap.top();
    heap.pop();
    if (d > out[v]) continue;
    for (const auto& [w, len] : graph.adjacency[v]) {
      double nd = d + len;
      if (nd < out[w]) {
        out[w] = nd;
        heap.emplace(nd, w);
      }
    }
  }
}

}  // namespace

GeodesicSet geodesic_distances(const NeighborhoodGraph& graph) {
  const Index n = graph.size();
  if (n < 2) throw std::invalid_argument("geodesic_distances: need at least 2 vertices");

  GeodesicSet geo;
  geo.dist.resize(n, n);
  Vector row(n);
  for (Index s = 0; s < n; ++s) {
    dijkstra(graph, s, row);
    geo.dist.row(s) = row.transpose();
  }
  if (!geo.dist.allFinite())
    throw std::runtime_error("geodesic_distances: graph is not connected");

  // One computation per unordered pair: mirror the upper triangle so the
  // matrix is symmetric to the last bit.
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) geo.dist(j, i) = geo.dist(i, j);

  geo.sq_dist = geo.dist.array().square();
  geo.gram = double_center(geo.sq_dist);
  return geo;
}

Matrix double_center(const Matrix& sq_dists) {
  const Index n = sq_dists.rows();
  if (n != sq_dists.cols() || n < 1)
    throw std::invalid_argument("double_center: matrix must be square");
  Vector row_mean = sq_dists.rowwise().mean();
  Vector col_mean = sq_dists.colwise().mean();
  double grand = row_mean.mean();
  Matrix out(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      out(i, j) = -0.5 * (sq_dists(i, j) - row_mean[i] - col_mean[j] + grand);
  return out;
}

Vector stream_geodesics(const Eigen::Ref<const Vector>& point,
                        const PointCloud& cloud, const GeodesicSet& geo,
                        int k_graph) {
  const Index n = cloud.size();
  if (geo.size() != n)
    throw std::invalid_argument("stream_geodesics: cloud/geodesic size mismatch");
  if (point.size() != cloud.dim())
    throw std::invalid_argument("stream_geodesics: point dimension mismatch");
  if (k_graph < 1 || k_graph > n)
    throw std::invalid_argument("stream_geodesics: k_graph out of range");

  auto hops = nearest_rows(point, cloud, k_graph, -1);

  // A point coinciding with a batch row inherits that row verbatim; the
  // summation-order noise of re-deriving it through the hop rule would
  // otherwise cost the last bit or two.
  for (Index j : hops)
    if (point == cloud.points.row(j).transpose()) return geo.sq_dist.row(j).transpose();

  Vector out(n);
  for (Index i = 0; i < n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (Index j : hops) {
      double d = (cloud.points.row(j).transpose() - point).norm() + geo.dist(i, j);
      best = std::min(best, d);
    }
    out[i] = best * best;
  }
  return out;
}

}  // namespace gpi
