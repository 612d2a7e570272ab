#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gpisomap/data.hpp"
#include "gpisomap/geometry.hpp"
#include "support/oracles.hpp"

#include <algorithm>
#include <random>

using namespace gpi;

namespace {

PointCloud collinear(std::initializer_list<double> xs) {
  Matrix pts(static_cast<Index>(xs.size()), 1);
  Index i = 0;
  for (double x : xs) pts(i++, 0) = x;
  return PointCloud::from_points(std::move(pts));
}

PointCloud random_cloud(std::mt19937_64& rng, Index n, Index d, double spread = 1.0) {
  std::normal_distribution<double> gauss(0.0, spread);
  Matrix pts(n, d);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < d; ++j) pts(i, j) = gauss(rng);
  return PointCloud::from_points(std::move(pts));
}

bool has_edge(const NeighborhoodGraph& g, Index a, Index b) {
  for (const auto& [w, _] : g.adjacency[a])
    if (w == b) return true;
  return false;
}

}  // namespace

TEST_CASE("knn graph on three collinear points with k=1") {
  auto cloud = collinear({0.0, 1.0, 2.0});
  auto graph = build_knn_graph(cloud, 1);
  CHECK(graph.size() == 3);
  CHECK(has_edge(graph, 0, 1));
  CHECK(has_edge(graph, 1, 2));
  CHECK(!has_edge(graph, 0, 2));
  // Union symmetrisation: 1 only picked one neighbour but keeps both edges.
  CHECK(graph.adjacency[1].size() == 2);
}

TEST_CASE("knn graph on the unit square with k=2 has no diagonals") {
  Matrix pts(4, 2);
  pts << 0, 0, 1, 0, 1, 1, 0, 1;
  auto graph = build_knn_graph(PointCloud::from_points(pts), 2);
  CHECK(has_edge(graph, 0, 1));
  CHECK(has_edge(graph, 1, 2));
  CHECK(has_edge(graph, 2, 3));
  CHECK(has_edge(graph, 3, 0));
  CHECK(!has_edge(graph, 0, 2));
  CHECK(!has_edge(graph, 1, 3));
}

TEST_CASE("every vertex keeps degree >= k_graph after symmetrisation") {
  std::mt19937_64 rng(11);
  auto cloud = random_cloud(rng, 60, 3);
  auto graph = build_knn_graph(cloud, 5);
  for (Index v = 0; v < graph.size(); ++v)
    CHECK(graph.adjacency[v].size() >= 5);
}

TEST_CASE("knn graph rejects bad inputs") {
  auto cloud = collinear({0.0, 1.0, 2.0});
  CHECK_THROWS_AS(build_knn_graph(cloud, 0), std::invalid_argument);
  CHECK_THROWS_AS(build_knn_graph(cloud, 3), std::invalid_argument);

  Matrix dup(3, 1);
  dup << 0.0, 0.0, 1.0;
  CHECK_THROWS_AS(build_knn_graph(PointCloud::from_points(dup), 1),
                  std::invalid_argument);
}

TEST_CASE("disconnected graph: error by default, largest component on request") {
  std::mt19937_64 rng(5);
  auto big = random_cloud(rng, 30, 2);
  auto small = random_cloud(rng, 8, 2);
  Matrix pts(38, 2);
  pts.topRows(30) = big.points;
  pts.bottomRows(8) = small.points.array() + 100.0;  // far-away islet
  auto cloud = PointCloud::from_points(pts);

  CHECK_THROWS_AS(build_knn_graph(cloud, 3), std::runtime_error);

  auto graph = build_knn_graph(cloud, 3, Disconnected::LargestComponent);
  CHECK(graph.size() == 30);
  for (Index row : graph.vertex_rows) CHECK(row < 30);
  auto labels = graph_components(graph);
  CHECK(*std::max_element(labels.begin(), labels.end()) == 0);

  // The restriction still yields usable geodesics.
  auto geo = geodesic_distances(graph);
  CHECK(geo.size() == 30);
}

TEST_CASE("component labels agree with a union-find oracle") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    auto cloud = random_cloud(rng, 40, 2, 0.3);
    NeighborhoodGraph graph;
    // Thin random graph (not necessarily connected) built by hand.
    graph.adjacency.resize(40);
    graph.k_graph = 1;
    graph.vertex_rows.resize(40);
    std::uniform_int_distribution<Index> pick(0, 39);
    oracle::UnionFind uf(40);
    for (int e = 0; e < 30; ++e) {
      Index a = pick(rng), b = pick(rng);
      if (a == b) continue;
      double w = (cloud.points.row(a) - cloud.points.row(b)).norm();
      graph.adjacency[a].emplace_back(b, w);
      graph.adjacency[b].emplace_back(a, w);
      uf.unite(a, b);
    }
    auto labels = graph_components(graph);
    Index found = *std::max_element(labels.begin(), labels.end()) + 1;
    CHECK(found == uf.components());
  }
}

TEST_CASE("swiss roll batch at n=2000, k=8 yields a connected graph") {
  SwissRollSpec spec;
  ModeSpec mode;
  mode.mean = {12.0, 6.0};
  spec.modes.push_back(mode);
  spec.n_per_mode = 2000;
  spec.seed = 3;
  auto data = gen_swiss_roll(spec);
  auto graph = build_knn_graph(data.cloud, 8);
  CHECK(graph.size() == 2000);
  auto labels = graph_components(graph);
  CHECK(*std::max_element(labels.begin(), labels.end()) == 0);
  for (Index v = 0; v < graph.size(); ++v)
    CHECK(graph.adjacency[v].size() >= 8);
}

TEST_CASE("geodesics on a path graph accumulate edge lengths") {
  auto cloud = collinear({0.0, 1.0, 2.0, 3.0});
  auto geo = geodesic_distances(build_knn_graph(cloud, 1));
  CHECK(geo.dist(0, 2) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(geo.dist(0, 3) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(geo.sq_dist(0, 3) == doctest::Approx(9.0).epsilon(1e-12));
}

TEST_CASE("geodesic matrices are exactly symmetric with zero diagonal") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 25; ++trial) {
    auto cloud = random_cloud(rng, 35, 3);
    auto geo = geodesic_distances(build_knn_graph(cloud, 4));
    CHECK((geo.dist - geo.dist.transpose()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(geo.dist.diagonal().cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("geodesics satisfy the triangle inequality and dominate Euclidean") {
  std::mt19937_64 rng(29);
  auto cloud = random_cloud(rng, 50, 3);
  auto geo = geodesic_distances(build_knn_graph(cloud, 5));
  std::uniform_int_distribution<Index> pick(0, 49);
  for (int s = 0; s < 3000; ++s) {
    Index i = pick(rng), j = pick(rng), k = pick(rng);
    CHECK(geo.dist(i, j) <= geo.dist(i, k) + geo.dist(k, j) + 1e-9);
  }
  for (Index i = 0; i < 50; ++i)
    for (Index j = 0; j < 50; ++j)
      CHECK(geo.dist(i, j) + 1e-12 >=
            (cloud.points.row(i) - cloud.points.row(j)).norm());
}

TEST_CASE("per-source distances match the heap-free oracle") {
  std::mt19937_64 rng(31);
  auto cloud = random_cloud(rng, 45, 2);
  auto graph = build_knn_graph(cloud, 4);
  auto geo = geodesic_distances(graph);
  for (Index s = 0; s < 45; s += 7) {
    Vector ref = oracle::dijkstra(graph, s);
    // Mirroring may have replaced the lower triangle; compare against both
    // orientations' max deviation.
    CHECK((geo.dist.row(s).transpose() - ref).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("double centering zeroes row sums and is idempotent") {
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 10; ++trial) {
    auto cloud = random_cloud(rng, 30, 3);
    auto geo = geodesic_distances(build_knn_graph(cloud, 4));
    const Matrix& b = geo.gram;
    for (Index i = 0; i < b.rows(); ++i) {
      double scale = b.row(i).cwiseAbs().sum() + 1e-30;
      CHECK(std::abs(b.row(i).sum()) / scale < 1e-9);
    }
    Index n = b.rows();
    Matrix h = Matrix::Identity(n, n) - Matrix::Constant(n, n, 1.0 / n);
    CHECK((h * b * h - b).cwiseAbs().maxCoeff() < 1e-12 * b.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("line embedded in 3-D: gram matrix equals centred outer product") {
  Matrix pts(5, 3);
  Vector xs(5);
  xs << -2.0, -0.5, 0.3, 1.1, 2.4;
  Eigen::Vector3d dir(1.0, 0.0, 0.0);  // unit direction keeps arc length = |dx|
  for (Index i = 0; i < 5; ++i) pts.row(i) = (xs[i] * dir).transpose();
  auto geo = geodesic_distances(build_knn_graph(PointCloud::from_points(pts), 2));

  Vector centred = xs.array() - xs.mean();
  Matrix expected = centred * centred.transpose();
  CHECK((geo.gram - expected).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("stream point coinciding with a batch point reproduces its row") {
  std::mt19937_64 rng(41);
  auto cloud = random_cloud(rng, 40, 3);
  auto geo = geodesic_distances(build_knn_graph(cloud, 5));
  Vector probe = cloud.points.row(0).transpose();
  Vector sq = stream_geodesics(probe, cloud, geo, 5);
  CHECK((sq - geo.sq_dist.row(0).transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("stream geodesics on a path graph hop through the nearest end") {
  auto cloud = collinear({0.0, 1.0, 2.0});
  auto geo = geodesic_distances(build_knn_graph(cloud, 1));
  Vector probe(1);
  probe << 3.0;
  Vector sq = stream_geodesics(probe, cloud, geo, 1);
  CHECK(sq[0] == doctest::Approx(9.0).epsilon(1e-12));
  CHECK(sq[1] == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(sq[2] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("stream geodesics equal the graph-insertion oracle") {
  std::mt19937_64 rng(43);
  auto cloud = random_cloud(rng, 60, 3);
  auto graph = build_knn_graph(cloud, 6);
  auto geo = geodesic_distances(graph);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int trial = 0; trial < 25; ++trial) {
    Vector probe(3);
    for (int j = 0; j < 3; ++j) probe[j] = gauss(rng);
    Vector got = stream_geodesics(probe, cloud, geo, 6);
    Vector want = oracle::inserted_point_sq_geodesics(probe, cloud, graph, 6);
    CHECK((got - want).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("stream geodesics validate their inputs") {
  std::mt19937_64 rng(47);
  auto cloud = random_cloud(rng, 20, 3);
  auto geo = geodesic_distances(build_knn_graph(cloud, 3));
  Vector bad(2);
  bad << 0.0, 0.0;
  CHECK_THROWS_AS(stream_geodesics(bad, cloud, geo, 3), std::invalid_argument);
  Vector ok(3);
  ok.setZero();
  CHECK_THROWS_AS(stream_geodesics(ok, cloud, geo, 0), std::invalid_argument);
  CHECK_THROWS_AS(stream_geodesics(ok, cloud, geo, 21), std::invalid_argument);
}
