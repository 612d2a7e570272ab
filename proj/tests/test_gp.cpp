#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gpisomap/data.hpp"
#include "gpisomap/geometry.hpp"
#include "gpisomap/gp.hpp"
#include "gpisomap/spectral.hpp"
#include "support/oracles.hpp"

#include <cmath>
#include <random>

using namespace gpi;

namespace {

// Small single-patch batch plus a held-out probe, shared by several cases.
struct RollFixture {
  LabeledDataset data;
  GeodesicSet geo;
  Embedding emb;
  Vector probe_sq;  // squared stream geodesics of the held-out point

  RollFixture() {
    SwissRollSpec spec;
    ModeSpec mode;
    mode.mean = {12.0, 6.0};
    spec.modes.push_back(mode);
    spec.n_per_mode = 121;
    spec.seed = 77;
    data = gen_swiss_roll(spec);
    // Hold out the last row as the probe.
    std::vector<Index> keep(120);
    for (Index i = 0; i < 120; ++i) keep[i] = i;
    PointCloud batch = data.cloud.subset(keep);
    Vector held = data.cloud.points.row(120).transpose();
    geo = geodesic_distances(build_knn_graph(batch, 8));
    emb = isomap_embed(geo, 2);
    probe_sq = stream_geodesics(held, batch, geo, 8);
  }
};

Matrix shifted_kernel(const Embedding& e, double ell, double noise_var) {
  Matrix k = kernel_matrix(e, ell);
  return k + noise_var * Matrix::Identity(k.rows(), k.rows());
}

}  // namespace

TEST_CASE("zero-dimensional embedding degenerates the kernel to the identity") {
  auto emb = Embedding::empty(9);
  Matrix k = kernel_matrix(emb, 2.0);
  CHECK((k - Matrix::Identity(9, 9)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("kernel flattens to the identity as the length scale grows") {
  std::mt19937_64 rng(7);
  auto emb = oracle::synthetic_embedding(rng, 25, 3, 2.0);
  Matrix k = kernel_matrix(emb, 1e8);
  CHECK((k - Matrix::Identity(25, 25)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("kernel equals the series matrix exponential of the gram matrix") {
  std::mt19937_64 rng(9);
  SUBCASE("rank one") {
    auto emb = oracle::synthetic_embedding(rng, 10, 1, 1.5);
    Matrix gram = emb.eigenvectors * emb.eigenvalues.asDiagonal() *
                  emb.eigenvectors.transpose();
    for (double ell : {0.7, 1.3, 3.0}) {
      Matrix want = oracle::expm(-gram / (2.0 * ell * ell));
      Matrix got = kernel_matrix(emb, ell);
      CHECK((got - want).cwiseAbs().maxCoeff() < 1e-10);
    }
  }
  SUBCASE("general low rank") {
    for (int trial = 0; trial < 8; ++trial) {
      auto emb = oracle::synthetic_embedding(rng, 14, 3, 2.0);
      Matrix gram = emb.eigenvectors * emb.eigenvalues.asDiagonal() *
                    emb.eigenvectors.transpose();
      Matrix want = oracle::expm(-gram / (2.0 * 1.1 * 1.1));
      Matrix got = kernel_matrix(emb, 1.1);
      CHECK((got - want).cwiseAbs().maxCoeff() < 1e-10);
    }
  }
}

TEST_CASE("kernel matrix stays positive definite across random instances") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> log_ell(-2.0, 3.0);
  std::uniform_int_distribution<int> dims(1, 5);
  for (int trial = 0; trial < 1000; ++trial) {
    auto emb = oracle::synthetic_embedding(rng, 20, dims(rng), 4.0);
    double ell = std::pow(10.0, log_ell(rng));
    Matrix k = kernel_matrix(emb, ell);
    // Exact eigenvalues are exp(-lambda_i / 2 ell^2) and 1; at tiny length
    // scales the former underflow, so the matrix can only be certified
    // semidefinite. Where the smallest eigenvalue is representable, a
    // Cholesky factorisation must go through.
    double eig_floor = std::exp(-emb.eigenvalues[0] / (2.0 * ell * ell));
    if (eig_floor > 1e-10) {
      Eigen::LLT<Matrix> llt(k);
      CHECK(llt.info() == Eigen::Success);
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(k, Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues().minCoeff() >= -1e-12);
  }
}

TEST_CASE("closed-form inverse and weights match dense linear algebra") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    auto emb = oracle::synthetic_embedding(rng, 18, 3, 3.0);
    double ell = 0.8 + 0.2 * trial;
    double noise = (trial % 2 == 0) ? 0.1 : 0.004;

    Matrix shifted = shifted_kernel(emb, ell, noise);
    Eigen::FullPivLU<Matrix> lu(shifted);

    Matrix inv_got = lowrank_inverse(emb, noise, ell);
    Matrix inv_want = lu.inverse();
    CHECK((inv_got - inv_want).cwiseAbs().maxCoeff() < 1e-8);

    Matrix w_got = lowrank_solve(emb, noise, ell);
    Matrix w_want = lu.solve(emb.coords.transpose());
    CHECK((w_got - w_want).cwiseAbs().maxCoeff() < 1e-8);

    // The weights satisfy the defining linear system, i.e. the model
    // interpolates its own training targets through the kernel.
    CHECK((shifted * w_got - emb.coords.transpose()).cwiseAbs().maxCoeff() <
          1e-8);
  }
}

TEST_CASE("noiseless weights reproduce the coordinates through the kernel") {
  std::mt19937_64 rng(19);
  auto emb = oracle::synthetic_embedding(rng, 16, 2, 2.0);
  GpModel model = make_gp(emb, 1.2, 0.0);
  Matrix k = kernel_matrix(emb, 1.2);
  CHECK((k * model.weights - emb.coords.transpose()).cwiseAbs().maxCoeff() <
        1e-9);
}

TEST_CASE("closed-form log-likelihood matches the dense Cholesky route") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 15; ++trial) {
    auto emb = oracle::synthetic_embedding(rng, 22, 3, 2.5);
    double ell = 0.5 + 0.3 * trial;
    double noise = 0.002 + 0.05 * (trial % 4);
    double got = marginal_log_likelihood(emb, ell, noise);
    double want = oracle::dense_log_likelihood(kernel_matrix(emb, ell), noise,
                                               emb.coords.transpose());
    CHECK(got == doctest::Approx(want).epsilon(1e-8));
  }
}

TEST_CASE("prediction agrees with a dense solve on a real batch") {
  RollFixture fix;
  for (double ell : {2.0, 8.0, 30.0}) {
    double noise = 0.05;
    GpModel model = make_gp(fix.emb, ell, noise);
    GpPrediction got = gp_predict(model, fix.probe_sq);

    Vector kstar = (-fix.probe_sq.array() / (2.0 * ell * ell)).exp();
    auto want = oracle::dense_gp(kernel_matrix(fix.emb, ell), noise,
                                 fix.emb.coords.transpose(), kstar, 1.0);
    CHECK((got.mean - want.mean).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(got.variance == doctest::Approx(want.variance).epsilon(1e-8));
  }
}

TEST_CASE("distant probes revert to the prior mean and variance") {
  RollFixture fix;
  GpModel model = make_gp(fix.emb, 5.0, 0.3);
  Vector far = Vector::Constant(120, 1e16);
  GpPrediction pred = gp_predict(model, far);
  // The probe weights underflow to ~1e-308 (the vectorised exp clamps its
  // argument rather than flushing to zero), so "prior" here means within
  // hundreds of orders of magnitude of it.
  CHECK(pred.mean.cwiseAbs().maxCoeff() < 1e-290);
  CHECK(pred.variance == doctest::Approx(1.3).epsilon(1e-12));
}

TEST_CASE("variance grows monotonically as a probe recedes") {
  // Uniform probes k* = exp(-s / 2 ell^2) * ones are orthogonal to every
  // eigenvector of the centred gram matrix, so the exact variance is
  // 1 + noise - a * n * exp(-s / ell^2): strictly increasing in s once the
  // clamp at the noise floor releases.
  RollFixture fix;
  GpModel model = make_gp(fix.emb, 5.0, 0.01);
  double prev = -1.0;
  for (double s = 0.0; s < 8000.0; s += 250.0) {
    GpPrediction pred = gp_predict(model, Vector::Constant(120, s));
    CHECK(pred.variance >= prev - 1e-12);
    prev = pred.variance;
  }
  // The limit is the prior variance plus noise.
  CHECK(prev == doctest::Approx(1.01).epsilon(1e-9));
}

TEST_CASE("variance is bounded by noise floor and prior ceiling") {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> log_ell(-1.0, 2.0);
  for (int trial = 0; trial < 1000; ++trial) {
    auto emb = oracle::synthetic_embedding(rng, 15, 2, 3.0);
    double noise = 0.001 + unit(rng);
    GpModel model = make_gp(emb, std::pow(10.0, log_ell(rng)), noise);
    Vector sq(15);
    for (Index i = 0; i < 15; ++i) sq[i] = 40.0 * unit(rng);
    GpPrediction pred = gp_predict(model, sq);
    CHECK(pred.variance >= noise - 1e-12);
    CHECK(pred.variance <= 1.0 + noise + 1e-12);
  }
}

TEST_CASE("negative model variance is clamped and counted") {
  RollFixture fix;
  GpModel model = make_gp(fix.emb, 1e7, 0.02);  // huge ell: probe of ones
  CHECK(model.clamp_count->load() == 0);
  // Near-zero squared geodesics push the quadratic form past the prior.
  Vector sq = Vector::Zero(120);
  GpPrediction pred = gp_predict(model, sq);
  CHECK(pred.variance == doctest::Approx(0.02).epsilon(1e-12));
  CHECK(model.clamp_count->load() == 1);

  // The counter is shared across copies of the model.
  GpModel copy = model;
  (void)gp_predict(copy, sq);
  CHECK(model.clamp_count->load() == 2);
}

TEST_CASE("elementwise kernel reading is symmetric and entrywise exact") {
  RollFixture fix;
  Matrix k = elementwise_kernel(fix.geo.gram, 3.0);
  CHECK((k - k.transpose()).cwiseAbs().maxCoeff() < 1e-15);
  for (Index i = 0; i < k.rows(); ++i)
    for (Index j = 0; j < k.cols(); ++j)
      CHECK(k(i, j) ==
            doctest::Approx(std::exp(-fix.geo.gram(i, j) / 18.0)).epsilon(1e-12));
  // It is a genuinely different object from the shared-eigenvector kernel.
  CHECK((k - kernel_matrix(fix.emb, 3.0)).cwiseAbs().maxCoeff() > 1e-3);
}

TEST_CASE("median geodesic and grid layout") {
  Matrix pts(3, 1);
  pts << 0.0, 1.0, 2.0;
  auto geo = geodesic_distances(build_knn_graph(PointCloud::from_points(pts), 1));
  // Off-diagonal distances {1, 1, 2}: median 1.
  CHECK(median_geodesic(geo) == doctest::Approx(1.0).epsilon(1e-12));

  auto grid = default_grid(geo);
  CHECK(grid.size() == 16 * 8);
  double lo = 1e300, hi = -1e300;
  for (auto [ell, noise] : grid) {
    lo = std::min(lo, ell);
    hi = std::max(hi, ell);
    CHECK(noise >= 1e-4 - 1e-12);
    CHECK(noise <= 1.0 + 1e-12);
  }
  CHECK(lo == doctest::Approx(0.1).epsilon(1e-9));
  CHECK(hi == doctest::Approx(100.0).epsilon(1e-9));
}

TEST_CASE("grid search tracks the dense likelihood argmax") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 12; ++trial) {
    auto emb = oracle::synthetic_embedding(rng, 20, 2, 2.0);
    std::vector<std::pair<double, double>> grid;
    std::uniform_real_distribution<double> le(-0.5, 1.5), ln(-3.0, -0.3);
    for (int g = 0; g < 6; ++g)
      grid.emplace_back(std::pow(10.0, le(rng)), std::pow(10.0, ln(rng)));

    GpModel model = fit_hyperparams(emb, grid);

    double best = -1e300;
    for (auto [ell, noise] : grid)
      best = std::max(best, oracle::dense_log_likelihood(
                                kernel_matrix(emb, ell), noise,
                                emb.coords.transpose()));
    double chosen = oracle::dense_log_likelihood(
        kernel_matrix(emb, model.ell), model.noise_var, emb.coords.transpose());
    CHECK(chosen >= best - 1e-6 * std::abs(best));
  }
}

TEST_CASE("likelihood ties resolve to larger length scale then smaller noise") {
  // A zero-dimensional embedding scores every candidate identically.
  auto emb = Embedding::empty(10);
  std::vector<std::pair<double, double>> grid = {
      {1.0, 0.5}, {4.0, 0.9}, {4.0, 0.2}, {2.0, 0.1}};
  GpModel model = fit_hyperparams(emb, grid);
  CHECK(model.ell == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(model.noise_var == doctest::Approx(0.2).epsilon(1e-15));
}

TEST_CASE("model construction validates its arguments") {
  std::mt19937_64 rng(37);
  auto emb = oracle::synthetic_embedding(rng, 10, 2, 1.0);
  CHECK_THROWS_AS(make_gp(emb, 0.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(make_gp(emb, -1.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(make_gp(emb, 1.0, -0.1), std::invalid_argument);

  GpModel model = make_gp(emb, 1.0, 0.1);
  Vector wrong(9);
  wrong.setZero();
  CHECK_THROWS_AS(gp_predict(model, wrong), std::invalid_argument);
  Vector negative = Vector::Constant(10, -1.0);
  CHECK_THROWS_AS(gp_predict(model, negative), std::invalid_argument);
}

TEST_CASE("fitted hyperparameters are reproducible") {
  RollFixture fix;
  auto grid = default_grid(fix.geo);
  GpModel a = fit_hyperparams(fix.emb, grid);
  GpModel b = fit_hyperparams(fix.emb, grid);
  CHECK(a.ell == b.ell);
  CHECK(a.noise_var == b.noise_var);
  CHECK((a.weights - b.weights).cwiseAbs().maxCoeff() == 0.0);
}
