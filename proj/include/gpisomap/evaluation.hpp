#pragma once

#include "gpisomap/data.hpp"
#include "gpisomap/geometry.hpp"
#include "gpisomap/gp.hpp"
#include "gpisomap/spectral.hpp"
#include "gpisomap/types.hpp"

#include <utility>
#include <vector>

namespace gpi {

// Shape-comparison residual: minimises |s R b + t - a|_F over scale s,
// orthogonal R and translation t, normalised by the centred norm of a.
// Both inputs are d x m (one column per point, m >= 2). Throws when either
// configuration collapses to a single point.
double procrustes_error(const Matrix& a, const Matrix& b);

// Inputs of the sample-size bound
//   n0 = (1/sampling_rate) * log(ball_count / failure_prob)
//        / (unit_ball_volume * (delta/2)^dim) :
// a covering of the manifold by ball_count balls of radius delta/4 must
// each receive a sample, and delta itself may come from the graph rule
// delta = lambda2 * epsilon / 4.
struct ThresholdParams {
  double delta = 0.0;
  double ball_count = 0.0;
  double unit_ball_volume = 0.0;  // volume of the unit ball in `dim` dims
  int dim = 0;
  double sampling_rate = 1.0;  // points arriving per unit time
  double failure_prob = 1.0;   // target failure probability (mu)

  static ThresholdParams from_graph_rule(double lambda2, double epsilon,
                                         double ball_count, double unit_ball_volume,
                                         int dim, double sampling_rate = 1.0,
                                         double failure_prob = 1.0);
};

double theoretical_threshold(const ThresholdParams& p);

// Greedy covering estimate: picks the lowest-index uncovered point, covers
// everything within `radius`, repeats; returns the ball count.
Index estimate_ball_count(const Matrix& points, double radius);

// Spearman rank correlation (average ranks on ties).
double spearman(const std::vector<double>& xs, const std::vector<double>& ys);

// Agreement between the GP predictor and the landmark least-squares
// extension, as a function of the length scale. For each ell the GP mean is
// recomputed at (ell, noise_var) for every probe, and compared - via
// Procrustes - against the eigenvalue-scaled landmark form
// tau_i = sqrt(lambda_i) q_i . f, whose per-dimension scaling matches the
// GP's large-ell limit. The returned errors shrink as ell grows past the
// curvature of the kernel.
std::vector<double> equivalence_test(const Embedding& embedding,
                                     const GeodesicSet& geo, double noise_var,
                                     const std::vector<Vector>& stream_sq_geo,
                                     const std::vector<double>& ells);

// The identical pipeline - spectral embedding, likelihood grid search,
// low-rank GP, out-of-sample prediction - with straight-line ambient
// distances substituted for graph distances everywhere, so the kernel
// becomes exp(-|y_i - y_j|^2 / 2 ell^2) on raw coordinates. Ambient
// distances cannot unroll a curved sheet, so on curved data this error
// stays high no matter how dense the batch is. Returns the Procrustes
// error of the stream predictions against ground truth; `embedding`
// supplies the target dimension.
double euclidean_kernel_baseline(const PointCloud& batch, const Embedding& embedding,
                                 const PointCloud& stream, const Matrix& stream_truth,
                                 const GpGridSpec& grid = {});

// Batch-size sweep: for each n, draw a fresh sample from the generator
// (seed offset by the index), embed it, and compare to ground truth.
// k_graph = 0 requests a complete graph (graph distances then equal
// ambient distances exactly).
struct ConvergencePoint {
  Index n = 0;
  double error = 0.0;
};
std::vector<ConvergencePoint> convergence_curve(const SwissRollSpec& generator,
                                                const std::vector<Index>& sizes,
                                                int k_graph, int dim);

}  // namespace gpi
