#pragma once

#include "gpisomap/manifold.hpp"
#include "gpisomap/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace gpi {

// Landmark-style out-of-sample extension: solve X^T x = f in least squares
// for one new point, where f is built from the batch geodesics and the
// point's squared geodesics to the batch. Simple uses the per-row means
// only; Incremental also recentres by the grand mean and the new point's
// own mean (the two agree up to sampling noise).
enum class SIsomapVariant { Simple, Incremental };

Vector s_isomap_map(const Embedding& embedding, const GeodesicSet& geo,
                    const Eigen::Ref<const Vector>& sq_geodesics,
                    SIsomapVariant variant = SIsomapVariant::Simple);

// One stream point's outcome. Means/variances are recorded for every
// cluster; `chosen` is the argmin-variance cluster. Points whose variance
// exceeds the threshold stay unassigned (global_coords empty) until a
// relearn may revisit them (re-emitted with post_relearn set).
struct StreamVerdict {
  std::int64_t point_id = -1;
  Index stream_index = -1;
  std::vector<Vector> cluster_means;
  Vector cluster_vars;
  int chosen = -1;
  bool assigned = false;
  bool post_relearn = false;
  Vector global_coords;
  double variance = 0.0;
};

struct StreamEvent {
  std::string kind;  // "relearn" | "abort"
  Index stream_index = -1;
  Index buffer_size = 0;
  int clusters_before = 0;
  int clusters_after = 0;
  std::string message;
};

struct StreamResult {
  std::vector<StreamVerdict> verdicts;
  ManifoldAtlas atlas;  // final atlas (post-relearn if any fired)
  std::vector<StreamEvent> events;
  bool aborted = false;
  std::string abort_reason;
};

// Scores one point against every cluster of the atlas (read-only).
StreamVerdict score_point(const ManifoldAtlas& atlas,
                          const Eigen::Ref<const Vector>& point);

// Streaming phase. Points arrive in row order; each is scored against all
// clusters, assigned if its best variance is within sigma_t, otherwise
// buffered. The moment the buffer reaches relearn_threshold the batch is
// re-learned on batch + buffer, buffered points are re-scored against the
// new atlas (re-emitted with post_relearn), and streaming continues. A
// failing relearn aborts the stream but returns everything seen so far.
StreamResult process_stream(const ManifoldAtlas& atlas, const PointCloud& stream,
                            double sigma_t, Index relearn_threshold,
                            const Clusterer* clusterer = nullptr);

// Sliding-window mean of chosen-cluster variances in arrival order
// (window >= 1; shorter prefixes average what is available).
std::vector<double> variance_trace(const std::vector<StreamVerdict>& verdicts,
                                   Index window);

// Threshold calibration: the q-th percentile (nearest-rank) of
// chosen-cluster variances over a held-out in-distribution validation set.
double calibrate_sigma_t(const ManifoldAtlas& atlas, const PointCloud& validation,
                         double percentile);

}  // namespace gpi
