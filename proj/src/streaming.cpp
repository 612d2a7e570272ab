#include "gpisomap/streaming.hpp"

#include <algorithm>
#include <cmath>

namespace gpi {

Vector s_isomap_map(const Embedding& e, const GeodesicSet& geo,
                    const Eigen::Ref<const Vector>& sq_geodesics,
                    SIsomapVariant variant) {
  const Index n = e.size();
  if (geo.size() != n || sq_geodesics.size() != n)
    throw std::invalid_argument("s_isomap_map: size mismatch");

  Vector row_mean = geo.sq_dist.rowwise().mean();
  Vector f(n);
  if (variant == SIsomapVariant::Simple) {
    f = 0.5 * (row_mean - sq_geodesics);
  } else {
    double grand = row_mean.mean();
    double probe_mean = sq_geodesics.mean();
    f = 0.5 * (row_mean.array() - grand) + 0.5 * (probe_mean - sq_geodesics.array());
  }

  // Least squares for X^T x = f with X^T's columns sqrt(lambda_i) q_i:
  // x_i = q_i . f / sqrt(lambda_i).
  Vector x(e.dim);
  for (int i = 0; i < e.dim; ++i)
    x[i] = e.eigenvectors.col(i).dot(f) / std::sqrt(e.eigenvalues[i]);
  return x;
}

StreamVerdict score_point(const ManifoldAtlas& atlas,
                          const Eigen::Ref<const Vector>& point) {
  const int p = atlas.cluster_count();
  if (p < 1) throw std::invalid_argument("score_point: atlas has no clusters");

  StreamVerdict v;
  v.cluster_means.reserve(p);
  v.cluster_vars.resize(p);
  for (int c = 0; c < p; ++c) {
    const ClusterModel& model = atlas.clusters[c];
    int k = std::min<int>(atlas.params.k_graph, static_cast<int>(model.cloud.size()));
    Vector sq_geo = stream_geodesics(point, model.cloud, model.geo, k);
    GpPrediction pred = gp_predict(model.gp, sq_geo);
    v.cluster_means.push_back(std::move(pred.mean));
    v.cluster_vars[c] = pred.variance;
  }

  // Lowest |variance| wins; ties go to the lower cluster index.
  v.chosen = 0;
  for (int c = 1; c < p; ++c)
    if (std::abs(v.cluster_vars[c]) < std::abs(v.cluster_vars[v.chosen])) v.chosen = c;
  v.variance = v.cluster_vars[v.chosen];
  return v;
}

namespace {

void finalize_assignment(StreamVerdict& v, const ManifoldAtlas& atlas, double sigma_t) {
  if (v.variance <= sigma_t) {
    v.assigned = true;
    v.global_coords = atlas.transforms[v.chosen].apply(v.cluster_means[v.chosen]);
  }
}

}  // namespace

StreamResult process_stream(const ManifoldAtlas& atlas, const PointCloud& stream,
                            double sigma_t, Index relearn_threshold,
                            const Clusterer* clusterer) {
  stream.validate();
  if (stream.dim() != atlas.cloud.dim())
    throw std::invalid_argument("process_stream: stream dimension mismatch");
  if (relearn_threshold < 1)
    throw std::invalid_argument("process_stream: relearn threshold must be >= 1");

  StreamResult result;
  result.atlas = atlas;
  std::vector<Index> buffer;  // stream rows awaiting a relearn

  for (Index t = 0; t < stream.size(); ++t) {
    StreamVerdict v = score_point(result.atlas, stream.points.row(t).transpose());
    v.point_id = stream.ids[t];
    v.stream_index = t;
    finalize_assignment(v, result.atlas, sigma_t);
    if (!v.assigned) buffer.push_back(t);
    result.verdicts.push_back(std::move(v));

    if (static_cast<Index>(buffer.size()) < relearn_threshold) continue;

    // Relearn on batch + buffer. The buffered points become batch members;
    // they are re-scored against the new atlas and re-emitted, but never
    // re-buffered.
    StreamEvent ev;
    ev.kind = "relearn";
    ev.stream_index = t;
    ev.buffer_size = static_cast<Index>(buffer.size());
    ev.clusters_before = result.atlas.cluster_count();

    PointCloud merged;
    const Index nb = result.atlas.cloud.size();
    merged.points.resize(nb + static_cast<Index>(buffer.size()), stream.dim());
    merged.points.topRows(nb) = result.atlas.cloud.points;
    merged.ids = result.atlas.cloud.ids;
    for (std::size_t b = 0; b < buffer.size(); ++b) {
      merged.points.row(nb + static_cast<Index>(b)) = stream.points.row(buffer[b]);
      merged.ids.push_back(stream.ids[buffer[b]]);
    }

    try {
      result.atlas = batch_phase(merged, atlas.params, clusterer);
    } catch (const std::exception& ex) {
      result.aborted = true;
      result.abort_reason = ex.what();
      ev.kind = "abort";
      ev.message = ex.what();
      result.events.push_back(std::move(ev));
      return result;
    }
    ev.clusters_after = result.atlas.cluster_count();
    result.events.push_back(std::move(ev));

    for (Index row : buffer) {
      StreamVerdict rv = score_point(result.atlas, stream.points.row(row).transpose());
      rv.point_id = stream.ids[row];
      rv.stream_index = row;
      rv.post_relearn = true;
      finalize_assignment(rv, result.atlas, sigma_t);
      result.verdicts.push_back(std::move(rv));
    }
    buffer.clear();
  }
  return result;
}

std::vector<double> variance_trace(const std::vector<StreamVerdict>& verdicts,
                                   Index window) {
  if (window < 1) throw std::invalid_argument("variance_trace: window must be >= 1");
  std::vector<double> trace;
  trace.reserve(verdicts.size());
  double sum = 0.0;
  for (std::size_t t = 0; t < verdicts.size(); ++t) {
    sum += verdicts[t].variance;
    if (t >= static_cast<std::size_t>(window)) sum -= verdicts[t - window].variance;
    double denom = std::min<std::size_t>(t + 1, window);
    trace.push_back(sum / denom);
  }
  return trace;
}

double calibrate_sigma_t(const ManifoldAtlas& atlas, const PointCloud& validation,
                         double percentile) {
  validation.validate();
  if (!(percentile > 0.0 && percentile <= 100.0))
    throw std::invalid_argument("calibrate_sigma_t: percentile must be in (0, 100]");

  std::vector<double> vars;
  vars.reserve(validation.size());
  for (Index i = 0; i < validation.size(); ++i)
    vars.push_back(score_point(atlas, validation.points.row(i).transpose()).variance);
  std::sort(vars.begin(), vars.end());

  // Nearest-rank percentile.
  std::size_t rank = static_cast<std::size_t>(
      std::ceil(percentile / 100.0 * static_cast<double>(vars.size())));
  rank = std::min(std::max<std::size_t>(rank, 1), vars.size());
  return vars[rank - 1];
}

}  // namespace gpi
