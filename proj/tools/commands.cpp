#include "cli.hpp"

#include "gpisomap/evaluation.hpp"
#include "gpisomap/geometry.hpp"
#include "gpisomap/report.hpp"
#include "gpisomap/spectral.hpp"
#include "gpisomap/streaming.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <limits>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace cli {

namespace fs = std::filesystem;
using gpi::CsvTable;
using gpi::fmt9;
using gpi::Index;
using gpi::JsonWriter;
using gpi::Matrix;
using gpi::PointCloud;
using gpi::Vector;

namespace {

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                          "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
constexpr int kPaletteSize = 8;

gpi::ModeSpec to_mode_spec(const ModeConfig& mode) {
  gpi::ModeSpec spec;
  spec.kind = (mode.kind == "box") ? gpi::ModeSpec::Kind::UniformBox
                                   : gpi::ModeSpec::Kind::Gaussian;
  spec.mean = {mode.mean[0], mode.mean[1]};
  spec.cov << mode.cov[0], mode.cov[1], mode.cov[2], mode.cov[3];
  spec.lo = {mode.lo[0], mode.lo[1]};
  spec.hi = {mode.hi[0], mode.hi[1]};
  spec.count = mode.count;
  return spec;
}

// id column plus one x<j> column per ambient coordinate.
std::string points_csv(const PointCloud& cloud) {
  CsvTable table;
  table.header.push_back("id");
  for (Index j = 0; j < cloud.dim(); ++j)
    table.header.push_back("x" + std::to_string(j));
  for (Index i = 0; i < cloud.size(); ++i) {
    std::vector<std::string> row;
    row.push_back(std::to_string(cloud.ids[i]));
    for (Index j = 0; j < cloud.dim(); ++j) row.push_back(fmt9(cloud.points(i, j)));
    table.rows.push_back(std::move(row));
  }
  return table.to_string();
}

void write_file(const fs::path& dir, const std::string& name,
                const std::string& contents) {
  gpi::write_text_file((dir / name).string(), contents);
}

gpi::SwissRollSpec single_patch_spec(std::uint64_t seed) {
  gpi::SwissRollSpec spec;
  gpi::ModeSpec mode;
  mode.mean = {12.0, 6.0};
  spec.modes.push_back(mode);
  spec.seed = seed;
  return spec;
}

}  // namespace

int cmd_generate(const RunConfig& config) {
  const GeneratorConfig& gen = config.generator;
  if (gen.modes.empty()) throw std::invalid_argument("generate: no modes configured");
  if (gen.batch_modes.empty())
    throw std::invalid_argument("generate: batch_modes is empty");
  const int mode_count = static_cast<int>(gen.modes.size());
  auto check_mode = [&](int m, const char* where) {
    if (m < 0 || m >= mode_count)
      throw std::invalid_argument(std::string("generate: ") + where + " references mode " +
                                  std::to_string(m) + " but only " +
                                  std::to_string(mode_count) + " are configured");
  };
  for (int m : gen.batch_modes) check_mode(m, "batch_modes");
  for (const SegmentConfig& seg : gen.schedule)
    for (int m : seg.modes) check_mode(m, "stream schedule");

  gpi::SwissRollSpec spec;
  spec.n_per_mode = gen.n_per_mode;
  spec.seed = config.seed;
  for (const ModeConfig& mode : gen.modes) spec.modes.push_back(to_mode_spec(mode));
  gpi::LabeledDataset data = gpi::gen_swiss_roll(spec);

  std::vector<Index> batch_rows;
  for (int m : gen.batch_modes)
    for (Index r : data.rows_of(m, gpi::Split::Train)) batch_rows.push_back(r);
  PointCloud batch = data.cloud.subset(batch_rows);

  std::vector<gpi::StreamSegment> schedule;
  for (const SegmentConfig& seg : gen.schedule) schedule.push_back({seg.modes, seg.count});
  if (schedule.empty())
    throw std::invalid_argument("generate: stream schedule is empty");
  gpi::StreamDraw stream = gpi::gen_drift_stream(data, schedule, config.seed);

  // The calibration draw models a held-out validation set of known-manifold
  // points; it is an independent draw, so it may share points with the
  // stream's known-mode segments.
  gpi::StreamDraw calibration;
  if (gen.calibration_count > 0)
    calibration = gpi::gen_drift_stream(data, {{gen.batch_modes, gen.calibration_count}},
                                        config.seed + 1);

  const fs::path dir = config.out_dir;
  write_file(dir, config.files.batch, points_csv(batch));
  write_file(dir, config.files.stream, points_csv(stream.cloud));
  if (gen.calibration_count > 0)
    write_file(dir, config.files.calibration, points_csv(calibration.cloud));

  CsvTable truth;
  truth.header = {"id", "u", "v", "mode"};
  for (Index i = 0; i < data.cloud.size(); ++i)
    truth.rows.push_back({std::to_string(data.cloud.ids[i]), fmt9(data.truth(i, 0)),
                          fmt9(data.truth(i, 1)), std::to_string(data.mode[i])});
  write_file(dir, config.files.truth, truth.to_string());

  JsonWriter w;
  w.begin_object();
  w.key("seed").value(static_cast<Index>(config.seed));
  w.key("n_per_mode").value(gen.n_per_mode);
  w.key("total_points").value(data.cloud.size());
  w.key("modes").begin_array();
  for (const ModeConfig& mode : gen.modes) {
    w.begin_object();
    w.key("kind").value(mode.kind);
    if (mode.kind == "box") {
      w.key("lo").begin_array().value(mode.lo[0]).value(mode.lo[1]).end_array();
      w.key("hi").begin_array().value(mode.hi[0]).value(mode.hi[1]).end_array();
    } else {
      w.key("mean").begin_array().value(mode.mean[0]).value(mode.mean[1]).end_array();
      w.key("cov").begin_array();
      w.begin_array().value(mode.cov[0]).value(mode.cov[1]).end_array();
      w.begin_array().value(mode.cov[2]).value(mode.cov[3]).end_array();
      w.end_array();
    }
    w.key("count").value(mode.count > 0 ? mode.count : gen.n_per_mode);
    w.end_object();
  }
  w.end_array();
  w.key("batch_modes").begin_array();
  for (int m : gen.batch_modes) w.value(m);
  w.end_array();
  w.key("batch_rows").value(batch.size());
  w.key("stream").begin_array();
  for (const SegmentConfig& seg : gen.schedule) {
    w.begin_object();
    w.key("modes").begin_array();
    for (int m : seg.modes) w.value(m);
    w.end_array();
    w.key("count").value(seg.count);
    w.end_object();
  }
  w.end_array();
  w.key("stream_rows").value(stream.cloud.size());
  w.key("calibration_rows").value(gen.calibration_count > 0 ? calibration.cloud.size() : 0);
  w.end_object();
  write_file(dir, config.files.dataset, w.str() + "\n");

  std::cout << "generated " << data.cloud.size() << " points in " << dir.string() << ": "
            << batch.size() << " batch, " << stream.cloud.size() << " stream, "
            << (gen.calibration_count > 0 ? calibration.cloud.size() : 0)
            << " calibration rows\n";
  return 0;
}

int cmd_run(const RunConfig& config) {
  const fs::path dir = config.out_dir;

  gpi::LoadReport batch_report;
  PointCloud batch =
      gpi::load_csv((dir / config.files.batch).string(), config.csv, &batch_report).cloud;
  gpi::ManifoldAtlas atlas = gpi::batch_phase(batch, config.params);
  const int clusters_initial = static_cast<int>(atlas.cluster_count());

  PointCloud stream = gpi::load_csv((dir / config.files.stream).string(), config.csv).cloud;

  double sigma_t = config.sigma_t;
  std::string sigma_source = "explicit";
  if (!(sigma_t >= 0.0)) {
    PointCloud calibration =
        gpi::load_csv((dir / config.files.calibration).string(), config.csv).cloud;
    sigma_t = config.sigma_t_scale *
              gpi::calibrate_sigma_t(atlas, calibration, config.calibration_percentile);
    sigma_source = "calibrated";
  }

  std::vector<std::string> run_warnings;
  if (sigma_source == "calibrated") {
    double worst_floor = 0.0;
    for (const auto& cm : atlas.clusters)
      worst_floor = std::max(worst_floor, cm.gp.noise_var);
    // Predictive variance can never drop below a cluster's fitted noise, so
    // a threshold at or under that floor buffers every arrival.
    if (sigma_t <= worst_floor) {
      run_warnings.push_back(
          "calibrated threshold " + fmt9(sigma_t) +
          " is at or below a cluster's fitted noise floor " + fmt9(worst_floor) +
          "; points in that cluster can never be assigned. Shorten the length-scale "
          "grid (e.g. --ell-hi 0.25) so the calibration distribution develops a "
          "tail, or set an absolute --sigma-t.");
      std::cerr << "warning: " << run_warnings.back() << "\n";
    }
  }

  gpi::StreamResult result = gpi::process_stream(atlas, stream, sigma_t, config.n_s);
  const gpi::ManifoldAtlas& final_atlas = result.atlas;
  const int gd = static_cast<int>(final_atlas.global_dim);

  // Each relearn re-fits the shared coordinate frame, so verdicts are
  // grouped into frames: frame f covers everything from the f-th relearn's
  // re-emissions up to the next relearn.
  std::vector<int> frame_of(result.verdicts.size(), 0);
  int frames = 1;
  for (std::size_t i = 0; i < result.verdicts.size(); ++i) {
    if (result.verdicts[i].post_relearn &&
        (i == 0 || !result.verdicts[i - 1].post_relearn))
      ++frames;
    frame_of[i] = frames - 1;
  }

  // embeddings.csv: the final atlas's points (variance 0, assigned 1),
  // then one row per stream verdict in processing order.
  CsvTable table;
  table.header = {"id", "cluster"};
  for (int j = 0; j < gd; ++j) table.header.push_back("g" + std::to_string(j));
  table.header.push_back("variance");
  table.header.push_back("assigned");
  for (std::size_t c = 0; c < final_atlas.clusters.size(); ++c) {
    const auto& cm = final_atlas.clusters[c];
    for (std::size_t j = 0; j < cm.rows.size(); ++j) {
      std::vector<std::string> row;
      row.push_back(std::to_string(final_atlas.cloud.ids[cm.rows[j]]));
      row.push_back(std::to_string(c));
      Vector g = final_atlas.transforms[c].apply(
          cm.embedding.coords.col(static_cast<Index>(j)));
      for (int k = 0; k < gd; ++k) row.push_back(fmt9(g[k]));
      row.push_back("0");
      row.push_back("1");
      table.rows.push_back(std::move(row));
    }
  }
  for (const gpi::StreamVerdict& v : result.verdicts) {
    std::vector<std::string> row;
    row.push_back(std::to_string(v.point_id));
    row.push_back(std::to_string(v.chosen));
    for (int k = 0; k < gd; ++k)
      row.push_back(v.assigned ? fmt9(v.global_coords[k]) : std::string());
    row.push_back(fmt9(v.variance));
    row.push_back(v.assigned ? "1" : "0");
    table.rows.push_back(std::move(row));
  }
  write_file(dir, "embeddings.csv", table.to_string());

  std::string event_lines;
  for (const gpi::StreamEvent& e : result.events) {
    JsonWriter w;
    w.begin_object();
    w.key("kind").value(e.kind);
    w.key("stream_index").value(e.stream_index);
    w.key("buffer_size").value(e.buffer_size);
    w.key("clusters_before").value(e.clusters_before);
    w.key("clusters_after").value(e.clusters_after);
    w.key("message").value(e.message);
    w.end_object();
    event_lines += w.str();
    event_lines += "\n";
  }
  write_file(dir, "events.jsonl", event_lines);

  // Per-point resolution: a point re-emitted after a relearn counts as
  // assigned if any of its verdicts was.
  std::unordered_set<std::int64_t> seen_ids, assigned_ids;
  double assigned_var_sum = 0.0, assigned_var_max = 0.0, unassigned_var_sum = 0.0;
  Index assigned_verdicts = 0, unassigned_verdicts = 0;
  int relearns = 0;
  for (const gpi::StreamEvent& e : result.events)
    if (e.kind == "relearn") ++relearns;
  for (const gpi::StreamVerdict& v : result.verdicts) {
    seen_ids.insert(v.point_id);
    if (v.assigned) {
      assigned_ids.insert(v.point_id);
      ++assigned_verdicts;
      assigned_var_sum += v.variance;
      assigned_var_max = std::max(assigned_var_max, v.variance);
    } else {
      ++unassigned_verdicts;
      unassigned_var_sum += v.variance;
    }
  }

  // Ground-truth comparison. A single similarity transform cannot align
  // two differently-fitted frames, so frames are scored separately; and a
  // multi-cluster atlas arranges the clusters in a nominal shared frame, so
  // each frame gets both a whole-frame score and per-cluster scores (the
  // per-cluster ones isolate mapping quality from cluster arrangement).
  const double nan = std::numeric_limits<double>::quiet_NaN();
  struct ClusterScore {
    int cluster = 0;
    Index points = 0;
    double error = 0.0;
  };
  struct FrameScore {
    Index assigned = 0;
    double global_error = 0.0;
    double local_mean_error = 0.0;
    std::vector<ClusterScore> clusters;
    FrameScore() : global_error(std::numeric_limits<double>::quiet_NaN()),
                   local_mean_error(std::numeric_limits<double>::quiet_NaN()) {}
  };
  std::vector<FrameScore> frame_scores(static_cast<std::size_t>(frames));
  bool truth_available = false;
  double pooled_error = nan;
  const fs::path truth_path = dir / config.files.truth;
  if (fs::exists(truth_path) && gd == 2) {
    truth_available = true;
    gpi::CsvSchema truth_schema;
    truth_schema.id_col = 0;
    truth_schema.feature_cols = {1, 2};
    truth_schema.label_col = 3;
    truth_schema.normalize = gpi::CsvSchema::Normalize::None;
    gpi::LabeledDataset truth_data = gpi::load_csv(truth_path.string(), truth_schema);
    std::unordered_map<std::int64_t, std::pair<double, double>> truth_map;
    for (Index i = 0; i < truth_data.cloud.size(); ++i)
      truth_map[truth_data.cloud.ids[i]] = {truth_data.cloud.points(i, 0),
                                            truth_data.cloud.points(i, 1)};

    auto score = [&](const std::vector<std::size_t>& rows) -> double {
      if (rows.size() < 2) return nan;
      Matrix truth_m(2, static_cast<Index>(rows.size()));
      Matrix pred_m(2, static_cast<Index>(rows.size()));
      for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& v = result.verdicts[rows[i]];
        auto t = truth_map.at(v.point_id);
        truth_m(0, static_cast<Index>(i)) = t.first;
        truth_m(1, static_cast<Index>(i)) = t.second;
        pred_m.col(static_cast<Index>(i)) = v.global_coords.head(2);
      }
      try {
        return gpi::procrustes_error(truth_m, pred_m);
      } catch (const std::invalid_argument&) {
        return nan;  // degenerate configuration
      }
    };

    for (int f = 0; f < frames; ++f) {
      FrameScore& fs_ = frame_scores[static_cast<std::size_t>(f)];
      std::vector<std::size_t> frame_rows;
      std::unordered_map<int, std::vector<std::size_t>> cluster_rows;
      for (std::size_t i = 0; i < result.verdicts.size(); ++i) {
        const auto& v = result.verdicts[i];
        if (frame_of[i] != f || !v.assigned) continue;
        if (truth_map.find(v.point_id) == truth_map.end()) continue;
        frame_rows.push_back(i);
        cluster_rows[v.chosen].push_back(i);
      }
      fs_.assigned = static_cast<Index>(frame_rows.size());
      fs_.global_error = score(frame_rows);
      std::vector<int> order;
      for (const auto& kv : cluster_rows) order.push_back(kv.first);
      std::sort(order.begin(), order.end());
      double weighted = 0.0;
      Index weight = 0;
      for (int c : order) {
        double e = score(cluster_rows[c]);
        fs_.clusters.push_back({c, static_cast<Index>(cluster_rows[c].size()), e});
        if (std::isfinite(e)) {
          weighted += e * double(cluster_rows[c].size());
          weight += static_cast<Index>(cluster_rows[c].size());
        }
      }
      if (weight > 0) fs_.local_mean_error = weighted / double(weight);
    }
    if (frames == 1) pooled_error = frame_scores[0].global_error;
  }

  JsonWriter w;
  w.begin_object();
  w.key("sigma_t").value(sigma_t);
  w.key("sigma_t_source").value(sigma_source);
  w.key("n_s").value(config.n_s);
  w.key("variance_window").value(config.variance_window);
  w.key("batch_rows").value(batch.size());
  w.key("batch_rows_dropped").value(batch_report.rows_dropped);
  w.key("stream_rows").value(stream.size());
  w.key("clusters_initial").value(clusters_initial);
  w.key("clusters_final").value(static_cast<int>(final_atlas.cluster_count()));
  w.key("verdicts").value(static_cast<Index>(result.verdicts.size()));
  w.key("assigned_verdicts").value(assigned_verdicts);
  w.key("unassigned_verdicts").value(unassigned_verdicts);
  w.key("points_assigned").value(static_cast<Index>(assigned_ids.size()));
  w.key("points_unassigned")
      .value(static_cast<Index>(seen_ids.size() - assigned_ids.size()));
  w.key("relearn_events").value(relearns);
  w.key("aborted").value(result.aborted);
  w.key("abort_reason").value(result.abort_reason);
  w.key("assigned_variance_mean")
      .value(assigned_verdicts > 0 ? assigned_var_sum / double(assigned_verdicts) : nan);
  w.key("assigned_variance_max").value(assigned_verdicts > 0 ? assigned_var_max : nan);
  w.key("unassigned_variance_mean")
      .value(unassigned_verdicts > 0 ? unassigned_var_sum / double(unassigned_verdicts)
                                     : nan);
  w.key("procrustes_error").value(pooled_error);
  w.key("ground_truth");
  if (truth_available) {
    w.begin_object();
    w.key("frames").begin_array();
    for (int f = 0; f < frames; ++f) {
      const FrameScore& fs_ = frame_scores[static_cast<std::size_t>(f)];
      w.begin_object();
      w.key("frame").value(f);
      w.key("assigned").value(fs_.assigned);
      w.key("global_error").value(fs_.global_error);
      w.key("local_mean_error").value(fs_.local_mean_error);
      w.key("clusters").begin_array();
      for (const ClusterScore& cs : fs_.clusters) {
        w.begin_object();
        w.key("cluster").value(cs.cluster);
        w.key("points").value(cs.points);
        w.key("error").value(cs.error);
        w.end_object();
      }
      w.end_array();
      w.end_object();
    }
    w.end_array();
    w.end_object();
  } else {
    w.value(nan);  // non-finite renders as null
  }
  w.key("warnings").begin_array();
  for (const std::string& warning : batch_report.warnings) w.value(warning);
  for (const std::string& warning : final_atlas.warnings) w.value(warning);
  for (const std::string& warning : run_warnings) w.value(warning);
  w.end_array();
  w.end_object();
  write_file(dir, "metrics.json", w.str() + "\n");

  if (config.plots) {
    std::vector<double> trace = gpi::variance_trace(result.verdicts, config.variance_window);
    gpi::SvgPlot var_plot;
    var_plot.set_title("windowed mean predictive variance (window " +
                       std::to_string(config.variance_window) + ")");
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < trace.size(); ++i)
      pts.push_back({static_cast<double>(i), trace[i]});
    var_plot.add_line(pts, kPalette[0]);
    if (std::isfinite(sigma_t)) var_plot.add_hline(sigma_t, "#d62728");
    for (std::size_t i = 0; i < result.verdicts.size(); ++i)
      if (result.verdicts[i].post_relearn &&
          (i == 0 || !result.verdicts[i - 1].post_relearn))
        var_plot.add_vline(static_cast<double>(i), "#7f7f7f");
    write_file(dir, "variance_trace.svg", var_plot.render());

    if (gd == 2) {
      gpi::SvgPlot emb_plot;
      emb_plot.set_title("shared-frame coordinates by cluster");
      for (std::size_t c = 0; c < final_atlas.clusters.size(); ++c) {
        const auto& cm = final_atlas.clusters[c];
        std::vector<std::pair<double, double>> cluster_pts;
        for (std::size_t j = 0; j < cm.rows.size(); ++j) {
          Vector g = final_atlas.transforms[c].apply(
              cm.embedding.coords.col(static_cast<Index>(j)));
          cluster_pts.push_back({g[0], g[1]});
        }
        emb_plot.add_scatter(cluster_pts, kPalette[c % kPaletteSize], 2.5);
      }
      // Stream points mapped in the final frame.
      std::vector<std::pair<double, double>> stream_pts;
      for (std::size_t i = 0; i < result.verdicts.size(); ++i)
        if (frame_of[i] == frames - 1 && result.verdicts[i].assigned)
          stream_pts.push_back({result.verdicts[i].global_coords[0],
                                result.verdicts[i].global_coords[1]});
      if (!stream_pts.empty()) emb_plot.add_scatter(stream_pts, "#17becf", 1.5);
      write_file(dir, "embedding.svg", emb_plot.render());
    }
  }

  std::cout << "sigma_t " << fmt9(sigma_t) << " (" << sigma_source << "), "
            << final_atlas.cluster_count() << " clusters (from " << clusters_initial
            << "), " << assigned_ids.size() << " of " << seen_ids.size()
            << " stream points assigned, " << relearns << " relearn event(s)"
            << (result.aborted ? ", aborted: " + result.abort_reason : std::string())
            << "\n";
  for (int f = 0; f < frames; ++f) {
    const FrameScore& fs_ = frame_scores[static_cast<std::size_t>(f)];
    if (!std::isfinite(fs_.global_error) && !std::isfinite(fs_.local_mean_error))
      continue;
    std::cout << "shape error vs ground truth, frame " << f << ": global "
              << fmt9(fs_.global_error) << ", per-cluster mean "
              << fmt9(fs_.local_mean_error) << "\n";
  }
  return 0;
}

int cmd_convergence(const RunConfig& config, const std::vector<Index>& sizes, int runs) {
  if (sizes.empty()) throw std::invalid_argument("convergence: no sizes given");
  if (runs < 1) throw std::invalid_argument("convergence: runs must be positive");
  std::vector<Index> sorted = sizes;
  std::sort(sorted.begin(), sorted.end());

  CsvTable table;
  table.header = {"run", "n", "error"};
  std::vector<double> mean_errors(sorted.size(), 0.0);
  std::vector<std::vector<double>> per_run;
  for (int r = 0; r < runs; ++r) {
    gpi::SwissRollSpec gen = single_patch_spec(config.seed + 1000 * static_cast<std::uint64_t>(r));
    auto curve =
        gpi::convergence_curve(gen, sorted, config.params.k_graph, config.params.dim);
    std::vector<double> errors;
    for (std::size_t i = 0; i < curve.size(); ++i) {
      table.rows.push_back(
          {std::to_string(r), std::to_string(curve[i].n), fmt9(curve[i].error)});
      mean_errors[i] += curve[i].error / runs;
      errors.push_back(curve[i].error);
    }
    per_run.push_back(std::move(errors));
  }

  const fs::path dir = config.out_dir;
  write_file(dir, "convergence.csv", table.to_string());

  if (config.plots) {
    gpi::SvgPlot plot;
    plot.set_title("embedding error vs batch size");
    for (int r = 0; r < runs; ++r) {
      std::vector<std::pair<double, double>> pts;
      for (std::size_t i = 0; i < sorted.size(); ++i)
        pts.push_back({static_cast<double>(sorted[i]), per_run[static_cast<std::size_t>(r)][i]});
      plot.add_scatter(pts, kPalette[r % kPaletteSize], 2.0);
    }
    std::vector<std::pair<double, double>> mean_pts;
    for (std::size_t i = 0; i < sorted.size(); ++i)
      mean_pts.push_back({static_cast<double>(sorted[i]), mean_errors[i]});
    plot.add_line(mean_pts, "#000000");
    write_file(dir, "convergence.svg", plot.render());
  }

  for (std::size_t i = 0; i < sorted.size(); ++i)
    std::cout << "n " << sorted[i] << ": mean error " << fmt9(mean_errors[i]) << " over "
              << runs << " run(s)\n";
  if (sorted.size() >= 2 && mean_errors.back() > 0.0)
    std::cout << "first-to-last error ratio " << fmt9(mean_errors.front() / mean_errors.back())
              << "\n";
  return 0;
}

int cmd_equivalence(const RunConfig& config, Index batch_n, Index stream_n,
                    double noise_var, const std::vector<double>& multipliers) {
  if (batch_n < 10 || stream_n < 2)
    throw std::invalid_argument("equivalence: need at least 10 batch and 2 stream points");
  if (multipliers.empty())
    throw std::invalid_argument("equivalence: no length-scale multipliers given");

  gpi::SwissRollSpec gen = single_patch_spec(config.seed + 40);
  gen.n_per_mode = batch_n + stream_n;
  gpi::LabeledDataset data = gpi::gen_swiss_roll(gen);
  std::vector<Index> batch_rows;
  for (Index i = 0; i < batch_n; ++i) batch_rows.push_back(i);
  PointCloud batch = data.cloud.subset(batch_rows);
  auto geo = gpi::geodesic_distances(gpi::build_knn_graph(batch, config.params.k_graph));
  auto embedding = gpi::isomap_embed(geo, config.params.dim);

  std::vector<Vector> probes;
  for (Index i = batch_n; i < batch_n + stream_n; ++i)
    probes.push_back(gpi::stream_geodesics(data.cloud.points.row(i).transpose(), batch, geo,
                                           config.params.k_graph));

  const double max_geo = std::sqrt(geo.sq_dist.maxCoeff());
  std::vector<double> ells;
  for (double m : multipliers) ells.push_back(m * max_geo);
  std::vector<double> errors = gpi::equivalence_test(embedding, geo, noise_var, probes, ells);

  CsvTable table;
  table.header = {"multiplier", "ell", "error"};
  for (std::size_t i = 0; i < ells.size(); ++i)
    table.rows.push_back({fmt9(multipliers[i]), fmt9(ells[i]), fmt9(errors[i])});
  const fs::path dir = config.out_dir;
  write_file(dir, "equivalence.csv", table.to_string());

  if (config.plots) {
    gpi::SvgPlot plot;
    plot.set_title("gp vs landmark-extension gap by length scale");
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < ells.size(); ++i) pts.push_back({multipliers[i], errors[i]});
    plot.add_line(pts, kPalette[0]);
    plot.add_scatter(pts, kPalette[3], 2.5);
    write_file(dir, "equivalence.svg", plot.render());
  }

  bool decreasing = true;
  for (std::size_t i = 1; i < errors.size(); ++i)
    if (!(errors[i] < errors[i - 1])) decreasing = false;
  for (std::size_t i = 0; i < ells.size(); ++i)
    std::cout << "ell " << fmt9(ells[i]) << " (x" << fmt9(multipliers[i]) << "): gap "
              << fmt9(errors[i]) << "\n";
  std::cout << "strictly decreasing: " << (decreasing ? "yes" : "no") << "\n";
  return 0;
}

}  // namespace cli
