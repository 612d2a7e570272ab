#pragma once

#include "gpisomap/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace gpi {

enum class Split : std::uint8_t { Train, Test };

// One sampling mode on the unrolled (u, v) plane. u runs along the spiral
// (arc length), v along the roll axis.
struct ModeSpec {
  enum class Kind { Gaussian, UniformBox } kind = Kind::Gaussian;
  Eigen::Vector2d mean = {0.0, 0.0};                  // Gaussian
  Eigen::Matrix2d cov = Eigen::Matrix2d::Identity();  // Gaussian
  Eigen::Vector2d lo = {0.0, 0.0};                    // UniformBox
  Eigen::Vector2d hi = {1.0, 1.0};                    // UniformBox
  Index count = 0;  // 0 -> inherit n_per_mode
};

struct SwissRollSpec {
  std::vector<ModeSpec> modes;
  Index n_per_mode = 2000;
  std::uint64_t seed = 0;
  // Spiral angle whose arc-length position is u = 0; patches may dip
  // slightly below u = 0 but not past the start of the spiral.
  double base_angle = 4.71238898038468986;  // 3 pi / 2
};

// A generated dataset: 3-D points, per-point mode index, the 2-D (u, v)
// coordinates they came from (isometric ground truth), and a pinned 50/50
// train/test split per mode. For loaded datasets truth/mode may be empty.
struct LabeledDataset {
  PointCloud cloud;
  Matrix truth;             // n x 2, or 0 x 0 when unknown
  std::vector<int> mode;    // size n, or empty
  std::vector<Split> split; // size n

  std::vector<Index> rows_of(int mode_index, Split which) const;
};

// The rolled surface: (u, v) -> (t cos t, v, t sin t) with t chosen so u is
// arc length along the spiral r = theta. Arc-length parameterisation makes
// the map a local isometry, so 2-D Euclidean distances between samples are
// the true manifold geodesics.
double roll_arc_to_angle(double arc);
Eigen::Vector3d roll_point(double u, double v, double base_angle);

LabeledDataset gen_swiss_roll(const SwissRollSpec& spec);

// One stream segment: `count` points drawn from the test split of the given
// modes. Draws are without replacement across the whole stream, so a
// single-mode schedule is an i.i.d. shuffle of that mode's test split.
struct StreamSegment {
  std::vector<int> modes;
  Index count = 0;
};

struct StreamDraw {
  PointCloud cloud;                 // arrival order, ids from the dataset
  std::vector<Index> dataset_rows;  // row in the dataset per stream point
};

StreamDraw gen_drift_stream(const LabeledDataset& dataset,
                            const std::vector<StreamSegment>& schedule,
                            std::uint64_t seed);

// Plain comma-separated loader: selected feature columns parsed as doubles,
// optional id and label columns. Rows with missing/unparseable entries are
// dropped and counted; more than 10% dropped is a hard error.
struct CsvSchema {
  std::vector<int> feature_cols;
  int id_col = -1;
  int label_col = -1;
  bool has_header = true;
  enum class Normalize { None, Mean } normalize = Normalize::Mean;
};

struct LoadReport {
  Index rows_total = 0;    // data rows inspected
  Index rows_dropped = 0;
  std::vector<int> dropped_features;  // original column indices, zero variance
  std::vector<std::string> warnings;
};

LabeledDataset load_csv(const std::string& path, const CsvSchema& schema,
                        LoadReport* report = nullptr);

}  // namespace gpi
