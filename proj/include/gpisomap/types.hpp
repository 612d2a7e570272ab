#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace gpi {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Raised for malformed or unusable input files (missing columns, too many
// unparseable rows, ...). Callers that need an exit-code distinction between
// bad configuration and bad data catch this separately.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A batch of observed points: one row per point, plus stable ids that survive
// subsetting (so results can be joined back against ground truth), and
// optional class tags carried along for reporting only.
struct PointCloud {
  Matrix points;                  // n x D
  std::vector<std::int64_t> ids;  // size n, unique
  std::vector<std::string> tags;  // empty or size n

  Index size() const { return points.rows(); }
  Index dim() const { return points.cols(); }

  // Wraps a coordinate matrix, assigning ids 0..n-1.
  static PointCloud from_points(Matrix pts);

  // New cloud containing the given rows, in the given order.
  PointCloud subset(const std::vector<Index>& rows) const;

  // Throws std::invalid_argument on empty/ragged/non-finite input or
  // duplicate ids.
  void validate() const;
};

}  // namespace gpi
