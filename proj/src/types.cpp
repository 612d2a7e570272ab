#include "gpisomap/types.hpp"

#include <cmath>
#include <unordered_set>

namespace gpi {

PointCloud PointCloud::from_points(Matrix pts) {
  PointCloud cloud;
  cloud.points = std::move(pts);
  cloud.ids.resize(cloud.points.rows());
  for (Index i = 0; i < cloud.points.rows(); ++i) cloud.ids[i] = i;
  cloud.validate();
  return cloud;
}

PointCloud PointCloud::subset(const std::vector<Index>& rows) const {
  PointCloud out;
  out.points.resize(static_cast<Index>(rows.size()), points.cols());
  out.ids.reserve(rows.size());
  if (!tags.empty()) out.tags.reserve(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    Index i = rows[r];
    if (i < 0 || i >= size())
      throw std::invalid_argument("PointCloud::subset: row out of range");
    out.points.row(static_cast<Index>(r)) = points.row(i);
    out.ids.push_back(ids[i]);
    if (!tags.empty()) out.tags.push_back(tags[i]);
  }
  return out;
}

void PointCloud::validate() const {
  if (points.rows() < 1 || points.cols() < 1)
    throw std::invalid_argument("PointCloud: need at least one point and one feature");
  if (!points.allFinite())
    throw std::invalid_argument("PointCloud: non-finite coordinate");
  if (ids.size() != static_cast<std::size_t>(points.rows()))
    throw std::invalid_argument("PointCloud: ids size mismatch");
  if (!tags.empty() && tags.size() != static_cast<std::size_t>(points.rows()))
    throw std::invalid_argument("PointCloud: tags size mismatch");
  std::unordered_set<std::int64_t> seen;
  for (auto id : ids)
    if (!seen.insert(id).second)
      throw std::invalid_argument("PointCloud: duplicate id " + std::to_string(id));
}

}  // namespace gpi
