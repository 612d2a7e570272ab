#include "gpisomap/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

namespace gpi {

namespace {

// Arc length along the spiral r = theta from the origin to angle t.
double spiral_arc(double t) {
  return 0.5 * (t * std::sqrt(1.0 + t * t) + std::asinh(t));
}

}  // namespace

double roll_arc_to_angle(double arc) {
  if (arc < 0.0)
    throw std::invalid_argument("roll_arc_to_angle: point lies before the start of the spiral");
  // Newton iteration on s(t) = arc; s'(t) = sqrt(1 + t^2). The quadratic
  // initial guess s ~ t^2/2 keeps this to a handful of steps.
  double t = std::sqrt(2.0 * arc);
  for (int iter = 0; iter < 64; ++iter) {
    double f = spiral_arc(t) - arc;
    double step = f / std::sqrt(1.0 + t * t);
    t -= step;
    if (t < 0.0) t = 0.0;
    if (std::abs(step) <= 1e-14 * std::max(1.0, t)) break;
  }
  return t;
}

Eigen::Vector3d roll_point(double u, double v, double base_angle) {
  double t = roll_arc_to_angle(spiral_arc(base_angle) + u);
  return {t * std::cos(t), v, t * std::sin(t)};
}

std::vector<Index> LabeledDataset::rows_of(int mode_index, Split which) const {
  std::vector<Index> rows;
  for (Index i = 0; i < cloud.size(); ++i)
    if (mode[i] == mode_index && split[i] == which) rows.push_back(i);
  return rows;
}

LabeledDataset gen_swiss_roll(const SwissRollSpec& spec) {
  if (spec.modes.empty())
    throw std::invalid_argument("gen_swiss_roll: need at least one mode");

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<Eigen::Vector2d> plane;
  std::vector<int> mode;
  for (std::size_t m = 0; m < spec.modes.size(); ++m) {
    const ModeSpec& ms = spec.modes[m];
    Index count = ms.count > 0 ? ms.count : spec.n_per_mode;
    if (count < 2)
      throw std::invalid_argument("gen_swiss_roll: each mode needs at least 2 points");

    // Positive-SEMIdefinite square root (LDLT tolerates zero variance,
    // plain Cholesky does not): cov = P^T L D L^T P = M M^T.
    Eigen::Matrix2d chol = Eigen::Matrix2d::Zero();
    if (ms.kind == ModeSpec::Kind::Gaussian) {
      Eigen::LDLT<Eigen::Matrix2d> ldlt(ms.cov);
      Eigen::Vector2d d = ldlt.vectorD();
      if (ldlt.info() != Eigen::Success || (d.array() < -1e-12).any())
        throw std::invalid_argument("gen_swiss_roll: mode covariance must be positive semidefinite");
      chol = ldlt.transpositionsP().transpose() *
             (Eigen::Matrix2d(ldlt.matrixL()) *
              d.cwiseMax(0.0).cwiseSqrt().asDiagonal());
    }

    for (Index i = 0; i < count; ++i) {
      Eigen::Vector2d uv;
      if (ms.kind == ModeSpec::Kind::Gaussian) {
        Eigen::Vector2d z(gauss(rng), gauss(rng));
        uv = ms.mean + chol * z;
      } else {
        uv = {ms.lo[0] + (ms.hi[0] - ms.lo[0]) * unit(rng),
              ms.lo[1] + (ms.hi[1] - ms.lo[1]) * unit(rng)};
      }
      plane.push_back(uv);
      mode.push_back(static_cast<int>(m));
    }
  }

  const Index n = static_cast<Index>(plane.size());
  LabeledDataset out;
  out.cloud.points.resize(n, 3);
  out.cloud.ids.resize(n);
  out.truth.resize(n, 2);
  out.mode = std::move(mode);
  out.split.assign(n, Split::Train);

  for (Index i = 0; i < n; ++i) {
    out.cloud.ids[i] = i;
    out.truth.row(i) = plane[i].transpose();
    out.cloud.points.row(i) = roll_point(plane[i][0], plane[i][1], spec.base_angle).transpose();
  }

  // Pinned 50/50 split per mode; odd counts favour the train side.
  for (std::size_t m = 0; m < spec.modes.size(); ++m) {
    std::vector<Index> rows;
    for (Index i = 0; i < n; ++i)
      if (out.mode[i] == static_cast<int>(m)) rows.push_back(i);
    std::shuffle(rows.begin(), rows.end(), rng);
    for (std::size_t r = (rows.size() + 1) / 2; r < rows.size(); ++r)
      out.split[rows[r]] = Split::Test;
  }

  out.cloud.validate();
  return out;
}

StreamDraw gen_drift_stream(const LabeledDataset& dataset,
                            const std::vector<StreamSegment>& schedule,
                            std::uint64_t seed) {
  if (schedule.empty())
    throw std::invalid_argument("gen_drift_stream: empty schedule");
  if (dataset.mode.empty())
    throw std::invalid_argument("gen_drift_stream: dataset has no mode information");

  std::mt19937_64 rng(seed);
  std::vector<char> used(dataset.cloud.size(), 0);
  std::vector<Index> rows;

  for (const StreamSegment& seg : schedule) {
    if (seg.count < 1 || seg.modes.empty())
      throw std::invalid_argument("gen_drift_stream: segment needs modes and a positive count");
    std::vector<Index> pool;
    for (int m : seg.modes)
      for (Index r : dataset.rows_of(m, Split::Test))
        if (!used[r]) pool.push_back(r);
    if (static_cast<Index>(pool.size()) < seg.count)
      throw std::invalid_argument(
          "gen_drift_stream: segment wants " + std::to_string(seg.count) +
          " points but only " + std::to_string(pool.size()) + " unused test points remain");
    std::shuffle(pool.begin(), pool.end(), rng);
    for (Index i = 0; i < seg.count; ++i) {
      rows.push_back(pool[i]);
      used[pool[i]] = 1;
    }
  }

  StreamDraw draw;
  draw.cloud = dataset.cloud.subset(rows);
  draw.dataset_rows = std::move(rows);
  return draw;
}

namespace {

bool parse_double(const std::string& text, double& out) {
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto res = std::from_chars(first, last, out);
  return res.ec == std::errc{} && res.ptr == last && std::isfinite(out);
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  std::istringstream ss(line);
  while (std::getline(ss, cur, ',')) fields.push_back(trim(cur));
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

}  // namespace

LabeledDataset load_csv(const std::string& path, const CsvSchema& schema,
                        LoadReport* report) {
  if (schema.feature_cols.empty())
    throw std::invalid_argument("load_csv: schema needs at least one feature column");

  std::ifstream file(path);
  if (!file) throw DataError("load_csv: cannot open " + path);

  int max_col = schema.feature_cols.empty() ? 0 : *std::max_element(schema.feature_cols.begin(), schema.feature_cols.end());
  max_col = std::max({max_col, schema.id_col, schema.label_col});

  LoadReport local;
  LoadReport& rep = report ? *report : local;

  std::vector<std::vector<double>> rows;
  std::vector<std::int64_t> ids;
  std::vector<std::string> tags;

  std::string line;
  bool first = true;
  while (std::getline(file, line)) {
    if (first && schema.has_header) {
      first = false;
      continue;
    }
    first = false;
    if (trim(line).empty()) continue;
    ++rep.rows_total;

    auto fields = split_fields(line);
    if (static_cast<int>(fields.size()) <= max_col) {
      ++rep.rows_dropped;
      continue;
    }

    std::vector<double> feats;
    feats.reserve(schema.feature_cols.size());
    bool ok = true;
    for (int col : schema.feature_cols) {
      double v;
      if (fields[col].empty() || !parse_double(fields[col], v)) {
        ok = false;
        break;
      }
      feats.push_back(v);
    }
    std::int64_t id = static_cast<std::int64_t>(rows.size());
    if (ok && schema.id_col >= 0) {
      double v;
      if (!parse_double(fields[schema.id_col], v))
        ok = false;
      else
        id = static_cast<std::int64_t>(std::llround(v));
    }
    if (!ok) {
      ++rep.rows_dropped;
      continue;
    }
    rows.push_back(std::move(feats));
    ids.push_back(id);
    if (schema.label_col >= 0) tags.push_back(fields[schema.label_col]);
  }

  if (rep.rows_total == 0) throw DataError("load_csv: no data rows in " + path);
  if (rep.rows_dropped * 10 > rep.rows_total)
    throw DataError("load_csv: " + std::to_string(rep.rows_dropped) + " of " +
                    std::to_string(rep.rows_total) + " rows unparseable (over 10%)");
  if (rows.empty()) throw DataError("load_csv: every row was dropped");

  const Index n = static_cast<Index>(rows.size());
  const Index d_all = static_cast<Index>(schema.feature_cols.size());
  Matrix feats(n, d_all);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < d_all; ++j) feats(i, j) = rows[i][j];

  std::vector<Index> keep;
  if (schema.normalize == CsvSchema::Normalize::Mean) {
    Vector mean = feats.colwise().mean();
    feats.rowwise() -= mean.transpose();
    // Scale to unit population variance; a constant feature carries no
    // information, so it is dropped (unless there is only one row, where
    // every feature is trivially constant and centering is all we can do).
    for (Index j = 0; j < d_all; ++j) {
      double var = feats.col(j).squaredNorm() / static_cast<double>(n);
      if (var > 0.0) {
        feats.col(j) /= std::sqrt(var);
        keep.push_back(j);
      } else if (n == 1) {
        keep.push_back(j);
      } else {
        rep.dropped_features.push_back(schema.feature_cols[j]);
        rep.warnings.push_back("load_csv: dropped zero-variance feature column " +
                               std::to_string(schema.feature_cols[j]));
      }
    }
  } else {
    for (Index j = 0; j < d_all; ++j) keep.push_back(j);
  }
  if (keep.empty()) throw DataError("load_csv: all features have zero variance");

  LabeledDataset out;
  out.cloud.points.resize(n, static_cast<Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j)
    out.cloud.points.col(static_cast<Index>(j)) = feats.col(keep[j]);
  out.cloud.ids = std::move(ids);
  out.cloud.tags = std::move(tags);
  out.split.assign(n, Split::Train);
  out.cloud.validate();
  return out;
}

}  // namespace gpi
