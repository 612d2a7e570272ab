#include "cli.hpp"

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace cli {

using nlohmann::json;

RunConfig default_config() {
  RunConfig config;
  // Compact, well-separated patches, a length-scale grid capped at the data
  // scale, and the fixed threshold 0.7: in-patch points then score near the
  // fitted noise floor (~0.27 here) and out-of-patch points near 1 + floor,
  // so 0.7 sits cleanly inside the gap. Calibrated thresholds (sigma_t < 0)
  // need a much shorter grid cap instead - see the README's section on
  // detection regimes.
  config.params.eps = 1.0;
  config.params.grid.ell_hi = 2.0;
  config.sigma_t = 0.7;
  config.csv.id_col = 0;
  config.csv.feature_cols = {1, 2, 3};
  config.csv.has_header = true;
  config.csv.normalize = gpi::CsvSchema::Normalize::None;
  for (double u : {8.0, 20.0, 32.0, 44.0}) {
    ModeConfig mode;
    mode.mean = {u, 4.0};
    mode.cov = {0.04, 0.0, 0.0, 0.04};
    config.generator.modes.push_back(mode);
  }
  // Three modes known at batch time; the fourth arrives only in the stream.
  config.generator.batch_modes = {0, 1, 2};
  config.generator.schedule.push_back({{0, 1, 2}, 3000});
  config.generator.schedule.push_back({{3}, 1000});
  return config;
}

namespace {

[[noreturn]] void fail(const std::string& message) {
  throw std::invalid_argument("config: " + message);
}

void check_keys(const json& obj, const std::string& where,
                std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) fail(where + " must be a JSON object");
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* name : allowed)
      if (item.key() == name) {
        known = true;
        break;
      }
    if (!known) fail("unknown key \"" + item.key() + "\" in " + where);
  }
}

double get_number(const json& v, const std::string& where) {
  if (!v.is_number()) fail(where + " must be a number");
  return v.get<double>();
}

// sigma_t accepts "inf" (JSON itself has no infinity literal).
double get_number_or_inf(const json& v, const std::string& where) {
  if (v.is_string()) {
    std::string s = v.get<std::string>();
    if (s == "inf" || s == "infinity")
      return std::numeric_limits<double>::infinity();
    fail(where + ": unrecognised string \"" + s + "\" (use a number or \"inf\")");
  }
  return get_number(v, where);
}

int get_int(const json& v, const std::string& where) {
  if (!v.is_number_integer()) fail(where + " must be an integer");
  return v.get<int>();
}

gpi::Index get_index(const json& v, const std::string& where) {
  if (!v.is_number_integer()) fail(where + " must be an integer");
  auto raw = v.get<std::int64_t>();
  if (raw < 0) fail(where + " must be non-negative");
  return static_cast<gpi::Index>(raw);
}

bool get_bool(const json& v, const std::string& where) {
  if (!v.is_boolean()) fail(where + " must be true or false");
  return v.get<bool>();
}

std::string get_string(const json& v, const std::string& where) {
  if (!v.is_string()) fail(where + " must be a string");
  return v.get<std::string>();
}

std::array<double, 2> get_pair(const json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 2) fail(where + " must be a [x, y] pair");
  return {get_number(v[0], where), get_number(v[1], where)};
}

std::array<double, 4> get_cov(const json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 2) fail(where + " must be a 2x2 [[a,b],[c,d]] matrix");
  auto row0 = get_pair(v[0], where);
  auto row1 = get_pair(v[1], where);
  return {row0[0], row0[1], row1[0], row1[1]};
}

std::vector<int> get_int_list(const json& v, const std::string& where) {
  if (!v.is_array()) fail(where + " must be an array of integers");
  std::vector<int> out;
  for (const auto& e : v) out.push_back(get_int(e, where));
  return out;
}

void parse_grid(const json& obj, gpi::GpGridSpec& grid) {
  check_keys(obj, "grid",
             {"ell_count", "ell_lo", "ell_hi", "noise_count", "noise_lo", "noise_hi"});
  if (obj.contains("ell_count")) grid.ell_count = get_int(obj["ell_count"], "grid.ell_count");
  if (obj.contains("ell_lo")) grid.ell_lo = get_number(obj["ell_lo"], "grid.ell_lo");
  if (obj.contains("ell_hi")) grid.ell_hi = get_number(obj["ell_hi"], "grid.ell_hi");
  if (obj.contains("noise_count"))
    grid.noise_count = get_int(obj["noise_count"], "grid.noise_count");
  if (obj.contains("noise_lo")) grid.noise_lo = get_number(obj["noise_lo"], "grid.noise_lo");
  if (obj.contains("noise_hi")) grid.noise_hi = get_number(obj["noise_hi"], "grid.noise_hi");
}

void parse_csv(const json& obj, gpi::CsvSchema& schema) {
  check_keys(obj, "csv",
             {"feature_cols", "id_col", "label_col", "has_header", "normalize"});
  if (obj.contains("feature_cols"))
    schema.feature_cols = get_int_list(obj["feature_cols"], "csv.feature_cols");
  if (obj.contains("id_col")) schema.id_col = get_int(obj["id_col"], "csv.id_col");
  if (obj.contains("label_col"))
    schema.label_col = get_int(obj["label_col"], "csv.label_col");
  if (obj.contains("has_header"))
    schema.has_header = get_bool(obj["has_header"], "csv.has_header");
  if (obj.contains("normalize")) {
    std::string mode = get_string(obj["normalize"], "csv.normalize");
    if (mode == "none")
      schema.normalize = gpi::CsvSchema::Normalize::None;
    else if (mode == "mean")
      schema.normalize = gpi::CsvSchema::Normalize::Mean;
    else
      fail("csv.normalize must be \"none\" or \"mean\"");
  }
}

ModeConfig parse_mode(const json& obj, const std::string& where) {
  check_keys(obj, where, {"kind", "mean", "cov", "lo", "hi", "count"});
  ModeConfig mode;
  if (obj.contains("kind")) {
    mode.kind = get_string(obj["kind"], where + ".kind");
    if (mode.kind != "gaussian" && mode.kind != "box")
      fail(where + ".kind must be \"gaussian\" or \"box\"");
  }
  if (obj.contains("mean")) mode.mean = get_pair(obj["mean"], where + ".mean");
  if (obj.contains("cov")) mode.cov = get_cov(obj["cov"], where + ".cov");
  if (obj.contains("lo")) mode.lo = get_pair(obj["lo"], where + ".lo");
  if (obj.contains("hi")) mode.hi = get_pair(obj["hi"], where + ".hi");
  if (obj.contains("count")) mode.count = get_index(obj["count"], where + ".count");
  return mode;
}

void parse_generator(const json& obj, GeneratorConfig& gen) {
  check_keys(obj, "generator",
             {"n_per_mode", "modes", "batch_modes", "stream", "calibration_count"});
  if (obj.contains("n_per_mode"))
    gen.n_per_mode = get_index(obj["n_per_mode"], "generator.n_per_mode");
  if (obj.contains("modes")) {
    if (!obj["modes"].is_array()) fail("generator.modes must be an array");
    gen.modes.clear();
    int i = 0;
    for (const auto& m : obj["modes"])
      gen.modes.push_back(parse_mode(m, "generator.modes[" + std::to_string(i++) + "]"));
  }
  if (obj.contains("batch_modes"))
    gen.batch_modes = get_int_list(obj["batch_modes"], "generator.batch_modes");
  if (obj.contains("stream")) {
    if (!obj["stream"].is_array()) fail("generator.stream must be an array");
    gen.schedule.clear();
    int i = 0;
    for (const auto& s : obj["stream"]) {
      std::string where = "generator.stream[" + std::to_string(i++) + "]";
      check_keys(s, where, {"modes", "count"});
      SegmentConfig seg;
      if (s.contains("modes")) seg.modes = get_int_list(s["modes"], where + ".modes");
      if (s.contains("count")) seg.count = get_index(s["count"], where + ".count");
      gen.schedule.push_back(std::move(seg));
    }
  }
  if (obj.contains("calibration_count"))
    gen.calibration_count =
        get_index(obj["calibration_count"], "generator.calibration_count");
}

void parse_files(const json& obj, FileNames& files) {
  check_keys(obj, "files", {"batch", "stream", "truth", "calibration", "dataset"});
  if (obj.contains("batch")) files.batch = get_string(obj["batch"], "files.batch");
  if (obj.contains("stream")) files.stream = get_string(obj["stream"], "files.stream");
  if (obj.contains("truth")) files.truth = get_string(obj["truth"], "files.truth");
  if (obj.contains("calibration"))
    files.calibration = get_string(obj["calibration"], "files.calibration");
  if (obj.contains("dataset")) files.dataset = get_string(obj["dataset"], "files.dataset");
}

}  // namespace

RunConfig load_config(const std::string& path) {
  std::ifstream file(path);
  if (!file) fail("cannot open " + path);
  json root;
  try {
    root = json::parse(file);
  } catch (const json::exception& e) {
    fail(path + ": " + e.what());
  }

  RunConfig config = default_config();
  try {
    check_keys(root, "top level",
               {"seed", "out_dir", "eps", "min_pts", "k_graph", "dim", "support_near",
                "support_far", "ridge", "max_clusters", "grid", "sigma_t",
                "calibration_percentile", "sigma_t_scale", "n_s", "variance_window",
                "plots", "csv", "generator", "files"});
    if (root.contains("seed")) {
      if (!root["seed"].is_number_integer() || root["seed"].get<std::int64_t>() < 0)
        fail("seed must be a non-negative integer");
      config.seed = root["seed"].get<std::uint64_t>();
    }
    if (root.contains("out_dir")) config.out_dir = get_string(root["out_dir"], "out_dir");
    if (root.contains("eps")) config.params.eps = get_number(root["eps"], "eps");
    if (root.contains("min_pts")) config.params.min_pts = get_int(root["min_pts"], "min_pts");
    if (root.contains("k_graph")) config.params.k_graph = get_int(root["k_graph"], "k_graph");
    if (root.contains("dim")) config.params.dim = get_int(root["dim"], "dim");
    if (root.contains("support_near"))
      config.params.support_near = get_int(root["support_near"], "support_near");
    if (root.contains("support_far"))
      config.params.support_far = get_int(root["support_far"], "support_far");
    if (root.contains("ridge")) config.params.ridge = get_number(root["ridge"], "ridge");
    if (root.contains("max_clusters"))
      config.params.max_clusters = get_int(root["max_clusters"], "max_clusters");
    if (root.contains("grid")) parse_grid(root["grid"], config.params.grid);
    if (root.contains("sigma_t"))
      config.sigma_t = get_number_or_inf(root["sigma_t"], "sigma_t");
    if (root.contains("calibration_percentile"))
      config.calibration_percentile =
          get_number(root["calibration_percentile"], "calibration_percentile");
    if (root.contains("sigma_t_scale"))
      config.sigma_t_scale = get_number(root["sigma_t_scale"], "sigma_t_scale");
    if (root.contains("n_s")) config.n_s = get_index(root["n_s"], "n_s");
    if (root.contains("variance_window"))
      config.variance_window = get_index(root["variance_window"], "variance_window");
    if (root.contains("plots")) config.plots = get_bool(root["plots"], "plots");
    if (root.contains("csv")) parse_csv(root["csv"], config.csv);
    if (root.contains("generator")) parse_generator(root["generator"], config.generator);
    if (root.contains("files")) parse_files(root["files"], config.files);
  } catch (const json::exception& e) {
    fail(path + ": " + e.what());
  }
  return config;
}

void apply_overrides(RunConfig& config, const Overrides& o) {
  if (o.seed) config.seed = *o.seed;
  if (o.out_dir) config.out_dir = *o.out_dir;
  if (o.eps) config.params.eps = *o.eps;
  if (o.min_pts) config.params.min_pts = *o.min_pts;
  if (o.k_graph) config.params.k_graph = *o.k_graph;
  if (o.dim) config.params.dim = *o.dim;
  if (o.support_near) config.params.support_near = *o.support_near;
  if (o.support_far) config.params.support_far = *o.support_far;
  if (o.ridge) config.params.ridge = *o.ridge;
  if (o.max_clusters) config.params.max_clusters = *o.max_clusters;
  if (o.ell_count) config.params.grid.ell_count = *o.ell_count;
  if (o.ell_lo) config.params.grid.ell_lo = *o.ell_lo;
  if (o.ell_hi) config.params.grid.ell_hi = *o.ell_hi;
  if (o.noise_count) config.params.grid.noise_count = *o.noise_count;
  if (o.noise_lo) config.params.grid.noise_lo = *o.noise_lo;
  if (o.noise_hi) config.params.grid.noise_hi = *o.noise_hi;
  if (o.sigma_t) config.sigma_t = *o.sigma_t;
  if (o.calibration_percentile) config.calibration_percentile = *o.calibration_percentile;
  if (o.sigma_t_scale) config.sigma_t_scale = *o.sigma_t_scale;
  if (o.n_s) config.n_s = *o.n_s;
  if (o.variance_window) config.variance_window = *o.variance_window;
  if (o.n_per_mode) config.generator.n_per_mode = *o.n_per_mode;
  if (o.calibration_count) config.generator.calibration_count = *o.calibration_count;
  if (o.plots) config.plots = *o.plots;
}

void resolve_out_dir(RunConfig& config) {
  if (config.out_dir.empty()) {
    const char* env = std::getenv("GPISOMAP_OUTDIR");
    config.out_dir = (env != nullptr && env[0] != '\0') ? env : ".";
  }
  std::error_code ec;
  std::filesystem::create_directories(config.out_dir, ec);
  if (ec)
    throw gpi::DataError("cannot create output directory " + config.out_dir + ": " +
                         ec.message());
}

}  // namespace cli
