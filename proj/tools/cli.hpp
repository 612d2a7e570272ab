#pragma once

// Shared declarations for the command-line tool: the configuration model,
// its JSON loader and flag overrides, and the five subcommand entry points.

#include "gpisomap/data.hpp"
#include "gpisomap/gp.hpp"
#include "gpisomap/manifold.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace cli {

// One synthetic sampling mode on the unrolled (u, v) plane: a Gaussian blob
// or a uniform box.
struct ModeConfig {
  std::string kind = "gaussian";  // "gaussian" | "box"
  std::array<double, 2> mean{0.0, 0.0};
  std::array<double, 4> cov{1.0, 0.0, 0.0, 1.0};  // row-major 2x2
  std::array<double, 2> lo{0.0, 0.0};
  std::array<double, 2> hi{1.0, 1.0};
  gpi::Index count = 0;  // 0: inherit n_per_mode
};

struct SegmentConfig {
  std::vector<int> modes;
  gpi::Index count = 0;
};

struct GeneratorConfig {
  gpi::Index n_per_mode = 2000;
  std::vector<ModeConfig> modes;        // default: four compact patches
  std::vector<int> batch_modes;         // modes whose train split forms the batch
  std::vector<SegmentConfig> schedule;  // stream segments, drawn from test splits
  gpi::Index calibration_count = 300;   // 0 disables the calibration draw
};

struct FileNames {
  std::string batch = "batch.csv";
  std::string stream = "stream.csv";
  std::string truth = "truth.csv";
  std::string calibration = "calibration.csv";
  std::string dataset = "dataset.json";
};

struct RunConfig {
  std::uint64_t seed = 1;
  std::string out_dir;  // resolved by resolve_out_dir
  gpi::BatchParams params;
  double sigma_t = -1.0;  // negative: calibrate from the calibration file
  double calibration_percentile = 99.0;
  double sigma_t_scale = 0.7;
  gpi::Index n_s = 1000;          // buffered novelties that trigger a relearn
  gpi::Index variance_window = 100;
  bool plots = true;
  gpi::CsvSchema csv;
  GeneratorConfig generator;
  FileNames files;
};

// Flag-settable fields; unset optionals leave the file (or default) value.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<double> eps, ridge, sigma_t, calibration_percentile, sigma_t_scale;
  std::optional<double> ell_lo, ell_hi, noise_lo, noise_hi;
  std::optional<int> min_pts, k_graph, dim, support_near, support_far, max_clusters;
  std::optional<int> ell_count, noise_count;
  std::optional<gpi::Index> n_s, variance_window, n_per_mode, calibration_count;
  std::optional<bool> plots;
};

RunConfig default_config();

// Parses a JSON config file on top of the defaults. Unknown keys and type
// mismatches throw std::invalid_argument (a usage error, exit code 1).
RunConfig load_config(const std::string& path);

void apply_overrides(RunConfig& config, const Overrides& o);

// Precedence: --out flag > config file > $GPISOMAP_OUTDIR > current dir.
// Creates the directory.
void resolve_out_dir(RunConfig& config);

int cmd_generate(const RunConfig& config);
int cmd_run(const RunConfig& config);
int cmd_verify(const RunConfig& config, bool inject_fault);
int cmd_convergence(const RunConfig& config, const std::vector<gpi::Index>& sizes,
                    int runs);
int cmd_equivalence(const RunConfig& config, gpi::Index batch_n, gpi::Index stream_n,
                    double noise_var, const std::vector<double>& multipliers);

}  // namespace cli
