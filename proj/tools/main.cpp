#include "cli.hpp"

#include "gpisomap/types.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace {

// Registers the options shared by every subcommand. Flag values land in
// `overrides` and win over the config file.
void add_common_options(CLI::App* sub, std::string& config_path, cli::Overrides& o,
                        bool& plots_on, bool& plots_off) {
  sub->add_option("--config", config_path, "JSON config file (flags override it)");
  sub->add_option("--seed", o.seed, "master random seed");
  sub->add_option("--out", o.out_dir, "output directory (default: $GPISOMAP_OUTDIR or .)");
  sub->add_option("--eps", o.eps, "density-clustering neighbourhood radius");
  sub->add_option("--min-pts", o.min_pts, "density-clustering core-point threshold");
  sub->add_option("--k-graph", o.k_graph, "neighbourhood graph degree");
  sub->add_option("--dim", o.dim, "embedding dimension");
  sub->add_option("--support-near", o.support_near, "near support pairs per cluster");
  sub->add_option("--support-far", o.support_far, "far support pairs per cluster");
  sub->add_option("--ridge", o.ridge, "ridge strength for the cluster-alignment fit");
  sub->add_option("--max-clusters", o.max_clusters, "abort above this many clusters");
  sub->add_option("--ell-count", o.ell_count, "length-scale grid size");
  sub->add_option("--ell-lo", o.ell_lo, "length-scale grid lower factor");
  sub->add_option("--ell-hi", o.ell_hi, "length-scale grid upper factor");
  sub->add_option("--noise-count", o.noise_count, "noise grid size");
  sub->add_option("--noise-lo", o.noise_lo, "noise grid lower bound");
  sub->add_option("--noise-hi", o.noise_hi, "noise grid upper bound");
  sub->add_option("--sigma-t", o.sigma_t,
                  "variance threshold ('inf' disables; negative calibrates)");
  sub->add_option("--calibration-percentile", o.calibration_percentile,
                  "calibration percentile for the threshold");
  sub->add_option("--sigma-t-scale", o.sigma_t_scale,
                  "multiplier applied to the calibrated threshold");
  sub->add_option("--n-s", o.n_s, "buffered novelties that trigger a relearn");
  sub->add_option("--variance-window", o.variance_window,
                  "window for the variance trace plot");
  sub->add_option("--n-per-mode", o.n_per_mode, "generator points per mode");
  sub->add_option("--calibration-count", o.calibration_count,
                  "generator calibration draw size");
  sub->add_flag("--plots", plots_on, "write SVG plots");
  sub->add_flag("--no-plots", plots_off, "skip SVG plots");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"geodesic-kernel manifold mapper: batch embedding, stream extension, "
               "drift detection"};
  app.require_subcommand(1);

  std::string config_path;
  cli::Overrides overrides;
  bool plots_on = false, plots_off = false;
  bool inject_fault = false;
  std::vector<gpi::Index> sizes = {100, 250, 550, 1000, 2000};
  int runs = 5;
  gpi::Index batch_n = 500, stream_n = 200;
  double noise_var = 0.01;
  std::vector<double> multipliers = {1.0, 10.0, 100.0};

  CLI::App* generate = app.add_subcommand("generate", "write a synthetic dataset");
  CLI::App* run = app.add_subcommand("run", "batch phase plus stream processing");
  CLI::App* verify =
      app.add_subcommand("verify", "dense-oracle and harness checks with a JSON report");
  CLI::App* convergence =
      app.add_subcommand("convergence", "embedding error as the batch grows");
  CLI::App* equivalence =
      app.add_subcommand("equivalence", "stream extension vs landmark form by length scale");

  for (CLI::App* sub : {generate, run, verify, convergence, equivalence})
    add_common_options(sub, config_path, overrides, plots_on, plots_off);
  verify->add_flag("--inject-fault", inject_fault,
                   "corrupt a fitted kernel coefficient (negative control)");
  convergence->add_option("--sizes", sizes, "batch sizes to sweep")->delimiter(',');
  convergence->add_option("--runs", runs, "independent repetitions");
  equivalence->add_option("--batch-n", batch_n, "batch size");
  equivalence->add_option("--stream-n", stream_n, "stream probe count");
  equivalence->add_option("--noise", noise_var, "gp noise variance");
  equivalence->add_option("--multipliers", multipliers, "length-scale multiples of the diameter")
      ->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    cli::RunConfig config =
        config_path.empty() ? cli::default_config() : cli::load_config(config_path);
    if (plots_off)
      overrides.plots = false;
    else if (plots_on)
      overrides.plots = true;
    cli::apply_overrides(config, overrides);
    cli::resolve_out_dir(config);

    if (generate->parsed()) return cli::cmd_generate(config);
    if (run->parsed()) return cli::cmd_run(config);
    if (verify->parsed()) return cli::cmd_verify(config, inject_fault);
    if (convergence->parsed()) return cli::cmd_convergence(config, sizes, runs);
    if (equivalence->parsed())
      return cli::cmd_equivalence(config, batch_n, stream_n, noise_var, multipliers);
    std::cerr << "no subcommand\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const gpi::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
