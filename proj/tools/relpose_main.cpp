#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "relpose/io.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Globally-optimal relative pose from bearing correspondences"};
  app.require_subcommand(1);

  relpose::SolveRequest solve_request;
  if (const char* trace = std::getenv("RELPOSE_SDP_TRACE")) {
    solve_request.solver.trace_path = trace;
  }
  CLI::App* solve = app.add_subcommand("solve", "Estimate the relative pose from a file");
  solve->add_option("-i,--input", solve_request.input_path, "Correspondence file")->required();
  solve->add_option("-o,--output", solve_request.output_path, "Output JSON path (default stdout)");
  solve
      ->add_option("--variant", solve_request.variant,
                   "c2p | c2p-fast | two-step-z | two-step-z-redundant")
      ->default_val("c2p");
  solve->add_option("--method", solve_request.method, "Disambiguation: t | m (two-step only)");
  solve->add_option("--eps-t", solve_request.eps_t, "Pure-rotation threshold on s_t^2")
      ->default_val(1e-3);
  solve->add_option("--gap-tol", solve_request.solver.gap_tol, "SDP duality gap tolerance");
  solve->add_option("--feas-tol", solve_request.solver.feas_tol, "SDP feasibility tolerance");
  solve->add_option("--max-iterations", solve_request.solver.max_iterations, "SDP iteration cap");
  solve->add_option("--trace", solve_request.solver.trace_path, "Per-iteration CSV trace path");

  relpose::SynthRequest synth_request;
  double magnitude = -1.0;
  CLI::App* synth = app.add_subcommand("synth", "Generate a synthetic correspondence file");
  synth->add_option("-o,--output", synth_request.output_path, "Output correspondence file")
      ->required();
  synth->add_option("--sidecar", synth_request.sidecar_path,
                    "Ground-truth JSON path (default <output>.gt.json)");
  synth->add_option("--n", synth_request.config.n, "Number of correspondences")->default_val(50);
  synth->add_option("--noise", synth_request.config.noise_px, "Pixel noise")->default_val(0.0);
  synth->add_option("--focal", synth_request.config.focal_px, "Focal length in pixels")
      ->default_val(800.0);
  synth->add_option("--translation-magnitude", magnitude,
                    "Fixed translation magnitude (default: sampled in (0, 2])");
  synth->add_option("--rotation-bound", synth_request.config.rotation_bound_rad,
                    "Euler angle bound in radians");
  synth->add_option("--depth-min", synth_request.config.depth_min, "Minimum point distance");
  synth->add_option("--depth-max", synth_request.config.depth_max, "Maximum point distance");
  synth->add_option("--seed", synth_request.config.seed, "RNG seed")->default_val(0);

  relpose::BenchRequest bench_request;
  CLI::App* bench = app.add_subcommand("bench", "Run benchmark sweeps from a descriptor");
  bench->add_option("descriptor", bench_request.descriptor_path, "Sweep descriptor file")
      ->required();
  bench->add_option("-o,--out", bench_request.output_dir, "Output directory")->default_val(".");

  CLI11_PARSE(app, argc, argv);

  if (solve->parsed()) return relpose::cmd_solve(solve_request);
  if (synth->parsed()) {
    if (magnitude >= 0.0) {
      synth_request.config.magnitude_lo = magnitude;
      synth_request.config.magnitude_hi = magnitude;
    }
    return relpose::cmd_synth(synth_request);
  }
  if (bench->parsed()) return relpose::cmd_bench(bench_request);
  return 1;
}
