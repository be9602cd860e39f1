#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "relpose/synthetic.hpp"
#include "relpose/twostep.hpp"

namespace relpose {

/// Estimation methods the benchmark harness can run.
enum class Method {
  kC2p,
  kC2pFast,
  kTwoStepZT,
  kTwoStepZM,
  kTwoStepZRedundantT,
  kTwoStepZRedundantM,
};

std::string method_name(Method m);
std::optional<Method> parse_method(const std::string& name);

/// One sweep: the cartesian grid of n x noise x magnitude, repeated for a
/// number of trials with derived per-trial seeds.
struct SweepSpec {
  std::string name = "sweep";
  std::string type = "accuracy";       // accuracy | runtime | noise | pure-rotation
  std::vector<int> n_values = {50};
  std::vector<double> noise_values = {1.0};
  std::vector<double> magnitudes;      // empty: default general-motion range (0, 2]
  int trials = 100;
  std::vector<Method> methods = {Method::kC2p};
  std::uint64_t seed = 1;
  double focal_px = 800.0;
  int threads = 1;
};

struct ErrorRecord {
  std::string sweep;
  Method method;
  int n = 0;
  double noise_px = 0.0;
  double magnitude = 0.0;  // actual instance magnitude
  int trial = 0;
  std::uint64_t seed = 0;
  std::string status = "ok";  // "ok" or "error: <reason>"
  double rot_err_deg = 0.0;
  double trans_err_deg = 0.0;
  bool certified = false;
  bool is_pure_rot = false;
  double s_t2 = 0.0;
  double solve_ms = 0.0;           // problem build + SDP solve
  double disambiguation_ms = 0.0;  // recovery (single-step) or voting (two-step)
};

/// Runs one method on one instance with phase timings.
ErrorRecord run_single(const SyntheticInstance& instance, Method method);

/// Runs the full sweep. Per-record failures are tagged in-band and never
/// abort the sweep. Records come back sorted by (grid cell, trial, method)
/// so parallel and serial runs produce identical output.
std::vector<ErrorRecord> run_experiment(const SweepSpec& spec);

/// Plain-text descriptor with one [sweep <name>] section per sweep and
/// key = value lines (lists are whitespace-separated).
std::vector<SweepSpec> parse_descriptor(std::istream& in);
std::vector<SweepSpec> parse_descriptor_file(const std::string& path);

/// Stable CSV schema, one row per record.
extern const char* const kRecordCsvHeader;
void write_records_csv(const std::vector<ErrorRecord>& records, const std::string& path);

/// Per-cell medians (rotation / translation errors, timings, rates).
struct CellSummary {
  Method method;
  int n;
  double noise_px;
  double magnitude_cell;  // configured magnitude, -1 for the default range
  int trials = 0;
  int failures = 0;
  double median_rot_err_deg = 0.0;
  double median_trans_err_deg = 0.0;
  double median_s_t2 = 0.0;
  double median_solve_ms = 0.0;
  double median_disambiguation_ms = 0.0;
  double certified_rate = 0.0;
};

std::vector<CellSummary> summarize(const SweepSpec& spec, const std::vector<ErrorRecord>& records);
void write_summary_json(const SweepSpec& spec, const std::vector<CellSummary>& cells,
                        const std::string& path);
void write_medians_csv(const std::vector<CellSummary>& cells, const std::string& path);

/// Gnuplot script referencing the medians CSVs of all sweeps.
void write_plot_script(const std::vector<SweepSpec>& sweeps, const std::string& out_dir);

double median(std::vector<double> values);

}  // namespace relpose
