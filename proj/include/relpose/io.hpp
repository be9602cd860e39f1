#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "relpose/experiments.hpp"
#include "relpose/recovery.hpp"
#include "relpose/synthetic.hpp"

namespace relpose {

/// Correspondence files are plain text with a header line declaring the
/// format:
///   format BEARINGS   -> rows "f0x f0y f0z f1x f1y f1z [weight]"
///   format PIXELS     -> header "intrinsics0 fx fy cx cy" and
///                        "intrinsics1 fx fy cx cy", rows "u0 v0 u1 v1"
/// Empty lines and lines starting with '#' are ignored. BEARINGS rows must
/// already be unit-norm within 1e-6 (they are re-normalized exactly);
/// offending rows are rejected with their line number.
std::vector<BearingPair> read_correspondences(std::istream& in, const std::string& origin);
std::vector<BearingPair> read_correspondence_file(const std::string& path);
void write_correspondence_file(const std::vector<BearingPair>& pairs, const std::string& path);

nlohmann::json pose_estimate_to_json(const PoseEstimate& estimate, const std::string& variant,
                                     const std::string& method = "");
nlohmann::json ground_truth_to_json(const SyntheticInstance& instance, const SceneConfig& config);

/// Minimal structural validator for the checked-in schema documents
/// (supports type / properties / required / items / enum). Returns an empty
/// string on success, else the first violation.
std::string validate_against_schema(const nlohmann::json& value, const nlohmann::json& schema);

struct SolveRequest {
  std::string input_path;
  std::string variant = "c2p";  // c2p | c2p-fast | two-step-z | two-step-z-redundant
  std::string method;           // t | m (two-step only)
  double eps_t = 1e-3;
  std::string output_path;  // empty: stdout
  SolverConfig solver;
};

struct SynthRequest {
  SceneConfig config;
  std::string output_path;
  std::string sidecar_path;  // empty: derived from output_path
};

struct BenchRequest {
  std::string descriptor_path;
  std::string output_dir = ".";
};

// Exit codes: 0 success (solve: certified optimal), 1 error, 2
// uncertified result (still written). Payloads go to stdout or files,
// diagnostics to stderr.
int cmd_solve(const SolveRequest& request);
int cmd_synth(const SynthRequest& request);
int cmd_bench(const BenchRequest& request);

}  // namespace relpose
