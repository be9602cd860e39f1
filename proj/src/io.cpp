#include "relpose/io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace relpose {

namespace {

using nlohmann::json;

struct Intrinsics {
  double fx = 0.0, fy = 0.0, cx = 0.0, cy = 0.0;
};

Vec3 pixel_to_bearing(double u, double v, const Intrinsics& k) {
  return Vec3((u - k.cx) / k.fx, (v - k.cy) / k.fy, 1.0).normalized();
}

[[noreturn]] void fail(const std::string& origin, int line_no, const std::string& message) {
  throw ParseError(origin + ":" + std::to_string(line_no) + ": " + message);
}

std::vector<double> numbers_on_line(const std::string& line) {
  std::istringstream in(line);
  std::vector<double> values;
  double v;
  while (in >> v) values.push_back(v);
  std::string leftover;
  if (in.clear(), in >> leftover) values.clear();  // non-numeric token
  return values;
}

}  // namespace

std::vector<BearingPair> read_correspondences(std::istream& in, const std::string& origin) {
  std::string line;
  int line_no = 0;
  std::string format;
  Intrinsics k0, k1;
  bool have_k0 = false, have_k1 = false;
  std::vector<BearingPair> pairs;

  while (std::getline(in, line)) {
    ++line_no;
    std::string text = line;
    if (const auto hash = text.find('#'); hash != std::string::npos) text = text.substr(0, hash);
    std::istringstream probe(text);
    std::string first;
    if (!(probe >> first)) continue;

    if (first == "format") {
      std::string value;
      probe >> value;
      if (value != "BEARINGS" && value != "PIXELS") {
        fail(origin, line_no, "format must be BEARINGS or PIXELS, got '" + value + "'");
      }
      format = value;
      continue;
    }
    if (first == "intrinsics0" || first == "intrinsics1") {
      Intrinsics k;
      if (!(probe >> k.fx >> k.fy >> k.cx >> k.cy) || k.fx == 0.0 || k.fy == 0.0) {
        fail(origin, line_no, "expected '" + first + " fx fy cx cy' with nonzero focals");
      }
      (first == "intrinsics0" ? k0 : k1) = k;
      (first == "intrinsics0" ? have_k0 : have_k1) = true;
      continue;
    }
    if (format.empty()) {
      fail(origin, line_no, "data before a 'format BEARINGS|PIXELS' header");
    }

    const std::vector<double> values = numbers_on_line(text);
    if (format == "BEARINGS") {
      if (values.size() != 6 && values.size() != 7) {
        fail(origin, line_no, "expected 6 bearing components and an optional weight");
      }
      const Vec3 f0(values[0], values[1], values[2]);
      const Vec3 f1(values[3], values[4], values[5]);
      if (std::abs(f0.norm() - 1.0) > 1e-6 || std::abs(f1.norm() - 1.0) > 1e-6) {
        fail(origin, line_no, "bearing is not unit-norm within 1e-6");
      }
      const double weight = values.size() == 7 ? values[6] : 1.0;
      if (weight < 0.0) fail(origin, line_no, "negative weight");
      pairs.emplace_back(UnitVector3(f0), UnitVector3(f1), weight);
    } else {
      if (!have_k0 || !have_k1) {
        fail(origin, line_no, "PIXELS data requires intrinsics0 and intrinsics1 header lines");
      }
      if (values.size() != 4) {
        fail(origin, line_no, "expected 'u0 v0 u1 v1'");
      }
      pairs.emplace_back(UnitVector3(pixel_to_bearing(values[0], values[1], k0)),
                         UnitVector3(pixel_to_bearing(values[2], values[3], k1)));
    }
  }
  if (format.empty()) {
    throw ParseError(origin + ": missing 'format' header");
  }
  return pairs;
}

std::vector<BearingPair> read_correspondence_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  return read_correspondences(in, path);
}

void write_correspondence_file(const std::vector<BearingPair>& pairs, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out.precision(17);
  out << "format BEARINGS\n";
  for (const BearingPair& pair : pairs) {
    const Vec3& f0 = pair.f0.vec();
    const Vec3& f1 = pair.f1.vec();
    out << f0.x() << ' ' << f0.y() << ' ' << f0.z() << ' '  //
        << f1.x() << ' ' << f1.y() << ' ' << f1.z();
    if (pair.weight != 1.0) out << ' ' << pair.weight;
    out << '\n';
  }
}

namespace {

json mat3_row_major(const Mat3& m) {
  json out = json::array();
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) out.push_back(m(r, c));
  }
  return out;
}

json vec3_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

}  // namespace

json pose_estimate_to_json(const PoseEstimate& estimate, const std::string& variant,
                           const std::string& method) {
  json doc;
  doc["E"] = mat3_row_major(estimate.essential.mat());
  doc["R"] = mat3_row_major(estimate.pose.rotation.mat());
  doc["t"] = vec3_json(estimate.pose.translation.vec());
  doc["q"] = vec3_json(estimate.q.vec());
  doc["s_t2"] = estimate.s_t_squared;
  doc["certified"] = estimate.certified;
  doc["is_pure_rot"] = estimate.is_pure_rotation;
  doc["gap"] = estimate.solver_gap;
  doc["eigenvalues"] = estimate.eigenvalue_report;
  doc["variant"] = variant;
  if (!method.empty()) doc["method"] = method;
  doc["solver_status"] = solver_status_name(estimate.solver_status);
  return doc;
}

json ground_truth_to_json(const SyntheticInstance& instance, const SceneConfig& config) {
  json doc;
  doc["R"] = mat3_row_major(instance.ground_truth.rotation.mat());
  doc["t"] = vec3_json(instance.ground_truth.translation.vec());
  doc["translation_magnitude"] = instance.translation_magnitude;
  doc["pure_rotation"] = instance.translation_magnitude == 0.0;
  json depths = json::array();
  for (const auto& [d0, d1] : instance.point_depths) depths.push_back(json::array({d0, d1}));
  doc["depths"] = depths;
  doc["n"] = config.n;
  doc["noise_px"] = config.noise_px;
  doc["focal_px"] = config.focal_px;
  doc["seed"] = config.seed;
  return doc;
}

std::string validate_against_schema(const json& value, const json& schema) {
  if (schema.contains("type")) {
    const std::string type = schema["type"];
    const bool ok = (type == "object" && value.is_object()) ||
                    (type == "array" && value.is_array()) ||
                    (type == "number" && value.is_number()) ||
                    (type == "integer" && value.is_number_integer()) ||
                    (type == "string" && value.is_string()) ||
                    (type == "boolean" && value.is_boolean());
    if (!ok) return "expected type " + type + ", got " + value.dump().substr(0, 40);
  }
  if (schema.contains("enum")) {
    bool found = false;
    for (const auto& candidate : schema["enum"]) found = found || candidate == value;
    if (!found) return "value " + value.dump() + " not in enum";
  }
  if (schema.contains("required")) {
    for (const auto& key : schema["required"]) {
      if (!value.contains(key.get<std::string>())) {
        return "missing required key " + key.get<std::string>();
      }
    }
  }
  if (schema.contains("properties") && value.is_object()) {
    for (const auto& [key, sub_schema] : schema["properties"].items()) {
      if (!value.contains(key)) continue;
      const std::string err = validate_against_schema(value.at(key), sub_schema);
      if (!err.empty()) return key + ": " + err;
    }
  }
  if (schema.contains("items") && value.is_array()) {
    for (size_t i = 0; i < value.size(); ++i) {
      const std::string err = validate_against_schema(value[i], schema["items"]);
      if (!err.empty()) return "[" + std::to_string(i) + "]: " + err;
    }
  }
  if (schema.contains("minItems") && value.is_array() &&
      value.size() < schema["minItems"].get<size_t>()) {
    return "array shorter than minItems";
  }
  return "";
}

namespace {

void emit_json(const json& doc, const std::string& output_path) {
  if (output_path.empty()) {
    std::cout << doc.dump(2) << std::endl;
  } else {
    std::ofstream out(output_path);
    if (!out) throw Error("cannot write " + output_path);
    out << doc.dump(2) << '\n';
  }
}

}  // namespace

int cmd_solve(const SolveRequest& request) {
  try {
    const std::vector<BearingPair> pairs = read_correspondence_file(request.input_path);
    if (pairs.size() < 6) {
      throw TooFewCorrespondences("input has " + std::to_string(pairs.size()) +
                                  " correspondences; at least 6 are required");
    }
    PoseEstimate estimate;
    if (request.variant == "c2p" || request.variant == "c2p-fast") {
      if (!request.method.empty()) {
        throw Error("disambiguation method applies to two-step variants only");
      }
      EstimatorOptions options;
      options.variant = request.variant == "c2p" ? Variant::kC2p : Variant::kC2pFast;
      options.eps_t = request.eps_t;
      options.solver = request.solver;
      estimate = solve_c2p(pairs, options);
    } else if (request.variant == "two-step-z" || request.variant == "two-step-z-redundant") {
      TwoStepOptions options;
      options.variant =
          request.variant == "two-step-z" ? Variant::kQcqpZ : Variant::kQcqpZRedundant;
      const std::string method = request.method.empty() ? "m" : request.method;
      if (method != "t" && method != "m") {
        throw Error("disambiguation method must be 't' or 'm'");
      }
      options.method = method == "t" ? DisambiguationMethod::kTriangulation
                                     : DisambiguationMethod::kMidpointSigns;
      options.eps_t = request.eps_t;
      options.solver = request.solver;
      estimate = solve_two_step(pairs, options);
    } else {
      throw Error("unknown variant '" + request.variant + "'");
    }
    emit_json(pose_estimate_to_json(estimate, request.variant, request.method),
              request.output_path);
    if (!estimate.certified) {
      std::cerr << "warning: result is not certified (solver "
                << solver_status_name(estimate.solver_status) << ", rank "
                << estimate.certificate.rank_full_block << "/" << estimate.certificate.rank_e_block
                << "/" << estimate.certificate.rank_tq_block << ")\n";
      return 2;
    }
    return 0;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return 1;
  }
}

int cmd_synth(const SynthRequest& request) {
  try {
    const SyntheticInstance instance = generate_scene(request.config);
    write_correspondence_file(instance.pairs, request.output_path);
    std::string sidecar = request.sidecar_path;
    if (sidecar.empty()) {
      const std::filesystem::path p(request.output_path);
      sidecar = (p.parent_path() / (p.stem().string() + ".gt.json")).string();
    }
    std::ofstream out(sidecar);
    if (!out) throw Error("cannot write " + sidecar);
    out << ground_truth_to_json(instance, request.config).dump(2) << '\n';
    std::cerr << "wrote " << request.output_path << " and " << sidecar << '\n';
    return 0;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return 1;
  }
}

int cmd_bench(const BenchRequest& request) {
  try {
    const std::vector<SweepSpec> sweeps = parse_descriptor_file(request.descriptor_path);
    std::filesystem::create_directories(request.output_dir);
    bool any_ok = false;
    for (const SweepSpec& spec : sweeps) {
      const std::vector<ErrorRecord> records = run_experiment(spec);
      const std::vector<CellSummary> cells = summarize(spec, records);
      const std::string base = request.output_dir + "/" + spec.name;
      write_records_csv(records, base + ".csv");
      write_summary_json(spec, cells, base + "_summary.json");
      write_medians_csv(cells, base + "_medians.csv");
      for (const ErrorRecord& r : records) {
        if (r.status == "ok") {
          any_ok = true;
          break;
        }
      }
      std::cerr << "sweep " << spec.name << ": " << records.size() << " records\n";
    }
    write_plot_script(sweeps, request.output_dir);
    return any_ok ? 0 : 1;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return 1;
  }
}

}  // namespace relpose
