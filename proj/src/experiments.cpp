#include "relpose/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "relpose/recovery.hpp"

namespace relpose {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

struct MethodTraits {
  Variant variant;
  bool two_step;
  DisambiguationMethod method;
};

MethodTraits traits(Method m) {
  switch (m) {
    case Method::kC2p:
      return {Variant::kC2p, false, DisambiguationMethod::kMidpointSigns};
    case Method::kC2pFast:
      return {Variant::kC2pFast, false, DisambiguationMethod::kMidpointSigns};
    case Method::kTwoStepZT:
      return {Variant::kQcqpZ, true, DisambiguationMethod::kTriangulation};
    case Method::kTwoStepZM:
      return {Variant::kQcqpZ, true, DisambiguationMethod::kMidpointSigns};
    case Method::kTwoStepZRedundantT:
      return {Variant::kQcqpZRedundant, true, DisambiguationMethod::kTriangulation};
    case Method::kTwoStepZRedundantM:
      return {Variant::kQcqpZRedundant, true, DisambiguationMethod::kMidpointSigns};
  }
  throw Error("unknown method");
}

}  // namespace

std::string method_name(Method m) {
  switch (m) {
    case Method::kC2p:
      return "c2p";
    case Method::kC2pFast:
      return "c2p-fast";
    case Method::kTwoStepZT:
      return "two-step-z:t";
    case Method::kTwoStepZM:
      return "two-step-z:m";
    case Method::kTwoStepZRedundantT:
      return "two-step-z-redundant:t";
    case Method::kTwoStepZRedundantM:
      return "two-step-z-redundant:m";
  }
  return "unknown";
}

std::optional<Method> parse_method(const std::string& name) {
  for (Method m : {Method::kC2p, Method::kC2pFast, Method::kTwoStepZT, Method::kTwoStepZM,
                   Method::kTwoStepZRedundantT, Method::kTwoStepZRedundantM}) {
    if (method_name(m) == name) return m;
  }
  return std::nullopt;
}

ErrorRecord run_single(const SyntheticInstance& instance, Method method) {
  ErrorRecord record;
  record.method = method;
  record.magnitude = instance.translation_magnitude;
  const MethodTraits mt = traits(method);

  const auto t0 = Clock::now();
  const QcqpProblem qcqp = build_qcqp(instance.pairs, mt.variant);
  const SdpSolution solution = solve(SdpProblem::from_qcqp(qcqp));
  record.solve_ms = ms_since(t0);

  PoseEstimate estimate = [&] {
    TwoStepOptions two_step_options;
    two_step_options.variant = mt.variant;
    two_step_options.method = mt.method;
    EstimatorOptions single_step_options;
    single_step_options.variant = mt.variant;
    const auto t1 = Clock::now();
    PoseEstimate e = mt.two_step ? recover_two_step(solution, instance.pairs, two_step_options)
                                 : recover_c2p(solution, single_step_options);
    record.disambiguation_ms = ms_since(t1);
    return e;
  }();

  const auto [rot_err, trans_err] = pose_errors(instance.ground_truth, estimate.pose);
  record.rot_err_deg = rot_err;
  record.trans_err_deg = trans_err;
  record.certified = estimate.certified;
  record.is_pure_rot = estimate.is_pure_rotation;
  record.s_t2 = estimate.s_t_squared;
  return record;
}

std::vector<ErrorRecord> run_experiment(const SweepSpec& spec) {
  struct Cell {
    int n;
    double noise;
    double magnitude;  // < 0 marks the default range
  };
  std::vector<Cell> cells;
  const std::vector<double> magnitudes =
      spec.magnitudes.empty() ? std::vector<double>{-1.0} : spec.magnitudes;
  for (int n : spec.n_values) {
    for (double noise : spec.noise_values) {
      for (double mag : magnitudes) cells.push_back({n, noise, mag});
    }
  }

  const int total = static_cast<int>(cells.size()) * spec.trials;
  std::vector<std::vector<ErrorRecord>> per_task(total);

  auto run_task = [&](int task) {
    const int cell_index = task / spec.trials;
    const int trial = task % spec.trials;
    const Cell& cell = cells[cell_index];

    SceneConfig config;
    config.n = cell.n;
    config.noise_px = cell.noise;
    config.focal_px = spec.focal_px;
    if (cell.magnitude >= 0.0) {
      config.magnitude_lo = config.magnitude_hi = cell.magnitude;
    }
    config.seed = CounterRng::derive(spec.seed, {static_cast<std::uint64_t>(cell_index),
                                                 static_cast<std::uint64_t>(trial)});

    std::vector<ErrorRecord>& out = per_task[task];
    SyntheticInstance instance;
    try {
      instance = generate_scene(config);
    } catch (const std::exception& ex) {
      for (Method m : spec.methods) {
        ErrorRecord record;
        record.sweep = spec.name;
        record.method = m;
        record.n = cell.n;
        record.noise_px = cell.noise;
        record.magnitude = std::max(cell.magnitude, 0.0);
        record.trial = trial;
        record.seed = config.seed;
        record.status = std::string("error: ") + ex.what();
        out.push_back(record);
      }
      return;
    }
    for (Method m : spec.methods) {
      ErrorRecord record;
      try {
        record = run_single(instance, m);
      } catch (const std::exception& ex) {
        record = ErrorRecord{};
        record.method = m;
        record.magnitude = instance.translation_magnitude;
        record.status = std::string("error: ") + ex.what();
      }
      record.sweep = spec.name;
      record.n = cell.n;
      record.noise_px = cell.noise;
      record.trial = trial;
      record.seed = config.seed;
      out.push_back(record);
    }
  };

  const int threads = std::max(1, spec.threads);
  if (threads == 1) {
    for (int task = 0; task < total; ++task) run_task(task);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int w = 0; w < threads; ++w) {
      pool.emplace_back([&, w] {
        for (int task = w; task < total; task += threads) run_task(task);
      });
    }
    for (std::thread& th : pool) th.join();
  }

  std::vector<ErrorRecord> records;
  records.reserve(total * spec.methods.size());
  for (auto& task_records : per_task) {
    for (auto& record : task_records) records.push_back(std::move(record));
  }
  return records;
}

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

template <typename T>
std::vector<T> parse_list(const std::string& value, int line_no) {
  std::vector<T> out;
  std::istringstream in(value);
  std::string token;
  while (in >> token) {
    try {
      if constexpr (std::is_same_v<T, int>) {
        out.push_back(std::stoi(token));
      } else {
        out.push_back(std::stod(token));
      }
    } catch (const std::exception&) {
      throw ParseError("line " + std::to_string(line_no) + ": bad numeric value '" + token + "'");
    }
  }
  if (out.empty()) {
    throw ParseError("line " + std::to_string(line_no) + ": empty list");
  }
  return out;
}

}  // namespace

std::vector<SweepSpec> parse_descriptor(std::istream& in) {
  std::vector<SweepSpec> sweeps;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string text = trim(line);
    if (text.empty() || text[0] == '#') continue;
    if (text.front() == '[') {
      if (text.back() != ']') {
        throw ParseError("line " + std::to_string(line_no) + ": unterminated section header");
      }
      std::istringstream header(text.substr(1, text.size() - 2));
      std::string keyword, name;
      header >> keyword >> name;
      if (keyword != "sweep" || name.empty()) {
        throw ParseError("line " + std::to_string(line_no) + ": expected [sweep <name>]");
      }
      SweepSpec spec;
      spec.name = name;
      sweeps.push_back(spec);
      continue;
    }
    if (sweeps.empty()) {
      throw ParseError("line " + std::to_string(line_no) + ": key before any [sweep] section");
    }
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      throw ParseError("line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    SweepSpec& spec = sweeps.back();
    if (key == "type") {
      spec.type = value;
    } else if (key == "n") {
      spec.n_values = parse_list<int>(value, line_no);
    } else if (key == "noise_px") {
      spec.noise_values = parse_list<double>(value, line_no);
    } else if (key == "magnitude") {
      spec.magnitudes = parse_list<double>(value, line_no);
    } else if (key == "trials") {
      spec.trials = std::stoi(value);
    } else if (key == "seed") {
      spec.seed = std::stoull(value);
    } else if (key == "focal_px") {
      spec.focal_px = std::stod(value);
    } else if (key == "threads") {
      spec.threads = std::stoi(value);
    } else if (key == "methods") {
      spec.methods.clear();
      std::istringstream names(value);
      std::string name;
      while (names >> name) {
        const auto method = parse_method(name);
        if (!method) {
          throw ParseError("line " + std::to_string(line_no) + ": unknown method '" + name + "'");
        }
        spec.methods.push_back(*method);
      }
      if (spec.methods.empty()) {
        throw ParseError("line " + std::to_string(line_no) + ": empty method list");
      }
    } else {
      throw ParseError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
  }
  if (sweeps.empty()) {
    throw ParseError("descriptor declares no sweeps");
  }
  return sweeps;
}

std::vector<SweepSpec> parse_descriptor_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError("cannot open descriptor file " + path);
  }
  return parse_descriptor(in);
}

const char* const kRecordCsvHeader =
    "sweep,method,n,noise_px,magnitude,trial,seed,status,rot_err_deg,trans_err_deg,"
    "certified,is_pure_rot,s_t2,solve_ms,disambiguation_ms";

void write_records_csv(const std::vector<ErrorRecord>& records, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out.precision(17);
  out << kRecordCsvHeader << '\n';
  for (const ErrorRecord& r : records) {
    std::string status = r.status;
    std::replace(status.begin(), status.end(), ',', ';');
    out << r.sweep << ',' << method_name(r.method) << ',' << r.n << ',' << r.noise_px << ','
        << r.magnitude << ',' << r.trial << ',' << r.seed << ',' << status << ',' << r.rot_err_deg
        << ',' << r.trans_err_deg << ',' << (r.certified ? 1 : 0) << ',' << (r.is_pure_rot ? 1 : 0)
        << ',' << r.s_t2 << ',' << r.solve_ms << ',' << r.disambiguation_ms << '\n';
  }
}

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const size_t mid = values.size() / 2;
  return values.size() % 2 == 1 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

std::vector<CellSummary> summarize(const SweepSpec& spec, const std::vector<ErrorRecord>& records) {
  const std::vector<double> magnitudes =
      spec.magnitudes.empty() ? std::vector<double>{-1.0} : spec.magnitudes;
  std::vector<CellSummary> cells;
  for (Method method : spec.methods) {
    for (int n : spec.n_values) {
      for (double noise : spec.noise_values) {
        for (double mag : magnitudes) {
          CellSummary cell;
          cell.method = method;
          cell.n = n;
          cell.noise_px = noise;
          cell.magnitude_cell = mag;
          std::vector<double> rot, trans, st2, solve_ms, disamb_ms;
          int certified = 0;
          for (const ErrorRecord& r : records) {
            if (r.method != method || r.n != n || r.noise_px != noise) continue;
            if (mag >= 0.0 && r.magnitude != mag) continue;
            ++cell.trials;
            if (r.status != "ok") {
              ++cell.failures;
              continue;
            }
            rot.push_back(r.rot_err_deg);
            trans.push_back(r.trans_err_deg);
            st2.push_back(r.s_t2);
            solve_ms.push_back(r.solve_ms);
            disamb_ms.push_back(r.disambiguation_ms);
            if (r.certified) ++certified;
          }
          if (cell.trials == 0) continue;
          cell.median_rot_err_deg = median(rot);
          cell.median_trans_err_deg = median(trans);
          cell.median_s_t2 = median(st2);
          cell.median_solve_ms = median(solve_ms);
          cell.median_disambiguation_ms = median(disamb_ms);
          const int ok = cell.trials - cell.failures;
          cell.certified_rate = ok > 0 ? static_cast<double>(certified) / ok : 0.0;
          cells.push_back(cell);
        }
      }
    }
  }
  return cells;
}

void write_summary_json(const SweepSpec& spec, const std::vector<CellSummary>& cells,
                        const std::string& path) {
  nlohmann::json doc;
  doc["sweep"] = spec.name;
  doc["type"] = spec.type;
  doc["trials"] = spec.trials;
  doc["seed"] = spec.seed;
  doc["cells"] = nlohmann::json::array();
  for (const CellSummary& cell : cells) {
    doc["cells"].push_back({
        {"method", method_name(cell.method)},
        {"n", cell.n},
        {"noise_px", cell.noise_px},
        {"magnitude", cell.magnitude_cell},
        {"trials", cell.trials},
        {"failures", cell.failures},
        {"median_rot_err_deg", cell.median_rot_err_deg},
        {"median_trans_err_deg", cell.median_trans_err_deg},
        {"median_s_t2", cell.median_s_t2},
        {"median_solve_ms", cell.median_solve_ms},
        {"median_disambiguation_ms", cell.median_disambiguation_ms},
        {"certified_rate", cell.certified_rate},
    });
  }
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << doc.dump(2) << '\n';
}

void write_medians_csv(const std::vector<CellSummary>& cells, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out.precision(17);
  out << "method,n,noise_px,magnitude,median_rot_err_deg,median_trans_err_deg,median_s_t2,"
         "median_solve_ms,median_disambiguation_ms,certified_rate\n";
  for (const CellSummary& c : cells) {
    out << method_name(c.method) << ',' << c.n << ',' << c.noise_px << ',' << c.magnitude_cell
        << ',' << c.median_rot_err_deg << ',' << c.median_trans_err_deg << ',' << c.median_s_t2
        << ',' << c.median_solve_ms << ',' << c.median_disambiguation_ms << ','
        << c.certified_rate << '\n';
  }
}

void write_plot_script(const std::vector<SweepSpec>& sweeps, const std::string& out_dir) {
  std::ofstream out(out_dir + "/plots.gp");
  if (!out) throw Error("cannot write plot script in " + out_dir);
  out << "# gnuplot script generated by relpose bench\n"
      << "set datafile separator ','\n"
      << "set key outside\n"
      << "set grid\n";
  for (const SweepSpec& spec : sweeps) {
    const std::string medians = spec.name + "_medians.csv";
    const bool runtime = spec.type == "runtime";
    const bool pure_rotation = spec.type == "pure-rotation";
    const std::string x_col = pure_rotation ? "4" : "2";
    const std::string x_label = pure_rotation ? "translation magnitude" : "n";
    const std::string y_col = runtime ? "9" : "5";
    const std::string y_label = runtime ? "disambiguation/recovery [ms]" : "rotation error [deg]";
    out << "\nset title '" << spec.name << "'\n"
        << "set xlabel '" << x_label << "'\n"
        << "set ylabel '" << y_label << "'\n";
    if (runtime || pure_rotation) out << "set logscale xy\n";
    out << "plot ";
    bool first = true;
    for (Method m : spec.methods) {
      if (!first) out << ", \\\n     ";
      first = false;
      out << "'< grep \"^" << method_name(m) << ",\" " << medians << "' using " << x_col << ':'
          << y_col << " with linespoints title '" << method_name(m) << "'";
    }
    out << "\npause -1\n";
    if (runtime || pure_rotation) out << "unset logscale xy\n";
  }
}

}  // namespace relpose
