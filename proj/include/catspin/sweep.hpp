//
// catspin - Copyright 2026 The catspin Authors.
// SPDX-License-Identifier: Apache-2.0
//

// Parameter sweeps over (N, theta, Q~, seed): optimize a fixed-budget
// sequence per job, run the time-reversal protocol with and without
// contrast loss, persist one record per job and fit G = a N^b per cell.
//
// Records are appended as they complete (CSV with header, or JSON lines).
// A rerun with the same output directory skips every job whose key
// (N, theta, Q_tilde, n_pulses, seed) is already on disk.

#pragma once

#include <chrono>
#include <cmath>
#include <condition_variable>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <mutex>
#include <numbers>
#include <optional>
#include <queue>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <json.hpp>

#include "catspin/errors.hpp"
#include "catspin/interferometer.hpp"
#include "catspin/parallel.hpp"
#include "catspin/pulse_optimizer.hpp"

namespace catspin {

inline constexpr int kSweepSchemaVersion = 1;
inline constexpr const char *kWorkersEnv = "CATSPIN_WORKERS";

enum class RecordFormat { Csv, Json };

struct SweepConfig {
  std::vector<int> n_atoms = {20, 30, 50, 70, 100, 140, 200};
  std::vector<double> theta = {0.2 * std::numbers::pi, 0.8 * std::numbers::pi};
  std::vector<double> q_tilde = {1.0};
  int n_pulses = 3;
  int restarts = 8;
  std::vector<std::uint64_t> seeds = {1};
  int max_iterations = 1000;
  double gamma = kDefaultGamma;
  /// <= 0 selects the protocol default 1e-4 / N
  double phase_step = 0.0;
  std::string output_dir = "sweep_out";
  RecordFormat format = RecordFormat::Csv;
  /// <= 0 means auto
  int workers = 0;

  void validate() const {
    if (n_atoms.empty() || theta.empty() || q_tilde.empty() || seeds.empty())
      throw ConfigError("sweep lists must be non-empty");
    for (int n : n_atoms)
      if (n < 2)
        throw ConfigError("sweep n_atoms values must be >= 2");
    for (double q : q_tilde)
      if (!(q > 0))
        throw ConfigError("sweep q_tilde values must be > 0");
    for (double t : theta)
      if (!std::isfinite(t))
        throw ConfigError("sweep theta values must be finite");
    if (n_pulses < 1)
      throw ConfigError("n_pulses must be >= 1");
    if (restarts < 1)
      throw ConfigError("restarts must be >= 1");
    if (max_iterations < 0)
      throw ConfigError("max_iterations must be >= 0");
    if (!(gamma >= 0))
      throw ConfigError("gamma must be >= 0");
  }

  std::string records_path() const {
    return (std::filesystem::path(output_dir) /
            (format == RecordFormat::Csv ? "records.csv" : "records.jsonl"))
        .string();
  }
  std::string fits_path() const { return (std::filesystem::path(output_dir) / "fits.json").string(); }
};

// ---------------------------------------------------------------------------
// Config parsing

namespace detail {
  inline std::string trim(const std::string &s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos)
      return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
  }

  inline std::vector<std::string> split_list(const std::string &s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
      if (auto t = trim(item); !t.empty())
        out.push_back(t);
    return out;
  }

  inline double parse_double(const std::string &text, const std::string &what) {
    const std::string t = trim(text);
    char *end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (t.empty() || end != t.c_str() + t.size())
      throw ConfigError("invalid number for " + what + ": '" + text + "'");
    return v;
  }

  inline long parse_long(const std::string &text, const std::string &what) {
    const std::string t = trim(text);
    char *end = nullptr;
    const long v = std::strtol(t.c_str(), &end, 10);
    if (t.empty() || end != t.c_str() + t.size())
      throw ConfigError("invalid integer for " + what + ": '" + text + "'");
    return v;
  }
}  // namespace detail

/// Angle in radians; accepts a plain number or a multiple of pi ("0.8pi", "pi").
inline double parse_angle(const std::string &text) {
  std::string t = detail::trim(text);
  if (t.size() >= 2 && t.compare(t.size() - 2, 2, "pi") == 0) {
    t = detail::trim(t.substr(0, t.size() - 2));
    if (!t.empty() && t.back() == '*')
      t.pop_back();
    const double factor = t.empty() ? 1.0 : detail::parse_double(t, "angle");
    return factor * std::numbers::pi;
  }
  return detail::parse_double(t, "angle");
}

inline RecordFormat parse_format(const std::string &text) {
  const std::string t = detail::trim(text);
  if (t == "csv")
    return RecordFormat::Csv;
  if (t == "json")
    return RecordFormat::Json;
  throw ConfigError("format must be csv or json, got '" + text + "'");
}

inline int parse_workers(const std::string &text) {
  const std::string t = detail::trim(text);
  if (t == "auto")
    return 0;
  const long w = detail::parse_long(t, "workers");
  if (w < 1)
    throw ConfigError("workers must be >= 1 or auto");
  return static_cast<int>(w);
}

inline std::vector<int> parse_int_list(const std::string &text, const std::string &what) {
  std::vector<int> out;
  for (const auto &item : detail::split_list(text))
    out.push_back(static_cast<int>(detail::parse_long(item, what)));
  return out;
}

inline std::vector<double> parse_angle_list(const std::string &text) {
  std::vector<double> out;
  for (const auto &item : detail::split_list(text))
    out.push_back(parse_angle(item));
  return out;
}

inline std::vector<double> parse_double_list(const std::string &text, const std::string &what) {
  std::vector<double> out;
  for (const auto &item : detail::split_list(text))
    out.push_back(detail::parse_double(item, what));
  return out;
}

/// INI-style config:
///
///   schema_version = 1
///   [grid]       n_atoms, theta, q_tilde, n_pulses
///   [optimizer]  restarts, seeds, max_iterations
///   [protocol]   gamma, phase_step
///   [output]     dir, format (csv|json), workers (integer|auto)
///
/// Missing keys keep their defaults; unknown keys are rejected.
inline SweepConfig parse_sweep_config(std::istream &in) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error &e) {
    throw ConfigError(std::string("config: ") + e.what());
  }

  const auto version = tree.get_optional<std::string>("schema_version");
  if (!version)
    throw ConfigError("config: missing schema_version");
  if (detail::parse_long(*version, "schema_version") != kSweepSchemaVersion)
    throw ConfigError("config: unsupported schema_version " + *version);

  static const std::map<std::string, std::set<std::string>> known = {
      {"grid", {"n_atoms", "theta", "q_tilde", "n_pulses"}},
      {"optimizer", {"restarts", "seeds", "max_iterations"}},
      {"protocol", {"gamma", "phase_step"}},
      {"output", {"dir", "format", "workers"}},
  };
  for (const auto &[name, node] : tree) {
    if (name == "schema_version")
      continue;
    auto section = known.find(name);
    if (section == known.end() || node.empty())
      throw ConfigError("config: unknown section or key '" + name + "'");
    for (const auto &[key, value] : node)
      if (!section->second.count(key))
        throw ConfigError("config: unknown key '" + name + "." + key + "'");
  }

  SweepConfig c;
  auto get = [&](const char *path) { return tree.get_optional<std::string>(path); };
  if (auto v = get("grid.n_atoms"))
    c.n_atoms = parse_int_list(*v, "n_atoms");
  if (auto v = get("grid.theta"))
    c.theta = parse_angle_list(*v);
  if (auto v = get("grid.q_tilde"))
    c.q_tilde = parse_double_list(*v, "q_tilde");
  if (auto v = get("grid.n_pulses"))
    c.n_pulses = static_cast<int>(detail::parse_long(*v, "n_pulses"));
  if (auto v = get("optimizer.restarts"))
    c.restarts = static_cast<int>(detail::parse_long(*v, "restarts"));
  if (auto v = get("optimizer.seeds")) {
    c.seeds.clear();
    for (const auto &s : detail::split_list(*v)) {
      const long seed = detail::parse_long(s, "seeds");
      if (seed < 0)
        throw ConfigError("seeds must be non-negative");
      c.seeds.push_back(static_cast<std::uint64_t>(seed));
    }
  }
  if (auto v = get("optimizer.max_iterations"))
    c.max_iterations = static_cast<int>(detail::parse_long(*v, "max_iterations"));
  if (auto v = get("protocol.gamma"))
    c.gamma = detail::parse_double(*v, "gamma");
  if (auto v = get("protocol.phase_step"))
    c.phase_step = detail::parse_double(*v, "phase_step");
  if (auto v = get("output.dir"))
    c.output_dir = detail::trim(*v);
  if (auto v = get("output.format"))
    c.format = parse_format(*v);
  if (auto v = get("output.workers"))
    c.workers = parse_workers(*v);
  c.validate();
  return c;
}

inline SweepConfig load_sweep_config(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError("cannot open config file '" + path + "'");
  return parse_sweep_config(in);
}

// ---------------------------------------------------------------------------
// Records

struct SweepRecord {
  int N = 0;
  double theta = 0;
  double Q_tilde = 0;
  int n_pulses = 0;
  std::uint64_t seed = 0;
  double infidelity = NAN;
  double qfi = NAN;
  double gain_db_lossless = NAN;
  double gain_db_lossy = NAN;
  double amplification = NAN;
  double slope = NAN;
  double noise = NAN;
  double wall_time_s = 0;
  /// empty for successful jobs
  std::string error;

  bool ok() const { return error.empty(); }
};

/// Resume key for one job.
inline std::string record_key(int n, double theta, double q_tilde, int n_pulses,
                              std::uint64_t seed) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%d|%.17g|%.17g|%d|%llu", n, theta, q_tilde, n_pulses,
                static_cast<unsigned long long>(seed));
  return buf;
}

inline std::string record_key(const SweepRecord &r) {
  return record_key(r.N, r.theta, r.Q_tilde, r.n_pulses, r.seed);
}

inline constexpr const char *kCsvHeader =
    "N,theta,Q_tilde,n_pulses,seed,infidelity,qfi,gain_db_lossless,gain_db_lossy,"
    "amplification,slope,noise,wall_time_s,error";

namespace detail {
  inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
  }

  inline std::string sanitize(std::string s) {
    for (char &ch : s)
      if (ch == ',' || ch == '\n' || ch == '\r')
        ch = ';';
    return s;
  }

  inline double json_number(const nlohmann::json &j, const char *key) {
    if (!j.contains(key) || j[key].is_null())
      return NAN;
    if (!j[key].is_number())
      throw ConfigError(std::string("record field '") + key + "' is not a number");
    return j[key].get<double>();
  }
}  // namespace detail

inline std::string to_csv_line(const SweepRecord &r) {
  using detail::fmt_double;
  std::string line = std::to_string(r.N) + "," + fmt_double(r.theta) + "," + fmt_double(r.Q_tilde) +
                     "," + std::to_string(r.n_pulses) + "," + std::to_string(r.seed);
  for (double v : {r.infidelity, r.qfi, r.gain_db_lossless, r.gain_db_lossy, r.amplification,
                   r.slope, r.noise, r.wall_time_s})
    line += "," + fmt_double(v);
  line += "," + detail::sanitize(r.error);
  return line;
}

inline SweepRecord from_csv_line(const std::string &line) {
  std::vector<std::string> f;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ','))
    f.push_back(cell);
  if (!line.empty() && line.back() == ',')
    f.emplace_back();
  if (f.size() != 14)
    throw ConfigError("record line has " + std::to_string(f.size()) + " fields, expected 14");
  SweepRecord r;
  r.N = static_cast<int>(detail::parse_long(f[0], "N"));
  r.theta = detail::parse_double(f[1], "theta");
  r.Q_tilde = detail::parse_double(f[2], "Q_tilde");
  r.n_pulses = static_cast<int>(detail::parse_long(f[3], "n_pulses"));
  r.seed = std::strtoull(f[4].c_str(), nullptr, 10);
  double *numeric[] = {&r.infidelity,    &r.qfi,   &r.gain_db_lossless, &r.gain_db_lossy,
                       &r.amplification, &r.slope, &r.noise,            &r.wall_time_s};
  for (int k = 0; k < 8; ++k)
    *numeric[k] = detail::parse_double(f[5 + k], "record field");
  r.error = f[13];
  return r;
}

inline nlohmann::json to_json(const SweepRecord &r) {
  auto num = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); };
  return {{"N", r.N},
          {"theta", r.theta},
          {"Q_tilde", r.Q_tilde},
          {"n_pulses", r.n_pulses},
          {"seed", r.seed},
          {"infidelity", num(r.infidelity)},
          {"qfi", num(r.qfi)},
          {"gain_db_lossless", num(r.gain_db_lossless)},
          {"gain_db_lossy", num(r.gain_db_lossy)},
          {"amplification", num(r.amplification)},
          {"slope", num(r.slope)},
          {"noise", num(r.noise)},
          {"wall_time_s", r.wall_time_s},
          {"error", r.error}};
}

inline SweepRecord record_from_json(const nlohmann::json &j) {
  if (!j.is_object() || !j.contains("N") || !j.contains("seed"))
    throw ConfigError("record is not an object with N and seed");
  SweepRecord r;
  r.N = j["N"].get<int>();
  r.theta = detail::json_number(j, "theta");
  r.Q_tilde = detail::json_number(j, "Q_tilde");
  r.n_pulses = j.value("n_pulses", 0);
  r.seed = j["seed"].get<std::uint64_t>();
  r.infidelity = detail::json_number(j, "infidelity");
  r.qfi = detail::json_number(j, "qfi");
  r.gain_db_lossless = detail::json_number(j, "gain_db_lossless");
  r.gain_db_lossy = detail::json_number(j, "gain_db_lossy");
  r.amplification = detail::json_number(j, "amplification");
  r.slope = detail::json_number(j, "slope");
  r.noise = detail::json_number(j, "noise");
  r.wall_time_s = detail::json_number(j, "wall_time_s");
  r.error = j.value("error", "");
  return r;
}

/// Reads a records file (format from its extension). A trailing partial
/// line left by an interrupted writer is ignored.
inline std::vector<SweepRecord> read_records(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw ConfigError("cannot open records file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  std::string content = buffer.str();
  if (const auto last_nl = content.rfind('\n'); last_nl == std::string::npos)
    content.clear();
  else
    content.resize(last_nl + 1);

  const bool csv = std::filesystem::path(path).extension() == ".csv";
  std::vector<SweepRecord> out;
  std::stringstream lines(content);
  std::string line;
  bool header = csv;
  while (std::getline(lines, line)) {
    if (line.empty())
      continue;
    if (header) {
      if (line != kCsvHeader)
        throw ConfigError("records file '" + path + "' has an unexpected header");
      header = false;
      continue;
    }
    if (csv) {
      out.push_back(from_csv_line(line));
    } else {
      try {
        out.push_back(record_from_json(nlohmann::json::parse(line)));
      } catch (const nlohmann::json::exception &e) {
        throw ConfigError("records file '" + path + "': " + e.what());
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Scaling fits

/// G = a N^b by ordinary least squares on (log10 N, log10 G).
struct ScalingFit {
  double a = 0;
  double b = 0;
  double r_squared = 0;
  int n_min = 0;
  int n_max = 0;
  int points = 0;
};

struct GainPoint {
  int n_atoms;
  double gain_db;
};

inline ScalingFit fit_scaling(const std::vector<GainPoint> &points) {
  std::set<int> distinct;
  for (const auto &p : points)
    distinct.insert(p.n_atoms);
  if (distinct.size() < 3)
    throw InsufficientDataError("fit_scaling needs at least 3 distinct N values, got " +
                                std::to_string(distinct.size()));
  const double count = static_cast<double>(points.size());
  double mx = 0, my = 0;
  for (const auto &p : points) {
    mx += std::log10(double(p.n_atoms));
    my += p.gain_db / 10.0;
  }
  mx /= count;
  my /= count;
  double sxx = 0, sxy = 0, syy = 0;
  for (const auto &p : points) {
    const double dx = std::log10(double(p.n_atoms)) - mx;
    const double dy = p.gain_db / 10.0 - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  ScalingFit fit;
  fit.b = sxy / sxx;
  fit.a = std::pow(10.0, my - fit.b * mx);
  const double ss_res = std::max(0.0, syy - fit.b * sxy);
  fit.r_squared = (syy <= 1e-300 || ss_res <= 1e-15 * syy) ? 1.0 : std::clamp(1.0 - ss_res / syy, 0.0, 1.0);
  fit.n_min = *distinct.begin();
  fit.n_max = *distinct.rbegin();
  fit.points = static_cast<int>(points.size());
  return fit;
}

/// Fit over the successful records; `lossy` selects gain_db_lossy.
inline ScalingFit fit_scaling(const std::vector<SweepRecord> &records, bool lossy) {
  std::vector<GainPoint> points;
  for (const auto &r : records) {
    const double g = lossy ? r.gain_db_lossy : r.gain_db_lossless;
    if (r.ok() && std::isfinite(g))
      points.push_back({r.N, g});
  }
  return fit_scaling(points);
}

inline nlohmann::json to_json(const ScalingFit &f) {
  return {{"a", f.a},         {"b", f.b},         {"r_squared", f.r_squared},
          {"N_range", {f.n_min, f.n_max}}, {"points", f.points}};
}

/// Largest |b_lossy - b_lossless| still read as agreement.
inline constexpr double kExponentAgreement = 0.05;

/// Per-(theta, Q~, n_pulses) fits over N, both lossless and lossy.
inline nlohmann::json fit_cells(const std::vector<SweepRecord> &records, double gamma) {
  std::map<std::tuple<double, double, int>, std::vector<SweepRecord>> cells;
  for (const auto &r : records)
    cells[{r.theta, r.Q_tilde, r.n_pulses}].push_back(r);

  nlohmann::json out = nlohmann::json::array();
  for (const auto &[key, rows] : cells) {
    const auto &[theta, q_tilde, n_pulses] = key;
    nlohmann::json cell = {{"theta", theta}, {"Q_tilde", q_tilde}, {"n_pulses", n_pulses}};
    try {
      const ScalingFit lossless = fit_scaling(rows, false);
      const ScalingFit lossy = fit_scaling(rows, true);
      cell["lossless"] = to_json(lossless);
      cell["lossy"] = to_json(lossy);
      cell["selected"] = gamma > 0 ? "lossy" : "lossless";
      cell["b"] = gamma > 0 ? lossy.b : lossless.b;
      cell["b_difference"] = std::abs(lossy.b - lossless.b);
      cell["b_agreement"] = std::abs(lossy.b - lossless.b) <= kExponentAgreement;
    } catch (const InsufficientDataError &e) {
      cell["error"] = e.what();
    }
    out.push_back(std::move(cell));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Execution

struct SweepJob {
  int n_atoms;
  double theta;
  double q_tilde;
  std::uint64_t seed;
};

/// One job: fixed-budget optimization followed by the protocol with and
/// without contrast loss. Errors are captured in the record.
inline SweepRecord run_sweep_job(const SweepConfig &config, const SweepJob &job) {
  const auto start = std::chrono::steady_clock::now();
  SweepRecord rec;
  rec.N = job.n_atoms;
  rec.theta = job.theta;
  rec.Q_tilde = job.q_tilde;
  rec.n_pulses = config.n_pulses;
  rec.seed = job.seed;
  try {
    OptimizationProblem problem;
    problem.n_atoms = job.n_atoms;
    problem.target = CatSpec::symmetric(job.theta);
    problem.n_pulses = config.n_pulses;
    problem.mode = BudgetMode::FixedBudget;
    problem.q_tilde = job.q_tilde;
    problem.seed = job.seed;
    problem.max_iterations = config.max_iterations;
    problem.restarts = config.restarts;
    problem.workers = 1;
    const OptimizationResult opt = optimize(problem);

    ProtocolConfig pc;
    pc.n_atoms = job.n_atoms;
    pc.sequence = opt.sequence;
    pc.phase_step = config.phase_step;
    pc.gamma = config.gamma;
    pc.loss_enabled = false;
    const ProtocolResult lossless = sensitivity(pc);
    pc.loss_enabled = true;
    const ProtocolResult lossy = sensitivity(pc);

    rec.infidelity = opt.infidelity;
    rec.qfi = lossless.qfi_prepared;
    rec.gain_db_lossless = lossless.gain_db;
    rec.gain_db_lossy = lossy.gain_db;
    rec.amplification = lossless.amplification;
    rec.slope = lossless.signal_slope;
    rec.noise = lossless.noise;
  } catch (const std::exception &e) {
    rec.error = e.what();
    if (rec.error.empty())
      rec.error = "unknown error";
  }
  rec.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

inline std::vector<SweepJob> enumerate_jobs(const SweepConfig &config) {
  std::vector<SweepJob> jobs;
  for (double theta : config.theta)
    for (double q : config.q_tilde)
      for (int n : config.n_atoms)
        for (auto seed : config.seeds)
          jobs.push_back({n, theta, q, seed});
  return jobs;
}

/// Worker count after the environment override.
inline int effective_workers(int configured) {
  if (const char *env = std::getenv(kWorkersEnv); env && *env) {
    const std::string v = env;
    return v == "auto" ? resolve_workers(0) : resolve_workers(parse_workers(v));
  }
  return resolve_workers(configured);
}

struct SweepSummary {
  int scheduled = 0;
  int skipped = 0;
  int failed_rows = 0;  // over the whole records file
  int total_rows = 0;
  nlohmann::json fits;
};

namespace detail {
  /// Creates the output directory and proves it writable.
  inline void prepare_output_dir(const std::string &dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec)
      throw ConfigError("cannot create output dir '" + dir + "': " + ec.message());
    const auto probe = std::filesystem::path(dir) / ".write_probe";
    {
      std::ofstream out(probe);
      if (!out || !(out << "ok") || !out.flush())
        throw ConfigError("output dir '" + dir + "' is not writable");
    }
    std::filesystem::remove(probe, ec);
  }

  /// Drops a trailing partial line so appends start on a fresh line.
  inline void truncate_partial_line(const std::string &path) {
    std::error_code ec;
    if (!std::filesystem::exists(path, ec))
      return;
    std::ifstream in(path, std::ios::binary);
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    in.close();
    if (content.empty() || content.back() == '\n')
      return;
    const auto last_nl = content.rfind('\n');
    std::filesystem::resize_file(path, last_nl == std::string::npos ? 0 : last_nl + 1);
  }
}  // namespace detail

/// Runs every job not yet on disk; appends records serially from one writer.
inline SweepSummary run_sweep(const SweepConfig &config) {
  config.validate();
  const int workers = effective_workers(config.workers);
  detail::prepare_output_dir(config.output_dir);
  const std::string path = config.records_path();
  detail::truncate_partial_line(path);

  std::set<std::string> done;
  if (std::filesystem::exists(path))
    for (const auto &r : read_records(path))
      done.insert(record_key(r));

  std::vector<SweepJob> pending;
  SweepSummary summary;
  for (const auto &job : enumerate_jobs(config)) {
    if (done.count(record_key(job.n_atoms, job.theta, job.q_tilde, config.n_pulses, job.seed)))
      ++summary.skipped;
    else
      pending.push_back(job);
  }
  summary.scheduled = static_cast<int>(pending.size());

  std::ofstream out(path, std::ios::app | std::ios::binary);
  if (!out)
    throw ConfigError("cannot open records file '" + path + "' for append");
  if (config.format == RecordFormat::Csv && std::filesystem::file_size(path) == 0)
    out << kCsvHeader << '\n' << std::flush;

  // workers produce, this thread is the only writer
  std::mutex mutex;
  std::condition_variable ready;
  std::queue<SweepRecord> completed;
  std::exception_ptr producer_error;
  std::thread producers([&] {
    try {
      parallel_for(static_cast<int>(pending.size()), workers, [&](int i) {
        SweepRecord rec = run_sweep_job(config, pending[i]);
        {
          std::lock_guard lock(mutex);
          completed.push(std::move(rec));
        }
        ready.notify_one();
      });
    } catch (...) {
      std::lock_guard lock(mutex);
      producer_error = std::current_exception();
    }
    ready.notify_one();
  });
  for (std::size_t written = 0; written < pending.size(); ++written) {
    std::unique_lock lock(mutex);
    ready.wait(lock, [&] { return !completed.empty() || producer_error; });
    if (completed.empty())
      break;
    SweepRecord rec = std::move(completed.front());
    completed.pop();
    lock.unlock();
    if (config.format == RecordFormat::Csv)
      out << to_csv_line(rec) << '\n';
    else
      out << to_json(rec).dump() << '\n';
    out.flush();
  }
  producers.join();
  out.close();
  if (producer_error)
    std::rethrow_exception(producer_error);

  const auto records = read_records(path);
  summary.total_rows = static_cast<int>(records.size());
  for (const auto &r : records)
    if (!r.ok())
      ++summary.failed_rows;

  summary.fits = {
      {"schema_version", kSweepSchemaVersion},
      {"budget",
       {{"restarts", config.restarts},
        {"seeds", config.seeds},
        {"max_iterations", config.max_iterations},
        {"n_pulses", config.n_pulses},
        {"gamma", config.gamma}}},
      {"cells", fit_cells(records, config.gamma)},
  };
  std::ofstream fits(config.fits_path(), std::ios::binary);
  fits << summary.fits.dump(2) << '\n';
  if (!fits)
    throw ConfigError("cannot write '" + config.fits_path() + "'");
  return summary;
}

}  // namespace catspin
