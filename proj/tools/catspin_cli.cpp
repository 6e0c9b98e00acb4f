//
// catspin - Copyright 2026 The catspin Authors.
// SPDX-License-Identifier: Apache-2.0
//

// catspin: optimize cat-state pulse sequences, run the time-reversal
// protocol, sweep parameters, fit scaling exponents and emit Husimi grids.
//
// Exit codes: 0 success, 1 usage or input error, 2 non-converged
// optimization or sweep with failed rows.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "catspin/catspin.hpp"

namespace {

using namespace catspin;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitPartial = 2;

void emit(const json &doc, const std::string &out_path) {
  if (out_path.empty()) {
    std::cout << doc.dump(2) << '\n';
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out)
    throw ConfigError("cannot open '" + out_path + "' for writing");
  out << doc.dump(2) << '\n';
  if (!out)
    throw ConfigError("failed writing '" + out_path + "'");
}

struct OptimizeArgs {
  int n_atoms = 0;
  std::string theta;
  int n_pulses = 0;
  std::optional<double> q_tilde;
  std::uint64_t seed = 1;
  int restarts = 8;
  int max_iterations = 1000;
  int workers = 0;
  std::string out;
};

int cmd_optimize(const OptimizeArgs &a) {
  OptimizationProblem p;
  p.n_atoms = a.n_atoms;
  p.target = CatSpec::symmetric(parse_angle(a.theta));
  p.n_pulses = a.n_pulses;
  if (a.q_tilde) {
    p.mode = BudgetMode::FixedBudget;
    p.q_tilde = *a.q_tilde;
  }
  p.seed = a.seed;
  p.restarts = a.restarts;
  p.max_iterations = a.max_iterations;
  p.workers = effective_workers(a.workers);
  const OptimizationResult r = optimize(p);
  emit(to_json(p, r), a.out);
  std::fprintf(stderr, "infidelity %.6g after %d iterations (%s)\n", r.infidelity, r.iterations,
               r.converged ? "converged" : "not converged");
  return r.converged ? kExitOk : kExitPartial;
}

struct ProtocolArgs {
  std::string sequence_path;
  bool ramsey = false;
  int n_atoms = 0;
  double gamma = kDefaultGamma;
  double phase_step = 0.0;
  std::string out;
};

int cmd_protocol(const ProtocolArgs &a) {
  ProtocolConfig c;
  if (a.ramsey) {
    if (a.n_atoms < 1)
      throw ConfigError("--ramsey needs --n-atoms");
    c.n_atoms = a.n_atoms;
  } else {
    const SequenceFile f = read_sequence_file(a.sequence_path);
    if (a.n_atoms > 0 && a.n_atoms != f.n_atoms)
      throw ConfigError("--n-atoms disagrees with the sequence file");
    c.n_atoms = f.n_atoms;
    c.sequence = f.sequence;
  }
  c.gamma = a.gamma;
  c.phase_step = a.phase_step;
  c.loss_enabled = false;
  const ProtocolResult lossless = sensitivity(c);
  c.loss_enabled = true;
  const ProtocolResult lossy = sensitivity(c);

  const double q_tilde = c.sequence.normalized_q(c.n_atoms);
  json doc = to_json(lossless);
  doc["n_atoms"] = c.n_atoms;
  doc["n_pulses"] = c.sequence.size();
  doc["q_tilde"] = q_tilde;
  doc["gamma"] = c.gamma;
  doc["gain_db_lossless"] = lossless.gain_db;
  doc["gain_db_lossy"] = lossy.gain_db;
  doc["loss_db"] = loss_db(c.gamma, q_tilde);
  doc["lossy"] = to_json(lossy);
  emit(doc, a.out);
  return kExitOk;
}

struct SweepArgs {
  std::string config_path;
  std::string n_atoms, theta, q_tilde, seeds;
  std::optional<int> n_pulses, restarts, max_iterations;
  std::optional<double> gamma;
  std::string output_dir, format, workers;
};

int cmd_sweep(const SweepArgs &a) {
  SweepConfig c;
  if (!a.config_path.empty())
    c = load_sweep_config(a.config_path);
  if (!a.n_atoms.empty())
    c.n_atoms = parse_int_list(a.n_atoms, "n_atoms");
  if (!a.theta.empty())
    c.theta = parse_angle_list(a.theta);
  if (!a.q_tilde.empty())
    c.q_tilde = parse_double_list(a.q_tilde, "q_tilde");
  if (!a.seeds.empty()) {
    c.seeds.clear();
    for (int s : parse_int_list(a.seeds, "seeds"))
      c.seeds.push_back(static_cast<std::uint64_t>(s));
  }
  if (a.n_pulses)
    c.n_pulses = *a.n_pulses;
  if (a.restarts)
    c.restarts = *a.restarts;
  if (a.max_iterations)
    c.max_iterations = *a.max_iterations;
  if (a.gamma)
    c.gamma = *a.gamma;
  if (!a.output_dir.empty())
    c.output_dir = a.output_dir;
  if (!a.format.empty())
    c.format = parse_format(a.format);
  if (!a.workers.empty())
    c.workers = parse_workers(a.workers);
  c.validate();

  const SweepSummary s = run_sweep(c);
  std::fprintf(stderr, "sweep: %d run, %d resumed, %d rows total, %d failed\n", s.scheduled,
               s.skipped, s.total_rows, s.failed_rows);
  for (const auto &cell : s.fits["cells"]) {
    if (cell.contains("b"))
      std::fprintf(stderr, "  theta=%.6g Q~=%.6g  b=%.4f (lossless %.4f, r2 %.4f)\n",
                   cell["theta"].get<double>(), cell["Q_tilde"].get<double>(),
                   cell["b"].get<double>(), cell["lossless"]["b"].get<double>(),
                   cell["lossless"]["r_squared"].get<double>());
  }
  std::fprintf(stderr, "records: %s\nfits: %s\n", c.records_path().c_str(), c.fits_path().c_str());
  return s.failed_rows > 0 ? kExitPartial : kExitOk;
}

struct HusimiArgs {
  std::string sequence_path;
  std::optional<std::string> cat_theta;
  std::optional<std::string> css_theta;
  std::string css_phi = "0";
  int n_atoms = 0;
  int n_theta = 181;
  int n_phi = 361;
  std::string out;
};

int cmd_husimi(const HusimiArgs &a) {
  std::optional<DickeState> state;
  if (!a.sequence_path.empty()) {
    const SequenceFile f = read_sequence_file(a.sequence_path);
    state = propagate_sequence(initial_css(f.n_atoms), f.sequence);
  } else if (a.cat_theta) {
    state = make_cat(a.n_atoms, CatSpec::symmetric(parse_angle(*a.cat_theta)));
  } else if (a.css_theta) {
    state = make_css(a.n_atoms, parse_angle(*a.css_theta), parse_angle(a.css_phi));
  } else {
    throw ConfigError("husimi needs --sequence, --cat-theta or --css-theta");
  }
  const HusimiGrid grid = husimi_grid(*state, a.n_theta, a.n_phi);
  if (a.out.empty()) {
    grid.write_csv(std::cout);
  } else {
    std::ofstream out(a.out, std::ios::binary);
    if (!out)
      throw ConfigError("cannot open '" + a.out + "' for writing");
    grid.write_csv(out);
  }
  std::fprintf(stderr, "quadrature normalization %.6f\n", grid.normalization());
  return kExitOk;
}

struct FitArgs {
  std::string records_path;
  double gamma = 0.0;
  std::string out;
};

int cmd_fit(const FitArgs &a) {
  const auto records = read_records(a.records_path);
  const json cells = fit_cells(records, a.gamma);
  emit({{"schema_version", kSweepSchemaVersion}, {"cells", cells}}, a.out);
  for (const auto &cell : cells)
    if (cell.contains("error"))
      return kExitPartial;
  return kExitOk;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Cat-state pulse optimization and time-reversal interferometry"};
  app.require_subcommand(1);

  OptimizeArgs opt;
  auto *optimize = app.add_subcommand("optimize", "optimize a pulse sequence for a symmetric cat");
  optimize->add_option("--n-atoms", opt.n_atoms, "number of atoms N")->required()->check(CLI::PositiveNumber);
  optimize->add_option("--theta", opt.theta, "cat opening angle (radians, or e.g. 0.5pi)")->required();
  optimize->add_option("--n-pulses", opt.n_pulses, "number of (OAT, rotation) steps")->required()->check(CLI::NonNegativeNumber);
  optimize->add_option("--q-tilde", opt.q_tilde, "fix the normalized shearing budget sqrt(N) sum Q");
  optimize->add_option("--seed", opt.seed, "random seed")->capture_default_str();
  optimize->add_option("--restarts", opt.restarts, "optimizer restarts")->capture_default_str()->check(CLI::PositiveNumber);
  optimize->add_option("--max-iterations", opt.max_iterations, "iterations per restart")->capture_default_str();
  optimize->add_option("--workers", opt.workers, "threads for restarts (0 = auto)");
  optimize->add_option("--out", opt.out, "output JSON file (default stdout)");

  ProtocolArgs proto;
  auto *protocol = app.add_subcommand("protocol", "time-reversal protocol sensitivity and gain");
  auto *seq_opt = protocol->add_option("--sequence", proto.sequence_path, "sequence JSON from `optimize`");
  auto *ramsey_opt = protocol->add_flag("--ramsey", proto.ramsey, "plain Ramsey baseline (empty sequence)");
  seq_opt->excludes(ramsey_opt);
  protocol->add_option("--n-atoms", proto.n_atoms, "number of atoms (required with --ramsey)");
  protocol->add_option("--gamma", proto.gamma, "contrast-loss scale")->capture_default_str();
  protocol->add_option("--phase-step", proto.phase_step, "phase step for the slope (default 1e-4/N)");
  protocol->add_option("--out", proto.out, "output JSON file (default stdout)");

  SweepArgs sw;
  auto *sweep = app.add_subcommand("sweep", "resumable sweep over N, theta, Q~ and seeds");
  sweep->add_option("config", sw.config_path, "INI sweep config");
  sweep->add_option("--n-atoms", sw.n_atoms, "comma-separated N values");
  sweep->add_option("--theta", sw.theta, "comma-separated angles");
  sweep->add_option("--q-tilde", sw.q_tilde, "comma-separated budgets");
  sweep->add_option("--seeds", sw.seeds, "comma-separated seeds");
  sweep->add_option("--n-pulses", sw.n_pulses, "steps per sequence");
  sweep->add_option("--restarts", sw.restarts, "optimizer restarts per job");
  sweep->add_option("--max-iterations", sw.max_iterations, "iterations per restart");
  sweep->add_option("--gamma", sw.gamma, "contrast-loss scale");
  sweep->add_option("--output-dir", sw.output_dir, "output directory");
  sweep->add_option("--format", sw.format, "csv or json");
  sweep->add_option("--workers", sw.workers, std::string("worker threads or auto (env ") + kWorkersEnv + " overrides)");

  HusimiArgs hu;
  auto *husimi = app.add_subcommand("husimi", "Husimi Q grid of a state as CSV");
  husimi->add_option("--sequence", hu.sequence_path, "sequence JSON; propagates |pi/2, 0>");
  husimi->add_option("--cat-theta", hu.cat_theta, "symmetric cat with this opening angle");
  husimi->add_option("--css-theta", hu.css_theta, "coherent state polar angle");
  husimi->add_option("--css-phi", hu.css_phi, "coherent state azimuth")->capture_default_str();
  husimi->add_option("--n-atoms", hu.n_atoms, "number of atoms (for --cat-theta/--css-theta)");
  husimi->add_option("--n-theta", hu.n_theta, "polar grid points")->capture_default_str();
  husimi->add_option("--n-phi", hu.n_phi, "azimuthal grid points")->capture_default_str();
  husimi->add_option("--out", hu.out, "output CSV file (default stdout)");

  FitArgs fa;
  auto *fit = app.add_subcommand("fit", "fit G = a N^b per (theta, Q~) cell of a records file");
  fit->add_option("--records", fa.records_path, "records.csv or records.jsonl")->required();
  fit->add_option("--gamma", fa.gamma, "select lossy gains when > 0")->capture_default_str();
  fit->add_option("--out", fa.out, "output JSON file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*optimize)
      return cmd_optimize(opt);
    if (*protocol) {
      if (!proto.ramsey && proto.sequence_path.empty())
        throw ConfigError("protocol needs --sequence or --ramsey");
      return cmd_protocol(proto);
    }
    if (*sweep)
      return cmd_sweep(sw);
    if (*husimi)
      return cmd_husimi(hu);
    if (*fit)
      return cmd_fit(fa);
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
