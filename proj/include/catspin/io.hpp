//
// catspin - Copyright 2026 The catspin Authors.
// SPDX-License-Identifier: Apache-2.0
//

// JSON records for optimization and protocol results. nlohmann/json writes
// doubles with round-trip precision.

#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

#include "catspin/dynamics.hpp"
#include "catspin/errors.hpp"
#include "catspin/interferometer.hpp"
#include "catspin/pulse_optimizer.hpp"

namespace catspin {

using json = nlohmann::json;

inline json to_json(const PulseSequence &seq) {
  json arr = json::array();
  for (const Pulse &p : seq.pulses())
    arr.push_back({{"Q", p.q}, {"mu", p.mu}});
  return arr;
}

inline PulseSequence sequence_from_json(const json &arr) {
  if (!arr.is_array())
    throw ConfigError("sequence must be a JSON array of {\"Q\", \"mu\"} objects");
  std::vector<Pulse> pulses;
  for (const auto &item : arr) {
    if (!item.is_object() || !item.contains("Q") || !item.contains("mu") ||
        !item["Q"].is_number() || !item["mu"].is_number())
      throw ConfigError("sequence entry needs numeric \"Q\" and \"mu\"");
    pulses.push_back({item["Q"].get<double>(), item["mu"].get<double>()});
  }
  return PulseSequence(std::move(pulses));
}

inline json to_json(const CatSpec &spec) {
  return {{"theta1", spec.theta1}, {"phi1", spec.phi1}, {"theta2", spec.theta2}, {"phi2", spec.phi2}};
}

inline json to_json(const OptimizationProblem &problem, const OptimizationResult &result) {
  return {
      {"schema_version", 1},
      {"n_atoms", problem.n_atoms},
      {"target", to_json(problem.target)},
      {"mode", to_string(problem.mode)},
      {"q_tilde", problem.mode == BudgetMode::FixedBudget
                      ? problem.q_tilde
                      : result.sequence.normalized_q(problem.n_atoms)},
      {"n_pulses", problem.n_pulses},
      {"seed", problem.seed},
      {"restarts", problem.restarts},
      {"max_iterations", problem.max_iterations},
      {"sequence", to_json(result.sequence)},
      {"infidelity", result.infidelity},
      {"iterations", result.iterations},
      {"converged", result.converged},
      {"history", result.history},
      {"best_restart", result.best_restart},
      {"restart_infidelities", result.restart_infidelities},
  };
}

inline json to_json(const ProtocolResult &r) {
  return {
      {"signal_slope", r.signal_slope}, {"noise", r.noise},
      {"delta_phi", r.delta_phi},       {"gain_db", r.gain_db},
      {"amplification", r.amplification}, {"qfi_prepared", r.qfi_prepared},
      {"contrast", r.contrast},
  };
}

/// n_atoms and sequence from an optimization result file.
struct SequenceFile {
  int n_atoms = 0;
  PulseSequence sequence;
};

inline SequenceFile read_sequence_file(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError("cannot open sequence file '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error &e) {
    throw ConfigError("sequence file '" + path + "': " + e.what());
  }
  if (!doc.is_object() || !doc.contains("n_atoms") || !doc["n_atoms"].is_number_integer())
    throw ConfigError("sequence file '" + path + "': missing integer \"n_atoms\"");
  if (!doc.contains("sequence"))
    throw ConfigError("sequence file '" + path + "': missing \"sequence\"");
  SequenceFile out;
  out.n_atoms = doc["n_atoms"].get<int>();
  if (out.n_atoms < 1)
    throw ConfigError("sequence file '" + path + "': n_atoms must be >= 1");
  out.sequence = sequence_from_json(doc["sequence"]);
  return out;
}

}  // namespace catspin
