// Copyright 2026 The tcrystal Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Experiment configuration: JSON parsing, strict validation (unknown keys
// are rejected, every problem is listed), and physical-range warnings.
// configs/schema.json documents the same structure.

#pragma once

#include <cstdint>
#include <fstream>
#include <limits>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "tcrystal/collision.hpp"
#include "tcrystal/error.hpp"
#include "tcrystal/models.hpp"
#include "tcrystal/record.hpp"

namespace tcrystal {

enum class ExperimentKind {
  spectrum,
  collision_run,
  lindblad_run,
  symmetry_check,
  field_sweep,
  temperature_sweep,
  compare_engines
};

inline constexpr std::pair<ExperimentKind, const char*> kExperimentNames[] = {
    {ExperimentKind::spectrum, "spectrum"},
    {ExperimentKind::collision_run, "collision_run"},
    {ExperimentKind::lindblad_run, "lindblad_run"},
    {ExperimentKind::symmetry_check, "symmetry_check"},
    {ExperimentKind::field_sweep, "field_sweep"},
    {ExperimentKind::temperature_sweep, "temperature_sweep"},
    {ExperimentKind::compare_engines, "compare_engines"},
};

inline std::string_view to_string(ExperimentKind k) {
  for (const auto& [kind, name] : kExperimentNames)
    if (kind == k) return name;
  return "unknown";
}

struct LindbladParams {
  double gamma = 1.0;                // Gamma
  std::vector<double> n_bars{0.0};   // one run per value
  double dt = 0.05;                  // recording interval
  double t_final = 200.0;
  std::string propagator = "automatic";  // automatic | exact | rk4
};

struct SweepParams {
  std::vector<double> fields;
  std::vector<double> betas;
  std::vector<int> n_qubits;
};

struct AnalysisParams {
  double transient_fraction = 0.5;
  std::vector<double> probe_times{200.0, 300.0, 400.0, 500.0};
  double window = 20.0;
  int grid_points = 512;
  double freq_max = 0.0;  // 0 selects pi / median sampling interval
  std::string observable = "sx2";
  double onset_threshold = 0.5;
};

struct SymmetryParams {
  std::string operator_name = "lmg_n3";  // lmg_n3 | xxz_a1 | xxz_a2
  double tol = 1e-7;
  bool search = false;
};

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::collision_run;
  std::uint64_t seed = 0;
  SpinModel model;
  BathConfig bath;
  LindbladParams lindblad;
  std::string initial_state;  // empty selects |0 + 0 ... 0>
  int n_collisions = 400;
  int record_substeps = 4;
  std::vector<std::string> observables;
  std::string output_dir = "out";
  SweepParams sweep;
  AnalysisParams analysis;
  SymmetryParams symmetry;
  nlohmann::json source = nlohmann::json::object();  // as read, for the manifest
};

// ---------------------------------------------------------------------------
// Observables by name

/// "sx<q>", "sy<q>", "sz<q>" for qubit q (1-based) or "Sx" for the
/// collective sum of sigma_x.
inline Observable make_observable(const std::string& name, int n_qubits) {
  if (name == "Sx") return {name, collective_sx(n_qubits)};
  if (name.size() >= 3 && name[0] == 's' && (name[1] == 'x' || name[1] == 'y' || name[1] == 'z')) {
    int q = 0;
    for (std::size_t i = 2; i < name.size(); ++i) {
      if (name[i] < '0' || name[i] > '9') throw InvalidArgument("unknown observable '" + name + "'");
      q = q * 10 + (name[i] - '0');
      if (q > 64) break;
    }
    if (q < 1 || q > n_qubits) throw InvalidArgument("observable '" + name + "' refers to a missing qubit");
    const PauliAxis axis = name[1] == 'x' ? PauliAxis::x : name[1] == 'y' ? PauliAxis::y : PauliAxis::z;
    return {name, embed(pauli(axis), q, n_qubits)};
  }
  throw InvalidArgument("unknown observable '" + name + "'");
}

inline std::vector<Observable> make_observables(const std::vector<std::string>& names, int n_qubits) {
  std::vector<Observable> out;
  for (const auto& n : names) out.push_back(make_observable(n, n_qubits));
  return out;
}

/// Eq. (9) product state |0>|+>|0>...|0> unless `labels` is given.
inline StateVector resolve_initial_state(const std::string& labels, int n_qubits) {
  if (labels.empty()) return initial_state("0+" + std::string(static_cast<std::size_t>(n_qubits - 2), '0'));
  if (static_cast<int>(labels.size()) != n_qubits)
    throw InvalidArgument("initial_state has " + std::to_string(labels.size()) + " labels for " +
                          std::to_string(n_qubits) + " qubits");
  return initial_state(labels);
}

// ---------------------------------------------------------------------------
// Parsing

namespace detail {

class ConfigReader {
 public:
  std::vector<std::string> errors;

  void keys(const nlohmann::json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) {
      errors.push_back(where + ": must be an object");
      return;
    }
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [k, v] : obj.items())
      if (!ok.count(k)) errors.push_back(where + ": unknown key '" + k + "'");
  }

  template <class T>
  void number(const nlohmann::json& obj, const char* key, const std::string& where, T& out, bool required = false) {
    if (!obj.is_object() || !obj.contains(key)) {
      if (required) errors.push_back(where + ": missing required field '" + key + "'");
      return;
    }
    const auto& v = obj.at(key);
    if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) {
        errors.push_back(where + "." + key + ": must be an integer");
        return;
      }
      if constexpr (std::is_unsigned_v<T>) {
        if (v.is_number_unsigned() || v.get<std::int64_t>() >= 0)
          out = v.get<T>();
        else
          errors.push_back(where + "." + key + ": must be non-negative");
      } else {
        out = v.get<T>();
      }
    } else {
      if (!v.is_number()) {
        errors.push_back(where + "." + key + ": must be a number");
        return;
      }
      out = v.get<T>();
    }
  }

  /// Number or the string "inf".
  void extended(const nlohmann::json& obj, const char* key, const std::string& where, double& out) {
    if (!obj.contains(key)) return;
    const auto& v = obj.at(key);
    if (v.is_string() && v.get<std::string>() == "inf")
      out = std::numeric_limits<double>::infinity();
    else if (v.is_number())
      out = v.get<double>();
    else
      errors.push_back(where + "." + key + ": must be a number or \"inf\"");
  }

  void boolean(const nlohmann::json& obj, const char* key, const std::string& where, bool& out) {
    if (!obj.contains(key)) return;
    if (!obj.at(key).is_boolean())
      errors.push_back(where + "." + key + ": must be a boolean");
    else
      out = obj.at(key).get<bool>();
  }

  void string(const nlohmann::json& obj, const char* key, const std::string& where, std::string& out,
              bool required = false) {
    if (!obj.is_object() || !obj.contains(key)) {
      if (required) errors.push_back(where + ": missing required field '" + key + "'");
      return;
    }
    if (!obj.at(key).is_string())
      errors.push_back(where + "." + key + ": must be a string");
    else
      out = obj.at(key).get<std::string>();
  }

  template <class T>
  void list(const nlohmann::json& obj, const char* key, const std::string& where, std::vector<T>& out) {
    if (!obj.contains(key)) return;
    const auto& v = obj.at(key);
    const std::string path = where + "." + key;
    if (!v.is_array()) {
      errors.push_back(path + ": must be an array");
      return;
    }
    std::vector<T> tmp;
    for (const auto& e : v) {
      if constexpr (std::is_same_v<T, std::string>) {
        if (!e.is_string()) {
          errors.push_back(path + ": entries must be strings");
          return;
        }
        tmp.push_back(e.get<std::string>());
      } else if constexpr (std::is_integral_v<T>) {
        if (!e.is_number_integer()) {
          errors.push_back(path + ": entries must be integers");
          return;
        }
        tmp.push_back(e.get<T>());
      } else {
        if (e.is_string() && e.get<std::string>() == "inf") {
          tmp.push_back(std::numeric_limits<double>::infinity());
          continue;
        }
        if (!e.is_number()) {
          errors.push_back(path + ": entries must be numbers");
          return;
        }
        tmp.push_back(e.get<T>());
      }
    }
    out = std::move(tmp);
  }

  void check(bool ok, const std::string& message) {
    if (!ok) errors.push_back(message);
  }
};

inline std::optional<ExperimentKind> parse_kind(const std::string& s) {
  for (const auto& [kind, name] : kExperimentNames)
    if (s == name) return kind;
  return std::nullopt;
}

}  // namespace detail

/// Validates and converts a parsed JSON document. Throws ConfigError listing
/// every problem found.
inline ExperimentConfig parse_config(const nlohmann::json& doc) {
  detail::ConfigReader rd;
  ExperimentConfig c;
  c.source = doc;
  if (!doc.is_object()) throw ConfigError("config: top level must be an object");
  rd.keys(doc, "config",
          {"$schema", "$comment", "description", "experiment", "seed", "model", "bath", "lindblad", "initial_state",
           "n_collisions", "record_substeps", "observables", "output_dir", "sweep", "analysis", "symmetry"});

  std::string kind;
  rd.string(doc, "experiment", "config", kind, true);
  if (!kind.empty()) {
    if (auto k = detail::parse_kind(kind))
      c.experiment = *k;
    else
      rd.errors.push_back("config.experiment: unknown experiment '" + kind + "'");
  }
  rd.number(doc, "seed", "config", c.seed, true);

  if (!doc.contains("model")) {
    rd.errors.push_back("config: missing required field 'model'");
  } else {
    const auto& m = doc.at("model");
    rd.keys(m, "model", {"kind", "n_qubits", "J", "B", "periodic", "delta"});
    std::string mk = "lmg";
    rd.string(m, "kind", "model", mk);
    if (mk == "lmg")
      c.model.kind = ModelKind::lmg;
    else if (mk == "xxz")
      c.model.kind = ModelKind::xxz;
    else
      rd.errors.push_back("model.kind: must be \"lmg\" or \"xxz\"");
    rd.number(m, "n_qubits", "model", c.model.n_qubits);
    rd.number(m, "J", "model", c.model.coupling);
    rd.number(m, "B", "model", c.model.field);
    rd.boolean(m, "periodic", "model", c.model.periodic);
    rd.number(m, "delta", "model", c.model.delta);
  }

  if (doc.contains("bath")) {
    const auto& b = doc.at("bath");
    rd.keys(b, "bath", {"beta", "ancilla_field", "tau", "gamma", "include_ancilla_hamiltonian"});
    rd.extended(b, "beta", "bath", c.bath.beta);
    rd.number(b, "ancilla_field", "bath", c.bath.ancilla_field);
    rd.number(b, "tau", "bath", c.bath.tau);
    rd.number(b, "gamma", "bath", c.bath.gamma);
    rd.boolean(b, "include_ancilla_hamiltonian", "bath", c.bath.include_ancilla_hamiltonian);
  }

  if (doc.contains("lindblad")) {
    const auto& l = doc.at("lindblad");
    rd.keys(l, "lindblad", {"Gamma", "n_bars", "dt", "t_final", "propagator"});
    rd.number(l, "Gamma", "lindblad", c.lindblad.gamma);
    rd.list(l, "n_bars", "lindblad", c.lindblad.n_bars);
    rd.number(l, "dt", "lindblad", c.lindblad.dt);
    rd.number(l, "t_final", "lindblad", c.lindblad.t_final);
    rd.string(l, "propagator", "lindblad", c.lindblad.propagator);
  }

  rd.string(doc, "initial_state", "config", c.initial_state);
  rd.number(doc, "n_collisions", "config", c.n_collisions);
  rd.number(doc, "record_substeps", "config", c.record_substeps);
  rd.list(doc, "observables", "config", c.observables);
  rd.string(doc, "output_dir", "config", c.output_dir);

  if (doc.contains("sweep")) {
    const auto& s = doc.at("sweep");
    rd.keys(s, "sweep", {"fields", "betas", "n_qubits"});
    rd.list(s, "fields", "sweep", c.sweep.fields);
    rd.list(s, "betas", "sweep", c.sweep.betas);
    rd.list(s, "n_qubits", "sweep", c.sweep.n_qubits);
  }
  if (doc.contains("analysis")) {
    const auto& a = doc.at("analysis");
    rd.keys(a, "analysis",
            {"transient_fraction", "probe_times", "window", "grid_points", "freq_max", "observable", "onset_threshold"});
    rd.number(a, "transient_fraction", "analysis", c.analysis.transient_fraction);
    rd.list(a, "probe_times", "analysis", c.analysis.probe_times);
    rd.number(a, "window", "analysis", c.analysis.window);
    rd.number(a, "grid_points", "analysis", c.analysis.grid_points);
    rd.number(a, "freq_max", "analysis", c.analysis.freq_max);
    rd.string(a, "observable", "analysis", c.analysis.observable);
    rd.number(a, "onset_threshold", "analysis", c.analysis.onset_threshold);
  }
  if (doc.contains("symmetry")) {
    const auto& s = doc.at("symmetry");
    rd.keys(s, "symmetry", {"operator", "tol", "search"});
    rd.string(s, "operator", "symmetry", c.symmetry.operator_name);
    rd.number(s, "tol", "symmetry", c.symmetry.tol);
    rd.boolean(s, "search", "symmetry", c.symmetry.search);
  }

  // Ranges and cross-field consistency.
  try {
    c.model.validate();
  } catch (const Error& e) {
    rd.errors.push_back(std::string("model: ") + e.what());
  }
  try {
    c.bath.validate();
  } catch (const Error& e) {
    rd.errors.push_back(std::string("bath: ") + e.what());
  }
  rd.check(c.n_collisions >= 1 && c.n_collisions <= 1000000, "n_collisions: must lie in [1, 1e6]");
  rd.check(c.record_substeps >= 0 && c.record_substeps <= 1000, "record_substeps: must lie in [0, 1000]");
  rd.check(c.lindblad.gamma > 0.0, "lindblad.Gamma: must be > 0");
  rd.check(!c.lindblad.n_bars.empty(), "lindblad.n_bars: must not be empty");
  for (double n : c.lindblad.n_bars) rd.check(n >= 0.0 && std::isfinite(n), "lindblad.n_bars: entries must be >= 0");
  rd.check(c.lindblad.dt > 0.0 && c.lindblad.t_final > c.lindblad.dt, "lindblad: need 0 < dt < t_final");
  rd.check(c.lindblad.propagator == "automatic" || c.lindblad.propagator == "exact" || c.lindblad.propagator == "rk4",
           "lindblad.propagator: must be automatic, exact or rk4");
  rd.check(c.analysis.transient_fraction >= 0.0 && c.analysis.transient_fraction < 1.0,
           "analysis.transient_fraction: must lie in [0, 1)");
  rd.check(c.analysis.window > 0.0, "analysis.window: must be > 0");
  rd.check(c.analysis.grid_points >= 16 && c.analysis.grid_points <= 1 << 16, "analysis.grid_points: must lie in [16, 65536]");
  rd.check(c.analysis.freq_max >= 0.0, "analysis.freq_max: must be >= 0");
  rd.check(c.symmetry.operator_name == "lmg_n3" || c.symmetry.operator_name == "xxz_a1" ||
               c.symmetry.operator_name == "xxz_a2",
           "symmetry.operator: must be lmg_n3, xxz_a1 or xxz_a2");
  rd.check(c.symmetry.tol > 0.0, "symmetry.tol: must be > 0");
  for (double b : c.sweep.betas) rd.check(b >= 0.0, "sweep.betas: entries must be >= 0");
  for (double f : c.sweep.fields) rd.check(std::isfinite(f), "sweep.fields: entries must be finite");
  for (int n : c.sweep.n_qubits) rd.check(n >= 2 && n <= 12, "sweep.n_qubits: entries must lie in [2, 12]");

  if (rd.errors.empty()) {
    try {
      if (c.observables.empty()) c.observables = {"sx2", "sx3", "sz1"};
      std::vector<int> sizes = c.sweep.n_qubits.empty() ? std::vector<int>{c.model.n_qubits} : c.sweep.n_qubits;
      for (int n : sizes) {
        make_observables(c.observables, n);
        make_observable(c.analysis.observable, n);
        resolve_initial_state(c.initial_state, n);
      }
    } catch (const Error& e) {
      rd.errors.push_back(e.what());
    }
    using K = ExperimentKind;
    if (c.experiment == K::spectrum || c.experiment == K::field_sweep)
      rd.check(!c.sweep.fields.empty(), "sweep.fields: required for " + std::string(to_string(c.experiment)));
    if (c.experiment == K::temperature_sweep)
      rd.check(!c.sweep.betas.empty(), "sweep.betas: required for temperature_sweep");
    if (c.experiment == K::symmetry_check) {
      const int need = c.symmetry.operator_name == "lmg_n3" ? 3 : 4;
      rd.check(c.model.n_qubits == need, "symmetry.operator " + c.symmetry.operator_name + " needs n_qubits = " +
                                             std::to_string(need));
      rd.check(c.model.dim() <= 64, "symmetry_check: dimension above 64");
    }
  }

  if (!rd.errors.empty()) {
    std::string msg = "invalid configuration:";
    for (const auto& e : rd.errors) msg += "\n  - " + e;
    throw ConfigError(msg);
  }
  return c;
}

inline nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config parse error in '" + path + "': " + e.what());
  }
}

inline ExperimentConfig load_config(const std::string& path) { return parse_config(read_json_file(path)); }

/// Physical-range warnings; reported, never enforced.
inline std::vector<std::string> config_warnings(const ExperimentConfig& c) {
  using K = ExperimentKind;
  std::vector<std::string> w;
  const bool uses_collisions = c.experiment == K::collision_run || c.experiment == K::field_sweep ||
                               c.experiment == K::temperature_sweep || c.experiment == K::compare_engines;
  if (uses_collisions)
    if (auto msg = c.bath.weak_coupling_warning())
      w.push_back(*msg + " (the reference parameter set itself uses gamma = 1, tau = 0.5)");
  int n_max = c.model.n_qubits;
  for (int n : c.sweep.n_qubits) n_max = std::max(n_max, n);
  const Index d = Index{1} << n_max;
  if (d > 32 && (c.experiment == K::lindblad_run || c.experiment == K::compare_engines))
    w.push_back("system dimension " + std::to_string(d) +
                " exceeds 32: the Liouvillian propagator falls back to RK4 and superoperator spectra are unavailable");
  if (d > 64 && c.experiment == K::symmetry_check) w.push_back("symmetry search is limited to dimension 64");
  if (c.experiment == K::spectrum && n_max > 10) w.push_back("dense diagonalization above 10 qubits is slow");
  return w;
}

}  // namespace tcrystal
