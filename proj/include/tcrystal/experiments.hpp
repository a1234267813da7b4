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

// Configuration-driven experiments. Every experiment produces in-memory
// files plus a JSON summary; `write_outputs` is the single collector that
// touches the filesystem.

#pragma once

#include <atomic>
#include <chrono>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "tcrystal/analysis.hpp"
#include "tcrystal/collision.hpp"
#include "tcrystal/config.hpp"
#include "tcrystal/lindblad.hpp"
#include "tcrystal/models.hpp"
#include "tcrystal/rng.hpp"
#include "tcrystal/symmetry.hpp"
#include "tcrystal/version.hpp"

namespace tcrystal {

struct OutputFile {
  std::string name;
  std::string content;
};

struct ExperimentResult {
  std::vector<OutputFile> files;
  nlohmann::json summary = nlohmann::json::object();
  std::vector<std::string> warnings;
};

/// Runs fn(0..n-1) on up to `workers` threads; results keep index order.
/// The first exception thrown by any task is rethrown after all finish.
template <class T>
std::vector<T> parallel_map(std::size_t n, int workers, const std::function<T(std::size_t)>& fn) {
  std::vector<T> out(n);
  const std::size_t k = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, workers)));
  if (k <= 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < k; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          out[i] = fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return out;
}

namespace detail {

inline std::string tag(double x) {
  if (std::isinf(x)) return "inf";
  return format_double(x);
}

inline std::string csv_of(const TrajectoryRecord& r) {
  std::ostringstream os;
  write_csv(os, r);
  return os.str();
}

inline std::vector<double> analysis_grid(const ExperimentConfig& c, const TrajectoryRecord& r) {
  if (c.analysis.freq_max > 0.0) {
    std::vector<double> g(static_cast<std::size_t>(c.analysis.grid_points));
    for (std::size_t k = 0; k < g.size(); ++k)
      g[k] = c.analysis.freq_max * static_cast<double>(k + 1) / static_cast<double>(g.size());
    return g;
  }
  const std::size_t cut = transient_cut(r, c.analysis.transient_fraction);
  std::vector<double> ts;
  for (std::size_t i = cut; i < r.times.size(); ++i)
    if (ts.empty() || r.times[i] > ts.back()) ts.push_back(r.times[i]);
  return default_frequency_grid(ts, static_cast<std::size_t>(c.analysis.grid_points));
}

inline nlohmann::json peak_json(const ExperimentConfig& c, const TrajectoryRecord& r, const std::string& obs,
                                const std::vector<double>& grid) {
  try {
    const auto p = periodogram(r, obs, c.analysis.transient_fraction, grid);
    const auto peak = dominant_frequency(p);
    return {{"frequency", peak.frequency}, {"power", peak.power}, {"grid_step", p.resolution()}};
  } catch (const NumericalError&) {
    return nullptr;  // flat spectrum: no oscillation in this observable
  }
}

inline nlohmann::json series_summary(const ExperimentConfig& c, const TrajectoryRecord& r) {
  const std::size_t cut = transient_cut(r, c.analysis.transient_fraction);
  const auto grid = analysis_grid(c, r);
  nlohmann::json s = nlohmann::json::object();
  for (const auto& name : r.names) {
    const auto& y = r.observable(name);
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t i = cut; i < y.size(); ++i) {
      lo = std::min(lo, y[i]);
      hi = std::max(hi, y[i]);
    }
    s[name] = {{"post_transient_min", lo}, {"post_transient_max", hi}, {"dominant", peak_json(c, r, name, grid)}};
  }
  auto pair_metric = [&](const char* a, const char* b, double sign) -> std::optional<double> {
    if (!r.has(a) || !r.has(b)) return std::nullopt;
    const auto& ya = r.observable(a);
    const auto& yb = r.observable(b);
    double m = 0.0;
    for (std::size_t i = cut; i < ya.size(); ++i) m = std::max(m, std::abs(ya[i] + sign * yb[i]));
    return m;
  };
  if (auto m = pair_metric("sx2", "sx3", 1.0)) s["max_abs_sx2_plus_sx3"] = *m;
  if (auto m = pair_metric("sx3", "sx4", -1.0)) s["max_abs_sx3_minus_sx4"] = *m;
  return s;
}

inline SpinModel with(const SpinModel& m, int n, double field) {
  SpinModel out = m;
  out.n_qubits = n;
  out.field = field;
  return out;
}

inline std::vector<int> sizes(const ExperimentConfig& c) {
  return c.sweep.n_qubits.empty() ? std::vector<int>{c.model.n_qubits} : c.sweep.n_qubits;
}

inline TrajectoryRecord collision_record(const ExperimentConfig& c, const SpinModel& model, const BathConfig& bath,
                                         std::uint64_t seed) {
  TrajectoryOptions opt;
  opt.record_substeps = c.record_substeps;
  return run_trajectory(model, resolve_initial_state(c.initial_state, model.n_qubits), bath, c.n_collisions,
                        make_observables(c.observables, model.n_qubits), seed, opt);
}

inline Propagator propagator(const std::string& s) {
  return s == "exact" ? Propagator::exact : s == "rk4" ? Propagator::rk4 : Propagator::automatic;
}

inline TrajectoryRecord lindblad_record(const ExperimentConfig& c, const SpinModel& model, double n_bar) {
  const auto spec = gksl_spec(model, c.lindblad.gamma, n_bar);
  const StateVector psi = resolve_initial_state(c.initial_state, model.n_qubits);
  const auto grid = uniform_grid(c.lindblad.t_final, c.lindblad.dt);
  auto rec = evolve(spec, DensityMatrix::pure(psi), grid, make_observables(c.observables, model.n_qubits),
                    propagator(c.lindblad.propagator));
  rec.seed = c.seed;
  rec.config["model"] = to_json(model);
  rec.config["Gamma"] = c.lindblad.gamma;
  rec.config["n_bar"] = n_bar;
  return rec;
}

inline double late_amplitude(const ExperimentConfig& c, const TrajectoryRecord& r, const std::string& obs) {
  const double w = std::min(c.analysis.window, r.times.back() - r.times.front());
  return window_amplitude(r, obs, r.times.back() - w / 2.0, w);
}

// ---------------------------------------------------------------------------

inline ExperimentResult run_spectrum(const ExperimentConfig& c) {
  ExperimentResult res;
  for (int n : sizes(c)) {
    SpinModel m = c.model;
    m.n_qubits = n;
    const auto rows = spectrum_sweep(m, c.sweep.fields);
    std::ostringstream os;
    write_spectrum_csv(os, rows);
    res.files.push_back({"spectrum_N" + std::to_string(n) + ".csv", os.str()});
    if (m.kind == ModelKind::lmg && n >= 3) {
      const auto p = lmg_prediction(n, m.field);
      res.summary["N" + std::to_string(n)] = {
          {"B", m.field}, {"e_nu", p.e_nu}, {"e_mu", p.e_mu}, {"degeneracy_mu", p.degeneracy_mu}, {"lambda", p.lambda}};
    }
  }
  return res;
}

inline ExperimentResult run_collision(const ExperimentConfig& c) {
  ExperimentResult res;
  const auto rec = collision_record(c, c.model, c.bath, c.seed);
  res.files.push_back({"trajectory.csv", csv_of(rec)});
  res.files.push_back({"trajectory.json", sidecar(rec).dump(2) + "\n"});
  std::ostringstream os;
  write_periodogram_csv(os, periodogram(rec, c.analysis.observable, c.analysis.transient_fraction,
                                        analysis_grid(c, rec)));
  res.files.push_back({"periodogram_" + c.analysis.observable + ".csv", os.str()});
  res.summary["observables"] = series_summary(c, rec);
  res.summary["t_final"] = rec.times.back();
  if (c.model.kind == ModelKind::lmg && c.model.n_qubits >= 3)
    res.summary["predicted_frequency"] = lmg_prediction(c.model.n_qubits, c.model.field).lambda;
  return res;
}

inline ExperimentResult run_lindblad(const ExperimentConfig& c, int workers) {
  ExperimentResult res;
  const auto& nb = c.lindblad.n_bars;
  const auto recs = parallel_map<TrajectoryRecord>(nb.size(), workers,
                                                   [&](std::size_t i) { return lindblad_record(c, c.model, nb[i]); });
  nlohmann::json runs = nlohmann::json::array();
  for (std::size_t i = 0; i < nb.size(); ++i) {
    const std::string stem = "trajectory_nbar" + tag(nb[i]);
    res.files.push_back({stem + ".csv", csv_of(recs[i])});
    res.files.push_back({stem + ".json", sidecar(recs[i]).dump(2) + "\n"});
    nlohmann::json late = nlohmann::json::object();
    for (const auto& name : recs[i].names) late[name] = late_amplitude(c, recs[i], name);
    runs.push_back({{"n_bar", nb[i]}, {"observables", series_summary(c, recs[i])}, {"late_amplitude", late}});
  }
  res.summary["runs"] = runs;
  const auto l = build_liouvillian(gksl_spec(c.model, c.lindblad.gamma, nb.front()));
  if (l.dim <= 32) res.summary["liouvillian_gap_first_nbar"] = liouvillian_gap(l);
  return res;
}

inline DynamicalSymmetry named_symmetry(const std::string& name) {
  if (name == "lmg_n3") return lmg_symmetry_n3();
  if (name == "xxz_a1") return xxz_symmetry_a1();
  return xxz_symmetry_a2();
}

inline ExperimentResult run_symmetry(const ExperimentConfig& c) {
  ExperimentResult res;
  const auto a = named_symmetry(c.symmetry.operator_name);
  const int n = c.model.n_qubits;
  const auto psi0 = DensityMatrix::pure(resolve_initial_state(c.initial_state, n));
  nlohmann::json reports = nlohmann::json::array();
  for (double n_bar : c.lindblad.n_bars) {
    const auto spec = gksl_spec(c.model, c.lindblad.gamma, n_bar);
    const auto space = steady_space(build_liouvillian(spec));
    // Both jumps are always reported; only those with nonzero rate enter the verdict.
    const auto rep = certify(spec.hamiltonian, thermal_jumps(n), a, space, c.symmetry.tol, psi0);
    const bool supported = rep.pass_i() && rep.pass_ii("minus") && (n_bar == 0.0 || rep.pass_ii("plus"));
    auto j = to_json(rep);
    j["n_bar"] = n_bar;
    j["supported_by_active_jumps"] = supported;
    j["kernel_dimension"] = space.basis.size();
    if (c.symmetry.search) {
      const auto active = n_bar > 0.0 ? thermal_jumps(n) : zero_temperature_jumps(n);
      nlohmann::json found = nlohmann::json::array();
      for (const auto& cand : search_symmetries(spec.hamiltonian, active, space.canonical.matrix(), c.symmetry.tol))
        found.push_back({{"lambda", *cand.lambda},
                         {"overlap_with_target", operator_overlap(cand.op, a.op)},
                         {"support", cand.support_note}});
      j["search"] = found;
    }
    reports.push_back(j);
  }
  res.summary["reports"] = reports;
  res.files.push_back({"symmetry.json", reports.dump(2) + "\n"});
  return res;
}

inline ExperimentResult run_field_sweep(const ExperimentConfig& c, int workers) {
  ExperimentResult res;
  struct Point {
    int n;
    double field;
  };
  std::vector<Point> pts;
  for (int n : sizes(c))
    for (double b : c.sweep.fields) pts.push_back({n, b});
  const auto rows = parallel_map<FrequencyRow>(pts.size(), workers, [&](std::size_t i) {
    const auto model = with(c.model, pts[i].n, pts[i].field);
    const double params[] = {static_cast<double>(pts[i].n), pts[i].field};
    const auto rec = collision_record(c, model, c.bath, derive_seed(c.seed, params));
    const auto peak = dominant_frequency(periodogram(rec, c.analysis.observable, c.analysis.transient_fraction,
                                                     analysis_grid(c, rec)));
    const double predicted = model.kind == ModelKind::lmg && model.n_qubits >= 3
                                 ? lmg_prediction(model.n_qubits, model.field).lambda
                                 : std::numeric_limits<double>::quiet_NaN();
    return FrequencyRow{pts[i].field, peak.frequency, predicted};
  });
  std::size_t k = 0;
  for (int n : sizes(c)) {
    std::vector<FrequencyRow> part(rows.begin() + static_cast<std::ptrdiff_t>(k),
                                   rows.begin() + static_cast<std::ptrdiff_t>(k + c.sweep.fields.size()));
    k += c.sweep.fields.size();
    std::ostringstream os;
    write_frequency_csv(os, part);
    res.files.push_back({"frequency_N" + std::to_string(n) + ".csv", os.str()});
    double worst = 0.0;
    for (const auto& r : part) worst = std::max(worst, std::abs(r.measured - r.predicted) / std::abs(r.predicted));
    res.summary["N" + std::to_string(n)] = {{"max_relative_error", worst}};
  }
  return res;
}

inline ExperimentResult run_temperature_sweep(const ExperimentConfig& c, int workers) {
  ExperimentResult res;
  const auto ns = sizes(c);
  std::vector<double> betas = c.sweep.betas;
  // Reference (beta = infinity) first in each block of runs.
  struct Point {
    int n;
    double beta;
  };
  std::vector<Point> pts;
  for (int n : ns) {
    pts.push_back({n, std::numeric_limits<double>::infinity()});
    for (double b : betas) pts.push_back({n, b});
  }
  // All temperatures of one size share a seed, so only beta differs.
  const auto recs = parallel_map<TrajectoryRecord>(pts.size(), workers, [&](std::size_t i) {
    BathConfig bath = c.bath;
    bath.beta = pts[i].beta;
    const double params[] = {static_cast<double>(pts[i].n)};
    return collision_record(c, with(c.model, pts[i].n, c.model.field), bath, derive_seed(c.seed, params));
  });
  std::size_t k = 0;
  for (int n : ns) {
    const auto& ref = recs[k];
    std::map<double, TrajectoryRecord> by_beta;
    res.files.push_back({"trajectory_N" + std::to_string(n) + "_betainf.csv", csv_of(ref)});
    for (std::size_t j = 0; j < betas.size(); ++j) {
      const auto& r = recs[k + 1 + j];
      res.files.push_back({"trajectory_N" + std::to_string(n) + "_beta" + tag(betas[j]) + ".csv", csv_of(r)});
      by_beta.emplace(betas[j], r);
    }
    k += 1 + betas.size();
    const double needed = c.analysis.probe_times.empty()
                              ? 0.0
                              : *std::max_element(c.analysis.probe_times.begin(), c.analysis.probe_times.end()) +
                                    c.analysis.window / 2.0;
    for (const auto& [b, r] : by_beta)
      if (r.times.back() < needed || ref.times.back() < needed)
        throw NumericalError("temperature_sweep: trajectory ends before the last probe window; raise n_collisions");
    const auto rows = melting_curve(by_beta, ref, c.analysis.observable, c.analysis.probe_times, c.analysis.window);
    std::ostringstream os;
    write_melting_csv(os, rows);
    res.files.push_back({"melting_N" + std::to_string(n) + ".csv", os.str()});
    nlohmann::json onset = nlohmann::json::object();
    for (double t : c.analysis.probe_times) {
      const auto o = decay_onset(rows, t, c.analysis.onset_threshold);
      onset[tag(t)] = o ? nlohmann::json(*o) : nlohmann::json(nullptr);
    }
    res.summary["N" + std::to_string(n)] = {{"onset_beta", onset}, {"threshold", c.analysis.onset_threshold}};
  }
  return res;
}

inline ExperimentResult run_compare_engines(const ExperimentConfig& c) {
  ExperimentResult res;
  ExperimentConfig cc = c;
  if (std::find(cc.observables.begin(), cc.observables.end(), "sz1") == cc.observables.end())
    cc.observables.push_back("sz1");
  const auto coll = collision_record(cc, c.model, c.bath, c.seed);
  const auto lind = lindblad_record(cc, c.model, c.lindblad.n_bars.front());
  res.files.push_back({"trajectory_collision.csv", csv_of(coll)});
  res.files.push_back({"trajectory_lindblad.csv", csv_of(lind)});

  // One frequency grid for both engines.
  const auto grid = analysis_grid(c, coll);
  const auto pc = periodogram(coll, c.analysis.observable, c.analysis.transient_fraction, grid);
  const auto pl = periodogram(lind, c.analysis.observable, c.analysis.transient_fraction, grid);
  const auto fc = dominant_frequency(pc), fl = dominant_frequency(pl);

  auto late_fidelity = [&](const TrajectoryRecord& r) {
    const auto& z = r.observable("sz1");
    const std::size_t cut = transient_cut(r, c.analysis.transient_fraction);
    double worst = 1.0;
    for (std::size_t i = cut; i < z.size(); ++i) worst = std::min(worst, (1.0 + z[i]) / 2.0);
    return worst;
  };
  res.summary = {{"collision", {{"frequency", fc.frequency}, {"q1_ground_fidelity_min", late_fidelity(coll)}}},
                 {"lindblad", {{"frequency", fl.frequency}, {"q1_ground_fidelity_min", late_fidelity(lind)}}},
                 {"grid_step", pc.resolution()},
                 {"frequencies_agree", std::abs(fc.frequency - fl.frequency) <= pc.resolution()}};
  return res;
}

}  // namespace detail

inline ExperimentResult run_experiment(const ExperimentConfig& c, int workers = 1) {
  using K = ExperimentKind;
  ExperimentResult res;
  switch (c.experiment) {
    case K::spectrum: res = detail::run_spectrum(c); break;
    case K::collision_run: res = detail::run_collision(c); break;
    case K::lindblad_run: res = detail::run_lindblad(c, workers); break;
    case K::symmetry_check: res = detail::run_symmetry(c); break;
    case K::field_sweep: res = detail::run_field_sweep(c, workers); break;
    case K::temperature_sweep: res = detail::run_temperature_sweep(c, workers); break;
    case K::compare_engines: res = detail::run_compare_engines(c); break;
  }
  res.warnings = config_warnings(c);
  return res;
}

/// Writes every file plus manifest.json into `dir`. Only the manifest
/// carries run-dependent fields (wall time).
inline nlohmann::json write_outputs(const ExperimentResult& res, const ExperimentConfig& c,
                                    const std::filesystem::path& dir, double wall_seconds, int workers) {
  std::filesystem::create_directories(dir);
  nlohmann::json outputs = nlohmann::json::array();
  for (const auto& f : res.files) {
    std::ofstream os(dir / f.name, std::ios::binary);
    if (!os) throw Error("cannot write '" + (dir / f.name).string() + "'");
    os << f.content;
    outputs.push_back(f.name);
  }
  nlohmann::json manifest{{"experiment", std::string(to_string(c.experiment))},
                          {"seed", c.seed},
                          {"config", c.source},
                          {"software", {{"name", "tcrystal"}, {"version", kVersion}}},
                          {"workers", workers},
                          {"wall_time_s", wall_seconds},
                          {"outputs", outputs},
                          {"warnings", res.warnings},
                          {"results", res.summary}};
  std::ofstream os(dir / "manifest.json", std::ios::binary);
  if (!os) throw Error("cannot write manifest in '" + dir.string() + "'");
  os << manifest.dump(2) << '\n';
  return manifest;
}

}  // namespace tcrystal
