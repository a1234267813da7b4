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

#pragma once

#include <algorithm>
#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "tcrystal/csv.hpp"
#include "tcrystal/error.hpp"
#include "tcrystal/tensor.hpp"
#include "tcrystal/version.hpp"

namespace tcrystal {

/// A named Hermitian operator whose expectation value is recorded.
struct Observable {
  std::string name;
  ComplexMatrix op;
};

/// Time series of observable expectation values from one run.
struct TrajectoryRecord {
  std::vector<double> times;
  std::vector<std::string> names;
  std::vector<std::vector<double>> series;  // series[k][i] = <names[k]> at times[i]
  std::uint64_t seed = 0;
  int collision_count = 0;
  std::string engine = "collision";
  nlohmann::json config = nlohmann::json::object();

  const std::vector<double>& observable(std::string_view name) const {
    auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) throw InvalidArgument("TrajectoryRecord: no observable '" + std::string(name) + "'");
    return series[static_cast<std::size_t>(it - names.begin())];
  }

  bool has(std::string_view name) const {
    return std::find(names.begin(), names.end(), name) != names.end();
  }

  std::size_t size() const noexcept { return times.size(); }

  void push(double t, const std::vector<double>& values) {
    times.push_back(t);
    for (std::size_t k = 0; k < series.size(); ++k) series[k].push_back(values[k]);
  }
};

inline TrajectoryRecord make_record(const std::vector<Observable>& observables) {
  TrajectoryRecord r;
  for (const auto& o : observables) r.names.push_back(o.name);
  r.series.resize(observables.size());
  return r;
}

/// `t,obs1,obs2,...` with shortest round-trip doubles.
inline void write_csv(std::ostream& os, const TrajectoryRecord& r) {
  os << 't';
  for (const auto& n : r.names) os << ',' << n;
  os << '\n';
  for (std::size_t i = 0; i < r.times.size(); ++i) {
    os << format_double(r.times[i]);
    for (const auto& s : r.series) os << ',' << format_double(s[i]);
    os << '\n';
  }
}

inline nlohmann::json sidecar(const TrajectoryRecord& r) {
  return nlohmann::json{{"engine", r.engine},
                        {"seed", r.seed},
                        {"collision_count", r.collision_count},
                        {"samples", r.times.size()},
                        {"observables", r.names},
                        {"config", r.config},
                        {"software", {{"name", "tcrystal"}, {"version", kVersion}}}};
}

}  // namespace tcrystal
