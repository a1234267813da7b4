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

// Frequencies, amplitudes and melting curves from recorded trajectories.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tcrystal/csv.hpp"
#include "tcrystal/error.hpp"
#include "tcrystal/record.hpp"

namespace tcrystal {

enum class SpectralMethod { lomb_scargle, resample_fft };

inline std::string_view to_string(SpectralMethod m) {
  return m == SpectralMethod::lomb_scargle ? "lomb_scargle" : "resample_fft";
}

struct Periodogram {
  std::vector<double> frequencies;  // angular, strictly increasing
  std::vector<double> power;
  SpectralMethod method = SpectralMethod::lomb_scargle;

  /// Spacing of the (uniform) default grid; the smallest spacing otherwise.
  double resolution() const {
    double r = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < frequencies.size(); ++i) r = std::min(r, frequencies[i] - frequencies[i - 1]);
    return r;
  }
};

struct AmplitudeSeries {
  std::vector<double> window_centers;
  /// Half of max - min inside each window, so a pure A cos(wt) gives A.
  std::vector<double> peak_to_peak;
};

inline constexpr std::size_t kMinSpectralPoints = 16;
inline constexpr std::size_t kDefaultGridPoints = 512;
inline constexpr double kDefaultOversample = 5.0;

// ---------------------------------------------------------------------------
// Spectra on raw series

namespace detail {

inline double median_spacing(std::span<const double> t) {
  std::vector<double> dt;
  dt.reserve(t.size());
  for (std::size_t i = 1; i < t.size(); ++i) dt.push_back(t[i] - t[i - 1]);
  std::nth_element(dt.begin(), dt.begin() + static_cast<std::ptrdiff_t>(dt.size() / 2), dt.end());
  return dt[dt.size() / 2];
}

inline void check_series(std::span<const double> t, std::span<const double> y) {
  if (t.size() != y.size()) throw InvalidArgument("periodogram: times and values differ in length");
  if (t.size() < kMinSpectralPoints) throw InvalidArgument("periodogram: fewer than 16 points");
  for (std::size_t i = 1; i < t.size(); ++i)
    if (!(t[i] > t[i - 1])) throw InvalidArgument("periodogram: times must be strictly increasing");
}

inline std::vector<double> centered(std::span<const double> y) {
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(y.size());
  std::vector<double> out(y.begin(), y.end());
  double spread = 0.0, scale = 0.0;
  for (double& v : out) {
    scale = std::max(scale, std::abs(v));
    v -= mean;
    spread = std::max(spread, std::abs(v));
  }
  // A constant series leaves only rounding noise; treat it as exactly zero.
  if (spread <= 64.0 * std::numeric_limits<double>::epsilon() * scale) std::fill(out.begin(), out.end(), 0.0);
  return out;
}

}  // namespace detail

/// Evenly spaced angular frequencies in (0, pi / median dt]. `points` is a
/// minimum: the grid is densified until its step is at most 1/oversample of
/// the main-lobe width 2 pi / T, so the maximum cannot land on a sidelobe.
inline std::vector<double> default_frequency_grid(std::span<const double> t,
                                                  std::size_t points = kDefaultGridPoints,
                                                  double oversample = kDefaultOversample) {
  if (t.size() < 2) throw InvalidArgument("default_frequency_grid: need at least two samples");
  const double f_max = std::numbers::pi / detail::median_spacing(t);
  const double span = t.back() - t.front();
  const double needed = std::ceil(oversample * f_max * span / (2.0 * std::numbers::pi));
  points = std::max(points, static_cast<std::size_t>(needed));
  std::vector<double> g(points);
  for (std::size_t k = 0; k < points; ++k) g[k] = f_max * static_cast<double>(k + 1) / static_cast<double>(points);
  return g;
}

/// Classical Lomb-Scargle power of the mean-subtracted series.
inline Periodogram lomb_scargle(std::span<const double> t, std::span<const double> y,
                                std::vector<double> grid = {}) {
  detail::check_series(t, y);
  if (grid.empty()) grid = default_frequency_grid(t);
  const auto yc = detail::centered(y);
  Periodogram p{std::move(grid), {}, SpectralMethod::lomb_scargle};
  p.power.reserve(p.frequencies.size());
  for (double w : p.frequencies) {
    if (!(w > 0.0)) throw InvalidArgument("lomb_scargle: frequencies must be > 0");
    double s2 = 0.0, c2 = 0.0;
    for (double ti : t) {
      s2 += std::sin(2.0 * w * ti);
      c2 += std::cos(2.0 * w * ti);
    }
    const double shift = std::atan2(s2, c2) / (2.0 * w);
    double yc_sum = 0.0, ys_sum = 0.0, cc = 0.0, ss = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      const double arg = w * (t[i] - shift);
      const double c = std::cos(arg), s = std::sin(arg);
      yc_sum += yc[i] * c;
      ys_sum += yc[i] * s;
      cc += c * c;
      ss += s * s;
    }
    double pw = 0.0;
    if (cc > 1e-12) pw += yc_sum * yc_sum / cc;
    if (ss > 1e-12) pw += ys_sum * ys_sum / ss;
    p.power.push_back(0.5 * pw);
  }
  return p;
}

/// Linear interpolation onto a uniform grid with the same number of points,
/// then |sum_n y_n e^{-i w t_n}|^2 / M at each requested frequency.
inline Periodogram resample_fft(std::span<const double> t, std::span<const double> y,
                                std::vector<double> grid = {}) {
  detail::check_series(t, y);
  if (grid.empty()) grid = default_frequency_grid(t);
  const std::size_t m = t.size();
  const double t0 = t.front(), t1 = t.back();
  const double step = (t1 - t0) / static_cast<double>(m - 1);
  std::vector<double> tu(m), yu(m);
  std::size_t seg = 0;
  for (std::size_t k = 0; k < m; ++k) {
    const double tk = k + 1 == m ? t1 : t0 + step * static_cast<double>(k);
    while (seg + 2 < m && t[seg + 1] < tk) ++seg;
    const double a = (tk - t[seg]) / (t[seg + 1] - t[seg]);
    tu[k] = tk;
    yu[k] = y[seg] + std::clamp(a, 0.0, 1.0) * (y[seg + 1] - y[seg]);
  }
  const auto yc = detail::centered(yu);
  Periodogram p{std::move(grid), {}, SpectralMethod::resample_fft};
  p.power.reserve(p.frequencies.size());
  for (double w : p.frequencies) {
    double re = 0.0, im = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      re += yc[k] * std::cos(w * (tu[k] - t0));
      im -= yc[k] * std::sin(w * (tu[k] - t0));
    }
    p.power.push_back((re * re + im * im) / static_cast<double>(m));
  }
  return p;
}

// ---------------------------------------------------------------------------
// Record-level analysis

namespace detail {

inline std::size_t transient_cut(const TrajectoryRecord& r, double transient_fraction) {
  if (!(transient_fraction >= 0.0 && transient_fraction < 1.0))
    throw InvalidArgument("transient_fraction must lie in [0, 1)");
  if (r.times.empty()) throw InvalidArgument("record is empty");
  const double t_cut = r.times.front() + transient_fraction * (r.times.back() - r.times.front());
  return static_cast<std::size_t>(std::lower_bound(r.times.begin(), r.times.end(), t_cut) - r.times.begin());
}

}  // namespace detail

/// Spectrum of the post-transient part of one observable. Recorded times
/// that coincide (substep and collision points) are deduplicated.
inline Periodogram periodogram(const TrajectoryRecord& record, std::string_view observable,
                               double transient_fraction = 0.5, std::vector<double> freq_grid = {},
                               SpectralMethod method = SpectralMethod::lomb_scargle) {
  const auto& y = record.observable(observable);
  const std::size_t cut = detail::transient_cut(record, transient_fraction);
  std::vector<double> ts, ys;
  for (std::size_t i = cut; i < record.times.size(); ++i) {
    if (!ts.empty() && !(record.times[i] > ts.back())) continue;
    ts.push_back(record.times[i]);
    ys.push_back(y[i]);
  }
  return method == SpectralMethod::lomb_scargle ? lomb_scargle(ts, ys, std::move(freq_grid))
                                                : resample_fft(ts, ys, std::move(freq_grid));
}

struct SpectralPeak {
  double frequency = 0.0;
  double power = 0.0;
};

/// Argmax with 3-point parabolic refinement (valid on nonuniform grids).
inline SpectralPeak dominant_frequency(const Periodogram& p) {
  if (p.power.empty() || p.power.size() != p.frequencies.size())
    throw InvalidArgument("dominant_frequency: empty or malformed periodogram");
  const auto [lo, hi] = std::minmax_element(p.power.begin(), p.power.end());
  if (!(*hi > 0.0) || *hi - *lo <= 1e-12 * *hi)
    throw NumericalError("dominant_frequency: flat spectrum");
  const std::size_t k = static_cast<std::size_t>(hi - p.power.begin());
  if (k == 0 || k + 1 == p.power.size()) return {p.frequencies[k], p.power[k]};
  const double x0 = p.frequencies[k - 1], x1 = p.frequencies[k], x2 = p.frequencies[k + 1];
  const double y0 = p.power[k - 1], y1 = p.power[k], y2 = p.power[k + 1];
  const double d01 = (y1 - y0) / (x1 - x0), d12 = (y2 - y1) / (x2 - x1);
  const double curv = (d12 - d01) / (x2 - x0);
  if (!(curv < 0.0)) return {x1, y1};
  const double slope = d01 + curv * (x1 - x0);  // derivative of the parabola at x1
  const double xv = std::clamp(x1 - slope / (2.0 * curv), x0, x2);
  const double yv = y1 + slope * (xv - x1) + curv * (xv - x1) * (xv - x1);
  return {xv, std::max(yv, y1)};
}

/// Half peak-to-peak of the samples with |t - center| <= width / 2.
inline double window_amplitude(const TrajectoryRecord& record, std::string_view observable, double center,
                               double width) {
  const auto& y = record.observable(observable);
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  std::size_t count = 0;
  for (std::size_t i = 0; i < record.times.size(); ++i)
    if (std::abs(record.times[i] - center) <= width / 2.0) {
      lo = std::min(lo, y[i]);
      hi = std::max(hi, y[i]);
      ++count;
    }
  if (count < 3) throw InvalidArgument("window_amplitude: fewer than 3 samples in the window");
  return (hi - lo) / 2.0;
}

/// Consecutive windows of width `window` over the post-transient series.
/// When `expected_period` is given the window must span at least two periods.
inline AmplitudeSeries amplitude_envelope(const TrajectoryRecord& record, std::string_view observable,
                                          double window, double transient_fraction = 0.5,
                                          std::optional<double> expected_period = std::nullopt) {
  if (!(window > 0.0)) throw InvalidArgument("amplitude_envelope: window must be > 0");
  if (expected_period && window < 2.0 * *expected_period)
    throw InvalidArgument("amplitude_envelope: window spans fewer than two expected periods");
  const auto& y = record.observable(observable);
  const std::size_t cut = detail::transient_cut(record, transient_fraction);
  if (record.times.size() - cut < 3) throw InvalidArgument("amplitude_envelope: too few post-transient samples");
  const double t0 = record.times[cut], t_end = record.times.back();
  if (window > t_end - t0) throw InvalidArgument("amplitude_envelope: window longer than the analysed span");

  AmplitudeSeries out;
  std::size_t i = cut;
  for (double a = t0; a + window <= t_end + 1e-12 * window; a += window) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    std::size_t count = 0;
    for (; i < record.times.size() && record.times[i] < a + window; ++i) {
      lo = std::min(lo, y[i]);
      hi = std::max(hi, y[i]);
      ++count;
    }
    if (count < 3) throw InvalidArgument("amplitude_envelope: window too small for the sampling density");
    out.window_centers.push_back(a + window / 2.0);
    out.peak_to_peak.push_back((hi - lo) / 2.0);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Melting

struct MeltingRow {
  double beta = 0.0;
  double t = 0.0;
  double ratio = 0.0;
};

namespace detail {

inline nlohmann::json without_beta(nlohmann::json c) {
  if (c.contains("bath") && c["bath"].is_object()) c["bath"].erase("beta");
  return c;
}

}  // namespace detail

/// Window amplitude at each probe time divided by the reference amplitude.
/// All records must share their configuration apart from the bath beta.
inline std::vector<MeltingRow> melting_curve(const std::map<double, TrajectoryRecord>& records,
                                             const TrajectoryRecord& reference, std::string_view observable,
                                             std::span<const double> probe_times, double window = 20.0) {
  const auto ref_cfg = detail::without_beta(reference.config);
  std::vector<MeltingRow> rows;
  for (const auto& [beta, rec] : records) {
    if (detail::without_beta(rec.config) != ref_cfg)
      throw InvalidArgument("melting_curve: record at beta=" + format_double(beta) +
                            " differs from the reference in more than beta");
    for (double t : probe_times) {
      const double ref = window_amplitude(reference, observable, t, window);
      if (!(ref > 0.0)) throw NumericalError("melting_curve: reference amplitude is zero");
      rows.push_back({beta, t, window_amplitude(rec, observable, t, window) / ref});
    }
  }
  return rows;
}

/// Beta at which ratio(beta, probe_time) first rises through `threshold`,
/// log-interpolated between the bracketing betas. Empty when no crossing.
inline std::optional<double> decay_onset(std::span<const MeltingRow> rows, double probe_time,
                                         double threshold = 0.5) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : rows)
    if (std::abs(r.t - probe_time) <= 1e-9 * std::max(1.0, probe_time)) pts.emplace_back(r.beta, r.ratio);
  std::sort(pts.begin(), pts.end());
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const auto [b0, r0] = pts[i - 1];
    const auto [b1, r1] = pts[i];
    if (r0 < threshold && r1 >= threshold) {
      const double f = (threshold - r0) / (r1 - r0);
      return std::exp(std::log(b0) + f * (std::log(b1) - std::log(b0)));
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// CSV

inline void write_periodogram_csv(std::ostream& os, const Periodogram& p) {
  os << "freq,power\n";
  for (std::size_t i = 0; i < p.frequencies.size(); ++i)
    os << format_double(p.frequencies[i]) << ',' << format_double(p.power[i]) << '\n';
}

inline void write_melting_csv(std::ostream& os, std::span<const MeltingRow> rows) {
  os << "beta,t,ratio\n";
  for (const auto& r : rows) os << format_double(r.beta) << ',' << format_double(r.t) << ',' << format_double(r.ratio) << '\n';
}

struct FrequencyRow {
  double field = 0.0;
  double measured = 0.0;
  double predicted = 0.0;
};

inline void write_frequency_csv(std::ostream& os, std::span<const FrequencyRow> rows) {
  os << "B,freq_measured,freq_predicted\n";
  for (const auto& r : rows)
    os << format_double(r.field) << ',' << format_double(r.measured) << ',' << format_double(r.predicted) << '\n';
}

}  // namespace tcrystal
