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

#include <bit>
#include <cstdint>
#include <span>

namespace tcrystal {

namespace detail {

// SplitMix64 output function.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

}  // namespace detail

/// Counter-based generator: the i-th draw is a pure function of (key, i).
///
/// Draws never depend on how many values other streams consumed, so a
/// trajectory is reproducible from its seed alone and split() streams are
/// independent of each other.
class CounterRng {
 public:
  explicit constexpr CounterRng(std::uint64_t seed) : key_(detail::mix64(seed + detail::kGolden)) {}

  constexpr std::uint64_t at(std::uint64_t index) const {
    return detail::mix64(key_ ^ detail::mix64(index * detail::kGolden + 1));
  }

  constexpr std::uint64_t next() { return at(counter_++); }

  /// Uniform in the open interval (0, 1).
  constexpr double uniform() { return to_unit(next()); }
  constexpr double uniform_at(std::uint64_t index) const { return to_unit(at(index)); }

  constexpr CounterRng split(std::uint64_t stream) const {
    CounterRng child(0);
    child.key_ = detail::mix64(key_ ^ detail::mix64(stream + 0x632be59bd9b4e019ULL));
    return child;
  }

  constexpr std::uint64_t position() const { return counter_; }
  constexpr void seek(std::uint64_t index) { counter_ = index; }

  static constexpr double to_unit(std::uint64_t bits) {
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Stable child seed for a sweep point: hashes the master seed together with
/// the exact bit patterns of the parameter tuple.
inline std::uint64_t derive_seed(std::uint64_t master, std::span<const double> params) {
  std::uint64_t h = detail::mix64(master ^ 0xd1b54a32d192ed03ULL);
  for (double p : params) h = detail::mix64(h ^ detail::mix64(std::bit_cast<std::uint64_t>(p)));
  return h;
}

}  // namespace tcrystal
