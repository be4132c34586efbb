// Copyright 2026 The tailproc Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Counter-based random streams. A draw is a pure function of (key, counter),
// so any index can be generated independently of every other one.

#ifndef TAILPROC_RNG_HPP_
#define TAILPROC_RNG_HPP_

#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace tailproc {

inline constexpr std::uint64_t Mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class Stream {
 public:
  constexpr explicit Stream(std::uint64_t key) : key_(key) {}

  // Hashes the seed and a path of labels into an independent stream.
  static constexpr Stream Derive(std::uint64_t seed,
                                 std::initializer_list<std::uint64_t> path) {
    std::uint64_t k = Mix64(seed ^ 0x6a09e667f3bcc908ULL);
    for (std::uint64_t p : path) k = Mix64(k ^ Mix64(p + 0x9e3779b97f4a7c15ULL));
    return Stream(k);
  }

  constexpr std::uint64_t Bits(std::uint64_t counter) const {
    return Mix64(key_ + counter * 0x9e3779b97f4a7c15ULL);
  }

  // Uniform on the open interval (0, 1).
  double Uniform(std::uint64_t counter) const {
    return (static_cast<double>(Bits(counter) >> 11) + 0.5) * 0x1.0p-53;
  }

  // Pareto(alpha) on (1, inf) by inversion.
  double Pareto(std::uint64_t counter, double alpha) const {
    return std::pow(Uniform(counter), -1.0 / alpha);
  }

  std::uint64_t key() const { return key_; }

 private:
  std::uint64_t key_;
};

// Labels for the sub-streams of one simulation.
enum StreamPurpose : std::uint64_t {
  kInnovationStream = 1,
  kSignStream = 2,
  kMarkStream = 3,
  kSelectStream = 4,
  kAtomStream = 5,
  kMagnitudeStream = 6,
  kPilotStream = 7,
};

}  // namespace tailproc

#endif  // TAILPROC_RNG_HPP_
