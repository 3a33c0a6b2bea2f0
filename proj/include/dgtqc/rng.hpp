// Copyright 2026 the dgtqc authors
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

#ifndef DGTQC_RNG_HPP_
#define DGTQC_RNG_HPP_

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "dgtqc/error.hpp"

namespace dgtqc {

// Stream-splitting mix (splitmix64). Used to derive independent substream
// seeds from (root seed, stream index) so parallel replicates stay
// reproducible regardless of scheduling.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t state = seed;
  std::uint64_t a = splitmix64(state);
  state ^= stream * 0xD1B54A32D192ED03ull + 0x8CB92BA72F3D8DD7ull;
  std::uint64_t b = splitmix64(state);
  return a ^ (b + 0x9E3779B97F4A7C15ull);
}

// mt19937_64 has a standardized output sequence, and all variate transforms
// below are written out explicitly, so any (seed, call sequence) pair yields
// the same numbers on every platform. The std::*_distribution adapters are
// implementation-defined and deliberately not used.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t bits() { return engine_(); }

  // Uniform on [0, 1), 53-bit resolution.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform on (0, 1]; safe as argument of log or negative powers.
  double uniform_open01() {
    return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
  }

  // Unbiased integer in [0, n) by rejection.
  std::uint64_t below(std::uint64_t n) {
    require(n > 0, ErrorKind::kArgument, "Rng::below needs n > 0");
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  bool bernoulli(double p) { return uniform01() < p; }

  // Box-Muller with a cached spare draw.
  double normal(double mean = 0.0, double sd = 1.0) {
    if (has_spare_) {
      has_spare_ = false;
      return mean + sd * spare_;
    }
    const double u1 = uniform_open01();
    const double u2 = uniform01();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * 3.14159265358979323846 * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return mean + sd * radius * std::cos(angle);
  }

  // Marsaglia-Tsang for shape >= 1, boosted for shape < 1.
  double gamma(double shape) {
    require(shape > 0.0, ErrorKind::kArgument, "gamma shape must be > 0");
    if (shape < 1.0) {
      const double u = uniform_open01();
      return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    while (true) {
      double x;
      double v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform_open01();
      if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) {
        return d * v;
      }
    }
  }

  std::vector<double> dirichlet(const std::vector<double>& alpha) {
    std::vector<double> draw(alpha.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < alpha.size(); ++i) {
      draw[i] = gamma(alpha[i]);
      sum += draw[i];
    }
    require(sum > 0.0, ErrorKind::kDegenerate, "dirichlet draw summed to zero");
    for (double& v : draw) v /= sum;
    return draw;
  }

  template <typename T>
  void shuffle(std::vector<T>& values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      std::swap(values[i - 1], values[below(i)]);
    }
  }

  // Categorical draw from a probability vector (need not be exactly normalized).
  std::size_t categorical(const std::vector<double>& weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    double r = uniform01() * total;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      r -= weights[i];
      if (r < 0.0) return i;
    }
    return weights.size() - 1;
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace dgtqc

#endif  // DGTQC_RNG_HPP_
