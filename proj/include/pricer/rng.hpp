// Copyright (c) 2026 pricer-lab authors
// SPDX-License-Identifier: MIT

#pragma once

#include <cstdint>
#include <random>

namespace pricer {

// One step of the splitmix64 generator (Steele, Lea, Flood 2014). Used only
// to derive well-mixed seeds, never as the sampling engine itself.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deterministic sub-seed for the `index`-th stream of a master seed. Trials,
// nodes and experiment repetitions each get their own stream so results do
// not depend on evaluation order.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t s = seed ^ (0x9e3779b97f4a7c15ULL * (index + 1));
  std::uint64_t a = splitmix64_next(s);
  std::uint64_t b = splitmix64_next(s);
  return a ^ (b << 1);
}

// Thin wrapper over mt19937_64 with the few draw types the simulator needs.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double uniform() { return u01_(eng_); }

  double uniform(double lo, double hi) { return lo + (hi - lo) * u01_(eng_); }

  double gaussian() { return norm_(eng_); }

  bool bernoulli(double p) { return u01_(eng_) < p; }

  // Joint draw of a correlated 0/1 pair with marginals (p_ab, p_ba) and
  // success-success probability e = P(first = 1, second = 1).
  std::pair<int, int> correlated_pair(double p_ab, double p_ba, double e) {
    const double u = u01_(eng_);
    if (u < e) return {1, 1};
    if (u < p_ab) return {1, 0};
    if (u < p_ab + p_ba - e) return {0, 1};
    return {0, 0};
  }

  std::uint64_t next_u64() { return eng_(); }

  std::mt19937_64& engine() { return eng_; }

 private:
  std::mt19937_64 eng_;
  std::uniform_real_distribution<double> u01_{0.0, 1.0};
  std::normal_distribution<double> norm_{0.0, 1.0};
};

}  // namespace pricer
