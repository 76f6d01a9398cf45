#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace ipmala {

// Random stream owned by a single chain/worker; never shared across threads.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double normal() { return normal_(gen_); }

  // Uniform on (0, 1); zero is redrawn so log(u) is always finite.
  double uniform_pos() {
    for (;;) {
      double u = unif_(gen_);
      if (u > 0.0) return u;
    }
  }

  void fill_normal(std::span<double> out) {
    for (double& v : out) v = normal_(gen_);
  }

 private:
  std::mt19937_64 gen_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> unif_{0.0, 1.0};
};

}  // namespace ipmala
