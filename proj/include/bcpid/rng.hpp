#pragma once
// Seeded generator with hand-rolled transforms so that sampled instances are
// reproducible independent of the standard library's distribution details.

#include <cmath>
#include <cstdint>
#include <random>

namespace bcpid {

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next() { return gen_(); }

    // uniform in (0, 1]
    double uniform() { return (static_cast<double>(gen_() >> 11) + 1.0) * 0x1.0p-53; }

    double exponential() { return -std::log(uniform()); }

    double normal() {
        const double r = std::sqrt(2.0 * exponential());
        return r * std::cos(6.283185307179586477 * uniform());
    }

    int uniform_int(int n) { return static_cast<int>(gen_() % static_cast<std::uint64_t>(n)); }

  private:
    std::mt19937_64 gen_;
};

}  // namespace bcpid
