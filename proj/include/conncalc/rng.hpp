#pragma once

#include "conncalc/scalar.hpp"

#include <cstdint>

namespace conncalc {

// Deterministic splitmix64 stream; all randomized internals draw from here
// so that reports are reproducible for a fixed seed.
class Rng {
  public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    uint64_t next() {
        uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // uniform in (-1, 1) at working precision
    Real real() {
        Real r = Real(static_cast<long long>(next() >> 1)) / Real(1ull << 62);
        return r - 1;
    }

    Scalar complex() { return Scalar(real(), real()); }

  private:
    uint64_t state_;
};

}  // namespace conncalc
