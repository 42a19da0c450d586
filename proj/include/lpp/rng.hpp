#pragma once

#include <cstdint>

namespace lpp {

// Counter-based uniform generator: every value is a pure function of
// (seed, stream, i, j), so any lattice site is addressable without storing
// the grid and replicas can be evaluated in any order.
class UniformField {
  public:
    UniformField(std::uint64_t seed, std::uint64_t stream)
        : seed_(seed), stream_(stream) {}

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }

    // 64-bit word for lattice site (i, j).  Bijective mixing rounds between
    // absorptions keep distinct coordinates decorrelated.
    std::uint64_t word_at(std::int64_t i, std::int64_t j) const {
        std::uint64_t z = seed_ + 0x9E3779B97F4A7C15ull;
        z = mix(z);
        z = mix(z ^ (stream_ + 0xD1B54A32D192ED03ull));
        z = mix(z ^ (static_cast<std::uint64_t>(i) + 0x8CB92BA72F3D8DD7ull));
        z = mix(z ^ (static_cast<std::uint64_t>(j) + 0x2545F4914F6CDD1Dull));
        return z;
    }

    // Uniform in the open interval (0,1).  The top 52 bits are mapped to
    // (k + 0.5) * 2^-52, which is exact in double precision, so 0.0 and 1.0
    // are unreachable and quantile functions are never evaluated there.
    double at(std::int64_t i, std::int64_t j) const {
        const std::uint64_t k = word_at(i, j) >> 12;
        return (static_cast<double>(k) + 0.5) * 0x1p-52;
    }

  private:
    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xBF58476D1CE4E5B9ull;
        z ^= z >> 27;
        z *= 0x94D049BB133111EBull;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t seed_;
    std::uint64_t stream_;
};

}  // namespace lpp
