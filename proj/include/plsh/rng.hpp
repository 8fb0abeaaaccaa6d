#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace plsh {

// splitmix64 finalizer (Vigna). Decorrelates small consecutive seeds before
// they reach an engine, and derives child-stream seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/**
 * Seedable uniform stream on top of std::mt19937_64.
 *
 * The raw engine output sequence is fully specified by the C++ standard, so
 * the integer stream is identical on every platform; transformed draws
 * (log, sin, cos) can differ by libm rounding only. Child streams: sample k
 * of a batch draws from RandomStream::child(seed, k), so samples can be
 * (re)generated in any order or in parallel with results identical to a
 * sequential run.
 */
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : engine_(splitmix64(seed)) {}

    static RandomStream child(std::uint64_t master_seed, std::uint64_t index) {
        return RandomStream(master_seed + 0x9e3779b97f4a7c15ULL * (index + 1));
    }

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on (0,1]; returns exactly 1.0 when the engine's top 53 bits are
    // all ones.
    double uniform_unit_pos() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    // Uniform on [0,1).
    double uniform_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform on [0, high).
    double uniform_below(double high) { return high * uniform_unit(); }

    // Standard normal via Box-Muller on explicit uniforms.
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform_unit_pos();
        const double u2 = uniform_unit();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace plsh
