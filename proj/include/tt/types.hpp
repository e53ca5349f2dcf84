#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

namespace tt {

using Complex = std::complex<double>;

constexpr double kResidualTol = 1e-10;
constexpr double kGeomTol = 1e-8;
constexpr double kMarginalTol = 1e-4;

// Splitmix-style generator: identical output on every platform, unlike
// the distributions in <random>.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Uniform in [0,1), 53-bit resolution.
    double next_unit() { return double(next_u64() >> 11) * (1.0 / 9007199254740992.0); }

    double next_in(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

    Complex next_complex(double box) { return {next_in(-box, box), next_in(-box, box)}; }

    std::uint64_t next_below(std::uint64_t n) { return n ? next_u64() % n : 0; }

private:
    std::uint64_t state_;
};

inline bool close(Complex a, Complex b, double tol) { return std::abs(a - b) <= tol; }

// Round-trip-safe textual form used in canonical sort keys.
std::string canonical_key(const std::vector<Complex>& values, double grid = 1e-7);

}  // namespace tt
