#pragma once

#include <cstdint>
#include <random>

namespace fhfm {

// Seeded mt19937_64 with explicit uniform/normal transforms so draws are
// identical across platforms (std distributions are implementation-defined).
// Substreams derive from the base seed via splitmix64, so each model
// component can consume draws independently of the others' draw counts.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), gen_(mix(seed)) {}

    // Independent substream for a named component.
    Rng stream(std::uint64_t component) const {
        return Rng(mix(seed_ ^ (component + 0x9e3779b97f4a7c15ULL)));
    }

    std::uint64_t next_u64() { return gen_(); }

    // U(0,1) from the top 53 bits; never returns 0 or 1.
    double uniform() {
        return (static_cast<double>(gen_() >> 11) + 0.5) * 0x1.0p-53;
    }

    // Standard normal via the Marsaglia polar method.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double x, y, s;
        do {
            x = 2.0 * uniform() - 1.0;
            y = 2.0 * uniform() - 1.0;
            s = x * x + y * y;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = y * f;
        have_spare_ = true;
        return x * f;
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t seed_;
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace fhfm
