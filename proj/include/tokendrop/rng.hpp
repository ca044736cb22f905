#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace tokendrop {

// Seeded RNG with hand-rolled draws so that output is identical across
// standard library implementations (std distributions are not portable).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    // Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) { return n <= 1 ? 0 : next() % n; }

    // Bernoulli draw; p outside [0,1] clamps.
    bool chance(double p) {
        if (p <= 0.0) return false;
        if (p >= 1.0) return true;
        return static_cast<double>(next() >> 11) * 0x1.0p-53 < p;
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[below(i)]);
        }
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace tokendrop
