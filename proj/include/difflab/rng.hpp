// rng.hpp
// Counter-based deterministic random streams. Every draw is a pure function
// of (seed, stream tag, counter), so displacement fields are functions of the
// point they attach to and extend consistently as the sampled region grows.
#pragma once

#include <cmath>
#include <cstdint>

#include "difflab/common.hpp"

namespace difflab {

inline uint64_t mix64(uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// A keyed counter stream. Draw i is mix(mix(key + GOLDEN*i) ^ key2-style),
// giving statistically independent outputs per (key, counter).
struct Stream {
    uint64_t key = 0;

    static Stream from(uint64_t seed, uint64_t tag) {
        Stream s;
        s.key = mix64(mix64(seed ^ 0x6A09E667F3BCC909ull) + tag);
        return s;
    }

    uint64_t raw(uint64_t counter) const { return mix64(key + 0x9E3779B97F4A7C15ull * (counter + 1)); }

    // uniform in [0, 1)
    double u01(uint64_t counter) const { return static_cast<double>(raw(counter) >> 11) * 0x1.0p-53; }

    // uniform in (0, 1]
    double u01_pos(uint64_t counter) const {
        return (static_cast<double>(raw(counter) >> 11) + 1.0) * 0x1.0p-53;
    }

    // standard normal via Box-Muller; one gaussian consumes counters (2i, 2i+1)
    double gauss(uint64_t i) const {
        double u1 = u01_pos(2 * i);
        double u2 = u01(2 * i + 1);
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
    }

    // uniform direction on the unit sphere in R^d; uses counters from `base`
    Vec sphere_dir(int d, uint64_t base) const {
        for (int attempt = 0; attempt < 16; ++attempt) {
            Vec g(d);
            double n2 = 0;
            for (int c = 0; c < d; ++c) {
                g[c] = gauss(base + static_cast<uint64_t>(attempt) * d + c);
                n2 += g[c] * g[c];
            }
            if (n2 > 1e-300) return g * (1.0 / std::sqrt(n2));
        }
        Vec e(d);
        e[0] = 1.0;
        return e;
    }
};

}  // namespace difflab
