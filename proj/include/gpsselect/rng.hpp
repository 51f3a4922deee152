#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace gps {

// splitmix64; used to derive independent substream seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Stateless mix of a root seed and a substream index.
inline std::uint64_t splitmix_pair(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t s = seed;
    std::uint64_t a = splitmix64(s);
    s = a ^ (index * 0xd1342543de82ef95ull + 0x2545f4914f6cdd1dull);
    return splitmix64(s);
}

// Seedable generator with a fully specified output sequence: the engine is
// std::mt19937_64 (bit-exact by the standard) and the uniform/normal
// transforms below are written out so every build draws identical streams.
// std::normal_distribution is implementation-defined and deliberately unused.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Substream `index` of a root seed; replicate-parallel code uses one per task.
    static Rng stream(std::uint64_t seed, std::uint64_t index) {
        return Rng(splitmix_pair(seed, index));
    }

    // Uniform on (0,1); never returns 0 or 1.
    double uniform() {
        // 53-bit mantissa; +0.5 shifts off zero.
        std::uint64_t bits = engine_() >> 11;
        return (static_cast<double>(bits) + 0.5) * (1.0 / 9007199254740992.0);
    }

    // Box-Muller, two normals per trig pair.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double theta = 2.0 * 3.141592653589793238462643383279502884 * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    std::uint64_t raw() { return engine_(); }

    // Fisher-Yates index for shuffles: uniform integer in [0, n) by
    // rejection so the map from engine output is exact.
    std::uint64_t below(std::uint64_t n) {
        std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v;
        do {
            v = engine_();
        } while (v >= limit);
        return v % n;
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace gps
