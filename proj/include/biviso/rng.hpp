#pragma once

// Deterministic random streams. The standard engine is specified bit for bit;
// the uniform and normal transforms are written out here because the library
// distributions are not portable across standard library implementations.

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace biviso {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Splits one base seed into independent streams keyed by a tag and the cell
// coordinates, so replications can run in any order or in parallel.
inline std::uint64_t derive_seed(std::uint64_t base, std::string_view tag, std::uint64_t n,
                                 std::uint64_t noise_bits, std::uint64_t rep) {
    std::uint64_t h = 0xcbf29ce484222325ULL ^ base;
    auto fold = [&h](std::uint64_t v) {
        h ^= v;
        std::uint64_t s = h;
        h = splitmix64(s);
    };
    for (char c : tag) fold(static_cast<unsigned char>(c));
    fold(n);
    fold(noise_bits);
    fold(rep);
    return h != 0 ? h : 0x9e3779b97f4a7c15ULL;
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    // 53-bit resolution in [0, 1)
    double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    double normal(double mean = 0.0, double sd = 1.0) {
        if (have_spare_) {
            have_spare_ = false;
            return mean + sd * spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform01() - 1.0;
            v = 2.0 * uniform01() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        have_spare_ = true;
        return mean + sd * u * f;
    }

private:
    std::mt19937_64 gen_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace biviso
