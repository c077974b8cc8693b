#pragma once

// Counter-based pseudo-random streams. Every stream is a pure function
// of (seed, stream id, counter), so parallel workers can draw from
// disjoint streams without coordination and a run is reproducible from
// the seed recorded in its output.

#include <cstdint>

namespace fforbit::rng {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

inline std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    return splitmix64(a ^ splitmix64(b));
}

class Stream {
public:
    Stream(std::uint64_t seed, std::uint64_t id_a, std::uint64_t id_b = 0)
        : base_(mix(mix(seed, id_a), id_b)) {}

    std::uint64_t next() { return splitmix64(base_ + 0x9E3779B97F4A7C15ull * ++ctr_); }

    // Unbiased draw from [0, n), n >= 1 (Lemire rejection).
    std::uint64_t below(std::uint64_t n) {
        while (true) {
            std::uint64_t x = next();
            unsigned __int128 m = static_cast<unsigned __int128>(x) * n;
            std::uint64_t lo = static_cast<std::uint64_t>(m);
            if (lo < n) {
                std::uint64_t threshold = (0 - n) % n;
                if (lo < threshold) continue;
            }
            return static_cast<std::uint64_t>(m >> 64);
        }
    }

    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo + 1)));
    }

    // Uniform in [0, 1).
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
    std::uint64_t base_;
    std::uint64_t ctr_ = 0;
};

}  // namespace fforbit::rng
