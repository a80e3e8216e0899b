#pragma once

#include <cstdint>
#include <random>

namespace ruscarl {

// Seeded random source with explicitly implemented draws so that results are
// identical across standard library implementations (std distributions are
// not portable).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1).
    double next_double() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // Uniform in [0, n), rejection-sampled to avoid modulo bias.
    std::uint64_t next_below(std::uint64_t n) {
        if (n == 0) return 0;
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v = engine_();
        while (v >= limit) v = engine_();
        return v % n;
    }

    // Uniform integer in [lo, hi] inclusive.
    std::int64_t next_int(std::int64_t lo, std::int64_t hi) {
        return lo + static_cast<std::int64_t>(
                        next_below(static_cast<std::uint64_t>(hi - lo + 1)));
    }

    // Derive an independent stream; mixing constant from splitmix64.
    Rng fork(std::uint64_t stream) {
        std::uint64_t z = engine_() ^ (stream * 0x9e3779b97f4a7c15ull);
        return Rng(z);
    }

private:
    std::mt19937_64 engine_;
};

// Fisher-Yates using the portable draws above.
template <typename Vec>
void shuffle_in_place(Vec& v, Rng& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(rng.next_below(i));
        std::swap(v[i - 1], v[j]);
    }
}

} // namespace ruscarl
