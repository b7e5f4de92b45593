#pragma once

#include <cstdint>
#include <random>

namespace vanetqos {

/// Seeded 64-bit generator with platform-independent uniform helpers
/// (std:: distributions are implementation-defined, which would break
/// byte-identical outputs across standard libraries).
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform in {0, ..., n-1}; n must be > 0.
    std::size_t index(std::size_t n) {
        auto i = static_cast<std::size_t>(uniform() * static_cast<double>(n));
        return i < n ? i : n - 1;
    }

    bool bernoulli(double p) { return uniform() < p; }

private:
    std::mt19937_64 engine_;
};

/// Independent RNG streams per purpose, so e.g. switching learners leaves the
/// traffic untouched.
enum class Stream : std::uint64_t { Categories = 1, Exploration = 2, Init = 3, Replay = 4 };

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t stream_seed(std::uint64_t master, Stream s, std::uint64_t sub = 0) {
    return splitmix64(splitmix64(splitmix64(master) ^ static_cast<std::uint64_t>(s)) + sub);
}

inline Rng make_stream(std::uint64_t master, Stream s, std::uint64_t sub = 0) {
    return Rng(stream_seed(master, s, sub));
}

}  // namespace vanetqos
