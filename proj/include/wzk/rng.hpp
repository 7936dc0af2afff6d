#pragma once

// Counter-based splittable random streams. A draw is a pure function of
// (seed, stream, counter), so path i can always use stream (seed, i) and
// parallel scheduling cannot change any result.

#include <cmath>
#include <cstdint>

namespace wzk {

namespace detail {
// SplitMix64 finalizer; bijective on 64-bit words.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}
}  // namespace detail

inline std::uint64_t counter_word(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
    std::uint64_t h = detail::mix64(seed ^ 0x632be59bd9b4e019ULL);
    h = detail::mix64(h ^ detail::mix64(stream ^ 0x9e3779b97f4a7c15ULL));
    return detail::mix64(h ^ detail::mix64(counter));
}

// Sequential view of one (seed, stream) pair. Copyable; copies replay.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}

    std::uint64_t next_u64() { return counter_word(seed_, stream_, counter_++); }

    // uniform on (0,1); never exactly 0 or 1
    double next_uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53 + 0x1.0p-54;
    }

    double next_uniform(double a, double b) { return a + (b - a) * next_uniform01(); }

    // standard normal via Box-Muller; consumes exactly two counters
    double next_normal() {
        const double u1 = next_uniform01();
        const double u2 = next_uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }

private:
    std::uint64_t seed_, stream_;
    std::uint64_t counter_ = 0;
};

}  // namespace wzk
