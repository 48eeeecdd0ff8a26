#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace ckn {

inline std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Counter-based generator: the stream for sample i depends only on
/// (seed, i), so a scan partitioned across any number of workers draws
/// exactly the same samples as the serial loop.
class SampleRng {
public:
    SampleRng(std::uint64_t seed, std::uint64_t index)
        : state_(splitmix64(seed ^ splitmix64(index + 0x632be59bd9b4e019ULL)))
    {
    }

    std::uint64_t next_u64()
    {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    double log_uniform(double lo, double hi)
    {
        return std::exp(uniform(std::log(lo), std::log(hi)));
    }

    double normal()
    {
        double u1 = uniform01();
        while (u1 <= 0.0)
            u1 = uniform01();
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

private:
    std::uint64_t state_;
};

/// Worker cap for the OpenMP kernels. `parallel = false` selects the serial
/// reference loop; jobs = 0 leaves the thread count to the runtime.
struct Exec {
    bool parallel = true;
    int jobs = 0;

    static Exec serial() { return Exec{false, 1}; }
    static Exec threads(int jobs) { return Exec{true, jobs}; }
};

} // namespace ckn
