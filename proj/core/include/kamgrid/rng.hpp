#pragma once

#include <cmath>
#include <cstdint>

namespace kamgrid {

/// splitmix64 step; also used to derive independent per-sample streams from a
/// master seed, so results do not depend on how samples are scheduled.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Independent per-sample seed derived from a master seed by hashing the
/// sample counter; results are independent of how samples are scheduled.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    std::uint64_t s = master ^ (0x9e3779b97f4a7c15ULL * (index + 1));
    std::uint64_t a = splitmix64(s);
    return a ^ splitmix64(s);
}

/// Deterministic counter-based stream: sample k of master seed s always sees
/// the same bits, independent of worker layout.
class SampleRng {
public:
    SampleRng(std::uint64_t master_seed, std::uint64_t sample_index) {
        std::uint64_t s = master_seed;
        std::uint64_t a = splitmix64(s);
        s = master_seed ^ (0x6a09e667f3bcc909ULL + sample_index * 0x9e3779b97f4a7c15ULL);
        std::uint64_t b = splitmix64(s);
        state_ = a ^ (b + 0x2545f4914f6cdd1dULL * (sample_index + 1));
        // warm up
        splitmix64(state_);
        splitmix64(state_);
    }

    std::uint64_t next_bits() { return splitmix64(state_); }

    /// Uniform in (0,1): 53-bit mantissa, never exactly 0.
    double uniform() {
        return ((next_bits() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Exponential via inverse transform; rate must be positive.
    double exponential(double rate) {
        return -std::log(uniform()) / rate;
    }

    /// Index in [0, n) proportional to the (nonnegative) weights summing to total.
    std::size_t pick(const double* weights, std::size_t n, double total) {
        double u = uniform() * total;
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            acc += weights[i];
            if (u < acc) return i;
        }
        return n - 1;
    }

private:
    std::uint64_t state_;
};

} // namespace kamgrid
