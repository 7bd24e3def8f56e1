#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <utility>

namespace cocyclab {

namespace detail {

// Philox-2x64 round constants.
inline constexpr std::uint64_t kPhiloxMult = 0xD2B74407B1CE6E93ULL;
inline constexpr std::uint64_t kPhiloxBump = 0x9E3779B97F4A7C15ULL;

inline void philox_round(std::uint64_t& x0, std::uint64_t& x1, std::uint64_t key) {
    const unsigned __int128 prod =
        static_cast<unsigned __int128>(kPhiloxMult) * x0;
    const std::uint64_t hi = static_cast<std::uint64_t>(prod >> 64);
    const std::uint64_t lo = static_cast<std::uint64_t>(prod);
    x0 = hi ^ key ^ x1;
    x1 = lo;
}

inline std::pair<std::uint64_t, std::uint64_t>
philox2x64(std::uint64_t c0, std::uint64_t c1, std::uint64_t key) {
    for (int r = 0; r < 10; ++r) {
        philox_round(c0, c1, key);
        key += kPhiloxBump;
    }
    return {c0, c1};
}

}  // namespace detail

// Counter-based random stream: the whole output sequence is a pure function
// of (seed, stream). Distinct streams are independent, so Monte Carlo sample
// index -> stream gives worker-count-independent draws.
class CounterRng {
  public:
    CounterRng(std::uint64_t seed, std::uint64_t stream)
        : key_(seed), stream_(stream) {}

    std::uint64_t next_u64() {
        if (!have_buffered_) {
            auto [a, b] = detail::philox2x64(counter_++, stream_, key_);
            buffered_ = b;
            have_buffered_ = true;
            return a;
        }
        have_buffered_ = false;
        return buffered_;
    }

    // Uniform in [0, 1), 53 random bits.
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller; caches the second variate.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        // (0, 1] to keep the log finite.
        const double u1 =
            (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double t = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(t);
        have_spare_ = true;
        return r * std::cos(t);
    }

    // Index into `probs` by cumulative inversion. Zero-probability entries
    // are never selected.
    int categorical(std::span<const double> probs) {
        const double u = uniform01();
        double acc = 0.0;
        int last_positive = -1;
        for (std::size_t j = 0; j < probs.size(); ++j) {
            if (probs[j] > 0.0) last_positive = static_cast<int>(j);
            acc += probs[j];
            if (u < acc && probs[j] > 0.0) return static_cast<int>(j);
        }
        if (last_positive < 0)
            throw std::domain_error("categorical: no positive probability mass");
        return last_positive;  // u landed in the rounding gap below 1
    }

  private:
    std::uint64_t key_;
    std::uint64_t stream_;
    std::uint64_t counter_ = 0;
    std::uint64_t buffered_ = 0;
    bool have_buffered_ = false;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

// 64-bit mix (SplitMix64 finalizer); used to derive auxiliary seeds.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace cocyclab
