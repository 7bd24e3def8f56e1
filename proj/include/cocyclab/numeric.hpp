#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <thread>
#include <vector>

namespace cocyclab {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

inline bool is_neg_inf(double x) { return std::isinf(x) && x < 0.0; }

// Default relative tolerance for numeric rank decisions.
inline constexpr double kDefaultRankTol = 1e-9;

inline std::int64_t binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    std::int64_t r = 1;
    for (int i = 1; i <= k; ++i) {
        r = r * (n - k + i) / i;
        if (r < 0 || r > (std::int64_t{1} << 60))
            throw std::domain_error("binomial: coefficient overflow");
    }
    return r;
}

// Pairwise summation over a fixed index order. The tree shape depends only on
// the element count, so totals do not depend on how the vector was filled.
inline double pairwise_sum(std::span<const double> xs) {
    const std::size_t n = xs.size();
    if (n <= 8) {
        double s = 0.0;
        for (double x : xs) s += x;
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(xs.subspan(0, half)) + pairwise_sum(xs.subspan(half));
}

struct MeanStd {
    double mean = 0.0;
    double stddev = 0.0;  // sample standard deviation (n-1 divisor)
};

inline MeanStd mean_std(std::span<const double> xs) {
    MeanStd out;
    const std::size_t n = xs.size();
    if (n == 0) return out;
    out.mean = pairwise_sum(xs) / static_cast<double>(n);
    if (n == 1) return out;
    std::vector<double> sq(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double d = xs[i] - out.mean;
        sq[i] = d * d;
    }
    out.stddev = std::sqrt(pairwise_sum(sq) / static_cast<double>(n - 1));
    return out;
}

// Static partition of [0, count) across `workers` threads. fn(i) must only
// touch state owned by index i; results are then reduced deterministically
// by the caller (pairwise_sum over the index order).
template <class Fn>
inline void parallel_for(int workers, std::int64_t count, Fn&& fn) {
    if (workers <= 1 || count < 2) {
        for (std::int64_t i = 0; i < count; ++i) fn(i);
        return;
    }
    const int nthreads = static_cast<int>(std::min<std::int64_t>(workers, count));
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (int t = 0; t < nthreads; ++t) {
        pool.emplace_back([&, t] {
            const std::int64_t lo = count * t / nthreads;
            const std::int64_t hi = count * (t + 1) / nthreads;
            for (std::int64_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace cocyclab
