#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "cocyclab/cocycle.hpp"
#include "cocyclab/linalg.hpp"
#include "cocyclab/numeric.hpp"

namespace cocyclab {

struct LyapunovEstimate {
    std::vector<double> values;   // non-increasing; -inf entries trail
    std::vector<double> stderrs;  // 0 for -inf entries
    int n = 0;
    int samples = 0;
    double zero_product_fraction = 0.0;

    double value() const { return values.at(0); }
    double se() const { return stderrs.at(0); }
};

struct McOptions {
    int n = 2000;
    int samples = 200;
    std::uint64_t seed = 0;
    int workers = 1;
    // Relative floor below which a QR diagonal entry counts as a structural
    // rank collapse for the step (scaled by the step matrix norm).
    double structural_floor = 1e-12;
};

namespace detail {

// Aggregate per-sample per-index values. An index with any vanished sample
// aggregates to -inf with stderr 0.
inline LyapunovEstimate aggregate_samples(
    const std::vector<std::vector<double>>& per_sample, int n) {
    const int samples = static_cast<int>(per_sample.size());
    const int width = samples ? static_cast<int>(per_sample[0].size()) : 0;
    LyapunovEstimate est;
    est.n = n;
    est.samples = samples;
    int vanished = 0;
    for (const auto& row : per_sample) {
        bool any = false;
        for (double v : row) any = any || is_neg_inf(v);
        if (any) ++vanished;
    }
    est.zero_product_fraction =
        samples ? static_cast<double>(vanished) / samples : 0.0;
    for (int j = 0; j < width; ++j) {
        bool any_inf = false;
        std::vector<double> col(samples);
        for (int s = 0; s < samples; ++s) {
            col[s] = per_sample[s][j];
            any_inf = any_inf || is_neg_inf(col[s]);
        }
        if (any_inf) {
            est.values.push_back(kNegInf);
            est.stderrs.push_back(0.0);
        } else {
            const MeanStd ms = mean_std(col);
            est.values.push_back(ms.mean);
            est.stderrs.push_back(ms.stddev / std::sqrt(double(samples)));
        }
    }
    return est;
}

// One QR-deflation trajectory: push an orthonormal frame through n steps,
// re-orthonormalize, and average the log diagonal entries after a burn-in
// of ceil(n/10) steps. A diagonal entry at or below floor(t) marks that
// index and all later ones as collapsed for the whole sample.
template <class StepMatrixFn, class FloorFn>
inline std::vector<double> qr_trajectory(int dim, int i_max, int n,
                                         StepMatrixFn&& step_matrix,
                                         FloorFn&& floor_at) {
    Matrix frame = Matrix::Identity(dim, i_max);
    std::vector<double> acc(i_max, 0.0);
    std::vector<bool> collapsed(i_max, false);
    const int burn = std::min((n + 9) / 10, n - 1);
    int kept = 0;
    for (int t = 0; t < n; ++t) {
        const Matrix z = step_matrix(t) * frame;
        Eigen::HouseholderQR<Matrix> qr(z);
        Matrix q = qr.householderQ() * Matrix::Identity(dim, i_max);
        Matrix r = qr.matrixQR()
                       .topLeftCorner(i_max, i_max)
                       .template triangularView<Eigen::Upper>();
        for (int j = 0; j < i_max; ++j) {
            if (r(j, j) < 0.0) {
                r.row(j) = -r.row(j);
                q.col(j) = -q.col(j);
            }
        }
        const double floor = floor_at(t);
        const bool record = t >= burn;
        if (record) ++kept;
        for (int j = 0; j < i_max; ++j) {
            if (collapsed[j]) continue;
            if (r(j, j) <= floor) {
                for (int j2 = j; j2 < i_max; ++j2) collapsed[j2] = true;
                break;
            }
            if (record) acc[j] += std::log(r(j, j));
        }
        frame = q;
    }
    std::vector<double> out(i_max);
    for (int j = 0; j < i_max; ++j)
        out[j] = collapsed[j] ? kNegInf : acc[j] / kept;
    return out;
}

}  // namespace detail

// Monte Carlo estimate of the top exponent: mean of log|A^n| / n over
// independent words.
inline LyapunovEstimate top_exponent_mc(const Cocycle& c,
                                        const McOptions& opt) {
    if (opt.n < 1 || opt.samples < 1)
        throw std::domain_error("top_exponent_mc: n and samples must be >= 1");
    std::vector<std::vector<double>> vals(opt.samples, std::vector<double>(1));
    parallel_for(opt.workers, opt.samples, [&](std::int64_t s) {
        const Word w = sample_word(c.probs, opt.n, opt.seed,
                                   static_cast<std::uint64_t>(s));
        const ScaledProduct sp = scaled_product(c, w);
        vals[s][0] = sp.vanished() ? kNegInf : sp.log_norm / opt.n;
    });
    return detail::aggregate_samples(vals, opt.n);
}

// First i_max exponents by QR deflation over sampled words.
inline LyapunovEstimate spectrum_qr(const Cocycle& c, int i_max,
                                    const McOptions& opt) {
    if (i_max < 1 || i_max > c.dim())
        throw std::domain_error("spectrum_qr: i_max out of range");
    if (opt.n < 1 || opt.samples < 1)
        throw std::domain_error("spectrum_qr: n and samples must be >= 1");
    std::vector<double> step_norms(c.symbols());
    for (int j = 0; j < c.symbols(); ++j)
        step_norms[j] = operator_norm(c.matrices[j]);
    std::vector<std::vector<double>> vals(opt.samples);
    parallel_for(opt.workers, opt.samples, [&](std::int64_t s) {
        const Word w = sample_word(c.probs, opt.n, opt.seed,
                                   static_cast<std::uint64_t>(s));
        vals[s] = detail::qr_trajectory(
            c.dim(), i_max, opt.n,
            [&](int t) -> const Matrix& { return c.matrices[w[t]]; },
            [&](int t) { return opt.structural_floor * step_norms[w[t]]; });
    });
    return detail::aggregate_samples(vals, opt.n);
}

// Cocycle acting by the k-th compound matrices with the same weights.
inline Cocycle exterior_cocycle(const Cocycle& c, int k) {
    Cocycle e;
    e.probs = c.probs;
    for (const Matrix& a : c.matrices) e.matrices.push_back(exterior_power(a, k));
    return e;
}

// | top exponent of the k-th compound cocycle - sum of the first k
// exponents |; both sides -inf counts as zero.
inline double exterior_consistency(const Cocycle& c, int k,
                                   const McOptions& opt) {
    const LyapunovEstimate lhs = top_exponent_mc(exterior_cocycle(c, k), opt);
    const LyapunovEstimate rhs = spectrum_qr(c, k, opt);
    double sum = 0.0;
    for (double v : rhs.values) sum += v;  // -inf propagates
    const double a = lhs.values[0];
    if (is_neg_inf(a) && is_neg_inf(sum)) return 0.0;
    if (is_neg_inf(a) || is_neg_inf(sum))
        return std::numeric_limits<double>::infinity();
    return std::abs(a - sum);
}

}  // namespace cocyclab
