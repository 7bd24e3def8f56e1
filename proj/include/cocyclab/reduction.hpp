#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "cocyclab/cocycle.hpp"
#include "cocyclab/lyapunov.hpp"

namespace cocyclab {

// Invertible two-coordinate cocycle equivalent to a constant-rank one:
// orthonormal range bases M_i and transitions C_{i,j} = M_i^t A_i M_j.
// The step matrix for symbols (old j, new i) is transitions[i][j].
struct ReducedCocycle {
    int k = 0;
    std::vector<double> probs;                      // all rows of the chain
    std::vector<Matrix> bases;                      // m matrices, d x k
    std::vector<std::vector<Matrix>> transitions;   // [i][j], k x k

    int symbols() const { return static_cast<int>(bases.size()); }
    int dim() const {
        return bases.empty() ? 0 : static_cast<int>(bases[0].rows());
    }
};

inline ReducedCocycle reduce(const Cocycle& c, int k,
                             double tol = kDefaultRankTol) {
    detail::require_constant_rank(c, k, tol, "reduce");
    if (!pair_rank_check(c, k, tol)) {
        const double theta = theta_k(c, k, tol);
        throw std::domain_error(
            "reduce: some pair product drops rank (theta_" +
            std::to_string(k) + " = " + std::to_string(theta) +
            "): L_k = -inf regime; reduction undefined");
    }
    ReducedCocycle r;
    r.k = k;
    r.probs = c.probs;
    const int m = c.symbols();
    for (int i = 0; i < m; ++i)
        r.bases.push_back(orthonormal_range_basis(c.matrices[i], k, tol));
    r.transitions.resize(m);
    for (int i = 0; i < m; ++i) {
        r.transitions[i].resize(m);
        for (int j = 0; j < m; ++j) {
            Matrix cij = r.bases[i].transpose() * c.matrices[i] * r.bases[j];
            if (numeric_rank(cij, tol) != k)
                throw std::runtime_error("reduce: transition (" +
                                         std::to_string(i) + "," +
                                         std::to_string(j) +
                                         ") is numerically singular");
            r.transitions[i][j] = std::move(cij);
        }
    }
    return r;
}

struct SemiConjugacyReport {
    Word word;
    double residual = 0.0;    // relative defect of M_{w_n} C^n = A^n(sigma w) M_{w_0}
    double ratio = 1.0;       // |A^n(sigma w)| / |C^n(w)|
    double ratio_bound = 1.0; // max(ratio, 1/ratio)
};

// Check the intertwining identity along one word, with both sides scaled by
// the same per-step factors so long words stay in range. The word supplies
// symbols w_0..w_n; the reduced product uses n transitions and the shifted
// full product uses matrices A_{w_1}..A_{w_n}.
inline SemiConjugacyReport verify_semiconjugacy(const Cocycle& c,
                                                const ReducedCocycle& r,
                                                const Word& w) {
    if (w.empty())
        throw std::domain_error("verify_semiconjugacy: word must be nonempty");
    if (c.symbols() != r.symbols() || c.dim() != r.dim())
        throw std::domain_error("verify_semiconjugacy: shape mismatch");
    const int k = r.k;
    Matrix x = Matrix::Identity(k, k);      // scaled C^n(w)
    Matrix y = r.bases[w[0]];               // scaled A^n(sigma w) M_{w_0}
    Matrix z = Matrix::Identity(c.dim(), c.dim());  // scaled A^n(sigma w)
    for (std::size_t t = 1; t < w.size(); ++t) {
        x = r.transitions[w[t]][w[t - 1]] * x;
        y = c.matrices[w[t]] * y;
        z = c.matrices[w[t]] * z;
        const double f = x.norm();
        x /= f;
        y /= f;
        z /= f;
    }
    SemiConjugacyReport rep;
    rep.word = w;
    const double cnorm = operator_norm(x);
    rep.residual = operator_norm(r.bases[w.back()] * x - y) / (1.0 + cnorm);
    rep.ratio = operator_norm(z) / cnorm;
    rep.ratio_bound = std::max(rep.ratio, 1.0 / rep.ratio);
    return rep;
}

namespace detail {

// Scaled norm of the n-transition Markov product along symbols w_0..w_n.
inline double markov_log_norm(const ReducedCocycle& r, const Word& w) {
    Matrix x = Matrix::Identity(r.k, r.k);
    double acc = 0.0;
    for (std::size_t t = 1; t < w.size(); ++t) {
        x = r.transitions[w[t]][w[t - 1]] * x;
        const double f = x.norm();
        acc += std::log(f);
        x /= f;
    }
    return acc + std::log(operator_norm(x));
}

}  // namespace detail

// Top exponent of the reduced cocycle; transitions are invertible so the
// estimate is always finite.
inline LyapunovEstimate markov_top_exponent(const ReducedCocycle& r,
                                            const McOptions& opt) {
    if (opt.n < 1 || opt.samples < 1)
        throw std::domain_error("markov_top_exponent: n and samples >= 1");
    std::vector<std::vector<double>> vals(opt.samples, std::vector<double>(1));
    parallel_for(opt.workers, opt.samples, [&](std::int64_t s) {
        const Word w = sample_word(r.probs, opt.n + 1, opt.seed,
                                   static_cast<std::uint64_t>(s));
        vals[s][0] = detail::markov_log_norm(r, w) / opt.n;
    });
    return detail::aggregate_samples(vals, opt.n);
}

// QR-deflation spectrum of the reduced cocycle (k-dimensional frames).
inline LyapunovEstimate markov_spectrum_qr(const ReducedCocycle& r, int i_max,
                                           const McOptions& opt) {
    if (i_max < 1 || i_max > r.k)
        throw std::domain_error("markov_spectrum_qr: i_max out of range");
    std::vector<std::vector<double>> vals(opt.samples);
    parallel_for(opt.workers, opt.samples, [&](std::int64_t s) {
        const Word w = sample_word(r.probs, opt.n + 1, opt.seed,
                                   static_cast<std::uint64_t>(s));
        vals[s] = detail::qr_trajectory(
            r.k, i_max, opt.n,
            [&](int t) -> const Matrix& {
                return r.transitions[w[t + 1]][w[t]];
            },
            [&](int) { return 0.0; });
    });
    return detail::aggregate_samples(vals, opt.n);
}

struct SpectrumAgreement {
    LyapunovEstimate original;
    LyapunovEstimate reduced;
    std::vector<double> residuals;
    std::vector<double> combined_se;
};

// Per-index gap between the spectrum of the original cocycle and of its
// reduction, estimated with matched words.
inline SpectrumAgreement spectrum_agreement(const Cocycle& c,
                                            const ReducedCocycle& r, int i_max,
                                            const McOptions& opt) {
    if (i_max > r.k)
        throw std::domain_error("spectrum_agreement: i_max exceeds rank");
    SpectrumAgreement out;
    out.original = spectrum_qr(c, i_max, opt);
    out.reduced = markov_spectrum_qr(r, i_max, opt);
    for (int i = 0; i < i_max; ++i) {
        const double a = out.original.values[i], b = out.reduced.values[i];
        if (is_neg_inf(a) && is_neg_inf(b))
            out.residuals.push_back(0.0);
        else if (is_neg_inf(a) || is_neg_inf(b))
            out.residuals.push_back(std::numeric_limits<double>::infinity());
        else
            out.residuals.push_back(std::abs(a - b));
        out.combined_se.push_back(std::hypot(out.original.stderrs[i],
                                             out.reduced.stderrs[i]));
    }
    return out;
}

// Smallest co-norm, over ordered symbol pairs (a, b), of the orthogonal
// projection from Range(A_b) onto the row space of A_a. Positive exactly in
// the theta_k > 0 regime; its inverse bounds the norm ratios analytically.
inline double kappa_diagnostic(const Cocycle& c, const ReducedCocycle& r,
                               double tol = kDefaultRankTol) {
    double kappa = std::numeric_limits<double>::infinity();
    const int m = c.symbols();
    for (int a = 0; a < m; ++a) {
        const Matrix rows_a =
            orthonormal_range_basis(c.matrices[a].transpose(), r.k, tol);
        for (int b = 0; b < m; ++b) {
            const Vector s = singular_values(rows_a.transpose() * r.bases[b]);
            kappa = std::min(kappa, s(s.size() - 1));
        }
    }
    return kappa;
}

struct RatioScan {
    double c_hat = 1.0;                       // global max(ratio, 1/ratio)
    double max_residual = 0.0;
    std::map<int, double> bucket_c_hat;       // by word-length bucket cap
    std::map<int, double> bucket_log_rate;    // max |log ratio| / n per bucket
};

// Sample words of length 1..max_len and collect semi-conjugacy residuals and
// norm-ratio statistics bucketed by length.
inline RatioScan norm_ratio_scan(const Cocycle& c, const ReducedCocycle& r,
                                 int words, int max_len,
                                 const std::vector<int>& buckets,
                                 std::uint64_t seed) {
    RatioScan scan;
    for (int b : buckets) {
        scan.bucket_c_hat[b] = 1.0;
        scan.bucket_log_rate[b] = 0.0;
    }
    for (int i = 0; i < words; ++i) {
        CounterRng rng(seed, 0x52415449ULL + i);
        const int len =
            2 + static_cast<int>(rng.uniform01() * (max_len - 1));
        const Word w = sample_word(c.probs, len, seed, 0xC0FFEEULL + i);
        const SemiConjugacyReport rep = verify_semiconjugacy(c, r, w);
        scan.c_hat = std::max(scan.c_hat, rep.ratio_bound);
        scan.max_residual = std::max(scan.max_residual, rep.residual);
        const int n = len - 1;
        for (int b : buckets) {
            if (n <= b) {
                scan.bucket_c_hat[b] =
                    std::max(scan.bucket_c_hat[b], rep.ratio_bound);
                scan.bucket_log_rate[b] = std::max(
                    scan.bucket_log_rate[b], std::abs(std::log(rep.ratio)) / n);
                break;
            }
        }
    }
    return scan;
}

}  // namespace cocyclab
