#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cocyclab/cocycle.hpp"
#include "cocyclab/lyapunov.hpp"

namespace cocyclab {

struct TailRow {
    int n = 0;
    double epsilon = 0.0;
    double p_hat = 0.0;
    double se = 0.0;
    int samples = 0;
};

using TailCurve = std::vector<TailRow>;

struct TailOptions {
    std::vector<int> n_grid;
    std::vector<double> eps_grid;
    int samples = 400;
    std::uint64_t seed = 0;
    int workers = 1;
};

// Empirical deviation probabilities P{ |log|A^n|/n - L_ref| > eps } on the
// (n, eps) grid. Words are shared across the eps column, so the curve is
// exactly non-increasing in eps; vanished products count as deviations for
// every eps.
inline TailCurve deviation_tail(const Cocycle& c, double l_ref,
                                const TailOptions& opt) {
    if (!std::isfinite(l_ref))
        throw std::domain_error("deviation_tail: L_ref must be finite");
    if (opt.n_grid.empty() || opt.eps_grid.empty())
        throw std::domain_error("deviation_tail: empty grid");
    TailCurve curve;
    for (std::size_t ni = 0; ni < opt.n_grid.size(); ++ni) {
        const int n = opt.n_grid[ni];
        std::vector<double> xs(opt.samples);
        parallel_for(opt.workers, opt.samples, [&](std::int64_t s) {
            const std::uint64_t index =
                (static_cast<std::uint64_t>(ni) << 32) |
                static_cast<std::uint64_t>(s);
            const Word w = sample_word(c.probs, n, opt.seed, index);
            const ScaledProduct sp = scaled_product(c, w);
            xs[s] = sp.vanished() ? kNegInf : sp.log_norm / n;
        });
        for (double eps : opt.eps_grid) {
            if (eps <= 0.0)
                throw std::domain_error("deviation_tail: eps must be positive");
            int hits = 0;
            for (double x : xs)
                if (is_neg_inf(x) || std::abs(x - l_ref) > eps) ++hits;
            TailRow row;
            row.n = n;
            row.epsilon = eps;
            row.samples = opt.samples;
            row.p_hat = static_cast<double>(hits) / opt.samples;
            row.se = std::sqrt(row.p_hat * (1.0 - row.p_hat) / opt.samples);
            curve.push_back(row);
        }
    }
    return curve;
}

struct LdtFit {
    double c_big = 0.0;    // prefactor C
    double c_rate = 0.0;   // rate c in C exp(-n c eps^2)
    double eps0 = 0.0;     // largest eps in the fitted window
    double residual = 0.0; // weighted RMS residual of log p
    double r2 = 0.0;
    bool usable = false;
    std::string reason;
};

// Weighted least squares of log p_hat against (1, -n eps^2) over the rows
// with p_hat in (1e-4, 0.5); weights are inverse delta-method variances.
inline LdtFit fit_ldt_rate(const TailCurve& t) {
    LdtFit fit;
    std::vector<double> y, x, w;
    for (const TailRow& row : t) {
        if (row.p_hat <= 1e-4 || row.p_hat >= 0.5) continue;
        y.push_back(std::log(row.p_hat));
        x.push_back(-static_cast<double>(row.n) * row.epsilon * row.epsilon);
        w.push_back(row.samples * row.p_hat / (1.0 - row.p_hat));
        fit.eps0 = std::max(fit.eps0, row.epsilon);
    }
    if (y.size() < 6) {
        fit.reason = "only " + std::to_string(y.size()) +
                     " rows with p_hat in (1e-4, 0.5); need 6";
        return fit;
    }
    double sw = 0, swx = 0, swy = 0, swxx = 0, swxy = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        sw += w[i];
        swx += w[i] * x[i];
        swy += w[i] * y[i];
        swxx += w[i] * x[i] * x[i];
        swxy += w[i] * x[i] * y[i];
    }
    const double det = sw * swxx - swx * swx;
    if (det <= 0.0 || !std::isfinite(det)) {
        fit.reason = "degenerate design (all cells at one n*eps^2?)";
        return fit;
    }
    const double slope = (sw * swxy - swx * swy) / det;
    const double intercept = (swxx * swy - swx * swxy) / det;
    fit.c_rate = slope;
    fit.c_big = std::exp(intercept);
    double ss_res = 0, ss_tot = 0;
    const double ybar = swy / sw;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double pred = intercept + slope * x[i];
        ss_res += w[i] * (y[i] - pred) * (y[i] - pred);
        ss_tot += w[i] * (y[i] - ybar) * (y[i] - ybar);
    }
    fit.residual = std::sqrt(ss_res / sw);
    fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 0.0;
    fit.usable = fit.c_rate > 0.0 && fit.r2 >= 0.8;
    if (!fit.usable)
        fit.reason = fit.c_rate <= 0.0 ? "non-positive decay rate"
                                       : "poor fit (r2 < 0.8)";
    return fit;
}

struct UniformProbeResult {
    double min_c_rate = std::numeric_limits<double>::infinity();
    double max_c_big = 0.0;
    int trials = 0;
    int fit_failures = 0;
    int rejected_neighbors = 0;  // resampled because a pair product lost rank
    std::vector<LdtFit> fits;
};

namespace detail {

// I + radius * G with G spectral-norm-clipped to 1, so the factor is
// invertible for radius < 1 and the perturbed cocycle keeps its rank.
inline Matrix invertible_factor(int d, double radius, CounterRng& rng) {
    Matrix g(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) g(i, j) = rng.normal();
    const double s1 = operator_norm(g);
    if (s1 > 1.0) g /= s1;
    return Matrix::Identity(d, d) + radius * g;
}

}  // namespace detail

// Multiplicative neighbor B_i = E_i A_i F_i inside the constant-rank class.
inline Cocycle sample_neighbor(const Cocycle& c, double radius,
                               std::uint64_t seed, std::uint64_t trial) {
    if (radius < 0.0 || radius >= 1.0)
        throw std::domain_error("sample_neighbor: radius must be in [0, 1)");
    Cocycle b;
    b.probs = c.probs;
    CounterRng rng(seed, 0x4E424852ULL + trial);
    for (const Matrix& a : c.matrices) {
        const Matrix e = detail::invertible_factor(c.dim(), radius, rng);
        const Matrix f = detail::invertible_factor(c.dim(), radius, rng);
        b.matrices.push_back(e * a * f);
    }
    return b;
}

// Probe the uniformity of the large-deviation constants over sampled
// neighbors of c in the constant-rank class: re-estimate L1, fit the rate,
// and report the worst constants.
inline UniformProbeResult uniform_ldt_probe(const Cocycle& c, int k,
                                            double radius, int trials,
                                            const TailOptions& topt,
                                            std::uint64_t seed,
                                            int pilot_samples = 64) {
    detail::require_constant_rank(c, k, kDefaultRankTol, "uniform_ldt_probe");
    if (!pair_rank_check(c, k))
        throw std::domain_error("uniform_ldt_probe: theta_k vanishes");
    UniformProbeResult out;
    const int max_n = *std::max_element(topt.n_grid.begin(), topt.n_grid.end());
    std::uint64_t trial_counter = 0;
    for (int t = 0; t < trials; ++t) {
        Cocycle b;
        while (true) {
            b = sample_neighbor(c, radius, seed, trial_counter++);
            if (pair_rank_check(b, k)) break;
            ++out.rejected_neighbors;
            if (out.rejected_neighbors > 100 * trials + 100)
                throw std::runtime_error(
                    "uniform_ldt_probe: neighbor sampling keeps leaving the "
                    "theta_k > 0 region");
        }
        McOptions pilot;
        pilot.n = 10 * max_n;
        pilot.samples = pilot_samples;
        pilot.seed = mix64(seed + t);
        pilot.workers = topt.workers;
        const LyapunovEstimate l1 = top_exponent_mc(b, pilot);
        ++out.trials;
        if (is_neg_inf(l1.value())) {
            ++out.fit_failures;
            out.fits.push_back(LdtFit{});
            out.fits.back().reason = "pilot estimate is -inf";
            continue;
        }
        TailOptions per = topt;
        per.seed = mix64(seed ^ (0xABCD1234ULL + t));
        const LdtFit fit = fit_ldt_rate(deviation_tail(b, l1.value(), per));
        out.fits.push_back(fit);
        if (!fit.usable) {
            ++out.fit_failures;
            continue;
        }
        out.min_c_rate = std::min(out.min_c_rate, fit.c_rate);
        out.max_c_big = std::max(out.max_c_big, fit.c_big);
    }
    return out;
}

struct HolderFit {
    double alpha_hat = 0.0;
    double constant = 0.0;
    double delta_min = 0.0, delta_max = 0.0;  // fitted window
    double r2 = 0.0;
    bool usable = false;
    std::string reason;
};

// Log-log fit of a modulus phi(delta) over the window where phi clears
// 5 times its standard error.
inline HolderFit fit_holder(std::span<const double> deltas,
                            std::span<const double> phis,
                            std::span<const double> ses) {
    HolderFit fit;
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        if (deltas[i] <= 0.0 || phis[i] <= 0.0) continue;
        if (phis[i] <= 5.0 * ses[i]) continue;
        if (fit.delta_min == 0.0 || deltas[i] < fit.delta_min)
            fit.delta_min = deltas[i];
        fit.delta_max = std::max(fit.delta_max, deltas[i]);
        lx.push_back(std::log(deltas[i]));
        ly.push_back(std::log(phis[i]));
    }
    if (lx.size() < 3) {
        fit.reason = "modulus below resolution";
        return fit;
    }
    const std::size_t n = lx.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += lx[i];
        sy += ly[i];
        sxx += lx[i] * lx[i];
        sxy += lx[i] * ly[i];
    }
    const double det = n * sxx - sx * sx;
    if (det <= 0.0) {
        fit.reason = "degenerate delta grid";
        return fit;
    }
    const double slope = (n * sxy - sx * sy) / det;
    const double intercept = (sy - slope * sx) / n;
    fit.alpha_hat = slope;
    fit.constant = std::exp(intercept);
    double ss_res = 0, ss_tot = 0;
    const double ybar = sy / n;
    for (std::size_t i = 0; i < n; ++i) {
        const double pred = intercept + slope * lx[i];
        ss_res += (ly[i] - pred) * (ly[i] - pred);
        ss_tot += (ly[i] - ybar) * (ly[i] - ybar);
    }
    fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    fit.usable = fit.alpha_hat > 0.0 && fit.alpha_hat <= 1.5;
    if (!fit.usable) fit.reason = "exponent outside (0, 1.5]";
    return fit;
}

// Rank-preserving perturbation path B_i(delta) = (I + delta G_i) A_i
// (I + delta H_i) with fixed direction matrices.
struct HolderPath {
    std::vector<Matrix> left;   // G_i, spectral norm <= 1
    std::vector<Matrix> right;  // H_i, spectral norm <= 1
};

inline HolderPath random_direction(const Cocycle& c, std::uint64_t seed) {
    HolderPath path;
    CounterRng rng(seed, 0x484F4C44ULL);
    const int d = c.dim();
    for (int i = 0; i < c.symbols(); ++i) {
        Matrix g(d, d), h(d, d);
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b) {
                g(a, b) = rng.normal();
                h(a, b) = rng.normal();
            }
        g /= std::max(1.0, operator_norm(g));
        h /= std::max(1.0, operator_norm(h));
        path.left.push_back(g);
        path.right.push_back(h);
    }
    return path;
}

inline Cocycle perturb_along(const Cocycle& c, const HolderPath& path,
                             double delta) {
    Cocycle b;
    b.probs = c.probs;
    const Matrix id = Matrix::Identity(c.dim(), c.dim());
    for (int i = 0; i < c.symbols(); ++i)
        b.matrices.push_back((id + delta * path.left[i]) * c.matrices[i] *
                             (id + delta * path.right[i]));
    return b;
}

// Empirical modulus of continuity of L1 along the path, with common random
// numbers across delta so phi(0) = 0 exactly and the Monte Carlo noise of
// the difference stays small.
inline HolderFit holder_probe(const Cocycle& c, const HolderPath& path,
                              std::span<const double> delta_grid,
                              const McOptions& mc) {
    double norm_cap = 0.0;
    for (const Matrix& g : path.left) norm_cap = std::max(norm_cap, operator_norm(g));
    for (const Matrix& h : path.right) norm_cap = std::max(norm_cap, operator_norm(h));
    for (double d : delta_grid)
        if (d * norm_cap >= 1.0)
            throw std::domain_error(
                "holder_probe: delta too large for an invertible perturbation");

    std::vector<std::vector<double>> base(mc.samples, std::vector<double>(1));
    parallel_for(mc.workers, mc.samples, [&](std::int64_t s) {
        const Word w = sample_word(c.probs, mc.n, mc.seed,
                                   static_cast<std::uint64_t>(s));
        const ScaledProduct sp = scaled_product(c, w);
        base[s][0] = sp.vanished() ? kNegInf : sp.log_norm / mc.n;
    });

    std::vector<double> phis(delta_grid.size()), ses(delta_grid.size());
    for (std::size_t di = 0; di < delta_grid.size(); ++di) {
        const Cocycle b = perturb_along(c, path, delta_grid[di]);
        std::vector<double> diffs(mc.samples);
        parallel_for(mc.workers, mc.samples, [&](std::int64_t s) {
            const Word w = sample_word(b.probs, mc.n, mc.seed,
                                       static_cast<std::uint64_t>(s));
            const ScaledProduct sp = scaled_product(b, w);
            const double x = sp.vanished() ? kNegInf : sp.log_norm / mc.n;
            diffs[s] = x - base[s][0];
        });
        const MeanStd ms = mean_std(diffs);
        phis[di] = std::abs(ms.mean);
        ses[di] = ms.stddev / std::sqrt(static_cast<double>(mc.samples));
    }
    std::vector<double> deltas(delta_grid.begin(), delta_grid.end());
    return fit_holder(deltas, phis, ses);
}

}  // namespace cocyclab
