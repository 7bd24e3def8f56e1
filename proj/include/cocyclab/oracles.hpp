#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <optional>
#include <tuple>
#include <vector>

#include "cocyclab/cocycle.hpp"
#include "cocyclab/lyapunov.hpp"

namespace cocyclab {

// Rotation angle, either a plain double or an exact rational multiple of pi.
// The rational form reduces j*alpha mod 2*pi in integer arithmetic, so
// cos(j*alpha) hitting 0, +-1/2 or +-1 is detected exactly.
class RotationAngle {
  public:
    static RotationAngle radians(double a) {
        RotationAngle r;
        r.value_ = a;
        return r;
    }

    // alpha = pi * p / q
    static RotationAngle rational(long long p, long long q) {
        if (q == 0) throw std::domain_error("RotationAngle: q must be nonzero");
        if (q < 0) {
            p = -p;
            q = -q;
        }
        const long long g = std::gcd(p < 0 ? -p : p, q);
        RotationAngle r;
        r.rational_ = true;
        r.p_ = g ? p / g : p;
        r.q_ = g ? q / g : q;
        if (r.q_ > 100000000LL || std::abs(r.p_) > 100000000LL)
            throw std::domain_error("RotationAngle: p/q too large");
        r.value_ = std::numbers::pi * static_cast<double>(r.p_) /
                   static_cast<double>(r.q_);
        return r;
    }

    bool is_rational_pi() const { return rational_; }
    long long p() const { return p_; }
    long long q() const { return q_; }
    double radians_value() const { return value_; }

    // j*alpha reduced mod 2*pi as a numerator r over q (angle = pi*r/q).
    long long reduced_numerator(long long j) const {
        long long r = ((j % (2 * q_)) * (p_ % (2 * q_))) % (2 * q_);
        if (r < 0) r += 2 * q_;
        return r;
    }

    bool cos_exactly_zero(long long j) const {
        if (!rational_) return false;
        const long long r = reduced_numerator(j);
        return 2 * r == q_ || 2 * r == 3 * q_;
    }

    double cos_j(long long j) const {
        if (!rational_) return std::cos(static_cast<double>(j) * value_);
        const long long r = reduced_numerator(j);  // angle = pi r / q, in [0, 2)
        if (r == 0) return 1.0;
        if (r == q_) return -1.0;
        if (2 * r == q_ || 2 * r == 3 * q_) return 0.0;
        if (3 * r == q_ || 3 * r == 5 * q_) return 0.5;
        if (3 * r == 2 * q_ || 3 * r == 4 * q_) return -0.5;
        return std::cos(std::numbers::pi * static_cast<double>(r) /
                        static_cast<double>(q_));
    }

    double sin_j(long long j) const {
        if (!rational_) return std::sin(static_cast<double>(j) * value_);
        const long long r = reduced_numerator(j);
        if (r == 0 || r == q_) return 0.0;
        if (2 * r == q_) return 1.0;
        if (2 * r == 3 * q_) return -1.0;
        if (6 * r == q_ || 6 * r == 5 * q_) return 0.5;
        if (6 * r == 7 * q_ || 6 * r == 11 * q_) return -0.5;
        return std::sin(std::numbers::pi * static_cast<double>(r) /
                        static_cast<double>(q_));
    }

    // Whether j*alpha = pi/2 (mod pi) has a solution at all; for alpha =
    // pi p/q in lowest terms this holds exactly when q is even (j p = q/2
    // mod q then has the unique solution j = (q/2) p^{-1}). Returns the
    // smallest positive solution when it exists.
    std::optional<long long> first_kernel_index() const {
        if (!rational_ || q_ % 2 != 0 || p_ == 0) return std::nullopt;
        long long pm = p_ % q_;
        if (pm < 0) pm += q_;
        // extended gcd for p^{-1} mod q; gcd(p, q) = 1 by construction
        long long r0 = q_, r1 = pm, s0 = 0, s1 = 1;
        while (r1 != 0) {
            const long long quo = r0 / r1;
            std::tie(r0, r1) = std::make_pair(r1, r0 - quo * r1);
            std::tie(s0, s1) = std::make_pair(s1, s0 - quo * s1);
        }
        long long inv = s0 % q_;
        if (inv < 0) inv += q_;
        long long j = static_cast<long long>(
            (static_cast<unsigned long long>(q_ / 2) % q_) * (inv % q_) % q_);
        if (j == 0) j = q_;
        return j;
    }

  private:
    double value_ = 0.0;
    bool rational_ = false;
    long long p_ = 0, q_ = 1;
};

// The coordinate projection / rotation pair with equal weights.
inline Cocycle rotation_cocycle(const RotationAngle& a) {
    Cocycle c;
    c.probs = {0.5, 0.5};
    Matrix p(2, 2);
    p << 1, 0, 0, 0;
    const double co = a.cos_j(1), si = a.sin_j(1);
    Matrix r(2, 2);
    r << co, -si, si, co;
    c.matrices = {p, r};
    return c;
}

struct RotationOracle {
    RotationAngle alpha = RotationAngle::radians(0.0);
    int J = 0;
    double series_sum = 0.0;      // sum_{j<=J} 2^-(j+1) log|cos(j alpha)|
    double l1 = 0.0;              // series_sum / 2; -inf when neg_inf_hit
    bool neg_inf_hit = false;
    long long neg_inf_j = -1;     // first j <= J with cos(j alpha) exactly 0
    bool kernel_solvable = false; // whether such j exists at all
    bool tail_unreliable = false; // |cos(j alpha)| < 1e-3 near the truncation
    std::vector<double> atom_weights;          // 2^-(j+1), j = 0..J
    std::vector<std::pair<double, double>> atoms;  // unit direction per j
};

// Closed-form top exponent of the projection/rotation family through the
// first-return decomposition of words at the projection symbol: blocks
// P R^j P contribute log|cos(j alpha)| with weight 2^-(j+1), and dividing by
// the mean return time 2 (Kac: the projection cylinder has mass 1/2) turns
// the per-return average into the per-step exponent,
//   L1 = (1/2) sum_j 2^-(j+1) log|cos(j alpha)|.
// The same value falls out of the stationary-measure integral: |R v| = 1 on
// every atom and |P v_j| = |cos(j alpha)|, each applied with probability 1/2.
// Vanishing terms are detected exactly in the rational-pi form.
inline RotationOracle rotation_series_L1(const RotationAngle& a, int J) {
    if (J < 1) throw std::domain_error("rotation_series_L1: J must be >= 1");
    RotationOracle out;
    out.alpha = a;
    out.J = J;
    out.kernel_solvable = a.first_kernel_index().has_value();
    double sum = 0.0;
    for (long long j = 0; j <= J; ++j) {
        const double c = a.cos_j(j);
        if (c == 0.0) {
            out.neg_inf_hit = true;
            out.neg_inf_j = j;
            out.series_sum = kNegInf;
            out.l1 = kNegInf;
            return out;
        }
        const double ac = std::abs(c);
        if (ac < 1e-3 && j >= J - 10) out.tail_unreliable = true;
        sum += std::log(ac) / std::exp2(static_cast<double>(j + 1));
        // projective atoms of the stationary measure
        double x = a.cos_j(j), y = a.sin_j(j);
        if (x < 0.0 || (x == 0.0 && y < 0.0)) {
            x = -x;
            y = -y;
        }
        out.atoms.emplace_back(x, y);
        out.atom_weights.push_back(std::exp2(-static_cast<double>(j + 1)));
    }
    out.series_sum = sum;
    out.l1 = 0.5 * sum;
    return out;
}

struct StationaryCheck {
    double residual = 0.0;
    bool kernel_hit = false;
    long long kernel_j = -1;
};

namespace detail {

// Accumulate weight at a projective atom, merging by projective distance.
inline void add_atom(std::vector<std::pair<double, double>>& dirs,
                     std::vector<double>& weights, double x, double y,
                     double w) {
    if (x < 0.0 || (x == 0.0 && y < 0.0)) {
        x = -x;
        y = -y;
    }
    const double norm = std::hypot(x, y);
    x /= norm;
    y /= norm;
    for (std::size_t i = 0; i < dirs.size(); ++i) {
        const double dm = std::hypot(dirs[i].first - x, dirs[i].second - y);
        const double dp = std::hypot(dirs[i].first + x, dirs[i].second + y);
        if (std::min(dm, dp) < 1e-9) {
            weights[i] += w;
            return;
        }
    }
    dirs.emplace_back(x, y);
    weights.push_back(w);
}

}  // namespace detail

// Push the truncated atom measure through (P_* + R_*)/2 and return the
// total-variation-style residual against itself; pure truncation leaves at
// most 2^-(J+1).
inline StationaryCheck rotation_stationary_check(const RotationAngle& a,
                                                 int J) {
    if (J < 1)
        throw std::domain_error("rotation_stationary_check: J must be >= 1");
    StationaryCheck out;
    std::vector<std::pair<double, double>> nu_dirs;
    std::vector<double> nu_w;
    for (long long j = 0; j <= J; ++j) {
        if (a.cos_exactly_zero(j)) {
            out.kernel_hit = true;
            out.kernel_j = j;
            return out;
        }
        detail::add_atom(nu_dirs, nu_w, a.cos_j(j), a.sin_j(j),
                         std::exp2(-static_cast<double>(j + 1)));
    }
    std::vector<std::pair<double, double>> push_dirs;
    std::vector<double> push_w;
    for (std::size_t i = 0; i < nu_dirs.size(); ++i) {
        const auto [x, y] = nu_dirs[i];
        if (x == 0.0) {  // atom in the kernel of P
            out.kernel_hit = true;
            return out;
        }
        // P collapses every atom to the first coordinate axis.
        detail::add_atom(push_dirs, push_w, 1.0, 0.0, 0.5 * nu_w[i]);
        const double co = a.cos_j(1), si = a.sin_j(1);
        detail::add_atom(push_dirs, push_w, co * x - si * y, si * x + co * y,
                         0.5 * nu_w[i]);
    }
    // Sum of absolute weight differences over the union of atoms.
    double residual = 0.0;
    std::vector<bool> used(push_dirs.size(), false);
    for (std::size_t i = 0; i < nu_dirs.size(); ++i) {
        double got = 0.0;
        for (std::size_t j = 0; j < push_dirs.size(); ++j) {
            const double dm = std::hypot(push_dirs[j].first - nu_dirs[i].first,
                                         push_dirs[j].second - nu_dirs[i].second);
            const double dp = std::hypot(push_dirs[j].first + nu_dirs[i].first,
                                         push_dirs[j].second + nu_dirs[i].second);
            if (std::min(dm, dp) < 1e-9) {
                got += push_w[j];
                used[j] = true;
            }
        }
        residual += std::abs(got - nu_w[i]);
    }
    for (std::size_t j = 0; j < push_dirs.size(); ++j)
        if (!used[j]) residual += push_w[j];
    out.residual = residual;
    return out;
}

// Exact top exponent of a rank-one family A_i = u_i v_i^t:
// sum_{i,j} p_i p_j log|v_i^t u_j|. -inf when a weighted pairing vanishes.
inline double rank_one_exact_L1(const Cocycle& c,
                                double tol = kDefaultRankTol) {
    const int m = c.symbols();
    std::vector<Vector> us, vs;
    for (int i = 0; i < m; ++i) {
        Eigen::JacobiSVD<Matrix> svd(c.matrices[i],
                                     Eigen::ComputeThinU | Eigen::ComputeThinV);
        const Vector s = svd.singularValues();
        const int r = numeric_rank(c.matrices[i], tol);
        if (r != 1)
            throw std::domain_error("rank_one_exact_L1: matrix " +
                                    std::to_string(i) + " has numeric rank " +
                                    std::to_string(r));
        us.push_back(s(0) * svd.matrixU().col(0));
        vs.push_back(svd.matrixV().col(0));
    }
    double sum = 0.0;
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            const double w = c.probs[i] * c.probs[j];
            if (w <= 0.0) continue;
            const double dot = std::abs(vs[i].dot(us[j]));
            if (dot == 0.0) return kNegInf;
            sum += w * std::log(dot);
        }
    }
    return sum;
}

// log|eigenvalue| sorted descending; -inf for zero eigenvalues. The exact
// Lyapunov spectrum of a one-symbol cocycle.
inline std::vector<double> single_matrix_spectrum(const Matrix& a) {
    if (a.rows() != a.cols())
        throw std::domain_error("single_matrix_spectrum: matrix must be square");
    Eigen::EigenSolver<Matrix> eig(a, /*computeEigenvectors=*/false);
    std::vector<double> out;
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        const double mod = std::abs(eig.eigenvalues()(i));
        out.push_back(mod == 0.0 ? kNegInf : std::log(mod));
    }
    std::sort(out.begin(), out.end(), std::greater<>());
    return out;
}

struct AlphaScanRow {
    RotationAngle alpha = RotationAngle::radians(0.0);
    double series_sum = 0.0;
    double l1 = 0.0;        // closed-form exponent; -inf on a kernel hit
    bool series_neg_inf = false;
    bool tail_unreliable = false;
    double mc_value = 0.0;  // -inf when products vanish
    double mc_se = 0.0;
    double mc_zero_fraction = 0.0;
};

// Closed-form value and Monte Carlo estimate side by side on an angle grid;
// the -inf dips among finite values are the visible face of the
// discontinuity.
inline std::vector<AlphaScanRow> rotation_alpha_scan(
    const std::vector<RotationAngle>& grid, int J, const McOptions& opt) {
    std::vector<AlphaScanRow> rows(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        AlphaScanRow row;
        row.alpha = grid[i];
        const RotationOracle se = rotation_series_L1(grid[i], J);
        row.series_sum = se.series_sum;
        row.l1 = se.l1;
        row.series_neg_inf = se.neg_inf_hit;
        row.tail_unreliable = se.tail_unreliable;
        const LyapunovEstimate mc = top_exponent_mc(rotation_cocycle(grid[i]), opt);
        row.mc_value = mc.value();
        row.mc_se = mc.se();
        row.mc_zero_fraction = mc.zero_product_fraction;
        rows[i] = row;
    }
    return rows;
}

}  // namespace cocyclab
