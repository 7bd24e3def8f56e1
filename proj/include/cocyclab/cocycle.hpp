#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "cocyclab/linalg.hpp"
#include "cocyclab/numeric.hpp"
#include "cocyclab/rng.hpp"

namespace cocyclab {

// Finitely supported random cocycle: symbol j is drawn with probability
// probs[j] and acts by matrices[j].
struct Cocycle {
    std::vector<double> probs;
    std::vector<Matrix> matrices;

    int symbols() const { return static_cast<int>(matrices.size()); }
    int dim() const {
        return matrices.empty() ? 0 : static_cast<int>(matrices[0].rows());
    }
};

using Word = std::vector<int>;  // symbols in [0, m)

struct ValidationReport {
    std::vector<std::string> defects;
    bool strict_interior = false;   // all probabilities strictly positive
    std::vector<int> ranks;         // numeric rank per matrix
    bool constant_rank = false;
    int rank = 0;                   // meaningful when constant_rank

    bool ok() const { return defects.empty(); }
};

inline ValidationReport validate(const Cocycle& c,
                                 double tol = kDefaultRankTol) {
    ValidationReport rep;
    const int m = c.symbols();
    if (m == 0) {
        rep.defects.push_back("no matrices");
        return rep;
    }
    if (static_cast<int>(c.probs.size()) != m) {
        std::ostringstream os;
        os << "probs has " << c.probs.size() << " entries, expected " << m;
        rep.defects.push_back(os.str());
    }
    double sum = 0.0;
    rep.strict_interior = !c.probs.empty();
    for (std::size_t j = 0; j < c.probs.size(); ++j) {
        const double p = c.probs[j];
        if (!std::isfinite(p) || p < 0.0) {
            std::ostringstream os;
            os << "probs[" << j << "] = " << p << " is not a valid probability";
            rep.defects.push_back(os.str());
        }
        if (p <= 0.0) rep.strict_interior = false;
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12) {
        std::ostringstream os;
        os << "probs sum = " << sum;
        rep.defects.push_back(os.str());
    }
    const int d = c.dim();
    for (int j = 0; j < m; ++j) {
        const Matrix& a = c.matrices[j];
        if (a.rows() != d || a.cols() != d) {
            std::ostringstream os;
            os << "matrices[" << j << "] is " << a.rows() << "x" << a.cols()
               << ", expected " << d << "x" << d;
            rep.defects.push_back(os.str());
            rep.ranks.push_back(-1);
            continue;
        }
        if (!a.allFinite()) {
            std::ostringstream os;
            os << "matrices[" << j << "] has non-finite entries";
            rep.defects.push_back(os.str());
            rep.ranks.push_back(-1);
            continue;
        }
        rep.ranks.push_back(numeric_rank(a, tol));
    }
    rep.constant_rank = !rep.ranks.empty();
    for (int r : rep.ranks)
        if (r < 0 || r != rep.ranks[0]) rep.constant_rank = false;
    if (rep.constant_rank) rep.rank = rep.ranks[0];
    return rep;
}

namespace detail {

inline void check_probs_for_sampling(std::span<const double> probs) {
    double sum = 0.0;
    for (double p : probs) {
        if (!std::isfinite(p) || p < 0.0)
            throw std::domain_error("sample_word: invalid probability vector");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw std::domain_error("sample_word: probabilities sum to " +
                                std::to_string(sum));
}

}  // namespace detail

// Deterministic function of (seed, index): symbols i.i.d. with law `probs`.
inline Word sample_word(std::span<const double> probs, int n,
                        std::uint64_t seed, std::uint64_t index) {
    detail::check_probs_for_sampling(probs);
    if (n < 0) throw std::domain_error("sample_word: negative length");
    CounterRng rng(seed, index);
    Word w(n);
    for (int t = 0; t < n; ++t) w[t] = rng.categorical(probs);
    return w;
}

inline constexpr int kMaxExactProductLength = 60;

// Right-to-left product A_{w[n-1]} ... A_{w[0]}. Unscaled, so the length is
// capped; use scaled_product beyond that.
inline Matrix product(const Cocycle& c, const Word& w) {
    if (static_cast<int>(w.size()) > kMaxExactProductLength)
        throw std::domain_error("product: word longer than " +
                                std::to_string(kMaxExactProductLength) +
                                "; use scaled_product");
    Matrix p = Matrix::Identity(c.dim(), c.dim());
    for (int s : w) {
        if (s < 0 || s >= c.symbols())
            throw std::domain_error("product: symbol out of range");
        p = c.matrices[s] * p;
    }
    return p;
}

// log of the 2-norm of the word product plus the normalized product itself.
// log_norm is -inf exactly when the running product becomes the zero matrix;
// tiny but nonzero products keep accumulating finite logs.
struct ScaledProduct {
    double log_norm = 0.0;
    Matrix direction;  // unit 2-norm; empty when log_norm is -inf

    bool vanished() const { return is_neg_inf(log_norm); }
};

inline ScaledProduct scaled_product(const Cocycle& c, const Word& w) {
    const int d = c.dim();
    Matrix b = Matrix::Identity(d, d);
    double acc = 0.0;  // log of accumulated Frobenius scalings
    for (int s : w) {
        if (s < 0 || s >= c.symbols())
            throw std::domain_error("scaled_product: symbol out of range");
        b = c.matrices[s] * b;
        if ((b.array() == 0.0).all()) return ScaledProduct{kNegInf, Matrix()};
        const double f = b.norm();
        acc += std::log(f);
        b /= f;
    }
    const double s1 = operator_norm(b);
    ScaledProduct out;
    out.log_norm = acc + std::log(s1);
    out.direction = b / s1;
    return out;
}

namespace detail {

inline void require_constant_rank(const Cocycle& c, int k, double tol,
                                  const char* who) {
    const ValidationReport rep = validate(c, tol);
    if (!rep.ok())
        throw std::domain_error(std::string(who) + ": invalid cocycle: " +
                                rep.defects.front());
    if (!rep.constant_rank || rep.rank != k)
        throw std::domain_error(std::string(who) +
                                ": cocycle does not have constant rank " +
                                std::to_string(k));
}

}  // namespace detail

// min over ordered pairs (i, j) of the top-k singular value product of
// A_i A_j; zero exactly when some pair product drops rank.
inline double theta_k(const Cocycle& c, int k,
                      double tol = kDefaultRankTol) {
    detail::require_constant_rank(c, k, tol, "theta_k");
    double best = std::numeric_limits<double>::infinity();
    for (const Matrix& ai : c.matrices)
        for (const Matrix& aj : c.matrices)
            best = std::min(best, compound_norm(ai * aj, k));
    return best;
}

// True iff every ordered pair product keeps numeric rank k.
inline bool pair_rank_check(const Cocycle& c, int k,
                            double tol = kDefaultRankTol) {
    detail::require_constant_rank(c, k, tol, "pair_rank_check");
    for (const Matrix& ai : c.matrices)
        for (const Matrix& aj : c.matrices)
            if (numeric_rank(ai * aj, tol) != k) return false;
    return true;
}

}  // namespace cocyclab
