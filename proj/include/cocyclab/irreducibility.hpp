#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "cocyclab/reduction.hpp"

namespace cocyclab {

// Return-word elements at a base symbol: products of transitions along
// cyclic paths l -> i_1 -> ... -> i_n -> l, which represent the restricted
// maps A_l A_{i_1} ... A_{i_n} on Range(A_l) in the M_l coordinates.
struct GroupSample {
    int base_symbol = 0;
    std::vector<Matrix> elements;   // k x k, invertible
    std::vector<Word> words;        // intermediate symbols per element
};

// Deterministic sample of at most `budget` group elements: all cyclic paths
// with up to 3 intermediate symbols, then geometric-length random paths,
// plus the inverses of everything sampled.
inline GroupSample return_words(const ReducedCocycle& r, int l, int max_len,
                                int budget, std::uint64_t seed) {
    if (budget < 1) throw std::domain_error("return_words: budget must be >= 1");
    if (l < 0 || l >= r.symbols())
        throw std::domain_error("return_words: base symbol out of range");
    GroupSample g;
    g.base_symbol = l;
    const int m = r.symbols();
    const int direct_budget = std::max(1, budget / 2);

    auto push = [&](const Word& mid) {
        int prev = l;
        Matrix e = Matrix::Identity(r.k, r.k);
        for (int s : mid) {
            e = r.transitions[s][prev] * e;
            prev = s;
        }
        e = r.transitions[l][prev] * e;
        g.elements.push_back(std::move(e));
        g.words.push_back(mid);
    };

    // exhaust short cycles first
    std::vector<Word> frontier{Word{}};
    for (int len = 0;
         len <= 3 && static_cast<int>(g.elements.size()) < direct_budget;
         ++len) {
        std::vector<Word> next;
        for (const Word& w : frontier) {
            if (static_cast<int>(w.size()) == len) {
                if (static_cast<int>(g.elements.size()) >= direct_budget) break;
                push(w);
                for (int s = 0; s < m; ++s) {
                    Word w2 = w;
                    w2.push_back(s);
                    next.push_back(std::move(w2));
                }
            }
        }
        frontier = std::move(next);
    }

    // geometric-length random paths, capped at max_len
    CounterRng rng(seed, 0x47524F55ULL);
    while (static_cast<int>(g.elements.size()) < direct_budget) {
        int len = 4;
        while (len < max_len && rng.uniform01() < 0.5) ++len;
        Word mid(len);
        for (int t = 0; t < len; ++t)
            mid[t] = static_cast<int>(rng.uniform01() * m) % m;
        push(mid);
    }

    const std::size_t n_direct = g.elements.size();
    for (std::size_t i = 0;
         i < n_direct && static_cast<int>(g.elements.size()) < budget; ++i) {
        g.elements.push_back(g.elements[i].inverse());
        Word w = g.words[i];
        w.insert(w.begin(), -1);  // audit marker: inverse of the same path
        g.words.push_back(std::move(w));
    }
    return g;
}

// Dimension of the linear span of the elements and their pairwise products
// inside the k^2-dimensional matrix space, by the rank of the Gram matrix.
inline int algebra_span_dim(std::span<const Matrix> elements,
                            double tol = 1e-9) {
    if (elements.empty())
        throw std::domain_error("algebra_span_dim: empty sample");
    const Eigen::Index k = elements[0].rows();
    const Eigen::Index dim = k * k;
    Matrix gram = Matrix::Zero(dim, dim);
    auto accumulate = [&](const Matrix& e) {
        Eigen::Map<const Vector> v(e.data(), dim);
        const double nrm = v.norm();
        if (nrm == 0.0) return;
        const Vector u = v / nrm;
        gram.selfadjointView<Eigen::Lower>().rankUpdate(u);
    };
    for (const Matrix& e : elements) accumulate(e);
    for (const Matrix& a : elements) {
        for (const Matrix& b : elements) {
            const Matrix p = a * b;
            accumulate(p);
        }
    }
    Eigen::SelfAdjointEigenSolver<Matrix> eig(
        gram.selfadjointView<Eigen::Lower>());
    const Vector ev = eig.eigenvalues();
    const double top = ev(ev.size() - 1);
    if (top <= 0.0) return 0;
    int rank = 0;
    for (Eigen::Index i = 0; i < ev.size(); ++i)
        if (ev(i) > tol * top) ++rank;
    return rank;
}

inline int algebra_span_dim(const GroupSample& g, double tol = 1e-9) {
    return algebra_span_dim(std::span<const Matrix>(g.elements), tol);
}

enum class IrreducibilityStatus {
    CertifiedIrreducible,
    ReducibleWitness,
    Unknown,
};

inline const char* to_string(IrreducibilityStatus s) {
    switch (s) {
        case IrreducibilityStatus::CertifiedIrreducible:
            return "CERTIFIED_IRREDUCIBLE";
        case IrreducibilityStatus::ReducibleWitness:
            return "REDUCIBLE_WITNESS";
        default:
            return "UNKNOWN";
    }
}

// Family of proper subspaces W_j with (compound C_{i,j}) W_j = W_i,
// represented by orthonormal bases in the compound coordinates.
struct WitnessFamily {
    int power = 1;
    std::vector<Matrix> bases;  // one D x w basis per symbol, D = C(k, i)
    double residual = 0.0;      // max equivariance defect over symbol pairs
};

struct IrreducibilityVerdict {
    int power = 1;
    IrreducibilityStatus status = IrreducibilityStatus::Unknown;
    std::optional<WitnessFamily> witness;
    int span_dim = 0;
};

namespace detail {

inline Matrix orthonormalize_columns(const Matrix& b) {
    Eigen::HouseholderQR<Matrix> qr(b);
    return Matrix(qr.householderQ()) .leftCols(b.cols());
}

// Relative defect of H mapping the span of basis into itself.
inline double invariance_defect(const Matrix& h, const Matrix& basis) {
    const Matrix hb = h * basis;
    const double scale = hb.norm();
    if (scale == 0.0) return std::numeric_limits<double>::infinity();
    const Matrix res = hb - basis * (basis.transpose() * hb);
    return res.norm() / scale;
}

// Candidate invariant subspaces of a single matrix: real eigendirections and
// the real planes of complex-conjugate eigenvalue pairs.
inline std::vector<Matrix> eigen_candidates(const Matrix& h) {
    std::vector<Matrix> out;
    Eigen::EigenSolver<Matrix> eig(h);
    const auto& vals = eig.eigenvalues();
    const auto& vecs = eig.eigenvectors();
    const double scale = std::max(1.0, h.norm());
    for (Eigen::Index i = 0; i < vals.size(); ++i) {
        if (std::abs(vals(i).imag()) <= 1e-10 * scale) {
            Matrix b(h.rows(), 1);
            b.col(0) = vecs.col(i).real();
            if (b.norm() > 0) out.push_back(orthonormalize_columns(b));
        } else if (vals(i).imag() > 0.0) {
            Matrix b(h.rows(), 2);
            b.col(0) = vecs.col(i).real();
            b.col(1) = vecs.col(i).imag();
            out.push_back(orthonormalize_columns(b));
        }
    }
    return out;
}

}  // namespace detail

inline constexpr double kWitnessTol = 1e-8;

// Verify a transported family against every compound transition: the image
// of W_j under the lifted C_{i,j} must land in W_i. Returns the max relative
// equivariance defect over ordered symbol pairs.
inline double witness_residual(const ReducedCocycle& r, int power,
                               const std::vector<Matrix>& bases) {
    const int m = r.symbols();
    double worst = 0.0;
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            const Matrix h = exterior_power(r.transitions[i][j], power);
            const Matrix hb = h * bases[j];
            const double scale = hb.norm();
            if (scale == 0.0) return std::numeric_limits<double>::infinity();
            const Matrix res = hb - bases[i] * (bases[i].transpose() * hb);
            worst = std::max(worst, res.norm() / scale);
        }
    }
    return worst;
}

// Heuristic search for a reducing family of the power-i compound cocycle:
// harvest invariant-subspace candidates from eigendecompositions of return
// words, keep those invariant under the whole sample, transport to every
// symbol, and re-verify by direct multiplication.
inline std::optional<WitnessFamily> search_reducing_family(
    const ReducedCocycle& r, int power, int budget, std::uint64_t seed) {
    const std::int64_t cd = binomial(r.k, power);
    if (cd * cd > 4096)
        throw std::domain_error("search_reducing_family: compound too large");
    const int dcomp = static_cast<int>(cd);
    if (dcomp == 1) return std::nullopt;  // no proper nonzero subspaces

    const GroupSample sample = return_words(r, 0, 12, budget, seed);
    std::vector<Matrix> lifted;
    lifted.reserve(sample.elements.size());
    for (const Matrix& e : sample.elements)
        lifted.push_back(exterior_power(e, power));

    std::vector<Matrix> candidates;
    const int probe = std::min<int>(8, static_cast<int>(lifted.size()));
    for (int i = 0; i < probe; ++i)
        for (Matrix& b : detail::eigen_candidates(lifted[i]))
            if (b.cols() < dcomp) candidates.push_back(std::move(b));

    for (const Matrix& cand : candidates) {
        bool invariant = true;
        for (const Matrix& h : lifted) {
            if (detail::invariance_defect(h, cand) > kWitnessTol) {
                invariant = false;
                break;
            }
        }
        if (!invariant) continue;
        // transport W_0 to every symbol through C_{j,0}
        std::vector<Matrix> bases(r.symbols());
        bases[0] = cand;
        for (int j = 1; j < r.symbols(); ++j) {
            const Matrix h = exterior_power(r.transitions[j][0], power);
            bases[j] = detail::orthonormalize_columns(h * cand);
        }
        const double res = witness_residual(r, power, bases);
        if (res <= kWitnessTol) {
            WitnessFamily fam;
            fam.power = power;
            fam.bases = std::move(bases);
            fam.residual = res;
            return fam;
        }
    }
    return std::nullopt;
}

// Certify irreducibility of the power-i compound cocycle by the span of the
// lifted return-word algebra: a full matrix-algebra span leaves no invariant
// family, while any reducing family would confine the span to a proper
// subalgebra. Falls back to the witness search, then to UNKNOWN.
inline IrreducibilityVerdict certify_irreducible(const Cocycle& c,
                                                 const ReducedCocycle& r,
                                                 int power, int budget,
                                                 std::uint64_t seed) {
    if (power < 1 || power > r.k)
        throw std::domain_error("certify_irreducible: power out of range");
    if (c.symbols() != r.symbols() || c.dim() != r.dim())
        throw std::domain_error("certify_irreducible: shape mismatch");
    const std::int64_t cd = binomial(r.k, power);
    if (cd * cd > 4096)
        throw std::domain_error("certify_irreducible: compound too large");

    IrreducibilityVerdict verdict;
    verdict.power = power;
    const GroupSample sample = return_words(r, 0, 12, budget, seed);
    std::vector<Matrix> lifted;
    lifted.reserve(sample.elements.size());
    for (const Matrix& e : sample.elements)
        lifted.push_back(exterior_power(e, power));
    verdict.span_dim = algebra_span_dim(std::span<const Matrix>(lifted));
    if (verdict.span_dim == cd * cd) {
        verdict.status = IrreducibilityStatus::CertifiedIrreducible;
        return verdict;
    }
    verdict.witness = search_reducing_family(r, power, budget, seed);
    verdict.status = verdict.witness
                         ? IrreducibilityStatus::ReducibleWitness
                         : IrreducibilityStatus::Unknown;
    return verdict;
}

}  // namespace cocyclab
