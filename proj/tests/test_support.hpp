#pragma once

// Shared helpers for the test suites: independent oracles (cyclic Jacobi
// eigensolver, brute-force minors, naive products) and deterministic random
// fixtures. Everything here must stay independent of the implementation
// paths it is used to check.

#include <cmath>
#include <cstdint>
#include <vector>

#include "cocyclab/cocycle.hpp"
#include "cocyclab/linalg.hpp"
#include "cocyclab/rng.hpp"

namespace testsupport {

using cocyclab::Cocycle;
using cocyclab::CounterRng;
using cocyclab::Matrix;
using cocyclab::Vector;

inline Matrix random_matrix(int rows, int cols, CounterRng& rng,
                            double scale = 1.0) {
    Matrix m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = scale * rng.normal();
    return m;
}

// Eigenvalues of a symmetric matrix by cyclic Jacobi sweeps; descending.
inline std::vector<double> jacobi_symmetric_eigenvalues(Matrix s) {
    const int n = static_cast<int>(s.rows());
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += s(p, q) * s(p, q);
        if (off < 1e-30) break;
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                if (std::abs(s(p, q)) < 1e-300) continue;
                const double theta = (s(q, q) - s(p, p)) / (2.0 * s(p, q));
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) +
                                  std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double sn = t * c;
                for (int i = 0; i < n; ++i) {
                    const double sip = s(i, p), siq = s(i, q);
                    s(i, p) = c * sip - sn * siq;
                    s(i, q) = sn * sip + c * siq;
                }
                for (int i = 0; i < n; ++i) {
                    const double spi = s(p, i), sqi = s(q, i);
                    s(p, i) = c * spi - sn * sqi;
                    s(q, i) = sn * spi + c * sqi;
                }
            }
        }
    }
    std::vector<double> ev(n);
    for (int i = 0; i < n; ++i) ev[i] = s(i, i);
    std::sort(ev.begin(), ev.end(), std::greater<>());
    return ev;
}

// All k x k minors of a, rows I columns J in lexicographic order, each
// expanded by explicit Laplace recursion. Independent of exterior_power.
inline double laplace_det(const Matrix& m) {
    const int n = static_cast<int>(m.rows());
    if (n == 1) return m(0, 0);
    double det = 0.0;
    for (int j = 0; j < n; ++j) {
        Matrix sub(n - 1, n - 1);
        for (int r = 1; r < n; ++r) {
            int cc = 0;
            for (int c = 0; c < n; ++c) {
                if (c == j) continue;
                sub(r - 1, cc++) = m(r, c);
            }
        }
        det += ((j % 2 == 0) ? 1.0 : -1.0) * m(0, j) * laplace_det(sub);
    }
    return det;
}

// Random cocycle with constant rank k in dimension d: truncated SVD shapes
// with singular values in [0.5, 2].
inline Cocycle random_constant_rank(int d, int k, int m, std::uint64_t seed) {
    CounterRng rng(seed, 0x434F4359ULL);
    Cocycle c;
    c.probs.assign(m, 1.0 / m);
    for (int i = 0; i < m; ++i) {
        const Matrix g1 = random_matrix(d, d, rng);
        const Matrix g2 = random_matrix(d, d, rng);
        const Matrix u = Eigen::HouseholderQR<Matrix>(g1).householderQ();
        const Matrix v = Eigen::HouseholderQR<Matrix>(g2).householderQ();
        Vector s = Vector::Zero(d);
        for (int j = 0; j < k; ++j) s(j) = 0.5 + 1.5 * rng.uniform01();
        c.matrices.push_back(u * s.asDiagonal() * v.transpose());
    }
    return c;
}

// Rank-one family u_i v_i^t with all pairings bounded away from zero.
inline Cocycle random_rank_one(int d, int m, std::uint64_t seed) {
    for (std::uint64_t attempt = 0;; ++attempt) {
        CounterRng rng(seed + attempt, 0x52414E4BULL);
        Cocycle c;
        c.probs.assign(m, 1.0 / m);
        std::vector<Vector> us, vs;
        for (int i = 0; i < m; ++i) {
            Vector u(d), v(d);
            for (int j = 0; j < d; ++j) {
                u(j) = rng.normal();
                v(j) = rng.normal();
            }
            us.push_back(u);
            vs.push_back(v);
            c.matrices.push_back(u * v.transpose());
        }
        bool ok = true;
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                if (std::abs(vs[i].dot(us[j])) < 0.1) ok = false;
        if (ok) return c;
    }
}

}  // namespace testsupport
