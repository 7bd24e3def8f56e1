#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "cocyclab/numeric.hpp"

namespace cocyclab {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Singular values, descending.
inline Vector singular_values(const Matrix& a) {
    Eigen::JacobiSVD<Matrix> svd(a);
    return svd.singularValues();
}

// Operator 2-norm = largest singular value.
inline double operator_norm(const Matrix& a) {
    if (a.size() == 0) return 0.0;
    return singular_values(a)(0);
}

// Count of singular values above tol * s1. The zero matrix has rank 0 for
// any tolerance.
inline int numeric_rank(const Matrix& a, double tol = kDefaultRankTol) {
    if (tol <= 0.0) throw std::domain_error("numeric_rank: tol must be positive");
    const Vector s = singular_values(a);
    if (s.size() == 0 || s(0) == 0.0) return 0;
    const double cut = tol * s(0);
    int r = 0;
    while (r < s.size() && s(r) > cut) ++r;
    return r;
}

namespace detail {

// Flip column signs so the entry of largest absolute value is positive,
// first occurrence winning ties. Makes SVD-derived bases deterministic.
inline void fix_column_signs(Matrix& m) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        Eigen::Index imax = 0;
        double best = -1.0;
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            const double v = std::abs(m(i, j));
            if (v > best) {
                best = v;
                imax = i;
            }
        }
        if (m(imax, j) < 0.0) m.col(j) = -m.col(j);
    }
}

}  // namespace detail

// Orthonormal basis of the column span: the top-k left singular vectors,
// sign-normalized. Requires numeric rank exactly k.
inline Matrix orthonormal_range_basis(const Matrix& a, int k,
                                      double tol = kDefaultRankTol) {
    const int r = numeric_rank(a, tol);
    if (r != k)
        throw std::invalid_argument(
            "orthonormal_range_basis: numeric rank is " + std::to_string(r) +
            ", expected " + std::to_string(k));
    Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU);
    Matrix m = svd.matrixU().leftCols(k);
    detail::fix_column_signs(m);
    return m;
}

// All k-element subsets of {0, ..., d-1} in lexicographic order.
inline std::vector<std::vector<int>> index_subsets(int d, int k) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur(k);
    for (int i = 0; i < k; ++i) cur[i] = i;
    while (true) {
        out.push_back(cur);
        int i = k - 1;
        while (i >= 0 && cur[i] == d - k + i) --i;
        if (i < 0) break;
        ++cur[i];
        for (int j = i + 1; j < k; ++j) cur[j] = cur[j - 1] + 1;
    }
    return out;
}

inline Matrix submatrix(const Matrix& a, const std::vector<int>& rows,
                        const std::vector<int>& cols) {
    Matrix s(rows.size(), cols.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j)
            s(i, j) = a(rows[i], cols[j]);
    return s;
}

inline constexpr int kMaxCompoundDim = 256;

// k-th compound matrix: entry (I, J) is the minor of A with rows I and
// columns J, index sets enumerated lexicographically.
inline Matrix exterior_power(const Matrix& a, int k) {
    if (a.rows() != a.cols())
        throw std::domain_error("exterior_power: matrix must be square");
    const int d = static_cast<int>(a.rows());
    if (k < 1 || k > d)
        throw std::domain_error("exterior_power: k must be in [1, d]");
    if (k == 1) return a;
    const std::int64_t dim = binomial(d, k);
    if (dim > kMaxCompoundDim)
        throw std::domain_error("exterior_power: compound dimension " +
                                std::to_string(dim) + " exceeds " +
                                std::to_string(kMaxCompoundDim));
    const auto subsets = index_subsets(d, k);
    Matrix out(dim, dim);
    for (std::size_t i = 0; i < subsets.size(); ++i)
        for (std::size_t j = 0; j < subsets.size(); ++j)
            out(i, j) = submatrix(a, subsets[i], subsets[j]).determinant();
    return out;
}

// Product of the top k singular values; equals the operator norm of the
// k-th compound matrix.
inline double compound_norm(const Matrix& a, int k) {
    const Vector s = singular_values(a);
    if (k < 1 || k > s.size())
        throw std::domain_error("compound_norm: k out of range");
    double p = 1.0;
    for (int i = 0; i < k; ++i) p *= s(i);
    return p;
}

}  // namespace cocyclab
