// Hankel lifting and its inverses: length-n vectors <-> d x (n-d+1) matrices
// that are constant along anti-diagonals.
#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <string>

#include "hankeldoa/errors.hpp"

namespace hankeldoa {

/// Square-as-possible pencil: (n+1)/2 rows for odd n, n/2 for even n.
inline int default_pencil(int n) {
    if (n < 3) {
        throw ValidationError("default_pencil: n must be >= 3, got " + std::to_string(n));
    }
    return (n % 2 == 1) ? (n + 1) / 2 : n / 2;
}

/// Pencil geometry tying length-n vectors to d x (n-d+1) Hankel matrices.
struct HankelShape {
    int n;  ///< vector length
    int d;  ///< row count (pencil parameter)

    HankelShape(int n_, int d_) : n(n_), d(d_) {
        if (n < 3) {
            throw ValidationError("HankelShape: n must be >= 3, got " + std::to_string(n));
        }
        if (d < 2 || d > n - 1) {
            throw ValidationError("HankelShape: need 2 <= d <= n-1, got d=" + std::to_string(d) +
                                  " for n=" + std::to_string(n));
        }
    }

    static HankelShape square(int n) { return HankelShape(n, default_pencil(n)); }

    int cols() const { return n - d + 1; }

    /// Largest representable rank, min(d, cols).
    int rank_budget() const { return std::min(d, cols()); }

    friend bool operator==(const HankelShape&, const HankelShape&) = default;
};

/// c_k = number of matrix positions on anti-diagonal k (1-based k).
/// The counts satisfy sum_k c_k = d * cols.
inline Eigen::VectorXi anti_diagonal_counts(const HankelShape& shape) {
    Eigen::VectorXi counts(shape.n);
    const int cols = shape.cols();
    for (int k = 1; k <= shape.n; ++k) {
        counts(k - 1) = std::min({k, shape.d, cols, shape.n - k + 1});
    }
    return counts;
}

/// Lift a vector to its Hankel matrix: M(i,j) = x(i+j-1) in 1-based terms,
/// so element k of x fills anti-diagonal k.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> hankelize(
    const Eigen::MatrixBase<Derived>& x, const HankelShape& shape) {
    if (x.size() != shape.n) {
        throw DimensionError("hankelize: vector length " + std::to_string(x.size()) +
                             " does not match shape n=" + std::to_string(shape.n));
    }
    Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> m(shape.d, shape.cols());
    for (int j = 0; j < shape.cols(); ++j) {
        for (int i = 0; i < shape.d; ++i) {
            m(i, j) = x(i + j);
        }
    }
    return m;
}

namespace detail {

inline void check_matrix_shape(Eigen::Index rows, Eigen::Index cols, const HankelShape& shape,
                               const char* op) {
    if (rows != shape.d || cols != shape.cols()) {
        throw DimensionError(std::string(op) + ": matrix is " + std::to_string(rows) + "x" +
                             std::to_string(cols) + ", expected " + std::to_string(shape.d) + "x" +
                             std::to_string(shape.cols()));
    }
}

}  // namespace detail

/// Adjoint of hankelize under the Frobenius / l2 inner products:
/// v(k) = sum of M over anti-diagonal k.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> hankel_adjoint(
    const Eigen::MatrixBase<Derived>& m, const HankelShape& shape) {
    detail::check_matrix_shape(m.rows(), m.cols(), shape, "hankel_adjoint");
    Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> v =
        Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1>::Zero(shape.n);
    for (int j = 0; j < shape.cols(); ++j) {
        for (int i = 0; i < shape.d; ++i) {
            v(i + j) += m(i, j);
        }
    }
    return v;
}

/// Anti-diagonal averaging; the exact left inverse of hankelize and the
/// pseudo-inverse of the lifting.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> dehankelize(
    const Eigen::MatrixBase<Derived>& m, const HankelShape& shape) {
    detail::check_matrix_shape(m.rows(), m.cols(), shape, "dehankelize");
    auto v = hankel_adjoint(m, shape);
    const Eigen::VectorXi counts = anti_diagonal_counts(shape);
    for (int k = 0; k < shape.n; ++k) {
        v(k) /= typename Derived::Scalar(counts(k));
    }
    return v;
}

}  // namespace hankeldoa
