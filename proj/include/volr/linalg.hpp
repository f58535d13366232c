#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <limits>

#include "volr/errors.hpp"
#include "volr/rng.hpp"

namespace volr {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct LogDet {
    double log_abs;  // log|det|, -inf when singular
    int sign;        // -1, 0, +1
};

/// log|det M| and sign via fully pivoted LU. Sign 0 means singular to
/// machine tolerance (relative to the largest pivot).
inline LogDet log_abs_det(const Matrix& m) {
    if (m.rows() != m.cols()) throw DimensionMismatch("log_abs_det: matrix not square");
    const auto n = m.rows();
    if (n == 0) return {0.0, 1};
    Eigen::FullPivLU<Matrix> lu(m);
    const Matrix& u = lu.matrixLU();
    double max_pivot = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) max_pivot = std::max(max_pivot, std::abs(u(i, i)));
    const double tol = max_pivot * 1e-13 * static_cast<double>(n);
    double log_abs = 0.0;
    int sign = lu.permutationP().determinant() * lu.permutationQ().determinant();
    for (Eigen::Index i = 0; i < n; ++i) {
        const double piv = u(i, i);
        if (std::abs(piv) <= tol || piv == 0.0)
            return {-std::numeric_limits<double>::infinity(), 0};
        log_abs += std::log(std::abs(piv));
        if (piv < 0) sign = -sign;
    }
    return {log_abs, sign};
}

/// Singular values in descending order (Jacobi SVD: accuracy over speed).
inline Vector singular_values(const Matrix& m) {
    if (m.rows() != m.cols()) throw DimensionMismatch("singular_values: matrix not square");
    Eigen::JacobiSVD<Matrix> svd(m);
    return svd.singularValues();
}

/// Allocation-light singular values for the tiny sides the gauge hot paths
/// use: closed form at d = 2, fixed-size symmetric eigensolve at d = 3.
inline Vector singular_values_small(const Matrix& m) {
    const auto d = m.rows();
    if (d == 1) {
        Vector s(1);
        s(0) = std::abs(m(0, 0));
        return s;
    }
    if (d == 2) {
        const double a = m(0, 0), b = m(0, 1), c = m(1, 0), e = m(1, 1);
        const double t1 = a * a + b * b + c * c + e * e;
        const double t2 = std::hypot(a * a + b * b - c * c - e * e, 2.0 * (a * c + b * e));
        Vector s(2);
        s(0) = std::sqrt(0.5 * (t1 + t2));
        s(1) = std::sqrt(std::max(0.0, 0.5 * (t1 - t2)));
        return s;
    }
    if (d == 3) {
        Eigen::Matrix3d mtm = (m.transpose() * m).eval();
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(mtm);
        Vector s(3);
        for (int i = 0; i < 3; ++i) s(i) = std::sqrt(std::max(0.0, es.eigenvalues()(2 - i)));
        return s;
    }
    return singular_values(m);
}

/// Symmetric positive definite inverse square root: returns S with S*C*S = I.
inline Matrix inv_sqrt_psd(const Matrix& c) {
    if (c.rows() != c.cols()) throw DimensionMismatch("inv_sqrt_psd: matrix not square");
    Eigen::SelfAdjointEigenSolver<Matrix> es(c);
    if (es.info() != Eigen::Success) throw NotPositiveDefinite("inv_sqrt_psd: eigensolver failed");
    const Vector& ev = es.eigenvalues();
    const double tol = 1e-12 * std::max(ev.maxCoeff(), 0.0);
    Vector inv_sqrt(ev.size());
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (ev(i) <= tol)
            throw NotPositiveDefinite("inv_sqrt_psd: eigenvalue below tolerance");
        inv_sqrt(i) = 1.0 / std::sqrt(ev(i));
    }
    return es.eigenvectors() * inv_sqrt.asDiagonal() * es.eigenvectors().transpose();
}

inline Matrix sample_gaussian_matrix(int n, RngStream& rng) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = rng.next_gaussian();
    return m;
}

inline Vector sample_gaussian_vector(int n, RngStream& rng) {
    Vector v(n);
    for (int i = 0; i < n; ++i) v(i) = rng.next_gaussian();
    return v;
}

/// Uniform point on the Euclidean unit sphere (normalized Gaussian).
inline Vector sample_sphere(int n, RngStream& rng) {
    while (true) {
        Vector v = sample_gaussian_vector(n, rng);
        double norm = v.norm();
        if (norm > 1e-12) return v / norm;
    }
}

/// Haar-ish random rotation: QR of a Gaussian matrix with the R-diagonal
/// sign fix, determinant forced to +1.
inline Matrix random_rotation(int n, RngStream& rng) {
    Matrix g = sample_gaussian_matrix(n, rng);
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ();
    Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int i = 0; i < n; ++i)
        if (r(i, i) < 0) q.col(i) = -q.col(i);
    if (q.determinant() < 0) q.col(0) = -q.col(0);
    return q;
}

/// Row-major reshape between R^{d*d} vectors and d x d matrices.
inline Matrix unvec_rowmajor(const Vector& x, int d) {
    if (x.size() != static_cast<Eigen::Index>(d) * d)
        throw DimensionMismatch("unvec_rowmajor: size is not d*d");
    Matrix m(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) m(i, j) = x(i * d + j);
    return m;
}

inline Vector vec_rowmajor(const Matrix& m) {
    const int d = static_cast<int>(m.rows());
    if (m.cols() != d) throw DimensionMismatch("vec_rowmajor: matrix not square");
    Vector x(d * d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) x(i * d + j) = m(i, j);
    return x;
}

}  // namespace volr
