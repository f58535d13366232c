#pragma once

#include <cmath>

#include "volr/bodies.hpp"
#include "volr/volume.hpp"

namespace volr {

/// Square matrix with cached log|det| and sign.
struct LinearMap {
    Matrix mat;
    double log_abs_det = 0.0;
    int det_sign = 0;

    explicit LinearMap(Matrix m) : mat(std::move(m)) {
        LogDet ld = volr::log_abs_det(mat);
        log_abs_det = ld.log_abs;
        det_sign = ld.sign;
    }
};

/// T / |det T|^{1/n}, so the result has |det| = 1.
inline LinearMap sl_normalize(const LinearMap& t) {
    if (t.det_sign == 0) throw SingularMap("sl_normalize: determinant is zero");
    const double n = static_cast<double>(t.mat.rows());
    return LinearMap(t.mat * std::exp(-t.log_abs_det / n));
}

struct OpNorm {
    double value = 0.0;
    bool exact = false;
};

namespace detail {

inline double polish_norm_direction(const Matrix& t, const Body& l, const Body& k, Vector theta,
                                    double value) {
    // Maximize gauge_K(T x) / gauge_L(x) over directions by pattern search.
    const int n = static_cast<int>(theta.size());
    double step = 0.25;
    while (step > 1e-6) {
        bool improved = false;
        for (int i = 0; i < n; ++i) {
            for (double s : {step, -step}) {
                Vector cand = theta;
                cand(i) += s;
                cand.normalize();
                const double gl = l.gauge(cand);
                if (gl <= 0.0) continue;
                const double v = k.gauge(t * cand) / gl;
                if (v > value * (1.0 + 1e-13)) {
                    value = v;
                    theta = cand;
                    improved = true;
                }
            }
        }
        if (!improved) step *= 0.5;
    }
    return value;
}

}  // namespace detail

/// ||T : X_L -> X_K|| = max_{x in L} gauge_K(T x). Exact when L is a
/// V-polytope, l1 ball, or linf ball in dimension <= 12; otherwise a
/// certified lower estimate from random boundary starts plus polish.
inline OpNorm operator_norm(const Matrix& t, const Body& l, const Body& k,
                            RngStream* rng = nullptr) {
    const int n = l.dim();
    require_dim(n, k.dim(), "operator_norm");
    require_dim(n, static_cast<int>(t.rows()), "operator_norm");
    require_dim(n, static_cast<int>(t.cols()), "operator_norm");

    if (l.is_vpolytope()) {
        const Matrix& g = l.generators();
        double best = 0.0;
        for (Eigen::Index j = 0; j < g.cols(); ++j)
            best = std::max(best, k.gauge(t * g.col(j)));
        return {best, true};
    }
    if (l.kind() == BodyKind::LpBall && l.lp_exponent() == 1.0) {
        double best = 0.0;
        for (int j = 0; j < n; ++j) best = std::max(best, k.gauge(t.col(j)));
        return {best, true};
    }
    if (l.kind() == BodyKind::LpBall && std::isinf(l.lp_exponent()) && n <= 12) {
        // Corners with the first coordinate pinned to +1 (central symmetry).
        double best = 0.0;
        Vector corner(n);
        const std::uint64_t count = 1ULL << (n - 1);
        for (std::uint64_t bits = 0; bits < count; ++bits) {
            corner(0) = 1.0;
            for (int i = 1; i < n; ++i) corner(i) = (bits >> (i - 1)) & 1 ? 1.0 : -1.0;
            best = std::max(best, k.gauge(t * corner));
        }
        return {best, true};
    }

    RngStream local(0xbead5c0ffeULL, static_cast<std::uint64_t>(n));
    RngStream& r = rng ? *rng : local;
    double best = 0.0;
    Vector best_theta = Vector::Unit(n, 0);
    for (int s = 0; s < 32; ++s) {
        Vector theta = sample_sphere(n, r);
        const double v = k.gauge(t * theta) / l.gauge(theta);
        if (v > best) {
            best = v;
            best_theta = theta;
        }
    }
    best = detail::polish_norm_direction(t, l, k, best_theta, best);
    return {best, false};
}

/// Gaussian mean of the gauge: ell(K) = E gauge_K(g).
inline Estimate ell_norm(const Body& k, long n_samples, RngStream& rng) {
    double sum = 0.0, sum2 = 0.0;
    for (long i = 0; i < n_samples; ++i) {
        const double g = k.gauge(sample_gaussian_vector(k.dim(), rng));
        sum += g;
        sum2 += g * g;
    }
    const double mean = sum / static_cast<double>(n_samples);
    const double var = std::max(0.0, sum2 / static_cast<double>(n_samples) - mean * mean);
    return {mean, std::sqrt(var / static_cast<double>(n_samples))};
}

/// Mean width w(K) = 2 E h_K(theta) over uniform sphere directions.
inline Estimate mean_width(const Body& k, long n_samples, RngStream& rng) {
    double sum = 0.0, sum2 = 0.0;
    for (long i = 0; i < n_samples; ++i) {
        const double h = k.support(sample_sphere(k.dim(), rng));
        sum += h;
        sum2 += h * h;
    }
    const double mean = sum / static_cast<double>(n_samples);
    const double var = std::max(0.0, sum2 / static_cast<double>(n_samples) - mean * mean);
    return {2.0 * mean, 2.0 * std::sqrt(var / static_cast<double>(n_samples))};
}

}  // namespace volr
