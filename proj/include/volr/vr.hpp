#pragma once

#include <cmath>
#include <vector>

#include "volr/operators.hpp"
#include "volr/volume.hpp"

namespace volr {

struct VrOptions {
    int restarts = 5;
    int max_iter = 2000;
    double tol = 1e-6;
    VolumeOptions volume = {};
};

struct VrSolveResult {
    Matrix t_best;
    double log_det_best = 0.0;
    double vr_upper = 0.0;       // (|K| / |T(L)|)^{1/n} for the best feasible T
    double vr_std_error = 0.0;   // propagated from the volume estimates
    int iterations = 0;
    int restarts_used = 0;
    bool converged = false;
    double cert_max_gauge = 0.0;  // max_j gauge_K(T v_j); certificate of T(L) in K
};

namespace detail {

inline double feasibility_scale(const Matrix& t, const Matrix& gens, const Body& k) {
    double worst = 0.0;
    for (Eigen::Index j = 0; j < gens.cols(); ++j)
        worst = std::max(worst, k.gauge(t * gens.col(j)));
    return worst;
}

struct AscentOutcome {
    Matrix t;
    double log_det;
    int iterations;
    bool converged;
};

// One backtracking step along a direction, measured on the post-rescale
// objective. Returns the gain (0 if no improvement was found).
inline double try_direction(Matrix& t, double& log_det, const Matrix& dir, const Matrix& gens,
                            const Body& k, double eta0 = 0.5, int backtracks = 14) {
    double eta = eta0;
    for (int bt = 0; bt < backtracks; ++bt, eta *= 0.5) {
        Matrix cand = t + eta * dir;
        const double s = feasibility_scale(cand, gens, k);
        if (!(s > 0.0) || !std::isfinite(s)) continue;
        cand /= s;
        const double ld = log_abs_det(cand).log_abs;
        if (ld > log_det) {
            const double gain = ld - log_det;
            t = std::move(cand);
            log_det = ld;
            return gain;
        }
    }
    return 0.0;
}

// The determinant is linear in each entry, so single-entry line searches
// slide along constraint faces where the gradient direction stalls; the
// paired rotation/shear directions move along edges that need two entries
// to change together.
inline double coordinate_sweep(Matrix& t, double& log_det, const Matrix& gens, const Body& k) {
    const int n = static_cast<int>(t.rows());
    const double scale = t.cwiseAbs().maxCoeff();
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            for (double sign : {1.0, -1.0}) {
                Matrix dir = Matrix::Zero(n, n);
                dir(i, j) = sign * scale;
                total += try_direction(t, log_det, dir, gens, k, 0.5, 10);
            }
        }
    }
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            for (double a : {1.0, -1.0}) {
                for (double b : {1.0, -1.0}) {
                    Matrix dir = Matrix::Zero(n, n);
                    dir(i, j) = a * scale;
                    dir(j, i) = b * scale;
                    total += try_direction(t, log_det, dir, gens, k, 0.5, 10);
                }
            }
        }
    }
    return total;
}

// Feasible ascent on log|det T| under gauge_K(T v_j) <= 1: gradient steps
// along T^{-T} with backtracking and feasibility rescaling, falling back
// to coordinate line searches when the gradient direction stalls.
inline AscentOutcome maxdet_ascent(Matrix t, const Matrix& gens, const Body& k, int max_iter,
                                   double tol) {
    const double s0 = feasibility_scale(t, gens, k);
    if (s0 > 1.0) t /= s0;
    double log_det = log_abs_det(t).log_abs;
    int stall = 0;
    int it = 0;
    for (; it < max_iter; ++it) {
        // Scale the step relative to T so the ascent commutes with
        // rescalings of K (and stays conditioned across body scales).
        Matrix grad = t.inverse().transpose();
        grad *= t.norm() / grad.norm();
        double gain = try_direction(t, log_det, grad, gens, k);
        if (gain == 0.0) gain = coordinate_sweep(t, log_det, gens, k);
        if (gain == 0.0) {
            ++it;
            break;  // deterministic plateau: nothing further can move
        }
        if (gain < tol) {
            if (++stall >= 50) {
                ++it;
                break;
            }
        } else {
            stall = 0;
        }
    }
    return {std::move(t), log_det, it, it < max_iter};
}

}  // namespace detail

/// Maximizes log|det T| over {T : T(L) in K} for a V-polytope L; any
/// feasible T witnesses the upper bound (|K|/|T(L)|)^{1/n} on vr(K, L).
/// Multi-start local ascent; pair with vr_grid_oracle at small n.
inline VrSolveResult maxdet_inclusion(const Body& k, const Body& l, const VrOptions& opts,
                                      RngStream& rng, const VolumeEstimate* vol_k = nullptr,
                                      const VolumeEstimate* vol_l = nullptr) {
    if (!l.is_vpolytope()) throw std::invalid_argument("maxdet_inclusion: L must be a V-polytope");
    const int n = k.dim();
    require_dim(n, l.dim(), "maxdet_inclusion");
    const Matrix& gens = l.generators();

    const double s_id = detail::feasibility_scale(Matrix::Identity(n, n), gens, k);
    const Matrix t0 = Matrix::Identity(n, n) / s_id;

    VrSolveResult res;
    res.log_det_best = -std::numeric_limits<double>::infinity();
    for (int r = 0; r <= opts.restarts; ++r) {
        Matrix start = t0;
        if (r > 0) {
            RngStream s = rng.substream(static_cast<std::uint64_t>(r));
            start = t0 * random_rotation(n, s);
            if (r % 2 == 0) {
                // Anisotropic restart: det-one random diagonal stretch.
                Vector d(n);
                double sum = 0.0;
                for (int i = 0; i < n; ++i) {
                    d(i) = 2.0 * s.next_double() - 1.0;
                    sum += d(i);
                }
                for (int i = 0; i < n; ++i) d(i) = std::exp(std::log(4.0) * (d(i) - sum / n));
                start = start * d.asDiagonal() * random_rotation(n, s);
            }
        }
        detail::AscentOutcome out =
            detail::maxdet_ascent(std::move(start), gens, k, opts.max_iter, opts.tol);
        res.iterations += out.iterations;
        res.restarts_used = r;
        if (out.log_det > res.log_det_best) {
            res.log_det_best = out.log_det;
            res.t_best = std::move(out.t);
            res.converged = out.converged;
        }
    }
    // Exact certificate at the generators.
    const double cert = detail::feasibility_scale(res.t_best, gens, k);
    if (cert > 1.0) {
        res.t_best /= cert;
        res.log_det_best = log_abs_det(res.t_best).log_abs;
    }
    res.cert_max_gauge = detail::feasibility_scale(res.t_best, gens, k);

    VolumeEstimate vk, vl;
    if (vol_k) {
        vk = *vol_k;
    } else {
        RngStream s = rng.substream(301);
        vk = log_volume_auto(k, s, opts.volume);
    }
    if (vol_l) {
        vl = *vol_l;
    } else {
        RngStream s = rng.substream(302);
        vl = log_volume_auto(l, s, opts.volume);
    }
    res.vr_upper = std::exp((vk.log_volume - vl.log_volume - res.log_det_best) / n);
    res.vr_std_error =
        res.vr_upper *
        std::sqrt(vk.std_error * vk.std_error + vl.std_error * vl.std_error) / n;
    return res;
}

/// Coarse global search over T = R1 D R2 (rotations x positive diagonal,
/// det one) with feasibility rescaling and local polish; the small-n
/// anti-local-minimum oracle for maxdet_inclusion.
inline double vr_grid_oracle(const Body& k, const Body& l, RngStream& rng,
                             const VolumeEstimate* vol_k = nullptr,
                             const VolumeEstimate* vol_l = nullptr, VolumeOptions vopts = {}) {
    const int n = k.dim();
    require_dim(n, l.dim(), "vr_grid_oracle");
    if (n > 3) throw DimensionTooLarge("vr_grid_oracle: n must be <= 3");
    if (!l.is_vpolytope()) throw std::invalid_argument("vr_grid_oracle: L must be a V-polytope");
    const Matrix& gens = l.generators();

    VolumeEstimate vk, vl;
    {
        RngStream s1 = rng.substream(201), s2 = rng.substream(202);
        vk = vol_k ? *vol_k : log_volume_auto(k, s1, vopts);
        vl = vol_l ? *vol_l : log_volume_auto(l, s2, vopts);
    }

    std::vector<Matrix> candidates;
    candidates.push_back(Matrix::Identity(n, n));  // the log-spaced grid skips s = 1
    if (n == 1) {
        // identity is the whole det-one family
    } else if (n == 2) {
        auto rot = [](double a) {
            Matrix r(2, 2);
            r << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
            return r;
        };
        for (int i = 0; i < 24; ++i)
            for (int j = 0; j < 24; ++j)
                for (int q = 0; q < 16; ++q) {
                    const double s = std::pow(8.0, -1.0 + 2.0 * q / 15.0);
                    Matrix d = Matrix::Zero(2, 2);
                    d(0, 0) = s;
                    d(1, 1) = 1.0 / s;
                    candidates.push_back(rot(M_PI * i / 24.0) * d * rot(M_PI * j / 24.0));
                }
    } else {
        RngStream s = rng.substream(0x03ac1e);
        std::vector<std::pair<Matrix, Matrix>> rot_pairs;
        rot_pairs.emplace_back(Matrix::Identity(3, 3), Matrix::Identity(3, 3));
        for (int i = 1; i < 48; ++i)
            rot_pairs.emplace_back(random_rotation(3, s), random_rotation(3, s));
        for (const auto& [r1, r2] : rot_pairs)
            for (int a = 0; a < 12; ++a)
                for (int b = 0; b < 12; ++b) {
                    const double s1 = std::pow(8.0, -1.0 + 2.0 * a / 11.0);
                    const double s2 = std::pow(8.0, -1.0 + 2.0 * b / 11.0);
                    Vector d(3);
                    d << s1, s2, 1.0 / (s1 * s2);
                    candidates.push_back(r1 * d.asDiagonal() * r2);
                }
    }

    // Each candidate has det 1; after rescaling by the feasibility factor s
    // the achieved ratio is exp((log|K| - log|L|)/n) * s. Keep the best few.
    std::vector<std::pair<double, Matrix>> scored;
    scored.reserve(candidates.size());
    for (Matrix& c : candidates) {
        const double s = detail::feasibility_scale(c, gens, k);
        if (s > 0.0 && std::isfinite(s)) scored.emplace_back(s, std::move(c));
    }
    std::sort(scored.begin(), scored.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    double best_log_det = -std::numeric_limits<double>::infinity();
    const std::size_t polish = std::min<std::size_t>(10, scored.size());
    for (std::size_t i = 0; i < polish; ++i) {
        Matrix start = scored[i].second / scored[i].first;
        detail::AscentOutcome out = detail::maxdet_ascent(std::move(start), gens, k, 800, 1e-7);
        best_log_det = std::max(best_log_det, out.log_det);
    }
    return std::exp((vk.log_volume - vl.log_volume - best_log_det) / n);
}

/// V-polytope stand-in for a body: exact for the l1 ball and for the linf
/// ball up to n = 12 (corners); otherwise 16n sampled boundary generators
/// (inner approximation, flagged).
inline Body polytopize(const Body& l, RngStream& rng, bool* approximated = nullptr) {
    const int n = l.dim();
    if (approximated) *approximated = false;
    if (l.is_vpolytope()) return l;
    if (l.kind() == BodyKind::LpBall && l.lp_exponent() == 1.0)
        return Body::vpolytope(Matrix::Identity(n, n));
    if (l.kind() == BodyKind::LpBall && std::isinf(l.lp_exponent()) && n <= 12) {
        const Eigen::Index count = Eigen::Index(1) << (n - 1);
        Matrix corners(n, count);
        for (Eigen::Index bits = 0; bits < count; ++bits) {
            corners(0, bits) = 1.0;
            for (int i = 1; i < n; ++i)
                corners(i, bits) = (bits >> (i - 1)) & 1 ? 1.0 : -1.0;
        }
        return Body::vpolytope(std::move(corners));
    }
    if (approximated) *approximated = true;
    const int m = 16 * n;
    Matrix gens(n, m);
    for (int j = 0; j < m; ++j) {
        Vector u = sample_sphere(n, rng);
        gens.col(j) = u / l.gauge(u);
    }
    return Body::vpolytope(std::move(gens));
}

struct VrEstimate {
    double value = 0.0;
    double std_error = 0.0;
    bool l_approximated = false;
    VrSolveResult solve;
};

/// vr(K, L) upper estimate: polytopize L, then run the max-det program.
inline VrEstimate vr_estimate(const Body& k, const Body& l, const VrOptions& opts,
                              RngStream& rng) {
    require_dim(k.dim(), l.dim(), "vr_estimate");
    bool approx = false;
    RngStream s_poly = rng.substream(11);
    const Body l_poly = polytopize(l, s_poly, &approx);

    RngStream s_vk = rng.substream(12), s_vl = rng.substream(13);
    const VolumeEstimate vk = log_volume_auto(k, s_vk, opts.volume);
    const VolumeEstimate vl = log_volume_auto(l_poly, s_vl, opts.volume);

    RngStream s_solve = rng.substream(14);
    VrEstimate est;
    est.solve = maxdet_inclusion(k, l_poly, opts, s_solve, &vk, &vl);
    est.value = est.solve.vr_upper;
    est.std_error = est.solve.vr_std_error;
    est.l_approximated = approx;
    return est;
}

}  // namespace volr
