#pragma once

#include <cmath>
#include <optional>

#include "volr/sampling.hpp"

namespace volr {

struct VolumeEstimate {
    double log_volume = 0.0;
    double std_error = 0.0;  // of the log-volume
    enum class Method { Analytic, Rejection, Annealed } method = Method::Analytic;
    long n_samples = 0;
};

struct Estimate {
    double value = 0.0;
    double std_error = 0.0;
};

/// log |B_2^n|.
inline double log_unit_ball_volume(int n) {
    return 0.5 * n * std::log(M_PI) - std::lgamma(0.5 * n + 1.0);
}

/// log |B_p^n| = n log(2 Gamma(1+1/p)) - log Gamma(1+n/p).
inline double log_lp_ball_volume(double p, int n) {
    if (std::isinf(p)) return n * std::log(2.0);
    return n * std::log(2.0 * std::tgamma(1.0 + 1.0 / p)) - std::lgamma(1.0 + n / p);
}

namespace detail {

// absconv of n independent columns is a linear cross-polytope with
// volume 2^n |det| / n!; a 2n-generator set that splits into +- pairs
// reduces to that case.
inline std::optional<double> vpolytope_log_volume(const Matrix& gens) {
    const int n = static_cast<int>(gens.rows());
    const int m = static_cast<int>(gens.cols());
    Matrix core;
    if (m == n) {
        core = gens;
    } else if (m == 2 * n) {
        std::vector<bool> used(m, false);
        std::vector<int> reps;
        for (int j = 0; j < m; ++j) {
            if (used[j]) continue;
            int mate = -1;
            for (int k = j + 1; k < m; ++k) {
                if (used[k]) continue;
                if ((gens.col(j) + gens.col(k)).norm() <= 1e-12 * (1.0 + gens.col(j).norm())) {
                    mate = k;
                    break;
                }
            }
            if (mate < 0) return std::nullopt;
            used[j] = used[mate] = true;
            reps.push_back(j);
        }
        core.resize(n, n);
        for (int i = 0; i < n; ++i) core.col(i) = gens.col(reps[static_cast<std::size_t>(i)]);
    } else {
        return std::nullopt;
    }
    LogDet ld = log_abs_det(core);
    if (ld.sign == 0) return std::nullopt;
    return n * std::log(2.0) + ld.log_abs - std::lgamma(n + 1.0);
}

}  // namespace detail

inline VolumeEstimate log_volume_analytic(const Body& b) {
    switch (b.kind()) {
        case BodyKind::LpBall:
            return {log_lp_ball_volume(b.lp_exponent(), b.dim()), 0.0,
                    VolumeEstimate::Method::Analytic, 0};
        case BodyKind::LinearImage: {
            VolumeEstimate base = log_volume_analytic(b.base());
            return {base.log_volume + b.map_log_abs_det(), 0.0, VolumeEstimate::Method::Analytic,
                    0};
        }
        case BodyKind::VPolytope: {
            auto lv = detail::vpolytope_log_volume(b.generators());
            if (lv) return {*lv, 0.0, VolumeEstimate::Method::Analytic, 0};
            throw Unsupported("log_volume_analytic: general V-polytope");
        }
        default:
            throw Unsupported("log_volume_analytic: " + b.describe());
    }
}

inline bool analytic_volume_available(const Body& b) {
    switch (b.kind()) {
        case BodyKind::LpBall:
            return true;
        case BodyKind::LinearImage:
            return analytic_volume_available(b.base());
        case BodyKind::VPolytope:
            return detail::vpolytope_log_volume(b.generators()).has_value();
        default:
            return false;
    }
}

/// |B| ~ |R B_2^n| * hits/N with R = outer_radius; the error is the
/// binomial delta-method on the log scale.
inline VolumeEstimate log_volume_rejection(const Body& b, long n_samples, RngStream& rng) {
    const int n = b.dim();
    const double r = b.outer_radius();
    long hits = 0;
    for (long i = 0; i < n_samples; ++i) {
        Vector x = sample_sphere(n, rng);
        x *= r * std::pow(rng.next_double(), 1.0 / n);
        if (b.gauge(x) <= 1.0) ++hits;
    }
    if (hits < 50) throw DegenerateAcceptance("log_volume_rejection: fewer than 50 hits");
    const double p = static_cast<double>(hits) / static_cast<double>(n_samples);
    VolumeEstimate est;
    est.log_volume = log_unit_ball_volume(n) + n * std::log(r) + std::log(p);
    est.std_error = std::sqrt((1.0 - p) / static_cast<double>(hits));
    est.method = VolumeEstimate::Method::Rejection;
    est.n_samples = n_samples;
    return est;
}

/// Multiphase telescoping over B_k = B intersect r_k B_2 with ratio sqrt(2)
/// per phase. The base phase is a rejection estimate inside the smallest
/// ball, so an over-estimated inradius only costs acceptance, not bias.
inline VolumeEstimate log_volume_annealed(const Body& b, long n_per_phase, RngStream& rng) {
    const int n = b.dim();
    const double outer = b.outer_radius();
    double r0 = std::min(b.inner_radius(), outer);

    std::uint64_t sub = 0;
    double log_vol = 0.0;
    double var = 0.0;
    long used = 0;

    // Base phase: B intersect r0 B_2 by rejection from the r0-ball.
    for (int shrink = 0;; ++shrink) {
        RngStream s = rng.substream(sub++);
        long hits = 0;
        for (long i = 0; i < n_per_phase; ++i) {
            Vector x = sample_sphere(n, s);
            x *= r0 * std::pow(s.next_double(), 1.0 / n);
            if (b.gauge(x) <= 1.0) ++hits;
        }
        used += n_per_phase;
        if (hits >= std::min<long>(50, n_per_phase)) {
            const double p = static_cast<double>(hits) / static_cast<double>(n_per_phase);
            log_vol = log_unit_ball_volume(n) + n * std::log(r0) + std::log(p);
            var = (1.0 - p) / static_cast<double>(hits);
            break;
        }
        if (shrink >= 60) throw DegenerateAcceptance("log_volume_annealed: base phase starved");
        r0 /= std::sqrt(2.0);
    }

    // Ratio phases: fraction of B_{k+1} that lies inside B_k.
    double r_prev = r0;
    while (r_prev < outer * (1.0 - 1e-12)) {
        const double r_next = std::min(r_prev * std::sqrt(2.0), outer);
        const Body shell = r_next >= outer ? b : Body::ball_intersection(b, r_next);
        RngStream s = rng.substream(sub++);
        SampleBatch batch = uniform_samples(shell, n_per_phase, s);
        long inside = 0;
        for (Eigen::Index c = 0; c < batch.points.cols(); ++c)
            if (batch.points.col(c).norm() <= r_prev) ++inside;
        used += n_per_phase;
        if (inside < 1) throw DegenerateAcceptance("log_volume_annealed: empty ratio phase");
        const double f = static_cast<double>(inside) / static_cast<double>(n_per_phase);
        log_vol -= std::log(f);
        var += (1.0 - f) / static_cast<double>(inside);
        r_prev = r_next;
    }

    VolumeEstimate est;
    est.log_volume = log_vol;
    est.std_error = std::sqrt(var);
    est.method = VolumeEstimate::Method::Annealed;
    est.n_samples = used;
    return est;
}

struct VolumeOptions {
    long rejection_samples = 40000;
    long annealed_samples = 2000;
    int rejection_max_dim = 8;
};

/// Analytic when possible, rejection while viable, annealed otherwise.
inline VolumeEstimate log_volume_auto(const Body& b, RngStream& rng, VolumeOptions opts = {}) {
    if (analytic_volume_available(b)) return log_volume_analytic(b);
    if (b.dim() <= opts.rejection_max_dim) {
        RngStream s = rng.substream(0xefc0);
        try {
            return log_volume_rejection(b, opts.rejection_samples, s);
        } catch (const DegenerateAcceptance&) {
        }
    }
    RngStream s = rng.substream(0xa22e);
    return log_volume_annealed(b, opts.annealed_samples, s);
}

/// (|A|/|B|)^{1/n} from log-volume estimates, with propagated error.
inline Estimate vr_nthroot_ratio(const Body& a, const Body& b, const VolumeEstimate& vol_a,
                                 const VolumeEstimate& vol_b) {
    require_dim(a.dim(), b.dim(), "vr_nthroot_ratio");
    const double n = a.dim();
    const double v = std::exp((vol_a.log_volume - vol_b.log_volume) / n);
    const double se =
        v * std::sqrt(vol_a.std_error * vol_a.std_error + vol_b.std_error * vol_b.std_error) / n;
    return {v, se};
}

/// n * (|B| |B polar|)^{1/n}; scale-invariant form of the volume product.
inline Estimate santalo_product(const Body& b, RngStream& rng, VolumeOptions opts = {}) {
    const Body polar = b.polar();
    RngStream s1 = rng.substream(1), s2 = rng.substream(2);
    const VolumeEstimate va = log_volume_auto(b, s1, opts);
    const VolumeEstimate vb = log_volume_auto(polar, s2, opts);
    const double n = b.dim();
    const double v = n * std::exp((va.log_volume + vb.log_volume) / n);
    const double se =
        v * std::sqrt(va.std_error * va.std_error + vb.std_error * vb.std_error) / n;
    return {v, se};
}

struct IsotropicReport {
    Matrix map;               // whitening * volume-one scaling
    double scale = 0.0;       // the scalar part
    double l_constant = 0.0;  // det(C)^{1/2n} / |B|^{1/n}
    double l_std_error = 0.0;
    double whiteness_error = 0.0;  // post-hoc relative Frobenius deviation
    VolumeEstimate volume;
    long n_samples = 0;
};

/// Estimates the isotropic (volume one, covariance proportional to the
/// identity) position of a symmetric body from uniform samples. Centering
/// is skipped: symmetric bodies have mean zero.
inline IsotropicReport isotropic_normalize(const Body& b, long n_samples, RngStream& rng,
                                           VolumeOptions vol_opts = {}) {
    const int n = b.dim();
    if (n_samples <= 0) n_samples = std::max<long>(50L * n * n, 8000);

    RngStream s_cov = rng.substream(1);
    SampleBatch batch = uniform_samples(b, n_samples, s_cov);
    Matrix c = batch.points * batch.points.transpose() / static_cast<double>(n_samples);

    Matrix w = inv_sqrt_psd(c);
    const double log_det_c = log_abs_det(c).log_abs;

    RngStream s_vol = rng.substream(2);
    VolumeEstimate vol = log_volume_auto(b, s_vol, vol_opts);

    const double log_white_vol = vol.log_volume - 0.5 * log_det_c;
    const double alpha = std::exp(-log_white_vol / n);

    IsotropicReport rep;
    rep.map = alpha * w;
    rep.scale = alpha;
    rep.l_constant = std::exp(0.5 * log_det_c / n - vol.log_volume / n);
    rep.l_std_error = rep.l_constant * vol.std_error / n;
    rep.volume = vol;
    rep.n_samples = n_samples;

    // Post-hoc whiteness check on fresh samples of the transformed body.
    RngStream s_chk = rng.substream(3);
    const long n_check = std::max<long>(n_samples / 2, 1000);
    SampleBatch fresh = uniform_samples(b, n_check, s_chk);
    Matrix mapped = rep.map * fresh.points;
    Matrix cw = mapped * mapped.transpose() / static_cast<double>(n_check);
    const double lambda = cw.trace() / n;
    rep.whiteness_error =
        (cw - lambda * Matrix::Identity(n, n)).norm() / (lambda * std::sqrt(static_cast<double>(n)));
    return rep;
}

inline Body apply_map(const IsotropicReport& rep, const Body& b) {
    return Body::linear_image(rep.map, b);
}

}  // namespace volr
