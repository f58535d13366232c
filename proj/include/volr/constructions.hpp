#pragma once

#include <cmath>

#include "volr/operators.hpp"
#include "volr/volume.hpp"

namespace volr {

/// Random polytope absconv{X_1,...,X_m, e_1,...,e_n} with the X_i uniform
/// on the unit sphere. Satisfies B_1^n inside L^(m) inside B_2^n.
inline Body gluskin_polytope(int n, int m, RngStream& rng) {
    if (n < 1 || m < 1) throw std::invalid_argument("gluskin_polytope: need n, m >= 1");
    Matrix gens(n, m + n);
    for (int j = 0; j < m; ++j) gens.col(j) = sample_sphere(n, rng);
    gens.rightCols(n) = Matrix::Identity(n, n);
    return Body::vpolytope(std::move(gens));
}

struct DrParallelepiped {
    LinearMap t;              // rows sampled uniformly from L polar
    Body p;                   // T^{-1}(B_inf^n)
    double ratio = 0.0;       // (|P|/|L|)^{1/n}
    double ratio_std_error = 0.0;
    double max_violation = 0.0;  // of the inclusion L inside P, over checked points
    long points_checked = 0;
    int attempts = 1;
};

/// Random Dvoretzky-Rogers parallelepiped for a body L whose polar is in
/// (estimated) isotropic position: T's rows are uniform samples from
/// polar(L); P = T^{-1}(B_inf^n) contains L by polarity.
inline DrParallelepiped dr_parallelepiped(const Body& l, RngStream& rng,
                                          long boundary_checks = 1000,
                                          VolumeOptions vol_opts = {}) {
    const int n = l.dim();
    const Body l_star = l.polar();

    Matrix t_mat(n, n);
    int attempts = 0;
    double log_det = 0.0;
    while (true) {
        ++attempts;
        RngStream s = rng.substream(100 + attempts);
        SampleBatch rows = uniform_samples(l_star, n, s);
        t_mat = rows.points.transpose();
        LogDet ld = log_abs_det(t_mat);
        if (ld.sign != 0 && ld.log_abs > -30.0 * n) {
            log_det = ld.log_abs;
            break;
        }
        if (attempts >= 3) throw SingularMap("dr_parallelepiped: singular T after 3 attempts");
    }

    LinearMap t(t_mat);
    Body p = Body::linear_image(t_mat.inverse(), Body::lp_ball(
                                                     std::numeric_limits<double>::infinity(), n));

    // The inclusion L inside P is a theorem; any violation flags a bug.
    double max_violation = 0.0;
    long checked = 0;
    if (l.is_vpolytope()) {
        const Matrix& g = l.generators();
        for (Eigen::Index j = 0; j < g.cols(); ++j) {
            max_violation = std::max(max_violation, (t_mat * g.col(j)).cwiseAbs().maxCoeff() - 1.0);
            ++checked;
        }
    } else {
        RngStream s = rng.substream(7);
        for (long i = 0; i < boundary_checks; ++i) {
            Vector u = sample_sphere(n, s);
            Vector y = u / l.gauge(u);
            max_violation = std::max(max_violation, (t_mat * y).cwiseAbs().maxCoeff() - 1.0);
            ++checked;
        }
    }

    RngStream s_vol = rng.substream(8);
    const VolumeEstimate vol_l = log_volume_auto(l, s_vol, vol_opts);
    const double log_p = n * std::log(2.0) - log_det;

    DrParallelepiped out{std::move(t), std::move(p)};
    out.ratio = std::exp((log_p - vol_l.log_volume) / n);
    out.ratio_std_error = out.ratio * vol_l.std_error / n;
    out.max_violation = max_violation;
    out.points_checked = checked;
    out.attempts = attempts;
    return out;
}

/// (1/||T||) T(L), which lies inside K; requires an exact norm route.
inline Body include_via_operator(const Matrix& t, const Body& l, const Body& k) {
    OpNorm norm = operator_norm(t, l, k);
    if (!norm.exact)
        throw Unsupported("include_via_operator: no exact operator-norm route for this source");
    if (!(norm.value > 0.0)) throw SingularMap("include_via_operator: zero operator norm");
    return Body::linear_image(t / norm.value, l);
}

/// Unit ball of the unitary-invariant matrix norm tau(singular values).
inline Body unitary_invariant_ball(const SymmetricGauge& tau, int d) {
    return Body::sym_gauge_ball(tau, d);
}

inline double tau_u(const SymmetricGauge& tau, int d) { return tau.tau_u(d); }

struct InclusionCheck {
    long n_checked = 0;
    long violations = 0;
    double max_violation = 0.0;  // positive means the inclusion failed there

    void record(double slack) {
        ++n_checked;
        if (slack > kMembershipTol) ++violations;
        max_violation = std::max(max_violation, slack);
    }
};

struct SandwichReport {
    InclusionCheck left;   // (1/tau(u)) S_inf^d inside B_N
    InclusionCheck right;  // B_N inside (d/tau(u)) S_1^d
    bool ok() const { return left.violations == 0 && right.violations == 0; }
};

/// Checks (1/tau(u)) S_inf^d inside B_N inside (d/tau(u)) S_1^d pointwise:
/// A inside B iff gauge_B(x) <= gauge_A(x) for all x.
inline SandwichReport schatten_sandwich_check(const SymmetricGauge& tau, int d, long n_dirs,
                                              RngStream& rng) {
    const Body bn = unitary_invariant_ball(tau, d);
    const double tu = tau.tau_u(d);
    SandwichReport rep;
    for (long i = 0; i < n_dirs; ++i) {
        const Vector x = sample_sphere(d * d, rng);
        const Vector s = singular_values_small(unvec_rowmajor(x, d));
        const double g_bn = tau.eval(s);
        rep.left.record(g_bn - tu * s(0));                       // vs tau(u) * sigma_inf
        rep.right.record((tu / d) * s.sum() - g_bn);             // vs (tau(u)/d) * sigma_1
    }
    return rep;
}

struct BobkovReport {
    InclusionCheck inner;  // c_in B_inf^n inside K
    InclusionCheck outer;  // K inside c_out n B_1^n
    double allowance = 1.1;
    bool ok() const { return inner.violations == 0 && outer.violations == 0; }
};

/// Bobkov-Nazarov extremality of the cube and cross-polytope among
/// unconditional isotropic bodies, with a tolerance factor on the
/// constants for the sampled isotropic map (default 1.1).
inline BobkovReport bobkov_check(const Body& k_iso, long n_dirs, RngStream& rng,
                                 double allowance = 1.1) {
    const int n = k_iso.dim();
    const double c_in = 0.5 / std::sqrt(M_PI * M_E) / allowance;
    const double c_out = 0.5 * std::sqrt(6.0) * allowance;
    BobkovReport rep;
    rep.allowance = allowance;
    for (long i = 0; i < n_dirs; ++i) {
        const Vector x = sample_sphere(n, rng);
        const double g = k_iso.gauge(x);
        rep.inner.record(g - x.cwiseAbs().maxCoeff() / c_in);
        rep.outer.record(x.cwiseAbs().sum() / (c_out * n) - g);
    }
    return rep;
}

}  // namespace volr
