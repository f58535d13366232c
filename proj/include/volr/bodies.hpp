#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "volr/linalg.hpp"
#include "volr/simplex.hpp"

namespace volr {

/// Membership threshold: x is inside B iff gauge(B,x) <= 1 + kMembershipTol.
constexpr double kMembershipTol = 1e-9;

inline double dual_exponent(double p) {
    if (p == 1.0) return std::numeric_limits<double>::infinity();
    if (std::isinf(p)) return 1.0;
    return p / (p - 1.0);
}

inline double lp_norm(const Vector& x, double p) {
    if (x.size() == 0) return 0.0;
    if (std::isinf(p)) return x.cwiseAbs().maxCoeff();
    if (p == 1.0) return x.cwiseAbs().sum();
    if (p == 2.0) return x.norm();
    const double m = x.cwiseAbs().maxCoeff();
    if (m == 0.0) return 0.0;
    double s = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) s += std::pow(std::abs(x(i)) / m, p);
    return m * std::pow(s, 1.0 / p);
}

/// 1-symmetric norm on R^d, normalized so tau(e_i) = 1.
struct SymmetricGauge {
    enum class Kind { Lp, KyFan };
    Kind kind = Kind::Lp;
    double p = 2.0;  // Lp
    int k = 1;       // KyFan

    static SymmetricGauge lp(double p_) {
        if (!(p_ >= 1.0)) throw std::invalid_argument("SymmetricGauge::lp: p must be >= 1");
        SymmetricGauge g;
        g.kind = Kind::Lp;
        g.p = p_;
        return g;
    }
    static SymmetricGauge ky_fan(int k_) {
        if (k_ < 1) throw std::invalid_argument("SymmetricGauge::ky_fan: k must be >= 1");
        SymmetricGauge g;
        g.kind = Kind::KyFan;
        g.k = k_;
        return g;
    }

    double eval(const Vector& s) const {
        if (kind == Kind::Lp) return lp_norm(s, p);
        std::vector<double> a(s.size());
        for (Eigen::Index i = 0; i < s.size(); ++i) a[i] = std::abs(s(i));
        std::sort(a.begin(), a.end(), std::greater<double>());
        double sum = 0.0;
        for (int i = 0; i < std::min<int>(k, static_cast<int>(a.size())); ++i) sum += a[i];
        return sum;
    }

    // Dual gauge: lp -> lp'; ky_fan(k) -> max(linf, l1/k).
    double dual_eval(const Vector& s) const {
        if (kind == Kind::Lp) return lp_norm(s, dual_exponent(p));
        return std::max(s.cwiseAbs().maxCoeff(), s.cwiseAbs().sum() / k);
    }

    /// tau(1, ..., 1) in dimension d.
    double tau_u(int d) const {
        if (kind == Kind::Lp) return std::isinf(p) ? 1.0 : std::pow(static_cast<double>(d), 1.0 / p);
        return static_cast<double>(std::min(k, d));
    }

    std::string describe() const {
        if (kind == Kind::Lp)
            return std::isinf(p) ? std::string("lp:inf") : "lp:" + std::to_string(p);
        return "kyfan:" + std::to_string(k);
    }
};

enum class BodyKind {
    VPolytope,           // absconv of generator columns
    LpBall,              // {x : ||x||_p <= 1}
    SchattenBall,        // d x d matrices (row-major vec), ||s(M)||_p <= 1
    SymmetricGaugeBall,  // tau(s(M)) <= 1 for a 1-symmetric tau
    LinearImage,         // A(base)
    BallIntersection,    // base intersect r*B_2
    Polar                // base polar, represented through the support function
};

/// Immutable symbolic description of a centrally symmetric convex body.
/// Cheap to copy (shared handle); all queries are pure and reentrant.
class Body {
public:
    static Body vpolytope(Matrix generators) {
        auto impl = std::make_shared<Impl>();
        impl->kind = BodyKind::VPolytope;
        impl->dim = static_cast<int>(generators.rows());
        if (impl->dim < 1 || generators.cols() < 1)
            throw std::invalid_argument("vpolytope: empty generator set");
        Eigen::FullPivLU<Matrix> lu(generators);
        if (lu.rank() < impl->dim)
            throw RankDeficient("vpolytope: generators do not span the ambient space");
        impl->gens = std::move(generators);
        return Body(std::move(impl));
    }

    static Body lp_ball(double p, int n) {
        if (!(p >= 1.0)) throw std::invalid_argument("lp_ball: p must be in [1, inf]");
        if (n < 1) throw std::invalid_argument("lp_ball: n must be >= 1");
        auto impl = std::make_shared<Impl>();
        impl->kind = BodyKind::LpBall;
        impl->dim = n;
        impl->p = p;
        return Body(std::move(impl));
    }

    static Body schatten_ball(double p, int d) {
        if (!(p >= 1.0)) throw std::invalid_argument("schatten_ball: p must be in [1, inf]");
        if (d < 1) throw std::invalid_argument("schatten_ball: d must be >= 1");
        auto impl = std::make_shared<Impl>();
        impl->kind = BodyKind::SchattenBall;
        impl->dim = d * d;
        impl->p = p;
        impl->d = d;
        return Body(std::move(impl));
    }

    static Body sym_gauge_ball(const SymmetricGauge& tau, int d) {
        if (d < 1) throw std::invalid_argument("sym_gauge_ball: d must be >= 1");
        if (tau.kind == SymmetricGauge::Kind::KyFan && tau.k > d)
            throw std::invalid_argument("sym_gauge_ball: ky_fan k exceeds d");
        auto impl = std::make_shared<Impl>();
        impl->kind = BodyKind::SymmetricGaugeBall;
        impl->dim = d * d;
        impl->d = d;
        impl->tau = tau;
        return Body(std::move(impl));
    }

    static Body linear_image(Matrix map, const Body& base) {
        if (map.rows() != map.cols() || static_cast<int>(map.rows()) != base.dim())
            throw DimensionMismatch("linear_image: map must be square of the base dimension");
        if (base.kind() == BodyKind::LinearImage)  // flatten chains
            return linear_image(map * base.impl_->map, base.base());
        auto impl = std::make_shared<Impl>();
        impl->kind = BodyKind::LinearImage;
        impl->dim = base.dim();
        impl->base = base.impl_;
        LogDet ld = log_abs_det(map);
        if (ld.sign == 0) throw SingularMap("linear_image: map is singular");
        impl->map_logdet = ld.log_abs;
        impl->map_sign = ld.sign;
        impl->map_inv = map.inverse();
        impl->map = std::move(map);
        return Body(std::move(impl));
    }

    static Body ball_intersection(const Body& base, double radius) {
        if (!(radius > 0.0)) throw std::invalid_argument("ball_intersection: radius must be > 0");
        auto impl = std::make_shared<Impl>();
        impl->kind = BodyKind::BallIntersection;
        impl->dim = base.dim();
        impl->base = base.impl_;
        impl->radius = radius;
        return Body(std::move(impl));
    }

    int dim() const { return impl_->dim; }
    BodyKind kind() const { return impl_->kind; }
    bool is_vpolytope() const { return impl_->kind == BodyKind::VPolytope; }

    const Matrix& generators() const { return impl_->gens; }
    double lp_exponent() const { return impl_->p; }
    int side() const { return impl_->d; }  // Schatten / gauge-ball side length
    const SymmetricGauge& tau() const { return impl_->tau; }
    const Matrix& map() const { return impl_->map; }
    double map_log_abs_det() const { return impl_->map_logdet; }
    Body base() const { return Body(impl_->base); }
    double intersect_radius() const { return impl_->radius; }

    /// Minkowski functional: positively homogeneous, gauge(x) <= 1 iff x in B.
    double gauge(const Vector& x) const {
        require_dim(impl_->dim, static_cast<int>(x.size()), "gauge");
        return impl_->gauge(x);
    }

    bool support_available() const { return impl_->support_available(); }

    /// Support function h_B(y) = max_{x in B} <x, y>.
    double support(const Vector& y) const {
        require_dim(impl_->dim, static_cast<int>(y.size()), "support");
        return impl_->support(y);
    }

    bool polar_available() const {
        return impl_->kind != BodyKind::BallIntersection;
    }

    Body polar() const {
        switch (impl_->kind) {
            case BodyKind::LpBall:
                return lp_ball(dual_exponent(impl_->p), impl_->dim);
            case BodyKind::SchattenBall:
                return schatten_ball(dual_exponent(impl_->p), impl_->d);
            case BodyKind::SymmetricGaugeBall:
                if (impl_->tau.kind == SymmetricGauge::Kind::Lp)
                    return schatten_ball(dual_exponent(impl_->tau.p), impl_->d);
                return wrap_polar(*this);  // ky_fan dual has no descriptor of its own
            case BodyKind::LinearImage:
                return linear_image(impl_->map_inv.transpose(), Body(impl_->base).polar());
            case BodyKind::VPolytope:
                return wrap_polar(*this);
            case BodyKind::Polar:
                return Body(impl_->base);  // bipolar of a closed symmetric body
            case BodyKind::BallIntersection:
                throw Unsupported("polar: no closed form for ball intersections");
        }
        throw Unsupported("polar: unreachable");
    }

    /// Chord of B through interior point x along direction d: returns
    /// (t_lo, t_hi) with t_lo < 0 < t_hi and gauge(x + t*d) = 1 at both ends.
    std::pair<double, double> chord(const Vector& x, const Vector& dir) const {
        require_dim(impl_->dim, static_cast<int>(x.size()), "chord");
        require_dim(impl_->dim, static_cast<int>(dir.size()), "chord");
        const double g0 = impl_->gauge(x);
        if (g0 >= 1.0 - 1e-12) throw NotInterior("chord: point not interior");
        const double gd = impl_->gauge(dir);
        if (!(gd > 0.0)) throw std::invalid_argument("chord: zero direction");
        const double hi = boundary_root(x, dir, g0, gd);
        const double lo = boundary_root(x, -dir, g0, gd);
        return {-lo, hi};
    }

    /// Largest r with r*B_2 inside B. Exact for closed-form variants;
    /// sampled-and-polished estimate for V-polytopes (see inner_radius_exact).
    double inner_radius() const { return impl_->inner_radius(); }
    bool inner_radius_exact() const { return impl_->inner_radius_exact(); }

    /// Certified lower bound on the inradius (never exceeds the true value).
    double inner_radius_certified() const { return impl_->inner_radius_certified(); }

    /// Certified upper bound on max_{x in B} ||x||_2; exact for V-polytopes,
    /// lp/Schatten/gauge balls, and ellipsoids.
    double outer_radius() const { return impl_->outer_radius(); }

    std::string describe() const { return impl_->describe(); }

private:
    struct Impl {
        BodyKind kind = BodyKind::LpBall;
        int dim = 0;
        Matrix gens;           // VPolytope columns
        double p = 2.0;        // LpBall / SchattenBall exponent
        int d = 0;             // matrix side for Schatten / gauge balls
        SymmetricGauge tau;    // SymmetricGaugeBall
        Matrix map, map_inv;   // LinearImage
        double map_logdet = 0.0;
        int map_sign = 1;
        double radius = 0.0;   // BallIntersection
        std::shared_ptr<const Impl> base;

        mutable std::once_flag radii_once;
        mutable double outer_cache = 0.0;
        mutable double inner_cache = 0.0;
        mutable double inner_cert_cache = 0.0;
        mutable bool inner_exact_cache = true;

        // Exact boundary parameter t > 0 with gauge(x + t*dir) = 1 for the
        // variants that admit one (x strictly interior); nullopt means the
        // caller should fall back to bracketed root finding.
        std::optional<double> ray_exit(const Vector& x, const Vector& dir) const {
            constexpr double kInf = std::numeric_limits<double>::infinity();
            switch (kind) {
                case BodyKind::VPolytope:
                    return polytope_ray_exit_lp(gens, x, dir);
                case BodyKind::LpBall: {
                    if (p == 2.0) {
                        const double a = dir.squaredNorm();
                        const double b = x.dot(dir);
                        const double c = x.squaredNorm() - 1.0;
                        return (-b + std::sqrt(std::max(0.0, b * b - a * c))) / a;
                    }
                    if (std::isinf(p)) {
                        double t = kInf;
                        for (Eigen::Index i = 0; i < x.size(); ++i) {
                            if (dir(i) > 1e-300)
                                t = std::min(t, (1.0 - x(i)) / dir(i));
                            else if (dir(i) < -1e-300)
                                t = std::min(t, (-1.0 - x(i)) / dir(i));
                        }
                        if (std::isfinite(t)) return t;
                        return std::nullopt;
                    }
                    return std::nullopt;
                }
                case BodyKind::LinearImage:
                    return base->ray_exit(map_inv * x, map_inv * dir);
                case BodyKind::BallIntersection: {
                    auto t_base = base->ray_exit(x, dir);
                    if (!t_base) return std::nullopt;
                    const double a = dir.squaredNorm();
                    const double b = x.dot(dir);
                    const double c = x.squaredNorm() - radius * radius;
                    const double t_ball =
                        (-b + std::sqrt(std::max(0.0, b * b - a * c))) / a;
                    return std::min(*t_base, t_ball);
                }
                case BodyKind::Polar: {
                    if (base->kind != BodyKind::VPolytope) return std::nullopt;
                    // support(x + t*dir) = max_j |<v_j, x> + t <v_j, dir>|
                    // first reaches 1 at the earliest generator crossing.
                    const Vector a = base->gens.transpose() * x;
                    const Vector b = base->gens.transpose() * dir;
                    double t = kInf;
                    for (Eigen::Index j = 0; j < a.size(); ++j) {
                        if (b(j) > 1e-300)
                            t = std::min(t, (1.0 - a(j)) / b(j));
                        else if (b(j) < -1e-300)
                            t = std::min(t, (-1.0 - a(j)) / b(j));
                    }
                    if (std::isfinite(t)) return t;
                    return std::nullopt;
                }
                default:
                    return std::nullopt;
            }
        }

        double gauge(const Vector& x) const {
            switch (kind) {
                case BodyKind::VPolytope:
                    return polytope_gauge_lp(gens, x);
                case BodyKind::LpBall:
                    return lp_norm(x, p);
                case BodyKind::SchattenBall:
                    return lp_norm(singular_values_small(unvec_rowmajor(x, d)), p);
                case BodyKind::SymmetricGaugeBall:
                    return tau.eval(singular_values_small(unvec_rowmajor(x, d)));
                case BodyKind::LinearImage:
                    return base->gauge(map_inv * x);
                case BodyKind::BallIntersection:
                    return std::max(base->gauge(x), x.norm() / radius);
                case BodyKind::Polar:
                    return base->support(x);
            }
            throw Unsupported("gauge: unreachable");
        }

        bool support_available() const {
            switch (kind) {
                case BodyKind::BallIntersection:
                    return false;
                case BodyKind::LinearImage:
                    return base->support_available();
                default:
                    return true;  // Polar wraps the base gauge, always present
            }
        }

        double support(const Vector& y) const {
            switch (kind) {
                case BodyKind::VPolytope:
                    return (gens.transpose() * y).cwiseAbs().maxCoeff();
                case BodyKind::LpBall:
                    return lp_norm(y, dual_exponent(p));
                case BodyKind::SchattenBall:
                    return lp_norm(singular_values_small(unvec_rowmajor(y, d)), dual_exponent(p));
                case BodyKind::SymmetricGaugeBall:
                    return tau.dual_eval(singular_values_small(unvec_rowmajor(y, d)));
                case BodyKind::LinearImage:
                    return base->support(map.transpose() * y);
                case BodyKind::BallIntersection:
                    throw Unsupported("support: no closed form for ball intersections");
                case BodyKind::Polar:
                    return base->gauge(y);
            }
            throw Unsupported("support: unreachable");
        }

        void compute_radii() const {
            switch (kind) {
                case BodyKind::VPolytope: {
                    outer_cache = gens.colwise().norm().maxCoeff();
                    Eigen::JacobiSVD<Matrix> svd(gens);
                    const double smin = svd.singularValues()(dim - 1);
                    inner_cert_cache = smin / std::sqrt(static_cast<double>(gens.cols()));
                    inner_cache = std::max(sampled_inner_estimate(), inner_cert_cache);
                    inner_exact_cache = false;
                    break;
                }
                case BodyKind::LpBall: {
                    const double n = static_cast<double>(dim);
                    outer_cache = p <= 2.0 ? 1.0 : std::pow(n, 0.5 - 1.0 / p);
                    inner_cache = p <= 2.0 ? std::pow(n, 0.5 - 1.0 / p) : 1.0;
                    inner_cert_cache = inner_cache;
                    inner_exact_cache = true;
                    break;
                }
                case BodyKind::SchattenBall: {
                    const double dd = static_cast<double>(d);
                    outer_cache = p <= 2.0 ? 1.0 : std::pow(dd, 0.5 - 1.0 / p);
                    inner_cache = p <= 2.0 ? std::pow(dd, 0.5 - 1.0 / p) : 1.0;
                    inner_cert_cache = inner_cache;
                    inner_exact_cache = true;
                    break;
                }
                case BodyKind::SymmetricGaugeBall: {
                    const double dd = static_cast<double>(d);
                    if (tau.kind == SymmetricGauge::Kind::Lp) {
                        outer_cache = tau.p <= 2.0 ? 1.0 : std::pow(dd, 0.5 - 1.0 / tau.p);
                        inner_cache = tau.p <= 2.0 ? std::pow(dd, 0.5 - 1.0 / tau.p) : 1.0;
                    } else {
                        outer_cache = std::max(1.0, std::sqrt(dd) / tau.k);
                        inner_cache = 1.0 / std::sqrt(static_cast<double>(tau.k));
                    }
                    inner_cert_cache = inner_cache;
                    inner_exact_cache = true;
                    break;
                }
                case BodyKind::LinearImage: {
                    Eigen::JacobiSVD<Matrix> svd(map);
                    const double smax = svd.singularValues()(0);
                    const double smin = svd.singularValues()(dim - 1);
                    if (base->kind == BodyKind::VPolytope) {
                        outer_cache = (map * base->gens).colwise().norm().maxCoeff();
                    } else {
                        outer_cache = smax * base->outer_radius();
                    }
                    inner_cache = smin * base->inner_radius();
                    inner_cert_cache = smin * base->inner_radius_certified();
                    inner_exact_cache = base->kind == BodyKind::LpBall && base->p == 2.0;
                    if (!inner_exact_cache) inner_cache = std::max(inner_cache, inner_cert_cache);
                    break;
                }
                case BodyKind::BallIntersection: {
                    outer_cache = std::min(base->outer_radius(), radius);
                    inner_cache = std::min(base->inner_radius(), radius);
                    inner_cert_cache = std::min(base->inner_radius_certified(), radius);
                    inner_exact_cache = base->inner_radius_exact();
                    break;
                }
                case BodyKind::Polar: {
                    outer_cache = 1.0 / base->inner_radius_certified();
                    inner_cache = 1.0 / base->outer_radius();
                    inner_cert_cache = inner_cache;
                    // exact iff outer(base) is exact, which holds for all
                    // variants we wrap (polytopes and closed-form balls).
                    inner_exact_cache =
                        base->kind == BodyKind::VPolytope || base->kind == BodyKind::LpBall ||
                        base->kind == BodyKind::SchattenBall ||
                        base->kind == BodyKind::SymmetricGaugeBall;
                    break;
                }
            }
        }

        // Max of the gauge over sampled sphere directions with a pattern-
        // search polish; 1/result is an (over-)estimate of the inradius.
        double sampled_inner_estimate() const {
            RngStream rng(0x1757a11edb0d1e5ULL, static_cast<std::uint64_t>(dim) * 1001 + 7);
            const int tries = 64 * dim;
            Vector best;
            double best_gauge = -1.0;
            for (int t = 0; t < tries; ++t) {
                Vector u = sample_sphere(dim, rng);
                const double g = gauge(u);
                if (g > best_gauge) {
                    best_gauge = g;
                    best = u;
                }
            }
            double step = 0.25;
            while (step > 1e-7) {
                bool improved = false;
                for (int i = 0; i < dim; ++i) {
                    for (double s : {step, -step}) {
                        Vector cand = best;
                        cand(i) += s;
                        cand.normalize();
                        const double g = gauge(cand);
                        if (g > best_gauge * (1.0 + 1e-14)) {
                            best_gauge = g;
                            best = cand;
                            improved = true;
                        }
                    }
                }
                if (!improved) step *= 0.5;
            }
            return 1.0 / best_gauge;
        }

        double outer_radius() const {
            std::call_once(radii_once, [this] { compute_radii(); });
            return outer_cache;
        }
        double inner_radius() const {
            std::call_once(radii_once, [this] { compute_radii(); });
            return inner_cache;
        }
        double inner_radius_certified() const {
            std::call_once(radii_once, [this] { compute_radii(); });
            return inner_cert_cache;
        }
        bool inner_radius_exact() const {
            std::call_once(radii_once, [this] { compute_radii(); });
            return inner_exact_cache;
        }

        std::string describe() const {
            switch (kind) {
                case BodyKind::VPolytope:
                    return "vpolytope:" + std::to_string(dim) + ":" + std::to_string(gens.cols());
                case BodyKind::LpBall:
                    if (p == 1.0) return "b1:" + std::to_string(dim);
                    if (p == 2.0) return "b2:" + std::to_string(dim);
                    if (std::isinf(p)) return "binf:" + std::to_string(dim);
                    return "bp:" + std::to_string(p) + ":" + std::to_string(dim);
                case BodyKind::SchattenBall:
                    return "schatten:" + (std::isinf(p) ? std::string("inf") : std::to_string(p)) +
                           ":" + std::to_string(d);
                case BodyKind::SymmetricGaugeBall:
                    return tau.kind == SymmetricGauge::Kind::Lp
                               ? "schatten:" +
                                     (std::isinf(tau.p) ? std::string("inf")
                                                        : std::to_string(tau.p)) +
                                     ":" + std::to_string(d)
                               : "kyfan:" + std::to_string(tau.k) + ":" + std::to_string(d);
                case BodyKind::LinearImage:
                    return "image(" + base->describe() + ")";
                case BodyKind::BallIntersection:
                    return "cap(" + base->describe() + ")";
                case BodyKind::Polar:
                    return "polar(" + base->describe() + ")";
            }
            return "?";
        }
    };

    explicit Body(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

    static Body wrap_polar(const Body& b) {
        if (!b.impl_->support_available())
            throw Unsupported("polar: base has no support function");
        auto impl = std::make_shared<Impl>();
        impl->kind = BodyKind::Polar;
        impl->dim = b.dim();
        impl->base = b.impl_;
        return Body(std::move(impl));
    }

    // Root of gauge(x + t*dir) = 1 for t > 0: exact where a direct route
    // exists, bracketed Illinois otherwise.
    double boundary_root(const Vector& x, const Vector& dir, double g0, double gd) const {
        if (auto t = impl_->ray_exit(x, dir); t && std::isfinite(*t) && *t > 0.0) return *t;
        double lo = (1.0 - g0) / gd;   // gauge <= 1 here (triangle inequality)
        double hi = (1.0 + g0) / gd;   // gauge >= 1 here (reverse triangle)
        double flo = impl_->gauge(x + lo * dir) - 1.0;
        if (std::abs(flo) <= 1e-10) return lo;
        double fhi = impl_->gauge(x + hi * dir) - 1.0;
        if (std::abs(fhi) <= 1e-10) return hi;
        // Floating safety at the bracket edges.
        while (flo > 0.0) {
            lo *= 0.999999;
            flo = impl_->gauge(x + lo * dir) - 1.0;
        }
        while (fhi < 0.0) {
            hi *= 1.000001;
            fhi = impl_->gauge(x + hi * dir) - 1.0;
        }
        int side = 0;
        double t = lo;
        for (int it = 0; it < 300; ++it) {
            t = (lo * fhi - hi * flo) / (fhi - flo);
            if (!(t > lo && t < hi)) t = 0.5 * (lo + hi);
            const double f = impl_->gauge(x + t * dir) - 1.0;
            if (std::abs(f) <= 1e-10) return t;
            if (f > 0.0) {
                hi = t;
                fhi = f;
                if (side == +1) flo *= 0.5;  // Illinois trick
                side = +1;
            } else {
                lo = t;
                flo = f;
                if (side == -1) fhi *= 0.5;
                side = -1;
            }
        }
        return t;
    }

    std::shared_ptr<const Impl> impl_;
};

/// Convenience membership test at the library-wide tolerance.
inline bool contains(const Body& b, const Vector& x) { return b.gauge(x) <= 1.0 + kMembershipTol; }

}  // namespace volr
