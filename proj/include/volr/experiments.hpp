#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "volr/parallel.hpp"
#include "volr/presets.hpp"
#include "volr/report.hpp"
#include "volr/vr.hpp"

namespace volr {

struct ExperimentOptions {
    std::uint64_t seed = 1;
    int threads = 1;
    long samples = 0;  // 0 = per-experiment default
    VrOptions vr = {};
};

namespace detail {

inline std::uint64_t trial_stream_id(int n, int trial) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(n)) << 32) |
           static_cast<std::uint32_t>(trial);
}

inline json dims_json(const std::vector<int>& dims) {
    json a = json::array();
    for (int d : dims) a.push_back(d);
    return a;
}

inline void add_per_n_aggregates(ExperimentReport& rep, const std::vector<int>& dims,
                                 const std::string& which = "") {
    json per_n = json::object();
    std::vector<double> med_n, med_v;
    for (int n : dims) {
        std::vector<double> vals;
        for (const TrialRow& r : rep.rows)
            if (r.n == n && (which.empty() || r.experiment == which)) vals.push_back(r.value);
        if (vals.empty()) continue;
        json entry{{"median", median_of(vals)},
                   {"q25", quantile_of(vals, 0.25)},
                   {"q75", quantile_of(vals, 0.75)},
                   {"trials", vals.size()}};
        per_n[std::to_string(n)] = entry;
        med_n.push_back(n);
        med_v.push_back(median_of(vals));
    }
    rep.aggregates["per_n"] = per_n;
    if (med_n.size() >= 2) {
        const PowerFit fit = fit_power_law(med_n, med_v);
        rep.aggregates["fit"] = json{{"exponent", fit.exponent}, {"constant", fit.constant}};
    }
}

}  // namespace detail

/// Lower-bound scaling experiment: vr(K_n, L^(ceil(delta n))) per trial,
/// medians per dimension, and the fitted power of n.
inline ExperimentReport lvr_gluskin_experiment(const std::string& k_family_spec, double delta,
                                               const std::vector<int>& dims, int trials,
                                               const ExperimentOptions& opts) {
    auto family = parse_body_family(k_family_spec);
    ExperimentReport rep;
    rep.name = "gluskin-lower";
    rep.config = json{{"seed", opts.seed},     {"body_k", k_family_spec}, {"delta", delta},
                      {"dims", detail::dims_json(dims)}, {"trials", trials}};

    rep.rows.resize(dims.size() * static_cast<std::size_t>(trials),
                    TrialRow{"gluskin-lower", 0, 0, opts.seed, 0.0, 0.0, ""});
    parallel_for(opts.threads, static_cast<int>(rep.rows.size()), [&](int idx) {
        const int di = idx / trials;
        const int trial = idx % trials;
        const int n = dims[static_cast<std::size_t>(di)];
        const Body k = family(n);
        const int m = static_cast<int>(std::ceil(delta * n));
        RngStream rng(opts.seed, detail::trial_stream_id(n, trial));
        RngStream s_body = rng.substream(1), s_vr = rng.substream(2);
        const Body l = gluskin_polytope(n, m, s_body);
        const VrEstimate est = vr_estimate(k, l, opts.vr, s_vr);
        TrialRow& row = rep.rows[static_cast<std::size_t>(idx)];
        row.n = n;
        row.trial = trial;
        row.value = est.value;
        row.std_error = est.std_error;
        row.flag = est.solve.converged ? "" : "maxiter";
    });
    detail::add_per_n_aggregates(rep, dims);
    return rep;
}

/// Random Dvoretzky-Rogers parallelepiped around L (via the isotropic
/// position of polar(L), estimated from samples): ratio rows and the
/// sqrt(n)/L bound comparison.
inline ExperimentReport dr_experiment(const std::string& l_family_spec,
                                      const std::vector<int>& dims, int trials,
                                      const ExperimentOptions& opts) {
    auto family = parse_body_family(l_family_spec);
    ExperimentReport rep;
    rep.name = "dr-parallelepiped";
    rep.config = json{{"seed", opts.seed},     {"body", l_family_spec},
                      {"dims", detail::dims_json(dims)}, {"trials", trials}};
    rep.notes.push_back("isotropic position estimated from samples");

    json per_n = json::object();
    rep.rows.resize(dims.size() * static_cast<std::size_t>(trials),
                    TrialRow{"dr-parallelepiped", 0, 0, opts.seed, 0.0, 0.0, ""});
    std::vector<Body> l_args;
    std::vector<double> l_consts;
    for (std::size_t di = 0; di < dims.size(); ++di) {
        const int n = dims[di];
        const Body l = family(n);
        const Body l_polar = l.polar();
        RngStream s_iso(opts.seed, detail::trial_stream_id(n, 1 << 24));
        const IsotropicReport iso =
            isotropic_normalize(l_polar, opts.samples, s_iso, opts.vr.volume);
        l_args.push_back(apply_map(iso, l_polar).polar());
        l_consts.push_back(iso.l_constant);
    }
    parallel_for(opts.threads, static_cast<int>(rep.rows.size()), [&](int idx) {
        const std::size_t di = static_cast<std::size_t>(idx / trials);
        const int trial = idx % trials;
        const int n = dims[di];
        RngStream rng(opts.seed, detail::trial_stream_id(n, trial));
        const DrParallelepiped dr = dr_parallelepiped(l_args[di], rng, 1000, opts.vr.volume);
        TrialRow& row = rep.rows[static_cast<std::size_t>(idx)];
        row.n = n;
        row.trial = trial;
        row.value = dr.ratio;
        row.std_error = dr.ratio_std_error;
        if (dr.max_violation > kMembershipTol) row.flag = "inclusion_violated";
    });
    long violations = 0;
    for (const TrialRow& r : rep.rows)
        if (!r.flag.empty()) ++violations;
    for (std::size_t di = 0; di < dims.size(); ++di) {
        const int n = dims[di];
        std::vector<double> vals;
        for (const TrialRow& r : rep.rows)
            if (r.n == n) vals.push_back(r.value);
        per_n[std::to_string(n)] =
            json{{"median_ratio", median_of(vals)},
                 {"l_constant_polar", l_consts[di]},
                 {"bound_3sqrt_n_over_l", 3.0 * std::sqrt(static_cast<double>(n)) / l_consts[di]}};
    }
    rep.aggregates["per_n"] = per_n;
    rep.violations = violations;
    return rep;
}

/// Empirical distribution of |det A|^{1/n} for Gaussian A, against the
/// 0.1 sqrt(n) threshold.
inline ExperimentReport det_bound_experiment(const std::vector<int>& dims, int trials,
                                             const ExperimentOptions& opts) {
    ExperimentReport rep;
    rep.name = "det-bound";
    rep.config = json{{"seed", opts.seed}, {"dims", detail::dims_json(dims)}, {"trials", trials}};
    rep.rows.resize(dims.size() * static_cast<std::size_t>(trials),
                    TrialRow{"det-bound", 0, 0, opts.seed, 0.0, 0.0, ""});
    parallel_for(opts.threads, static_cast<int>(rep.rows.size()), [&](int idx) {
        const std::size_t di = static_cast<std::size_t>(idx / trials);
        const int trial = idx % trials;
        const int n = dims[di];
        RngStream rng(opts.seed, detail::trial_stream_id(n, trial));
        const Matrix a = sample_gaussian_matrix(n, rng);
        TrialRow& row = rep.rows[static_cast<std::size_t>(idx)];
        row.n = n;
        row.trial = trial;
        row.value = std::exp(log_abs_det(a).log_abs / n);
    });
    json per_n = json::object();
    for (int n : dims) {
        const double threshold = 0.1 * std::sqrt(static_cast<double>(n));
        long pass = 0, total = 0;
        for (const TrialRow& r : rep.rows)
            if (r.n == n) {
                ++total;
                if (r.value >= threshold) ++pass;
            }
        per_n[std::to_string(n)] = json{{"threshold", threshold},
                                        {"fraction_above", static_cast<double>(pass) / total}};
    }
    rep.aggregates["per_n"] = per_n;
    return rep;
}

/// Tail experiment for the operator norm of a Gaussian matrix between two
/// body norms: empirical high-probability quantiles against the two-term
/// width bound, and the smallest constant that makes the bound hold.
inline ExperimentReport chevet_tail_experiment(const std::string& l_family_spec,
                                               const std::string& k_family_spec,
                                               const std::vector<int>& dims, int trials,
                                               const std::vector<double>& u_grid,
                                               const ExperimentOptions& opts) {
    auto l_family = parse_body_family(l_family_spec);
    auto k_family = parse_body_family(k_family_spec);
    ExperimentReport rep;
    rep.name = "chevet-tail";
    rep.config = json{{"seed", opts.seed},     {"body_l", l_family_spec},
                      {"body_k", k_family_spec}, {"dims", detail::dims_json(dims)},
                      {"trials", trials},      {"u_grid", u_grid}};

    rep.rows.resize(dims.size() * static_cast<std::size_t>(trials),
                    TrialRow{"chevet-tail", 0, 0, opts.seed, 0.0, 0.0, ""});
    std::vector<Body> ls, ks;
    for (int n : dims) {
        ls.push_back(l_family(n));
        ks.push_back(k_family(n));
    }
    parallel_for(opts.threads, static_cast<int>(rep.rows.size()), [&](int idx) {
        const std::size_t di = static_cast<std::size_t>(idx / trials);
        const int trial = idx % trials;
        const int n = dims[di];
        RngStream rng(opts.seed, detail::trial_stream_id(n, trial));
        const Matrix a = sample_gaussian_matrix(n, rng);
        const OpNorm norm = operator_norm(a, ls[di], ks[di]);
        TrialRow& row = rep.rows[static_cast<std::size_t>(idx)];
        row.n = n;
        row.trial = trial;
        row.value = norm.value;
        row.flag = norm.exact ? "" : "approx_norm";
    });

    const long ell_samples = opts.samples > 0 ? opts.samples : 200000;
    double fitted_c = 0.0;
    json per_n = json::object();
    for (std::size_t di = 0; di < dims.size(); ++di) {
        const int n = dims[di];
        const Body l_polar = ls[di].polar();
        RngStream s1(opts.seed, detail::trial_stream_id(n, 1 << 25));
        RngStream s2(opts.seed, detail::trial_stream_id(n, 2 << 25));
        const double ell_k = ell_norm(ks[di], ell_samples, s1).value;
        const double ell_lp = ell_norm(l_polar, ell_samples, s2).value;
        const double id_lp = 1.0 / l_polar.inner_radius();  // ||id: l2 -> X_{L polar}||
        const double id_k = 1.0 / ks[di].inner_radius();
        std::vector<double> vals;
        for (const TrialRow& r : rep.rows)
            if (r.n == n) vals.push_back(r.value);
        json rows_u = json::array();
        for (double u : u_grid) {
            const double bound = ell_k * id_lp + ell_lp * id_k + u * id_lp * id_k;
            const double q = 1.0 - std::exp(-u * u);
            const double quant = quantile_of(vals, q);
            const double c = quant / bound;
            fitted_c = std::max(fitted_c, c);
            rows_u.push_back(
                json{{"u", u}, {"quantile", quant}, {"bound", bound}, {"ratio", c}});
        }
        per_n[std::to_string(n)] = json{
            {"ell_k", ell_k}, {"ell_l_polar", ell_lp}, {"id_l_polar", id_lp}, {"id_k", id_k},
            {"u_rows", rows_u}};
    }
    rep.aggregates["per_n"] = per_n;
    rep.aggregates["fitted_c"] = fitted_c;
    return rep;
}

/// Product check vr(B_inf^n, L) * L_{polar(L)} / sqrt(n) over a body zoo.
inline ExperimentReport producto_piola_experiment(const std::vector<std::string>& zoo,
                                                  const std::vector<int>& dims,
                                                  const ExperimentOptions& opts) {
    ExperimentReport rep;
    rep.name = "producto-piola";
    json zoo_json = json::array();
    for (const auto& z : zoo) zoo_json.push_back(z);
    rep.config = json{{"seed", opts.seed}, {"zoo", zoo_json}, {"dims", detail::dims_json(dims)},
                      };
    rep.notes.push_back("isotropic position estimated from samples");

    struct Task {
        std::string preset;
        int n;
    };
    std::vector<Task> tasks;
    for (const auto& z : zoo)
        for (int n : dims) tasks.push_back({z, n});
    rep.rows.resize(tasks.size(), TrialRow{"producto-piola", 0, 0, opts.seed, 0.0, 0.0, ""});
    parallel_for(opts.threads, static_cast<int>(tasks.size()), [&](int idx) {
        const Task& task = tasks[static_cast<std::size_t>(idx)];
        const Body l = parse_body_family(task.preset)(task.n);
        const Body k = Body::lp_ball(std::numeric_limits<double>::infinity(), task.n);
        RngStream rng(opts.seed, detail::trial_stream_id(task.n, idx));
        RngStream s_vr = rng.substream(1), s_iso = rng.substream(2);
        const VrEstimate vr = vr_estimate(k, l, opts.vr, s_vr);
        const IsotropicReport iso =
            isotropic_normalize(l.polar(), opts.samples, s_iso, opts.vr.volume);
        TrialRow& row = rep.rows[static_cast<std::size_t>(idx)];
        row.n = task.n;
        row.trial = idx;
        row.value = vr.value * iso.l_constant / std::sqrt(static_cast<double>(task.n));
        row.std_error = row.value * std::sqrt(std::pow(vr.std_error / vr.value, 2) +
                                              std::pow(iso.l_std_error / iso.l_constant, 2));
        row.flag = task.preset;
    });
    double zoo_max = 0.0;
    for (const TrialRow& r : rep.rows) zoo_max = std::max(zoo_max, r.value);
    rep.aggregates["zoo_max"] = zoo_max;
    return rep;
}

/// Unitary-invariant two-sided experiment at side d (ambient d^2):
/// lower side = Gluskin vr against B_N, upper side = random inclusion
/// position via a Gaussian map of an isotropic Gluskin polytope.
inline ExperimentReport schatten_lvr_experiment(const SymmetricGauge& tau, int d, int trials,
                                                const ExperimentOptions& opts) {
    if (d < 1) throw std::invalid_argument("schatten_lvr_experiment: d >= 1");
    const int n = d * d;
    const Body b_n = unitary_invariant_ball(tau, d);
    const double tu = tau.tau_u(d);
    ExperimentReport rep;
    rep.name = "schatten-lvr";
    rep.config = json{{"seed", opts.seed}, {"tau", tau.describe()}, {"d", d},
                      {"trials", trials}};
    rep.notes.push_back("rudelson_substituted_isotropic");

    RngStream s_vol(opts.seed, detail::trial_stream_id(n, 3 << 24));
    const VolumeEstimate vol_bn = log_volume_auto(b_n, s_vol, opts.vr.volume);
    rep.aggregates["log_volume_b_n"] = vol_bn.log_volume;

    rep.rows.resize(2 * static_cast<std::size_t>(trials),
                    TrialRow{"", 0, 0, opts.seed, 0.0, 0.0, ""});
    std::atomic<long> membership_violations{0};
    parallel_for(opts.threads, 2 * trials, [&](int idx) {
        const bool upper = idx >= trials;
        const int trial = upper ? idx - trials : idx;
        TrialRow& row = rep.rows[static_cast<std::size_t>(idx)];
        row.n = n;
        row.trial = trial;
        if (!upper) {
            RngStream rng(opts.seed, detail::trial_stream_id(n, trial));
            RngStream s_body = rng.substream(1), s_vl = rng.substream(2), s_solve = rng.substream(3);
            const Body l = gluskin_polytope(n, 2 * n, s_body);
            const VolumeEstimate vol_l = log_volume_auto(l, s_vl, opts.vr.volume);
            const VrSolveResult solve =
                maxdet_inclusion(b_n, l, opts.vr, s_solve, &vol_bn, &vol_l);
            row.experiment = "schatten-lvr-lower";
            row.value = solve.vr_upper;
            row.std_error = solve.vr_std_error;
        } else {
            RngStream rng(opts.seed, detail::trial_stream_id(n, (1 << 20) + trial));
            RngStream s_body = rng.substream(1), s_iso = rng.substream(2), s_a = rng.substream(3);
            const Body l0 = gluskin_polytope(n, 2 * n, s_body);
            const long iso_samples = opts.samples > 0 ? opts.samples : 50L * n * n;
            const IsotropicReport iso =
                isotropic_normalize(l0, iso_samples, s_iso, opts.vr.volume);
            const Body l_iso = Body::vpolytope(iso.map * l0.generators());
            const Matrix a = sample_gaussian_matrix(n, s_a);
            const Body s_inf = Body::schatten_ball(std::numeric_limits<double>::infinity(), d);
            const OpNorm norm = operator_norm(a, l_iso, s_inf);
            const double scale = 1.0 / (norm.value * tu);
            // Membership of the positioned body in B_N at the generators.
            const Matrix mapped = scale * (a * l_iso.generators());
            for (Eigen::Index j = 0; j < mapped.cols(); ++j)
                if (b_n.gauge(mapped.col(j)) > 1.0 + kMembershipTol) ++membership_violations;
            // |L tilde| = scale^n |det A| * |L_iso|, and |L_iso| = 1 up to
            // the volume-estimate error inside the isotropic map.
            const double log_l_tilde = n * std::log(scale) + log_abs_det(a).log_abs;
            const double ratio = std::exp((vol_bn.log_volume - log_l_tilde) / n);
            row.experiment = "schatten-lvr-upper";
            row.value = ratio;
            row.std_error =
                ratio *
                std::sqrt(std::pow(vol_bn.std_error, 2) + std::pow(iso.volume.std_error, 2)) / n;
        }
    });
    std::vector<double> lower, upper;
    for (const TrialRow& r : rep.rows) {
        if (r.experiment == "schatten-lvr-lower") lower.push_back(r.value);
        if (r.experiment == "schatten-lvr-upper") upper.push_back(r.value);
    }
    rep.aggregates["lower_median_vr"] = median_of(lower);
    rep.aggregates["upper_median_ratio"] = median_of(upper);
    rep.aggregates["lower_median_over_d"] = median_of(lower) / d;
    rep.aggregates["upper_median_over_d"] = median_of(upper) / d;
    rep.violations = membership_violations.load();
    return rep;
}

/// Blaschke-Santalo style product for one body.
inline ExperimentReport santalo_experiment(const std::string& body_spec,
                                           const ExperimentOptions& opts) {
    ExperimentReport rep;
    rep.name = "santalo";
    rep.config = json{{"seed", opts.seed}, {"body", body_spec}};
    const Body b = parse_body(body_spec);
    RngStream rng(opts.seed, 0);
    VolumeOptions vopts = opts.vr.volume;
    if (opts.samples > 0) vopts.rejection_samples = opts.samples;
    const Estimate product = santalo_product(b, rng, vopts);
    rep.rows.push_back(
        TrialRow{"santalo", b.dim(), 0, opts.seed, product.value, product.std_error, ""});
    rep.aggregates["ball_reference"] =
        b.dim() * std::exp(2.0 * log_unit_ball_volume(b.dim()) / b.dim());
    return rep;
}

/// Single vr(K, L) estimate.
inline ExperimentReport vr_experiment(const std::string& k_spec, const std::string& l_spec,
                                      const ExperimentOptions& opts) {
    ExperimentReport rep;
    rep.name = "vr";
    rep.config = json{{"seed", opts.seed}, {"body_k", k_spec}, {"body_l", l_spec}};
    const Body k = parse_body(k_spec);
    const Body l = parse_body(l_spec);
    require_dim(k.dim(), l.dim(), "vr");
    RngStream rng(opts.seed, 0);
    const VrEstimate est = vr_estimate(k, l, opts.vr, rng);
    TrialRow row{"vr", k.dim(), 0, opts.seed, est.value, est.std_error, ""};
    if (est.l_approximated) row.flag = "l_approximated";
    rep.rows.push_back(row);
    rep.aggregates["log_det_best"] = est.solve.log_det_best;
    rep.aggregates["cert_max_gauge"] = est.solve.cert_max_gauge;
    rep.aggregates["converged"] = est.solve.converged;
    return rep;
}

/// Bobkov-Nazarov inclusion check for an unconditional body, after the
/// sampled isotropic normalization.
inline ExperimentReport bobkov_experiment(const std::string& body_spec, long n_dirs,
                                          const ExperimentOptions& opts) {
    ExperimentReport rep;
    rep.name = "bobkov-check";
    rep.config = json{{"seed", opts.seed}, {"body", body_spec}, {"samples", n_dirs}};
    rep.notes.push_back("isotropic position estimated from samples");
    const Body b = parse_body(body_spec);
    if (b.kind() != BodyKind::LpBall)
        throw std::invalid_argument("bobkov-check: body must be an unconditional lp ball preset");
    RngStream rng(opts.seed, 0);
    RngStream s_iso = rng.substream(1), s_chk = rng.substream(2);
    const IsotropicReport iso = isotropic_normalize(b, opts.samples, s_iso, opts.vr.volume);
    const Body iso_body = apply_map(iso, b);
    if (n_dirs <= 0) n_dirs = 10000;
    const BobkovReport chk = bobkov_check(iso_body, n_dirs, s_chk);
    rep.rows.push_back(TrialRow{"bobkov-inner", b.dim(), 0, opts.seed, chk.inner.max_violation,
                                0.0, chk.inner.violations ? "violated" : "ok"});
    rep.rows.push_back(TrialRow{"bobkov-outer", b.dim(), 1, opts.seed, chk.outer.max_violation,
                                0.0, chk.outer.violations ? "violated" : "ok"});
    rep.aggregates["whiteness_error"] = iso.whiteness_error;
    rep.aggregates["l_constant"] = iso.l_constant;
    rep.violations = chk.inner.violations + chk.outer.violations;
    return rep;
}

/// Pointwise two-sided sandwich check for a unitary-invariant ball.
inline ExperimentReport sandwich_experiment(const SymmetricGauge& tau, int d, long n_dirs,
                                            const ExperimentOptions& opts) {
    ExperimentReport rep;
    rep.name = "sandwich-check";
    rep.config = json{{"seed", opts.seed}, {"tau", tau.describe()}, {"d", d},
                      {"samples", n_dirs}};
    if (n_dirs <= 0) n_dirs = 10000;
    RngStream rng(opts.seed, 0);
    const SandwichReport chk = schatten_sandwich_check(tau, d, n_dirs, rng);
    rep.rows.push_back(TrialRow{"sandwich-left", d * d, 0, opts.seed, chk.left.max_violation, 0.0,
                                chk.left.violations ? "violated" : "ok"});
    rep.rows.push_back(TrialRow{"sandwich-right", d * d, 1, opts.seed, chk.right.max_violation,
                                0.0, chk.right.violations ? "violated" : "ok"});
    rep.aggregates["tau_u"] = tau.tau_u(d);
    rep.violations = chk.left.violations + chk.right.violations;
    return rep;
}

}  // namespace volr
