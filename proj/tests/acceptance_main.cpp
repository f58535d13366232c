// Acceptance suite: runs the six release criteria end to end and prints
// one pass/fail line per criterion. Exit code 0 iff every criterion that
// ran passed. Optional arguments select criterion numbers (default: all).

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "volr/volr.hpp"

namespace fs = std::filesystem;
using namespace volr;

namespace {

int worker_threads() {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(std::min(hw, 4u)) : 2;
}

struct Checker {
    bool ok = true;
    std::ostringstream log;

    void expect(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            log << "  FAIL " << what << "\n";
        }
    }
    void expect_close(double got, double want, double rel_tol, const std::string& what) {
        const bool cond = std::abs(got - want) <= rel_tol * std::abs(want);
        if (!cond) {
            ok = false;
            log << "  FAIL " << what << ": got " << got << ", want " << want << " +-"
                << rel_tol * 100 << "%\n";
        }
    }
};

Body b2(int n) { return Body::lp_ball(2.0, n); }
Body b1(int n) { return Body::lp_ball(1.0, n); }
Body binf(int n) { return Body::lp_ball(std::numeric_limits<double>::infinity(), n); }
Body cross_polytope(int n) { return Body::vpolytope(Matrix::Identity(n, n)); }

Body random_polytope(int n, int m, std::uint64_t seed) {
    RngStream rng(seed, 0);
    Matrix gens(n, m);
    for (int j = 0; j < m; ++j) gens.col(j) = sample_sphere(n, rng);
    gens.leftCols(n) += 0.3 * Matrix::Identity(n, n);
    return Body::vpolytope(gens);
}

Body gluskin_polytope_fixture() {
    RngStream rng(409, 0);
    return gluskin_polytope(3, 6, rng);
}

// ---------------------------------------------------------------- 1 ----

bool criterion1(std::ostream& os) {
    Checker c;

    {
        RngStream rng(101, 0);
        const VrEstimate e = vr_estimate(b2(2), b1(2), {}, rng);
        c.expect_close(e.value, std::sqrt(M_PI / 2.0), 0.01, "vr(b2:2, b1:2)");
    }
    {
        RngStream rng(102, 0);
        const VrEstimate e = vr_estimate(binf(2), b2(2), {}, rng);
        c.expect_close(e.value, std::sqrt(4.0 / M_PI), 0.03, "vr(binf:2, approximated b2:2)");
    }
    {
        const Body l = random_polytope(3, 8, 103);
        RngStream rng(104, 0);
        RngStream s_vol = rng.substream(1);
        const VolumeEstimate vol = log_volume_auto(l, s_vol);
        const VrSolveResult res = maxdet_inclusion(l, l, {}, rng, &vol, &vol);
        c.expect(std::abs(res.vr_upper - 1.0) <= 1e-6, "vr(K, K) = 1 within 1e-6");
    }

    // Solver against the small-dimension global oracle.
    struct Pair {
        Body k;
        Body l;
        const char* name;
    };
    const std::vector<Pair> zoo = {
        {b2(2), cross_polytope(2), "disk/cross2"},
        {binf(2), cross_polytope(2), "square/cross2"},
        {b1(2), random_polytope(2, 6, 105), "b1/poly2"},
        {b2(3), cross_polytope(3), "ball/cross3"},
        {binf(3), cross_polytope(3), "cube/cross3"},
        {b2(3), random_polytope(3, 8, 106), "ball/poly3"},
        {binf(3), random_polytope(3, 8, 107), "cube/poly3"},
    };
    for (const Pair& pr : zoo) {
        RngStream rng(108, 0);
        RngStream s_vk = rng.substream(1), s_vl = rng.substream(2);
        const VolumeEstimate vk = log_volume_auto(pr.k, s_vk);
        const VolumeEstimate vl = log_volume_auto(pr.l, s_vl);
        RngStream s_o = rng.substream(3), s_s = rng.substream(4);
        const double oracle = vr_grid_oracle(pr.k, pr.l, s_o, &vk, &vl);
        const VrSolveResult solve = maxdet_inclusion(pr.k, pr.l, {}, s_s, &vk, &vl);
        const double rel = std::abs(solve.vr_upper - oracle) / oracle;
        c.expect(rel <= 0.05, std::string("solver-vs-oracle on ") + pr.name + " (rel " +
                                  std::to_string(rel) + ")");
    }

    os << c.log.str();
    return c.ok;
}

// ---------------------------------------------------------------- 2 ----

bool criterion2(std::ostream& os) {
    Checker c;

    // Gluskin sandwich B_1 in L^(m) in B_2, pointwise at 1e-9.
    for (int n : {3, 5, 7}) {
        for (int seed = 0; seed < 3; ++seed) {
            RngStream rng(201, detail::trial_stream_id(n, seed));
            RngStream s_body = rng.substream(1), s_probe = rng.substream(2);
            const Body l = gluskin_polytope(n, 2 * n, s_body);
            long viol = 0;
            for (int t = 0; t < 1000; ++t) {
                const Vector x = sample_gaussian_vector(n, s_probe);
                const double g = l.gauge(x);
                if (g > x.cwiseAbs().sum() + 1e-9) ++viol;
                if (x.norm() > g + 1e-9) ++viol;
            }
            c.expect(viol == 0, "gluskin sandwich n=" + std::to_string(n) + " seed " +
                                    std::to_string(seed));
        }
    }

    // DR parallelepiped contains L, every seed.
    for (int n : {3, 4, 5}) {
        RngStream s_iso(202, static_cast<std::uint64_t>(n));
        const IsotropicReport iso = isotropic_normalize(b2(n).polar(), 8000, s_iso);
        const Body l_arg = apply_map(iso, b2(n).polar()).polar();
        for (int seed = 0; seed < 5; ++seed) {
            RngStream rng(203, detail::trial_stream_id(n, seed));
            const DrParallelepiped dr = dr_parallelepiped(l_arg, rng);
            c.expect(dr.max_violation <= 1e-9, "dr inclusion n=" + std::to_string(n) +
                                                   " seed " + std::to_string(seed));
        }
    }

    // Schatten sandwich for lp and Ky Fan gauges, d in {2, 3}.
    for (int d : {2, 3}) {
        std::vector<SymmetricGauge> taus = {
            SymmetricGauge::lp(1.0), SymmetricGauge::lp(2.0),
            SymmetricGauge::lp(std::numeric_limits<double>::infinity()),
            SymmetricGauge::ky_fan(2)};
        for (const SymmetricGauge& tau : taus) {
            const std::uint64_t tau_tag =
                tau.kind == SymmetricGauge::Kind::KyFan
                    ? 1000u + static_cast<std::uint64_t>(tau.k)
                    : (std::isinf(tau.p) ? 777u : static_cast<std::uint64_t>(tau.p * 10));
            RngStream rng(204, static_cast<std::uint64_t>(d * 10000) + tau_tag);
            const SandwichReport rep = schatten_sandwich_check(tau, d, 10000, rng);
            c.expect(rep.ok(), "schatten sandwich tau=" + tau.describe() + " d=" +
                                   std::to_string(d) + " (max viol " +
                                   std::to_string(std::max(rep.left.max_violation,
                                                           rep.right.max_violation)) +
                                   ")");
        }
    }

    // Bobkov inclusions for isotropic lp balls, n <= 6.
    for (double p : {1.0, 2.0, std::numeric_limits<double>::infinity()}) {
        for (int n : {4, 6}) {
            RngStream rng(205, static_cast<std::uint64_t>(n * 1000 +
                                                          (std::isinf(p) ? 999 : p * 10)));
            RngStream s_iso = rng.substream(1), s_chk = rng.substream(2);
            const Body ball = Body::lp_ball(p, n);
            const IsotropicReport iso = isotropic_normalize(ball, 0, s_iso);
            const BobkovReport rep = bobkov_check(apply_map(iso, ball), 10000, s_chk);
            std::ostringstream name;
            name << "bobkov p=" << p << " n=" << n << " (viol inner "
                 << rep.inner.max_violation << ", outer " << rep.outer.max_violation << ")";
            c.expect(rep.ok(), name.str());
        }
    }

    os << c.log.str();
    return c.ok;
}

// ---------------------------------------------------------------- 3 ----

bool criterion3(std::ostream& os) {
    Checker c;
    ExperimentOptions opts;
    opts.seed = 301;
    opts.threads = worker_threads();

    for (const char* fam : {"b2", "binf"}) {
        const ExperimentReport rep = lvr_gluskin_experiment(fam, 2.0, {3, 4, 5, 6, 7}, 50, opts);
        const double expo = rep.aggregates["fit"]["exponent"].get<double>();
        std::ostringstream name;
        name << "gluskin lower exponent for " << fam << " = " << expo << " in [0.35, 0.65]";
        c.expect(expo >= 0.35 && expo <= 0.65, name.str());
    }

    {
        const ExperimentReport rep = dr_experiment("b2", {4, 5, 6, 7, 8}, 20, opts);
        c.expect(rep.violations == 0, "dr inclusion violations = 0");
        for (int n : {4, 5, 6, 7, 8}) {
            const auto& entry = rep.aggregates["per_n"][std::to_string(n)];
            const double median = entry["median_ratio"].get<double>();
            const double bound = entry["bound_3sqrt_n_over_l"].get<double>();
            std::ostringstream name;
            name << "dr median ratio " << median << " <= " << bound << " at n=" << n;
            c.expect(median <= bound, name.str());
        }
    }

    {
        const ExperimentReport rep = det_bound_experiment({5}, 1000, opts);
        const double frac = rep.aggregates["per_n"]["5"]["fraction_above"].get<double>();
        std::ostringstream name;
        name << "gaussian det fraction above 0.1 sqrt(n) = " << frac << " >= 0.95";
        c.expect(frac >= 0.95, name.str());
    }

    for (int d : {2, 3}) {
        const ExperimentReport rep = schatten_lvr_experiment(
            SymmetricGauge::lp(std::numeric_limits<double>::infinity()), d, 10, opts);
        const double upper = rep.aggregates["upper_median_ratio"].get<double>();
        const double lower = rep.aggregates["lower_median_vr"].get<double>();
        std::ostringstream name;
        name << "schatten d=" << d << ": upper median " << upper << " <= " << 10.0 * d
             << ", lower median " << lower << " >= " << 0.3 * d << ", violations "
             << rep.violations;
        c.expect(upper <= 10.0 * d && lower >= 0.3 * d && rep.violations == 0, name.str());
    }

    os << c.log.str();
    return c.ok;
}

// ---------------------------------------------------------------- 4 ----

bool criterion4(std::ostream& os) {
    Checker c;

    {
        RngStream rng(401, 0);
        const Estimate ell = ell_norm(b2(2), 1000000, rng);
        c.expect_close(ell.value, std::sqrt(M_PI / 2.0), 0.005, "ell(b2:2)");
    }

    for (int n : {2, 4, 6}) {
        RngStream rng(402, static_cast<std::uint64_t>(n));
        SampleBatch batch = uniform_samples(b2(n), 100000, rng);
        Matrix cov = batch.points * batch.points.transpose() / 100000.0;
        Matrix target = Matrix::Identity(n, n) / (n + 2.0);
        const double rel = (cov - target).norm() / target.norm();
        c.expect(rel <= 0.05, "hit-and-run ball covariance n=" + std::to_string(n) +
                                  " (rel " + std::to_string(rel) + ")");
    }

    for (double p : {1.0, 2.0, 3.0, std::numeric_limits<double>::infinity()}) {
        for (int n : {2, 4, 6}) {
            RngStream rng(403, static_cast<std::uint64_t>(n * 100 +
                                                          (std::isinf(p) ? 99 : p * 10)));
            const VolumeEstimate mc = log_volume_rejection(Body::lp_ball(p, n), 200000, rng);
            const double exact = log_lp_ball_volume(p, n);
            std::ostringstream name;
            name << "lp volume p=" << p << " n=" << n << " (delta "
                 << std::abs(mc.log_volume - exact) << ", 3se " << 3 * mc.std_error << ")";
            c.expect(std::abs(mc.log_volume - exact) <= 3.0 * mc.std_error + 1e-6, name.str());
        }
    }

    {
        const Body cube = Body::linear_image(0.5 * Matrix::Identity(4, 4), binf(4));
        RngStream rng(404, 0);
        const IsotropicReport rep = isotropic_normalize(cube, 30000, rng);
        c.expect_close(rep.l_constant, 1.0 / std::sqrt(12.0), 0.02, "cube isotropic constant");
    }

    {
        // Affine invariance of the volume product, with Monte Carlo factors.
        const Body l = gluskin_polytope_fixture();
        Matrix m(3, 3);
        m << 1.2, 0.3, 0.0, 0.0, 1.0, 0.2, 0.1, 0.0, 1.0;
        m /= std::exp(log_abs_det(m).log_abs / 3.0);  // det 1
        RngStream r1(405, 1), r2(405, 2);
        const Estimate base = santalo_product(l, r1);
        const Estimate moved = santalo_product(Body::vpolytope(m * l.generators()), r2);
        const double slack = 2.0 * (base.std_error + moved.std_error);
        c.expect(std::abs(base.value - moved.value) <= slack,
                 "santalo affine invariance (delta " +
                     std::to_string(std::abs(base.value - moved.value)) + ", allowed " +
                     std::to_string(slack) + ")");

        // The ball maximizes the product across the zoo.
        RngStream rb(406, 0);
        const Estimate ball = santalo_product(b2(3), rb);
        int idx = 0;
        for (const Body& body : {b1(3), binf(3), Body::lp_ball(3.0, 3),
                                 random_polytope(3, 7, 407), l}) {
            RngStream rz(408, static_cast<std::uint64_t>(idx++));
            const Estimate z = santalo_product(body, rz);
            std::ostringstream name;
            name << "santalo(" << body.describe() << ") = " << z.value
                 << " <= ball " << ball.value;
            c.expect(z.value <= ball.value + 3.0 * (z.std_error + ball.std_error) + 1e-9,
                     name.str());
        }
    }

    os << c.log.str();
    return c.ok;
}

// ---------------------------------------------------------------- 5 ----

bool criterion5(std::ostream& os) {
    Checker c;

    {
        // Affine invariance of vr within 3%.
        const Body k = b2(2);
        const Body l = random_polytope(2, 6, 501);
        RngStream r1(502, 1), r2(502, 2), map_rng(502, 9);
        const VrEstimate base = vr_estimate(k, l, {}, r1);
        Matrix t = sample_gaussian_matrix(2, map_rng) + 2.0 * Matrix::Identity(2, 2);
        Matrix s = sample_gaussian_matrix(2, map_rng) + 2.0 * Matrix::Identity(2, 2);
        const VrEstimate moved =
            vr_estimate(Body::linear_image(t, k), Body::vpolytope(s * l.generators()), {}, r2);
        c.expect_close(moved.value, base.value, 0.03, "vr affine invariance");
    }

    {
        // Submultiplicativity with 1.05 slack.
        const Body k = b2(3);
        const Body z = cross_polytope(3);
        const Body l = random_polytope(3, 7, 503);
        RngStream r1(504, 1), r2(504, 2), r3(504, 3);
        const double kl = vr_estimate(k, l, {}, r1).value;
        const double kz = vr_estimate(k, z, {}, r2).value;
        const double zl = vr_estimate(b1(3), l, {}, r3).value;  // b1 = absconv(e_i) as target
        std::ostringstream name;
        name << "submultiplicativity " << kl << " <= " << kz * zl * 1.05;
        c.expect(kl <= kz * zl * 1.05, name.str());
    }

    {
        // Duality window [1/4, 4] at n <= 4.
        int idx = 0;
        struct Pair {
            Body k;
            Body l;
        };
        for (const Pair& pr : {Pair{b2(3), b1(3)}, Pair{binf(3), b1(3)}, Pair{b2(4), b1(4)}}) {
            RngStream r1(505, static_cast<std::uint64_t>(2 * idx));
            RngStream r2(505, static_cast<std::uint64_t>(2 * idx + 1));
            ++idx;
            const double forward = vr_estimate(pr.k, pr.l, {}, r1).value;
            const double backward = vr_estimate(pr.l.polar(), pr.k.polar(), {}, r2).value;
            const double ratio = forward / backward;
            std::ostringstream name;
            name << "duality ratio " << ratio << " in [0.25, 4]";
            c.expect(ratio >= 0.25 && ratio <= 4.0, name.str());
        }
    }

    {
        // Homogeneity of the solver: doubling K doubles the best det^{1/n},
        // equivalently the ratio against the unscaled |K| halves; the
        // re-optimized vr itself is affine invariant.
        const Body k = b2(3);
        const Body k2 = Body::linear_image(2.0 * Matrix::Identity(3, 3), k);
        const Body l = random_polytope(3, 7, 506);
        RngStream r1(507, 1), r2(507, 1), s_vol(507, 3);
        const VolumeEstimate vl = log_volume_auto(l, s_vol);
        const VolumeEstimate vk = log_volume_analytic(k);
        const VolumeEstimate vk2 = log_volume_analytic(k2);
        const VrSolveResult a = maxdet_inclusion(k, l, {}, r1, &vk, &vl);
        const VrSolveResult b = maxdet_inclusion(k2, l, {}, r2, &vk2, &vl);
        c.expect_close(std::exp(b.log_det_best / 3.0), 2.0 * std::exp(a.log_det_best / 3.0),
                       0.01, "doubling K doubles det^{1/n}");
        c.expect_close(b.vr_upper, a.vr_upper, 0.01, "re-optimized vr is scale invariant");
    }

    os << c.log.str();
    return c.ok;
}

// ---------------------------------------------------------------- 6 ----

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

bool criterion6(std::ostream& os) {
    Checker c;
    const char* bin = std::getenv("VOLR_CLI");
    if (!bin) {
        os << "  FAIL VOLR_CLI not set; cannot locate the CLI binary\n";
        return false;
    }
    const fs::path dir = fs::temp_directory_path();

    const std::vector<std::pair<std::string, std::string>> runs = {
        {"gluskin_csv", "gluskin-lower --body-k b2 --dims 2,3 --trials 4 --seed 61 --format csv"},
        {"gluskin_json",
         "gluskin-lower --body-k b2 --dims 2,3 --trials 4 --seed 61 --format json"},
        {"det", "det-bound --dims 4,5 --trials 64 --seed 62 --format csv"},
        {"vr", "vr --body-k b2:2 --body-l b1:2 --seed 63 --format json"},
    };
    for (const auto& [tag, args] : runs) {
        const fs::path f1 = dir / ("volr_acc_" + tag + "_1");
        const fs::path f2 = dir / ("volr_acc_" + tag + "_2");
        const std::string c1 =
            std::string(bin) + " " + args + " --threads 1 --out " + f1.string() + " 2>/dev/null";
        const std::string c2 =
            std::string(bin) + " " + args + " --threads 4 --out " + f2.string() + " 2>/dev/null";
        const int r1 = std::system(c1.c_str());
        const int r2 = std::system(c2.c_str());
        c.expect(r1 == 0 && r2 == 0, tag + " exit codes");
        const std::string a = slurp(f1), b = slurp(f2);
        c.expect(!a.empty() && a == b, tag + " byte-identical across 1 vs 4 threads");
        // And across repeated runs with the same flags.
        const int r3 = std::system(c2.c_str());
        c.expect(r3 == 0 && slurp(f2) == b, tag + " byte-identical across runs");
        fs::remove(f1);
        fs::remove(f2);
    }

    os << c.log.str();
    return c.ok;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<int> which;
    for (int i = 1; i < argc; ++i) which.push_back(std::atoi(argv[i]));
    if (which.empty()) which = {1, 2, 3, 4, 5, 6};

    struct Criterion {
        int id;
        const char* name;
        bool (*run)(std::ostream&);
    };
    const std::vector<Criterion> all = {
        {1, "exact geometry (closed-form vr values, oracle agreement)", criterion1},
        {2, "theorem inclusions (gluskin, DR, schatten sandwich, bobkov)", criterion2},
        {3, "scaling laws (sqrt(n) lower bound, DR ratio, det bound, schatten)", criterion3},
        {4, "estimator calibration (ell, covariance, volumes, isotropy, santalo)", criterion4},
        {5, "vr properties (invariance, submultiplicativity, duality, homogeneity)", criterion5},
        {6, "reproducibility (bit-identical CLI reports across threads)", criterion6},
    };

    int failures = 0;
    for (const Criterion& cr : all) {
        if (std::find(which.begin(), which.end(), cr.id) == which.end()) continue;
        std::ostringstream detail;
        bool ok = false;
        try {
            ok = cr.run(detail);
        } catch (const std::exception& e) {
            detail << "  FAIL exception: " << e.what() << "\n";
        }
        std::cout << (ok ? "[PASS]" : "[FAIL]") << " criterion " << cr.id << ": " << cr.name
                  << "\n"
                  << detail.str();
        std::cout.flush();
        if (!ok) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
