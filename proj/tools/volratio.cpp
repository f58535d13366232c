// volratio: numerical experiments on volume ratios of convex bodies.
//
// Subcommands run a seeded experiment and emit a CSV or JSON report.
// Exit codes: 0 success, 1 usage/config error, 2 invariant violation
// detected by the experiment (e.g. a failed inclusion check).

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "volr/volr.hpp"

namespace {

struct CommonFlags {
    std::uint64_t seed = 1;
    std::string dims = "";
    unsigned trials = 20;
    unsigned samples = 0;
    double delta = 2.0;
    std::string out = "";
    std::string format = "csv";
    int threads = 0;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool with_dims = true) {
    cmd->add_option("--seed", f.seed, "Master seed (u64)");
    if (with_dims) cmd->add_option("--dims", f.dims, "Dimensions, e.g. 3,4,5 or 3..7");
    cmd->add_option("--trials", f.trials, "Trials per dimension");
    cmd->add_option("--samples", f.samples, "Monte Carlo sample override");
    cmd->add_option("--delta", f.delta, "Generator density (m = ceil(delta*n))");
    cmd->add_option("--out", f.out, "Report path (default: stdout)");
    cmd->add_option("--format", f.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--threads", f.threads,
                    "Worker threads (default: VOLRATIO_THREADS or 1)");
}

volr::ExperimentOptions make_options(const CommonFlags& f) {
    volr::ExperimentOptions opts;
    opts.seed = f.seed;
    opts.threads = volr::resolve_thread_count(f.threads);
    opts.samples = f.samples;
    return opts;
}

int emit(const volr::ExperimentReport& rep, const CommonFlags& f) {
    std::ofstream file;
    std::ostream* os = &std::cout;
    if (!f.out.empty()) {
        file.open(f.out, std::ios::binary);
        if (!file) {
            std::cerr << "error: cannot open output path '" << f.out << "'\n";
            return 1;
        }
        os = &file;
    }
    if (f.format == "json")
        volr::write_json(rep, *os);
    else
        volr::write_csv(rep, *os);
    if (rep.violations > 0) {
        std::cerr << rep.name << ": " << rep.violations << " invariant violation(s) detected\n";
        return 2;
    }
    return 0;
}

std::vector<int> dims_or(const CommonFlags& f, const std::string& fallback) {
    return volr::parse_dims(f.dims.empty() ? fallback : f.dims);
}

// schatten:p:d / kyfan:k:d presets name a gauge and a side length.
std::pair<volr::SymmetricGauge, int> parse_tau_preset(const std::string& spec) {
    const volr::Body b = volr::parse_body(spec);
    if (b.kind() == volr::BodyKind::SchattenBall)
        return {volr::SymmetricGauge::lp(b.lp_exponent()), b.side()};
    if (b.kind() == volr::BodyKind::SymmetricGaugeBall) return {b.tau(), b.side()};
    throw std::invalid_argument("expected a schatten:p:d or kyfan:k:d preset, got '" + spec + "'");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"volume-ratio experiments on convex bodies"};
    app.require_subcommand(1);

    CommonFlags flags;
    std::string body, body_k, body_l;

    auto* gluskin = app.add_subcommand(
        "gluskin-lower", "vr(K, L^(m)) against random polytopes, medians and power fit");
    add_common(gluskin, flags);
    gluskin->add_option("--body-k", body_k, "Target body family (b1, b2, binf, bp:p)")
        ->required();

    auto* dr = app.add_subcommand("dr-parallelepiped",
                                  "Random parallelepiped around L via its isotropic polar");
    add_common(dr, flags);
    dr->add_option("--body", body, "Body family or preset")->required();

    auto* bobkov = app.add_subcommand("bobkov-check",
                                      "Cube/cross-polytope extremality for isotropic lp balls");
    add_common(bobkov, flags, false);
    bobkov->add_option("--body", body, "Unconditional lp-ball preset, e.g. b1:4")->required();

    auto* schatten = app.add_subcommand("schatten-lvr",
                                        "Two-sided scaling for unitary-invariant balls");
    add_common(schatten, flags, false);
    schatten->add_option("--body", body, "schatten:p:d or kyfan:k:d preset")->required();

    auto* chevet = app.add_subcommand("chevet-tail",
                                      "Gaussian operator-norm tail against the width bound");
    add_common(chevet, flags);
    chevet->add_option("--body-l", body_l, "Source family (default b1)");
    chevet->add_option("--body-k", body_k, "Target family (default binf)");

    auto* det = app.add_subcommand("det-bound", "|det A|^{1/n} for Gaussian A");
    add_common(det, flags);

    auto* santalo = app.add_subcommand("santalo", "n (|B||B polar|)^{1/n}");
    add_common(santalo, flags, false);
    santalo->add_option("--body", body, "Body preset")->required();

    auto* vr = app.add_subcommand("vr", "Volume ratio vr(K, L) via the max-det program");
    add_common(vr, flags, false);
    vr->add_option("--body-k", body_k, "Enclosing body preset")->required();
    vr->add_option("--body-l", body_l, "Inscribed body preset")->required();

    auto* sandwich = app.add_subcommand("sandwich-check",
                                        "Schatten sandwich for a unitary-invariant ball");
    add_common(sandwich, flags, false);
    sandwich->add_option("--body", body, "schatten:p:d or kyfan:k:d preset")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        const volr::ExperimentOptions opts = make_options(flags);
        volr::ExperimentReport rep;
        if (gluskin->parsed()) {
            rep = volr::lvr_gluskin_experiment(body_k, flags.delta, dims_or(flags, "3..6"),
                                               static_cast<int>(flags.trials), opts);
        } else if (dr->parsed()) {
            rep = volr::dr_experiment(body, dims_or(flags, "4..6"),
                                      static_cast<int>(flags.trials), opts);
        } else if (bobkov->parsed()) {
            rep = volr::bobkov_experiment(body, flags.samples ? flags.samples : 10000, opts);
        } else if (schatten->parsed()) {
            auto [tau, d] = parse_tau_preset(body);
            rep = volr::schatten_lvr_experiment(tau, d, static_cast<int>(flags.trials), opts);
        } else if (chevet->parsed()) {
            rep = volr::chevet_tail_experiment(body_l.empty() ? "b1" : body_l,
                                               body_k.empty() ? "binf" : body_k,
                                               dims_or(flags, "5,10"),
                                               static_cast<int>(flags.trials),
                                               {0.0, 1.0, 2.0}, opts);
        } else if (det->parsed()) {
            rep = volr::det_bound_experiment(dims_or(flags, "5"),
                                             static_cast<int>(flags.trials), opts);
        } else if (santalo->parsed()) {
            rep = volr::santalo_experiment(body, opts);
        } else if (vr->parsed()) {
            rep = volr::vr_experiment(body_k, body_l, opts);
        } else if (sandwich->parsed()) {
            auto [tau, d] = parse_tau_preset(body);
            rep = volr::sandwich_experiment(tau, d, flags.samples ? flags.samples : 10000, opts);
        }
        return emit(rep, flags);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
