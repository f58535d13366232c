#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <sstream>

#include "volr/sampling.hpp"
#include "volr/volume.hpp"

using namespace volr;

namespace {
Body cross_polytope(int n) { return Body::vpolytope(Matrix::Identity(n, n)); }
Body binf(int n) { return Body::lp_ball(std::numeric_limits<double>::infinity(), n); }
}  // namespace

TEST_CASE("hit-and-run second moment on the disk") {
    RngStream rng(1, 0);
    const Body b2 = Body::lp_ball(2.0, 2);
    SampleBatch batch = uniform_samples(b2, 40000, rng);
    for (int i = 0; i < 2; ++i) {
        const double m2 = batch.points.row(i).array().square().mean();
        CHECK(m2 == Catch::Approx(0.25).margin(0.01));  // 1/(n+2)
    }
}

TEST_CASE("hit-and-run stays inside the body") {
    RngStream rng(2, 0);
    SampleBatch batch = uniform_samples(binf(3), 2000, rng);
    CHECK(batch.points.cwiseAbs().maxCoeff() <= 1.0 + 1e-12);

    RngStream rng2(3, 0);
    SampleBatch cross = uniform_samples(cross_polytope(2), 30000, rng2);
    CHECK(std::abs(cross.points.row(0).mean()) < 0.01);
    CHECK(std::abs(cross.points.row(1).mean()) < 0.01);
    for (Eigen::Index c = 0; c < cross.points.cols(); ++c)
        CHECK(cross.points.col(c).cwiseAbs().sum() <= 1.0 + 1e-9);
}

TEST_CASE("hit-and-run matches the rejection oracle at small n") {
    // Covariance agreement between the chain and the independent sampler.
    const Body body = Body::lp_ball(1.0, 3);
    RngStream r1(10, 1), r2(10, 2);
    SampleBatch hr = uniform_samples(body, 30000, r1);
    SampleBatch rj = rejection_samples(body, 30000, r2);
    Matrix c_hr = hr.points * hr.points.transpose() / 30000.0;
    Matrix c_rj = rj.points * rj.points.transpose() / 30000.0;
    CHECK((c_hr - c_rj).norm() / c_rj.norm() < 0.05);
}

TEST_CASE("hit-and-run ball covariance is I/(n+2)") {
    for (int n : {2, 4, 6}) {
        RngStream rng(20 + n, 0);
        SampleBatch batch = uniform_samples(Body::lp_ball(2.0, n), 50000, rng);
        Matrix c = batch.points * batch.points.transpose() / 50000.0;
        Matrix target = Matrix::Identity(n, n) / (n + 2.0);
        CHECK((c - target).norm() / target.norm() < 0.05);
    }
}

TEST_CASE("analytic volumes") {
    CHECK(log_volume_analytic(Body::lp_ball(1.0, 2)).log_volume ==
          Catch::Approx(std::log(2.0)).margin(1e-12));
    CHECK(log_volume_analytic(Body::lp_ball(2.0, 3)).log_volume ==
          Catch::Approx(std::log(4.0 * M_PI / 3.0)).margin(1e-12));
    CHECK(log_volume_analytic(binf(4)).log_volume == Catch::Approx(4 * std::log(2.0)));

    // V-polytope route agrees with the lp route on the cross-polytope.
    CHECK(log_volume_analytic(cross_polytope(4)).log_volume ==
          Catch::Approx(log_volume_analytic(Body::lp_ball(1.0, 4)).log_volume).margin(1e-12));

    // +-pair generator sets reduce to the linear cross-polytope.
    Matrix gens(2, 4);
    gens.col(0) << 2, 0;
    gens.col(1) << 0, 1;
    gens.col(2) << -2, 0;
    gens.col(3) << 0, -1;
    CHECK(log_volume_analytic(Body::vpolytope(gens)).log_volume ==
          Catch::Approx(std::log(4.0)).margin(1e-12));  // 2^2 * det / 2!

    // Images add log|det|.
    Matrix m(2, 2);
    m << 3, 1, 0, 2;
    CHECK(log_volume_analytic(Body::linear_image(m, Body::lp_ball(2.0, 2))).log_volume ==
          Catch::Approx(std::log(M_PI * 6.0)).margin(1e-12));

    CHECK_THROWS_AS(log_volume_analytic(Body::schatten_ball(2.0, 2)), Unsupported);
}

TEST_CASE("rejection volume of the square and the 3-cross-polytope") {
    RngStream rng(4, 0);
    VolumeEstimate sq = log_volume_rejection(binf(2), 200000, rng);
    CHECK(sq.log_volume == Catch::Approx(std::log(4.0)).margin(0.01));
    CHECK(sq.std_error < 0.01);

    RngStream rng2(5, 0);
    VolumeEstimate cp = log_volume_rejection(cross_polytope(3), 200000, rng2);
    CHECK(cp.log_volume == Catch::Approx(std::log(4.0 / 3.0)).margin(0.02));

    // Starved acceptance raises.
    RngStream rng3(6, 0);
    CHECK_THROWS_AS(log_volume_rejection(Body::lp_ball(1.0, 8), 2000, rng3),
                    DegenerateAcceptance);
}

TEST_CASE("lp ball formula against the rejection sampler") {
    RngStream rng(7, 0);
    const Body b3 = Body::lp_ball(3.0, 4);
    VolumeEstimate mc = log_volume_rejection(b3, 100000, rng);
    const double exact = log_lp_ball_volume(3.0, 4);
    CHECK(std::abs(mc.log_volume - exact) < 2.0 * mc.std_error + 1e-6);
}

TEST_CASE("annealed volume") {
    RngStream rng(8, 0);
    VolumeEstimate b24 = log_volume_annealed(Body::lp_ball(2.0, 4), 4000, rng);
    CHECK(std::abs(b24.log_volume - std::log(M_PI * M_PI / 2.0)) < 3.0 * b24.std_error + 0.01);

    // inner == outer collapses to a single rejection phase.
    RngStream rng2(9, 0);
    VolumeEstimate ball = log_volume_annealed(Body::lp_ball(2.0, 3), 4000, rng2);
    CHECK(ball.std_error == Catch::Approx(0.0).margin(1e-12));
    CHECK(ball.log_volume == Catch::Approx(log_unit_ball_volume(3)).margin(1e-9));

    // Schatten-infinity at d=2 against the rejection oracle.
    const Body sinf = Body::schatten_ball(std::numeric_limits<double>::infinity(), 2);
    RngStream rng3(10, 0);
    VolumeEstimate ann = log_volume_annealed(sinf, 4000, rng3);
    RngStream rng4(11, 0);
    VolumeEstimate rej = log_volume_rejection(sinf, 200000, rng4);
    const double combined = std::hypot(ann.std_error, rej.std_error);
    CHECK(std::abs(ann.log_volume - rej.log_volume) < 3.0 * combined + 0.01);
    // Window frozen from the rejection oracle: |S_inf^2|^{1/4} = 1.60.
    const double quarter_root = std::exp(ann.log_volume / 4.0);
    CHECK(quarter_root >= 1.5);
    CHECK(quarter_root <= 1.7);
}

TEST_CASE("annealed and rejection estimators agree on a bp ball") {
    const Body b = Body::lp_ball(3.0, 5);
    RngStream r1(21, 0), r2(22, 0);
    VolumeEstimate ann = log_volume_annealed(b, 3000, r1);
    VolumeEstimate rej = log_volume_rejection(b, 100000, r2);
    const double combined = std::hypot(ann.std_error, rej.std_error);
    CHECK(std::abs(ann.log_volume - rej.log_volume) < 3.0 * combined + 0.01);
}

TEST_CASE("nth root ratios") {
    const Body a = Body::lp_ball(2.0, 2);
    VolumeEstimate va = log_volume_analytic(a);
    CHECK(vr_nthroot_ratio(a, a, va, va).value == Catch::Approx(1.0));

    const Body twice = Body::linear_image(2.0 * Matrix::Identity(2, 2), a);
    CHECK(vr_nthroot_ratio(twice, a, log_volume_analytic(twice), va).value ==
          Catch::Approx(2.0));

    CHECK(vr_nthroot_ratio(binf(2), a, log_volume_analytic(binf(2)), va).value ==
          Catch::Approx(std::sqrt(4.0 / M_PI)).epsilon(1e-12));

    CHECK_THROWS_AS(vr_nthroot_ratio(a, Body::lp_ball(2.0, 3), va, va), DimensionMismatch);
}

TEST_CASE("santalo products") {
    RngStream rng(12, 0);
    Estimate disk = santalo_product(Body::lp_ball(2.0, 2), rng);
    CHECK(disk.value == Catch::Approx(2.0 * M_PI).margin(1e-9));

    RngStream rng2(13, 0);
    Estimate pair = santalo_product(Body::lp_ball(1.0, 2), rng2);
    CHECK(pair.value == Catch::Approx(4.0 * std::sqrt(2.0)).margin(1e-9));

    // Invariance under a volume-preserving map (analytic on both sides).
    Matrix m(2, 2);
    m << 2.0, 0.4, 0.0, 0.5;  // det = 1
    RngStream rng3(14, 0);
    Estimate image = santalo_product(Body::linear_image(m, Body::lp_ball(2.0, 2)), rng3);
    CHECK(image.value ==
          Catch::Approx(disk.value).margin(2.0 * (disk.std_error + image.std_error) + 1e-9));
}

TEST_CASE("isotropic constant of the cube") {
    // Unit-volume cube: L = 1/sqrt(12).
    const Body cube = Body::linear_image(0.5 * Matrix::Identity(3, 3), binf(3));
    RngStream rng(15, 0);
    IsotropicReport rep = isotropic_normalize(cube, 30000, rng);
    CHECK(rep.l_constant == Catch::Approx(1.0 / std::sqrt(12.0)).epsilon(0.02));
    CHECK(rep.whiteness_error < 0.05);
    // The map of an already isotropic-shape body is a near-multiple of identity.
    const double diag = rep.map(0, 0);
    CHECK((rep.map - diag * Matrix::Identity(3, 3)).norm() <
          0.05 * std::abs(diag) * std::sqrt(3.0));
}

TEST_CASE("isotropic constant of the disk against the moment oracle") {
    // Direct oracle: sample the unit disk, read off E x1^2; the volume-one
    // disk then has L = sqrt(E x1^2) / sqrt(pi).
    RngStream oracle_rng(16, 0);
    SampleBatch pts = rejection_samples(Body::lp_ball(2.0, 2), 200000, oracle_rng);
    const double m2 = pts.points.row(0).array().square().mean();
    const double oracle_l = std::sqrt(m2) / std::sqrt(M_PI);
    CHECK(oracle_l == Catch::Approx(0.5 / std::sqrt(M_PI)).epsilon(0.01));

    RngStream rng(17, 0);
    IsotropicReport rep = isotropic_normalize(Body::lp_ball(2.0, 2), 30000, rng);
    CHECK(rep.l_constant == Catch::Approx(oracle_l).epsilon(0.02));
}

TEST_CASE("isotropic constant is affine invariant") {
    const Body base = Body::lp_ball(1.0, 3);
    Matrix m(3, 3);
    m << 1.5, 0.2, 0.0, 0.1, 0.8, 0.0, 0.3, -0.2, 1.1;
    const Body image = Body::linear_image(m, base);
    RngStream r1(18, 0), r2(19, 0);
    IsotropicReport a = isotropic_normalize(base, 30000, r1);
    IsotropicReport b = isotropic_normalize(image, 30000, r2);
    CHECK(b.l_constant == Catch::Approx(a.l_constant).epsilon(0.03));
}

TEST_CASE("sample batch csv export") {
    RngStream rng(20, 0);
    SampleBatch batch = uniform_samples(Body::lp_ball(2.0, 2), 3, rng);
    std::ostringstream os;
    write_csv(batch, os);
    const std::string text = os.str();
    CHECK(text.rfind("x0,x1\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 4);  // header + 3 points
}
