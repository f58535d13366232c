#pragma once

#include <cmath>
#include <ostream>

#include "volr/bodies.hpp"
#include "volr/rng.hpp"

namespace volr {

struct ChainParams {
    long burn_in;
    int thinning;
};

inline ChainParams default_chain(int n) { return {10L * n * n, n}; }

struct SampleBatch {
    Matrix points;  // dim x N, one point per column
    Body body;
    ChainParams chain;
    std::uint64_t seed;
    std::uint64_t stream_id;
};

/// Hit-and-run chain over a symmetric body, started at the origin.
class HitAndRunChain {
public:
    HitAndRunChain(const Body& body, RngStream& rng)
        : body_(body), rng_(rng), x_(Vector::Zero(body.dim())) {}

    void step() {
        for (int attempt = 0; attempt < 8; ++attempt) {
            Vector dir = sample_sphere(body_.dim(), rng_);
            try {
                auto [lo, hi] = body_.chord(x_, dir);
                const double t = lo + rng_.next_double() * (hi - lo);
                x_ += t * dir;
                return;
            } catch (const NotInterior&) {
                x_ *= 1.0 - 1e-9;  // numeric drift onto the boundary
            }
        }
        throw NotInterior("hit-and-run: cannot recover an interior point");
    }

    const Vector& state() const { return x_; }

private:
    const Body& body_;
    RngStream& rng_;
    Vector x_;
};

/// N approximately uniform points via hit-and-run (burn-in 10n^2,
/// thinning n unless overridden).
inline SampleBatch uniform_samples(const Body& body, long n_points, RngStream& rng,
                                   ChainParams chain = {-1, -1}) {
    if (n_points < 1) throw std::invalid_argument("uniform_samples: need n_points >= 1");
    if (chain.burn_in < 0) chain = default_chain(body.dim());
    HitAndRunChain hr(body, rng);
    for (long i = 0; i < chain.burn_in; ++i) hr.step();
    Matrix pts(body.dim(), n_points);
    for (long k = 0; k < n_points; ++k) {
        for (int s = 0; s < chain.thinning; ++s) hr.step();
        pts.col(k) = hr.state();
    }
    return SampleBatch{std::move(pts), body, chain, rng.seed(), rng.stream_id()};
}

/// Independent uniform points by rejection from the bounding ball.
/// Exact sampler; practical only while the acceptance rate is decent
/// (the oracle role is n <= 4).
inline SampleBatch rejection_samples(const Body& body, long n_points, RngStream& rng,
                                     long max_draws = 0) {
    const int n = body.dim();
    const double r = body.outer_radius();
    if (max_draws <= 0) max_draws = 200000L * n_points;
    Matrix pts(n, n_points);
    long accepted = 0;
    for (long draws = 0; draws < max_draws && accepted < n_points; ++draws) {
        Vector x = sample_sphere(n, rng);
        x *= r * std::pow(rng.next_double(), 1.0 / n);
        if (body.gauge(x) <= 1.0) pts.col(accepted++) = x;
    }
    if (accepted < n_points)
        throw DegenerateAcceptance("rejection_samples: acceptance rate too low");
    return SampleBatch{std::move(pts), body, ChainParams{0, 0}, rng.seed(), rng.stream_id()};
}

/// One point per row, bare numeric CSV with an x0,x1,... header.
inline void write_csv(const SampleBatch& batch, std::ostream& os) {
    const auto& pts = batch.points;
    for (Eigen::Index i = 0; i < pts.rows(); ++i) os << (i ? "," : "") << "x" << i;
    os << "\n";
    os.precision(17);
    for (Eigen::Index c = 0; c < pts.cols(); ++c) {
        for (Eigen::Index i = 0; i < pts.rows(); ++i) os << (i ? "," : "") << pts(i, c);
        os << "\n";
    }
}

}  // namespace volr
