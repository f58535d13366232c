#pragma once

#include <string>

#include <json.hpp>

#include "volr/bodies.hpp"

namespace volr {

using nlohmann::json;

namespace detail {

inline json exponent_to_json(double p) {
    if (std::isinf(p)) return json("inf");
    return json(p);
}

inline double exponent_from_json(const json& j) {
    if (j.is_string()) {
        if (j.get<std::string>() == "inf") return std::numeric_limits<double>::infinity();
        throw std::invalid_argument("body json: bad exponent string");
    }
    return j.get<double>();
}

inline json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline Matrix matrix_from_json(const json& j) {
    if (!j.is_array() || j.empty()) throw std::invalid_argument("body json: bad matrix");
    const auto rows = j.size();
    const auto cols = j[0].size();
    Matrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        if (j[i].size() != cols) throw std::invalid_argument("body json: ragged matrix");
        for (std::size_t k = 0; k < cols; ++k) m(i, k) = j[i][k].get<double>();
    }
    return m;
}

}  // namespace detail

inline json to_json(const SymmetricGauge& tau) {
    if (tau.kind == SymmetricGauge::Kind::Lp)
        return json{{"kind", "lp"}, {"p", detail::exponent_to_json(tau.p)}};
    return json{{"kind", "ky_fan"}, {"k", tau.k}};
}

inline SymmetricGauge sym_gauge_from_json(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "lp") return SymmetricGauge::lp(detail::exponent_from_json(j.at("p")));
    if (kind == "ky_fan") return SymmetricGauge::ky_fan(j.at("k").get<int>());
    throw std::invalid_argument("body json: unknown gauge kind '" + kind + "'");
}

inline json body_to_json(const Body& b) {
    switch (b.kind()) {
        case BodyKind::VPolytope: {
            json verts = json::array();
            const Matrix& g = b.generators();
            for (Eigen::Index j = 0; j < g.cols(); ++j) {
                json v = json::array();
                for (Eigen::Index i = 0; i < g.rows(); ++i) v.push_back(g(i, j));
                verts.push_back(std::move(v));
            }
            return json{{"variant", "vpolytope"}, {"vertices", std::move(verts)}};
        }
        case BodyKind::LpBall:
            return json{{"variant", "lp_ball"},
                        {"p", detail::exponent_to_json(b.lp_exponent())},
                        {"n", b.dim()}};
        case BodyKind::SchattenBall:
            return json{{"variant", "schatten"},
                        {"p", detail::exponent_to_json(b.lp_exponent())},
                        {"d", b.side()}};
        case BodyKind::SymmetricGaugeBall:
            return json{{"variant", "sym_gauge"}, {"tau", to_json(b.tau())}, {"d", b.side()}};
        case BodyKind::LinearImage:
            return json{{"variant", "linear_image"},
                        {"map", detail::matrix_to_json(b.map())},
                        {"base", body_to_json(b.base())}};
        case BodyKind::BallIntersection:
            return json{{"variant", "ball_intersection"},
                        {"radius", b.intersect_radius()},
                        {"base", body_to_json(b.base())}};
        case BodyKind::Polar:
            return json{{"variant", "polar"}, {"base", body_to_json(b.base())}};
    }
    throw Unsupported("body_to_json: unreachable");
}

inline Body body_from_json(const json& j) {
    const std::string variant = j.at("variant").get<std::string>();
    if (variant == "vpolytope") {
        const json& verts = j.at("vertices");
        if (!verts.is_array() || verts.empty())
            throw std::invalid_argument("body json: vpolytope needs vertices");
        const int n = static_cast<int>(verts[0].size());
        Matrix g(n, static_cast<Eigen::Index>(verts.size()));
        for (std::size_t c = 0; c < verts.size(); ++c) {
            if (static_cast<int>(verts[c].size()) != n)
                throw std::invalid_argument("body json: ragged vertex list");
            for (int r = 0; r < n; ++r) g(r, static_cast<Eigen::Index>(c)) = verts[c][r].get<double>();
        }
        return Body::vpolytope(std::move(g));
    }
    if (variant == "lp_ball")
        return Body::lp_ball(detail::exponent_from_json(j.at("p")), j.at("n").get<int>());
    if (variant == "schatten")
        return Body::schatten_ball(detail::exponent_from_json(j.at("p")), j.at("d").get<int>());
    if (variant == "sym_gauge")
        return Body::sym_gauge_ball(sym_gauge_from_json(j.at("tau")), j.at("d").get<int>());
    if (variant == "linear_image")
        return Body::linear_image(detail::matrix_from_json(j.at("map")),
                                  body_from_json(j.at("base")));
    if (variant == "ball_intersection")
        return Body::ball_intersection(body_from_json(j.at("base")),
                                       j.at("radius").get<double>());
    if (variant == "polar") return body_from_json(j.at("base")).polar();
    throw std::invalid_argument("body json: unknown variant '" + variant + "'");
}

}  // namespace volr
