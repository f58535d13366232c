#pragma once

#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "volr/body_io.hpp"
#include "volr/constructions.hpp"

namespace volr {

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

inline double parse_exponent(const std::string& s) {
    if (s == "inf") return std::numeric_limits<double>::infinity();
    return std::stod(s);
}

}  // namespace detail

/// Compact body presets for scripting:
///   b1:n  b2:n  binf:n  bp:p:n  schatten:p:d  kyfan:k:d  gluskin:n:m:seed
/// Anything starting with '{' is parsed as a JSON body descriptor.
inline Body parse_body(const std::string& spec) {
    if (!spec.empty() && spec.front() == '{') return body_from_json(json::parse(spec));
    const auto parts = detail::split(spec, ':');
    const std::string& head = parts[0];
    try {
        if (head == "b1" && parts.size() == 2) return Body::lp_ball(1.0, std::stoi(parts[1]));
        if (head == "b2" && parts.size() == 2) return Body::lp_ball(2.0, std::stoi(parts[1]));
        if (head == "binf" && parts.size() == 2)
            return Body::lp_ball(std::numeric_limits<double>::infinity(), std::stoi(parts[1]));
        if (head == "bp" && parts.size() == 3)
            return Body::lp_ball(detail::parse_exponent(parts[1]), std::stoi(parts[2]));
        if (head == "schatten" && parts.size() == 3)
            return Body::schatten_ball(detail::parse_exponent(parts[1]), std::stoi(parts[2]));
        if (head == "kyfan" && parts.size() == 3)
            return Body::sym_gauge_ball(SymmetricGauge::ky_fan(std::stoi(parts[1])),
                                        std::stoi(parts[2]));
        if (head == "gluskin" && parts.size() == 4) {
            RngStream rng(static_cast<std::uint64_t>(std::stoull(parts[3])), 0);
            return gluskin_polytope(std::stoi(parts[1]), std::stoi(parts[2]), rng);
        }
    } catch (const std::invalid_argument&) {
        throw std::invalid_argument("unknown preset '" + spec + "'");
    }
    throw std::invalid_argument("unknown preset '" + spec + "'");
}

/// Dimension-parameterized preset family, e.g. "b2" -> n -> b2:n.
/// For schatten/kyfan families the parameter is the matrix side d.
inline std::function<Body(int)> parse_body_family(const std::string& spec) {
    const auto parts = detail::split(spec, ':');
    const std::string head = parts[0];
    if (head == "b1" && parts.size() == 1)
        return [](int n) { return Body::lp_ball(1.0, n); };
    if (head == "b2" && parts.size() == 1)
        return [](int n) { return Body::lp_ball(2.0, n); };
    if (head == "binf" && parts.size() == 1)
        return [](int n) { return Body::lp_ball(std::numeric_limits<double>::infinity(), n); };
    if (head == "bp" && parts.size() == 2) {
        const double p = detail::parse_exponent(parts[1]);
        return [p](int n) { return Body::lp_ball(p, n); };
    }
    if (head == "schatten" && parts.size() == 2) {
        const double p = detail::parse_exponent(parts[1]);
        return [p](int d) { return Body::schatten_ball(p, d); };
    }
    if (head == "kyfan" && parts.size() == 2) {
        const int k = std::stoi(parts[1]);
        return [k](int d) { return Body::sym_gauge_ball(SymmetricGauge::ky_fan(k), d); };
    }
    // A fixed-dimension preset also works as a constant family.
    Body fixed = parse_body(spec);
    return [fixed](int n) {
        require_dim(fixed.dim(), n, "body family");
        return fixed;
    };
}

/// "3,4,5" or "3..7".
inline std::vector<int> parse_dims(const std::string& spec) {
    std::vector<int> dims;
    const auto range = spec.find("..");
    if (range != std::string::npos) {
        const int lo = std::stoi(spec.substr(0, range));
        const int hi = std::stoi(spec.substr(range + 2));
        if (hi < lo) throw std::invalid_argument("bad dims range '" + spec + "'");
        for (int n = lo; n <= hi; ++n) dims.push_back(n);
        return dims;
    }
    for (const std::string& tok : detail::split(spec, ','))
        if (!tok.empty()) dims.push_back(std::stoi(tok));
    if (dims.empty()) throw std::invalid_argument("empty dims list");
    return dims;
}

}  // namespace volr
