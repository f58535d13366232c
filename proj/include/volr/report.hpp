#pragma once

#include <algorithm>
#include <charconv>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "volr/errors.hpp"

namespace volr {

using nlohmann::json;

/// One measurement row; the CSV column set is fixed:
/// experiment,n,trial,seed,value,stderr,flag
struct TrialRow {
    std::string experiment;
    int n = 0;
    int trial = 0;
    std::uint64_t seed = 0;
    double value = 0.0;
    double std_error = 0.0;
    std::string flag;
};

struct ExperimentReport {
    std::string name;
    json config = json::object();
    std::vector<TrialRow> rows;
    json aggregates = json::object();
    std::vector<std::string> notes;  // e.g. substitution notes
    long violations = 0;             // nonzero switches the CLI exit code to 2
};

/// Shortest round-trip decimal form, identical on every run.
inline std::string format_double(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline void write_csv(const ExperimentReport& rep, std::ostream& os) {
    os << "experiment,n,trial,seed,value,stderr,flag\n";
    for (const TrialRow& r : rep.rows) {
        os << r.experiment << ',' << r.n << ',' << r.trial << ',' << r.seed << ','
           << format_double(r.value) << ',' << format_double(r.std_error) << ',' << r.flag
           << '\n';
    }
}

inline json report_to_json(const ExperimentReport& rep) {
    json rows = json::array();
    for (const TrialRow& r : rep.rows) {
        rows.push_back(json{{"experiment", r.experiment},
                            {"n", r.n},
                            {"trial", r.trial},
                            {"seed", r.seed},
                            {"value", r.value},
                            {"stderr", r.std_error},
                            {"flag", r.flag}});
    }
    return json{{"experiment", rep.name}, {"config", rep.config},       {"rows", rows},
                {"aggregates", rep.aggregates}, {"notes", rep.notes},   {"violations", rep.violations}};
}

inline void write_json(const ExperimentReport& rep, std::ostream& os) {
    os << report_to_json(rep).dump(2) << '\n';
}

inline double median_of(std::vector<double> v) {
    if (v.empty()) throw std::invalid_argument("median_of: empty");
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

inline double quantile_of(std::vector<double> v, double q) {
    if (v.empty()) throw std::invalid_argument("quantile_of: empty");
    std::sort(v.begin(), v.end());
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = static_cast<std::size_t>(std::ceil(pos));
    const double w = pos - static_cast<double>(lo);
    return (1.0 - w) * v[lo] + w * v[hi];
}

struct PowerFit {
    double exponent = 0.0;  // slope of log(y) against log(n)
    double constant = 0.0;  // exp(intercept)
};

/// Least squares of log y on log n.
inline PowerFit fit_power_law(const std::vector<double>& ns, const std::vector<double>& ys) {
    if (ns.size() != ys.size() || ns.size() < 2)
        throw std::invalid_argument("fit_power_law: need >= 2 points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double m = static_cast<double>(ns.size());
    for (std::size_t i = 0; i < ns.size(); ++i) {
        const double x = std::log(ns[i]);
        const double y = std::log(ys[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double denom = m * sxx - sx * sx;
    PowerFit fit;
    fit.exponent = (m * sxy - sx * sy) / denom;
    fit.constant = std::exp((sy - fit.exponent * sx) / m);
    return fit;
}

}  // namespace volr
