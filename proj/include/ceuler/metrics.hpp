#pragma once

#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ceuler/grid.hpp"

namespace ceuler {

/// e(W) = |W - w|_L1 / |w|_L1 with the node-mean norm; the 1/M factors
/// cancel in the ratio.
inline double l1_relative_error(const std::vector<double>& W, const std::vector<double>& w) {
    if (W.size() != w.size())
        throw std::invalid_argument("l1_relative_error: length mismatch");
    double num = 0.0, den = 0.0;
    for (size_t j = 0; j < w.size(); ++j) {
        num += std::abs(W[j] - w[j]);
        den += std::abs(w[j]);
    }
    if (den == 0.0)
        throw std::invalid_argument("l1_relative_error: zero-norm reference");
    return num / den;
}

inline double total_variation(const std::vector<double>& v) {
    double tv = 0.0;
    for (size_t j = 0; j + 1 < v.size(); ++j) tv += std::abs(v[j + 1] - v[j]);
    return tv;
}

/// g(W) = |TV(W) - TV(w)| / TV(w)
inline double tv_relative_error(const std::vector<double>& W, const std::vector<double>& w) {
    if (W.size() != w.size())
        throw std::invalid_argument("tv_relative_error: length mismatch");
    const double tw = total_variation(w);
    if (tw == 0.0)
        throw std::invalid_argument("tv_relative_error: constant reference field");
    return std::abs(total_variation(W) - tw) / tw;
}

// ---------------------------------------------------------------------------
// Per-run accounting
// ---------------------------------------------------------------------------

struct StepRecord {
    double time;
    double max_lambda;  // max |q/rho| + sqrt(eps p0') over nodes at step start
    double max_rho;
    double mass;
};

struct RunLog {
    double dt = 0.0;
    double dx = 0.0;
    std::vector<StepRecord> steps;
    // latched once boundary-adjacent nodes start moving; lambda maxima
    // recorded after that are excluded from the Courant measurement
    long boundary_quiet_steps = -1;
};

/// (max lambda, max lambda * dt / dx) over the steps recorded before the
/// waves reached the boundary.
inline std::pair<double, double> courant_number(const RunLog& log) {
    if (log.steps.empty())
        throw std::invalid_argument("courant_number: empty run log");
    const size_t n = log.boundary_quiet_steps >= 0
                         ? std::min(log.steps.size(), static_cast<size_t>(log.boundary_quiet_steps))
                         : log.steps.size();
    double ml = 0.0;
    for (size_t i = 0; i < std::max<size_t>(n, 1); ++i)
        ml = std::max(ml, log.steps[i].max_lambda);
    return {ml, ml * log.dt / log.dx};
}

struct ErrorReport {
    std::string test_case;
    std::string scheme;
    double epsilon = 0.0;
    double dx = 0.0;
    double dt = 0.0;
    double t = 0.0;
    double e_l1 = std::nan("");
    double g_tv = std::nan("");
    double max_lambda = 0.0;
    double courant = 0.0;
    double mass_drift = 0.0;
    double max_rho = 0.0;
};

inline std::string error_report_header() {
    return "case,scheme,epsilon,dx,dt,t,e_l1,g_tv,max_lambda,courant,mass_drift,max_rho";
}

inline void write_csv_row(std::ostream& os, const ErrorReport& r) {
    os << r.test_case << ',' << r.scheme << ',';
    write_value(os, r.epsilon);
    os << ',';
    write_value(os, r.dx);
    os << ',';
    write_value(os, r.dt);
    os << ',';
    write_value(os, r.t);
    os << ',';
    write_value(os, r.e_l1);
    os << ',';
    write_value(os, r.g_tv);
    os << ',';
    write_value(os, r.max_lambda);
    os << ',';
    write_value(os, r.courant);
    os << ',';
    write_value(os, r.mass_drift);
    os << ',';
    write_value(os, r.max_rho);
    os << '\n';
}

}  // namespace ceuler
