#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "ceuler/grid.hpp"
#include "ceuler/pressure.hpp"
#include "ceuler/riemann.hpp"

namespace ceuler {

enum class CaseId { P1, P2, P3, P4, P1prime, cluster2d, custom };

inline std::string to_string(CaseId c) {
    switch (c) {
        case CaseId::P1: return "P1";
        case CaseId::P2: return "P2";
        case CaseId::P3: return "P3";
        case CaseId::P4: return "P4";
        case CaseId::P1prime: return "P1prime";
        case CaseId::cluster2d: return "cluster2d";
        case CaseId::custom: return "custom";
    }
    return "?";
}

inline CaseId parse_case(const std::string& s) {
    if (s == "P1" || s == "p1") return CaseId::P1;
    if (s == "P2" || s == "p2") return CaseId::P2;
    if (s == "P3" || s == "p3") return CaseId::P3;
    if (s == "P4" || s == "p4") return CaseId::P4;
    if (s == "P1prime" || s == "p1prime" || s == "P1'") return CaseId::P1prime;
    if (s == "cluster2d") return CaseId::cluster2d;
    if (s == "custom") return CaseId::custom;
    throw std::invalid_argument("unknown case id: " + s);
}

/// Piecewise-constant Riemann data: jump positions with the states between
/// them. A node lying exactly on a jump takes the left value.
struct PiecewiseData {
    std::vector<double> jumps;          // increasing
    std::vector<RiemannState> states;   // jumps.size() + 1 entries

    RiemannState at(double x) const {
        size_t k = 0;
        while (k < jumps.size() && x > jumps[k]) ++k;
        return states[k];
    }
};

inline PiecewiseData case_data_1d(CaseId id) {
    switch (id) {
        case CaseId::P1:
            return {{0.5}, {{0.7, 0.8, 0.0}, {0.7, -0.8, 0.0}}};
        case CaseId::P2:
            return {{0.5}, {{0.7, -0.8, 0.0}, {0.7, 0.8, 0.0}}};
        case CaseId::P3:
            return {{0.25, 0.75},
                    {{0.7, 0.8, 0.0}, {0.8, -0.3, 0.0}, {0.7, -1.2, 0.0}}};
        case CaseId::P4:
            return {{0.5}, {{0.8, 0.3, 0.0}, {0.5, 0.1, 0.0}}};
        case CaseId::P1prime:
            return {{0.5}, {{0.7, 0.08, 0.0}, {0.7, -0.08, 0.0}}};
        default:
            throw std::invalid_argument("case_data_1d: not a 1D case");
    }
}

inline GridState1D build_case_1d(CaseId id, const Grid1D& grid) {
    const PiecewiseData data = case_data_1d(id);
    GridState1D s(grid);
    for (int j = 0; j < grid.nodes(); ++j) {
        const RiemannState v = data.at(grid.x(j));
        s.rho(j) = v.rho;
        s.q(j) = v.q;
    }
    return s;
}

/// Colliding-cluster initial data: two dense rectangles moving toward each
/// other over a quiescent background. Rectangle membership is closed.
inline GridState2D build_cluster2d(const Grid2D& grid) {
    GridState2D s(grid);
    // tolerant edge test: node coordinates land on the rational box edges
    // at many resolutions only up to rounding
    auto in_box = [](double x, double y, double x0, double x1, double y0, double y1) {
        const double tol = 1e-12;
        return x >= x0 - tol && x <= x1 + tol && y >= y0 - tol && y <= y1 + tol;
    };
    for (int j = 0; j < grid.nodes_y(); ++j)
        for (int i = 0; i < grid.nodes_x(); ++i) {
            const double x = grid.x(i), y = grid.y(j);
            const bool inA = in_box(x, y, 1.0 / 6.0, 5.0 / 12.0, 1.0 / 3.0, 7.0 / 12.0);
            const bool inB = in_box(x, y, 7.0 / 12.0, 5.0 / 6.0, 5.0 / 12.0, 2.0 / 3.0);
            s.rho(i, j) = (inA || inB) ? 0.8 : 0.6;
            s.q1(i, j) = inA ? 1.0 : (inB ? -1.0 : 0.0);
            s.q2(i, j) = 0.0;
        }
    return s;
}

/// Exact-solution handle for a case: the juxtaposed limit Riemann
/// structures, or unavailable (cluster2d, custom).
struct CaseOracle {
    bool available = false;
    std::vector<double> positions;
    std::vector<WaveStructure> structures;

    /// Reference profile at time t sampled at the given positions; throws
    /// interaction_error once the constituent problems interact.
    std::pair<std::vector<double>, std::vector<double>> sample(
        const std::vector<double>& xs, double t) const {
        if (!available) throw std::logic_error("CaseOracle: no exact solution available");
        const ComposedRiemann c = compose_riemann(positions, structures, t);
        std::vector<double> rho(xs.size()), q(xs.size());
        for (size_t i = 0; i < xs.size(); ++i) {
            const RiemannState v = sample_composed(c, xs[i], t);
            rho[i] = v.rho;
            q[i] = v.q;
        }
        return {std::move(rho), std::move(q)};
    }
};

inline CaseOracle limit_oracle(CaseId id, const PressureLaw& law) {
    CaseOracle o;
    if (id == CaseId::cluster2d || id == CaseId::custom) return o;
    const PiecewiseData data = case_data_1d(id);
    o.available = true;
    for (size_t k = 0; k < data.jumps.size(); ++k) {
        o.positions.push_back(data.jumps[k]);
        o.structures.push_back(limit_riemann(law, data.states[k], data.states[k + 1]));
    }
    return o;
}

/// Finite-eps variant of the oracle (exact wave-curve solution).
inline CaseOracle eps_oracle(CaseId id, const PressureLaw& law) {
    CaseOracle o;
    if (id == CaseId::cluster2d || id == CaseId::custom) return o;
    const PiecewiseData data = case_data_1d(id);
    o.available = true;
    for (size_t k = 0; k < data.jumps.size(); ++k) {
        o.positions.push_back(data.jumps[k]);
        o.structures.push_back(solve_riemann_eps(law, data.states[k], data.states[k + 1]));
    }
    return o;
}

}  // namespace ceuler
