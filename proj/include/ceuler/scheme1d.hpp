#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "ceuler/grid.hpp"
#include "ceuler/numerics.hpp"
#include "ceuler/pressure.hpp"

namespace ceuler {

enum class SchemeKind { direct, gauge1, gauge2 };

inline std::string to_string(SchemeKind k) {
    switch (k) {
        case SchemeKind::direct: return "direct";
        case SchemeKind::gauge1: return "gauge1";
        case SchemeKind::gauge2: return "gauge2";
    }
    return "?";
}

struct SchemeConfig {
    SchemeKind scheme = SchemeKind::direct;
    double dt = 0.0;
    double courant_sigma = 0.0;  // > 0 switches the driver to adaptive dt
    int picard_iters = 0;
    BoundaryRule boundary = BoundaryRule::copy;
    NewtonOptions newton;

    SchemeConfig() {
        newton.residual_tol = 1e-12;  // rho-units; keeps the flux-form and
        newton.max_iter = 60;         // p1-consistent densities aligned
    }
};

struct StepResult {
    double max_lambda = 0.0;  // max |q/rho| + sqrt(eps p0') at step start
};

/// Local Rusanov diffusion coefficient at an interface.
inline double local_diffusion(const PressureLaw& law, double rho_l, double q_l, double rho_r,
                              double q_r) {
    if (!(rho_l > 0.0) || !(rho_r > 0.0))
        throw std::domain_error("local_diffusion: nonpositive density");
    const double cl = std::abs(q_l / rho_l) + law.explicit_sound_speed(rho_l);
    const double cr = std::abs(q_r / rho_r) + law.explicit_sound_speed(rho_r);
    return std::max(cl, cr);
}

/// Interface data for one step: index k refers to the interface between
/// nodes k and k+1, for k = -2 .. M+1.
struct FluxSet1D {
    int m = 0;  // intervals M
    std::vector<double> C_half, F_half, Q_half;

    explicit FluxSet1D(int intervals)
        : m(intervals), C_half(intervals + 4), F_half(intervals + 4),
          Q_half(intervals + 4, std::nan("")) {}
    double& C(int k) { return C_half[k + 2]; }
    double C(int k) const { return C_half[k + 2]; }
    double& F(int k) { return F_half[k + 2]; }
    double F(int k) const { return F_half[k + 2]; }
    double& Q(int k) { return Q_half[k + 2]; }
    double Q(int k) const { return Q_half[k + 2]; }
};

/// Diffusion coefficients and explicit momentum fluxes from the ghost-filled
/// state at time n.
inline FluxSet1D build_fluxes_1d(const PressureLaw& law, const GridState1D& s) {
    const int m = s.grid.intervals;
    FluxSet1D fx(m);
    for (int k = -2; k <= m + 1; ++k) {
        const double rl = s.rho(k), ql = s.q(k);
        const double rr = s.rho(k + 1), qr = s.q(k + 1);
        const double c = local_diffusion(law, rl, ql, rr, qr);
        fx.C(k) = c;
        fx.F(k) = 0.5 * (ql * ql / rl + qr * qr / rr +
                         law.epsilon() * (law.p0(rl) + law.p0(rr))) -
                  0.5 * c * (qr - ql);
    }
    return fx;
}

inline double max_explicit_lambda(const PressureLaw& law, const GridState1D& s) {
    double ml = 0.0;
    for (int j = 0; j < s.grid.nodes(); ++j) {
        if (!(s.rho(j) > 0.0))
            throw std::domain_error("max_explicit_lambda: nonpositive density");
        ml = std::max(ml, std::abs(s.q(j) / s.rho(j)) + law.explicit_sound_speed(s.rho(j)));
    }
    return ml;
}

/// CFL time step dt = sigma dx / max lambda for the explicit part.
inline double adaptive_dt(const PressureLaw& law, const GridState1D& s, double sigma,
                          double max_dt = 1e30) {
    if (!(sigma > 0.0)) throw std::invalid_argument("adaptive_dt: sigma must be positive");
    const double ml = max_explicit_lambda(law, s);
    if (ml == 0.0) return max_dt;
    return std::min(max_dt, sigma * s.grid.dx() / ml);
}

/// Right-hand side of the nonlinear pressure equation: the explicit mass
/// update augmented by the second difference of the momentum fluxes.
inline std::vector<double> direct_rhs_1d(const GridState1D& s, const FluxSet1D& fx, double dt) {
    const int n = s.grid.nodes();
    const double dx = s.grid.dx();
    const double r1 = dt / (2.0 * dx);
    const double r2 = dt * dt / (2.0 * dx * dx);
    std::vector<double> rhs(n);
    for (int j = 0; j < n; ++j) {
        rhs[j] = s.rho(j) - r1 * (s.q(j + 1) - s.q(j - 1)) +
                 r1 * (fx.C(j) * (s.rho(j + 1) - s.rho(j)) -
                       fx.C(j - 1) * (s.rho(j) - s.rho(j - 1))) +
                 r2 * (fx.F(j + 1) - fx.F(j) - fx.F(j - 1) + fx.F(j - 2));
    }
    return rhs;
}

namespace detail {

/// Index map for the p1 stencil's ghost closure.
inline int closure_index(int j, int n, BoundaryRule rule) {
    if (j >= 0 && j < n) return j;
    if (rule == BoundaryRule::copy) return j < 0 ? 0 : n - 1;
    return ((j % n) + n) % n;
}

/// Solve (B + sum_k val e_r e_c^T) x = b given the factored banded core.
inline std::vector<double> woodbury_solve(const BandedLU& lu,
                                          const std::vector<std::array<int, 2>>& corners,
                                          double val, const std::vector<double>& b) {
    std::vector<double> x = lu.solve(b);
    if (corners.empty()) return x;
    const int k = static_cast<int>(corners.size());
    const int n = static_cast<int>(b.size());
    std::vector<std::vector<double>> Y(k);
    for (int i = 0; i < k; ++i) {
        std::vector<double> e(n, 0.0);
        e[corners[i][0]] = val;
        Y[i] = lu.solve(e);
    }
    // S = I + V^T Y, w = V^T x
    std::vector<std::vector<double>> S(k, std::vector<double>(k, 0.0));
    std::vector<double> w(k);
    for (int i = 0; i < k; ++i) {
        w[i] = x[corners[i][1]];
        for (int j = 0; j < k; ++j) S[i][j] = (i == j ? 1.0 : 0.0) + Y[j][corners[i][1]];
    }
    // dense solve of the small system
    for (int c = 0; c < k; ++c) {
        int p = c;
        for (int r = c + 1; r < k; ++r)
            if (std::abs(S[r][c]) > std::abs(S[p][c])) p = r;
        std::swap(S[c], S[p]);
        std::swap(w[c], w[p]);
        if (std::abs(S[c][c]) < 1e-300) throw solver_error("woodbury: singular correction");
        for (int r = c + 1; r < k; ++r) {
            const double f = S[r][c] / S[c][c];
            for (int cc = c; cc < k; ++cc) S[r][cc] -= f * S[c][cc];
            w[r] -= f * w[c];
        }
    }
    std::vector<double> alpha(k);
    for (int c = k - 1; c >= 0; --c) {
        double sum = w[c];
        for (int cc = c + 1; cc < k; ++cc) sum -= S[c][cc] * alpha[cc];
        alpha[c] = sum / S[c][c];
    }
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < n; ++j) x[j] -= alpha[i] * Y[i][j];
    return x;
}

}  // namespace detail

/// The nonlinear system for the implicit pressure: per node,
///   rho(z_j) - c2 (z_{j+2} - 2 z_j + z_{j-2}) = rhs_j,
/// where z = p1 and c2 = eps dt^2 / (4 dx^2). Ghost values of z follow the
/// same closure as the density field.
struct DirectSystem1D {
    const PressureLaw* law = nullptr;
    int n = 0;
    double c2 = 0.0;
    BoundaryRule rule = BoundaryRule::copy;
    std::vector<double> rhs;
    mutable std::vector<double> rho_cache;  // warm-start seeds for the inversion

    double zg(const std::vector<double>& z, int j) const {
        return z[detail::closure_index(j, n, rule)];
    }

    std::vector<double> densities(const std::vector<double>& z) const {
        std::vector<double> rho(n);
        for (int j = 0; j < n; ++j) {
            rho[j] = law->invert_p1(std::max(0.0, z[j]), rho_cache[j]);
            rho_cache[j] = rho[j];
        }
        return rho;
    }

    std::vector<double> residual(const std::vector<double>& z) const {
        std::vector<double> r = densities(z);
        for (int j = 0; j < n; ++j)
            r[j] += -c2 * (zg(z, j + 2) - 2.0 * z[j] + zg(z, j - 2)) - rhs[j];
        return r;
    }

    /// Density at which the Jacobian diagonal is linearized. dp1 vanishes
    /// at rho = 0 (infinite slope of the inverse map), so near-vacuum nodes
    /// use the secant scale set by their right-hand side instead.
    double slope_density(int j, double rho) const {
        const double lim = 1e-4 * law->rho_star();
        if (rho > lim) return rho;
        const double s = std::min(std::abs(rhs[j]), lim);
        return std::max({rho, s, 1e-12 * law->rho_star()});
    }

    /// Newton step d with J(z) d = r; banded core plus periodic corners.
    std::vector<double> jac_solve(const std::vector<double>& z,
                                  const std::vector<double>& r) const {
        BandedSystem sys;
        sys.n = n;
        std::vector<double> diag(n), off_m(n, 0.0), off_p(n, 0.0), near_m(n, 0.0),
            near_p(n, 0.0);
        std::vector<std::array<int, 2>> corners;
        for (int j = 0; j < n; ++j) {
            const double rho = law->invert_p1(std::max(0.0, z[j]), rho_cache[j]);
            // the floor keeps the matrix nonsingular when every node is
            // pressed against rho_star (the closed Laplacian alone has a
            // constant nullspace); such steps then fail via newton_error
            const double dinv =
                std::max(1.0 / law->dp1(slope_density(j, rho)), 1e-10 * c2);
            diag[j] = dinv + 2.0 * c2;
            for (int side : {-2, 2}) {
                const int col = detail::closure_index(j + side, n, rule);
                const int d = col - j;
                if (d == 0) diag[j] -= c2;
                else if (d == -2) off_m[j] -= c2;
                else if (d == 2) off_p[j] -= c2;
                else if (d == -1) near_m[j] -= c2;
                else if (d == 1) near_p[j] -= c2;
                else corners.push_back({j, col});
            }
        }
        sys.add_band(0, diag);
        sys.add_band(-2, off_m);
        sys.add_band(2, off_p);
        sys.add_band(-1, near_m);
        sys.add_band(1, near_p);
        BandedLU lu(sys);
        return detail::woodbury_solve(lu, corners, -c2, r);
    }
};

inline DirectSystem1D assemble_direct_system(const PressureLaw& law, const GridState1D& s,
                                             const FluxSet1D& fx, double dt,
                                             BoundaryRule rule) {
    DirectSystem1D sys;
    sys.law = &law;
    sys.n = s.grid.nodes();
    const double dx = s.grid.dx();
    sys.c2 = law.epsilon() * dt * dt / (4.0 * dx * dx);
    sys.rule = rule;
    sys.rhs = direct_rhs_1d(s, fx, dt);
    sys.rho_cache.resize(sys.n);
    for (int j = 0; j < sys.n; ++j) sys.rho_cache[j] = s.rho(j);
    return sys;
}

/// Newton solve of the pressure system, seeded with p1(rho^n) and clamped
/// to nonnegative iterates.
inline std::vector<double> solve_pressure_system(const DirectSystem1D& sys,
                                                 const GridState1D& s,
                                                 const NewtonOptions& opts) {
    std::vector<double> z0(sys.n);
    for (int j = 0; j < sys.n; ++j) z0[j] = sys.law->p1(s.rho(j));
    auto residual = [&sys](const std::vector<double>& z) { return sys.residual(z); };
    auto jac = [&sys](const std::vector<double>& z, const std::vector<double>& r) {
        return sys.jac_solve(z, r);
    };
    auto clamp = [](std::vector<double>& z) {
        for (double& v : z) v = std::max(0.0, v);
    };
    return newton_solve(residual, jac, std::move(z0), opts, clamp);
}

/// Explicit momentum update with the implicit p1 gradient, evaluated on the
/// extended node range [-1, M+1] so the mass fluxes close consistently.
inline Field1D momentum_update_1d(const PressureLaw& law, const GridState1D& s,
                                  const FluxSet1D& fx, const std::vector<double>& z, double dt,
                                  BoundaryRule rule) {
    const int n = s.grid.nodes();
    const double dx = s.grid.dx();
    auto zg = [&](int j) { return z[detail::closure_index(j, n, rule)]; };
    Field1D qn(n);
    for (int j = -1; j <= n; ++j) {
        qn(j) = s.q(j) - dt / dx * (fx.F(j) - fx.F(j - 1)) -
                dt * law.epsilon() / (2.0 * dx) * (zg(j + 1) - zg(j - 1));
    }
    return qn;
}

/// Implicit-centered mass fluxes from the updated momenta.
inline void fill_mass_fluxes(FluxSet1D& fx, const GridState1D& s, const Field1D& q_new) {
    const int n = s.grid.nodes();
    for (int k = -1; k <= n - 1; ++k)
        fx.Q(k) = 0.5 * (q_new(k) + q_new(k + 1)) - 0.5 * fx.C(k) * (s.rho(k + 1) - s.rho(k));
}

inline void assert_density_bounds(const GridState1D& s, const PressureLaw& law) {
    for (int j = 0; j < s.grid.nodes(); ++j) {
        const double r = s.rho(j);
        if (!(r > 0.0) || !(r < law.rho_star()))
            throw std::domain_error("density bound violated at node " + std::to_string(j) +
                                    ": rho = " + std::to_string(r) + " at t = " +
                                    std::to_string(s.time));
    }
}

namespace detail {

struct Prepared1D {
    FluxSet1D fx;
    DirectSystem1D sys;
    std::vector<double> z;
    double max_lambda;
};

inline Prepared1D prepare_pressure_solve(const PressureLaw& law, GridState1D& s,
                                         const SchemeConfig& cfg) {
    fill_ghosts(s, cfg.boundary);
    FluxSet1D fx = build_fluxes_1d(law, s);
    const double ml = max_explicit_lambda(law, s);
    DirectSystem1D sys = assemble_direct_system(law, s, fx, cfg.dt, cfg.boundary);
    std::vector<double> z = solve_pressure_system(sys, s, cfg.newton);
    return {std::move(fx), std::move(sys), std::move(z), ml};
}

}  // namespace detail

/// One step of the Direct method: Newton on the p1 system, momentum update,
/// then the mass update in flux form (conservative by construction; it
/// matches the p1-consistent density to the Newton tolerance).
inline StepResult direct_step(const PressureLaw& law, GridState1D& s, const SchemeConfig& cfg) {
    auto [fx, sys, z, ml] = detail::prepare_pressure_solve(law, s, cfg);
    const int n = s.grid.nodes();
    const double dx = s.grid.dx();

    const Field1D q_new = momentum_update_1d(law, s, fx, z, cfg.dt, cfg.boundary);
    fill_mass_fluxes(fx, s, q_new);
    for (int j = 0; j < n; ++j) {
        s.rho(j) -= cfg.dt / dx * (fx.Q(j) - fx.Q(j - 1));
    }
    for (int j = 0; j < n; ++j) s.q(j) = q_new(j);
    s.time += cfg.dt;
    s.step += 1;
    assert_density_bounds(s, law);
    return {ml};
}

/// Direct step iterated with the convective part of the momentum flux
/// refreshed from the latest iterate (the explicit pressure and the
/// viscosity stay frozen at time n). picard_iters = 0 is exactly the
/// Direct step.
inline StepResult picard_step(const PressureLaw& law, GridState1D& s, const SchemeConfig& cfg) {
    if (cfg.picard_iters <= 0) return direct_step(law, s, cfg);

    GridState1D base = s;  // state at time n
    fill_ghosts(base, cfg.boundary);
    const FluxSet1D fx0 = build_fluxes_1d(law, base);
    const double ml = max_explicit_lambda(law, base);

    GridState1D iter = base;
    direct_step(law, iter, cfg);
    const int n = s.grid.nodes();
    const double dx = s.grid.dx();

    for (int m = 0; m < cfg.picard_iters; ++m) {
        fill_ghosts(iter, cfg.boundary);
        FluxSet1D fx = fx0;
        for (int k = -2; k <= base.grid.intervals + 1; ++k) {
            const double conv = 0.5 * (iter.q(k) * iter.q(k) / iter.rho(k) +
                                       iter.q(k + 1) * iter.q(k + 1) / iter.rho(k + 1));
            const double p0part =
                0.5 * law.epsilon() * (law.p0(base.rho(k)) + law.p0(base.rho(k + 1)));
            fx.F(k) = conv + p0part - 0.5 * fx0.C(k) * (base.q(k + 1) - base.q(k));
        }
        DirectSystem1D sys = assemble_direct_system(law, base, fx, cfg.dt, cfg.boundary);
        const std::vector<double> z = solve_pressure_system(sys, base, cfg.newton);
        const Field1D q_new = momentum_update_1d(law, base, fx, z, cfg.dt, cfg.boundary);
        fill_mass_fluxes(fx, base, q_new);
        GridState1D next = base;
        for (int j = 0; j < n; ++j) {
            next.rho(j) = base.rho(j) - cfg.dt / dx * (fx.Q(j) - fx.Q(j - 1));
            next.q(j) = q_new(j);
        }
        iter = std::move(next);
    }
    s.rho = iter.rho;
    s.q = iter.q;
    s.time += cfg.dt;
    s.step += 1;
    assert_density_bounds(s, law);
    return {ml};
}

// ---------------------------------------------------------------------------
// Gauge method
// ---------------------------------------------------------------------------

/// In 1D the divergence-free momentum component is a single scalar; phi is
/// kept for inspection. phi vanishes at both boundary nodes.
struct GaugeState1D {
    double a = 0.0;
    Field1D phi;
};

inline GaugeState1D make_gauge_state(const GridState1D& s) {
    GaugeState1D g;
    double sum = 0.0;
    for (int j = 0; j < s.grid.nodes(); ++j) sum += s.q(j);
    g.a = sum / s.grid.nodes();
    g.phi = Field1D(s.grid.nodes(), 0.0);
    return g;
}

namespace detail {

/// Solve the phi equation with homogeneous Dirichlet values at nodes 0 and
/// M. For the wide stencil the two boundary-adjacent rows fall back to the
/// narrow Laplacian: this ties the even/odd sublattices together at the
/// boundary (the wide operator alone would anchor them inconsistently and
/// leak a spurious one-node slope into the reconstruction).
inline Field1D solve_phi_1d(const GridState1D& s, const std::vector<double>& rhs_interior,
                            bool wide) {
    const int n = s.grid.nodes();  // unknowns at nodes 1..n-2
    const int ni = n - 2;
    const double dx = s.grid.dx();
    BandedSystem sys;
    sys.n = ni;
    sys.rhs = rhs_interior;
    const double cn = 1.0 / (dx * dx);
    if (!wide) {
        std::vector<double> diag(ni, -2.0 * cn), off(ni, cn);
        sys.add_band(0, diag);
        sys.add_band(-1, off);
        sys.add_band(1, off);
    } else {
        const double cw = 0.25 * cn;
        std::vector<double> diag(ni, -2.0 * cw), off2(ni, cw), off1(ni, 0.0);
        diag[0] = -2.0 * cn;
        off1[0] = cn;
        off2[0] = 0.0;
        diag[ni - 1] = -2.0 * cn;
        off1[ni - 1] = cn;
        off2[ni - 1] = 0.0;
        sys.add_band(0, diag);
        sys.add_band(-2, off2);
        sys.add_band(2, off2);
        sys.add_band(-1, off1);
        sys.add_band(1, off1);
    }
    const std::vector<double> u = solve_banded(sys);
    Field1D phi(n, 0.0);
    for (int i = 0; i < ni; ++i) phi(i + 1) = u[i];
    return phi;
}

}  // namespace detail

/// One step of the Gauge method (narrow or wide phi stencil). Shares the
/// p1 solve with the Direct method; the density comes from inverting p1,
/// the momentum from the gauge reconstruction q = a - d(phi)/dx.
inline StepResult gauge_step(const PressureLaw& law, GridState1D& s, GaugeState1D& g,
                             const SchemeConfig& cfg) {
    auto [fx, sys, z, ml] = detail::prepare_pressure_solve(law, s, cfg);
    const int n = s.grid.nodes();
    const int m = s.grid.intervals;
    const double dx = s.grid.dx();
    const bool wide = cfg.scheme == SchemeKind::gauge2;

    std::vector<double> rho_new(n);
    for (int j = 0; j < n; ++j) rho_new[j] = law.invert_p1(std::max(0.0, z[j]), s.rho(j));

    // phi: discrete Laplacian = density increment plus the mass viscosity
    std::vector<double> rhs_phi(n - 2);
    for (int j = 1; j <= n - 2; ++j) {
        rhs_phi[j - 1] = (rho_new[j] - s.rho(j)) / cfg.dt -
                         1.0 / (2.0 * dx) *
                             (fx.C(j) * (s.rho(j + 1) - s.rho(j)) -
                              fx.C(j - 1) * (s.rho(j) - s.rho(j - 1)));
    }
    const Field1D phi = detail::solve_phi_1d(s, rhs_phi, wide);

    // update of the space-independent component: boundary flux difference
    // plus the viscosity sum over every interior node (it telescopes to the
    // two ghost-interface terms, so it vanishes while the boundary zones
    // are quiescent)
    const double len = s.grid.c - s.grid.b;
    auto node_flux = [&](int j, double p1val) {
        return s.q(j) * s.q(j) / s.rho(j) + law.epsilon() * (law.p0(s.rho(j)) + p1val);
    };
    double visc_sum = 0.0;
    for (int j = 0; j <= m; ++j)
        visc_sum += fx.C(j) * (s.q(j + 1) - s.q(j)) - fx.C(j - 1) * (s.q(j) - s.q(j - 1));
    const double a_new = g.a -
                         cfg.dt / len * (node_flux(m, z[m]) - node_flux(0, z[0])) +
                         cfg.dt / (2.0 * len) * visc_sum;

    // reconstruction with odd phi ghosts
    auto phig = [&](int j) {
        if (j < 0) return -phi(-j);
        if (j > m) return -phi(2 * m - j);
        return phi(j);
    };
    for (int j = 0; j < n; ++j) {
        s.rho(j) = rho_new[j];
        s.q(j) = a_new - (phig(j + 1) - phig(j - 1)) / (2.0 * dx);
    }
    g.a = a_new;
    g.phi = phi;
    s.time += cfg.dt;
    s.step += 1;
    assert_density_bounds(s, law);
    return {ml};
}

/// Dispatch on the configured scheme; gauge state is created on first use
/// by the callers that own it.
inline StepResult scheme_step(const PressureLaw& law, GridState1D& s, GaugeState1D& g,
                              const SchemeConfig& cfg) {
    if (cfg.scheme == SchemeKind::direct) {
        return cfg.picard_iters > 0 ? picard_step(law, s, cfg) : direct_step(law, s, cfg);
    }
    return gauge_step(law, s, g, cfg);
}

}  // namespace ceuler
