#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "ceuler/grid.hpp"
#include "ceuler/numerics.hpp"
#include "ceuler/pressure.hpp"
#include "ceuler/scheme1d.hpp"

namespace ceuler {

/// Interface data for one 2D step. Index (i, j) addresses the x-interface
/// between nodes (i, j) and (i+1, j), or the y-interface between (i, j)
/// and (i, j+1).
struct FluxSet2D {
    int m1 = 0, m2 = 0;
    Field2D Cx, F1, F2;  // x-interfaces: diffusion coefficient, flux components
    Field2D Cy, G1, G2;  // y-interfaces
    Field2D Qx, Qy;      // implicit mass fluxes (filled after the momentum update)

    FluxSet2D(int mx, int my)
        : m1(mx), m2(my), Cx(mx + 1, my + 1), F1(mx + 1, my + 1), F2(mx + 1, my + 1),
          Cy(mx + 1, my + 1), G1(mx + 1, my + 1), G2(mx + 1, my + 1), Qx(mx + 1, my + 1),
          Qy(mx + 1, my + 1) {}
};

namespace detail {

inline double node_speed(const PressureLaw& law, const GridState2D& s, int i, int j) {
    const double rho = s.rho(i, j);
    if (!(rho > 0.0)) throw std::domain_error("node_speed: nonpositive density");
    const double u = std::max(std::abs(s.q1(i, j)), std::abs(s.q2(i, j))) / rho;
    return u + law.explicit_sound_speed(rho);
}

}  // namespace detail

/// Fluxes and diffusion coefficients over the ghost-extended interface
/// ranges needed by the wide pressure stencil and the extended momentum
/// update.
inline FluxSet2D build_fluxes_2d(const PressureLaw& law, const GridState2D& s) {
    const int m1 = s.grid.intervals_x, m2 = s.grid.intervals_y;
    FluxSet2D fx(m1, m2);
    auto f1 = [&](int i, int j) {
        return s.q1(i, j) * s.q1(i, j) / s.rho(i, j) + law.epsilon() * law.p0(s.rho(i, j));
    };
    auto f2 = [&](int i, int j) { return s.q1(i, j) * s.q2(i, j) / s.rho(i, j); };
    auto g2 = [&](int i, int j) {
        return s.q2(i, j) * s.q2(i, j) / s.rho(i, j) + law.epsilon() * law.p0(s.rho(i, j));
    };
    for (int j = -2; j <= m2 + 2; ++j)
        for (int i = -2; i <= m1 + 1; ++i) {
            const double c = std::max(detail::node_speed(law, s, i, j),
                                      detail::node_speed(law, s, i + 1, j));
            fx.Cx(i, j) = c;
            fx.F1(i, j) = 0.5 * (f1(i, j) + f1(i + 1, j)) -
                          0.5 * c * (s.q1(i + 1, j) - s.q1(i, j));
            fx.F2(i, j) = 0.5 * (f2(i, j) + f2(i + 1, j)) -
                          0.5 * c * (s.q2(i + 1, j) - s.q2(i, j));
        }
    for (int j = -2; j <= m2 + 1; ++j)
        for (int i = -2; i <= m1 + 2; ++i) {
            const double c = std::max(detail::node_speed(law, s, i, j),
                                      detail::node_speed(law, s, i, j + 1));
            fx.Cy(i, j) = c;
            fx.G1(i, j) = 0.5 * (f2(i, j) + f2(i, j + 1)) -
                          0.5 * c * (s.q1(i, j + 1) - s.q1(i, j));
            fx.G2(i, j) = 0.5 * (g2(i, j) + g2(i, j + 1)) -
                          0.5 * c * (s.q2(i, j + 1) - s.q2(i, j));
        }
    return fx;
}

inline double max_explicit_lambda(const PressureLaw& law, const GridState2D& s) {
    double ml = 0.0;
    for (int j = 0; j < s.grid.nodes_y(); ++j)
        for (int i = 0; i < s.grid.nodes_x(); ++i)
            ml = std::max(ml, detail::node_speed(law, s, i, j));
    return ml;
}

/// Flux-curvature sum entering both the pressure equation and the
/// hydrostatic-pressure equation: per-axis second differences of the
/// normal fluxes plus the mixed transverse differences.
inline double flux_curvature(const FluxSet2D& fx, const Grid2D& g, int i, int j) {
    const double dx = g.dx(), dy = g.dy();
    const double xx =
        (fx.F1(i + 1, j) - fx.F1(i, j) - fx.F1(i - 1, j) + fx.F1(i - 2, j)) / (dx * dx);
    const double xy = (fx.G1(i + 1, j) - fx.G1(i + 1, j - 1) - fx.G1(i - 1, j) +
                       fx.G1(i - 1, j - 1)) /
                      (dx * dy);
    const double yx = (fx.F2(i, j + 1) - fx.F2(i - 1, j + 1) - fx.F2(i, j - 1) +
                       fx.F2(i - 1, j - 1)) /
                      (dx * dy);
    const double yy =
        (fx.G2(i, j + 1) - fx.G2(i, j) - fx.G2(i, j - 1) + fx.G2(i, j - 2)) / (dy * dy);
    return xx + xy + yx + yy;
}

inline std::vector<double> direct_rhs_2d(const GridState2D& s, const FluxSet2D& fx,
                                         double dt) {
    const int nx = s.grid.nodes_x(), ny = s.grid.nodes_y();
    const double dx = s.grid.dx(), dy = s.grid.dy();
    std::vector<double> rhs(static_cast<size_t>(nx) * ny);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const double divq = (s.q1(i + 1, j) - s.q1(i - 1, j)) / (2.0 * dx) +
                                (s.q2(i, j + 1) - s.q2(i, j - 1)) / (2.0 * dy);
            const double viscx = (fx.Cx(i, j) * (s.rho(i + 1, j) - s.rho(i, j)) -
                                  fx.Cx(i - 1, j) * (s.rho(i, j) - s.rho(i - 1, j))) /
                                 (2.0 * dx);
            const double viscy = (fx.Cy(i, j) * (s.rho(i, j + 1) - s.rho(i, j)) -
                                  fx.Cy(i, j - 1) * (s.rho(i, j) - s.rho(i, j - 1))) /
                                 (2.0 * dy);
            rhs[static_cast<size_t>(j) * nx + i] =
                s.rho(i, j) - dt * divq + dt * viscx + dt * viscy +
                0.5 * dt * dt * flux_curvature(fx, s.grid, i, j);
        }
    return rhs;
}

/// 2D pressure system: rho(z) minus the wide per-axis Laplacian of z.
struct DirectSystem2D {
    const PressureLaw* law = nullptr;
    int nx = 0, ny = 0;
    double c2x = 0.0, c2y = 0.0;
    BoundaryRule rule = BoundaryRule::copy;
    std::vector<double> rhs;
    mutable std::vector<double> rho_cache;

    size_t idx(int i, int j) const { return static_cast<size_t>(j) * nx + i; }
    int cx(int i) const { return detail::closure_index(i, nx, rule); }
    int cy(int j) const { return detail::closure_index(j, ny, rule); }

    double slope_density(size_t k, double rho) const {
        const double lim = 1e-4 * law->rho_star();
        if (rho > lim) return rho;
        const double s = std::min(std::abs(rhs[k]), lim);
        return std::max({rho, s, 1e-12 * law->rho_star()});
    }

    std::vector<double> densities(const std::vector<double>& z) const {
        std::vector<double> rho(z.size());
        for (size_t k = 0; k < z.size(); ++k) {
            rho[k] = law->invert_p1(std::max(0.0, z[k]), rho_cache[k]);
            rho_cache[k] = rho[k];
        }
        return rho;
    }

    double lap(const std::vector<double>& z, int i, int j) const {
        const double zx =
            z[idx(cx(i + 2), j)] - 2.0 * z[idx(i, j)] + z[idx(cx(i - 2), j)];
        const double zy =
            z[idx(i, cy(j + 2))] - 2.0 * z[idx(i, j)] + z[idx(i, cy(j - 2))];
        return c2x * zx + c2y * zy;
    }

    std::vector<double> residual(const std::vector<double>& z) const {
        std::vector<double> r = densities(z);
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                const size_t k = idx(i, j);
                r[k] += -lap(z, i, j) - rhs[k];
            }
        return r;
    }

    std::vector<double> jac_solve(const std::vector<double>& z,
                                  const std::vector<double>& r) const {
        const size_t n = z.size();
        std::vector<double> diag(n), inv_diag(n);
        for (size_t k = 0; k < n; ++k) {
            const double rho = law->invert_p1(std::max(0.0, z[k]), rho_cache[k]);
            diag[k] = std::max(1.0 / law->dp1(slope_density(k, rho)),
                               1e-10 * (c2x + c2y));
            inv_diag[k] = 1.0 / (diag[k] + 2.0 * c2x + 2.0 * c2y);
        }
        auto apply = [&](const std::vector<double>& v) {
            std::vector<double> out(n);
            for (int j = 0; j < ny; ++j)
                for (int i = 0; i < nx; ++i) {
                    const size_t k = idx(i, j);
                    const double vx =
                        v[idx(cx(i + 2), j)] - 2.0 * v[k] + v[idx(cx(i - 2), j)];
                    const double vy =
                        v[idx(i, cy(j + 2))] - 2.0 * v[k] + v[idx(i, cy(j - 2))];
                    out[k] = diag[k] * v[k] - c2x * vx - c2y * vy;
                }
            return out;
        };
        return bicgstab(apply, r, std::vector<double>(n, 0.0), inv_diag, 1e-10);
    }
};

inline DirectSystem2D assemble_direct_system(const PressureLaw& law, const GridState2D& s,
                                             const FluxSet2D& fx, double dt,
                                             BoundaryRule rule) {
    DirectSystem2D sys;
    sys.law = &law;
    sys.nx = s.grid.nodes_x();
    sys.ny = s.grid.nodes_y();
    sys.c2x = law.epsilon() * dt * dt / (4.0 * s.grid.dx() * s.grid.dx());
    sys.c2y = law.epsilon() * dt * dt / (4.0 * s.grid.dy() * s.grid.dy());
    sys.rule = rule;
    sys.rhs = direct_rhs_2d(s, fx, dt);
    sys.rho_cache.resize(sys.rhs.size());
    for (int j = 0; j < sys.ny; ++j)
        for (int i = 0; i < sys.nx; ++i) sys.rho_cache[sys.idx(i, j)] = s.rho(i, j);
    return sys;
}

inline std::vector<double> solve_pressure_system(const DirectSystem2D& sys,
                                                 const GridState2D& s,
                                                 const NewtonOptions& opts) {
    std::vector<double> z0(sys.rhs.size());
    for (int j = 0; j < sys.ny; ++j)
        for (int i = 0; i < sys.nx; ++i) z0[sys.idx(i, j)] = sys.law->p1(s.rho(i, j));
    auto residual = [&sys](const std::vector<double>& z) { return sys.residual(z); };
    auto jac = [&sys](const std::vector<double>& z, const std::vector<double>& r) {
        return sys.jac_solve(z, r);
    };
    auto clamp = [](std::vector<double>& z) {
        for (double& v : z) v = std::max(0.0, v);
    };
    return newton_solve(residual, jac, std::move(z0), opts, clamp);
}

inline void assert_density_bounds(const GridState2D& s, const PressureLaw& law) {
    for (int j = 0; j < s.grid.nodes_y(); ++j)
        for (int i = 0; i < s.grid.nodes_x(); ++i) {
            const double r = s.rho(i, j);
            if (!(r > 0.0) || !(r < law.rho_star()))
                throw std::domain_error("density bound violated at node (" +
                                        std::to_string(i) + "," + std::to_string(j) +
                                        "): rho = " + std::to_string(r));
        }
}

namespace detail {

struct Prepared2D {
    FluxSet2D fx;
    DirectSystem2D sys;
    std::vector<double> z;
    double max_lambda;
};

inline Prepared2D prepare_pressure_solve(const PressureLaw& law, GridState2D& s,
                                         const SchemeConfig& cfg) {
    fill_ghosts(s, cfg.boundary);
    FluxSet2D fx = build_fluxes_2d(law, s);
    const double ml = max_explicit_lambda(law, s);
    DirectSystem2D sys = assemble_direct_system(law, s, fx, cfg.dt, cfg.boundary);
    std::vector<double> z = solve_pressure_system(sys, s, cfg.newton);
    return {std::move(fx), std::move(sys), std::move(z), ml};
}

/// Momentum update on the extended node range [-1, m+1]^2.
inline std::pair<Field2D, Field2D> momentum_update_2d(const PressureLaw& law,
                                                      const GridState2D& s,
                                                      const FluxSet2D& fx,
                                                      const DirectSystem2D& sys,
                                                      const std::vector<double>& z,
                                                      double dt) {
    const int nx = s.grid.nodes_x(), ny = s.grid.nodes_y();
    const double dx = s.grid.dx(), dy = s.grid.dy();
    auto zg = [&](int i, int j) { return z[sys.idx(sys.cx(i), sys.cy(j))]; };
    Field2D q1n(nx, ny), q2n(nx, ny);
    const double eps = law.epsilon();
    for (int j = -1; j <= ny; ++j)
        for (int i = -1; i <= nx; ++i) {
            q1n(i, j) = s.q1(i, j) - dt / dx * (fx.F1(i, j) - fx.F1(i - 1, j)) -
                        dt / dy * (fx.G1(i, j) - fx.G1(i, j - 1)) -
                        dt * eps / (2.0 * dx) * (zg(i + 1, j) - zg(i - 1, j));
            q2n(i, j) = s.q2(i, j) - dt / dx * (fx.F2(i, j) - fx.F2(i - 1, j)) -
                        dt / dy * (fx.G2(i, j) - fx.G2(i, j - 1)) -
                        dt * eps / (2.0 * dy) * (zg(i, j + 1) - zg(i, j - 1));
        }
    return {std::move(q1n), std::move(q2n)};
}

}  // namespace detail

/// One step of the 2D Direct method.
inline StepResult direct_step_2d(const PressureLaw& law, GridState2D& s,
                                 const SchemeConfig& cfg) {
    auto [fx, sys, z, ml] = detail::prepare_pressure_solve(law, s, cfg);
    const int nx = s.grid.nodes_x(), ny = s.grid.nodes_y();
    const double dx = s.grid.dx(), dy = s.grid.dy();
    auto [q1n, q2n] = detail::momentum_update_2d(law, s, fx, sys, z, cfg.dt);

    for (int j = 0; j < ny; ++j)
        for (int i = -1; i < nx; ++i)
            fx.Qx(i, j) = 0.5 * (q1n(i, j) + q1n(i + 1, j)) -
                          0.5 * fx.Cx(i, j) * (s.rho(i + 1, j) - s.rho(i, j));
    for (int j = -1; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
            fx.Qy(i, j) = 0.5 * (q2n(i, j) + q2n(i, j + 1)) -
                          0.5 * fx.Cy(i, j) * (s.rho(i, j + 1) - s.rho(i, j));

    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
            s.rho(i, j) -= cfg.dt / dx * (fx.Qx(i, j) - fx.Qx(i - 1, j)) +
                           cfg.dt / dy * (fx.Qy(i, j) - fx.Qy(i, j - 1));
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            s.q1(i, j) = q1n(i, j);
            s.q2(i, j) = q2n(i, j);
        }
    s.time += cfg.dt;
    s.step += 1;
    assert_density_bounds(s, law);
    return {ml};
}

// ---------------------------------------------------------------------------
// Gauge method in 2D
// ---------------------------------------------------------------------------

struct GaugeState2D {
    Field2D a1, a2;    // divergence-free momentum component
    Field2D phi;       // potential, zero on the boundary
    Field2D P_field;   // hydrostatic pressure of the previous step
};

namespace detail {

/// Dirichlet Poisson solve on the interior nodes. The wide operator uses
/// the narrow rows next to the boundary (same sublattice-tying closure as
/// in 1D), so no values outside the node range are referenced.
inline Field2D solve_poisson_2d(const Grid2D& g, const Field2D& rhs, const Field2D& bnd,
                                bool wide, double rtol = 1e-12) {
    const int nx = g.nodes_x(), ny = g.nodes_y();
    const int ix = nx - 2, iy = ny - 2;  // interior count per axis
    const double dx2 = g.dx() * g.dx(), dy2 = g.dy() * g.dy();
    auto kof = [&](int i, int j) { return static_cast<size_t>(j - 1) * ix + (i - 1); };

    auto stencil = [&](auto&& f, int i, int j) {
        double acc;
        if (wide && i > 1 && i < nx - 2)
            acc = (f(i + 2, j) - 2.0 * f(i, j) + f(i - 2, j)) / (4.0 * dx2);
        else
            acc = (f(i + 1, j) - 2.0 * f(i, j) + f(i - 1, j)) / dx2;
        if (wide && j > 1 && j < ny - 2)
            acc += (f(i, j + 2) - 2.0 * f(i, j) + f(i, j - 2)) / (4.0 * dy2);
        else
            acc += (f(i, j + 1) - 2.0 * f(i, j) + f(i, j - 1)) / dy2;
        return acc;
    };
    auto is_interior = [&](int i, int j) {
        return i >= 1 && i <= nx - 2 && j >= 1 && j <= ny - 2;
    };

    // right-hand side with the boundary values moved over
    std::vector<double> b(static_cast<size_t>(ix) * iy);
    auto bnd_only = [&](int i, int j) { return is_interior(i, j) ? 0.0 : bnd(i, j); };
    double bsum = 0.0;
    int bcount = 0;
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
            if (!is_interior(i, j)) {
                bsum += bnd(i, j);
                ++bcount;
            }
    const double bmean = bcount ? bsum / bcount : 0.0;
    for (int j = 1; j <= ny - 2; ++j)
        for (int i = 1; i <= nx - 2; ++i)
            b[kof(i, j)] = rhs(i, j) - stencil(bnd_only, i, j);

    std::vector<double> inv_diag(b.size());
    for (int j = 1; j <= ny - 2; ++j)
        for (int i = 1; i <= nx - 2; ++i) {
            const double ddx = (wide && i > 1 && i < nx - 2) ? -0.5 / dx2 : -2.0 / dx2;
            const double ddy = (wide && j > 1 && j < ny - 2) ? -0.5 / dy2 : -2.0 / dy2;
            inv_diag[kof(i, j)] = 1.0 / (ddx + ddy);
        }

    auto apply = [&](const std::vector<double>& v) {
        auto vat = [&](int i, int j) { return is_interior(i, j) ? v[kof(i, j)] : 0.0; };
        std::vector<double> out(v.size());
        for (int j = 1; j <= ny - 2; ++j)
            for (int i = 1; i <= nx - 2; ++i) out[kof(i, j)] = stencil(vat, i, j);
        return out;
    };
    // constant initial guess makes uniform-data solves exact
    const std::vector<double> u =
        bicgstab(apply, b, std::vector<double>(b.size(), bmean), inv_diag, rtol);

    Field2D out(nx, ny, 0.0);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
            out(i, j) = is_interior(i, j) ? u[kof(i, j)] : bnd(i, j);
    return out;
}

/// Centered derivative with linear extrapolation past the node range
/// (for phi with zero boundary values this reduces to odd reflection).
template <typename FieldLike>
inline double centered_dx(const FieldLike& f, int i, int j, int nx, double dx) {
    auto at = [&](int ii) {
        if (ii < 0) return 2.0 * f(0, j) - f(-ii, j);
        if (ii >= nx) return 2.0 * f(nx - 1, j) - f(2 * (nx - 1) - ii, j);
        return f(ii, j);
    };
    return (at(i + 1) - at(i - 1)) / (2.0 * dx);
}

template <typename FieldLike>
inline double centered_dy(const FieldLike& f, int i, int j, int ny, double dy) {
    auto at = [&](int jj) {
        if (jj < 0) return 2.0 * f(i, 0) - f(i, -jj);
        if (jj >= ny) return 2.0 * f(i, ny - 1) - f(i, 2 * (ny - 1) - jj);
        return f(i, jj);
    };
    return (at(j + 1) - at(j - 1)) / (2.0 * dy);
}

}  // namespace detail

/// Initial gauge decomposition: solve lap(phi) = -div q with zero boundary
/// values and set a = q + grad(phi), which is discretely divergence-free
/// for the wide operator and reduces to the momentum average in 1D.
inline GaugeState2D make_gauge_state_2d(const GridState2D& state, const SchemeConfig& cfg) {
    GridState2D s = state;
    fill_ghosts(s, cfg.boundary);
    const int nx = s.grid.nodes_x(), ny = s.grid.nodes_y();
    const double dx = s.grid.dx(), dy = s.grid.dy();
    const bool wide = cfg.scheme == SchemeKind::gauge2;

    Field2D rhs(nx, ny, 0.0), zero(nx, ny, 0.0);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
            rhs(i, j) = -((s.q1(i + 1, j) - s.q1(i - 1, j)) / (2.0 * dx) +
                          (s.q2(i, j + 1) - s.q2(i, j - 1)) / (2.0 * dy));
    GaugeState2D g;
    g.phi = detail::solve_poisson_2d(s.grid, rhs, zero, wide);
    g.a1 = Field2D(nx, ny, 0.0);
    g.a2 = Field2D(nx, ny, 0.0);
    g.P_field = Field2D(nx, ny, 0.0);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            g.a1(i, j) = s.q1(i, j) + detail::centered_dx(g.phi, i, j, nx, dx);
            g.a2(i, j) = s.q2(i, j) + detail::centered_dy(g.phi, i, j, ny, dy);
        }
    return g;
}

/// One step of the 2D Gauge method: the shared p1 solve, then the three
/// elliptic solves (phi, P) and the a-update, then q = a - grad(phi).
inline StepResult gauge_step_2d(const PressureLaw& law, GridState2D& s, GaugeState2D& g,
                                const SchemeConfig& cfg) {
    auto [fx, sys, z, ml] = detail::prepare_pressure_solve(law, s, cfg);
    const int nx = s.grid.nodes_x(), ny = s.grid.nodes_y();
    const double dx = s.grid.dx(), dy = s.grid.dy();
    const bool wide = cfg.scheme == SchemeKind::gauge2;

    Field2D rho_new(nx, ny);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
            rho_new(i, j) = law.invert_p1(std::max(0.0, z[sys.idx(i, j)]), s.rho(i, j));

    // phi equation
    Field2D rhs_phi(nx, ny, 0.0), zero(nx, ny, 0.0);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const double viscx = (fx.Cx(i, j) * (s.rho(i + 1, j) - s.rho(i, j)) -
                                  fx.Cx(i - 1, j) * (s.rho(i, j) - s.rho(i - 1, j))) /
                                 (2.0 * dx);
            const double viscy = (fx.Cy(i, j) * (s.rho(i, j + 1) - s.rho(i, j)) -
                                  fx.Cy(i, j - 1) * (s.rho(i, j) - s.rho(i, j - 1))) /
                                 (2.0 * dy);
            rhs_phi(i, j) = (rho_new(i, j) - s.rho(i, j)) / cfg.dt - viscx - viscy;
        }
    const Field2D phi = detail::solve_poisson_2d(s.grid, rhs_phi, zero, wide);

    // P equation; Dirichlet values from the implicit relation (phi vanishes
    // on the boundary at both time levels, so only eps*p1 survives there)
    Field2D rhs_P(nx, ny, 0.0), bnd_P(nx, ny, 0.0);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            rhs_P(i, j) = -0.5 * flux_curvature(fx, s.grid, i, j);
            bnd_P(i, j) = law.epsilon() * z[sys.idx(i, j)];
        }
    const Field2D P = detail::solve_poisson_2d(s.grid, rhs_P, bnd_P, wide);

    // a update and reconstruction
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            g.a1(i, j) -= cfg.dt * ((fx.F1(i, j) - fx.F1(i - 1, j)) / dx +
                                    (fx.G1(i, j) - fx.G1(i, j - 1)) / dy +
                                    detail::centered_dx(P, i, j, nx, dx));
            g.a2(i, j) -= cfg.dt * ((fx.F2(i, j) - fx.F2(i - 1, j)) / dx +
                                    (fx.G2(i, j) - fx.G2(i, j - 1)) / dy +
                                    detail::centered_dy(P, i, j, ny, dy));
        }
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            s.rho(i, j) = rho_new(i, j);
            s.q1(i, j) = g.a1(i, j) - detail::centered_dx(phi, i, j, nx, dx);
            s.q2(i, j) = g.a2(i, j) - detail::centered_dy(phi, i, j, ny, dy);
        }
    g.phi = phi;
    g.P_field = P;
    s.time += cfg.dt;
    s.step += 1;
    assert_density_bounds(s, law);
    return {ml};
}

inline StepResult scheme_step(const PressureLaw& law, GridState2D& s, GaugeState2D& g,
                              const SchemeConfig& cfg) {
    if (cfg.scheme == SchemeKind::direct) return direct_step_2d(law, s, cfg);
    return gauge_step_2d(law, s, g, cfg);
}

}  // namespace ceuler
