#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ceuler/numerics.hpp"
#include "ceuler/pressure.hpp"

namespace ceuler {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Constant state of the Riemann problem. pbar is the limit congestion
/// pressure; it is meaningful only for limit states at rho = rho_star.
struct RiemannState {
    double rho = 0.0;
    double q = 0.0;
    double pbar = 0.0;

    double u() const { return rho > 0.0 ? q / rho : 0.0; }
};

enum class WaveKind { shock, rarefaction, contact, declustering, vacuum_span };

inline std::string to_string(WaveKind k) {
    switch (k) {
        case WaveKind::shock: return "shock";
        case WaveKind::rarefaction: return "rarefaction";
        case WaveKind::contact: return "contact";
        case WaveKind::declustering: return "declustering";
        case WaveKind::vacuum_span: return "vacuum";
    }
    return "?";
}

struct Wave {
    WaveKind kind;
    double speed_lo, speed_hi;  // self-similar range; equal for discontinuities
    RiemannState left, right;
};

/// Ordered wave fan of one Riemann problem. `law` is present for finite-eps
/// solutions (needed to sample rarefaction interiors); limit structures
/// carry no law.
struct WaveStructure {
    RiemannState left, right;
    std::vector<Wave> waves;
    std::optional<PressureLaw> law;

    std::vector<RiemannState> intermediates() const {
        std::vector<RiemannState> out;
        for (size_t k = 0; k + 1 < waves.size(); ++k) out.push_back(waves[k].right);
        return out;
    }
};

// ---------------------------------------------------------------------------
// Wave curves
// ---------------------------------------------------------------------------

/// P(r1) - P(r0) where P is an antiderivative of sqrt(p'(u))/u. The
/// substitution u = s^2 removes the 1/u factor analytically, so the
/// integrand stays bounded near vacuum for gamma >= 2 and keeps an
/// integrable singularity otherwise.
inline double pressure_antiderivative_diff(const PressureLaw& law, double r0, double r1) {
    if (r0 == r1) return 0.0;
    auto g = [&](double s) { return 2.0 * std::sqrt(law.dp(s * s)) / s; };
    return integrate_adaptive(g, std::sqrt(r0), std::sqrt(r1), 1e-12);
}

/// Integral (rarefaction) curve through the anchor state:
/// i_pm(rho) = rho*u_hat +- rho*sqrt(eps)*(P(rho) - P(rho_hat)).
inline double integral_curve(const PressureLaw& law, const RiemannState& anchor, double rho,
                             int branch) {
    const double pd = pressure_antiderivative_diff(law, anchor.rho, rho);
    return rho * anchor.u() + branch * rho * std::sqrt(law.epsilon()) * pd;
}

/// Hugoniot curve through the anchor state:
/// h_pm(rho) = rho*u_hat +- sqrt(rho/rho_hat) sqrt((rho-rho_hat)(eps p(rho)-eps p(rho_hat)))
inline double hugoniot_curve(const PressureLaw& law, const RiemannState& anchor, double rho,
                             int branch) {
    const double dp = law.epsilon() * (law.p(rho) - law.p(anchor.rho));
    const double rad = (rho - anchor.rho) * dp;  // >= 0: both factors share sign
    return rho * anchor.u() + branch * std::sqrt(rho / anchor.rho) * std::sqrt(std::max(0.0, rad));
}

/// Shock speed for the state (rho, h_pm(rho)) connected to the anchor.
inline double shock_speed(const PressureLaw& law, const RiemannState& anchor, double rho,
                          int branch) {
    const double dp = law.epsilon() * (law.p(rho) - law.p(anchor.rho));
    return anchor.u() +
           branch * std::sqrt(rho / anchor.rho) * std::sqrt(dp / (rho - anchor.rho));
}

namespace detail {

inline double char_speed(const PressureLaw& law, double rho, double u, int branch) {
    return u + branch * std::sqrt(law.epsilon() * law.dp(rho));
}

/// Velocity along the composite 1-wave curve from the left datum
/// (rarefaction below the anchor density, shock above).
inline double left_wave_velocity(const PressureLaw& law, const RiemannState& left, double rho) {
    if (rho <= left.rho)
        return left.u() -
               std::sqrt(law.epsilon()) * pressure_antiderivative_diff(law, left.rho, rho);
    const double dp = law.epsilon() * (law.p(rho) - law.p(left.rho));
    return left.u() - std::sqrt((rho - left.rho) * dp / (rho * left.rho));
}

/// Velocity along the composite 2-wave curve from the right datum.
inline double right_wave_velocity(const PressureLaw& law, const RiemannState& right, double rho) {
    if (rho <= right.rho)
        return right.u() +
               std::sqrt(law.epsilon()) * pressure_antiderivative_diff(law, right.rho, rho);
    const double dp = law.epsilon() * (law.p(rho) - law.p(right.rho));
    return right.u() + std::sqrt((rho - right.rho) * dp / (rho * right.rho));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Finite-eps Riemann solver
// ---------------------------------------------------------------------------

/// Exact solution of the Riemann problem for finite eps: the intermediate
/// state is located where the composite wave curves from the two data
/// intersect; a vacuum opens when they only meet below the density floor.
inline WaveStructure solve_riemann_eps(const PressureLaw& law, const RiemannState& left,
                                       const RiemannState& right) {
    const double rs = law.rho_star();
    if (!(left.rho > 0.0) || left.rho >= rs || !(right.rho > 0.0) || right.rho >= rs)
        throw std::domain_error("solve_riemann_eps: data densities must lie in (0, rho_star)");

    WaveStructure ws;
    ws.left = left;
    ws.right = right;
    ws.law = law;
    if (left.rho == right.rho && left.q == right.q) return ws;

    auto gap = [&](double rho) {
        return detail::left_wave_velocity(law, left, rho) -
               detail::right_wave_velocity(law, right, rho);
    };

    const double floor = 1e-12;
    if (gap(floor) <= 0.0) {
        // Vacuum: two rarefactions down to zero density.
        const double uvl = detail::left_wave_velocity(law, left, floor);
        const double uvr = detail::right_wave_velocity(law, right, floor);
        const RiemannState vac{0.0, 0.0, 0.0};
        ws.waves.push_back({WaveKind::rarefaction,
                            detail::char_speed(law, left.rho, left.u(), -1), uvl, left, vac});
        ws.waves.push_back({WaveKind::vacuum_span, uvl, uvr, vac, vac});
        ws.waves.push_back({WaveKind::rarefaction, uvr,
                            detail::char_speed(law, right.rho, right.u(), +1), vac, right});
        return ws;
    }

    // Bracket the intersection against the singularity at rho_star.
    double hi = rs - std::min(law.delta(), 0.5 * (rs - std::max(left.rho, right.rho)));
    while (gap(hi) > 0.0) {
        const double g = rs - hi;
        if (g < 1e-13 * rs)
            throw solver_error("solve_riemann_eps: no intersection below rho_star");
        hi = rs - 0.1 * g;
    }
    const double rho_m = find_root_bracketed(gap, floor, hi);
    const double u_m = 0.5 * (detail::left_wave_velocity(law, left, rho_m) +
                              detail::right_wave_velocity(law, right, rho_m));
    const RiemannState mid{rho_m, rho_m * u_m, 0.0};

    if (rho_m > left.rho) {
        ws.waves.push_back(
            {WaveKind::shock, shock_speed(law, left, rho_m, -1),
             shock_speed(law, left, rho_m, -1), left, mid});
    } else if (rho_m < left.rho) {
        ws.waves.push_back({WaveKind::rarefaction,
                            detail::char_speed(law, left.rho, left.u(), -1),
                            detail::char_speed(law, rho_m, u_m, -1), left, mid});
    }
    if (rho_m > right.rho) {
        ws.waves.push_back(
            {WaveKind::shock, shock_speed(law, right, rho_m, +1),
             shock_speed(law, right, rho_m, +1), mid, right});
    } else if (rho_m < right.rho) {
        ws.waves.push_back({WaveKind::rarefaction,
                            detail::char_speed(law, rho_m, u_m, +1),
                            detail::char_speed(law, right.rho, right.u(), +1), mid, right});
    }
    return ws;
}

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

namespace detail {

/// Density inside a rarefaction fan at similarity speed xi.
inline RiemannState sample_fan(const PressureLaw& law, const Wave& w, double xi) {
    // A 1-fan is anchored at its left state, a 2-fan at its right state;
    // the characteristic speed is monotone in rho across the fan.
    const bool one_family = w.left.rho >= w.right.rho;
    const RiemannState& anchor = one_family ? w.left : w.right;
    const int branch = one_family ? -1 : +1;
    auto lambda = [&](double rho) {
        const double u =
            anchor.u() + (one_family ? -1.0 : 1.0) * std::sqrt(law.epsilon()) *
                             pressure_antiderivative_diff(law, anchor.rho, rho);
        return char_speed(law, rho, u, branch);
    };
    double lo = std::max(1e-14, std::min(w.left.rho, w.right.rho));
    double hi = std::max(w.left.rho, w.right.rho);
    auto f = [&](double rho) { return lambda(rho) - xi; };
    double fl = f(lo), fh = f(hi);
    if (fl * fh > 0.0) return std::abs(fl) < std::abs(fh) ? (one_family ? w.right : w.left)
                                                          : (one_family ? w.left : w.right);
    const double rho = find_root_bracketed(f, lo, hi);
    const double u = anchor.u() + (one_family ? -1.0 : 1.0) * std::sqrt(law.epsilon()) *
                                      pressure_antiderivative_diff(law, anchor.rho, rho);
    return {rho, rho * u, 0.0};
}

}  // namespace detail

/// Evaluate the self-similar solution at xi = x/t.
inline RiemannState sample_solution(const WaveStructure& ws, double xi) {
    if (ws.waves.empty()) return ws.left;
    RiemannState state = ws.left;
    for (const Wave& w : ws.waves) {
        if (xi < w.speed_lo) return state;
        if (xi < w.speed_hi) {
            switch (w.kind) {
                case WaveKind::rarefaction:
                    if (!ws.law)
                        throw solver_error("sample_solution: fan sampling requires a law");
                    return detail::sample_fan(*ws.law, w, xi);
                case WaveKind::vacuum_span:
                    return {0.0, 0.0, 0.0};
                default:
                    return w.right;  // zero-width cases handled by xi >= speed_hi
            }
        }
        state = w.right;
    }
    return ws.right;
}

// ---------------------------------------------------------------------------
// Limit (eps -> 0) Riemann solver
// ---------------------------------------------------------------------------

namespace detail {

inline bool congested(const PressureLaw& law, const RiemannState& s) {
    return s.rho >= law.rho_star() * (1.0 - 1e-12) || s.pbar > 0.0;
}

inline RiemannState mirror(const RiemannState& s) { return {s.rho, -s.q, s.pbar}; }

inline WaveStructure mirror(const WaveStructure& in) {
    WaveStructure out;
    out.left = mirror(in.right);
    out.right = mirror(in.left);
    out.law = in.law;
    for (auto it = in.waves.rbegin(); it != in.waves.rend(); ++it) {
        Wave w;
        w.kind = it->kind;
        w.speed_lo = -it->speed_hi;
        w.speed_hi = -it->speed_lo;
        w.left = mirror(it->right);
        w.right = mirror(it->left);
        out.waves.push_back(w);
    }
    return out;
}

}  // namespace detail

/// Closed-form solution of the Riemann problem for the limit system
/// (pressureless dynamics below rho_star, incompressible at rho_star).
/// The case split keys on congestion of the data and the sign of the
/// relative velocity.
inline WaveStructure limit_riemann(const PressureLaw& law, const RiemannState& left,
                                   const RiemannState& right) {
    const double rs = law.rho_star();
    const bool cl = detail::congested(law, left);
    const bool cr = detail::congested(law, right);
    const double ul = left.u(), ur = right.u();

    WaveStructure ws;
    ws.left = left;
    ws.right = right;

    auto push = [&](Wave w) { ws.waves.push_back(w); };
    const RiemannState vac{0.0, 0.0, 0.0};

    if (!cl && !cr) {
        if (ul < ur) {
            // two contact waves framing a vacuum
            const RiemannState left0{left.rho, left.q, 0.0};
            const RiemannState right0{right.rho, right.q, 0.0};
            push({WaveKind::contact, ul, ul, left0, vac});
            push({WaveKind::vacuum_span, ul, ur, vac, vac});
            push({WaveKind::contact, ur, ur, vac, right0});
        } else if (ul > ur) {
            const double sl = std::sqrt((rs - left.rho) / (left.rho * rs));
            const double sr = std::sqrt((rs - right.rho) / (right.rho * rs));
            const double pbar = std::pow((ul - ur) / (sl + sr), 2);
            const double qt = ul * rs - std::sqrt(rs / left.rho) *
                                            std::sqrt((rs - left.rho) * pbar);
            const RiemannState mid{rs, qt, pbar};
            const double sig_m = ul - std::sqrt(rs / (left.rho * (rs - left.rho))) *
                                          std::sqrt(pbar);
            const double sig_p = ur + std::sqrt(rs / (right.rho * (rs - right.rho))) *
                                          std::sqrt(pbar);
            push({WaveKind::shock, sig_m, sig_m, left, mid});
            push({WaveKind::shock, sig_p, sig_p, mid, right});
        } else if (left.rho != right.rho || left.q != right.q) {
            push({WaveKind::contact, ul, ul, left, right});
        }
        return ws;
    }

    if (cl && !cr) {
        if (ul < ur) {
            const RiemannState relaxed{rs, left.q, 0.0};
            if (left.pbar > 0.0)
                push({WaveKind::declustering, -kInf, -kInf, left, relaxed});
            push({WaveKind::contact, ul, ul, relaxed, vac});
            push({WaveKind::vacuum_span, ul, ur, vac, vac});
            push({WaveKind::contact, ur, ur, vac, right});
        } else if (ul > ur) {
            const double pbar = rs * right.rho / (rs - right.rho) * (ul - ur) * (ul - ur);
            const RiemannState mid{rs, rs * ul, pbar};
            const double sig_p =
                ur + std::sqrt(rs / right.rho) * std::sqrt(pbar / (rs - right.rho));
            push({WaveKind::shock, -kInf, -kInf, left, mid});
            push({WaveKind::shock, sig_p, sig_p, mid, right});
        } else {
            const RiemannState relaxed{rs, left.q, 0.0};
            if (left.pbar > 0.0)
                push({WaveKind::declustering, -kInf, -kInf, left, relaxed});
            push({WaveKind::contact, ul, ul, relaxed, right});
        }
        return ws;
    }

    if (!cl && cr) return detail::mirror(limit_riemann(law, detail::mirror(right),
                                                       detail::mirror(left)));

    // both congested
    if (ul < ur) {
        const RiemannState lrel{rs, left.q, 0.0};
        const RiemannState rrel{rs, right.q, 0.0};
        if (left.pbar > 0.0) push({WaveKind::declustering, -kInf, -kInf, left, lrel});
        push({WaveKind::contact, ul, ul, lrel, vac});
        push({WaveKind::vacuum_span, ul, ur, vac, vac});
        push({WaveKind::contact, ur, ur, vac, rrel});
        if (right.pbar > 0.0) push({WaveKind::declustering, kInf, kInf, rrel, right});
        return ws;
    }
    if (ul > ur) {
        if (!(left.pbar > 0.0) || !(right.pbar > 0.0))
            throw std::domain_error(
                "limit_riemann: colliding congested states need positive pbar data");
        if (left.pbar < right.pbar)
            return detail::mirror(limit_riemann(law, detail::mirror(right),
                                                detail::mirror(left)));
        // |q_t - q_l| / |q_t - q_r| = (pbar_r / pbar_l)^(1/(2 gamma)),
        // solved on (q_r, q_l)
        const double k = std::pow(right.pbar / left.pbar, 1.0 / (2.0 * law.gamma()));
        const double qt = find_root_bracketed(
            [&](double q) { return (left.q - q) - k * (q - right.q); },
            std::min(left.q, right.q), std::max(left.q, right.q));
        const RiemannState mid{rs, qt, kInf};
        push({WaveKind::shock, -kInf, -kInf, left, mid});
        push({WaveKind::shock, kInf, kInf, mid, right});
        return ws;
    }
    // equal velocities: instantaneous propagation of the right state
    if (left.pbar != right.pbar || left.q != right.q)
        push({WaveKind::declustering, -kInf, -kInf, left, right});
    return ws;
}

// ---------------------------------------------------------------------------
// Cluster collision
// ---------------------------------------------------------------------------

/// Aggregation of two touching congested clusters [a, m] and [m, b] with
/// pre-collision speeds u_l, u_r: merged speed and the impulsive pressure
/// profile pi(x) (the delta-in-time multiplier).
struct ClusterCollision {
    double rho_star;
    double a, m, b;
    double u_l, u_r;
    double u;  // post-collision speed

    double pi(double x) const {
        if (x < a || x > b) return 0.0;
        if (x <= m) return rho_star * ((u - u_l) * (m - x) + (u - u_r) * (b - m));
        return rho_star * (u - u_r) * (b - x);
    }
};

inline ClusterCollision cluster_collision(double rho_star, double u_l, double u_r, double a,
                                          double m, double b) {
    if (!(a <= m) || !(m <= b) || !(a < b))
        throw std::invalid_argument("cluster_collision: need a <= m <= b, a < b");
    const double u = (u_l * (m - a) + u_r * (b - m)) / (b - a);
    return {rho_star, a, m, b, u_l, u_r, u};
}

// ---------------------------------------------------------------------------
// Composition of juxtaposed Riemann problems
// ---------------------------------------------------------------------------

struct interaction_error : solver_error {
    interaction_error(double t, double requested)
        : solver_error("riemann composition: waves interact at t = " + std::to_string(t) +
                       " before requested time " + std::to_string(requested)),
          time(t) {}
    double time;
};

struct ComposedRiemann {
    std::vector<double> positions;        // jump locations, increasing
    std::vector<WaveStructure> problems;  // one structure per jump
    double first_interaction = kInf;
};

namespace detail {

inline std::pair<double, double> finite_speed_span(const WaveStructure& ws) {
    double lo = 0.0, hi = 0.0;
    bool any = false;
    for (const Wave& w : ws.waves) {
        if (w.kind == WaveKind::declustering) continue;  // moves only pbar
        if (std::isinf(w.speed_lo) || std::isinf(w.speed_hi))
            return {-kInf, kInf};  // genuinely infinite transport
        if (!any) {
            lo = w.speed_lo;
            hi = w.speed_hi;
            any = true;
        } else {
            lo = std::min(lo, w.speed_lo);
            hi = std::max(hi, w.speed_hi);
        }
    }
    return {lo, hi};
}

}  // namespace detail

inline ComposedRiemann compose_riemann(std::vector<double> positions,
                                       std::vector<WaveStructure> problems, double t) {
    if (positions.size() != problems.size() || positions.empty())
        throw std::invalid_argument("compose_riemann: one structure per position required");
    ComposedRiemann c{std::move(positions), std::move(problems), kInf};
    for (size_t k = 0; k + 1 < c.positions.size(); ++k) {
        const auto [lo0, hi0] = detail::finite_speed_span(c.problems[k]);
        const auto [lo1, hi1] = detail::finite_speed_span(c.problems[k + 1]);
        (void)lo0;
        (void)hi1;
        if (hi0 > lo1) {
            const double tstar = (c.positions[k + 1] - c.positions[k]) / (hi0 - lo1);
            c.first_interaction = std::min(c.first_interaction, tstar);
        }
    }
    if (t >= c.first_interaction) throw interaction_error(c.first_interaction, t);
    return c;
}

inline RiemannState sample_composed(const ComposedRiemann& c, double x, double t) {
    if (!(t > 0.0)) throw std::invalid_argument("sample_composed: need t > 0");
    for (size_t k = 0; k < c.positions.size(); ++k) {
        const auto [lo, hi] = detail::finite_speed_span(c.problems[k]);
        (void)lo;
        if (x <= c.positions[k] + t * hi)
            return sample_solution(c.problems[k], (x - c.positions[k]) / t);
    }
    return sample_solution(c.problems.back(), (x - c.positions.back()) / t);
}

}  // namespace ceuler
