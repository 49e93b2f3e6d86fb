#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <queue>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ceuler {

struct solver_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline double max_norm(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

// ---------------------------------------------------------------------------
// Banded linear systems
// ---------------------------------------------------------------------------

/// Sparse banded matrix given as diagonals. For a band with offset d and
/// coefficient array a, row i carries the entry a[i] at column i + d
/// (rows whose column falls outside [0, n) are ignored).
struct BandedSystem {
    int n = 0;
    std::vector<std::pair<int, std::vector<double>>> bands;
    std::vector<double> rhs;

    void add_band(int offset, std::vector<double> coeffs) {
        bands.emplace_back(offset, std::move(coeffs));
    }

    std::vector<double> apply(const std::vector<double>& x) const {
        std::vector<double> y(n, 0.0);
        for (const auto& [d, a] : bands) {
            const int lo = std::max(0, -d);
            const int hi = std::min(n, n - d);
            for (int i = lo; i < hi; ++i) y[i] += a[i] * x[i + d];
        }
        return y;
    }
};

/// Banded LU factorization with partial pivoting.
class BandedLU {
public:
    BandedLU(const BandedSystem& sys) : n_(sys.n) {
        kl_ = ku_ = 0;
        for (const auto& [d, a] : sys.bands) {
            (void)a;
            kl_ = std::max(kl_, -d);
            ku_ = std::max(ku_, d);
        }
        width_ = 2 * kl_ + ku_ + 1;  // room for pivoting fill-in
        w_.assign(static_cast<size_t>(n_) * width_, 0.0);
        piv_.assign(n_, 0);
        for (const auto& [d, a] : sys.bands) {
            const int lo = std::max(0, -d);
            const int hi = std::min(n_, n_ - d);
            for (int i = lo; i < hi; ++i) at(i, i + d) += a[i];
        }
        factorize();
    }

    std::vector<double> solve(const std::vector<double>& b) const {
        std::vector<double> x = b;
        for (int k = 0; k < n_; ++k) {
            if (piv_[k] != k) std::swap(x[k], x[piv_[k]]);
            const int rmax = std::min(n_ - 1, k + kl_);
            for (int r = k + 1; r <= rmax; ++r) x[r] -= cat(r, k) * x[k];
        }
        for (int k = n_ - 1; k >= 0; --k) {
            const int jmax = std::min(n_ - 1, k + kl_ + ku_);
            for (int j = k + 1; j <= jmax; ++j) x[k] -= cat(k, j) * x[j];
            x[k] /= cat(k, k);
        }
        return x;
    }

private:
    double& at(int i, int j) { return w_[static_cast<size_t>(i) * width_ + (j - i + kl_)]; }
    double cat(int i, int j) const {
        return w_[static_cast<size_t>(i) * width_ + (j - i + kl_)];
    }
    bool in_band(int i, int j) const {
        const int c = j - i + kl_;
        return c >= 0 && c < width_;
    }

    void factorize() {
        for (int k = 0; k < n_; ++k) {
            int rp = k;
            double best = std::abs(cat(k, k));
            const int rmax = std::min(n_ - 1, k + kl_);
            for (int r = k + 1; r <= rmax; ++r) {
                const double v = in_band(r, k) ? std::abs(cat(r, k)) : 0.0;
                if (v > best) {
                    best = v;
                    rp = r;
                }
            }
            piv_[k] = rp;
            if (rp != k) {
                const int jmax = std::min(n_ - 1, k + kl_ + ku_);
                for (int j = k; j <= jmax; ++j) {
                    double vk = in_band(k, j) ? cat(k, j) : 0.0;
                    double vp = in_band(rp, j) ? cat(rp, j) : 0.0;
                    at(k, j) = vp;
                    at(rp, j) = vk;
                }
            }
            const double pivot = cat(k, k);
            if (!(std::abs(pivot) > 1e-300) || !std::isfinite(pivot))
                throw solver_error("banded solve: singular pivot at row " + std::to_string(k));
            const int jmax = std::min(n_ - 1, k + kl_ + ku_);
            for (int r = k + 1; r <= rmax; ++r) {
                const double m = (in_band(r, k) ? cat(r, k) : 0.0) / pivot;
                at(r, k) = m;
                if (m == 0.0) continue;
                for (int j = k + 1; j <= jmax; ++j) at(r, j) -= m * cat(k, j);
            }
        }
    }

    int n_, kl_, ku_, width_;
    std::vector<double> w_;
    std::vector<int> piv_;
};

/// Direct banded solve with one step of iterative refinement. The result
/// satisfies |A x - b|_inf <= 1e-12 (1 + |b|_inf) or a solver_error is
/// raised.
inline std::vector<double> solve_banded(const BandedSystem& sys) {
    if (sys.n <= 0 || static_cast<int>(sys.rhs.size()) != sys.n)
        throw solver_error("solve_banded: inconsistent dimensions");
    BandedLU lu(sys);
    std::vector<double> x = lu.solve(sys.rhs);
    std::vector<double> r = sys.apply(x);
    for (int i = 0; i < sys.n; ++i) r[i] = sys.rhs[i] - r[i];
    if (max_norm(r) > 1e-13 * (1.0 + max_norm(sys.rhs))) {
        const std::vector<double> dx = lu.solve(r);
        for (int i = 0; i < sys.n; ++i) x[i] += dx[i];
        r = sys.apply(x);
        for (int i = 0; i < sys.n; ++i) r[i] = sys.rhs[i] - r[i];
    }
    if (max_norm(r) > 1e-12 * (1.0 + max_norm(sys.rhs)))
        throw solver_error("solve_banded: residual " + std::to_string(max_norm(r)) +
                           " after refinement; system ill-conditioned");
    return x;
}

// ---------------------------------------------------------------------------
// Matrix-free Krylov solve for the structured-grid stencil systems
// ---------------------------------------------------------------------------

/// Preconditioned BiCGStab (diagonal preconditioner given as its inverse).
/// Handles the mildly nonsymmetric operators the boundary closures produce.
/// Converges to |b - A x|_2 <= rtol |b|_2.
template <typename ApplyFn>
std::vector<double> bicgstab(ApplyFn&& A, const std::vector<double>& b,
                             std::vector<double> x, const std::vector<double>& inv_diag,
                             double rtol = 1e-12, int max_iter = 20000) {
    const size_t n = b.size();
    auto dot = [](const std::vector<double>& u, const std::vector<double>& v) {
        double s = 0.0;
        for (size_t i = 0; i < u.size(); ++i) s += u[i] * v[i];
        return s;
    };
    std::vector<double> r = A(x);
    for (size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
    const double bnorm = std::sqrt(dot(b, b));
    const double tol = rtol * (bnorm > 0.0 ? bnorm : 1.0);
    if (std::sqrt(dot(r, r)) <= tol) return x;

    std::vector<double> r0 = r, p = r, v(n), s(n), t(n), ph(n), sh(n);
    double rho_prev = dot(r0, r);
    for (int it = 0; it < max_iter; ++it) {
        for (size_t i = 0; i < n; ++i) ph[i] = p[i] * inv_diag[i];
        v = A(ph);
        const double alpha = rho_prev / dot(r0, v);
        for (size_t i = 0; i < n; ++i) s[i] = r[i] - alpha * v[i];
        if (std::sqrt(dot(s, s)) <= tol) {
            for (size_t i = 0; i < n; ++i) x[i] += alpha * ph[i];
            return x;
        }
        for (size_t i = 0; i < n; ++i) sh[i] = s[i] * inv_diag[i];
        t = A(sh);
        const double omega = dot(t, s) / dot(t, t);
        for (size_t i = 0; i < n; ++i) {
            x[i] += alpha * ph[i] + omega * sh[i];
            r[i] = s[i] - omega * t[i];
        }
        if (std::sqrt(dot(r, r)) <= tol) return x;
        const double rho = dot(r0, r);
        if (!std::isfinite(rho) || omega == 0.0)
            throw solver_error("bicgstab: breakdown");
        const double beta = (rho / rho_prev) * (alpha / omega);
        rho_prev = rho;
        for (size_t i = 0; i < n; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
    }
    throw solver_error("bicgstab: no convergence within iteration budget");
}

// ---------------------------------------------------------------------------
// Damped Newton iteration
// ---------------------------------------------------------------------------

struct NewtonOptions {
    double residual_tol = 1e-10;  // max-norm stopping tolerance
    int max_iter = 100;
    double damping = 0.5;  // backtracking factor
    int max_backtracks = 30;
};

struct newton_error : solver_error {
    newton_error(const std::string& msg, std::vector<double> iterate, double norm)
        : solver_error(msg), last_iterate(std::move(iterate)), residual_norm(norm) {}
    std::vector<double> last_iterate;
    double residual_norm;
};

/// Damped Newton iteration on a vector residual. `jac_solve(x, r)` must
/// return the step d with J(x) d = r; `project` clamps trial iterates to
/// the admissible set (identity by default). The step is halved while the
/// residual max-norm fails to decrease.
template <typename ResidualFn, typename JacSolveFn,
          typename ProjectFn = std::function<void(std::vector<double>&)>>
std::vector<double> newton_solve(
    ResidualFn&& residual, JacSolveFn&& jac_solve, std::vector<double> x,
    const NewtonOptions& opts = {},
    ProjectFn project = [](std::vector<double>&) {}) {
    std::vector<double> r = residual(x);
    double rn = max_norm(r);
    for (int it = 0; it < opts.max_iter; ++it) {
        if (rn <= opts.residual_tol) return x;
        const std::vector<double> d = jac_solve(x, r);
        double t = 1.0;
        std::vector<double> xt(x.size()), rt;
        double rtn = std::numeric_limits<double>::infinity();
        for (int bt = 0;; ++bt) {
            for (size_t i = 0; i < x.size(); ++i) xt[i] = x[i] - t * d[i];
            project(xt);
            rt = residual(xt);
            rtn = max_norm(rt);
            if (std::isfinite(rtn) && rtn < rn) break;
            if (bt >= opts.max_backtracks) {
                if (!std::isfinite(rtn))
                    throw newton_error("newton_solve: residual not finite", x, rn);
                break;  // accept a non-decreasing short step; outer loop may recover
            }
            t *= opts.damping;
        }
        x.swap(xt);
        r.swap(rt);
        rn = rtn;
    }
    if (rn <= opts.residual_tol) return x;
    throw newton_error("newton_solve: no convergence after " +
                           std::to_string(opts.max_iter) +
                           " iterations, residual max-norm " + std::to_string(rn),
                       x, rn);
}

// ---------------------------------------------------------------------------
// Bracketed scalar root finding (Brent)
// ---------------------------------------------------------------------------

template <typename F>
double find_root_bracketed(F&& f, double lo, double hi) {
    double a = lo, b = hi;
    double fa = f(a), fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if (fa * fb > 0.0)
        throw solver_error("find_root_bracketed: f(lo) and f(hi) have the same sign");
    double c = a, fc = fa, d = b - a, e = d;
    for (int it = 0; it < 200; ++it) {
        if (std::abs(fc) < std::abs(fb)) {
            a = b; b = c; c = a;
            fa = fb; fb = fc; fc = fa;
        }
        const double tol = 2.0 * std::numeric_limits<double>::epsilon() * std::abs(b) +
                           0.5 * 1e-14 * (std::abs(lo) + std::abs(hi));
        const double m = 0.5 * (c - b);
        if (std::abs(m) <= tol || fb == 0.0) return b;
        if (std::abs(e) < tol || std::abs(fa) <= std::abs(fb)) {
            d = m; e = m;  // bisection
        } else {
            double p, q;
            const double s = fb / fa;
            if (a == c) {  // secant
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {  // inverse quadratic
                const double qq = fa / fc, rr = fb / fc;
                p = s * (2.0 * m * qq * (qq - rr) - (b - a) * (rr - 1.0));
                q = (qq - 1.0) * (rr - 1.0) * (s - 1.0);
            }
            if (p > 0.0) q = -q;
            p = std::abs(p);
            if (2.0 * p < std::min(3.0 * m * q - std::abs(tol * q), std::abs(e * q))) {
                e = d; d = p / q;  // accept interpolation
            } else {
                d = m; e = m;
            }
        }
        a = b; fa = fb;
        b += (std::abs(d) > tol) ? d : (m > 0 ? tol : -tol);
        fb = f(b);
        if ((fb > 0.0) == (fc > 0.0)) {
            c = a; fc = fa; e = d = b - a;
        }
    }
    return b;
}

// ---------------------------------------------------------------------------
// Adaptive quadrature (Gauss-Legendre pair, globally adaptive)
// ---------------------------------------------------------------------------

namespace detail {

/// Gauss-Legendre nodes/weights on [-1, 1], computed by Newton on the
/// Legendre recurrence. Open rule: endpoints are never evaluated, so
/// integrable endpoint singularities are admissible.
inline std::pair<std::vector<double>, std::vector<double>> make_gauss_rule(int n) {
    std::vector<double> x(n), w(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        w[n - 1 - i] = w[i];
    }
    return {std::move(x), std::move(w)};
}

template <typename F>
std::pair<double, double> gauss_panel(F&& f, double a, double b) {
    static const auto rule7 = make_gauss_rule(7);
    static const auto rule15 = make_gauss_rule(15);
    const auto& [x7, w7] = rule7;
    const auto& [x15, w15] = rule15;
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double coarse = 0.0, fine = 0.0;
    for (int i = 0; i < 7; ++i) coarse += w7[i] * f(mid + half * x7[i]);
    for (int i = 0; i < 15; ++i) fine += w15[i] * f(mid + half * x15[i]);
    coarse *= half;
    fine *= half;
    return {fine, std::abs(fine - coarse)};
}

}  // namespace detail

/// Globally adaptive quadrature of f over (a, b) to absolute tolerance tol.
/// Panels are refined worst-first; throws with the best estimate attached
/// if the subdivision budget is exhausted.
template <typename F>
double integrate_adaptive(F&& f, double a, double b, double tol = 1e-10) {
    if (a == b) return 0.0;
    struct Panel {
        double err, a, b, val;
        bool operator<(const Panel& o) const { return err < o.err; }
    };
    std::priority_queue<Panel> panels;
    auto [v0, e0] = detail::gauss_panel(f, a, b);
    panels.push({e0, a, b, v0});
    double total_val = v0, total_err = e0;
    const int max_panels = 200000;
    for (int it = 0; it < max_panels && total_err > tol; ++it) {
        const Panel p = panels.top();
        panels.pop();
        const double m = 0.5 * (p.a + p.b);
        if (m <= p.a || m >= p.b) {  // interval at roundoff width
            panels.push({0.0, p.a, p.b, p.val});
            total_err -= p.err;
            continue;
        }
        auto [vl, el] = detail::gauss_panel(f, p.a, m);
        auto [vr, er] = detail::gauss_panel(f, m, p.b);
        total_val += vl + vr - p.val;
        total_err += el + er - p.err;
        panels.push({el, p.a, m, vl});
        panels.push({er, m, p.b, vr});
    }
    if (!(total_err <= tol) || !std::isfinite(total_val))
        throw solver_error("integrate_adaptive: tolerance " + std::to_string(tol) +
                           " not reached, best estimate " + std::to_string(total_val) +
                           " with error " + std::to_string(total_err));
    return total_val;
}

}  // namespace ceuler
