#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

namespace ceuler {

/// Singular congestion pressure law p(rho) = (1/rho - 1/rho_star)^(-gamma)
/// together with its explicit/implicit splitting p = p0 + p1.
///
/// p0 equals p/2 up to the junction density rho_star - delta,
/// delta = epsilon^(1/(gamma+2)), and continues as the second-order
/// Taylor polynomial of p/2 beyond it, so p0, p0', p0'' stay bounded
/// for all densities while p1 = p - p0 keeps the singularity at
/// rho_star. All evaluations are pure; the law is immutable.
class PressureLaw {
public:
    PressureLaw(double gamma, double rho_star, double epsilon, bool split = true)
        : gamma_(gamma), rho_star_(rho_star), eps_(epsilon), split_(split) {
        if (!(gamma > 0.0))
            throw std::invalid_argument("PressureLaw: gamma must be positive");
        if (!(rho_star > 0.0))
            throw std::invalid_argument("PressureLaw: rho_star must be positive");
        if (!(epsilon > 0.0) || epsilon > 1.0)
            throw std::invalid_argument("PressureLaw: epsilon must be in (0, 1]");
        delta_ = std::pow(epsilon, 1.0 / (gamma + 2.0));
        if (!(delta_ < rho_star))
            throw std::invalid_argument(
                "PressureLaw: splitting threshold delta = " + std::to_string(delta_) +
                " must be below rho_star = " + std::to_string(rho_star));
        junction_ = rho_star_ - delta_;
        pj_ = p(junction_);
        dpj_ = dp(junction_);
        ddpj_ = ddp(junction_);
    }

    double gamma() const { return gamma_; }
    double rho_star() const { return rho_star_; }
    double epsilon() const { return eps_; }
    double delta() const { return delta_; }
    double junction() const { return junction_; }
    bool split() const { return split_; }

    /// Same law with the splitting disabled (p0 = 0, p1 = p).
    PressureLaw unsplit() const { return PressureLaw(gamma_, rho_star_, eps_, false); }

    /// p(rho); diverges as rho -> rho_star, p(0) = 0.
    double p(double rho) const {
        check_density(rho);
        if (rho == 0.0) return 0.0;
        const double s = rho / rho_star_;
        return std::pow(rho, gamma_) * std::pow(1.0 - s, -gamma_);
    }

    /// p'(rho) = gamma * rho^(gamma-1) * (1 - rho/rho_star)^(-gamma-1)
    double dp(double rho) const {
        check_density(rho);
        const double s = rho / rho_star_;
        return gamma_ * std::pow(rho, gamma_ - 1.0) * std::pow(1.0 - s, -gamma_ - 1.0);
    }

    /// p''(rho) = gamma * rho^(gamma-2) * (1-s)^(-gamma-2) * (gamma - 1 + 2 s)
    double ddp(double rho) const {
        check_density(rho);
        const double s = rho / rho_star_;
        return gamma_ * std::pow(rho, gamma_ - 2.0) * std::pow(1.0 - s, -gamma_ - 2.0) *
               (gamma_ - 1.0 + 2.0 * s);
    }

    std::pair<double, double> pressure_derivatives(double rho) const {
        return {dp(rho), ddp(rho)};
    }

    /// Explicit part. Defined for every rho >= 0 (quadratic branch above
    /// the junction extends globally).
    double p0(double rho) const {
        if (rho < 0.0)
            throw std::domain_error("p0: negative density");
        if (!split_) return 0.0;
        if (rho > junction_) {
            const double d = rho - junction_;
            return 0.5 * (pj_ + dpj_ * d + 0.5 * ddpj_ * d * d);
        }
        return 0.5 * p(rho);
    }

    double dp0(double rho) const {
        if (rho < 0.0)
            throw std::domain_error("dp0: negative density");
        if (!split_) return 0.0;
        if (rho > junction_) return 0.5 * (dpj_ + ddpj_ * (rho - junction_));
        if (rho == 0.0) return 0.5 * dp_at_zero();
        return 0.5 * dp(rho);
    }

    double ddp0(double rho) const {
        if (rho < 0.0)
            throw std::domain_error("ddp0: negative density");
        if (!split_) return 0.0;
        if (rho > junction_) return 0.5 * ddpj_;
        return 0.5 * ddp(rho);
    }

    /// Implicit part p1 = p - p0; strictly increasing, diverges at rho_star.
    double p1(double rho) const {
        if (!split_) return p(rho);
        return p(rho) - p0(rho);
    }

    double dp1(double rho) const {
        if (!split_) return dp(rho);
        return dp(rho) - dp0(rho);
    }

    /// sqrt(eps * p0'(rho)): the explicit-part sound speed entering the
    /// diffusion coefficient and the CFL condition. Bounded uniformly in
    /// rho, including at and above rho_star.
    double explicit_sound_speed(double rho) const {
        return std::sqrt(eps_ * dp0(rho));
    }

    /// Unique rho in [0, rho_star) with p1(rho) = y. Safeguarded Newton
    /// bracketed by bisection; the result is strictly below rho_star for
    /// every finite y.
    double invert_p1(double y) const {
        if (y < 0.0)
            throw std::domain_error("invert_p1: negative pressure value");
        if (y == 0.0) return 0.0;
        // Closed-form inverse of the sub-threshold branch as initial guess:
        // p(r) = 2y (or p(r) = y when the splitting is off).
        const double ptarget = split_ ? 2.0 * y : y;
        const double w = std::pow(ptarget, -1.0 / gamma_);
        double guess = rho_star_ / (1.0 + rho_star_ * w);
        return invert_p1(y, guess);
    }

    double invert_p1(double y, double seed) const {
        if (y < 0.0)
            throw std::domain_error("invert_p1: negative pressure value");
        if (y == 0.0) return 0.0;
        const double hi_eval = rho_star_ * (1.0 - 1e-13);
        double lo = 0.0;
        double hi = rho_star_;  // open; refined once an iterate overshoots
        double r = seed;
        if (!(r > 0.0) || r > hi_eval) r = 0.5 * hi_eval;
        const double ytol = 4.0 * std::numeric_limits<double>::epsilon() * y;
        for (int it = 0; it < 200; ++it) {
            const double f = p1(r) - y;
            if (f > 0.0) hi = std::min(hi, r);
            else lo = std::max(lo, r);
            if (std::abs(f) <= ytol) return r;
            const double d = dp1(r);
            double rn = (d > 0.0) ? r - f / d : -1.0;
            if (!(rn > lo) || !(rn < hi)) rn = 0.5 * (lo + std::min(hi, hi_eval));
            if (std::abs(rn - r) <= 1e-16 * rho_star_) return rn;
            r = rn;
        }
        return r;  // bracket collapsed to roundoff; best iterate
    }

private:
    double dp_at_zero() const {
        // limit of p' as rho -> 0+ (finite only for gamma >= 1)
        if (gamma_ > 1.0) return 0.0;
        if (gamma_ == 1.0) return 1.0;
        return std::numeric_limits<double>::infinity();
    }

    void check_density(double rho) const {
        if (rho < 0.0)
            throw std::domain_error("pressure: negative density rho = " + std::to_string(rho));
        if (rho >= rho_star_ * (1.0 - 1e-14))
            throw std::domain_error("pressure: density " + std::to_string(rho) +
                                    " at or beyond the congestion density " +
                                    std::to_string(rho_star_));
    }

    double gamma_;
    double rho_star_;
    double eps_;
    bool split_;
    double delta_;
    double junction_;
    double pj_, dpj_, ddpj_;  // p, p', p'' at the junction
};

}  // namespace ceuler
