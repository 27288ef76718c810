#pragma once

// Forward cone radius r(t) = r0 + int_0^t c/a, q(t) = a r^2 / a0 and its monotone envelope.

#include <cmath>
#include <optional>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "cosmology.hpp"

namespace flrw {

enum class Monotonicity { NonDecreasing, NonIncreasing, NotMonotone };

inline const char* to_string(Monotonicity m) {
    switch (m) {
        case Monotonicity::NonDecreasing: return "NonDecreasing";
        case Monotonicity::NonIncreasing: return "NonIncreasing";
        case Monotonicity::NotMonotone: return "NotMonotone";
    }
    return "?";
}

struct QClassification {
    Monotonicity verdict = Monotonicity::NotMonotone;
    double q_dot_at_zero = 0.0;
    std::optional<double> d_at_zero;  // r0 + 2c/(a0 H), H != 0 only
};

/// Sufficient monotonicity conditions for q. The boundary r0 = -2c/(a0 H) satisfies
/// both rows and resolves to NonDecreasing.
inline QClassification classify_q(const CosmologyParams& p, double r0) {
    QClassification out;
    if (p.H == 0.0) {
        out.verdict = Monotonicity::NonDecreasing;
        out.q_dot_at_zero = 2.0 * p.c * r0 / p.a0;
        return out;
    }
    const double d0 = r0 + 2.0 * p.c / (p.a0 * p.H);
    out.d_at_zero = d0;
    out.q_dot_at_zero = p.H * r0 * d0;
    const double sigma_edge = -1.0 + 1.0 / p.n;
    const double r_edge = -2.0 * p.c / (p.a0 * p.H);
    if (p.H > 0.0 || (p.sigma <= sigma_edge && r0 <= r_edge))
        out.verdict = Monotonicity::NonDecreasing;
    else if (p.sigma >= sigma_edge && r0 >= r_edge)
        out.verdict = Monotonicity::NonIncreasing;
    else
        out.verdict = Monotonicity::NotMonotone;
    return out;
}

struct ConeGeometry {
    CosmologyParams params;
    double r0 = 1.0;
    Monotonicity monotonicity = Monotonicity::NotMonotone;

    ConeGeometry() = default;
    ConeGeometry(const CosmologyParams& p, double radius) : params(p), r0(radius) {
        params.validate();
        if (!(r0 > 0.0) || !std::isfinite(r0)) throw std::invalid_argument("r0 must be positive");
        monotonicity = classify_q(params, r0).verdict;
    }

    double horizon() const { return horizon_end(params); }
};

inline QClassification classify_q(const ConeGeometry& g) { return classify_q(g.params, g.r0); }

namespace detail {

// exponent n(1+sigma)/2 - 1 of (a/a0) in r(t) and d(t)
inline double cone_exponent(const CosmologyParams& p) { return 0.5 * p.n * (1.0 + p.sigma) - 1.0; }

}  // namespace detail

/// r(t) from the closed forms (linear, power law, logarithmic).
inline double comoving_radius(const ConeGeometry& g, double t) {
    const auto& p = g.params;
    detail::require_in_domain(t, horizon_end(p));
    if (p.H == 0.0) return g.r0 + p.c * t / p.a0;
    const double log_ratio = log_scale_ratio(p, t);
    const double k = detail::cone_exponent(p);
    if (k == 0.0) return g.r0 + p.c * log_ratio / (p.a0 * p.H);
    return g.r0 + p.c * std::expm1(k * log_ratio) / (p.a0 * p.H * k);
}

/// r(t) for an arbitrary scale model by adaptive quadrature of c/a (relative tolerance 1e-10).
inline double comoving_radius(const ScaleModel& model, double c, double r0, double t) {
    if (const auto* cf = std::get_if<ClosedFormFLRW>(&model)) {
        ConeGeometry g;
        g.params = cf->params;
        g.r0 = r0;
        return comoving_radius(g, t);
    }
    detail::require_in_domain(t, model_horizon(model));
    if (t == 0.0) return r0;
    const auto& tab = std::get<TabulatedScale>(model);
    auto integrand = [&](double s) { return c / tab(s); };
    const double integral =
        boost::math::quadrature::gauss_kronrod<double, 15>::integrate(integrand, 0.0, t, 20, 1e-10);
    return r0 + integral;
}

/// q(t) = a(t) r(t)^2 / a0; q(0) = r0^2 exactly.
inline double q_eval(const ConeGeometry& g, double t) {
    const double r = comoving_radius(g, t);
    return std::exp(log_scale_ratio(g.params, t)) * r * r;
}

/// log r(t), finite for very large t where r itself overflows (exponential growth).
inline double log_comoving_radius(const ConeGeometry& g, double t) {
    const auto& p = g.params;
    if (p.H != 0.0) {
        const double k = detail::cone_exponent(p);
        const double growth = k * log_scale_ratio(p, t);
        if (k != 0.0 && growth > 50.0) {
            const double coef = p.c / (p.a0 * p.H * k);  // positive whenever growth > 0
            return growth + std::log(coef) + std::log1p((g.r0 - coef) * std::exp(-growth) / coef);
        }
    }
    return std::log(comoving_radius(g, t));
}

/// log q(t), finite for very large t where q itself overflows.
inline double log_q(const ConeGeometry& g, double t) {
    return log_scale_ratio(g.params, t) + 2.0 * log_comoving_radius(g, t);
}

/// d(t) = r + 2c/(a0 H) (a/a0)^{n(1+sigma)/2 - 1}, H != 0.
inline double d_eval(const ConeGeometry& g, double t) {
    const auto& p = g.params;
    if (p.H == 0.0) throw std::invalid_argument("d(t) is defined for H != 0 only");
    const double k = detail::cone_exponent(p);
    return comoving_radius(g, t) + 2.0 * p.c / (p.a0 * p.H) * std::exp(k * log_scale_ratio(p, t));
}

/// Analytic q'(t): 2cr/a0 when H = 0, H r d (a/a0)^{1 - n(1+sigma)/2} otherwise.
inline double q_dot(const ConeGeometry& g, double t) {
    const auto& p = g.params;
    const double r = comoving_radius(g, t);
    if (p.H == 0.0) return 2.0 * p.c * r / p.a0;
    const double k = detail::cone_exponent(p);
    return p.H * r * d_eval(g, t) * std::exp(-k * log_scale_ratio(p, t));
}

/// q~(t): q0 if q is non-increasing, q(t) if non-decreasing.
inline double q_tilde_eval(const ConeGeometry& g, double t) {
    switch (g.monotonicity) {
        case Monotonicity::NonIncreasing:
            detail::require_in_domain(t, g.horizon());
            return g.r0 * g.r0;
        case Monotonicity::NonDecreasing: return q_eval(g, t);
        case Monotonicity::NotMonotone: break;
    }
    throw std::invalid_argument("q~ requires a monotone q; this geometry is NotMonotone");
}

inline double log_q_tilde(const ConeGeometry& g, double t) {
    switch (g.monotonicity) {
        case Monotonicity::NonIncreasing: return 2.0 * std::log(g.r0);
        case Monotonicity::NonDecreasing: return log_q(g, t);
        case Monotonicity::NotMonotone: break;
    }
    throw std::invalid_argument("q~ requires a monotone q; this geometry is NotMonotone");
}

}  // namespace flrw
