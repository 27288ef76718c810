#pragma once

// FLRW background: scale factor family a(t), horizon T0, curved mass M^2(t).

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <memory>
#include <variant>
#include <vector>

#include <boost/math/interpolators/makima.hpp>

#include "numeric.hpp"

namespace flrw {

/// Background parameters. m_squared < 0 encodes a purely imaginary mass.
struct CosmologyParams {
    int n = 1;
    double c = 1.0;
    double a0 = 1.0;
    double H = 0.0;
    double sigma = 0.0;
    double m_squared = 0.0;

    void validate() const {
        if (n < 1) throw std::invalid_argument("n must be a positive integer");
        if (!(c > 0.0) || !std::isfinite(c)) throw std::invalid_argument("c must be positive");
        if (!(a0 > 0.0) || !std::isfinite(a0)) throw std::invalid_argument("a0 must be positive");
        if (!std::isfinite(H) || !std::isfinite(sigma) || !std::isfinite(m_squared))
            throw std::invalid_argument("H, sigma and m_squared must be finite");
    }

    /// n(1+sigma)H / 2, the rate in the power-law base 1 + rate*t.
    double rate() const { return 0.5 * n * (1.0 + sigma) * H; }

    /// (nH / 2c)^2
    double hubble_mass_sq() const {
        const double k = n * H / (2.0 * c);
        return k * k;
    }

    bool de_sitter() const { return sigma == -1.0; }

    /// (1+sigma)H < 0 with sigma < 0: M^2 -> -inf at the horizon.
    bool excluded_region() const { return (1.0 + sigma) * H < 0.0 && sigma < 0.0; }
};

/// T0: +inf if (1+sigma)H >= 0, else -2 / (n(1+sigma)H).
inline double horizon_end(const CosmologyParams& p) {
    const double s = (1.0 + p.sigma) * p.H;
    if (s >= 0.0) return kInf;
    return -2.0 / (p.n * s);
}

struct ScaleValue {
    double a = 0.0;
    double a_dot = 0.0;
    double a_ddot = 0.0;
};

struct ClosedFormFLRW {
    CosmologyParams params;
};

/// Sampled scale factor on [times.front(), times.back()] with horizon `end`.
struct TabulatedScale {
    std::vector<double> times;
    std::vector<double> values;
    double end = kInf;

    TabulatedScale(std::vector<double> t, std::vector<double> a, double horizon)
        : times(std::move(t)), values(std::move(a)), end(horizon) {
        if (times.size() != values.size() || times.size() < 4)
            throw std::invalid_argument("tabulated scale needs >= 4 (t, a) pairs");
        for (std::size_t i = 0; i < times.size(); ++i) {
            if (!(values[i] > 0.0)) throw std::invalid_argument("tabulated scale values must be positive");
            if (i > 0 && !(times[i] > times[i - 1]))
                throw std::invalid_argument("tabulated times must be strictly increasing");
        }
        if (times.front() < 0.0 || !(times.back() < end))
            throw std::invalid_argument("tabulated times must lie in [0, T0)");
        auto tx = times;
        auto ty = values;
        interp_ = std::make_shared<Interp>(std::move(tx), std::move(ty));
    }

    double operator()(double t) const { return (*interp_)(t); }

    /// Spacing of the table cell containing t.
    double local_spacing(double t) const {
        auto it = std::upper_bound(times.begin(), times.end(), t);
        std::size_t i = it == times.begin() ? 1 : static_cast<std::size_t>(it - times.begin());
        i = std::clamp<std::size_t>(i, 1, times.size() - 1);
        return times[i] - times[i - 1];
    }

private:
    using Interp = boost::math::interpolators::makima<std::vector<double>>;
    std::shared_ptr<Interp> interp_;
};

using ScaleModel = std::variant<ClosedFormFLRW, TabulatedScale>;

namespace detail {

// Evaluation within 1e-12 * T0 of a finite horizon is treated as out of domain.
inline void require_in_domain(double t, double horizon) {
    if (!(t >= 0.0) || !std::isfinite(t))
        throw std::domain_error("time " + std::to_string(t) + " outside [0, T0)");
    if (std::isfinite(horizon) && t >= horizon * (1.0 - 1e-12))
        throw std::domain_error("time " + std::to_string(t) + " at or beyond the horizon T0 = " +
                                std::to_string(horizon));
}

}  // namespace detail

/// log(a(t) / a0) for the closed-form family; exact 0 at t = 0.
inline double log_scale_ratio(const CosmologyParams& p, double t) {
    if (p.H == 0.0) return 0.0;
    if (p.de_sitter()) return p.H * t;
    return (2.0 / (p.n * (1.0 + p.sigma))) * std::log1p(p.rate() * t);
}

inline ScaleValue scale_eval(const ClosedFormFLRW& model, double t) {
    const auto& p = model.params;
    detail::require_in_domain(t, horizon_end(p));
    if (p.H == 0.0) return {p.a0, 0.0, 0.0};
    const double a = p.a0 * std::exp(log_scale_ratio(p, t));
    if (p.de_sitter()) return {a, p.H * a, p.H * p.H * a};
    // a'/a = H / s and a''/a = H^2 (1 - n(1+sigma)/2) / s^2 with s = 1 + rate*t
    const double s = 1.0 + p.rate() * t;
    const double hub = p.H / s;
    return {a, hub * a, hub * hub * (1.0 - 0.5 * p.n * (1.0 + p.sigma)) * a};
}

inline ScaleValue scale_eval(const TabulatedScale& model, double t) {
    detail::require_in_domain(t, model.end);
    const double lo = model.times.front();
    const double hi = model.times.back();
    if (t < lo || t > hi) throw std::domain_error("time outside the tabulated range");
    const double h = model.local_spacing(t);
    const double a = model(t);
    // centered where possible, second-order one-sided at the table ends
    if (t - h >= lo && t + h <= hi) {
        const double am = model(t - h), ap = model(t + h);
        return {a, (ap - am) / (2.0 * h), (ap - 2.0 * a + am) / (h * h)};
    }
    const double dir = (t - h < lo) ? 1.0 : -1.0;
    const double hs = std::min(h, 0.5 * (hi - lo));
    const double a1 = model(t + dir * hs), a2 = model(t + 2.0 * dir * hs);
    const double a3 = model(t + 3.0 * dir * hs);
    return {a, dir * (-3.0 * a + 4.0 * a1 - a2) / (2.0 * hs),
            (2.0 * a - 5.0 * a1 + 4.0 * a2 - a3) / (hs * hs)};
}

inline ScaleValue scale_eval(const ScaleModel& model, double t) {
    return std::visit([t](const auto& m) { return scale_eval(m, t); }, model);
}

inline double model_horizon(const ScaleModel& model) {
    if (const auto* cf = std::get_if<ClosedFormFLRW>(&model)) return horizon_end(cf->params);
    return std::get<TabulatedScale>(model).end;
}

/// M^2(t) = m^2 + sigma (nH/2c)^2 {1 + n(1+sigma)Ht/2}^{-2}
inline double curved_mass_sq(const CosmologyParams& p, double t) {
    detail::require_in_domain(t, horizon_end(p));
    if (p.H == 0.0 || p.sigma == 0.0) return p.m_squared;
    if (p.de_sitter()) return p.m_squared - p.hubble_mass_sq();
    const double s = 1.0 + p.rate() * t;
    return p.m_squared + p.sigma * p.hubble_mass_sq() / (s * s);
}

/// M^2 from the definition m^2 - n(n-2)/(4c^2) (a'/a)^2 - n/(2c^2) a''/a.
inline double curved_mass_sq_from_scale(const ScaleModel& model, const CosmologyParams& p, double t) {
    const auto sv = scale_eval(model, t);
    const double hub = sv.a_dot / sv.a;
    const double acc = sv.a_ddot / sv.a;
    const double c2 = p.c * p.c;
    return p.m_squared - p.n * (p.n - 2.0) / (4.0 * c2) * hub * hub - p.n / (2.0 * c2) * acc;
}

/// Time T1 where M^2 changes sign in the contracting/ripping regime with real mass.
inline std::optional<double> mass_sign_change_time(const CosmologyParams& p) {
    if (!((1.0 + p.sigma) * p.H < 0.0 && p.sigma < 0.0 && p.m_squared > 0.0)) return std::nullopt;
    const double m = std::sqrt(p.m_squared);
    const double threshold = std::sqrt(std::abs(p.sigma)) * p.n * std::abs(p.H) / (2.0 * p.c);
    if (!(m > threshold)) return std::nullopt;
    return -2.0 / (p.n * (1.0 + p.sigma) * p.H) * (1.0 - threshold / m);
}

enum class MassTag {
    ConstantM2,         // H = 0 or sigma = 0
    DeSitterConstant,   // H != 0, sigma = -1
    DecreasingBounded,  // H > 0, sigma > 0:  m^2 < M^2 <= m^2 + sigma k^2
    IncreasingBounded,  // (1+sigma)H > 0, sigma < 0:  m^2 + sigma k^2 <= M^2 < m^2
    DivergesPlus,       // H < 0, sigma > 0:  M^2 >= m^2 + sigma k^2, M^2 -> +inf
    DivergesMinus,      // (1+sigma)H < 0, sigma < 0:  M^2 <= m^2 + sigma k^2, M^2 -> -inf
};

inline const char* to_string(MassTag tag) {
    switch (tag) {
        case MassTag::ConstantM2: return "ConstantM2";
        case MassTag::DeSitterConstant: return "DeSitterConstant";
        case MassTag::DecreasingBounded: return "DecreasingBounded";
        case MassTag::IncreasingBounded: return "IncreasingBounded";
        case MassTag::DivergesPlus: return "DivergesPlus";
        case MassTag::DivergesMinus: return "DivergesMinus";
    }
    return "?";
}

/// Classification of M^2(t) on (0, T0) with its bounds. `lower`/`upper` are -inf/+inf
/// when unbounded; `infimum` and `supremum` are the exact inf/sup over the open interval.
struct MassBehavior {
    MassTag tag = MassTag::ConstantM2;
    double lower = -kInf;
    double upper = kInf;
    bool lower_attained = true;
    bool upper_attained = true;
    double infimum = 0.0;
    double supremum = 0.0;

    bool contains(double m2, double tol = 0.0) const {
        const bool lo_ok = lower_attained ? m2 >= lower - tol : m2 > lower - tol;
        const bool hi_ok = upper_attained ? m2 <= upper + tol : m2 < upper + tol;
        return lo_ok && hi_ok;
    }
};

inline MassBehavior classify_mass_behavior(const CosmologyParams& p) {
    const double m2 = p.m_squared;
    const double edge = m2 + p.sigma * p.hubble_mass_sq();  // M^2 at t = 0
    MassBehavior mb;
    if (p.H == 0.0 || p.sigma == 0.0) {
        mb.tag = MassTag::ConstantM2;
        mb.lower = mb.upper = mb.infimum = mb.supremum = m2;
    } else if (p.de_sitter()) {
        mb.tag = MassTag::DeSitterConstant;
        mb.lower = mb.upper = mb.infimum = mb.supremum = m2 - p.hubble_mass_sq();
    } else if (p.sigma > 0.0 && p.H > 0.0) {
        mb.tag = MassTag::DecreasingBounded;
        mb.lower = m2;
        mb.lower_attained = false;
        mb.upper = edge;
        mb.infimum = m2;
        mb.supremum = edge;
    } else if (p.sigma > 0.0) {
        mb.tag = MassTag::DivergesPlus;
        mb.lower = edge;
        mb.infimum = edge;
        mb.supremum = kInf;
    } else if ((1.0 + p.sigma) * p.H > 0.0) {
        mb.tag = MassTag::IncreasingBounded;
        mb.lower = edge;
        mb.upper = m2;
        mb.upper_attained = false;
        mb.infimum = edge;
        mb.supremum = m2;
    } else {
        mb.tag = MassTag::DivergesMinus;
        mb.upper = edge;
        mb.infimum = -kInf;
        mb.supremum = edge;
    }
    return mb;
}

}  // namespace flrw
