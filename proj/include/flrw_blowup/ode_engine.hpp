#pragma once

// Comparison dynamics c^-2 w'' + M^2(t) w - b(t)|w|^p = 0 for the spatial integral
// w(t) = Re int u(t,x) dx, with blow-up detection and the growth/envelope checks.

#include <cmath>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "certificate.hpp"
#include "dopri5.hpp"
#include "io.hpp"

namespace flrw {

/// Coefficients of the comparison ODE. `horizon` is where the coefficients stop being defined.
struct ComparisonOde {
    double c = 1.0;
    double p = 2.0;
    std::function<double(double)> mass_sq;  // M^2(t)
    std::function<double(double)> b;        // b(t) > 0
    double w0 = 0.0;
    double w1 = 0.0;
    double horizon = kInf;
};

/// b(t) = lambda (omega_n^{2/n} a r^2)^{-n(p-1)/2} = lambda / (Q q(t))^{n(p-1)/2}
inline double comparison_b(const TheoremInputs& in, double t) {
    const auto& p = in.params();
    const double expo = 0.5 * p.n * (in.p - 1.0);
    return in.lambda * std::exp(-expo * (std::log(q_constant(p)) + log_q(in.geom, t)));
}

/// b~(t): b0 when b is non-decreasing (q non-increasing), b(t) otherwise.
inline double comparison_b_tilde(const TheoremInputs& in, double t) {
    const auto& p = in.params();
    const double expo = 0.5 * p.n * (in.p - 1.0);
    return in.lambda * std::exp(-expo * (std::log(q_constant(p)) + log_q_tilde(in.geom, t)));
}

inline void reject_excluded_region(const CosmologyParams& p) {
    if (p.excluded_region())
        throw std::domain_error(std::string("cannot simulate: ") + kExcludedReason);
}

inline ComparisonOde make_comparison_ode(const TheoremInputs& in) {
    in.validate();
    reject_excluded_region(in.params());
    ComparisonOde ode;
    ode.c = in.params().c;
    ode.p = in.p;
    ode.mass_sq = [params = in.params()](double t) { return curved_mass_sq(params, t); };
    ode.b = [in](double t) { return comparison_b(in, t); };
    ode.w0 = in.w0;
    ode.w1 = in.w1;
    ode.horizon = in.geom.horizon();
    return ode;
}

struct OdeSample {
    double t = 0.0;
    double w = 0.0;
    double w_dot = 0.0;
};

struct OdeTrajectory {
    std::vector<OdeSample> samples;
    bool blowup_detected = false;
    std::optional<double> blowup_time;
    Termination termination_reason = Termination::ReachedHorizon;
    double last_step = 0.0;
};

/// Integrates the equality dynamics from (0, w0, w1) to t_end with Dormand-Prince 5(4).
inline OdeTrajectory integrate(const ComparisonOde& ode, double t_end, const StepControls& controls = {}) {
    if (!(t_end > 0.0)) throw std::domain_error("t_end must be positive");
    if (t_end > ode.horizon) throw std::domain_error("t_end exceeds the horizon T0");
    double stop = t_end;
    if (std::isfinite(ode.horizon) && t_end > ode.horizon * (1.0 - 1e-9)) stop = ode.horizon * (1.0 - 1e-9);

    const double c2 = ode.c * ode.c;
    auto rhs = [&](double t, const std::vector<double>& y, std::vector<double>& dy) {
        dy[0] = y[1];
        dy[1] = c2 * (ode.b(t) * pow_nonneg(std::abs(y[0]), ode.p) - ode.mass_sq(t) * y[0]);
    };
    OdeTrajectory traj;
    traj.samples.push_back({0.0, ode.w0, ode.w1});
    std::vector<double> y{ode.w0, ode.w1};
    double t = 0.0;
    DormandPrince45 stepper(controls);
    const double level = controls.blowup_factor * std::max(1.0, std::abs(ode.w0));
    const auto term = stepper.advance(
        rhs, t, y, stop, [&](double tt, const std::vector<double>& yy) { traj.samples.push_back({tt, yy[0], yy[1]}); },
        [](const std::vector<double>& yy) { return std::abs(yy[0]); }, level);
    traj.termination_reason = term;
    traj.last_step = stepper.last_step();
    if (term == Termination::BlowupThreshold) {
        traj.blowup_detected = true;
        traj.blowup_time = t;
    }
    return traj;
}

inline OdeTrajectory integrate(const TheoremInputs& in, double t_end, const StepControls& controls = {}) {
    return integrate(make_comparison_ode(in), t_end, controls);
}

/// Blow-up time refined by Richardson extrapolation of the zero of |w|^{-(alpha-1)}
/// over the final samples; clamped to [last t, last t + last step].
inline std::optional<double> detect_blowup_time(const OdeTrajectory& traj, double alpha) {
    if (!traj.blowup_detected || !traj.blowup_time) return std::nullopt;
    const auto& s = traj.samples;
    const double t_last = s.back().t;
    if (s.size() < 3 || !(alpha > 1.0)) return t_last;
    const double beta = alpha - 1.0;
    auto y = [&](const OdeSample& q) { return std::pow(std::abs(q.w), -beta); };
    auto secant = [&](const OdeSample& a, const OdeSample& b) {
        const double ya = y(a), yb = y(b);
        if (!(ya > yb)) return b.t;
        return b.t + yb * (b.t - a.t) / (ya - yb);
    };
    const auto& s0 = s[s.size() - 3];
    const auto& s1 = s[s.size() - 2];
    const auto& s2 = s[s.size() - 1];
    const double est_a = secant(s0, s1), est_b = secant(s1, s2);
    const double h1 = s1.t - s0.t, h2 = s2.t - s1.t;
    double refined = est_b;
    if (std::abs(h1 - h2) > 1e-3 * h1) refined = (h1 * est_b - h2 * est_a) / (h1 - h2);
    if (!std::isfinite(refined)) refined = est_b;
    return std::clamp(refined, t_last, t_last + std::max(traj.last_step, 0.0));
}

/// Natural blow-up exponent of w'' = |w|^p: w ~ (T-t)^{-2/(p-1)}, so alpha = (p+1)/2.
inline std::optional<double> detect_blowup_time(const OdeTrajectory& traj, const ComparisonOde& ode) {
    return detect_blowup_time(traj, 0.5 * (ode.p + 1.0));
}

// ---------------------------------------------------------------------------------

struct PropertyStatus {
    std::string name;
    bool holds = true;
    std::size_t violations = 0;
    std::optional<double> first_violation;
    double worst_margin = kInf;  // smallest normalised slack seen
};

struct ComparisonPropertyReport {
    double w0_bound = 0.0;  // sup_t e^{-cNt}{(N^2+M^2)/((1-theta)b)}^{1/(p-1)}
    std::vector<PropertyStatus> properties;
    bool all_hold() const {
        for (const auto& p : properties)
            if (!p.holds) return false;
        return true;
    }
};

/// Pointwise growth properties of the comparison solution:
///   (1) w >= w0 e^{cNt}   (2) (1-theta) b w^{p-1} - M^2 > N^2
///   (3) c^-2 w'' - N^2 w - theta b w^p >= 0   (4) w' >= w1
inline ComparisonPropertyReport check_comparison_properties(const OdeTrajectory& traj, const TheoremInputs& in, double tol = 1e-6) {
    const auto& par = in.params();
    ComparisonPropertyReport rep;
    rep.w0_bound = comparison_w0_bound(in);
    if (!(in.w0 > rep.w0_bound)) {
        std::ostringstream os;
        os.precision(17);
        os << "comparison hypothesis violated: w0 = " << in.w0
           << " must exceed sup_t e^{-cNt}{(N^2+M^2)/((1-theta)b)}^{1/(p-1)} = " << rep.w0_bound;
        throw std::invalid_argument(os.str());
    }
    if (!(in.w1 >= par.c * in.N * in.w0)) {
        std::ostringstream os;
        os.precision(17);
        os << "comparison hypothesis violated: w1 = " << in.w1 << " must be >= c N w0 = " << par.c * in.N * in.w0;
        throw std::invalid_argument(os.str());
    }
    rep.properties = {{"w>=w0*exp(cNt)"}, {"(1-theta)b*w^(p-1)-M^2>N^2"},
                      {"c^-2*w''-N^2*w-theta*b*w^p>=0"}, {"w'>=w1"}};
    auto record = [&](PropertyStatus& ps, double margin, double t) {
        ps.worst_margin = std::min(ps.worst_margin, margin);
        if (margin < -tol) {
            ps.holds = false;
            ++ps.violations;
            if (!ps.first_violation) ps.first_violation = t;
        }
    };
    const double n2 = in.N * in.N;
    for (const auto& s : traj.samples) {
        const double b = comparison_b(in, s.t);
        const double m2 = curved_mass_sq(par, s.t);
        const double growth = in.w0 * std::exp(par.c * in.N * s.t);
        record(rep.properties[0], (s.w - growth) / std::abs(growth), s.t);

        const double lhs2 = (1.0 - in.theta) * b * pow_nonneg(s.w, in.p - 1.0) - m2;
        const double scale2 = std::max({std::abs(lhs2), n2, std::abs(m2), 1.0});
        // strict inequality: a zero margin counts as a violation
        const double m2margin = (lhs2 - n2) / scale2;
        record(rep.properties[1], m2margin > 0.0 ? m2margin : std::min(m2margin, -2.0 * tol), s.t);

        const double force = b * pow_nonneg(std::abs(s.w), in.p);
        const double accel = force - m2 * s.w;  // c^-2 w'' from the equality dynamics
        const double lhs3 = accel - n2 * s.w - in.theta * force;
        const double scale3 = std::max({std::abs(accel), n2 * std::abs(s.w), in.theta * force, 1.0});
        record(rep.properties[2], lhs3 / scale3, s.t);

        record(rep.properties[3], (s.w_dot - in.w1) / std::max(std::abs(in.w1), 1.0), s.t);
    }
    return rep;
}

/// Thrown when the envelope is evaluated at or past its pole.
class PoleError : public std::domain_error {
public:
    explicit PoleError(double pole)
        : std::domain_error("envelope evaluated at or past its pole t = " + format_double(pole)), pole_(pole) {}
    double pole_time() const { return pole_; }

private:
    double pole_;
};

/// Pole of the lower envelope, 1 / (C (alpha-1) w0^{alpha-1}).
inline double envelope_pole(const TheoremInputs& in, const BlowupCertificate& cert) {
    if (!(cert.C_squared > 0.0)) throw std::invalid_argument("envelope requires C^2 > 0");
    const double beta = cert.alpha - 1.0;
    return 1.0 / (std::sqrt(cert.C_squared) * beta * std::pow(in.w0, beta));
}

/// w0 {1 - C(alpha-1) w0^{alpha-1} t}^{-1/(alpha-1)}
inline double envelope(const TheoremInputs& in, const BlowupCertificate& cert, double t) {
    const double pole = envelope_pole(in, cert);
    if (t >= pole) throw PoleError(pole);
    return in.w0 * std::pow(1.0 - t / pole, -1.0 / (cert.alpha - 1.0));
}

/// E(t) = w'^2/(2c^2) - theta b~ w^{p+1}/(p+1)
inline double comparison_energy(const TheoremInputs& in, double t, double w, double w_dot) {
    const double c = in.params().c;
    return w_dot * w_dot / (2.0 * c * c) -
           in.theta * comparison_b_tilde(in, t) * pow_nonneg(w, in.p + 1.0) / (in.p + 1.0);
}

/// CSV columns: t, w, wdot, envelope, growth_bound (w0 e^{cNt}).
inline void write_trajectory_csv(std::ostream& os, const OdeTrajectory& traj, const TheoremInputs& in,
                                 const BlowupCertificate* cert) {
    os << "t,w,wdot,envelope,growth_bound\n";
    const bool have_env = cert && cert->C_squared > 0.0 && in.w0 > 0.0;
    for (const auto& s : traj.samples) {
        double env = std::nan("");
        if (have_env && s.t < envelope_pole(in, *cert)) env = envelope(in, *cert, s.t);
        const double growth = in.w0 * std::exp(in.params().c * in.N * s.t);
        os << format_double(s.t) << ',' << format_double(s.w) << ',' << format_double(s.w_dot) << ','
           << format_double(env) << ',' << format_double(growth) << '\n';
    }
}

}  // namespace flrw
