#pragma once

// Method-of-lines solver for the radially symmetric Cauchy problem
//   c^-2 u_tt - a^-2 Delta u + M^2 u - lambda a^{-n(p-1)/2} |u|^p = 0
// plus the observables W(t) = Re int u dx, support radius and finite-speed checks.

#include <cmath>
#include <complex>
#include <optional>
#include <algorithm>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/math/special_functions/beta.hpp>

#include "cone_geometry.hpp"
#include "cosmology.hpp"
#include "dopri5.hpp"
#include "io.hpp"
#include "ode_engine.hpp"

namespace flrw {

/// Equation coefficients; lambda = 0 gives the linear Klein-Gordon equation.
struct PdeModel {
    CosmologyParams params;
    double lambda = 0.0;
    double p = 2.0;

    void validate() const {
        params.validate();
        reject_excluded_region(params);
        if (!(lambda >= 0.0)) throw std::invalid_argument("lambda must be >= 0");
        if (!(p > 1.0)) throw std::invalid_argument("p must lie in (1,inf)");
    }
};

inline PdeModel make_pde_model(const TheoremInputs& in) { return {in.params(), in.lambda, in.p}; }

// ---------------------------------------------------------------------------------
// Initial data

/// u0 = s0 phi, u1 = s1 phi with phi(r) = (1 - (r/r0)^2)^3 on [0, r0].
struct InitialData {
    int n = 1;
    double r0 = 1.0;
    double s0 = 0.0;
    double s1 = 0.0;

    double profile(double r) const {
        const double x = r / r0;
        if (!(std::abs(x) < 1.0)) return 0.0;
        const double v = 1.0 - x * x;
        return v * v * v;
    }
};

/// n omega_n int_0^{r0} phi(r) r^{n-1} dr = n omega_n r0^n B(n/2, 4) / 2
inline double profile_ball_integral(int n, double r0) {
    return unit_sphere_area(n) * std::pow(r0, n) * 0.5 * boost::math::beta(0.5 * n, 4.0);
}

inline InitialData make_initial_data(int n, double r0, double w0, double w1) {
    if (!(r0 > 0.0)) throw std::invalid_argument("r0 must be positive");
    if (n < 1) throw std::invalid_argument("n must be a positive integer");
    const double mass = profile_ball_integral(n, r0);
    return {n, r0, w0 / mass, w1 / mass};
}

// ---------------------------------------------------------------------------------
// Field

enum class GridMode { Radial, FullLine };

/// Radial: nodes r_j = j h on [0, R_max), Dirichlet u = 0 at R_max.
/// FullLine (n = 1): nodes x_j = x_lo + j h with homogeneous Dirichlet ghosts on both ends.
struct PdeField {
    GridMode mode = GridMode::Radial;
    int n = 1;
    double h = 1e-3;
    double x_lo = 0.0;     // FullLine only
    double apex = 0.0;     // cone apex x0 (FullLine); 0 for Radial
    double support0 = 0.0; // initial support radius r0
    std::vector<std::complex<double>> u;
    std::vector<std::complex<double>> ut;
    double t = 0.0;

    std::size_t size() const { return u.size(); }
    double position(std::size_t j) const {
        return mode == GridMode::Radial ? h * static_cast<double>(j) : x_lo + h * static_cast<double>(j);
    }
    /// distance of node j from the apex
    double distance(std::size_t j) const { return std::abs(position(j) - apex); }
    double extent() const {
        return mode == GridMode::Radial ? h * static_cast<double>(size())
                                        : std::min(apex - (x_lo - h), x_lo + h * static_cast<double>(size()) - apex);
    }
};

/// Radial grid covering [0, r_max) with spacing h, filled with the initial data.
inline PdeField make_radial_field(const InitialData& data, double h, double r_max) {
    if (!(h > 0.0) || !(r_max > data.r0)) throw std::invalid_argument("radial grid must contain the data support");
    PdeField f;
    f.mode = GridMode::Radial;
    f.n = data.n;
    f.h = h;
    f.support0 = data.r0;
    const auto count = static_cast<std::size_t>(std::ceil(r_max / h));
    f.u.resize(count);
    f.ut.resize(count);
    for (std::size_t j = 0; j < count; ++j) {
        const double phi = data.profile(f.position(j));
        f.u[j] = data.s0 * phi;
        f.ut[j] = data.s1 * phi;
    }
    return f;
}

/// Full-line grid (n = 1) with nodes x_lo + j h, data centred at `apex`.
inline PdeField make_line_field(const InitialData& data, double h, double x_lo, std::size_t count, double apex) {
    if (data.n != 1) throw std::invalid_argument("full-line mode requires n = 1");
    PdeField f;
    f.mode = GridMode::FullLine;
    f.n = 1;
    f.h = h;
    f.x_lo = x_lo;
    f.apex = apex;
    f.support0 = data.r0;
    f.u.resize(count);
    f.ut.resize(count);
    for (std::size_t j = 0; j < count; ++j) {
        const double phi = data.profile(f.position(j) - apex);
        f.u[j] = data.s0 * phi;
        f.ut[j] = data.s1 * phi;
    }
    return f;
}

// ---------------------------------------------------------------------------------
// Discrete operators

namespace detail {

/// Conservative radial Laplacian: (L u)_j = [A_{j+1/2}(u_{j+1}-u_j) - A_{j-1/2}(u_j-u_{j-1})] / (h V_j)
/// with face areas A = r^{n-1} and node volumes V_j = h r_j^{n-1}; the axis row is 2n(u_1-u_0)/h^2.
struct Stencil {
    std::vector<double> face;    // A_{j+1/2}, j = 0..N-1 (last face touches the Dirichlet ghost)
    std::vector<double> volume;  // V_j
    std::vector<double> trapz;   // trapezoid weights times r^{n-1}
    double h = 0.0;
    bool line = false;

    explicit Stencil(const PdeField& f) : h(f.h), line(f.mode == GridMode::FullLine) {
        const std::size_t N = f.size();
        face.resize(N);
        volume.resize(N);
        trapz.resize(N);
        const int n = f.n;
        for (std::size_t j = 0; j < N; ++j) {
            if (line) {
                face[j] = 1.0;
                volume[j] = h;
                trapz[j] = (j == 0 || j + 1 == N) ? 0.5 * h : h;
                continue;
            }
            const double r = f.position(j);
            face[j] = std::pow(r + 0.5 * h, n - 1);
            volume[j] = j == 0 ? std::pow(0.5 * h, n - 1) * h / (2.0 * n) : h * std::pow(r, n - 1);
            trapz[j] = ((j == 0 || j + 1 == N) ? 0.5 * h : h) * std::pow(r, n - 1);
        }
    }

    /// out = L u on a strided real array
    void apply(const double* u, double* out, std::size_t N) const {
        for (std::size_t j = 0; j < N; ++j) {
            const double right = (j + 1 < N ? u[j + 1] : 0.0) - u[j];
            double left = 0.0;
            double left_face = 0.0;
            if (j > 0) {
                left = u[j] - u[j - 1];
                left_face = face[j - 1];
            } else if (line) {
                left = u[0];  // ghost u_{-1} = 0
                left_face = 1.0;
            }
            out[j] = (face[j] * right - left_face * left) / (h * volume[j]);
        }
    }
};

}  // namespace detail

// ---------------------------------------------------------------------------------
// Observables

/// W = n omega_n sum trapezoid(Re u r^{n-1}) (radial) or the trapezoid line integral.
inline double observable_w(const PdeField& f) {
    const detail::Stencil st(f);
    double sum = 0.0;
    for (std::size_t j = 0; j < f.size(); ++j) sum += st.trapz[j] * f.u[j].real();
    return f.mode == GridMode::Radial ? unit_sphere_area(f.n) * sum : sum;
}

inline double max_abs(const std::vector<std::complex<double>>& v) {
    double m = 0.0;
    for (const auto& z : v) m = std::max(m, std::abs(z));
    return m;
}

/// Largest distance from the apex where |u| or |u_t| exceeds `floor`
/// (default: 1e-10 times the largest nodal magnitude). All-zero field gives 0.
inline double support_radius(const PdeField& f, double floor = -1.0) {
    if (floor < 0.0) floor = 1e-10 * std::max(max_abs(f.u), max_abs(f.ut));
    if (floor == 0.0 && max_abs(f.u) == 0.0 && max_abs(f.ut) == 0.0) return 0.0;
    double radius = 0.0;
    for (std::size_t j = 0; j < f.size(); ++j) {
        if (std::abs(f.u[j]) > floor || std::abs(f.ut[j]) > floor) radius = std::max(radius, f.distance(j));
    }
    return radius;
}

/// Fraction of the L1 mass of |u| beyond distance `radius` from the apex.
inline double outside_mass_fraction(const PdeField& f, double radius) {
    const detail::Stencil st(f);
    double total = 0.0, outside = 0.0;
    for (std::size_t j = 0; j < f.size(); ++j) {
        const double m = st.trapz[j] * std::abs(f.u[j]);
        total += m;
        if (f.distance(j) > radius) outside += m;
    }
    return total > 0.0 ? outside / total : 0.0;
}

/// Discrete energy 1/2 sum V (c^-2|u_t|^2 + M^2|u|^2) + 1/2 a^-2 sum A |du|^2 / h, scaled by n omega_n;
/// exactly conserved by the semi-discrete linear autonomous problem.
inline double discrete_energy(const PdeField& f, const PdeModel& model) {
    const detail::Stencil st(f);
    const auto& par = model.params;
    const double a = scale_eval(ClosedFormFLRW{par}, f.t).a;
    const double m2 = curved_mass_sq(par, f.t);
    const double c2 = par.c * par.c;
    const std::size_t N = f.size();
    double kin = 0.0, grad = 0.0;
    for (std::size_t j = 0; j < N; ++j) {
        kin += st.volume[j] * (std::norm(f.ut[j]) / c2 + m2 * std::norm(f.u[j]));
        const std::complex<double> next = j + 1 < N ? f.u[j + 1] : 0.0;
        grad += st.face[j] * std::norm(next - f.u[j]) / f.h;
    }
    if (st.line) grad += std::norm(f.u[0]) / f.h;
    const double e = 0.5 * kin + 0.5 * grad / (a * a);
    return f.mode == GridMode::Radial ? unit_sphere_area(f.n) * e : e;
}

/// lambda a^{-n(p-1)/2} int |u|^p dx, the forcing in the W balance.
inline double forcing_integral(const PdeField& f, const PdeModel& model) {
    const detail::Stencil st(f);
    const auto& par = model.params;
    const double log_a = std::log(par.a0) + log_scale_ratio(par, f.t);
    double sum = 0.0;
    for (std::size_t j = 0; j < f.size(); ++j) sum += st.trapz[j] * pow_nonneg(std::abs(f.u[j]), model.p);
    if (f.mode == GridMode::Radial) sum *= unit_sphere_area(f.n);
    return model.lambda * std::exp(-0.5 * par.n * (model.p - 1.0) * log_a) * sum;
}

// ---------------------------------------------------------------------------------
// Evolution

struct PdeControls {
    StepControls step{1e-9, 1e-12};
    double output_interval = 1e-2;
    double blowup_cadence_factor = 1e3;  // record every step once |W| > factor * |w0|
};

struct PdeObservation {
    double t = 0.0;
    double W = 0.0;
    double support_radius = 0.0;
    double cone_radius = 0.0;
    double energy = 0.0;
    double max_abs_u = 0.0;
    double forcing = 0.0;
    double outside_fraction = 0.0;  // L1 mass beyond cone_radius + 2h
};

struct PdeRun {
    std::vector<PdeObservation> observations;
    Termination termination = Termination::ReachedHorizon;
    bool blowup_detected = false;
    std::optional<double> blowup_time;
    std::size_t steps = 0;
};

/// Cone radius r0 + int_0^t c/a for the field's initial support.
inline double field_cone_radius(const PdeField& f, const PdeModel& model, double t) {
    ConeGeometry g;
    g.params = model.params;
    g.r0 = f.support0;
    return comoving_radius(g, t);
}

/// Maximum stable fixed step for DP5 on the semi-discrete wave operator (Gershgorin bound).
inline double cfl_limit(const PdeField& f, const PdeModel& model, double t_end) {
    const auto& par = model.params;
    // a is monotone on the closed-form family: check both ends of the interval
    const double a_min = std::min(scale_eval(ClosedFormFLRW{par}, 0.0).a, scale_eval(ClosedFormFLRW{par}, t_end).a);
    const double omega = par.c / a_min * std::sqrt(4.0 * f.n) / f.h;
    return 3.0 / omega;
}

inline PdeObservation observe(const PdeField& f, const PdeModel& model) {
    PdeObservation ob;
    ob.t = f.t;
    ob.W = observable_w(f);
    ob.support_radius = support_radius(f);
    ob.cone_radius = field_cone_radius(f, model, f.t);
    ob.energy = discrete_energy(f, model);
    ob.max_abs_u = max_abs(f.u);
    ob.forcing = forcing_integral(f, model);
    ob.outside_fraction = outside_mass_fraction(f, ob.cone_radius + 2.0 * f.h);
    return ob;
}

/// Evolves the field to t_end. Throws std::domain_error if the forward cone would reach the
/// outer boundary or t_end exceeds T0, std::invalid_argument for a CFL-violating fixed step.
inline PdeRun evolve(PdeField& field, const PdeModel& model, double t_end, const PdeControls& controls = {}) {
    model.validate();
    const auto& par = model.params;
    if (field.mode == GridMode::FullLine && field.n != 1) throw std::invalid_argument("full-line mode requires n = 1");
    if (field.n != par.n) throw std::invalid_argument("field dimension does not match the model");
    const double horizon = horizon_end(par);
    if (!(t_end > field.t)) throw std::domain_error("t_end must exceed the current time");
    if (t_end > horizon) throw std::domain_error("t_end exceeds the horizon T0");
    double stop = t_end;
    if (std::isfinite(horizon) && stop > horizon * (1.0 - 1e-9)) stop = horizon * (1.0 - 1e-9);
    if (field_cone_radius(field, model, stop) >= field.extent())
        throw std::domain_error("domain too small: the forward cone reaches the outer boundary before t_end");
    if (controls.step.fixed_step > 0.0 && controls.step.fixed_step > cfl_limit(field, model, stop))
        throw std::invalid_argument("fixed time step violates the CFL stability limit");

    const std::size_t N = field.size();
    const detail::Stencil st(field);
    const double c2 = par.c * par.c;
    const double expo = 0.5 * par.n * (model.p - 1.0);
    std::vector<double> lap(N);

    // y = [Re u | Im u | Re u_t | Im u_t]
    std::vector<double> y(4 * N);
    for (std::size_t j = 0; j < N; ++j) {
        y[j] = field.u[j].real();
        y[N + j] = field.u[j].imag();
        y[2 * N + j] = field.ut[j].real();
        y[3 * N + j] = field.ut[j].imag();
    }
    auto rhs = [&](double t, const std::vector<double>& s, std::vector<double>& ds) {
        const double log_a = std::log(par.a0) + log_scale_ratio(par, t);
        const double inv_a2 = std::exp(-2.0 * log_a);
        const double m2 = curved_mass_sq(par, t);
        const double force = model.lambda > 0.0 ? model.lambda * std::exp(-expo * log_a) : 0.0;
        std::copy(s.begin() + 2 * N, s.end(), ds.begin());
        for (int part = 0; part < 2; ++part) {
            const double* u = s.data() + part * N;
            double* acc = ds.data() + (2 + part) * N;
            st.apply(u, lap.data(), N);
            for (std::size_t j = 0; j < N; ++j) acc[j] = c2 * (inv_a2 * lap[j] - m2 * u[j]);
        }
        if (force > 0.0) {
            double* acc = ds.data() + 2 * N;
            for (std::size_t j = 0; j < N; ++j) {
                const double mod = std::hypot(s[j], s[N + j]);
                acc[j] += c2 * force * pow_nonneg(mod, model.p);
            }
        }
    };
    auto magnitude = [&](const std::vector<double>& s) {
        double m = 0.0;
        for (std::size_t j = 0; j < N; ++j) m = std::max(m, std::hypot(s[j], s[N + j]));
        return m;
    };
    auto unpack = [&](double t, const std::vector<double>& s) {
        field.t = t;
        for (std::size_t j = 0; j < N; ++j) {
            field.u[j] = {s[j], s[N + j]};
            field.ut[j] = {s[2 * N + j], s[3 * N + j]};
        }
    };

    PdeRun run;
    run.observations.push_back(observe(field, model));
    const double w0 = std::abs(run.observations.front().W);
    const double level = controls.step.blowup_factor * std::max(1.0, max_abs(field.u));
    bool dense = false;

    StepControls sc = controls.step;
    if (sc.fixed_step <= 0.0) sc.h_max = std::min(sc.h_max, cfl_limit(field, model, stop));
    DormandPrince45 stepper(sc);
    double t = field.t;
    const double dt_out = controls.output_interval > 0.0 ? controls.output_interval : stop - t;
    while (t < stop) {
        const double target = std::min(stop, t + dt_out);
        const auto term = stepper.advance(
            rhs, t, y, target,
            [&](double tt, const std::vector<double>& s) {
                if (tt >= target) return;  // recorded below
                if (!dense) {
                    double w = 0.0;
                    for (std::size_t j = 0; j < N; ++j) w += st.trapz[j] * s[j];
                    if (field.mode == GridMode::Radial) w *= unit_sphere_area(field.n);
                    dense = std::abs(w) > controls.blowup_cadence_factor * std::max(w0, 1e-300);
                    if (!dense) return;
                }
                unpack(tt, s);
                run.observations.push_back(observe(field, model));
            },
            magnitude, level);
        unpack(t, y);
        run.observations.push_back(observe(field, model));
        if (!dense && std::abs(run.observations.back().W) > controls.blowup_cadence_factor * std::max(w0, 1e-300))
            dense = true;
        if (term != Termination::ReachedHorizon) {
            run.termination = term;
            if (term == Termination::BlowupThreshold) {
                run.blowup_detected = true;
                run.blowup_time = t;
            }
            break;
        }
    }
    run.steps = stepper.accepted();
    return run;
}

inline PdeRun evolve(PdeField& field, const TheoremInputs& in, double t_end, const PdeControls& controls = {}) {
    return evolve(field, make_pde_model(in), t_end, controls);
}

// ---------------------------------------------------------------------------------
// Finite speed of propagation

struct ConeCheck {
    std::vector<double> times;
    std::vector<bool> contained;
    bool all = true;
    bool proven_regime = true;  // monotone scale factor
};

/// Width of the dispersive numerical precursor ahead of a front after travelling `distance`
/// on a grid of spacing h, down to the 1e-10 support floor: 10 (distance h^2)^(1/3).
inline double dispersion_slack(double distance, double h) {
    return distance > 0.0 ? 10.0 * std::cbrt(distance * h * h) : 0.0;
}

/// support_radius <= cone radius + 2h + slack at every recorded time. A negative slack
/// selects dispersion_slack of the distance the cone has travelled.
inline ConeCheck cone_containment_check(const PdeRun& run, const ConeGeometry& geom, double h, double slack = -1.0) {
    ConeCheck out;
    out.proven_regime = true;  // closed-form scale factors are monotone
    for (const auto& ob : run.observations) {
        const double cone = comoving_radius(geom, ob.t);
        const double extra = slack >= 0.0 ? slack : dispersion_slack(cone - geom.r0, h);
        const bool ok = ob.support_radius <= cone + 2.0 * h + extra;
        out.times.push_back(ob.t);
        out.contained.push_back(ok);
        out.all = out.all && ok;
    }
    return out;
}

/// Cone check for a field at a single instant (e.g. widened initial data).
inline bool cone_contains(const PdeField& f, const ConeGeometry& geom, double slack = 0.0) {
    return support_radius(f) <= comoving_radius(geom, f.t) + 2.0 * f.h + slack;
}

// ---------------------------------------------------------------------------------
// Reference solution for the flat, massless, linear n = 1 problem

/// Antiderivative of phi(x) = (1 - x^2)^3 on [-1, 1], clamped outside.
inline double profile_antiderivative(double x) {
    const double y = std::clamp(x, -1.0, 1.0);
    const double y2 = y * y;
    return y * (1.0 - y2 + 0.6 * y2 * y2 - y2 * y2 * y2 / 7.0);
}

/// d'Alembert: 1/2[u0(x - ct) + u0(x + ct)] + 1/(2c) int_{x-ct}^{x+ct} u1, c = c/a0.
/// x is measured from the apex.
inline double dalembert_oracle(const PdeModel& model, const InitialData& data, double t, double x) {
    const auto& par = model.params;
    if (par.n != 1 || model.lambda != 0.0 || par.m_squared != 0.0 || par.H != 0.0)
        throw std::invalid_argument("d'Alembert reference requires n = 1, lambda = 0, m = 0, H = 0");
    const double ce = par.c / par.a0;
    const double left = x - ce * t, right = x + ce * t;
    const double wave = 0.5 * data.s0 * (data.profile(std::abs(left)) + data.profile(std::abs(right)));
    const double integral =
        data.r0 * (profile_antiderivative(right / data.r0) - profile_antiderivative(left / data.r0));
    return wave + data.s1 * integral / (2.0 * ce);
}

// ---------------------------------------------------------------------------------
// CSV

/// Columns: r, Re u, Im u, Re ut, Im ut
inline void write_field_csv(std::ostream& os, const PdeField& f) {
    os << "r,re_u,im_u,re_ut,im_ut\n";
    for (std::size_t j = 0; j < f.size(); ++j) {
        os << format_double(f.position(j)) << ',' << format_double(f.u[j].real()) << ','
           << format_double(f.u[j].imag()) << ',' << format_double(f.ut[j].real()) << ','
           << format_double(f.ut[j].imag()) << '\n';
    }
}

/// Columns: t, W, support_radius, cone_radius, energy
inline void write_observables_csv(std::ostream& os, const PdeRun& run) {
    os << "t,W,support_radius,cone_radius,energy\n";
    for (const auto& ob : run.observations) {
        os << format_double(ob.t) << ',' << format_double(ob.W) << ',' << format_double(ob.support_radius) << ','
           << format_double(ob.cone_radius) << ',' << format_double(ob.energy) << '\n';
    }
}

}  // namespace flrw
