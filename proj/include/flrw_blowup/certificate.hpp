#pragma once

// Blow-up certificate: admissible N, the constants A and B, data thresholds for
// (w0, w1), the lifespan bound T*, and the explicit FLRW case table.

#include <cmath>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cone_geometry.hpp"
#include "cosmology.hpp"
#include "numeric.hpp"

namespace flrw {

struct TheoremInputs {
    ConeGeometry geom;
    double N = 0.0;
    double epsilon = 0.5;
    double theta = 0.5;
    double lambda = 1.0;
    double p = 2.0;
    double w0 = 0.0;
    double w1 = 0.0;

    const CosmologyParams& params() const { return geom.params; }
    double r0() const { return geom.r0; }

    void validate() const {
        geom.params.validate();
        if (!(geom.r0 > 0.0)) throw std::invalid_argument("r0 must be positive (data support radius)");
        if (!(N >= 0.0) || !std::isfinite(N)) throw std::invalid_argument("N must be a finite number >= 0");
        if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("epsilon must lie in (0,1)");
        if (!(theta > 0.0 && theta < 1.0)) throw std::invalid_argument("theta must lie in (0,1)");
        if (!(lambda > 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("lambda must be positive");
        if (!(p > 1.0) || !std::isfinite(p)) throw std::invalid_argument("p must lie in (1,inf)");
        if (!std::isfinite(w0) || !std::isfinite(w1)) throw std::invalid_argument("w0 and w1 must be finite");
    }
};

inline TheoremInputs make_inputs(const CosmologyParams& params, double r0, double N, double epsilon,
                                 double theta, double lambda, double p, double w0, double w1) {
    TheoremInputs in;
    in.geom = ConeGeometry(params, r0);
    in.N = N;
    in.epsilon = epsilon;
    in.theta = theta;
    in.lambda = lambda;
    in.p = p;
    in.w0 = w0;
    in.w1 = w1;
    in.validate();
    return in;
}

inline const char* kExcludedReason = "excluded region (1+sigma)H<0, sigma<0";

/// Q = omega_n^{2/n} a0
inline double q_constant(const CosmologyParams& p) {
    return std::pow(unit_ball_volume(p.n), 2.0 / p.n) * p.a0;
}

// ---------------------------------------------------------------------------------
// Admissible N

struct NCheck {
    bool ok = false;
    double inf_mass_sq = 0.0;
    std::string reason;
};

inline NCheck check_N(const TheoremInputs& in) {
    const auto mb = classify_mass_behavior(in.params());
    NCheck out;
    out.inf_mass_sq = mb.infimum;
    if (mb.tag == MassTag::DivergesMinus) {
        out.reason = kExcludedReason;
        return out;
    }
    if (!(in.N >= 0.0)) {
        out.reason = "N must be >= 0";
        return out;
    }
    out.ok = in.N * in.N + mb.infimum >= 0.0;
    if (!out.ok) out.reason = "N^2 + inf M^2 < 0";
    return out;
}

// ---------------------------------------------------------------------------------
// Asymptotics of q~ used to decide A > 0 and B < inf before any numerics.

struct QTildeGrowth {
    bool bounded = true;       // q~ bounded on [0, T0)
    double exp_rate = 0.0;     // q~ ~ e^{exp_rate t} (T0 = inf)
    double poly_exponent = 0;  // q~ ~ t^{poly_exponent} (T0 = inf, exp_rate = 0)
    bool log_factor = false;   // extra log^2 t factor
};

inline QTildeGrowth q_tilde_growth(const ConeGeometry& g) {
    QTildeGrowth out;
    if (g.monotonicity == Monotonicity::NonIncreasing) return out;
    if (g.monotonicity == Monotonicity::NotMonotone)
        throw std::invalid_argument("q~ requires a monotone q; this geometry is NotMonotone");
    const auto& p = g.params;
    if (p.H == 0.0) {
        out.bounded = false;
        out.poly_exponent = 2.0;
        return out;
    }
    if (p.de_sitter()) {
        out.bounded = false;
        out.exp_rate = std::abs(p.H);
        return out;
    }
    // a ~ s^e with s = 1 + rate t; r - r0 ~ s^{1-e} (log s when e = 1)
    const double e = 2.0 / (p.n * (1.0 + p.sigma));
    if (std::isfinite(horizon_end(p))) {
        // s -> 0 at the horizon
        if (p.H > 0.0)
            out.bounded = false;  // a -> inf
        else
            out.bounded = e <= 2.0;
        return out;
    }
    out.bounded = false;
    out.poly_exponent = e + 2.0 * std::max(1.0 - e, 0.0);
    out.log_factor = e == 1.0;
    return out;
}

/// A > 0 decided from exponential-rate / polynomial-order comparison.
inline bool a_positive_analytic(const TheoremInputs& in) {
    const auto growth = q_tilde_growth(in.geom);
    if (growth.bounded) return true;
    if (std::isfinite(in.geom.horizon())) return false;
    const double rate = in.params().c * in.N * (1.0 - in.epsilon);
    if (growth.exp_rate > 0.0) return rate >= 0.5 * in.params().n * growth.exp_rate;
    return rate > 0.0;
}

/// B < inf decided analytically; requires check_N(in).ok.
inline bool b_finite_analytic(const TheoremInputs& in) {
    const auto& p = in.params();
    const auto mb = classify_mass_behavior(p);
    const double n2 = in.N * in.N;
    const bool mass_constant = mb.tag == MassTag::ConstantM2 || mb.tag == MassTag::DeSitterConstant;
    if (mass_constant && n2 + mb.infimum == 0.0) return true;  // objective identically 0
    const auto growth = q_tilde_growth(in.geom);
    if (std::isfinite(in.geom.horizon())) {
        if (mb.tag == MassTag::DivergesPlus) return false;
        return growth.bounded;
    }
    if (growth.bounded) return true;
    const double decay = p.c * in.N;
    if (growth.exp_rate > 0.0) return decay >= 0.5 * p.n * growth.exp_rate;
    if (decay > 0.0) return true;
    // N = 0 with polynomially growing q~: N^2 + M^2 -> m^2 as t -> inf
    if (p.m_squared > 0.0) return false;
    // m^2 = 0, H != 0: N^2 + M^2 = sigma k^2 s^{-2}
    const double total = 0.5 * p.n * growth.poly_exponent - 2.0 / (in.p - 1.0);
    return total < 0.0 || (total == 0.0 && !growth.log_factor);
}

// ---------------------------------------------------------------------------------
// A and B

struct ExtremumResult {
    double value = 0.0;  // A or B (0 / +inf when the analytic gate fails)
    double arg = 0.0;    // where the extremum is attained (grid estimate)
    bool ok = false;     // A > 0, resp. B < inf
};

/// log of e^{cN(1-eps)t} / q~^{n/2}(t)
inline double log_a_objective(const TheoremInputs& in, double t) {
    const auto& p = in.params();
    return p.c * in.N * (1.0 - in.epsilon) * t - 0.5 * p.n * log_q_tilde(in.geom, t);
}

/// log of q~^{n/2} {N^2 + M^2}^{1/(p-1)} / e^{cNt}
inline double log_b_objective(const TheoremInputs& in, double t) {
    const auto& p = in.params();
    const double mass = in.N * in.N + curved_mass_sq(p, t);
    return 0.5 * p.n * log_q_tilde(in.geom, t) + safe_log(mass) / (in.p - 1.0) - p.c * in.N * t;
}

inline ExtremumResult compute_A(const TheoremInputs& in, std::size_t nodes = kDefaultGridNodes) {
    if (in.geom.monotonicity == Monotonicity::NotMonotone) return {0.0, 0.0, false};
    if (!a_positive_analytic(in)) return {0.0, 0.0, false};
    const auto ext = grid_extremum([&](double t) { return log_a_objective(in, t); },
                                   in.geom.horizon(), Sense::Minimize, nodes);
    const double a = std::exp(ext.value);
    return {a, ext.arg, a > 0.0};
}

inline ExtremumResult compute_B(const TheoremInputs& in, std::size_t nodes = kDefaultGridNodes) {
    if (in.geom.monotonicity == Monotonicity::NotMonotone) return {kInf, 0.0, false};
    if (!check_N(in).ok)
        throw std::invalid_argument("B requires an admissible N (N^2 + M^2 >= 0 on (0,T0))");
    if (!b_finite_analytic(in)) return {kInf, 0.0, false};
    const auto ext = grid_extremum([&](double t) { return log_b_objective(in, t); },
                                   in.geom.horizon(), Sense::Maximize, nodes);
    const double b = std::exp(ext.value);
    return {b, ext.arg, std::isfinite(b)};
}

/// sup_t e^{-cNt} {(N^2 + M^2) / ((1-theta) b)}^{1/(p-1)} with the unmodified b(t);
/// the first data condition of the comparison lemma.
inline double comparison_w0_bound(const TheoremInputs& in, std::size_t nodes = kDefaultGridNodes) {
    const auto& p = in.params();
    if (in.geom.monotonicity == Monotonicity::NonDecreasing && !b_finite_analytic(in)) return kInf;
    const double log_scale = 0.5 * p.n * std::log(q_constant(p)) -
                             std::log((1.0 - in.theta) * in.lambda) / (in.p - 1.0);
    const auto ext = grid_extremum(
        [&](double t) {
            const double mass = in.N * in.N + curved_mass_sq(p, t);
            return 0.5 * p.n * log_q(in.geom, t) + safe_log(mass) / (in.p - 1.0) - p.c * in.N * t;
        },
        in.geom.horizon(), Sense::Maximize, nodes);
    return std::exp(ext.value + log_scale);
}

// ---------------------------------------------------------------------------------
// Thresholds and lifespan

struct DataThresholds {
    double w0 = 0.0;
    double w1 = 0.0;
};

inline DataThresholds data_thresholds(const TheoremInputs& in, double B, double Q) {
    const auto& p = in.params();
    DataThresholds th;
    th.w0 = std::pow(Q, 0.5 * p.n) * B / std::pow((1.0 - in.theta) * in.lambda, 1.0 / (in.p - 1.0));
    const double energy = std::sqrt(2.0 * in.lambda * p.c * p.c * in.theta / (in.p + 1.0)) *
                          pow_nonneg(in.w0, 0.5 * (in.p + 1.0)) /
                          std::pow(in.r0() * in.r0() * Q, 0.25 * p.n * (in.p - 1.0));
    th.w1 = std::max(p.c * in.N * in.w0, energy);
    return th;
}

struct Lifespan {
    double D = 0.0;
    double T_star = kInf;
    double C_squared = 0.0;
    double alpha = 1.0;
    bool within_horizon = false;  // T* <= T0
};

inline Lifespan lifespan(const TheoremInputs& in, double A, double Q) {
    const auto& p = in.params();
    if (!(A > 0.0)) throw std::invalid_argument("lifespan requires A > 0");
    if (!(in.w0 > 0.0)) throw std::invalid_argument("lifespan requires w0 > 0");
    Lifespan out;
    const double pm1 = in.p - 1.0;
    out.D = 2.0 * p.c * p.c * in.theta * in.lambda * std::pow(A, pm1) /
            ((in.p + 1.0) * std::pow(Q, 0.5 * p.n * pm1));
    out.T_star = 2.0 / (in.epsilon * pm1 * std::sqrt(out.D) * std::pow(in.w0, 0.5 * pm1));
    // inf of b~ e^{cN(1-eps)(p-1)t} = lambda Q^{-n(p-1)/2} A^{p-1}
    const double inf_b = in.lambda * std::pow(Q, -0.5 * p.n * pm1) * std::pow(A, pm1);
    out.C_squared = 2.0 * p.c * p.c * in.theta * std::pow(in.w0, (1.0 - in.epsilon) * pm1) /
                    (in.p + 1.0) * inf_b;
    out.alpha = 1.0 + in.epsilon * pm1 / 2.0;
    out.within_horizon = out.T_star <= in.geom.horizon();
    return out;
}

/// C^2 from its defining infimum, minimising b~(t) e^{cN(1-eps)(p-1)t} directly.
inline double c_squared_by_minimization(const TheoremInputs& in,
                                        std::size_t nodes = kDefaultGridNodes) {
    const auto& p = in.params();
    if (!a_positive_analytic(in)) return 0.0;
    const double pm1 = in.p - 1.0;
    const double Q = q_constant(p);
    const auto ext = grid_extremum(
        [&](double t) {
            const double log_b_tilde =
                std::log(in.lambda) - 0.5 * p.n * pm1 * (std::log(Q) + log_q_tilde(in.geom, t));
            return log_b_tilde + p.c * in.N * (1.0 - in.epsilon) * pm1 * t;
        },
        in.geom.horizon(), Sense::Minimize, nodes);
    return 2.0 * p.c * p.c * in.theta * std::pow(in.w0, (1.0 - in.epsilon) * pm1) / (in.p + 1.0) *
           std::exp(ext.value);
}

// ---------------------------------------------------------------------------------
// Explicit FLRW case table

enum class CorollaryCase { I = 1, II, III, IV, V, VI, VII, VIII };

inline const char* to_string(CorollaryCase c) {
    static const char* names[] = {"(i)", "(ii)", "(iii)", "(iv)", "(v)", "(vi)", "(vii)", "(viii)"};
    return names[static_cast<int>(c) - 1];
}

struct CaseClause {
    std::string text;
    bool holds = false;
};

struct CaseEvaluation {
    CorollaryCase tag = CorollaryCase::I;
    std::vector<CaseClause> clauses;
    bool matched() const {
        for (const auto& c : clauses)
            if (!c.holds) return false;
        return true;
    }
};

struct CorollaryReport {
    std::optional<CorollaryCase> matched;
    std::vector<CaseEvaluation> cases;
    bool excluded = false;
    std::string reason;
};

inline CorollaryReport corollary_case_check(const TheoremInputs& in) {
    const auto& p = in.params();
    CorollaryReport rep;
    if (p.excluded_region()) {
        rep.excluded = true;
        rep.reason = kExcludedReason;
        return rep;
    }
    const double H = p.H, s = p.sigma, N = in.N, c = p.c;
    const double k2 = p.hubble_mass_sq();
    const double nm = N * N + p.m_squared;
    const double r_edge = 2.0 * c / (p.a0 * std::abs(H));  // = -2c/(a0 H) for H < 0
    const double n_min = p.n * std::abs(H) / (2.0 * c * (1.0 - in.epsilon));
    const CaseClause npos{"N>0", N > 0.0};
    auto make = [&](CorollaryCase tag, std::vector<CaseClause> cl) {
        cl.insert(cl.begin(), npos);
        rep.cases.push_back({tag, std::move(cl)});
    };
    make(CorollaryCase::I, {{"H=0", H == 0.0}, {"N^2+m^2>=0", nm >= 0.0}, {"r0>0", in.r0() > 0.0}});
    make(CorollaryCase::II,
         {{"H>0", H > 0.0}, {"sigma>=0", s >= 0.0}, {"N^2+m^2>=0", nm >= 0.0}, {"r0>0", in.r0() > 0.0}});
    make(CorollaryCase::III, {{"H>0", H > 0.0},
                              {"-1<sigma<0", s > -1.0 && s < 0.0},
                              {"N^2+m^2+sigma(nH/2c)^2>=0", nm + s * k2 >= 0.0},
                              {"r0>0", in.r0() > 0.0}});
    make(CorollaryCase::IV, {{"H>0", H > 0.0},
                             {"sigma=-1", s == -1.0},
                             {"N^2+m^2-(nH/2c)^2>=0", nm - k2 >= 0.0},
                             {"N>nH/(2c(1-eps))", H > 0.0 && N > n_min},
                             {"r0>0", in.r0() > 0.0}});
    make(CorollaryCase::V, {{"H<0", H < 0.0},
                            {"sigma>0", s > 0.0},
                            {"N^2+m^2+sigma(nH/2c)^2>=0", nm + s * k2 >= 0.0},
                            {"r0>=-2c/(a0H)", H < 0.0 && in.r0() >= r_edge}});
    make(CorollaryCase::VI, {{"H<0", H < 0.0},
                             {"sigma=0", s == 0.0},
                             {"N^2+m^2>=0", nm >= 0.0},
                             {"r0>0", in.r0() > 0.0},
                             {"n>=2 => r0>=-2c/(a0H)", p.n < 2 || (H < 0.0 && in.r0() >= r_edge)}});
    make(CorollaryCase::VII, {{"H<0", H < 0.0},
                              {"sigma=-1", s == -1.0},
                              {"N^2+m^2-(nH/2c)^2>=0", nm - k2 >= 0.0},
                              {"r0<=2c/(a0|H|)", H < 0.0 && in.r0() <= r_edge},
                              {"N>n|H|/(2c(1-eps))", H < 0.0 && N > n_min}});
    make(CorollaryCase::VIII, {{"H<0", H < 0.0},
                               {"sigma<-1", s < -1.0},
                               {"N^2+m^2+sigma(nH/2c)^2>=0", nm + s * k2 >= 0.0},
                               {"r0<=2c/(a0|H|)", H < 0.0 && in.r0() <= r_edge}});
    for (const auto& ev : rep.cases) {
        if (ev.matched()) {
            rep.matched = ev.tag;
            break;
        }
    }
    if (!rep.matched) rep.reason = "no case (i)-(viii) matches";
    return rep;
}

// ---------------------------------------------------------------------------------
// Certificate

enum class CertificateStatus { Valid, Invalid, Inconclusive };

inline const char* to_string(CertificateStatus s) {
    switch (s) {
        case CertificateStatus::Valid: return "valid";
        case CertificateStatus::Invalid: return "invalid";
        case CertificateStatus::Inconclusive: return "inconclusive";
    }
    return "?";
}

struct Verdict {
    std::string name;
    bool holds = false;
    std::string detail;
};

struct BlowupCertificate {
    double A = 0.0;
    double B = kInf;
    double Q = 0.0;
    double omega_n = 0.0;
    double D = 0.0;
    double C_squared = 0.0;
    double alpha = 1.0;
    double w0_threshold = kInf;
    double w1_threshold = kInf;
    double T_star = kInf;
    double T0 = kInf;
    Monotonicity monotonicity = Monotonicity::NotMonotone;
    MassTag mass_behavior = MassTag::ConstantM2;
    std::vector<Verdict> verdicts;
    std::optional<CorollaryCase> corollary_case;
    CertificateStatus status = CertificateStatus::Invalid;

    bool valid() const { return status == CertificateStatus::Valid; }

    const Verdict* find(const std::string& name) const {
        for (const auto& v : verdicts)
            if (v.name == name) return &v;
        return nullptr;
    }

    std::vector<std::string> failed() const {
        std::vector<std::string> out;
        for (const auto& v : verdicts)
            if (!v.holds) out.push_back(v.name);
        return out;
    }
};

namespace detail {

inline std::string fmt_num(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

}  // namespace detail

struct CertifyOptions {
    std::size_t grid_nodes = kDefaultGridNodes;
};

/// Runs every hypothesis check and assembles the certificate. Failures are verdict
/// entries, never exceptions (beyond invalid inputs).
inline BlowupCertificate certify(const TheoremInputs& in, const CertifyOptions& opt = {}) {
    in.validate();
    const auto& p = in.params();
    BlowupCertificate cert;
    cert.T0 = horizon_end(p);
    cert.omega_n = unit_ball_volume(p.n);
    cert.Q = q_constant(p);
    cert.monotonicity = in.geom.monotonicity;
    cert.mass_behavior = classify_mass_behavior(p).tag;
    cert.alpha = 1.0 + in.epsilon * (in.p - 1.0) / 2.0;

    const auto cor = corollary_case_check(in);
    cert.corollary_case = cor.matched;
    if (cor.excluded) {
        cert.verdicts.push_back({"N_admissible", false, kExcludedReason});
        cert.status = CertificateStatus::Invalid;
        return cert;
    }

    auto add = [&](std::string name, bool holds, std::string detail = {}) {
        cert.verdicts.push_back({std::move(name), holds, std::move(detail)});
        return holds;
    };

    add("support_radius", in.r0() > 0.0, "supp u0, u1 within |x| <= r0");
    const auto nc = check_N(in);
    add("N_admissible", nc.ok, nc.ok ? "N^2 + inf M^2 = " + detail::fmt_num(in.N * in.N + nc.inf_mass_sq)
                                      : nc.reason);
    const bool mono = add("q_monotone", in.geom.monotonicity != Monotonicity::NotMonotone,
                          to_string(in.geom.monotonicity));

    bool a_ok = false, b_ok = false;
    if (mono) {
        const auto a = compute_A(in, opt.grid_nodes);
        cert.A = a.value;
        a_ok = add("A_positive", a.ok, "A = " + detail::fmt_num(a.value));
        if (nc.ok) {
            const auto b = compute_B(in, opt.grid_nodes);
            cert.B = b.value;
            b_ok = add("B_finite", b.ok, "B = " + detail::fmt_num(b.value));
        } else {
            add("B_finite", false, "requires an admissible N");
        }
    } else {
        add("A_positive", false, "requires a monotone q");
        add("B_finite", false, "requires a monotone q");
    }

    if (b_ok) {
        const auto th = data_thresholds(in, cert.B, cert.Q);
        cert.w0_threshold = th.w0;
        cert.w1_threshold = th.w1;
        add("w0_above_threshold", in.w0 > th.w0,
            "w0 = " + detail::fmt_num(in.w0) + ", threshold = " + detail::fmt_num(th.w0));
        add("w1_above_threshold", in.w1 >= th.w1,
            "w1 = " + detail::fmt_num(in.w1) + ", threshold = " + detail::fmt_num(th.w1));
    } else {
        add("w0_above_threshold", false, "requires B < inf");
        add("w1_above_threshold", false, "requires B < inf");
    }

    bool horizon_ok = false;
    if (a_ok && in.w0 > 0.0) {
        const auto life = lifespan(in, cert.A, cert.Q);
        cert.D = life.D;
        cert.T_star = life.T_star;
        cert.C_squared = life.C_squared;
        cert.alpha = life.alpha;
        horizon_ok = add("T_star_within_horizon", life.within_horizon,
                         "T* = " + detail::fmt_num(life.T_star) + ", T0 = " + detail::fmt_num(cert.T0));
    } else {
        add("T_star_within_horizon", false, "requires A > 0 and w0 > 0");
    }

    bool all = true;
    for (const auto& v : cert.verdicts) all = all && v.holds;
    if (all) {
        cert.status = CertificateStatus::Valid;
    } else {
        bool rest = true;
        for (const auto& v : cert.verdicts)
            if (v.name != "T_star_within_horizon") rest = rest && v.holds;
        cert.status = (rest && !horizon_ok && std::isfinite(cert.T_star)) ? CertificateStatus::Inconclusive
                                                                            : CertificateStatus::Invalid;
    }
    return cert;
}

}  // namespace flrw
