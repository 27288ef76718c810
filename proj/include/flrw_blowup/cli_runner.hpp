#pragma once

// Command implementations behind the flrw_blowup executable:
// analyze, ode, pde, cone-check and sweep. Exit codes: 0 success, 2 failed hypothesis, 1 error.

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "certificate.hpp"
#include "io.hpp"
#include "ode_engine.hpp"
#include "pde_engine.hpp"
#include "scenario.hpp"

namespace flrw {

enum ExitCode : int { kExitOk = 0, kExitError = 1, kExitHypothesis = 2 };

struct CliOptions {
    std::string scenario_path;
    std::optional<std::string> out_dir;
    std::optional<double> grid_h;
    std::optional<double> t_end;
    unsigned workers = 1;
};

/// Worker count from FLRW_BLOWUP_WORKERS, else 1.
inline unsigned default_workers() {
    if (const char* env = std::getenv("FLRW_BLOWUP_WORKERS")) {
        try {
            const long v = std::stol(env);
            if (v > 0) return static_cast<unsigned>(v);
        } catch (const std::exception&) {
        }
    }
    return 1;
}

// ---------------------------------------------------------------------------------
// JSON helpers

/// Finite doubles as numbers; inf/nan as strings so the document stays valid JSON.
inline nlohmann::json json_number(double x) {
    if (std::isfinite(x)) return x;
    return format_double(x);
}

inline nlohmann::json corollary_json(const CorollaryReport& rep) {
    nlohmann::json j;
    j["matched"] = rep.matched ? nlohmann::json(to_string(*rep.matched)) : nlohmann::json(nullptr);
    j["excluded"] = rep.excluded;
    j["reason"] = rep.reason;
    j["cases"] = nlohmann::json::array();
    for (const auto& ev : rep.cases) {
        nlohmann::json c;
        c["case"] = to_string(ev.tag);
        c["matched"] = ev.matched();
        c["clauses"] = nlohmann::json::array();
        for (const auto& cl : ev.clauses) c["clauses"].push_back({{"clause", cl.text}, {"holds", cl.holds}});
        j["cases"].push_back(std::move(c));
    }
    return j;
}

inline nlohmann::json certificate_json(const BlowupCertificate& cert, const CorollaryReport& rep) {
    nlohmann::json j;
    j["valid"] = cert.valid();
    j["status"] = to_string(cert.status);
    j["A"] = json_number(cert.A);
    j["B"] = json_number(cert.B);
    j["Q"] = json_number(cert.Q);
    j["omega_n"] = json_number(cert.omega_n);
    j["D"] = json_number(cert.D);
    j["C_squared"] = json_number(cert.C_squared);
    j["alpha"] = json_number(cert.alpha);
    j["w0_threshold"] = json_number(cert.w0_threshold);
    j["w1_threshold"] = json_number(cert.w1_threshold);
    j["T_star"] = json_number(cert.T_star);
    j["T0"] = json_number(cert.T0);
    j["q_monotonicity"] = to_string(cert.monotonicity);
    j["mass_behavior"] = to_string(cert.mass_behavior);
    j["corollary_case"] = cert.corollary_case ? nlohmann::json(to_string(*cert.corollary_case)) : nlohmann::json(nullptr);
    j["verdicts"] = nlohmann::json::array();
    for (const auto& v : cert.verdicts) j["verdicts"].push_back({{"name", v.name}, {"holds", v.holds}, {"reason", v.detail}});
    j["corollary"] = corollary_json(rep);
    return j;
}

namespace detail {

inline std::filesystem::path output_dir(const Scenario& sc, const CliOptions& opt) {
    std::filesystem::path dir = opt.out_dir ? *opt.out_dir : sc.run.output;
    std::filesystem::create_directories(dir);
    return dir;
}

inline std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream os(path);
    if (!os) throw std::ios_base::failure("cannot write '" + path.string() + "'");
    return os;
}

/// t_end from --t-end, the run block, or 2 T* (1 without a finite T*), clipped below the horizon.
inline double resolve_t_end(const Scenario& sc, const CliOptions& opt, const BlowupCertificate* cert) {
    double t = 1.0;
    if (opt.t_end) {
        t = *opt.t_end;
    } else if (sc.run.t_end) {
        t = *sc.run.t_end;
    } else if (cert && std::isfinite(cert->T_star)) {
        t = 2.0 * cert->T_star;
    }
    const double horizon = horizon_end(sc.cosmology);
    if (std::isfinite(horizon)) t = std::min(t, horizon);
    return t;
}

inline StepControls step_controls(const Scenario& sc) {
    StepControls c;
    c.rtol = sc.run.rtol;
    c.atol = sc.run.atol;
    return c;
}

}  // namespace detail

// ---------------------------------------------------------------------------------
// Commands

inline int cmd_analyze(const Scenario& sc, const CliOptions& opt, std::ostream& log) {
    const auto in = sc.inputs();
    const auto rep = corollary_case_check(in);
    const auto cert = certify(in);
    const auto doc = certificate_json(cert, rep);
    const auto dir = detail::output_dir(sc, opt);
    auto os = detail::open_out(dir / "certificate.json");
    os << doc.dump(2) << '\n';
    log << doc.dump(2) << '\n';
    return cert.valid() ? kExitOk : kExitHypothesis;
}

inline int cmd_ode(const Scenario& sc, const CliOptions& opt, std::ostream& log) {
    const auto in = sc.inputs();
    if (in.params().excluded_region()) {
        log << "ode: " << kExcludedReason << '\n';
        return kExitHypothesis;
    }
    const bool benchmark = sc.run.ode_b_constant || sc.run.ode_m_squared_constant;
    std::optional<BlowupCertificate> cert;
    ComparisonOde ode;
    if (benchmark) {
        ode.c = sc.cosmology.c;
        ode.p = sc.p;
        const double b = sc.run.ode_b_constant.value_or(1.0);
        const double m2 = sc.run.ode_m_squared_constant.value_or(0.0);
        ode.b = [b](double) { return b; };
        ode.mass_sq = [m2](double) { return m2; };
        ode.w0 = sc.w0;
        ode.w1 = sc.w1;
    } else {
        cert = certify(in);
        ode = make_comparison_ode(in);
    }
    const double t_end = detail::resolve_t_end(sc, opt, cert ? &*cert : nullptr);
    const auto traj = integrate(ode, t_end, detail::step_controls(sc));
    const auto dir = detail::output_dir(sc, opt);
    {
        auto os = detail::open_out(dir / "trajectory.csv");
        write_trajectory_csv(os, traj, in, cert ? &*cert : nullptr);
    }
    nlohmann::json rep;
    rep["termination"] = to_string(traj.termination_reason);
    rep["samples"] = traj.samples.size();
    rep["t_last"] = json_number(traj.samples.back().t);
    rep["blowup_detected"] = traj.blowup_detected;
    const auto bt = traj.blowup_detected ? detect_blowup_time(traj, ode) : std::nullopt;
    rep["blowup_time"] = bt ? json_number(*bt) : nlohmann::json(nullptr);
    int code = kExitOk;
    if (!benchmark) {
        rep["T_star"] = json_number(cert->T_star);
        try {
            const auto lemma = check_comparison_properties(traj, in);
            rep["comparison_w0_bound"] = json_number(lemma.w0_bound);
            rep["properties"] = nlohmann::json::array();
            for (const auto& p : lemma.properties) {
                rep["properties"].push_back({{"property", p.name},
                                             {"holds", p.holds},
                                             {"violations", p.violations},
                                             {"worst_margin", json_number(p.worst_margin)}});
            }
            rep["properties_hold"] = lemma.all_hold();
            if (!lemma.all_hold()) code = kExitHypothesis;
        } catch (const std::invalid_argument& e) {
            rep["properties_hold"] = false;
            rep["reason"] = e.what();
            code = kExitHypothesis;
        }
    }
    auto os = detail::open_out(dir / "ode_report.json");
    os << rep.dump(2) << '\n';
    log << rep.dump(2) << '\n';
    return code;
}

namespace detail {

struct PdeOutcome {
    PdeField initial;
    PdeField final_field;
    PdeRun run;
    ConeCheck cone;
};

inline PdeOutcome run_pde(const Scenario& sc, const CliOptions& opt, double t_end) {
    const auto in = sc.inputs();
    const double h = opt.grid_h.value_or(sc.run.grid_h);
    const auto data = make_initial_data(sc.cosmology.n, sc.r0, sc.w0, sc.w1);
    const double r_end = comoving_radius(in.geom, std::min(t_end, in.geom.horizon() * (1.0 - 1e-9)));
    PdeOutcome out;
    out.initial = make_radial_field(data, h, sc.run.r_max_factor * r_end);
    out.final_field = out.initial;
    PdeControls pc;
    pc.step = step_controls(sc);
    pc.step.rtol = std::max(pc.step.rtol, 1e-9);
    pc.output_interval = sc.run.output_interval;
    out.run = evolve(out.final_field, PdeModel{sc.cosmology, sc.lambda, sc.p}, t_end, pc);
    out.cone = cone_containment_check(out.run, in.geom, h);
    return out;
}

inline nlohmann::json cone_json(const PdeOutcome& o) {
    nlohmann::json j;
    j["contained"] = o.cone.all;
    j["proven_regime"] = o.cone.proven_regime;
    j["times"] = nlohmann::json::array();
    for (std::size_t i = 0; i < o.cone.times.size(); ++i) {
        const auto& ob = o.run.observations[i];
        j["times"].push_back({{"t", json_number(ob.t)},
                              {"support_radius", json_number(ob.support_radius)},
                              {"cone_radius", json_number(ob.cone_radius)},
                              {"contained", static_cast<bool>(o.cone.contained[i])}});
    }
    return j;
}

}  // namespace detail

inline int cmd_pde(const Scenario& sc, const CliOptions& opt, std::ostream& log) {
    const auto in = sc.inputs();
    if (in.params().excluded_region()) {
        log << "pde: " << kExcludedReason << '\n';
        return kExitHypothesis;
    }
    const auto cert = certify(in);
    const double t_end = detail::resolve_t_end(sc, opt, &cert);
    const auto out = detail::run_pde(sc, opt, t_end);
    const auto dir = detail::output_dir(sc, opt);
    {
        auto os = detail::open_out(dir / "observables.csv");
        write_observables_csv(os, out.run);
    }
    {
        auto os = detail::open_out(dir / "snapshot_initial.csv");
        write_field_csv(os, out.initial);
    }
    {
        auto os = detail::open_out(dir / "snapshot_final.csv");
        write_field_csv(os, out.final_field);
    }
    nlohmann::json rep;
    rep["termination"] = to_string(out.run.termination);
    rep["blowup_detected"] = out.run.blowup_detected;
    rep["blowup_time"] = out.run.blowup_time ? json_number(*out.run.blowup_time) : nlohmann::json(nullptr);
    rep["t_last"] = json_number(out.run.observations.back().t);
    rep["T_star"] = json_number(cert.T_star);
    rep["certificate_valid"] = cert.valid();
    rep["cone"] = detail::cone_json(out);
    auto os = detail::open_out(dir / "pde_report.json");
    os << rep.dump(2) << '\n';
    log << "termination " << to_string(out.run.termination) << ", t_last " << format_double(out.run.observations.back().t)
        << ", cone contained " << (out.cone.all ? "true" : "false") << '\n';
    return kExitOk;
}

inline int cmd_cone_check(const Scenario& sc, const CliOptions& opt, std::ostream& log) {
    const auto in = sc.inputs();
    if (in.params().excluded_region()) {
        log << "cone-check: " << kExcludedReason << '\n';
        return kExitHypothesis;
    }
    const auto cert = certify(in);
    const double t_end = detail::resolve_t_end(sc, opt, &cert);
    const auto out = detail::run_pde(sc, opt, t_end);
    const auto doc = detail::cone_json(out);
    const auto dir = detail::output_dir(sc, opt);
    auto os = detail::open_out(dir / "cone_report.json");
    os << doc.dump(2) << '\n';
    log << "cone contained: " << (out.cone.all ? "true" : "false") << '\n';
    return out.cone.all ? kExitOk : kExitHypothesis;
}

// ---------------------------------------------------------------------------------
// Sweep

struct SweepRow {
    std::vector<double> values;
    std::string case_tag = "none";
    std::string status;
    bool valid = false;
    double T_star = kInf;
    std::optional<double> blowup_time;
    std::string error;
};

struct SweepResult {
    std::vector<std::string> paths;
    std::vector<SweepRow> rows;
};

/// Evaluates every grid point of the sweep block; rows are ordered with the last axis fastest.
inline SweepResult run_sweep(const Scenario& base, unsigned workers) {
    if (!base.sweep || base.sweep->axes.empty()) throw ScenarioError("sweep requires a non-empty sweep.axes block");
    const auto& block = *base.sweep;
    SweepResult res;
    std::size_t total = 1;
    for (const auto& a : block.axes) {
        res.paths.push_back(a.path);
        if (total > block.cap / a.values.size()) throw ScenarioError("sweep exceeds the combination cap");
        total *= a.values.size();
    }
    if (total > block.cap) throw ScenarioError("sweep exceeds the combination cap");
    nlohmann::json doc = base.source;
    doc.erase("sweep");
    // fail early on malformed paths
    for (const auto& a : block.axes) (void)with_value(doc, a.path, a.values.front());

    res.rows.resize(total);
    auto evaluate = [&](std::size_t index) {
        SweepRow& row = res.rows[index];
        nlohmann::json point = doc;
        std::size_t rest = index;
        row.values.resize(block.axes.size());
        for (std::size_t k = block.axes.size(); k-- > 0;) {
            const auto& axis = block.axes[k];
            row.values[k] = axis.values[rest % axis.values.size()];
            rest /= axis.values.size();
        }
        try {
            for (std::size_t k = 0; k < block.axes.size(); ++k) point = with_value(point, block.axes[k].path, row.values[k]);
            const auto sc = scenario_from_json(point);
            const auto in = sc.inputs();
            const auto cert = certify(in);
            row.status = to_string(cert.status);
            row.valid = cert.valid();
            row.T_star = cert.T_star;
            if (cert.corollary_case) row.case_tag = to_string(*cert.corollary_case);
            if (block.ode && !in.params().excluded_region()) {
                const double t_end = detail::resolve_t_end(sc, {}, &cert);
                const auto ode = make_comparison_ode(in);
                const auto traj = integrate(ode, t_end, detail::step_controls(sc));
                if (traj.blowup_detected) row.blowup_time = detect_blowup_time(traj, ode);
            }
        } catch (const std::exception& e) {
            row.status = "error";
            row.error = e.what();
        }
    };
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::min<std::size_t>(total, 1024))));
    if (workers == 1) {
        for (std::size_t i = 0; i < total; ++i) evaluate(i);
        return res;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < total; i = next++) evaluate(i);
        });
    }
    for (auto& t : pool) t.join();
    return res;
}

inline std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + '"';
}

inline void write_sweep_csv(std::ostream& os, const SweepResult& res) {
    for (const auto& p : res.paths) os << csv_escape(p) << ',';
    os << "case,status,valid,T_star,blowup_time,error\n";
    for (const auto& row : res.rows) {
        for (double v : row.values) os << format_double(v) << ',';
        os << row.case_tag << ',' << row.status << ',' << (row.valid ? "true" : "false") << ','
           << format_double(row.T_star) << ',' << (row.blowup_time ? format_double(*row.blowup_time) : "") << ','
           << csv_escape(row.error) << '\n';
    }
}

inline nlohmann::json sweep_summary(const SweepResult& res) {
    std::map<std::string, std::size_t> cases, statuses;
    for (const auto& row : res.rows) {
        ++cases[row.case_tag];
        ++statuses[row.status];
    }
    nlohmann::json j;
    j["points"] = res.rows.size();
    j["cases"] = cases;
    j["status"] = statuses;
    return j;
}

inline int cmd_sweep(const Scenario& sc, const CliOptions& opt, std::ostream& log) {
    const auto res = run_sweep(sc, opt.workers);
    const auto dir = detail::output_dir(sc, opt);
    {
        auto os = detail::open_out(dir / "sweep.csv");
        write_sweep_csv(os, res);
    }
    const auto summary = sweep_summary(res);
    auto os = detail::open_out(dir / "summary.json");
    os << summary.dump(2) << '\n';
    log << summary.dump(2) << '\n';
    return kExitOk;
}

/// Dispatches a subcommand; every failure mode maps onto the exit-code contract.
inline int run_command(const std::string& command, const CliOptions& opt, std::ostream& log, std::ostream& err) {
    try {
        const auto sc = load_scenario(opt.scenario_path);
        if (command == "analyze") return cmd_analyze(sc, opt, log);
        if (command == "ode") return cmd_ode(sc, opt, log);
        if (command == "pde") return cmd_pde(sc, opt, log);
        if (command == "cone-check") return cmd_cone_check(sc, opt, log);
        if (command == "sweep") return cmd_sweep(sc, opt, log);
        err << "unknown command '" << command << "'\n";
        return kExitError;
    } catch (const ScenarioError& e) {
        err << "scenario error: " << e.what() << '\n';
        return kExitError;
    } catch (const std::domain_error& e) {
        err << "domain error: " << e.what() << '\n';
        return kExitHypothesis;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitError;
    }
}

}  // namespace flrw
