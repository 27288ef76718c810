#pragma once

// Strict JSON scenario files: cosmology, cone, theorem and run blocks plus an optional sweep block.

#include <cmath>
#include <algorithm>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "certificate.hpp"

namespace flrw {

/// Thrown for malformed or constraint-violating scenario files.
class ScenarioError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunBlock {
    std::optional<double> t_end;  // unset: command-specific default
    double rtol = 1e-10;
    double atol = 1e-12;
    double grid_h = 1e-3;
    double r_max_factor = 1.25;
    double output_interval = 1e-2;
    std::string output = "out";
    // replace b(t), M^2(t) of the comparison ODE by constants (benchmark problems)
    std::optional<double> ode_b_constant;
    std::optional<double> ode_m_squared_constant;
};

struct SweepAxis {
    std::string path;  // "block.key"
    std::vector<double> values;
};

struct SweepBlock {
    std::vector<SweepAxis> axes;
    std::size_t cap = 1'000'000;
    bool ode = false;  // also integrate the comparison ODE per point
};

struct Scenario {
    CosmologyParams cosmology;
    double r0 = 1.0;
    double N = 0.0;
    double epsilon = 0.5;
    double theta = 0.5;
    double lambda = 1.0;
    double p = 2.0;
    double w0 = 0.0;
    double w1 = 0.0;
    RunBlock run;
    std::optional<SweepBlock> sweep;
    nlohmann::json source;  // parsed document, used to derive sweep points

    TheoremInputs inputs() const { return make_inputs(cosmology, r0, N, epsilon, theta, lambda, p, w0, w1); }
};

namespace detail {

inline std::size_t line_of_offset(const std::string& text, std::size_t offset) {
    std::size_t line = 1;
    for (std::size_t i = 0; i < std::min(offset, text.size()); ++i)
        if (text[i] == '\n') ++line;
    return line;
}

class BlockReader {
public:
    BlockReader(const nlohmann::json& root, std::string name, bool required) : name_(std::move(name)) {
        auto it = root.find(name_);
        if (it == root.end()) {
            if (required) throw ScenarioError("missing required block '" + name_ + "'");
            return;
        }
        if (!it->is_object()) throw ScenarioError("block '" + name_ + "' must be a JSON object");
        obj_ = &*it;
    }

    bool present() const { return obj_ != nullptr; }

    double number(const std::string& key, std::optional<double> fallback = std::nullopt) {
        seen_.push_back(key);
        const auto* v = lookup(key);
        if (!v) {
            if (fallback) return *fallback;
            throw ScenarioError("missing required key '" + name_ + "." + key + "'");
        }
        if (!v->is_number()) throw ScenarioError("key '" + name_ + "." + key + "' must be a number");
        return v->get<double>();
    }

    std::optional<double> optional_number(const std::string& key) {
        seen_.push_back(key);
        const auto* v = lookup(key);
        if (!v || v->is_null()) return std::nullopt;
        if (!v->is_number()) throw ScenarioError("key '" + name_ + "." + key + "' must be a number");
        return v->get<double>();
    }

    int integer(const std::string& key) {
        const double x = number(key);
        if (x != std::floor(x)) throw ScenarioError("key '" + name_ + "." + key + "' must be an integer");
        return static_cast<int>(x);
    }

    std::string string(const std::string& key, const std::string& fallback) {
        seen_.push_back(key);
        const auto* v = lookup(key);
        if (!v) return fallback;
        if (!v->is_string()) throw ScenarioError("key '" + name_ + "." + key + "' must be a string");
        return v->get<std::string>();
    }

    bool boolean(const std::string& key, bool fallback) {
        seen_.push_back(key);
        const auto* v = lookup(key);
        if (!v) return fallback;
        if (!v->is_boolean()) throw ScenarioError("key '" + name_ + "." + key + "' must be a boolean");
        return v->get<bool>();
    }

    const nlohmann::json* raw(const std::string& key) {
        seen_.push_back(key);
        return lookup(key);
    }

    /// Rejects keys that were never requested.
    void finish() const {
        if (!obj_) return;
        for (const auto& [key, value] : obj_->items()) {
            if (std::find(seen_.begin(), seen_.end(), key) == seen_.end())
                throw ScenarioError("unknown key '" + name_ + "." + key + "'");
        }
    }

private:
    const nlohmann::json* lookup(const std::string& key) const {
        if (!obj_) return nullptr;
        auto it = obj_->find(key);
        return it == obj_->end() ? nullptr : &*it;
    }

    std::string name_;
    const nlohmann::json* obj_ = nullptr;
    std::vector<std::string> seen_;
};

}  // namespace detail

/// Builds and validates a scenario from a parsed document.
inline Scenario scenario_from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) throw ScenarioError("scenario must be a JSON object");
    for (const auto& [key, value] : doc.items()) {
        if (key != "cosmology" && key != "cone" && key != "theorem" && key != "run" && key != "sweep")
            throw ScenarioError("unknown top-level key '" + key + "'");
    }
    Scenario sc;
    sc.source = doc;

    detail::BlockReader cos(doc, "cosmology", true);
    sc.cosmology.n = cos.integer("n");
    sc.cosmology.c = cos.number("c");
    sc.cosmology.a0 = cos.number("a0");
    sc.cosmology.H = cos.number("H");
    sc.cosmology.sigma = cos.number("sigma");
    sc.cosmology.m_squared = cos.number("m_squared");
    cos.finish();

    detail::BlockReader cone(doc, "cone", true);
    sc.r0 = cone.number("r0");
    cone.finish();

    detail::BlockReader th(doc, "theorem", true);
    sc.N = th.number("N");
    sc.epsilon = th.number("epsilon");
    sc.theta = th.number("theta");
    sc.lambda = th.number("lambda");
    sc.p = th.number("p");
    sc.w0 = th.number("w0");
    sc.w1 = th.number("w1");
    th.finish();

    detail::BlockReader run(doc, "run", false);
    sc.run.t_end = run.optional_number("t_end");
    sc.run.rtol = run.number("rtol", sc.run.rtol);
    sc.run.atol = run.number("atol", sc.run.atol);
    sc.run.grid_h = run.number("grid_h", sc.run.grid_h);
    sc.run.r_max_factor = run.number("R_max_factor", sc.run.r_max_factor);
    sc.run.output_interval = run.number("output_interval", sc.run.output_interval);
    sc.run.output = run.string("output", sc.run.output);
    sc.run.ode_b_constant = run.optional_number("ode_b_constant");
    sc.run.ode_m_squared_constant = run.optional_number("ode_m_squared_constant");
    run.finish();

    detail::BlockReader sw(doc, "sweep", false);
    if (sw.present()) {
        SweepBlock block;
        block.cap = static_cast<std::size_t>(sw.number("cap", static_cast<double>(block.cap)));
        block.ode = sw.boolean("ode", false);
        const auto* axes = sw.raw("axes");
        if (!axes || !axes->is_array() || axes->empty()) throw ScenarioError("sweep.axes must be a non-empty array");
        for (const auto& axis : *axes) {
            if (!axis.is_object() || !axis.contains("path") || !axis.contains("values") || axis.size() != 2 ||
                !axis["path"].is_string() || !axis["values"].is_array() || axis["values"].empty())
                throw ScenarioError("each sweep axis needs exactly 'path' (string) and 'values' (non-empty array)");
            SweepAxis a;
            a.path = axis["path"].get<std::string>();
            for (const auto& v : axis["values"]) {
                if (!v.is_number()) throw ScenarioError("sweep values for '" + a.path + "' must be numbers");
                a.values.push_back(v.get<double>());
            }
            block.axes.push_back(std::move(a));
        }
        sw.finish();
        sc.sweep = std::move(block);
    }

    if (!(sc.run.t_end.value_or(1.0) > 0.0)) throw ScenarioError("run.t_end must be positive");
    if (!(sc.run.rtol > 0.0) || !(sc.run.atol > 0.0)) throw ScenarioError("run tolerances must be positive");
    if (!(sc.run.grid_h > 0.0)) throw ScenarioError("run.grid_h must be positive");
    if (!(sc.run.r_max_factor > 1.0)) throw ScenarioError("run.R_max_factor must exceed 1");
    if (!(sc.run.output_interval > 0.0)) throw ScenarioError("run.output_interval must be positive");
    try {
        (void)sc.inputs();
    } catch (const std::invalid_argument& e) {
        throw ScenarioError(e.what());
    }
    return sc;
}

/// Parses scenario text; syntax errors report the line number.
inline Scenario parse_scenario(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ScenarioError("JSON syntax error at line " + std::to_string(detail::line_of_offset(text, e.byte)) +
                            ": " + e.what());
    }
    return scenario_from_json(doc);
}

inline Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::ios_base::failure("cannot open scenario file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return parse_scenario(buf.str());
    } catch (const ScenarioError& e) {
        throw ScenarioError(path + ": " + e.what());
    }
}

/// Copy of `doc` with the numeric leaf at "block.key" replaced.
inline nlohmann::json with_value(nlohmann::json doc, const std::string& path, double value) {
    const auto dot = path.find('.');
    if (dot == std::string::npos) throw ScenarioError("sweep path '" + path + "' must have the form block.key");
    const std::string block = path.substr(0, dot), key = path.substr(dot + 1);
    if (block == "sweep") throw ScenarioError("sweep path '" + path + "' cannot target the sweep block");
    if (!doc.contains(block)) doc[block] = nlohmann::json::object();
    if (block == "cosmology" && key == "n")
        doc[block][key] = static_cast<long long>(value);
    else
        doc[block][key] = value;
    return doc;
}

}  // namespace flrw
