#pragma once

// Run configuration as JSON (comments allowed):
//
// {
//   "domain":   {"shape": "disc" | "annulus", "inner_radius": 0.3, "outer_radius": 1},
//   "equation": {"mode": "mean_field" | "liouville", "rho": "4pi", "K": 1, "f": 0, "g": 0},
//   "mesh":     {"radial_nodes": 4096, "grid_nodes": 129},
//   "tolerances": {"radial": 1e-10, "grid": 1e-8, "max_iterations": 60, "max_halvings": 30},
//   "thresholds": 200, "R_max": 1000, "seed": 42, "starts": 10
// }
//
// K and f are a number or {"type": "constant", "value": c} or
// {"type": "gaussian", "base": b, "amplitude": a, "width": w}.  Masses may be written
// as numbers or as multiples of pi ("4pi", "0.5pi", "7*pi", "pi").

#include <cstdint>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

#include "mfl/error.hpp"
#include "mfl/problem.hpp"

namespace mfl {

struct RunConfig {
    ProblemSpec spec;
    std::size_t thresholds = 200;
    double r_max = 1000.0;
    std::uint64_t seed = 42;
    std::size_t starts = 10;
};

/// "4pi", "4*pi", "0.5 pi", "pi", "-2pi" or a plain number.
inline double parse_mass(const std::string& text) {
    static const std::regex with_pi(R"(^\s*([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?\s*\*?\s*pi\s*$)");
    std::smatch m;
    if (std::regex_match(text, m, with_pi)) {
        const double k = m[1].matched ? std::stod(m[1].str()) : 1.0;
        return k * pi;
    }
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        throw ParseError("'" + text + "' is not a number or a multiple of pi");
    }
    while (used < text.size() && std::isspace(static_cast<unsigned char>(text[used]))) ++used;
    if (used != text.size()) throw ParseError("'" + text + "' is not a number or a multiple of pi");
    return v;
}

namespace detail {

class ConfigReader {
public:
    explicit ConfigReader(std::string source) : source_(std::move(source)) {}

    [[noreturn]] void fail(const std::string& path, const std::string& what) const {
        throw ParseError(source_ + ": " + path + ": " + what);
    }

    void only_keys(const nlohmann::json& obj, const std::string& path, std::set<std::string> allowed) const {
        if (!obj.is_object()) fail(path.empty() ? "<root>" : path, "expected an object");
        for (const auto& [k, v] : obj.items()) {
            if (!allowed.count(k)) fail(join(path, k), "unknown field");
        }
    }

    double number(const nlohmann::json& v, const std::string& path) const {
        if (!v.is_number()) fail(path, "expected a number");
        return v.get<double>();
    }

    double mass(const nlohmann::json& v, const std::string& path) const {
        if (v.is_number()) return v.get<double>();
        if (!v.is_string()) fail(path, "expected a number or a multiple of pi like \"4pi\"");
        try {
            return parse_mass(v.get<std::string>());
        } catch (const ParseError& e) {
            fail(path, e.what());
        }
    }

    std::uint64_t count(const nlohmann::json& v, const std::string& path) const {
        if (!v.is_number_integer() || v.get<long long>() < 0) fail(path, "expected a non-negative integer");
        return v.get<std::uint64_t>();
    }

    std::string text(const nlohmann::json& v, const std::string& path) const {
        if (!v.is_string()) fail(path, "expected a string");
        return v.get<std::string>();
    }

    Coefficient coefficient(const nlohmann::json& v, const std::string& path) const {
        if (v.is_number()) return Coefficient::constant(v.get<double>());
        only_keys(v, path, {"type", "value", "base", "amplitude", "width"});
        if (!v.contains("type")) fail(join(path, "type"), "missing");
        const auto type = text(v.at("type"), join(path, "type"));
        auto need = [&](const char* key) {
            if (!v.contains(key)) fail(join(path, key), "missing");
            return number(v.at(key), join(path, key));
        };
        if (type == "constant") return Coefficient::constant(need("value"));
        if (type == "gaussian") {
            const double w = need("width");
            if (!(w > 0.0)) fail(join(path, "width"), "must be positive");
            return Coefficient::gaussian(need("base"), need("amplitude"), w);
        }
        fail(join(path, "type"), "expected constant or gaussian, got '" + type + "'");
    }

    static std::string join(const std::string& a, const std::string& b) { return a.empty() ? b : a + "." + b; }

private:
    std::string source_;
};

inline std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

}  // namespace detail

/// Parses and validates a configuration.  Syntax errors name the line and column,
/// semantic errors the dotted field path.
inline RunConfig parse_config(const std::string& text, const std::string& source = "<config>") {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text, nullptr, true, true);
    } catch (const nlohmann::json::parse_error& e) {
        const auto [line, col] = detail::line_column(text, e.byte > 0 ? e.byte - 1 : 0);
        std::string what = e.what();
        if (const auto p = what.find("syntax error"); p != std::string::npos) what = what.substr(p);
        throw ParseError(source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + what);
    }
    const detail::ConfigReader rd(source);
    rd.only_keys(doc, "", {"domain", "equation", "mesh", "tolerances", "thresholds", "R_max", "seed", "starts"});
    RunConfig cfg;
    ProblemSpec& s = cfg.spec;

    if (doc.contains("domain")) {
        const auto& d = doc.at("domain");
        rd.only_keys(d, "domain", {"shape", "inner_radius", "outer_radius"});
        if (d.contains("shape")) {
            const auto shape = rd.text(d.at("shape"), "domain.shape");
            if (shape == "disc") {
                s.shape = DomainShape::disc;
            } else if (shape == "annulus") {
                s.shape = DomainShape::annulus;
            } else {
                rd.fail("domain.shape", "expected disc or annulus, got '" + shape + "'");
            }
        }
        if (d.contains("inner_radius")) s.inner_radius = rd.number(d.at("inner_radius"), "domain.inner_radius");
        if (d.contains("outer_radius")) s.outer_radius = rd.number(d.at("outer_radius"), "domain.outer_radius");
    }
    if (doc.contains("equation")) {
        const auto& e = doc.at("equation");
        rd.only_keys(e, "equation", {"mode", "rho", "K", "f", "g"});
        if (e.contains("mode")) {
            const auto mode = rd.text(e.at("mode"), "equation.mode");
            if (mode == "mean_field") {
                s.mode = EquationMode::mean_field;
            } else if (mode == "liouville") {
                s.mode = EquationMode::liouville;
            } else {
                rd.fail("equation.mode", "expected mean_field or liouville, got '" + mode + "'");
            }
        }
        if (e.contains("rho")) s.rho = rd.mass(e.at("rho"), "equation.rho");
        if (e.contains("K")) s.weight = rd.coefficient(e.at("K"), "equation.K");
        if (e.contains("f")) s.source = rd.coefficient(e.at("f"), "equation.f");
        if (e.contains("g")) s.boundary_value = rd.number(e.at("g"), "equation.g");
    }
    if (doc.contains("mesh")) {
        const auto& m = doc.at("mesh");
        rd.only_keys(m, "mesh", {"radial_nodes", "grid_nodes"});
        if (m.contains("radial_nodes")) s.radial_nodes = rd.count(m.at("radial_nodes"), "mesh.radial_nodes");
        if (m.contains("grid_nodes")) s.grid_nodes = static_cast<int>(rd.count(m.at("grid_nodes"), "mesh.grid_nodes"));
    }
    if (doc.contains("tolerances")) {
        const auto& t = doc.at("tolerances");
        rd.only_keys(t, "tolerances", {"radial", "grid", "max_iterations", "max_halvings"});
        if (t.contains("radial")) s.options.radial_tolerance = rd.number(t.at("radial"), "tolerances.radial");
        if (t.contains("grid")) s.options.grid_tolerance = rd.number(t.at("grid"), "tolerances.grid");
        if (t.contains("max_iterations")) {
            s.options.max_iterations = static_cast<int>(rd.count(t.at("max_iterations"), "tolerances.max_iterations"));
        }
        if (t.contains("max_halvings")) {
            s.options.max_halvings = static_cast<int>(rd.count(t.at("max_halvings"), "tolerances.max_halvings"));
        }
    }
    if (doc.contains("thresholds")) cfg.thresholds = rd.count(doc.at("thresholds"), "thresholds");
    if (doc.contains("R_max")) cfg.r_max = rd.number(doc.at("R_max"), "R_max");
    if (doc.contains("seed")) cfg.seed = rd.count(doc.at("seed"), "seed");
    if (doc.contains("starts")) cfg.starts = rd.count(doc.at("starts"), "starts");

    if (s.shape == DomainShape::disc && doc.contains("domain") && doc.at("domain").contains("inner_radius") &&
        s.inner_radius != 0.0) {
        rd.fail("domain.inner_radius", "a disc has inner radius 0");
    }
    if (!(s.options.radial_tolerance > 0.0)) rd.fail("tolerances.radial", "must be positive");
    if (!(s.options.grid_tolerance > 0.0)) rd.fail("tolerances.grid", "must be positive");
    if (s.radial_nodes < 16) rd.fail("mesh.radial_nodes", "needs at least 16 nodes");
    if (s.grid_nodes < 5) rd.fail("mesh.grid_nodes", "needs at least 5 nodes");
    if (!(cfg.r_max > 0.0)) rd.fail("R_max", "must be positive");
    try {
        s.validate();
    } catch (const InvalidArgument& e) {
        throw ParseError(source + ": " + e.what());
    }
    return cfg;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path + ": cannot open");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path);
}

}  // namespace mfl
