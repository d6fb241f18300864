#pragma once

// JSON serialization of every report type.  Top-level documents carry "schema_version".

#include <cmath>
#include <optional>
#include <string>

#include <json.hpp>

#include "mfl/bol.hpp"
#include "mfl/continuation.hpp"
#include "mfl/experiments.hpp"
#include "mfl/pipeline.hpp"
#include "mfl/problem.hpp"
#include "mfl/rearrange.hpp"

namespace mfl {

inline constexpr int report_schema_version = 1;

namespace detail {

// nlohmann writes NaN and infinities as null; keep them readable instead.
inline nlohmann::json num(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "nan";
    return v > 0.0 ? "inf" : "-inf";
}

template <class T>
nlohmann::json opt(const std::optional<T>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace detail

inline nlohmann::json document(const std::string& kind, nlohmann::json body) {
    nlohmann::json out = {{"schema_version", report_schema_version}, {"kind", kind}};
    out.update(body);
    return out;
}

inline nlohmann::json to_json(const DifferentialCheck& d) {
    return {{"worst", detail::num(d.worst)},
            {"tolerance", d.tolerance},
            {"tolerated", d.tolerated},
            {"violations", d.violations},
            {"strict", d.strict},
            {"holds", d.holds()}};
}

inline nlohmann::json to_json(const BolReport& r) {
    return {{"context", to_string(r.context)},
            {"lhs", detail::num(r.lhs)},
            {"rhs", detail::num(r.rhs)},
            {"defect", detail::num(r.defect)},
            {"tolerance", detail::num(r.tolerance)},
            {"mass", detail::num(r.mass)},
            {"verdict", to_string(r.verdict)},
            {"differential", to_json(r.differential)},
            {"note", r.note}};
}

inline nlohmann::json to_json(const SupersolutionCheck& s) {
    return {{"worst", detail::num(s.worst)},
            {"tolerance", s.tolerance},
            {"checked", s.checked},
            {"tolerated", s.tolerated},
            {"violations", s.violations}};
}

inline nlohmann::json to_json(const InteriorBolReport& r) {
    auto j = to_json(r.bol);
    j["supersolution"] = to_json(r.supersolution);
    j["total_mass"] = r.total_mass;
    return j;
}

inline nlohmann::json to_json(const MassBracketReport& r) {
    return {{"mass", r.mass},
            {"lower", r.lower},
            {"upper", r.upper},
            {"roots", {r.roots.m1, r.roots.m2}},
            {"tolerance", r.tolerance},
            {"outcome", to_string(r.outcome)},
            {"strict", r.strict},
            {"differential", to_json(r.differential)},
            {"note", r.note}};
}

inline nlohmann::json to_json(const PipelineReport& r) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& g : r.gradient_table) {
        rows.push_back({{"t", g.t}, {"source_flux", g.source_flux}, {"target_flux", g.target_flux}});
    }
    return {{"applicable", r.applicable},
            {"failed_hypothesis", r.failed_hypothesis},
            {"mass1", r.mass1},
            {"mass2", r.mass2},
            {"boundary_constant", r.boundary_constant},
            {"swapped", r.swapped},
            {"phi_min", r.phi_min},
            {"phi_max", r.phi_max},
            {"lambda", r.lambda},
            {"R", r.R},
            {"rearrangement_defect", r.rearrangement_defect},
            {"boundary_spread", r.boundary_spread},
            {"differential", to_json(r.differential)},
            {"forder_worst", detail::num(r.forder_worst)},
            {"forder_tolerance", r.forder_tolerance},
            {"forder_holds", r.forder_holds},
            {"boundary_defect", r.boundary_defect},
            {"tolerance", r.tolerance},
            {"contradiction", r.contradiction},
            {"holes", detail::opt(r.holes)},
            {"gradient_table", rows}};
}

inline nlohmann::json to_json(const CriticalPairReport& r) {
    return {{"applicable", r.applicable},
            {"failed_hypothesis", r.failed_hypothesis},
            {"total_mass", r.total_mass},
            {"differential", to_json(r.differential)},
            {"degenerate", r.degenerate},
            {"r0", detail::opt(r.r0)},
            {"lambda1", r.lambda1},
            {"lambda2", r.lambda2},
            {"interior", r.interior ? to_json(*r.interior) : nlohmann::json(nullptr)},
            {"exterior", r.exterior ? to_json(*r.exterior) : nlohmann::json(nullptr)},
            {"interior_gap", r.interior_gap},
            {"exterior_gap", r.exterior_gap},
            {"tolerance", r.tolerance},
            {"equality_forced", r.equality_forced},
            {"strict_gap", r.strict_gap},
            {"message", r.message}};
}

inline nlohmann::json to_json(const UniquenessReport& r) {
    return {{"rho", r.rho},
            {"starts", r.starts},
            {"converged", r.converged},
            {"statuses", r.statuses},
            {"cluster", r.cluster},
            {"cluster_u_max", r.cluster_u_max},
            {"max_pairwise_distance", r.max_pairwise_distance},
            {"distinct", r.distinct},
            {"cluster_tolerance", r.cluster_tolerance},
            {"diagnostics", r.diagnostics}};
}

inline nlohmann::json to_json(const CriticalSweep& s) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : s.rows) {
        rows.push_back({{"eps", r.eps},
                        {"rho", r.rho},
                        {"u_max", r.u_max},
                        {"concentration_radius", r.concentration_radius},
                        {"exact_u_max", r.exact_u_max},
                        {"exact_concentration", r.exact_concentration},
                        {"relative_error", r.relative_error},
                        {"status", r.status}});
    }
    return {{"rows", rows},
            {"exact_family", s.exact_family},
            {"truncated", s.truncated},
            {"monotone", s.monotone()},
            {"worst_relative_error", s.worst_relative_error()},
            {"message", s.message}};
}

inline nlohmann::json to_json(const SweepResult& s) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& p : s.points) {
        rows.push_back({{"rho", p.rho},
                        {"u_max", p.u_max},
                        {"center", p.center},
                        {"residual", detail::num(p.residual)},
                        {"iterations", p.iterations},
                        {"status", p.status}});
    }
    return {{"points", rows}, {"truncated", s.truncated}, {"monotone", s.monotone()}, {"message", s.message}};
}

inline nlohmann::json to_json(const ProblemSpec& s) {
    return {{"shape", to_string(s.shape)},
            {"inner_radius", s.inner_radius},
            {"outer_radius", s.outer_radius},
            {"mode", to_string(s.mode)},
            {"rho", s.rho},
            {"K", s.weight.description()},
            {"f", s.source.description()},
            {"g", s.boundary_value},
            {"radial_nodes", s.radial_nodes},
            {"grid_nodes", s.grid_nodes}};
}

template <class Field>
nlohmann::json to_json(const SolveReport<Field>& r) {
    nlohmann::json j = {{"status", to_string(r.status)},
                        {"residual_norm", detail::num(r.residual_norm)},
                        {"iterations", r.iterations},
                        {"mass", r.mass},
                        {"normalization", r.normalization},
                        {"branch", r.branch},
                        {"message", r.message}};
    if (r.solution) {
        j["u_max"] = r.solution->max();
        j["u_min"] = r.solution->min();
    }
    return j;
}

inline nlohmann::json to_json(const RearrangementResult& r) {
    return {{"lambda", r.lambda.lambda()},
            {"R", r.R},
            {"defect", r.defect},
            {"source_mass", r.source_mass},
            {"boundary_spread", r.boundary_spread},
            {"boundary_tolerance", r.boundary_tolerance},
            {"degenerate", r.degenerate},
            {"thresholds", r.table.size()}};
}

}  // namespace mfl
