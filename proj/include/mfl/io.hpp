#pragma once

// Field files: one "# json {...}" metadata line, a column header, then one node per row.
//
//   radial:  r,value
//   grid:    x,y,value   (all n*n nodes in index order, outside nodes included)

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "mfl/error.hpp"
#include "mfl/mesh.hpp"
#include "mfl/problem.hpp"
#include "mfl/rearrange.hpp"

namespace mfl {

using json = nlohmann::json;

inline constexpr int field_format_version = 1;

namespace detail {

inline constexpr const char* meta_prefix = "# json ";

inline void write_number(std::ostream& os, double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    os.write(buf, res.ptr - buf);
}

inline std::vector<double> split_numbers(const std::string& line, std::size_t expected, const std::string& where) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= line.size()) {
        std::size_t end = line.find(',', pos);
        if (end == std::string::npos) end = line.size();
        std::string cell = line.substr(pos, end - pos);
        while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\r' || cell.back() == '\t')) cell.pop_back();
        std::size_t lead = 0;
        while (lead < cell.size() && (cell[lead] == ' ' || cell[lead] == '\t')) ++lead;
        cell.erase(0, lead);
        double v = 0.0;
        const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
        if (cell.empty() || res.ec != std::errc() || res.ptr != cell.data() + cell.size()) {
            throw ParseError(where + ": column " + std::to_string(out.size() + 1) + ": '" + cell + "' is not a number");
        }
        out.push_back(v);
        pos = end + 1;
    }
    if (out.size() != expected) {
        throw ParseError(where + ": expected " + std::to_string(expected) + " columns, found " + std::to_string(out.size()));
    }
    return out;
}

inline json read_meta_line(std::istream& in, const std::string& source, std::size_t& line_no) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError(source + ": empty file");
    ++line_no;
    if (line.rfind(meta_prefix, 0) != 0) {
        throw ParseError(source + ":1: first line must start with '" + std::string(meta_prefix) + "'");
    }
    try {
        return json::parse(line.substr(std::string(meta_prefix).size()));
    } catch (const json::parse_error& e) {
        throw ParseError(source + ":1: metadata: " + e.what());
    }
}

template <class T>
T meta_get(const json& meta, const char* key, const std::string& source) {
    if (!meta.contains(key)) throw ParseError(source + ":1: metadata field '" + key + "' is missing");
    try {
        return meta.at(key).get<T>();
    } catch (const json::exception&) {
        throw ParseError(source + ":1: metadata field '" + key + "' has the wrong type");
    }
}

}  // namespace detail

/// A field read from disk with its metadata (including any caller-supplied "extra" object).
struct FieldFile {
    std::variant<RadialField, ScalarField2D> field;
    json meta;

    [[nodiscard]] bool is_radial() const noexcept { return std::holds_alternative<RadialField>(field); }
    [[nodiscard]] const RadialField& radial() const { return std::get<RadialField>(field); }
    [[nodiscard]] const ScalarField2D& grid() const { return std::get<ScalarField2D>(field); }
    [[nodiscard]] json extra() const { return meta.value("extra", json::object()); }
};

inline void write_field_csv(std::ostream& os, const RadialField& u, const json& extra = json::object()) {
    json meta = {{"format", "mfl-field"},
                 {"version", field_format_version},
                 {"kind", "radial"},
                 {"nodes", u.size()},
                 {"inner_radius", u.mesh().inner_radius()},
                 {"outer_radius", u.mesh().outer_radius()},
                 {"extra", extra}};
    os << detail::meta_prefix << meta.dump() << "\nr,value\n";
    for (std::size_t i = 0; i < u.size(); ++i) {
        detail::write_number(os, u.mesh()[i]);
        os << ',';
        detail::write_number(os, u[i]);
        os << '\n';
    }
}

inline void write_field_csv(std::ostream& os, const ScalarField2D& u, const json& extra = json::object()) {
    const Grid2D& g = u.grid();
    json meta = {{"format", "mfl-field"},
                 {"version", field_format_version},
                 {"kind", "grid"},
                 {"shape", to_string(g.shape())},
                 {"inner_radius", g.inner_radius()},
                 {"outer_radius", g.outer_radius()},
                 {"n", g.n()},
                 {"extra", extra}};
    os << detail::meta_prefix << meta.dump() << "\nx,y,value\n";
    for (std::size_t k = 0; k < u.size(); ++k) {
        detail::write_number(os, g.x(g.col(k)));
        os << ',';
        detail::write_number(os, g.y(g.row(k)));
        os << ',';
        detail::write_number(os, u[k]);
        os << '\n';
    }
}

inline FieldFile read_field_csv(std::istream& in, const std::string& source = "<field>") {
    std::size_t line_no = 0;
    json meta = detail::read_meta_line(in, source, line_no);
    if (meta.value("format", "") != "mfl-field") throw ParseError(source + ":1: not an mfl-field file");
    const auto kind = detail::meta_get<std::string>(meta, "kind", source);
    std::string line;
    if (!std::getline(in, line)) throw ParseError(source + ":2: missing column header");
    ++line_no;
    auto where = [&] { return source + ":" + std::to_string(line_no); };

    if (kind == "radial") {
        std::vector<double> r, v;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty() || line == "\r") continue;
            const auto row = detail::split_numbers(line, 2, where());
            r.push_back(row[0]);
            v.push_back(row[1]);
        }
        const auto expected = detail::meta_get<std::size_t>(meta, "nodes", source);
        if (r.size() != expected) {
            throw ParseError(source + ": metadata announces " + std::to_string(expected) + " nodes, found " +
                             std::to_string(r.size()));
        }
        try {
            return {RadialField(RadialMesh(std::move(r)), std::move(v)), std::move(meta)};
        } catch (const InvalidArgument& e) {
            throw ParseError(source + ": " + e.what());
        }
    }
    if (kind == "grid") {
        const auto shape = detail::meta_get<std::string>(meta, "shape", source);
        const auto n = detail::meta_get<int>(meta, "n", source);
        const auto outer = detail::meta_get<double>(meta, "outer_radius", source);
        const auto inner = detail::meta_get<double>(meta, "inner_radius", source);
        GridPtr g;
        try {
            if (shape == "disc") {
                g = Grid2D::disc(outer, n);
            } else if (shape == "annulus") {
                g = Grid2D::annulus(inner, outer, n);
            } else {
                throw ParseError(source + ":1: metadata field 'shape' must be disc or annulus");
            }
        } catch (const InvalidArgument& e) {
            throw ParseError(source + ":1: " + e.what());
        }
        std::vector<double> v;
        v.reserve(g->size());
        const double slack = 1e-9 * outer;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty() || line == "\r") continue;
            const auto row = detail::split_numbers(line, 3, where());
            const std::size_t k = v.size();
            if (k >= g->size()) throw ParseError(where() + ": more rows than the " + std::to_string(g->size()) + " grid nodes");
            if (std::abs(row[0] - g->x(g->col(k))) > slack || std::abs(row[1] - g->y(g->row(k))) > slack) {
                throw ParseError(where() + ": coordinates do not match grid node " + std::to_string(k));
            }
            v.push_back(row[2]);
        }
        if (v.size() != g->size()) {
            throw ParseError(source + ": expected " + std::to_string(g->size()) + " grid rows, found " + std::to_string(v.size()));
        }
        try {
            return {ScalarField2D(g, std::move(v)), std::move(meta)};
        } catch (const InvalidArgument& e) {
            throw ParseError(source + ": " + e.what());
        }
    }
    throw ParseError(source + ":1: unknown field kind '" + kind + "'");
}

inline FieldFile load_field(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path + ": cannot open");
    return read_field_csv(in, path);
}

template <class Field>
void save_field(const std::string& path, const Field& u, const json& extra = json::object()) {
    std::ofstream out(path);
    if (!out) throw Error(path + ": cannot write");
    write_field_csv(out, u, extra);
}

/// Threshold table as r,t,a rows under a metadata line with lambda, R and the defect.
inline void write_rearrangement_csv(std::ostream& os, const RearrangementResult& res) {
    json meta = {{"format", "mfl-rearrangement"},
                 {"version", field_format_version},
                 {"lambda", res.lambda.lambda()},
                 {"R", res.R},
                 {"defect", res.defect},
                 {"source_mass", res.source_mass},
                 {"boundary_spread", res.boundary_spread},
                 {"degenerate", res.degenerate},
                 {"rows", res.table.size()}};
    os << detail::meta_prefix << meta.dump() << "\nr,t,a\n";
    for (const auto& e : res.table) {
        detail::write_number(os, e.r);
        os << ',';
        detail::write_number(os, e.t);
        os << ',';
        detail::write_number(os, e.a);
        os << '\n';
    }
}

struct RearrangementTable {
    std::vector<ThresholdEntry> table;
    json meta;
};

inline RearrangementTable read_rearrangement_csv(std::istream& in, const std::string& source = "<table>") {
    std::size_t line_no = 0;
    RearrangementTable out;
    out.meta = detail::read_meta_line(in, source, line_no);
    if (out.meta.value("format", "") != "mfl-rearrangement") throw ParseError(source + ":1: not an mfl-rearrangement file");
    std::string line;
    if (!std::getline(in, line)) throw ParseError(source + ":2: missing column header");
    ++line_no;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto row = detail::split_numbers(line, 3, source + ":" + std::to_string(line_no));
        out.table.push_back({row[1], row[2], row[0]});
    }
    return out;
}

}  // namespace mfl
