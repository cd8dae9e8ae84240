#pragma once

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "icm/errors.hpp"
#include "icm/units.hpp"

// Physical quantities, unit conventions, termination models, and the CSV
// schemas that feed them. All values strict SI.

namespace icm {

enum class MaterialTag { aluminum, copper, cnt, other };

/// Classify a material label. Metadata only: nothing in the library branches
/// on the result; material differences enter solely through r, l, c.
inline MaterialTag material_tag(std::string_view name) {
    if (name == "Al") return MaterialTag::aluminum;
    if (name == "Cu") return MaterialTag::copper;
    if (name == "CNT") return MaterialTag::cnt;
    return MaterialTag::other;
}

/// Per-unit-length wire parameters (ohm/m, H/m, F/m).
struct LinePerUnit {
    double r_per_m = 0.0;
    double l_per_m = 0.0;
    double c_per_m = 0.0;
    std::string material = "other";
    std::string node_label;

    void validate() const {
        if (!std::isfinite(r_per_m) || r_per_m < 0.0)
            throw ValidationError("line parameter r_per_m must be finite and >= 0");
        if (!std::isfinite(l_per_m) || l_per_m < 0.0)
            throw ValidationError("line parameter l_per_m must be finite and >= 0");
        if (!std::isfinite(c_per_m) || c_per_m <= 0.0)
            throw ValidationError("line parameter c_per_m must be finite and > 0");
    }
};

/// Totals of a wire segment of length d. R_T = r*d, L_T = l*d, C_T = c*d.
struct LineTotals {
    double r_total = 0.0;  // ohm
    double l_total = 0.0;  // H
    double c_total = 0.0;  // F
    double length = 0.0;   // m
};

inline LineTotals totals_from_per_unit(const LinePerUnit& p, double length_m) {
    p.validate();
    if (!std::isfinite(length_m) || length_m <= 0.0)
        throw ValidationError("line length must be finite and > 0");
    return LineTotals{p.r_per_m * length_m, p.l_per_m * length_m,
                      p.c_per_m * length_m, length_m};
}

// ---------------------------------------------------------------------------
// Termination
// ---------------------------------------------------------------------------

struct ResistiveLoad {
    double r_load = 0.0;  // ohm, > 0
};
struct OpenLoad {};   // R_L -> inf, conventional voltage-mode sensing
struct ShortLoad {};  // R_L -> 0, ideal current-mode sensing
struct ResCapLoad {
    double r_load = 0.0;  // ohm, >= 0 (0 degenerates to a short)
    double c_load = 0.0;  // F, >= 0, in parallel with r_load
};

using Load = std::variant<ResistiveLoad, OpenLoad, ShortLoad, ResCapLoad>;

struct Termination {
    double r_source = 0.0;  // ohm, >= 0
    Load load = OpenLoad{};

    void validate() const {
        if (!std::isfinite(r_source) || r_source < 0.0)
            throw ValidationError("source resistance must be finite and >= 0");
        if (const auto* r = std::get_if<ResistiveLoad>(&load)) {
            if (!std::isfinite(r->r_load) || r->r_load <= 0.0)
                throw ValidationError("resistive load must be finite and > 0");
        } else if (const auto* rc = std::get_if<ResCapLoad>(&load)) {
            if (!std::isfinite(rc->r_load) || rc->r_load < 0.0)
                throw ValidationError("rescap load resistance must be finite and >= 0");
            if (!std::isfinite(rc->c_load) || rc->c_load < 0.0)
                throw ValidationError("rescap load capacitance must be finite and >= 0");
        }
    }
};

// ---------------------------------------------------------------------------
// Geometry reference data
// ---------------------------------------------------------------------------

enum class WireTier { local, intermediate, global };

inline std::string_view tier_name(WireTier t) {
    switch (t) {
        case WireTier::local: return "local";
        case WireTier::intermediate: return "intermediate";
        case WireTier::global: return "global";
    }
    return "?";
}

inline WireTier tier_from_name(std::string_view s) {
    if (s == "local") return WireTier::local;
    if (s == "intermediate") return WireTier::intermediate;
    if (s == "global") return WireTier::global;
    throw ValidationError("unknown wire tier '" + std::string(s) + "'");
}

/// Interconnect cross-section record. Reference data only: this library never
/// converts geometry to r, l, c (that is an extractor's job).
struct GeometrySpec {
    std::string node;
    WireTier tier = WireTier::local;
    double width_m = 0.0;
    double thickness_m = 0.0;
    double spacing_m = 0.0;
    double height_m = 0.0;
    double dielectric = 1.0;

    void validate() const {
        auto positive = [](double v, const char* name) {
            if (!std::isfinite(v) || v <= 0.0)
                throw ValidationError(std::string("geometry field ") + name +
                                      " must be finite and > 0");
        };
        positive(width_m, "width_m");
        positive(thickness_m, "thickness_m");
        positive(spacing_m, "spacing_m");
        positive(height_m, "height_m");
        if (!std::isfinite(dielectric) || dielectric < 1.0)
            throw ValidationError("dielectric constant must be >= 1");
    }
};

// ---------------------------------------------------------------------------
// CSV ingestion
// ---------------------------------------------------------------------------

namespace csv {

/// Split one CSV line on commas; fields may not contain commas or quotes.
inline std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            out.push_back(units::trim(line.substr(start)));
            break;
        }
        out.push_back(units::trim(line.substr(start, pos - start)));
        start = pos + 1;
    }
    return out;
}

/// True for lines that carry no data: blank or '#' comment.
inline bool is_skippable(std::string_view line) {
    auto t = units::trim(line);
    return t.empty() || t.front() == '#';
}

} // namespace csv

inline constexpr std::string_view line_params_header = "material,node,r_per_m,l_per_m,c_per_m";
inline constexpr std::string_view geometry_header =
    "node,tier,width_m,thickness_m,spacing_m,height_m,dielectric";

/// Load per-unit line parameters. Schema: `material,node,r_per_m,l_per_m,c_per_m`,
/// numbers in plain SI. Either every row validates or the whole load fails;
/// no partially valid list is returned.
inline std::vector<LinePerUnit> load_line_params(std::istream& in,
                                                 const std::string& source = "<stream>") {
    std::vector<LinePerUnit> rows;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view sv = units::trim(line);
        if (csv::is_skippable(sv)) continue;
        if (!header_seen) {
            if (sv != line_params_header)
                throw ParseError(source, line_no,
                                 "expected header '" + std::string(line_params_header) + "'");
            header_seen = true;
            continue;
        }
        auto fields = csv::split_fields(sv);
        if (fields.size() != 5)
            throw ParseError(source, line_no, "expected 5 fields, got " +
                                              std::to_string(fields.size()));
        LinePerUnit p;
        p.material = std::string(fields[0]);
        p.node_label = std::string(fields[1]);
        try {
            p.r_per_m = units::parse_number(fields[2]);
            p.l_per_m = units::parse_number(fields[3]);
            p.c_per_m = units::parse_number(fields[4]);
            p.validate();
        } catch (const ValidationError& e) {
            throw ParseError(source, line_no, e.what());
        }
        rows.push_back(std::move(p));
    }
    if (!header_seen) throw ParseError(source, line_no, "missing header line");
    return rows;
}

inline std::vector<LinePerUnit> load_line_params(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open line-parameter file '" + path + "'");
    return load_line_params(in, path);
}

inline void save_line_params(std::span<const LinePerUnit> rows, std::ostream& out) {
    out << line_params_header << '\n';
    for (const auto& p : rows) {
        out << p.material << ',' << p.node_label << ',' << units::format_double(p.r_per_m)
            << ',' << units::format_double(p.l_per_m) << ','
            << units::format_double(p.c_per_m) << '\n';
    }
}

/// Load geometry records. Schema: `node,tier,width_m,thickness_m,spacing_m,height_m,dielectric`.
inline std::vector<GeometrySpec> load_geometry(std::istream& in,
                                               const std::string& source = "<stream>") {
    std::vector<GeometrySpec> rows;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view sv = units::trim(line);
        if (csv::is_skippable(sv)) continue;
        if (!header_seen) {
            if (sv != geometry_header)
                throw ParseError(source, line_no,
                                 "expected header '" + std::string(geometry_header) + "'");
            header_seen = true;
            continue;
        }
        auto fields = csv::split_fields(sv);
        if (fields.size() != 7)
            throw ParseError(source, line_no, "expected 7 fields, got " +
                                              std::to_string(fields.size()));
        GeometrySpec g;
        g.node = std::string(fields[0]);
        try {
            g.tier = tier_from_name(fields[1]);
            g.width_m = units::parse_number(fields[2]);
            g.thickness_m = units::parse_number(fields[3]);
            g.spacing_m = units::parse_number(fields[4]);
            g.height_m = units::parse_number(fields[5]);
            g.dielectric = units::parse_number(fields[6]);
            g.validate();
        } catch (const ValidationError& e) {
            throw ParseError(source, line_no, e.what());
        }
        rows.push_back(std::move(g));
    }
    if (!header_seen) throw ParseError(source, line_no, "missing header line");
    return rows;
}

inline std::vector<GeometrySpec> load_geometry(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open geometry file '" + path + "'");
    return load_geometry(in, path);
}

inline void save_geometry(std::span<const GeometrySpec> rows, std::ostream& out) {
    out << geometry_header << '\n';
    for (const auto& g : rows) {
        out << g.node << ',' << tier_name(g.tier) << ',' << units::format_double(g.width_m)
            << ',' << units::format_double(g.thickness_m) << ','
            << units::format_double(g.spacing_m) << ',' << units::format_double(g.height_m)
            << ',' << units::format_double(g.dielectric) << '\n';
    }
}

} // namespace icm
