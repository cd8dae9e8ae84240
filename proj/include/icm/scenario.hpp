#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "icm/errors.hpp"
#include "icm/params.hpp"
#include "icm/units.hpp"

// Scenario files: line-oriented `key = value` with `[section]` headers and
// '#' comments. Unit suffixes are mandatory on every dimensioned value
// (ohm/kohm/nH/pF/fF/um/mm/ns/ps/...), so a value is never silently
// misread by a factor of 1000.
//
//   [scenario]                     [termination]
//   name = cm_global_10mm          r_source = 2.5 kohm
//   analyses = closed_form merit   load = short
//   vdd = 1 V
//   inductance_aware = false       [sim]          # optional
//                                  n_segments = 200
//   [line]                         t_end = 20 ns
//   file = lines_45nm.csv          dt = 2 ps
//   material = CNT
//   node = 45nm                    [energy]       # optional
//   length = 10 mm                 c_int = 90 fF
//                                  swing_ratio = 0.57735
//
// The line is either a reference into a line-parameter CSV (file/material/
// node) or inline totals (r_total/l_total/c_total). Sweep files add:
//
//   [sweep]
//   variable = length              # length | r_load | c_load | r_source
//   values = 10 um, 50 um, 100 um

namespace icm {

enum class Analysis { closed_form, exact_freq, simulate, merit, energy };

inline std::string_view analysis_name(Analysis a) {
    switch (a) {
        case Analysis::closed_form: return "closed_form";
        case Analysis::exact_freq: return "exact_freq";
        case Analysis::simulate: return "simulate";
        case Analysis::merit: return "merit";
        case Analysis::energy: return "energy";
    }
    return "?";
}

struct EnergyParams {
    std::optional<double> c_int;        // default: the line's C_T
    std::optional<double> swing_ratio;  // default: 1, or 1/sqrt(3) for a short load
    double bits_per_tau = 1.0;
};

struct Scenario {
    std::string name;
    LinePerUnit line;
    double length = 0.0;  // m
    Termination term;
    double vdd = 1.0;
    std::set<Analysis> analyses;
    bool inductance_aware = false;
    int n_segments = 200;
    std::optional<double> t_end;
    std::optional<double> dt;
    EnergyParams energy;

    [[nodiscard]] LineTotals totals() const { return totals_from_per_unit(line, length); }
    [[nodiscard]] bool has(Analysis a) const { return analyses.count(a) > 0; }

    void validate() const {
        if (name.empty()) throw ValidationError("scenario needs a name");
        if (analyses.empty()) throw ValidationError("scenario selects no analysis");
        line.validate();
        term.validate();
        if (!(length > 0.0)) throw ValidationError("scenario length must be > 0");
        if (!(vdd > 0.0)) throw ValidationError("vdd must be > 0");
        if (n_segments < 1) throw ValidationError("n_segments must be >= 1");
    }
};

enum class SweepVariable { length, r_load, c_load, r_source };

inline std::string_view sweep_variable_name(SweepVariable v) {
    switch (v) {
        case SweepVariable::length: return "length";
        case SweepVariable::r_load: return "r_load";
        case SweepVariable::c_load: return "c_load";
        case SweepVariable::r_source: return "r_source";
    }
    return "?";
}

/// Return a copy of `base` with the swept variable set to `value`.
inline Scenario with_sweep_value(const Scenario& base, SweepVariable var, double value) {
    Scenario s = base;
    switch (var) {
        case SweepVariable::length:
            if (!(value > 0.0)) throw ValidationError("swept length must be > 0");
            s.length = value;
            break;
        case SweepVariable::r_load:
            if (auto* r = std::get_if<ResistiveLoad>(&s.term.load)) {
                if (!(value > 0.0)) throw ValidationError("swept r_load must be > 0");
                r->r_load = value;
            } else if (auto* rc = std::get_if<ResCapLoad>(&s.term.load)) {
                if (value < 0.0) throw ValidationError("swept r_load must be >= 0");
                rc->r_load = value;
            } else {
                throw ValidationError("r_load sweep needs a resistive or rescap load");
            }
            break;
        case SweepVariable::c_load:
            if (auto* rc = std::get_if<ResCapLoad>(&s.term.load)) {
                if (value < 0.0) throw ValidationError("swept c_load must be >= 0");
                rc->c_load = value;
            } else {
                throw ValidationError("c_load sweep needs a rescap load");
            }
            break;
        case SweepVariable::r_source:
            if (value < 0.0) throw ValidationError("swept r_source must be >= 0");
            s.term.r_source = value;
            break;
    }
    return s;
}

struct SweepSpec {
    Scenario base;
    SweepVariable variable = SweepVariable::length;
    std::vector<double> values;  // ascending, >= 2 entries

    void validate() const {
        base.validate();
        if (values.size() < 2) throw ValidationError("sweep needs at least 2 values");
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (i > 0 && !(values[i] > values[i - 1]))
                throw ValidationError("sweep values must be strictly ascending");
            (void)with_sweep_value(base, variable, values[i]);  // range check
        }
    }
};

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

namespace detail {

struct KeyValue {
    std::string value;
    std::size_t line_no = 0;
    bool consumed = false;
};

using SectionMap = std::map<std::string, std::map<std::string, KeyValue>>;

inline SectionMap read_sections(std::istream& in, const std::string& source) {
    SectionMap sections;
    std::string line;
    std::string current;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        std::string_view sv = units::trim(line);
        if (sv.empty()) continue;
        if (sv.front() == '[') {
            if (sv.back() != ']')
                throw ParseError(source, line_no, "unterminated section header");
            current = std::string(units::trim(sv.substr(1, sv.size() - 2)));
            if (current.empty()) throw ParseError(source, line_no, "empty section name");
            sections.try_emplace(current);
            continue;
        }
        const auto eq = sv.find('=');
        if (eq == std::string_view::npos)
            throw ParseError(source, line_no, "expected 'key = value'");
        if (current.empty())
            throw ParseError(source, line_no, "key/value outside any [section]");
        std::string key(units::trim(sv.substr(0, eq)));
        std::string value(units::trim(sv.substr(eq + 1)));
        if (key.empty()) throw ParseError(source, line_no, "empty key");
        auto [it, inserted] = sections[current].try_emplace(key, KeyValue{value, line_no});
        if (!inserted)
            throw ParseError(source, line_no, "duplicate key '" + key + "'");
    }
    return sections;
}

class SectionReader {
public:
    SectionReader(SectionMap& map, std::string source) : map_(map), source_(std::move(source)) {}

    [[nodiscard]] bool has_section(const std::string& s) const { return map_.count(s) > 0; }

    std::optional<std::string> take(const std::string& section, const std::string& key) {
        auto sit = map_.find(section);
        if (sit == map_.end()) return std::nullopt;
        auto kit = sit->second.find(key);
        if (kit == sit->second.end()) return std::nullopt;
        kit->second.consumed = true;
        return kit->second.value;
    }

    std::string require(const std::string& section, const std::string& key) {
        auto v = take(section, key);
        if (!v)
            throw ValidationError(source_ + ": missing required key '" + key +
                                  "' in section [" + section + "]");
        return *v;
    }

    std::optional<double> take_quantity(const std::string& section, const std::string& key,
                                        units::Dimension dim) {
        auto v = take(section, key);
        if (!v) return std::nullopt;
        try {
            return units::parse_quantity(*v, dim);
        } catch (const ValidationError& e) {
            throw ValidationError(source_ + ": key '" + key + "': " + e.what());
        }
    }

    double require_quantity(const std::string& section, const std::string& key,
                            units::Dimension dim) {
        auto v = take_quantity(section, key, dim);
        if (!v)
            throw ValidationError(source_ + ": missing required key '" + key +
                                  "' in section [" + section + "]");
        return *v;
    }

    /// Every key must have been consumed; unknown keys are hard errors.
    void finish(const std::set<std::string>& known_sections) const {
        for (const auto& [section, kvs] : map_) {
            if (!known_sections.count(section))
                throw ValidationError(source_ + ": unknown section [" + section + "]");
            for (const auto& [key, kv] : kvs) {
                if (!kv.consumed)
                    throw ParseError(source_, kv.line_no,
                                     "unknown key '" + key + "' in section [" + section + "]");
            }
        }
    }

private:
    SectionMap& map_;
    std::string source_;
};

inline std::vector<std::string> split_list(std::string_view text) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : text) {
        if (ch == ',' || ch == ' ' || ch == '\t') {
            if (!cur.empty()) out.push_back(std::exchange(cur, {}));
        } else {
            cur.push_back(ch);
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

inline bool parse_bool(const std::string& text, const std::string& source,
                       const std::string& key) {
    if (text == "true" || text == "yes" || text == "1") return true;
    if (text == "false" || text == "no" || text == "0") return false;
    throw ValidationError(source + ": key '" + key + "' expects true/false, got '" + text + "'");
}

inline Scenario parse_scenario_sections(SectionReader& reader, const std::string& source,
                                        const std::filesystem::path& base_dir) {
    Scenario s;
    s.name = reader.require("scenario", "name");

    for (const auto& token : split_list(reader.require("scenario", "analyses"))) {
        if (token == "closed_form") s.analyses.insert(Analysis::closed_form);
        else if (token == "exact_freq") s.analyses.insert(Analysis::exact_freq);
        else if (token == "simulate") s.analyses.insert(Analysis::simulate);
        else if (token == "merit") s.analyses.insert(Analysis::merit);
        else if (token == "energy") s.analyses.insert(Analysis::energy);
        else throw ValidationError(source + ": unknown analysis '" + token + "'");
    }
    if (auto v = reader.take("scenario", "inductance_aware"))
        s.inductance_aware = parse_bool(*v, source, "inductance_aware");
    if (auto v = reader.take_quantity("scenario", "vdd", units::Dimension::voltage))
        s.vdd = *v;

    // [line]: reference mode or inline-totals mode
    s.length = reader.require_quantity("line", "length", units::Dimension::length);
    if (auto file = reader.take("line", "file")) {
        const std::string material = reader.require("line", "material");
        const std::string node = reader.require("line", "node");
        const auto path = base_dir / *file;
        const auto rows = load_line_params(path.string());
        bool found = false;
        for (const auto& row : rows) {
            if (row.material == material && row.node_label == node) {
                s.line = row;
                found = true;
                break;
            }
        }
        if (!found)
            throw ValidationError(source + ": no line with material '" + material +
                                  "' and node '" + node + "' in " + path.string());
    } else {
        LineTotals tot;
        tot.r_total = reader.take_quantity("line", "r_total", units::Dimension::resistance)
                          .value_or(0.0);
        tot.l_total = reader.take_quantity("line", "l_total", units::Dimension::inductance)
                          .value_or(0.0);
        tot.c_total = reader.require_quantity("line", "c_total", units::Dimension::capacitance);
        s.line.r_per_m = tot.r_total / s.length;
        s.line.l_per_m = tot.l_total / s.length;
        s.line.c_per_m = tot.c_total / s.length;
        if (auto m = reader.take("line", "material")) s.line.material = *m;
        if (auto n = reader.take("line", "node")) s.line.node_label = *n;
    }

    // [termination]
    s.term.r_source = reader.take_quantity("termination", "r_source",
                                           units::Dimension::resistance)
                          .value_or(0.0);
    const std::string load = reader.require("termination", "load");
    if (load == "open") {
        s.term.load = OpenLoad{};
    } else if (load == "short") {
        s.term.load = ShortLoad{};
    } else if (load == "resistive") {
        s.term.load = ResistiveLoad{
            reader.require_quantity("termination", "r_load", units::Dimension::resistance)};
    } else if (load == "rescap") {
        ResCapLoad rc;
        rc.r_load = reader.require_quantity("termination", "r_load",
                                            units::Dimension::resistance);
        rc.c_load = reader.require_quantity("termination", "c_load",
                                            units::Dimension::capacitance);
        s.term.load = rc;
    } else {
        throw ValidationError(source + ": load must be open/short/resistive/rescap, got '" +
                              load + "'");
    }

    // [sim] (optional)
    if (auto v = reader.take("sim", "n_segments")) {
        const double raw = units::parse_number(*v);
        if (raw < 1.0 || raw > 1e6 || raw != std::floor(raw))
            throw ValidationError(source + ": n_segments must be an integer >= 1");
        s.n_segments = static_cast<int>(raw);
    }
    s.t_end = reader.take_quantity("sim", "t_end", units::Dimension::duration);
    s.dt = reader.take_quantity("sim", "dt", units::Dimension::duration);

    // [energy] (optional)
    s.energy.c_int = reader.take_quantity("energy", "c_int", units::Dimension::capacitance);
    if (auto v = reader.take("energy", "swing_ratio"))
        s.energy.swing_ratio = units::parse_number(*v);
    if (auto v = reader.take("energy", "bits_per_tau"))
        s.energy.bits_per_tau = units::parse_number(*v);

    s.validate();
    return s;
}

} // namespace detail

inline Scenario load_scenario(std::istream& in, const std::string& source = "<stream>",
                              const std::filesystem::path& base_dir = ".") {
    auto sections = detail::read_sections(in, source);
    detail::SectionReader reader(sections, source);
    Scenario s = detail::parse_scenario_sections(reader, source, base_dir);
    reader.finish({"scenario", "line", "termination", "sim", "energy"});
    return s;
}

inline Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open scenario file '" + path + "'");
    return load_scenario(in, path, std::filesystem::path(path).parent_path());
}

inline SweepSpec load_sweep(std::istream& in, const std::string& source = "<stream>",
                            const std::filesystem::path& base_dir = ".") {
    auto sections = detail::read_sections(in, source);
    detail::SectionReader reader(sections, source);

    SweepSpec spec;
    spec.base = detail::parse_scenario_sections(reader, source, base_dir);

    const std::string var = reader.require("sweep", "variable");
    units::Dimension dim;
    if (var == "length") {
        spec.variable = SweepVariable::length;
        dim = units::Dimension::length;
    } else if (var == "r_load") {
        spec.variable = SweepVariable::r_load;
        dim = units::Dimension::resistance;
    } else if (var == "c_load") {
        spec.variable = SweepVariable::c_load;
        dim = units::Dimension::capacitance;
    } else if (var == "r_source") {
        spec.variable = SweepVariable::r_source;
        dim = units::Dimension::resistance;
    } else {
        throw ValidationError(source + ": sweep variable must be one of "
                              "length/r_load/c_load/r_source, got '" + var + "'");
    }
    // values are comma-separated so "10 um" stays one token
    std::string values_text = reader.require("sweep", "values");
    std::size_t start = 0;
    while (start <= values_text.size()) {
        std::size_t pos = values_text.find(',', start);
        std::string_view token =
            units::trim(std::string_view(values_text).substr(
                start, pos == std::string::npos ? std::string::npos : pos - start));
        if (!token.empty()) spec.values.push_back(units::parse_quantity(token, dim));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }

    reader.finish({"scenario", "line", "termination", "sim", "energy", "sweep"});
    spec.validate();
    return spec;
}

inline SweepSpec load_sweep(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open sweep file '" + path + "'");
    return load_sweep(in, path, std::filesystem::path(path).parent_path());
}

} // namespace icm
