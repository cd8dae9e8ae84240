#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <limits>
#include <string>
#include <string_view>
#include <system_error>

#include "icm/errors.hpp"

// Unit handling for the parse boundary. Everything inside the library is
// strict SI (ohm, H, F, m, s, V, J); suffixed quantities like "2.5 kohm" or
// "10 fF" are converted exactly once, here.

namespace icm::units {

enum class Dimension {
    resistance,
    inductance,
    capacitance,
    length,
    duration,
    voltage,
    dimensionless,
};

inline std::string_view dimension_name(Dimension d) {
    switch (d) {
        case Dimension::resistance: return "resistance";
        case Dimension::inductance: return "inductance";
        case Dimension::capacitance: return "capacitance";
        case Dimension::length: return "length";
        case Dimension::duration: return "time";
        case Dimension::voltage: return "voltage";
        case Dimension::dimensionless: return "dimensionless";
    }
    return "?";
}

struct UnitSuffix {
    std::string_view text;
    Dimension dim;
    double scale;
};

// Case-sensitive: "Mohm" is mega, "mohm" is not accepted (too error-prone).
inline constexpr std::array<UnitSuffix, 31> unit_table{{
    {"Mohm", Dimension::resistance, 1e6},
    {"kohm", Dimension::resistance, 1e3},
    {"ohm", Dimension::resistance, 1.0},
    {"mH", Dimension::inductance, 1e-3},
    {"uH", Dimension::inductance, 1e-6},
    {"nH", Dimension::inductance, 1e-9},
    {"pH", Dimension::inductance, 1e-12},
    {"H", Dimension::inductance, 1.0},
    {"mF", Dimension::capacitance, 1e-3},
    {"uF", Dimension::capacitance, 1e-6},
    {"nF", Dimension::capacitance, 1e-9},
    {"pF", Dimension::capacitance, 1e-12},
    {"fF", Dimension::capacitance, 1e-15},
    {"aF", Dimension::capacitance, 1e-18},
    {"F", Dimension::capacitance, 1.0},
    {"km", Dimension::length, 1e3},
    {"cm", Dimension::length, 1e-2},
    {"mm", Dimension::length, 1e-3},
    {"um", Dimension::length, 1e-6},
    {"nm", Dimension::length, 1e-9},
    {"m", Dimension::length, 1.0},
    {"ms", Dimension::duration, 1e-3},
    {"us", Dimension::duration, 1e-6},
    {"ns", Dimension::duration, 1e-9},
    {"ps", Dimension::duration, 1e-12},
    {"fs", Dimension::duration, 1e-15},
    {"s", Dimension::duration, 1.0},
    {"kV", Dimension::voltage, 1e3},
    {"mV", Dimension::voltage, 1e-3},
    {"uV", Dimension::voltage, 1e-6},
    {"V", Dimension::voltage, 1.0},
}};

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

/// Strict full-consume double parse ("1e-10", "0.5", "inf"). Throws on junk.
inline double parse_number(std::string_view text) {
    text = trim(text);
    if (text.empty()) throw ValidationError("empty numeric field");
    if (text == "inf") return std::numeric_limits<double>::infinity();
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size())
        throw ValidationError("malformed number '" + std::string(text) + "'");
    return value;
}

/// Parse "value suffix" into SI. The suffix is mandatory for dimensioned
/// quantities and must match the expected dimension; dimensionless values
/// must carry no suffix.
inline double parse_quantity(std::string_view text, Dimension expected) {
    text = trim(text);
    if (text.empty()) throw ValidationError("empty quantity");

    std::size_t split = text.size();
    while (split > 0) {
        char ch = text[split - 1];
        if ((ch >= '0' && ch <= '9') || ch == '.' || ch == '+') break;
        // 'e'/'E' may close an exponent ("2e3"); treat as numeric when preceded by digit
        if ((ch == 'e' || ch == 'E') && split >= 2) {
            char prev = text[split - 2];
            if (prev >= '0' && prev <= '9') break;
        }
        --split;
    }
    std::string_view number_part = trim(text.substr(0, split));
    std::string_view suffix = trim(text.substr(split));

    if (expected == Dimension::dimensionless) {
        if (!suffix.empty())
            throw ValidationError("dimensionless value must not carry a unit, got '" +
                                  std::string(text) + "'");
        return parse_number(number_part);
    }

    if (suffix.empty())
        throw ValidationError("missing unit suffix on " + std::string(dimension_name(expected)) +
                              " value '" + std::string(text) + "'");

    for (const auto& u : unit_table) {
        if (u.text == suffix) {
            if (u.dim != expected)
                throw ValidationError("unit '" + std::string(suffix) + "' is not a " +
                                      std::string(dimension_name(expected)) + " unit");
            return parse_number(number_part) * u.scale;
        }
    }
    throw ValidationError("unknown unit suffix '" + std::string(suffix) + "'");
}

/// Shortest round-trip decimal representation, the one formatting used for
/// every CSV we emit. Deterministic across runs and platforms using IEEE
/// doubles.
inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::array<char, 32> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    (void)ec;
    return std::string(buf.data(), ptr);
}

} // namespace icm::units
