#pragma once

// Plain-text run configuration.
//
//   # comment
//   key = value        # trailing comments are fine too
//
// Values are decimal numbers with a dot separator. Unknown or repeated keys
// are errors; missing keys keep their defaults. Flags (trigger_x1,
// trigger_x2, reverse_switching) take 0 or 1.
//
// The physical block (k0 ... tc0) is optional. When given it must be
// complete, and it replaces the dimensionless plant keys.

#include "etsmc/error.hpp"
#include "etsmc/plant.hpp"
#include "etsmc/sim.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

namespace etsmc {

namespace detail {

enum class KeyKind { real, flag, count, optional_real };

struct ConfigKey {
    std::string_view name;
    KeyKind kind;
    std::function<void(SimConfig&, double)> set;
    std::function<std::optional<double>(const SimConfig&)> get;
};

// Accessors are lambdas returning references so nested members work.
#define ETSMC_REAL(name, expr)                                                                        \
    ConfigKey {                                                                                       \
        name, KeyKind::real, [](SimConfig& c, double v) { expr = v; },                                \
            [](const SimConfig& c) -> std::optional<double> { return expr; }                          \
    }
#define ETSMC_FLAG(name, expr)                                                                        \
    ConfigKey {                                                                                       \
        name, KeyKind::flag, [](SimConfig& c, double v) { expr = v != 0.0; },                         \
            [](const SimConfig& c) -> std::optional<double> { return expr ? 1.0 : 0.0; }              \
    }

inline const std::vector<ConfigKey>& config_keys() {
    static const std::vector<ConfigKey> keys = {
        // plant
        ETSMC_REAL("da", c.plant.Da),
        ETSMC_REAL("gamma", c.plant.gamma),
        ETSMC_REAL("b_rise", c.plant.B),
        ETSMC_REAL("beta", c.plant.beta),
        ETSMC_REAL("x2c0", c.plant.x2c0),
        // disturbances
        ETSMC_REAL("d1_amp", c.disturbance.d1.amplitude),
        ETSMC_REAL("d1_freq", c.disturbance.d1.frequency),
        ETSMC_REAL("d2_amp", c.disturbance.d2.amplitude),
        ETSMC_REAL("d2_freq", c.disturbance.d2.frequency),
        // sliding surface and switching
        ETSMC_REAL("lambda1", c.sliding.lambda1),
        ETSMC_REAL("lambda2", c.sliding.lambda2),
        ETSMC_REAL("mu", c.sliding.mu),
        ETSMC_REAL("boundary_layer", c.sliding.boundary_layer),
        ETSMC_FLAG("reverse_switching", c.sliding.reverse_switching),
        // triggering rule
        ETSMC_REAL("zeta", c.trigger.zeta),
        ETSMC_REAL("xi", c.trigger.xi),
        ETSMC_REAL("psi", c.trigger.psi),
        ETSMC_REAL("m1", c.trigger.m1),
        ETSMC_REAL("m2", c.trigger.m2),
        ETSMC_REAL("varsigma", c.trigger.varsigma),
        ETSMC_FLAG("trigger_x1", c.trigger.use_x1),
        ETSMC_FLAG("trigger_x2", c.trigger.use_x2),
        // reference
        ETSMC_REAL("x1ref", c.reference.x1ref),
        ETSMC_REAL("x2ss", c.reference.x2ss),
        ETSMC_REAL("k1", c.reference.k1),
        ETSMC_REAL("k2", c.reference.k2),
        // simulation
        ETSMC_REAL("h", c.h),
        ETSMC_REAL("t_end", c.t_end),
        ETSMC_REAL("x1_0", c.x0.x1),
        ETSMC_REAL("x2_0", c.x0.x2),
        ETSMC_REAL("tf0_kelvin", c.tf0_kelvin),
        ConfigKey{"setpoint_kelvin", KeyKind::optional_real, [](SimConfig& c, double v) { c.setpoint_kelvin = v; },
                  [](const SimConfig& c) { return c.setpoint_kelvin; }},
        ETSMC_REAL("lipschitz_x1_min", c.lipschitz_box.x1_min),
        ETSMC_REAL("lipschitz_x1_max", c.lipschitz_box.x1_max),
        ETSMC_REAL("lipschitz_x2_min", c.lipschitz_box.x2_min),
        ETSMC_REAL("lipschitz_x2_max", c.lipschitz_box.x2_max),
        ConfigKey{"lipschitz_samples", KeyKind::count,
                  [](SimConfig& c, double v) { c.lipschitz_samples = static_cast<std::size_t>(v); },
                  [](const SimConfig& c) -> std::optional<double> {
                      return static_cast<double>(c.lipschitz_samples);
                  }},
    };
    return keys;
}

#undef ETSMC_REAL
#undef ETSMC_FLAG

inline constexpr std::array<std::string_view, 5> kDimlessPlantKeys{"da", "gamma", "b_rise", "beta", "x2c0"};

using PhysicalSetter = double PhysicalParams::*;
inline const std::vector<std::pair<std::string_view, PhysicalSetter>>& physical_keys() {
    static const std::vector<std::pair<std::string_view, PhysicalSetter>> keys = {
        {"k0", &PhysicalParams::k0},     {"caf0", &PhysicalParams::CAf0}, {"f0", &PhysicalParams::F0},
        {"rho", &PhysicalParams::rho},   {"cp", &PhysicalParams::Cp},     {"dh", &PhysicalParams::dH},
        {"rhoc", &PhysicalParams::rhoc}, {"cpc", &PhysicalParams::Cpc},   {"volume", &PhysicalParams::V},
        {"fc", &PhysicalParams::Fc},     {"e_act", &PhysicalParams::E},   {"r_gas", &PhysicalParams::R},
        {"a_ht", &PhysicalParams::a},    {"b_ht", &PhysicalParams::b},    {"tf0", &PhysicalParams::Tf0},
        {"tc0", &PhysicalParams::Tc0},
    };
    return keys;
}

inline std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

inline double parse_number(std::string_view text, std::string_view key, int line) {
    double v = 0.0;
    const char* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc{} || ptr != end || !std::isfinite(v)) {
        throw ConfigError("value of '" + std::string(key) + "' is not a decimal number: '" + std::string(text) + "'",
                          line);
    }
    return v;
}

inline std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace detail

[[nodiscard]] inline SimConfig parse_config_text(std::string_view text) {
    SimConfig cfg;
    std::map<std::string, int, std::less<>> seen;
    PhysicalParams phys;
    int phys_count = 0;

    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;

        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;

        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ConfigError("expected 'key = value'", line_no);
        const std::string_view key = detail::trim(line.substr(0, eq));
        const std::string_view value = detail::trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("missing key before '='", line_no);
        if (value.empty()) throw ConfigError("missing value for '" + std::string(key) + "'", line_no);
        if (const auto it = seen.find(key); it != seen.end()) {
            throw ConfigError("duplicate key '" + std::string(key) + "' (first set on line " +
                                  std::to_string(it->second) + ")",
                              line_no);
        }
        seen.emplace(std::string(key), line_no);

        const double v = detail::parse_number(value, key, line_no);

        const auto& keys = detail::config_keys();
        if (const auto it = std::find_if(keys.begin(), keys.end(), [&](const auto& k) { return k.name == key; });
            it != keys.end()) {
            if (it->kind == detail::KeyKind::flag && v != 0.0 && v != 1.0) {
                throw ConfigError("'" + std::string(key) + "' must be 0 or 1", line_no);
            }
            if (it->kind == detail::KeyKind::count && (v < 0.0 || v != std::floor(v))) {
                throw ConfigError("'" + std::string(key) + "' must be a non-negative integer", line_no);
            }
            it->set(cfg, v);
            continue;
        }
        const auto& pkeys = detail::physical_keys();
        if (const auto it = std::find_if(pkeys.begin(), pkeys.end(), [&](const auto& k) { return k.first == key; });
            it != pkeys.end()) {
            phys.*(it->second) = v;
            ++phys_count;
            continue;
        }
        throw ConfigError("unknown key '" + std::string(key) + "'", line_no);
    }

    if (phys_count > 0) {
        const auto& pkeys = detail::physical_keys();
        for (const auto& [name, member] : pkeys) {
            if (!seen.contains(name)) {
                throw ConfigError("physical block is incomplete: missing '" + std::string(name) + "'");
            }
        }
        for (const auto name : detail::kDimlessPlantKeys) {
            if (seen.contains(name)) {
                throw ConfigError("'" + std::string(name) + "' conflicts with the physical parameter block",
                                  seen.find(name)->second);
            }
        }
        try {
            cfg.plant = physical_to_dimensionless(phys);
        } catch (const InvalidParameterError& e) {
            throw ConfigError(std::string("physical block: ") + e.what());
        }
    }

    try {
        validate(cfg);
    } catch (const InvalidParameterError& e) {
        throw ConfigError(e.what());
    }
    return cfg;
}

[[nodiscard]] inline SimConfig parse_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return parse_config_text(ss.str());
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

/// Fully resolved configuration in the same format, with round-trip
/// precision. Scenario selection is not part of the file.
[[nodiscard]] inline std::string emit_config(const SimConfig& cfg) {
    std::string out;
    for (const auto& key : detail::config_keys()) {
        const auto v = key.get(cfg);
        if (!v) continue;
        out += key.name;
        out += " = ";
        out += detail::format_number(*v);
        out += '\n';
    }
    return out;
}

}  // namespace etsmc
