#pragma once

#include <cstdint>
#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cjm/error.hpp"

namespace cjm {

/// Everything a `solve` or `bench` run needs. Every field has a default.
///
/// Recognised keys (plain-text `key = value`, `#` starts a comment):
///   problem        laplace2d-neumann | poisson3d-sphere | poisson2d-exp
///   n              cells per axis
///   stencil        auto | 5 | 7 | 9 | 17 | combo
///   combo_a, combo_b, combo_reach
///   methods        comma list of jacobi, gauss-seidel, sor, sor:<omega>, cjm
///   sor_omega      optimal | <value>      factor used by a bare `sor`
///   sigma          residual reduction targeted by one CJM cycle
///   cycle_size     explicit M (0 = derive from sigma)
///   ordering       default | lebedev-finogenov | interleaved | natural
///   round_pow2     true | false           round M up to a power of two
///   kappa_grid     native | full-domain   bounds from this grid or the
///                                          full Dirichlet domain (octant runs)
///   kappa_min, kappa_max                  explicit bounds (both or neither)
///   tolerance, max_iterations, max_cycles, stride
///   output_dir, seed
///   charge, radius, symmetry (full | octant)   sphere problem only
///   rhs_correction true | false           fourth-order source correction
///                                          for the 9-point stencil
struct ExperimentConfig {
    std::string problem = "poisson2d-exp";
    int n = 64;
    std::string stencil = "auto";
    int combo_a = 1;
    int combo_b = 1;
    int combo_reach = 1;
    std::vector<std::string> methods{"cjm"};
    std::optional<double> sor_omega;
    double sigma = 1e-10;
    int cycle_size = 0;
    std::string ordering = "default";
    bool round_pow2 = false;
    std::string kappa_grid = "native";
    std::optional<double> kappa_min;
    std::optional<double> kappa_max;
    double tolerance = 1e-10;
    long max_iterations = 1000000;
    long max_cycles = 1000;
    int stride = 1;
    std::string output_dir = ".";
    std::uint64_t seed = 0;
    double charge = 1.0;
    double radius = 0.5;
    std::string symmetry = "full";
    bool rhs_correction = true;
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(const std::string& key, const std::string& v) {
    std::istringstream is(v);
    T out{};
    if (!(is >> out) || !(is >> std::ws).eof()) throw ConfigError("config: '" + key + "' expects a number, got '" + v + "'");
    return out;
}

inline bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("config: '" + key + "' expects true/false, got '" + v + "'");
}

inline std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(v);
    while (std::getline(is, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

}  // namespace detail

/// Applies one `key = value` assignment; unknown keys are errors.
inline void set_config_value(ExperimentConfig& c, const std::string& key, const std::string& value) {
    using detail::parse_number;
    const std::string& v = value;
    if (key == "problem") {
        if (v != "laplace2d-neumann" && v != "poisson3d-sphere" && v != "poisson2d-exp")
            throw ConfigError("config: unknown problem '" + v + "'");
        c.problem = v;
    } else if (key == "n") {
        c.n = parse_number<int>(key, v);
    } else if (key == "stencil") {
        if (v != "auto" && v != "5" && v != "7" && v != "9" && v != "17" && v != "combo")
            throw ConfigError("config: unknown stencil '" + v + "'");
        c.stencil = v;
    } else if (key == "combo_a") {
        c.combo_a = parse_number<int>(key, v);
    } else if (key == "combo_b") {
        c.combo_b = parse_number<int>(key, v);
    } else if (key == "combo_reach") {
        c.combo_reach = parse_number<int>(key, v);
    } else if (key == "methods") {
        c.methods = detail::split_list(v);
        if (c.methods.empty()) throw ConfigError("config: 'methods' must name at least one method");
    } else if (key == "sor_omega") {
        if (v == "optimal")
            c.sor_omega.reset();
        else
            c.sor_omega = parse_number<double>(key, v);
    } else if (key == "sigma") {
        c.sigma = parse_number<double>(key, v);
        if (!(c.sigma > 0.0 && c.sigma < 1.0)) throw ConfigError("config: sigma must lie in (0, 1)");
    } else if (key == "cycle_size") {
        c.cycle_size = parse_number<int>(key, v);
    } else if (key == "ordering") {
        if (v != "default" && v != "lebedev-finogenov" && v != "interleaved" && v != "natural")
            throw ConfigError("config: unknown ordering '" + v + "'");
        c.ordering = v;
    } else if (key == "round_pow2") {
        c.round_pow2 = detail::parse_bool(key, v);
    } else if (key == "kappa_grid") {
        if (v != "native" && v != "full-domain") throw ConfigError("config: kappa_grid must be native or full-domain");
        c.kappa_grid = v;
    } else if (key == "kappa_min") {
        c.kappa_min = parse_number<double>(key, v);
    } else if (key == "kappa_max") {
        c.kappa_max = parse_number<double>(key, v);
    } else if (key == "tolerance") {
        c.tolerance = parse_number<double>(key, v);
    } else if (key == "max_iterations") {
        c.max_iterations = parse_number<long>(key, v);
    } else if (key == "max_cycles") {
        c.max_cycles = parse_number<long>(key, v);
    } else if (key == "stride") {
        c.stride = parse_number<int>(key, v);
    } else if (key == "output_dir") {
        c.output_dir = v;
    } else if (key == "seed") {
        c.seed = parse_number<std::uint64_t>(key, v);
    } else if (key == "charge") {
        c.charge = parse_number<double>(key, v);
    } else if (key == "radius") {
        c.radius = parse_number<double>(key, v);
    } else if (key == "symmetry") {
        if (v != "full" && v != "octant") throw ConfigError("config: symmetry must be full or octant");
        c.symmetry = v;
    } else if (key == "rhs_correction") {
        c.rhs_correction = detail::parse_bool(key, v);
    } else {
        throw ConfigError("config: unknown key '" + key + "'");
    }
}

/// Applies a `key=value` override string (as given on the command line).
inline void apply_override(ExperimentConfig& c, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) throw ConfigError("override '" + assignment + "' is not key=value");
    set_config_value(c, detail::trim(assignment.substr(0, eq)), detail::trim(assignment.substr(eq + 1)));
}

inline ExperimentConfig parse_config(std::istream& is) {
    ExperimentConfig c;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        set_config_value(c, detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)));
    }
    return c;
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    return parse_config(in);
}

}  // namespace cjm
