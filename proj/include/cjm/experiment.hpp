#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "cjm/config.hpp"
#include "cjm/error.hpp"
#include "cjm/problems.hpp"
#include "cjm/solver.hpp"

namespace cjm {

/// One entry of a `methods` list.
struct MethodSpec {
    enum Kind { Jacobi, GaussSeidel, SOR, CJM } kind = CJM;
    double omega = 1.0;    // SOR only
    std::string label;     // file-name safe, e.g. "sor-1.95"
};

/// Parses jacobi, gauss-seidel, sor, sor:<omega> or cjm. A bare `sor` takes
/// `default_omega`.
inline MethodSpec parse_method(const std::string& text, double default_omega) {
    if (text == "jacobi") return {MethodSpec::Jacobi, 1.0, "jacobi"};
    if (text == "gauss-seidel" || text == "gs") return {MethodSpec::GaussSeidel, 1.0, "gauss-seidel"};
    if (text == "cjm") return {MethodSpec::CJM, 0.0, "cjm"};
    if (text == "sor" || text.rfind("sor:", 0) == 0) {
        double w = default_omega;
        if (text.size() > 4) w = detail::parse_number<double>("methods", text.substr(4));
        if (!(w > 0.0 && w < 2.0)) throw ConfigError("SOR factor must lie in (0, 2), got " + text);
        char buf[48];
        std::snprintf(buf, sizeof buf, "sor-%.6g", w);
        return {MethodSpec::SOR, w, buf};
    }
    throw ConfigError("unknown method '" + text + "'");
}

/// Factor used by a bare `sor`: the configured value or 2/(1 + sin(pi/N)).
inline double default_sor_omega(const ExperimentConfig& c) { return c.sor_omega.value_or(sor_optimal_omega(c.n)); }

inline CjmOptions cjm_options(const ExperimentConfig& c, const Problem& p) {
    CjmOptions o;
    o.sigma = c.sigma;
    if (c.cycle_size > 0) o.cycle_size = c.cycle_size;
    o.bounds = experiment_bounds(c, p);
    o.ordering = c.ordering;
    o.round_to_power_of_two = c.round_pow2;
    o.tolerance = c.tolerance;
    o.max_cycles = c.max_cycles;
    o.stride = c.stride;
    return o;
}

/// Runs one method on `p` from `u` (modified in place).
inline SolverReport run_method(const MethodSpec& m, const ExperimentConfig& c, const Problem& p, Field& u) {
    if (m.kind == MethodSpec::CJM) return cjm_solve(p, u, cjm_options(c, p));
    ClassicOptions o;
    o.method = m.kind == MethodSpec::Jacobi ? ClassicMethod::Jacobi
             : m.kind == MethodSpec::GaussSeidel ? ClassicMethod::GaussSeidel
                                                 : ClassicMethod::SOR;
    o.omega = m.omega;
    o.tolerance = c.tolerance;
    o.max_iterations = c.max_iterations;
    o.stride = c.stride;
    return classic_solve(p, u, o);
}

struct MethodOutcome {
    MethodSpec method;
    std::optional<SolverReport> report;   // empty when the solve failed
    std::string error;                    // divergence message
    std::optional<double> speedup;        // jacobi iterations / these iterations
    std::string csv_path;
};

struct ComparisonReport {
    std::string problem;
    std::string stencil;
    int n = 0;
    SpectralBounds bounds;
    std::vector<MethodOutcome> outcomes;

    bool all_converged() const {
        for (const auto& o : outcomes)
            if (!o.report || !o.report->converged) return false;
        return true;
    }
    bool any_diverged() const {
        for (const auto& o : outcomes)
            if (!o.report) return true;
        return false;
    }
    const MethodOutcome* find(const std::string& label) const {
        for (const auto& o : outcomes)
            if (o.method.label == label) return &o;
        return nullptr;
    }
};

inline void write_summary_table(std::ostream& os, const ComparisonReport& r, bool with_time) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "# %s  n=%d  stencil=%s  kappa_min=%.9g  kappa_max=%.9g\n", r.problem.c_str(), r.n,
                  r.stencil.c_str(), r.bounds.kappa_min, r.bounds.kappa_max);
    os << buf;
    std::snprintf(buf, sizeof buf, "%-16s %10s %10s %14s %14s %9s%s\n", "method", "iterations", "converged",
                  "final_residual", "reduction", "speedup", with_time ? "   wall_s" : "");
    os << buf;
    for (const auto& o : r.outcomes) {
        if (!o.report) {
            std::snprintf(buf, sizeof buf, "%-16s %10s %10s  %s\n", o.method.label.c_str(), "-", "diverged",
                          o.error.c_str());
            os << buf;
            continue;
        }
        const SolverReport& s = *o.report;
        std::snprintf(buf, sizeof buf, "%-16s %10ld %10s %14.6e %14.6e ", o.method.label.c_str(), s.iterations,
                      s.converged ? "yes" : "no", s.final_residual(), s.achieved_reduction);
        os << buf;
        if (o.speedup)
            std::snprintf(buf, sizeof buf, "%9.2f", *o.speedup);
        else
            std::snprintf(buf, sizeof buf, "%9s", "-");
        os << buf;
        if (with_time) {
            std::snprintf(buf, sizeof buf, " %8.3f", s.wall_time);
            os << buf;
        }
        os << "\n";
    }
}

/// Machine-readable summary. Wall time is left out so reruns are identical.
inline void write_summary_csv(std::ostream& os, const ComparisonReport& r) {
    os << "method,iterations,converged,final_residual,achieved_reduction,speedup_vs_jacobi,cycle_size,status\n";
    char buf[256];
    for (const auto& o : r.outcomes) {
        if (!o.report) {
            os << o.method.label << ",,0,,,,,diverged\n";
            continue;
        }
        const SolverReport& s = *o.report;
        std::snprintf(buf, sizeof buf, "%s,%ld,%d,%.17g,%.17g,", o.method.label.c_str(), s.iterations,
                      s.converged ? 1 : 0, s.final_residual(), s.achieved_reduction);
        os << buf;
        if (o.speedup) {
            std::snprintf(buf, sizeof buf, "%.17g", *o.speedup);
            os << buf;
        }
        os << "," << s.cycle_size << ",ok\n";
    }
}

/// Solves the configured problem with every listed method from the same
/// initial guess. Writes `<problem>_<method>.csv` per method plus
/// `summary.txt` and `summary.csv` into `c.output_dir` (skipped when
/// `write_files` is false). A diverging method is recorded, not rethrown.
inline ComparisonReport run_experiment(const ExperimentConfig& c, bool write_files = true) {
    const Problem p = build_problem(c);
    std::vector<MethodSpec> methods;
    for (const auto& m : c.methods) methods.push_back(parse_method(m, default_sor_omega(c)));
    if (methods.empty()) throw ConfigError("no methods to run");

    ComparisonReport r;
    r.problem = c.problem + (c.symmetry == "octant" && c.problem == "poisson3d-sphere" ? "-octant" : "");
    r.stencil = to_string(p.stencil);
    r.n = c.n;
    r.bounds = experiment_bounds(c, p);

    namespace fs = std::filesystem;
    if (write_files) fs::create_directories(c.output_dir);

    const Field start = initial_guess(p, c.seed);
    for (const auto& m : methods) {
        MethodOutcome o;
        o.method = m;
        Field u = start;
        try {
            o.report = run_method(m, c, p, u);
        } catch (const DivergenceError& e) {
            o.error = e.what();
        }
        if (write_files && o.report) {
            o.csv_path = (fs::path(c.output_dir) / (r.problem + "_" + m.label + ".csv")).string();
            std::ofstream out(o.csv_path);
            if (!out) throw ConfigError("cannot write '" + o.csv_path + "'");
            write_residual_csv(out, *o.report);
        }
        r.outcomes.push_back(std::move(o));
    }

    const MethodOutcome* jac = r.find("jacobi");
    if (jac && jac->report && jac->report->converged)
        for (auto& o : r.outcomes)
            if (o.report && o.report->converged && o.report->iterations > 0)
                o.speedup = static_cast<double>(jac->report->iterations) / static_cast<double>(o.report->iterations);

    if (write_files) {
        std::ofstream txt(fs::path(c.output_dir) / "summary.txt");
        write_summary_table(txt, r, true);
        std::ofstream csv(fs::path(c.output_dir) / "summary.csv");
        write_summary_csv(csv, r);
    }
    return r;
}

}  // namespace cjm
