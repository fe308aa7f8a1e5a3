// Command-line front end: weights, predict, solve, bench, verify.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "cjm/config.hpp"
#include "cjm/experiment.hpp"
#include "cjm/verify.hpp"

namespace {

enum Exit { Ok = 0, Failed = 1, BadConfig = 2 };

struct Common {
    std::string config_path;
    std::vector<std::string> overrides;

    cjm::ExperimentConfig load() const {
        cjm::ExperimentConfig c = config_path.empty() ? cjm::ExperimentConfig{} : cjm::load_config(config_path);
        for (const auto& o : overrides) cjm::apply_override(c, o);
        return c;
    }
};

void add_common(CLI::App* app, Common& common) {
    app->add_option("-c,--config", common.config_path, "key = value experiment file");
    app->add_option("-s,--set", common.overrides, "override one key, e.g. --set n=128")->take_all();
}

struct ScheduleArgs {
    std::optional<double> kappa_min, kappa_max, sigma;
    std::optional<int> cycle_size;
    std::optional<std::string> ordering;
    bool round_pow2 = false;
};

void add_schedule_args(CLI::App* app, ScheduleArgs& a) {
    app->add_option("--kappa-min", a.kappa_min, "lower spectral bound (default: from the configured problem)");
    app->add_option("--kappa-max", a.kappa_max, "upper spectral bound");
    app->add_option("--sigma", a.sigma, "target reduction of one cycle");
    app->add_option("-M,--cycle-size", a.cycle_size, "explicit cycle size");
    app->add_option("--ordering", a.ordering, "default | lebedev-finogenov | interleaved | natural");
    app->add_flag("--round-pow2", a.round_pow2, "round M up to a power of two");
}

cjm::SpectralBounds resolve_bounds(const ScheduleArgs& a, const cjm::ExperimentConfig& c) {
    if (a.kappa_min.has_value() != a.kappa_max.has_value())
        throw cjm::ConfigError("--kappa-min and --kappa-max must be given together");
    if (a.kappa_min) {
        cjm::SpectralBounds b{*a.kappa_min, *a.kappa_max};
        try {
            b.validate();
        } catch (const cjm::DomainError& e) {
            throw cjm::ConfigError(e.what());
        }
        return b;
    }
    const cjm::Problem p = cjm::build_problem(c);
    return cjm::experiment_bounds(c, p);
}

cjm::WeightSchedule resolve_schedule(const ScheduleArgs& a, const cjm::ExperimentConfig& c,
                                     const cjm::SpectralBounds& b) {
    const double sigma = a.sigma.value_or(c.sigma);
    int m = a.cycle_size ? *a.cycle_size : (c.cycle_size > 0 ? c.cycle_size : cjm::min_cycle_size(sigma, b));
    if (m < 1) throw cjm::ConfigError("cycle size must be at least 1");
    if (a.round_pow2 || c.round_pow2) m = cjm::next_power_of_two(m);
    return cjm::apply_ordering(cjm::make_weights(m, b), cjm::make_ordering(a.ordering.value_or(c.ordering), m));
}

int cmd_weights(const Common& common, const ScheduleArgs& a, const std::string& output) {
    const cjm::ExperimentConfig c = common.load();
    const auto b = resolve_bounds(a, c);
    const auto s = resolve_schedule(a, c, b);
    if (output.empty() || output == "-") {
        cjm::write_schedule(std::cout, s);
    } else {
        std::ofstream out(output);
        if (!out) throw cjm::ConfigError("cannot write '" + output + "'");
        cjm::write_schedule(out, s);
    }
    return Ok;
}

int cmd_predict(const Common& common, const ScheduleArgs& a) {
    const cjm::ExperimentConfig c = common.load();
    const auto b = resolve_bounds(a, c);
    const auto s = resolve_schedule(a, c, b);
    const auto prof = cjm::amplification_bound(s.size(), b);
    std::printf("kappa_min = %.9g\n", b.kappa_min);
    std::printf("kappa_max = %.9g\n", b.kappa_max);
    std::printf("kappa_tilde_zero = %.9g\n", prof.kappa_tilde_zero);
    std::printf("M = %d\n", s.size());
    std::printf("ordering = %s\n", s.ordering.c_str());
    std::printf("bound = %.6e\n", prof.bound);
    std::printf("rate = %.6e\n", prof.rate);
    std::printf("per_iteration_factor = %.9g\n", std::exp(-prof.rate));
    std::printf("sor_omega_estimate = %.9g\n", cjm::estimate_sor_omega(b));
    return Ok;
}

int cmd_solve(const Common& common, const std::string& method, const std::string& output) {
    cjm::ExperimentConfig c = common.load();
    const cjm::Problem p = cjm::build_problem(c);
    const cjm::MethodSpec m = cjm::parse_method(method, cjm::default_sor_omega(c));
    cjm::Field u = cjm::initial_guess(p, c.seed);
    cjm::SolverReport r;
    try {
        r = cjm::run_method(m, c, p, u);
    } catch (const cjm::DivergenceError& e) {
        std::cerr << "diverged: " << e.what() << "\n";
        return Failed;
    }
    const std::string path =
        output.empty() ? (std::filesystem::path(c.output_dir) / (p.name + "_" + m.label + ".csv")).string() : output;
    if (path == "-") {
        cjm::write_residual_csv(std::cout, r);
    } else {
        if (auto dir = std::filesystem::path(path).parent_path(); !dir.empty()) std::filesystem::create_directories(dir);
        std::ofstream out(path);
        if (!out) throw cjm::ConfigError("cannot write '" + path + "'");
        cjm::write_residual_csv(out, r);
    }
    std::FILE* log = path == "-" ? stderr : stdout;
    std::fprintf(log, "%s on %s n=%d (%s): iterations=%ld converged=%s final_residual=%.6e", r.method.c_str(),
                 p.name.c_str(), c.n, cjm::to_string(p.stencil).c_str(), r.iterations, r.converged ? "yes" : "no",
                 r.final_residual());
    if (r.cycle_size > 0) std::fprintf(log, " M=%d predicted_bound=%.3e", r.cycle_size, r.predicted_bound);
    if (p.analytic) std::fprintf(log, " max_error=%.6e", cjm::max_error(u, p.analytic));
    std::fprintf(log, "\n");
    return r.converged ? Ok : Failed;
}

int cmd_bench(const Common& common) {
    const cjm::ExperimentConfig c = common.load();
    const auto r = cjm::run_experiment(c);
    cjm::write_summary_table(std::cout, r, true);
    return r.all_converged() ? Ok : Failed;
}

int cmd_verify(const std::string& suite) {
    const auto checks = cjm::run_verify(suite);
    cjm::print_checks(std::cout, checks);
    return cjm::all_passed(checks) ? Ok : Failed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Chebyshev-Jacobi elliptic solver"};
    app.require_subcommand(1);

    Common common;
    ScheduleArgs sched;
    std::string output, method = "cjm", suite = "all";

    auto* weights = app.add_subcommand("weights", "write the ordered weight schedule");
    add_common(weights, common);
    add_schedule_args(weights, sched);
    weights->add_option("-o,--output", output, "schedule file (default stdout)");

    auto* predict = app.add_subcommand("predict", "print M, bound and rate without solving");
    add_common(predict, common);
    add_schedule_args(predict, sched);

    auto* solve = app.add_subcommand("solve", "run one method and write its residual history");
    add_common(solve, common);
    solve->add_option("-m,--method", method, "jacobi | gauss-seidel | sor | sor:<omega> | cjm");
    solve->add_option("-o,--output", output, "CSV path, '-' for stdout");

    auto* bench = app.add_subcommand("bench", "run every configured method on one problem");
    add_common(bench, common);

    auto* verify = app.add_subcommand("verify", "run a verification suite");
    verify->add_option("suite", suite, "weights | orderings | bounds | theorems | all")
        ->check(CLI::IsMember({"weights", "orderings", "bounds", "theorems", "all"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return BadConfig;
    }

    try {
        if (*weights) return cmd_weights(common, sched, output);
        if (*predict) return cmd_predict(common, sched);
        if (*solve) return cmd_solve(common, method, output);
        if (*bench) return cmd_bench(common);
        if (*verify) return cmd_verify(suite);
    } catch (const cjm::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return BadConfig;
    } catch (const cjm::DomainError& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return BadConfig;
    } catch (const cjm::UsageError& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return BadConfig;
    } catch (const cjm::DivergenceError& e) {
        std::cerr << "diverged: " << e.what() << "\n";
        return Failed;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return Failed;
    }
    return Ok;
}
