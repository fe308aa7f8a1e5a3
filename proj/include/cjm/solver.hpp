#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "cjm/chebyshev.hpp"
#include "cjm/error.hpp"
#include "cjm/grid.hpp"
#include "cjm/ordering.hpp"
#include "cjm/stencil.hpp"

namespace cjm {

/// Discrete Poisson problem  L u = b  with boundary data.
struct Problem {
    std::string name;
    Grid grid;
    StencilSpec stencil;
    Field rhs;                                      // b on the interior
    BoundaryFunction boundary;                      // Dirichlet data; empty for pure Neumann
    std::function<double(const Point&)> analytic;   // optional exact solution

    int ghost_width() const { return std::max(1, stencil.reach); }
    Field make_field(double value = 0.0) const { return Field(grid, ghost_width(), value); }
};

struct ResidualSample {
    long iteration = 0;
    double residual = 0.0;
};

struct SolverReport {
    std::string method;
    std::vector<ResidualSample> history;   // successive-difference infinity norms
    long iterations = 0;
    double predicted_bound = std::numeric_limits<double>::quiet_NaN();
    double achieved_reduction = std::numeric_limits<double>::quiet_NaN();
    bool converged = false;
    double wall_time = 0.0;
    int cycle_size = 0;
    std::string ordering;

    double final_residual() const { return history.empty() ? NAN : history.back().residual; }
};

/// Growth beyond this multiple of the first recorded residual is divergence.
inline constexpr double divergence_growth = 1e12;

/// Sweep machinery bound to one problem: kernel, diagonal, frozen boundary.
class SweepContext {
   public:
    explicit SweepContext(const Problem& p)
        : problem_(&p), frozen_(p.make_field()), kernel_(make_kernel(p.stencil, frozen_)) {
        if (!(p.rhs.grid() == p.grid) || p.rhs.ghost_width() != p.ghost_width())
            throw ConfigError("rhs field layout does not match the problem grid");
        if (!p.grid.pure_neumann() && !p.boundary)
            throw ConfigError("problem has Dirichlet faces but no boundary function");
        if (p.boundary)
            fill_ghosts(frozen_, p.boundary);
        else
            fill_ghosts(frozen_);
        diag_ = diagonal_coeff(p.stencil, p.grid.spacing(0));
    }

    double diagonal() const { return diag_; }

    void fill(Field& u) const { fill_ghosts(u, frozen_); }

    /// out = u + omega d^-1 (b - L u) over the interior; returns max |out - u|.
    /// Ghosts of u must be filled. Returns NaN if any update is non-finite.
    double jacobi(const Field& u, Field& out, double omega) const {
        const double c = omega / diag_;
        const double* src = u.raw().data();
        const double* rhs = problem_->rhs.raw().data();
        double* dst = out.raw().data();
        double m = 0.0, guard = 0.0;
        std::visit(
            [&](const auto& lap) {
                for (int k = 1; k <= u.last(2); ++k)
                    for (int j = 1; j <= u.last(1); ++j) {
                        const std::ptrdiff_t row = u.index(1, j, k);
                        for (int i = 0; i < u.last(0); ++i) {
                            const std::ptrdiff_t q = row + i;
                            const double delta = c * (rhs[q] - lap(src + q));
                            dst[q] = src[q] + delta;
                            const double ad = std::abs(delta);
                            m = ad > m ? ad : m;
                            guard += ad;
                        }
                    }
            },
            kernel_);
        return std::isfinite(guard) ? m : std::numeric_limits<double>::quiet_NaN();
    }

    /// Lexicographic in-place relaxation (x fastest) with factor omega;
    /// returns max change. omega = 1 is Gauss-Seidel.
    double sor(Field& u, double omega) const {
        const double c = omega / diag_;
        double* v = u.raw().data();
        const double* rhs = problem_->rhs.raw().data();
        double m = 0.0, guard = 0.0;
        std::visit(
            [&](const auto& lap) {
                for (int k = 1; k <= u.last(2); ++k)
                    for (int j = 1; j <= u.last(1); ++j) {
                        const std::ptrdiff_t row = u.index(1, j, k);
                        for (int i = 0; i < u.last(0); ++i) {
                            const std::ptrdiff_t q = row + i;
                            const double delta = c * (rhs[q] - lap(v + q));
                            v[q] += delta;
                            const double ad = std::abs(delta);
                            m = ad > m ? ad : m;
                            guard += ad;
                        }
                    }
            },
            kernel_);
        return std::isfinite(guard) ? m : std::numeric_limits<double>::quiet_NaN();
    }

   private:
    const Problem* problem_;
    Field frozen_;
    kernel::Any kernel_;
    double diag_ = -1.0;
};

/// One out-of-place weighted-Jacobi step u + omega D^-1 (b - L u).
inline Field weighted_jacobi_sweep(const Field& u, const Problem& p, double omega) {
    if (!(omega > 0.0)) throw DomainError("relaxation factor must be positive");
    const SweepContext ctx(p);
    Field in = u;
    ctx.fill(in);
    Field out = in;
    if (std::isnan(ctx.jacobi(in, out, omega))) throw DivergenceError("non-finite value in Jacobi sweep", 1, omega);
    ctx.fill(out);
    return out;
}

/// Starting iterate: zero when any face is Dirichlet; for singular
/// pure-Neumann problems a seeded uniform(-1, 1) field with its mean removed.
inline Field initial_guess(const Problem& p, std::uint64_t seed = 0) {
    Field u = p.make_field();
    if (p.grid.pure_neumann()) {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> dist(-1.0, 1.0);
        u.for_each_interior([&](int i, int j, int k) { u(i, j, k) = dist(rng); });
        u.remove_mean();
    }
    return u;
}

namespace detail {

// Residual bookkeeping shared by the drivers.
class Monitor {
   public:
    Monitor(SolverReport& r, double tol, int stride) : report_(r), tol_(tol), stride_(std::max(1, stride)) {}

    // Returns true when converged. `force` records regardless of stride.
    bool record(long n, double res, double omega, bool force) {
        if (std::isnan(res)) throw DivergenceError("non-finite value in sweep", n, omega);
        const bool due = force || n % stride_ == 0;
        if (!due) return false;
        report_.history.push_back({n, res});
        if (first_ < 0.0) first_ = res;
        if (res > divergence_growth * first_ && first_ > 0.0)
            throw DivergenceError("residual grew past 1e12 times its first value", n, omega);
        return res <= tol_;
    }

   private:
    SolverReport& report_;
    double tol_;
    int stride_;
    double first_ = -1.0;
};

inline void finish(SolverReport& r, std::chrono::steady_clock::time_point t0) {
    r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!r.history.empty() && r.history.front().residual > 0.0)
        r.achieved_reduction = r.history.back().residual / r.history.front().residual;
    else if (!r.history.empty())
        r.achieved_reduction = 0.0;
}

// Max |d^-1 (b - L u)|: the change a unit Jacobi step would make.
inline double scaled_residual(const SweepContext& ctx, const Field& u) {
    Field scratch = u;
    return ctx.jacobi(u, scratch, 1.0);
}

}  // namespace detail

struct CjmOptions {
    std::optional<double> sigma;               // residual reduction targeted by one cycle
    std::optional<int> cycle_size;             // explicit M, overrides sigma
    std::optional<SpectralBounds> bounds;      // default: kappa_bounds of the problem
    std::string ordering = "default";
    bool round_to_power_of_two = false;
    double tolerance = 1e-10;
    long max_cycles = 1000;
    int stride = 1;
};

inline constexpr double default_sigma = 1e-10;

/// Weights (ordered) that cjm_solve would use for `p` under `opt`.
inline WeightSchedule build_schedule(const Problem& p, const CjmOptions& opt) {
    const SpectralBounds b = opt.bounds.value_or(kappa_bounds(p.stencil, p.grid));
    b.validate();
    if (!(b.kappa_min > 0.0))
        throw DomainError("kappa_min is zero: the constant mode makes the cycle size unbounded");
    int m = opt.cycle_size ? *opt.cycle_size : min_cycle_size(opt.sigma.value_or(default_sigma), b);
    if (m < 1) throw DomainError("cycle size must be at least 1");
    if (opt.round_to_power_of_two) m = next_power_of_two(m);
    return apply_ordering(make_weights(m, b), make_ordering(opt.ordering, m));
}

/// Cycles through `schedule` until the successive-difference residual drops
/// to `tolerance` or `max_cycles` cycles have run.
inline SolverReport run_schedule(const Problem& p, Field& u, const WeightSchedule& schedule, double tolerance,
                                 long max_cycles, int stride = 1) {
    const auto t0 = std::chrono::steady_clock::now();
    if (schedule.weights.empty()) throw DomainError("empty weight schedule");
    SweepContext ctx(p);
    SolverReport r;
    r.method = "cjm";
    r.cycle_size = schedule.size();
    r.ordering = schedule.ordering;
    if (schedule.chebyshev && schedule.bounds.kappa_min > 0.0 && schedule.bounds.kappa_max > schedule.bounds.kappa_min)
        r.predicted_bound = amplification_bound(schedule.size(), schedule.bounds).bound;
    const bool singular = p.grid.pure_neumann();
    if (singular) u.remove_mean();
    ctx.fill(u);
    if (detail::scaled_residual(ctx, u) <= tolerance) {
        r.history.push_back({0, detail::scaled_residual(ctx, u)});
        r.converged = true;
        detail::finish(r, t0);
        return r;
    }
    detail::Monitor mon(r, tolerance, stride);
    Field next = u;
    long n = 0;
    const int m = schedule.size();
    for (long cycle = 0; cycle < max_cycles && !r.converged; ++cycle) {
        for (int s = 0; s < m; ++s) {
            const double w = schedule.weights[static_cast<std::size_t>(s)];
            const double res = ctx.jacobi(u, next, w);
            ++n;
            std::swap(u, next);
            const bool end_of_cycle = s == m - 1;
            if (end_of_cycle && singular) u.remove_mean();
            ctx.fill(u);
            if (mon.record(n, res, w, end_of_cycle)) {
                r.converged = true;
                break;
            }
        }
    }
    r.iterations = n;
    detail::finish(r, t0);
    return r;
}

/// Chebyshev-Jacobi solve: build the optimal schedule, order it, run cycles.
inline SolverReport cjm_solve(const Problem& p, Field& u, const CjmOptions& opt = {}) {
    return run_schedule(p, u, build_schedule(p, opt), opt.tolerance, opt.max_cycles, opt.stride);
}

enum class ClassicMethod { Jacobi, GaussSeidel, SOR };

struct ClassicOptions {
    ClassicMethod method = ClassicMethod::Jacobi;
    double omega = 1.0;   // SOR only
    double tolerance = 1e-10;
    long max_iterations = 1000000;
    int stride = 1;
};

inline std::string method_name(ClassicMethod m, double omega) {
    switch (m) {
        case ClassicMethod::Jacobi: return "jacobi";
        case ClassicMethod::GaussSeidel: return "gauss-seidel";
        case ClassicMethod::SOR: {
            std::ostringstream os;
            os << "sor(" << omega << ")";
            return os.str();
        }
    }
    return "?";
}

/// Jacobi, Gauss-Seidel or SOR with lexicographic traversal. Halos are
/// refreshed between sweeps, not within one.
inline SolverReport classic_solve(const Problem& p, Field& u, const ClassicOptions& opt = {}) {
    const auto t0 = std::chrono::steady_clock::now();
    double omega = opt.omega;
    if (opt.method == ClassicMethod::GaussSeidel) omega = 1.0;
    if (opt.method == ClassicMethod::Jacobi) omega = 1.0;
    if (opt.method == ClassicMethod::SOR && !(omega > 0.0 && omega < 2.0))
        throw DomainError("SOR factor must lie in (0, 2)");
    SweepContext ctx(p);
    SolverReport r;
    r.method = method_name(opt.method, omega);
    ctx.fill(u);
    if (detail::scaled_residual(ctx, u) <= opt.tolerance) {
        r.history.push_back({0, detail::scaled_residual(ctx, u)});
        r.converged = true;
        detail::finish(r, t0);
        return r;
    }
    detail::Monitor mon(r, opt.tolerance, opt.stride);
    Field next = opt.method == ClassicMethod::Jacobi ? u : Field();
    long n = 0;
    while (n < opt.max_iterations) {
        double res;
        if (opt.method == ClassicMethod::Jacobi) {
            res = ctx.jacobi(u, next, 1.0);
            std::swap(u, next);
        } else {
            res = ctx.sor(u, omega);
        }
        ++n;
        ctx.fill(u);
        if (mon.record(n, res, omega, n == opt.max_iterations)) {
            r.converged = true;
            break;
        }
    }
    r.iterations = n;
    detail::finish(r, t0);
    return r;
}

/// Young's optimal SOR factor 2 / (1 + sin(pi/N)) for the consistently
/// ordered 5-/7-point Dirichlet model problem with N intervals per axis.
inline double sor_optimal_omega(int n) {
    if (n < 2) throw DomainError("sor_optimal_omega needs N >= 2");
    return 2.0 / (1.0 + std::sin(std::numbers::pi / n));
}

/// Residual history as CSV: header `iteration,residual`.
inline void write_residual_csv(std::ostream& os, const SolverReport& r) {
    os << "iteration,residual\n";
    char buf[64];
    for (const auto& s : r.history) {
        std::snprintf(buf, sizeof buf, "%ld,%.17g\n", s.iteration, s.residual);
        os << buf;
    }
}

}  // namespace cjm
