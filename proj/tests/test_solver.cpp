#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <sstream>

#include "cjm/solver.hpp"
#include "oracle/oracle.hpp"

using namespace cjm;
using Catch::Approx;
using std::numbers::pi;

namespace {

double smooth(const Point& p) { return std::sin(2 * p[0] + 1) * std::exp(p[1]) + 0.5 * p[2]; }

Problem make(const StencilSpec& s, const Grid& g, BoundaryFunction bc, std::function<double(const Point&)> f) {
    Problem p;
    p.name = "test";
    p.grid = g;
    p.stencil = s;
    p.rhs = p.make_field();
    if (f) p.rhs.assign(f);
    p.boundary = std::move(bc);
    return p;
}

struct Family {
    StencilSpec s;
    Grid g;
};

std::vector<Family> small_families() {
    const Axis nd{8, 0.0, 1.0, BoundaryKind::Neumann, BoundaryKind::Dirichlet};
    const Axis dd{8, 0.0, 1.0, BoundaryKind::Dirichlet, BoundaryKind::Dirichlet};
    const Axis nn{8, 0.0, 1.0, BoundaryKind::Neumann, BoundaryKind::Neumann};
    return {
        {five_point(), Grid({dd, nd})},
        {seven_point(), Grid({nd, dd, nd})},
        {nine_point(), Grid({dd, dd})},
        {seventeen_point(), Grid({nn, dd})},
        {general_combo(1, 4, 2), Grid({nd, nd})},
        {general_combo(0, 2, 1), Grid({dd, nn})},
    };
}

double rel_inf(const Eigen::VectorXd& got, const Eigen::VectorXd& want) {
    return (got - want).lpNorm<Eigen::Infinity>() / want.lpNorm<Eigen::Infinity>();
}

}  // namespace

TEST_CASE("one weighted-Jacobi sweep matches the dense splitting") {
    for (const auto& fam : small_families()) {
        const Problem p = make(fam.s, fam.g, smooth, [](const Point& x) { return x[0] - x[1] * x[1]; });
        Field u = p.make_field();
        oracle::randomize(u, 5);
        const auto sys = oracle::assemble(fam.s, fam.g, smooth);
        for (double omega : {1.0, 0.37, 4.2}) {
            const Field next = weighted_jacobi_sweep(u, p, omega);
            const Eigen::VectorXd want = oracle::jacobi_step(sys, oracle::to_vector(p.rhs), oracle::to_vector(u), omega);
            CHECK(rel_inf(oracle::to_vector(next), want) <= 1e-13);
        }
    }
}

TEST_CASE("the discrete solution is a fixed point") {
    const Grid g = Grid::uniform(2, 10, BoundaryKind::Dirichlet);
    const Problem p = make(nine_point(), g, smooth, [](const Point& x) { return x[0] * x[1]; });
    const auto sys = oracle::assemble(p.stencil, g, smooth);
    Field u = p.make_field();
    oracle::from_vector(u, oracle::solve(sys, oracle::to_vector(p.rhs)));
    const Field next = weighted_jacobi_sweep(u, p, 0.8);
    CHECK(inf_norm_diff(next, u) < 1e-12);
}

TEST_CASE("a single neumann mode is scaled by 1 - omega kappa") {
    const int n = 16;
    const Grid g = Grid::uniform(2, n, BoundaryKind::Neumann);
    for (const auto& s : {five_point(), nine_point(), seventeen_point()}) {
        const Problem p = make(s, g, {}, {});
        Field u = p.make_field();
        const int kx = 3, ky = 1;
        u.assign([&](const Point& x) { return std::cos(kx * pi * x[0]) * std::cos(ky * pi * x[1]); });
        const double phase[2] = {kx * pi / n, ky * pi / n};
        const double omega = 1.3;
        const double factor = 1.0 - omega * kappa_symbol(s, phase);
        const Field next = weighted_jacobi_sweep(u, p, omega);
        u.for_each_interior([&](int i, int j, int) { CHECK(next(i, j) == Approx(factor * u(i, j)).margin(1e-10)); });
    }
}

TEST_CASE("classic jacobi on a 4x4 dirichlet problem follows the dense iteration") {
    const Grid g = Grid::uniform(2, 5, BoundaryKind::Dirichlet);
    const Problem p = make(five_point(), g, smooth, [](const Point& x) { return 1.0 + x[0]; });
    const auto sys = oracle::assemble(p.stencil, g, smooth);
    Eigen::VectorXd ref = Eigen::VectorXd::Zero(16);
    for (int k = 1; k <= 6; ++k) {
        ref = oracle::jacobi_step(sys, oracle::to_vector(p.rhs), ref, 1.0);
        Field u = p.make_field();
        ClassicOptions o;
        o.method = ClassicMethod::Jacobi;
        o.max_iterations = k;
        o.tolerance = 0.0;
        classic_solve(p, u, o);
        CHECK(rel_inf(oracle::to_vector(u), ref) <= 1e-13);
    }
}

TEST_CASE("a one-weight schedule is stationary Richardson") {
    const Grid g = Grid::uniform(2, 8, BoundaryKind::Dirichlet);
    const Problem p = make(five_point(), g, smooth, [](const Point& x) { return x[1]; });
    const auto b = kappa_bounds(p.stencil, g);
    const auto sys = oracle::assemble(p.stencil, g, smooth);
    const double omega = 2.0 / (b.kappa_max + b.kappa_min);
    Eigen::VectorXd ref = Eigen::VectorXd::Zero(49);
    for (int k = 0; k < 25; ++k) ref = oracle::jacobi_step(sys, oracle::to_vector(p.rhs), ref, omega);
    Field u = p.make_field();
    CjmOptions o;
    o.cycle_size = 1;
    o.max_cycles = 25;
    o.tolerance = 0.0;
    const auto r = cjm_solve(p, u, o);
    CHECK(r.iterations == 25);
    CHECK(rel_inf(oracle::to_vector(u), ref) <= 1e-13);
}

TEST_CASE("end-of-cycle error contraction respects the bound") {
    struct Case {
        StencilSpec s;
        Grid g;
    };
    const std::vector<Case> cases{
        {five_point(), Grid::uniform(2, 24, BoundaryKind::Dirichlet)},
        {nine_point(), Grid::uniform(2, 32, BoundaryKind::Dirichlet)},
        {seventeen_point(), Grid::uniform(2, 20, BoundaryKind::Dirichlet)},
        {seven_point(), Grid::uniform(3, 10, BoundaryKind::Dirichlet)},
        {five_point(), Grid::uniform(2, 16, BoundaryKind::Neumann)},
        {seventeen_point(), Grid::uniform(2, 16, BoundaryKind::Neumann)},
    };
    for (const auto& c : cases) {
        const bool neumann = c.g.pure_neumann();
        const Problem p = neumann ? make(c.s, c.g, {}, {})
                                  : make(c.s, c.g, smooth, [](const Point& x) { return std::cos(3 * x[0]) + x[1]; });
        const auto sys = oracle::assemble(c.s, c.g, p.boundary ? p.boundary : smooth);
        Eigen::VectorXd exact = neumann ? Eigen::VectorXd::Zero(sys.A.rows()) : oracle::solve(sys, oracle::to_vector(p.rhs));
        for (int m : {5, 20, 60}) {
            Field u = p.make_field();
            oracle::randomize(u, static_cast<unsigned>(m));
            if (neumann) u.remove_mean();
            const Eigen::VectorXd e0 = oracle::to_vector(u) - exact;
            CjmOptions o;
            o.cycle_size = m;
            o.max_cycles = 1;
            o.tolerance = 0.0;
            const auto r = cjm_solve(p, u, o);
            const double ratio = (oracle::to_vector(u) - exact).norm() / e0.norm();
            INFO(to_string(c.s) << " M=" << m << " ratio=" << ratio << " bound=" << r.predicted_bound);
            CHECK(ratio <= r.predicted_bound * 1.01);
        }
    }
}

TEST_CASE("zero data converges at iteration zero") {
    const Problem p = make(five_point(), Grid::uniform(2, 16, BoundaryKind::Dirichlet), [](const Point&) { return 0.0; }, {});
    Field u = p.make_field();
    const auto r = cjm_solve(p, u);
    CHECK(r.converged);
    CHECK(r.iterations == 0);
    REQUIRE(r.history.size() == 1);
    CHECK(r.history[0].iteration == 0);
    CHECK(r.history[0].residual == 0.0);
    Field v = p.make_field();
    CHECK(classic_solve(p, v).iterations == 0);
}

TEST_CASE("sor with omega one is gauss-seidel") {
    const Problem p = make(nine_point(), Grid::uniform(2, 12, BoundaryKind::Dirichlet), smooth, [](const Point&) { return -1.0; });
    Field a = p.make_field(), b = p.make_field();
    ClassicOptions gs{ClassicMethod::GaussSeidel, 1.0, 0.0, 17, 1};
    ClassicOptions sor{ClassicMethod::SOR, 1.0, 0.0, 17, 1};
    const auto ra = classic_solve(p, a, gs);
    const auto rb = classic_solve(p, b, sor);
    CHECK(inf_norm_diff(a, b) == 0.0);
    CHECK(ra.history.back().residual == rb.history.back().residual);
    CHECK(ra.method == "gauss-seidel");
    CHECK(rb.method == "sor(1)");
}

TEST_CASE("iterates are linear in the source") {
    const Grid g = Grid::uniform(2, 16, BoundaryKind::Dirichlet);
    const auto zero = [](const Point&) { return 0.0; };
    const auto f1 = [](const Point& x) { return std::sin(5 * x[0]) * x[1]; };
    const auto f2 = [](const Point& x) { return std::exp(-x[0]) - x[1]; };
    const Problem p1 = make(five_point(), g, zero, f1);
    const Problem p2 = make(five_point(), g, zero, f2);
    const Problem p12 = make(five_point(), g, zero, [&](const Point& x) { return f1(x) + f2(x); });
    CjmOptions o;
    o.cycle_size = 32;
    o.max_cycles = 2;
    o.tolerance = 0.0;
    Field u1 = p1.make_field(), u2 = p2.make_field(), u12 = p12.make_field();
    cjm_solve(p1, u1, o);
    cjm_solve(p2, u2, o);
    cjm_solve(p12, u12, o);
    double worst = 0.0, scale = 0.0;
    u12.for_each_interior([&](int i, int j, int) {
        worst = std::max(worst, std::abs(u12(i, j) - (u1(i, j) + u2(i, j))));
        scale = std::max(scale, std::abs(u12(i, j)));
    });
    CHECK(worst <= 1e-12 * scale);
}

TEST_CASE("symmetric problems keep symmetric iterates") {
    const int n = 18;
    const Grid g = Grid::uniform(2, n, BoundaryKind::Dirichlet);
    const auto bc = [](const Point& x) { return std::cos(x[0] - 0.5) * std::cos(x[1] - 0.5); };
    const Problem p = make(nine_point(), g, bc, [](const Point& x) {
        const double r2 = (x[0] - 0.5) * (x[0] - 0.5) + (x[1] - 0.5) * (x[1] - 0.5);
        return r2 < 0.1 ? -3.0 : 0.0;
    });
    auto check = [&](const Field& u) {
        double worst = 0.0;
        u.for_each_interior([&](int i, int j, int) {
            worst = std::max(worst, std::abs(u(i, j) - u(n - i, j)));
            worst = std::max(worst, std::abs(u(i, j) - u(j, i)));
        });
        return worst;
    };
    Field a = p.make_field();
    CjmOptions o;
    o.cycle_size = 40;
    o.max_cycles = 2;
    o.tolerance = 0.0;
    cjm_solve(p, a, o);
    CHECK(check(a) <= 1e-13);
    Field b = p.make_field();
    classic_solve(p, b, {ClassicMethod::Jacobi, 1.0, 0.0, 50, 1});
    CHECK(check(b) <= 1e-13);
}

TEST_CASE("default ordering stays finite on the 256 square neumann problem") {
    const Problem p = make(five_point(), Grid::uniform(2, 256, BoundaryKind::Neumann), {}, {});
    Field u = initial_guess(p, 1);
    CjmOptions o;
    o.cycle_size = 4096;
    o.max_cycles = 1;
    o.tolerance = 0.0;
    const auto r = cjm_solve(p, u, o);
    CHECK(u.interior_finite());
    double peak = 0.0;
    for (const auto& h : r.history) peak = std::max(peak, h.residual);
    CHECK(peak <= 1e3 * r.history.front().residual);
}

TEST_CASE("orderings agree at the end of a cycle") {
    // the weights commute, so only round-off separates the end-of-cycle iterates
    const Problem p = make(five_point(), Grid::uniform(2, 16, BoundaryKind::Dirichlet), smooth,
                           [](const Point& x) { return x[0] * x[0]; });
    auto run = [&](int m, const char* ord) {
        Field u = p.make_field();
        CjmOptions o;
        o.cycle_size = m;
        o.max_cycles = 1;
        o.tolerance = 0.0;
        o.ordering = ord;
        cjm_solve(p, u, o);
        return u;
    };
    for (int m : {8, 16, 33, 64}) {
        const Field a = run(m, "default");
        const Field b = run(m, "interleaved");
        CHECK(inf_norm_diff(a, b) <= 1e-8 * inf_norm_diff(a, p.make_field()));
    }
    const Field small = run(8, "natural");
    CHECK(inf_norm_diff(small, run(8, "default")) <= 1e-8 * inf_norm_diff(small, p.make_field()));
    // without reordering the large weights run together and round-off explodes
    CHECK_THROWS_AS(run(64, "natural"), DivergenceError);
}

TEST_CASE("reports carry the predicted bound and honour the stride") {
    const Problem p = make(five_point(), Grid::uniform(2, 32, BoundaryKind::Dirichlet), smooth, {});
    Field u = p.make_field();
    CjmOptions o;
    o.sigma = 1e-4;
    o.stride = 7;
    o.tolerance = 1e-9;
    const auto r = cjm_solve(p, u, o);
    const auto b = kappa_bounds(p.stencil, p.grid);
    CHECK(r.cycle_size == min_cycle_size(1e-4, b));
    CHECK(r.predicted_bound == Approx(amplification_bound(r.cycle_size, b).bound));
    CHECK(r.converged);
    for (const auto& h : r.history)
        CHECK((h.iteration % 7 == 0 || h.iteration % r.cycle_size == 0 || h.iteration == r.iterations));
    CHECK(r.achieved_reduction == Approx(r.history.back().residual / r.history.front().residual));
}

TEST_CASE("divergence is reported with iteration and factor") {
    const Problem p = make(five_point(), Grid::uniform(2, 16, BoundaryKind::Dirichlet), smooth, {});
    WeightSchedule bad;
    bad.weights = {40.0};
    Field u = p.make_field();
    try {
        run_schedule(p, u, bad, 1e-10, 1000);
        FAIL("expected divergence");
    } catch (const DivergenceError& e) {
        CHECK(e.iteration() > 1);
        CHECK(e.omega() == 40.0);
    }
    Problem nan = p;
    nan.rhs(3, 3) = NAN;
    Field v = nan.make_field();
    CHECK_THROWS_AS(classic_solve(nan, v), DivergenceError);
}

TEST_CASE("solver argument errors") {
    const Problem neu = make(five_point(), Grid::uniform(2, 16, BoundaryKind::Neumann), {}, {});
    Field u = neu.make_field();
    CjmOptions o;
    o.bounds = SpectralBounds{0.0, 2.0};
    CHECK_THROWS_AS(cjm_solve(neu, u, o), DomainError);
    CHECK_THROWS_AS(classic_solve(neu, u, {ClassicMethod::SOR, 2.0}), DomainError);
    CHECK_THROWS_AS(weighted_jacobi_sweep(u, neu, -1.0), DomainError);
    const Problem missing = make(five_point(), Grid::uniform(2, 16, BoundaryKind::Dirichlet), {}, {});
    Field v = missing.make_field();
    CHECK_THROWS_AS(classic_solve(missing, v), ConfigError);
}

TEST_CASE("young's factor") {
    CHECK(sor_optimal_omega(2) == 1.0);
    CHECK(sor_optimal_omega(128) == Approx(1.95209).epsilon(1e-5));
    CHECK(sor_optimal_omega(1 << 20) == Approx(2.0).epsilon(1e-5));
    CHECK_THROWS_AS(sor_optimal_omega(1), DomainError);
}

TEST_CASE("neumann initial guess is seeded and mean free") {
    const Problem p = make(five_point(), Grid::uniform(2, 16, BoundaryKind::Neumann), {}, {});
    const Field a = initial_guess(p, 9), b = initial_guess(p, 9), c = initial_guess(p, 10);
    CHECK(inf_norm_diff(a, b) == 0.0);
    CHECK(inf_norm_diff(a, c) > 0.0);
    CHECK(std::abs(a.interior_mean()) < 1e-15);
    const Problem d = make(five_point(), Grid::uniform(2, 16, BoundaryKind::Dirichlet), smooth, {});
    CHECK(initial_guess(d, 9).interior_values() == std::vector<double>(225, 0.0));
}

TEST_CASE("residual csv") {
    SolverReport r;
    r.history = {{1, 0.5}, {2, 0.1}};
    std::ostringstream os;
    write_residual_csv(os, r);
    CHECK(os.str() == "iteration,residual\n1,0.5\n2,0.10000000000000001\n");
}
