#pragma once

#include <cmath>
#include <numbers>
#include <string>

#include "cjm/config.hpp"
#include "cjm/error.hpp"
#include "cjm/grid.hpp"
#include "cjm/solver.hpp"
#include "cjm/stencil.hpp"

namespace cjm {

namespace detail {

inline StencilSpec pick_stencil(const ExperimentConfig& c, int dims) {
    StencilSpec s;
    if (c.stencil == "auto")
        s = dims == 3 ? seven_point() : (c.problem == "poisson2d-exp" ? nine_point() : five_point());
    else if (c.stencil == "5")
        s = five_point();
    else if (c.stencil == "7")
        s = seven_point();
    else if (c.stencil == "9")
        s = nine_point();
    else if (c.stencil == "17")
        s = seventeen_point();
    else if (c.stencil == "combo")
        s = general_combo(c.combo_a, c.combo_b, c.combo_reach);
    else
        throw ConfigError("unknown stencil '" + c.stencil + "'");
    if (s.dims() != dims)
        throw ConfigError(to_string(s) + " stencil cannot discretise the " + std::to_string(dims) + "D problem '" +
                          c.problem + "'");
    return s;
}

// The compact 2D combination with a/b = 2/3 is fourth order when the source
// is replaced by f + (h^2/12) lap f.
inline bool wants_source_correction(const StencilSpec& s) {
    return s.dims() == 2 && !s.wide() && s.family != StencilFamily::FivePoint2D && 3 * s.a == 2 * s.b;
}

inline void fill_source(Field& rhs, const std::function<double(const Point&)>& f, bool correct) {
    const Grid& g = rhs.grid();
    const double h = g.spacing(0);
    rhs.for_each_interior([&](int i, int j, int k) {
        const Point p = rhs.position(i, j, k);
        double v = f(p);
        if (correct) {
            // five-point Laplacian of the sampled source
            double lap = -2.0 * g.dims() * v;
            for (int a = 0; a < g.dims(); ++a) {
                Point q = p;
                q[static_cast<std::size_t>(a)] = p[static_cast<std::size_t>(a)] + h;
                lap += f(q);
                q[static_cast<std::size_t>(a)] = p[static_cast<std::size_t>(a)] - h;
                lap += f(q);
            }
            v += lap / 12.0;
        }
        rhs(i, j, k) = v;
    });
}

}  // namespace detail

/// Potential of a uniformly charged sphere of charge q and radius r0 centred
/// at the origin, for the source convention  lap phi = -4 pi rho.
inline double sphere_potential(const Point& p, double q, double r0) {
    const double r = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
    if (r >= r0) return q / r;
    return q * (3.0 * r0 * r0 - r * r) / (2.0 * r0 * r0 * r0);
}

/// Model problem named by `c.problem` at resolution `c.n`.
///
/// laplace2d-neumann   unit square, Neumann on all faces, zero source.
/// poisson3d-sphere    [-1,1]^3 (or the octant [0,1]^3 with mirror faces at
///                     the origin), Dirichlet data from the exact potential.
/// poisson2d-exp       unit square, u = -exp(xy), Dirichlet data from u.
inline Problem build_problem(const ExperimentConfig& c) {
    if (c.n < 4) throw ConfigError("n must be at least 4");
    Problem p;
    p.name = c.problem;
    if (c.problem == "laplace2d-neumann") {
        p.grid = Grid::uniform(2, c.n, BoundaryKind::Neumann);
        p.stencil = detail::pick_stencil(c, 2);
        p.rhs = p.make_field();
        return p;
    }
    if (c.problem == "poisson3d-sphere") {
        if (!(c.radius > 0.0)) throw ConfigError("sphere radius must be positive");
        const double q = c.charge, r0 = c.radius;
        if (c.symmetry == "octant") {
            const Axis ax{c.n, 0.0, 1.0, BoundaryKind::Neumann, BoundaryKind::Dirichlet};
            p.grid = Grid({ax, ax, ax});
        } else {
            p.grid = Grid::uniform(3, c.n, BoundaryKind::Dirichlet, 2.0, -1.0);
        }
        p.stencil = detail::pick_stencil(c, 3);
        p.rhs = p.make_field();
        const double inside = -3.0 * q / (r0 * r0 * r0);
        p.rhs.assign([&](const Point& x) { return x[0] * x[0] + x[1] * x[1] + x[2] * x[2] < r0 * r0 ? inside : 0.0; });
        p.boundary = [q, r0](const Point& x) { return sphere_potential(x, q, r0); };
        p.analytic = p.boundary;
        return p;
    }
    if (c.problem == "poisson2d-exp") {
        p.grid = Grid::uniform(2, c.n, BoundaryKind::Dirichlet);
        p.stencil = detail::pick_stencil(c, 2);
        p.rhs = p.make_field();
        const auto f = [](const Point& x) { return -(x[0] * x[0] + x[1] * x[1]) * std::exp(x[0] * x[1]); };
        detail::fill_source(p.rhs, f, c.rhs_correction && detail::wants_source_correction(p.stencil));
        p.boundary = [](const Point& x) { return -std::exp(x[0] * x[1]); };
        p.analytic = p.boundary;
        return p;
    }
    throw ConfigError("unknown problem '" + c.problem + "'");
}

/// Spectral bounds for a run: explicit values, the problem grid, or the
/// full all-Dirichlet domain the problem was cut from (octant runs use the
/// schedule of the full 2N grid).
inline SpectralBounds experiment_bounds(const ExperimentConfig& c, const Problem& p) {
    if (c.kappa_min.has_value() != c.kappa_max.has_value())
        throw ConfigError("kappa_min and kappa_max must be given together");
    if (c.kappa_min) {
        SpectralBounds b{*c.kappa_min, *c.kappa_max};
        try {
            b.validate();
        } catch (const DomainError& e) {
            throw ConfigError(e.what());
        }
        return b;
    }
    if (c.kappa_grid == "full-domain") {
        std::vector<Axis> axes;
        for (int a = 0; a < p.grid.dims(); ++a) {
            const Axis& ax = p.grid.axis(a);
            if (ax.low == ax.high)
                axes.push_back(ax);
            else
                axes.push_back({2 * ax.cells, 0.0, 2 * ax.extent, BoundaryKind::Dirichlet, BoundaryKind::Dirichlet});
        }
        return kappa_bounds(p.stencil, Grid(axes));
    }
    return kappa_bounds(p.stencil, p.grid);
}

/// Largest |u - u_exact| over the interior.
inline double max_error(const Field& u, const std::function<double(const Point&)>& exact) {
    double m = 0.0;
    u.for_each_interior([&](int i, int j, int k) { m = std::max(m, std::abs(u(i, j, k) - exact(u.position(i, j, k)))); });
    return m;
}

}  // namespace cjm
