#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "cjm/error.hpp"

namespace cjm {

enum class BoundaryKind { Dirichlet, Neumann };
enum class Side { Low, High };

using Point = std::array<double, 3>;

/// Boundary data for Dirichlet faces, evaluated at exact ghost coordinates.
using BoundaryFunction = std::function<double(const Point&)>;

/// One Cartesian direction of a grid.
///
/// `cells` is the number of intervals N. An axis whose two faces are
/// Dirichlet is vertex-centered: unknowns sit at origin + i*h for
/// i = 1..N-1 and the boundary vertices live in the first halo layer.
/// An axis with at least one Neumann face is cell-centered: unknowns sit
/// at origin + (i - 1/2)*h for i = 1..N and faces lie half a cell outside.
struct Axis {
    int cells = 0;
    double origin = 0.0;
    double extent = 1.0;
    BoundaryKind low = BoundaryKind::Dirichlet;
    BoundaryKind high = BoundaryKind::Dirichlet;

    friend bool operator==(const Axis&, const Axis&) = default;
};

class Grid {
   public:
    Grid() = default;

    explicit Grid(std::vector<Axis> axes) : axes_(std::move(axes)) {
        if (axes_.size() != 2 && axes_.size() != 3)
            throw ConfigError("grid must have 2 or 3 dimensions, got " + std::to_string(axes_.size()));
        for (const Axis& ax : axes_) {
            if (ax.cells < 4) throw ConfigError("grid needs at least 4 cells per axis, got " + std::to_string(ax.cells));
            if (!(ax.extent > 0.0) || !std::isfinite(ax.extent)) throw ConfigError("grid extent must be positive");
        }
    }

    /// Same size, extent and boundary kind on every axis.
    static Grid uniform(int dims, int cells, BoundaryKind kind, double extent = 1.0, double origin = 0.0) {
        return Grid(std::vector<Axis>(static_cast<std::size_t>(dims), Axis{cells, origin, extent, kind, kind}));
    }

    int dims() const { return static_cast<int>(axes_.size()); }
    const Axis& axis(int a) const { return axes_[static_cast<std::size_t>(a)]; }
    int cells(int a) const { return axis(a).cells; }
    double spacing(int a) const { return axis(a).extent / axis(a).cells; }

    bool cell_centered(int a) const {
        return axis(a).low == BoundaryKind::Neumann || axis(a).high == BoundaryKind::Neumann;
    }

    /// Number of unknowns along axis `a`.
    int interior(int a) const { return cell_centered(a) ? cells(a) : cells(a) - 1; }

    /// Physical coordinate of (possibly ghost) index `i` along axis `a`.
    double coordinate(int a, int i) const {
        const double offset = cell_centered(a) ? i - 0.5 : static_cast<double>(i);
        return axis(a).origin + offset * spacing(a);
    }

    BoundaryKind boundary(int a, Side s) const { return s == Side::Low ? axis(a).low : axis(a).high; }

    bool pure_neumann() const {
        return std::all_of(axes_.begin(), axes_.end(), [](const Axis& ax) {
            return ax.low == BoundaryKind::Neumann && ax.high == BoundaryKind::Neumann;
        });
    }

    bool isotropic(double rel = 1e-14) const {
        for (int a = 1; a < dims(); ++a)
            if (std::abs(spacing(a) - spacing(0)) > rel * spacing(0)) return false;
        return true;
    }

    std::size_t interior_size() const {
        std::size_t n = 1;
        for (int a = 0; a < dims(); ++a) n *= static_cast<std::size_t>(interior(a));
        return n;
    }

    friend bool operator==(const Grid&, const Grid&) = default;

   private:
    std::vector<Axis> axes_;
};

/// Scalar unknowns on a grid plus a halo of `ghost` layers.
///
/// Storage is row-major with x fastest; interior indices run 1..interior(a)
/// so stencil kernels never branch on boundaries. 2D fields use k = 1.
class Field {
   public:
    Field() = default;

    Field(const Grid& grid, int ghost, double value = 0.0) : grid_(grid), ghost_(ghost) {
        if (ghost < 1 || ghost > 2) throw ConfigError("ghost width must be 1 or 2");
        for (int a = 0; a < 3; ++a) {
            if (a < grid.dims()) {
                lo_[a] = 1 - ghost;
                ext_[a] = grid.interior(a) + 2 * ghost;
            } else {
                lo_[a] = 1;
                ext_[a] = 1;
            }
        }
        stride_ = {1, ext_[0], static_cast<std::ptrdiff_t>(ext_[0]) * ext_[1]};
        data_.assign(static_cast<std::size_t>(ext_[0]) * ext_[1] * ext_[2], value);
    }

    const Grid& grid() const { return grid_; }
    int dims() const { return grid_.dims(); }
    int ghost_width() const { return ghost_; }

    /// First and last index (halo included) along axis a.
    int lo(int a) const { return lo_[a]; }
    int hi(int a) const { return lo_[a] + ext_[a] - 1; }
    /// Last interior index along axis a (1 for the unused z axis of 2D fields).
    int last(int a) const { return a < dims() ? grid_.interior(a) : 1; }

    std::ptrdiff_t stride(int a) const { return stride_[a]; }

    std::ptrdiff_t index(int i, int j, int k = 1) const {
        return (i - lo_[0]) + stride_[1] * (j - lo_[1]) + stride_[2] * (k - lo_[2]);
    }

    double& operator()(int i, int j, int k = 1) { return data_[static_cast<std::size_t>(index(i, j, k))]; }
    double operator()(int i, int j, int k = 1) const { return data_[static_cast<std::size_t>(index(i, j, k))]; }

    std::span<double> raw() { return data_; }
    std::span<const double> raw() const { return data_; }

    Point position(int i, int j, int k = 1) const {
        Point p{0.0, 0.0, 0.0};
        const int idx[3] = {i, j, k};
        for (int a = 0; a < dims(); ++a) p[static_cast<std::size_t>(a)] = grid_.coordinate(a, idx[a]);
        return p;
    }

    template <class F>
    void for_each_interior(F&& f) const {
        for (int k = 1; k <= last(2); ++k)
            for (int j = 1; j <= last(1); ++j)
                for (int i = 1; i <= last(0); ++i) f(i, j, k);
    }

    /// Sets every interior value from a function of position.
    void assign(const std::function<double(const Point&)>& fn) {
        for_each_interior([&](int i, int j, int k) { (*this)(i, j, k) = fn(position(i, j, k)); });
    }

    void fill_interior(double value) {
        for_each_interior([&](int i, int j, int k) { (*this)(i, j, k) = value; });
    }

    double interior_mean() const {
        double sum = 0.0;
        for_each_interior([&](int i, int j, int k) { sum += (*this)(i, j, k); });
        return sum / static_cast<double>(grid_.interior_size());
    }

    void remove_mean() {
        const double m = interior_mean();
        for_each_interior([&](int i, int j, int k) { (*this)(i, j, k) -= m; });
    }

    bool interior_finite() const {
        bool ok = true;
        for_each_interior([&](int i, int j, int k) { ok = ok && std::isfinite((*this)(i, j, k)); });
        return ok;
    }

    /// Interior values in lexicographic order (x fastest).
    std::vector<double> interior_values() const {
        std::vector<double> out;
        out.reserve(grid_.interior_size());
        for_each_interior([&](int i, int j, int k) { out.push_back((*this)(i, j, k)); });
        return out;
    }

   private:
    Grid grid_;
    int ghost_ = 1;
    std::array<int, 3> lo_{1, 1, 1};
    std::array<int, 3> ext_{1, 1, 1};
    std::array<std::ptrdiff_t, 3> stride_{1, 1, 1};
    std::vector<double> data_;
};

namespace detail {

// Mirror image of ghost index g across the face on side s (cell-centered axis).
inline int mirror_index(int g, int n, Side s) { return s == Side::Low ? 1 - g : 2 * n + 1 - g; }

}  // namespace detail

namespace detail {

// Visits every index of the ghost plane `ghost` on axis `a`, spanning the
// full extended range of the other axes.
template <class F>
void for_each_in_plane(const Field& u, int a, int ghost, F&& f) {
    const int b = a == 0 ? 1 : 0;
    const int c = a == 2 ? 1 : 2;
    int idx[3];
    idx[a] = ghost;
    for (idx[c] = u.lo(c); idx[c] <= u.hi(c); ++idx[c])
        for (idx[b] = u.lo(b); idx[b] <= u.hi(b); ++idx[b]) f(idx[0], idx[1], idx[2]);
}

template <class Dirichlet>
void fill_ghosts_with(Field& u, Dirichlet&& dirichlet) {
    const Grid& grid = u.grid();
    const int g = u.ghost_width();
    for (int a = 0; a < grid.dims(); ++a) {
        const int n = grid.interior(a);
        for (Side side : {Side::Low, Side::High}) {
            const BoundaryKind kind = grid.boundary(a, side);
            for (int layer = 0; layer < g; ++layer) {
                const int ghost = side == Side::Low ? -layer : n + 1 + layer;
                const int src = mirror_index(ghost, n, side);
                for_each_in_plane(u, a, ghost, [&](int i, int j, int k) {
                    if (kind == BoundaryKind::Neumann) {
                        int from[3] = {i, j, k};
                        from[a] = src;
                        u(i, j, k) = u(from[0], from[1], from[2]);
                    } else {
                        u(i, j, k) = dirichlet(i, j, k);
                    }
                });
            }
        }
    }
}

inline bool has_dirichlet_face(const Grid& grid) {
    for (int a = 0; a < grid.dims(); ++a)
        if (grid.axis(a).low == BoundaryKind::Dirichlet || grid.axis(a).high == BoundaryKind::Dirichlet)
            return true;
    return false;
}

}  // namespace detail

/// Populates the halo of `u` from its interior.
///
/// Axes are processed in order x, y, z and each pass covers the full
/// extended range of the other axes, so corner ghosts end up consistent
/// with the last axis that touches them. Neumann faces mirror the interior
/// across the face; Dirichlet faces sample `boundary` at the ghost position.
inline void fill_ghosts(Field& u, const BoundaryFunction& boundary = {}) {
    if (!boundary && detail::has_dirichlet_face(u.grid()))
        throw ConfigError("grid has a Dirichlet face but no boundary function was given");
    detail::fill_ghosts_with(u, [&](int i, int j, int k) { return boundary(u.position(i, j, k)); });
}

/// Halo fill that copies Dirichlet ghosts from `frozen`, a field on the same
/// grid whose halo was filled once from the boundary function. Used by the
/// iteration drivers so the boundary function is not re-evaluated per sweep.
inline void fill_ghosts(Field& u, const Field& frozen) {
    if (!(u.grid() == frozen.grid()) || u.ghost_width() != frozen.ghost_width())
        throw UsageError("frozen boundary field does not match the target field layout");
    detail::fill_ghosts_with(u, [&](int i, int j, int k) { return frozen(i, j, k); });
}

/// As above, additionally rejecting halos narrower than `reach`.
inline void fill_ghosts(Field& u, const BoundaryFunction& boundary, int reach) {
    if (u.ghost_width() < reach)
        throw ConfigError("ghost width " + std::to_string(u.ghost_width()) + " is smaller than stencil reach " +
                          std::to_string(reach));
    fill_ghosts(u, boundary);
}

inline void require_same_grid(const Field& u, const Field& v) {
    if (!(u.grid() == v.grid())) throw UsageError("fields live on different grids");
}

/// max over interior points of |u - v|.
inline double inf_norm_diff(const Field& u, const Field& v) {
    require_same_grid(u, v);
    double m = 0.0;
    u.for_each_interior([&](int i, int j, int k) { m = std::max(m, std::abs(u(i, j, k) - v(i, j, k))); });
    return m;
}

/// Same reduction split over `workers` threads by outermost index.
/// The max is exact in floating point, so the result does not depend on
/// the partition.
inline double inf_norm_diff(const Field& u, const Field& v, unsigned workers) {
    require_same_grid(u, v);
    const int outer = u.dims() == 3 ? 2 : 1;
    const int rows = u.last(outer);
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(rows)));
    std::vector<double> partial(workers, 0.0);
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            const int begin = 1 + static_cast<int>(w) * rows / static_cast<int>(workers);
            const int end = 1 + static_cast<int>(w + 1) * rows / static_cast<int>(workers);
            double m = 0.0;
            u.for_each_interior([&](int i, int j, int k) {
                const int o = outer == 2 ? k : j;
                if (o >= begin && o < end) m = std::max(m, std::abs(u(i, j, k) - v(i, j, k)));
            });
            partial[w] = m;
        });
    }
    for (auto& t : pool) t.join();
    return *std::max_element(partial.begin(), partial.end());
}

}  // namespace cjm
