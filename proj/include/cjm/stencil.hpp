#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "cjm/error.hpp"
#include "cjm/grid.hpp"

namespace cjm {

enum class StencilFamily { FivePoint2D, SevenPoint3D, NinePoint2D, SeventeenPoint2D, GeneralCombo };

/// A discrete Laplacian.
///
/// The 2D compact family is the convex combination (a/b) S_+ + (1 - a/b) S_x
/// of the standard and rotated 3x3 stencils (reach 1). The wide family uses
/// the fourth-order 5-point-per-axis versions of both (reach 2), giving 17
/// points. GeneralCombo selects between the two by `reach`.
struct StencilSpec {
    StencilFamily family = StencilFamily::FivePoint2D;
    int a = 1;
    int b = 1;
    int reach = 1;

    int dims() const { return family == StencilFamily::SevenPoint3D ? 3 : 2; }
    bool wide() const { return reach == 2; }

    friend bool operator==(const StencilSpec&, const StencilSpec&) = default;
};

inline StencilSpec five_point() { return {StencilFamily::FivePoint2D, 1, 1, 1}; }
inline StencilSpec seven_point() { return {StencilFamily::SevenPoint3D, 1, 1, 1}; }
inline StencilSpec nine_point() { return {StencilFamily::NinePoint2D, 2, 3, 1}; }
inline StencilSpec seventeen_point() { return {StencilFamily::SeventeenPoint2D, 1, 2, 2}; }

inline StencilSpec general_combo(int a, int b, int reach) {
    if (a < 0 || b < 1 || a > b) throw ConfigError("combo stencil needs 0 <= a <= b and b >= 1");
    if (reach != 1 && reach != 2) throw ConfigError("combo stencil reach must be 1 or 2");
    return {StencilFamily::GeneralCombo, a, b, reach};
}

inline std::string to_string(const StencilSpec& s) {
    switch (s.family) {
        case StencilFamily::FivePoint2D: return "5-point";
        case StencilFamily::SevenPoint3D: return "7-point";
        case StencilFamily::NinePoint2D: return "9-point";
        case StencilFamily::SeventeenPoint2D: return "17-point";
        case StencilFamily::GeneralCombo:
            return "combo(a=" + std::to_string(s.a) + ",b=" + std::to_string(s.b) +
                   ",reach=" + std::to_string(s.reach) + ")";
    }
    return "?";
}

/// 0 <= kappa_min <= kappa_max, the admissible range of the von Neumann
/// symbol of the diagonally scaled operator.
struct SpectralBounds {
    double kappa_min = 0.0;
    double kappa_max = 0.0;

    void validate() const {
        if (!std::isfinite(kappa_min) || !std::isfinite(kappa_max) || kappa_min < 0.0 || kappa_max < kappa_min ||
            kappa_max <= 0.0)
            throw DomainError("spectral bounds must satisfy 0 <= kappa_min <= kappa_max, kappa_max > 0");
    }

    friend bool operator==(const SpectralBounds&, const SpectralBounds&) = default;
};

namespace kernel {

// Each kernel evaluates the discrete Laplacian at the point `p` points to.

struct Five {
    double inv_h2;
    std::ptrdiff_t sy;
    double operator()(const double* p) const { return ((p[-1] + p[1]) + (p[-sy] + p[sy]) - 4.0 * p[0]) * inv_h2; }
};

struct Seven {
    double inv_h2;
    std::ptrdiff_t sy, sz;
    double operator()(const double* p) const {
        return (((p[-1] + p[1]) + (p[-sy] + p[sy])) + (p[-sz] + p[sz]) - 6.0 * p[0]) * inv_h2;
    }
};

struct Compact {
    double plus, cross, center, scale;
    std::ptrdiff_t sy;
    double operator()(const double* p) const {
        const double s_plus = (p[-1] + p[1]) + (p[-sy] + p[sy]);
        const double s_cross = (p[-sy - 1] + p[sy + 1]) + (p[sy - 1] + p[-sy + 1]);
        return (plus * s_plus + cross * s_cross - center * p[0]) * scale;
    }
};

struct Wide {
    double a, bma, center, scale;
    std::ptrdiff_t sy;
    double operator()(const double* p) const {
        const std::ptrdiff_t s2 = 2 * sy;
        const double plus1 = (p[-1] + p[1]) + (p[-sy] + p[sy]);
        const double plus2 = (p[-2] + p[2]) + (p[-s2] + p[s2]);
        const double cross1 = (p[-sy - 1] + p[sy + 1]) + (p[sy - 1] + p[-sy + 1]);
        const double cross2 = (p[-s2 - 2] + p[s2 + 2]) + (p[s2 - 2] + p[-s2 + 2]);
        return (a * (32.0 * plus1 - 2.0 * plus2) + bma * (16.0 * cross1 - cross2) - center * p[0]) * scale;
    }
};

using Any = std::variant<Five, Seven, Compact, Wide>;

}  // namespace kernel

namespace detail {

inline bool compact_family(const StencilSpec& s) {
    return s.family == StencilFamily::FivePoint2D || s.family == StencilFamily::NinePoint2D ||
           (s.family == StencilFamily::GeneralCombo && s.reach == 1);
}

inline void check_dims(const StencilSpec& spec, int dims) {
    if (spec.dims() != dims)
        throw ConfigError(to_string(spec) + " stencil needs a " + std::to_string(spec.dims()) + "D grid, got " +
                          std::to_string(dims) + "D");
}

}  // namespace detail

/// Coefficient of u_ij in the discrete Laplacian.
inline double diagonal_coeff(const StencilSpec& spec, double h) {
    const double h2 = h * h;
    switch (spec.family) {
        case StencilFamily::FivePoint2D: return -4.0 / h2;
        case StencilFamily::SevenPoint3D: return -6.0 / h2;
        default: break;
    }
    const double a = spec.a, b = spec.b;
    if (detail::compact_family(spec)) return -4.0 * (a + b) / (2.0 * b * h2);
    return -60.0 * (a + b) / (24.0 * b * h2);
}

/// Builds the sweep kernel for `spec` over fields laid out like `u`.
inline kernel::Any make_kernel(const StencilSpec& spec, const Field& u) {
    detail::check_dims(spec, u.dims());
    if (u.ghost_width() < spec.reach)
        throw ConfigError("halo of width " + std::to_string(u.ghost_width()) + " cannot feed " + to_string(spec) +
                          " (reach " + std::to_string(spec.reach) + ")");
    if (!u.grid().isotropic()) throw ConfigError("stencils require equal spacing on every axis");
    const double h = u.grid().spacing(0);
    const double h2 = h * h;
    const std::ptrdiff_t sy = u.stride(1);
    switch (spec.family) {
        case StencilFamily::FivePoint2D: return kernel::Five{1.0 / h2, sy};
        case StencilFamily::SevenPoint3D: return kernel::Seven{1.0 / h2, sy, u.stride(2)};
        default: break;
    }
    const double a = spec.a, b = spec.b;
    if (detail::compact_family(spec)) return kernel::Compact{2.0 * a, b - a, 4.0 * (a + b), 1.0 / (2.0 * b * h2), sy};
    return kernel::Wide{a, b - a, 60.0 * (a + b), 1.0 / (24.0 * b * h2), sy};
}

/// out = discrete Laplacian of u on the interior. Ghosts of u must be filled.
inline void apply_laplacian(const StencilSpec& spec, const Field& u, Field& out) {
    require_same_grid(u, out);
    std::visit(
        [&](const auto& lap) {
            const double* src = u.raw().data();
            double* dst = out.raw().data();
            for (int k = 1; k <= u.last(2); ++k)
                for (int j = 1; j <= u.last(1); ++j) {
                    const std::ptrdiff_t row = u.index(1, j, k);
                    const std::ptrdiff_t orow = out.index(1, j, k);
                    for (int i = 0; i < u.last(0); ++i) dst[orow + i] = lap(src + row + i);
                }
        },
        make_kernel(spec, u));
}

inline Field apply_laplacian(const StencilSpec& spec, const Field& u) {
    Field out(u.grid(), u.ghost_width());
    apply_laplacian(spec, u, out);
    return out;
}

/// kappa such that one weighted-Jacobi step multiplies the Fourier mode with
/// phases theta_i = k_i h_i by 1 - omega * kappa.
inline double kappa_symbol(const StencilSpec& spec, std::span<const double> phase) {
    if (static_cast<int>(phase.size()) != spec.dims())
        throw UsageError("phase vector length does not match stencil dimension");
    auto s2 = [](double t) {
        const double s = std::sin(0.5 * t);
        return s * s;
    };
    if (spec.family == StencilFamily::FivePoint2D) return s2(phase[0]) + s2(phase[1]);
    if (spec.family == StencilFamily::SevenPoint3D) return (2.0 / 3.0) * (s2(phase[0]) + s2(phase[1]) + s2(phase[2]));
    const double a = spec.a, b = spec.b;
    const double tx = phase[0], ty = phase[1];
    if (detail::compact_family(spec))
        return (2.0 * a * (s2(tx) + s2(ty)) + (b - a) * (1.0 - std::cos(tx) * std::cos(ty))) / (a + b);
    const double sx = std::sin(tx), sy = std::sin(ty);
    const double bracket = -2.0 * a * (sx * sx + sy * sy) + 32.0 * a * (s2(tx) + s2(ty)) -
                           (b - a) * ((1.0 - std::cos(2.0 * tx) * std::cos(2.0 * ty)) -
                                      16.0 * (1.0 - std::cos(tx) * std::cos(ty)));
    return bracket / (15.0 * (a + b));
}

/// Symbol at wavevector k on spacings h.
inline double kappa_symbol(const StencilSpec& spec, std::span<const double> k, std::span<const double> h) {
    if (k.size() != h.size()) throw UsageError("wavevector and spacing lengths differ");
    std::vector<double> phase(k.size());
    for (std::size_t i = 0; i < k.size(); ++i) phase[i] = k[i] * h[i];
    return kappa_symbol(spec, phase);
}

/// Candidate phases for the extreme admissible modes along one axis.
///
/// Two Neumann faces admit the constant (phase 0) and the half wave pi/N;
/// two Dirichlet faces admit only pi/N; a Neumann/Dirichlet pair admits
/// the quarter wave pi/(2N). The last entry is the highest admissible
/// phase, which matters when the symbol also vanishes at pi (a = 0 combos).
inline std::vector<double> extreme_phases(const Grid& grid, int a) {
    const double n = grid.cells(a);
    const double pi = std::numbers::pi;
    const bool lo_n = grid.axis(a).low == BoundaryKind::Neumann;
    const bool hi_n = grid.axis(a).high == BoundaryKind::Neumann;
    if (lo_n && hi_n) return {0.0, pi / n, pi * (n - 1) / n};
    if (lo_n || hi_n) return {pi / (2.0 * n), pi * (2.0 * n - 1) / (2.0 * n)};
    return {pi / n, pi * (n - 1) / n};
}

namespace detail {

// Supremum of the symbol over the phase box [0, pi]^d. Every family is a
// polynomial of degree <= 2 in each cos(theta_i), so the maximum along one
// axis is at c = +-1 or at the parabola vertex. Coordinate ascent from the
// best point of a coarse lattice.
inline double symbol_supremum(const StencilSpec& spec) {
    const int d = spec.dims();
    const int coarse = d == 2 ? 64 : 16;
    std::vector<double> phase(static_cast<std::size_t>(d), 0.0), best = phase;
    double top = -INFINITY;
    std::vector<int> idx(static_cast<std::size_t>(d), 0);
    for (;;) {
        for (int a = 0; a < d; ++a) phase[a] = std::numbers::pi * idx[a] / coarse;
        const double v = kappa_symbol(spec, phase);
        if (v > top) {
            top = v;
            best = phase;
        }
        int a = 0;
        while (a < d && ++idx[a] > coarse) idx[a++] = 0;
        if (a == d) break;
    }
    phase = best;
    for (int sweep = 0; sweep < 50; ++sweep) {
        for (int a = 0; a < d; ++a) {
            auto at = [&](double c) {
                phase[a] = std::acos(std::clamp(c, -1.0, 1.0));
                return kappa_symbol(spec, phase);
            };
            const double fm = at(-1.0), f0 = at(0.0), fp = at(1.0);
            const double q = 0.5 * (fp + fm) - f0, l = 0.5 * (fp - fm);
            double c = fm >= fp ? -1.0 : 1.0;
            double v = std::max(fm, fp);
            if (q < 0.0 && std::abs(l / (2.0 * q)) < 1.0) {
                const double cv = -l / (2.0 * q);
                const double fv = at(cv);
                if (fv > v) {
                    v = fv;
                    c = cv;
                }
            }
            at(c);
            top = std::max(top, v);
        }
    }
    return top;
}

}  // namespace detail

/// (kappa_min, kappa_max) for `spec` on `grid`.
///
/// kappa_max is the symbol with every phase at pi unless the symbol peaks
/// elsewhere (combos with b > 2a peak on the edge of the phase box).
/// kappa_min is the symbol minimised over per-axis extreme phases,
/// excluding the global constant mode.
inline SpectralBounds kappa_bounds(const StencilSpec& spec, const Grid& grid) {
    detail::check_dims(spec, grid.dims());
    const int d = grid.dims();
    std::vector<double> top(static_cast<std::size_t>(d), std::numbers::pi);
    SpectralBounds out;
    out.kappa_max = kappa_symbol(spec, top);
    if (spec.family != StencilFamily::FivePoint2D && spec.family != StencilFamily::SevenPoint3D) {
        const double sup = detail::symbol_supremum(spec);
        if (sup > out.kappa_max * (1.0 + 1e-14)) out.kappa_max = sup;
    }

    std::vector<std::vector<double>> cand;
    for (int a = 0; a < d; ++a) cand.push_back(extreme_phases(grid, a));
    double best = INFINITY;
    std::vector<double> phase(static_cast<std::size_t>(d));
    std::vector<std::size_t> pick(static_cast<std::size_t>(d), 0);
    for (;;) {
        bool all_zero = true;
        for (int a = 0; a < d; ++a) {
            phase[a] = cand[a][pick[a]];
            all_zero = all_zero && phase[a] == 0.0;
        }
        if (!all_zero) best = std::min(best, kappa_symbol(spec, phase));
        int a = 0;
        while (a < d && ++pick[a] == cand[a].size()) pick[a++] = 0;
        if (a == d) break;
    }
    out.kappa_min = best;
    return out;
}

}  // namespace cjm
