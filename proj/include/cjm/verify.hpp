#pragma once

#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "cjm/chebyshev.hpp"
#include "cjm/error.hpp"
#include "cjm/grid.hpp"
#include "cjm/ordering.hpp"
#include "cjm/stencil.hpp"

namespace cjm {

/// Result of one named check. `measured` and `limit` are printed as-is.
struct CheckResult {
    std::string name;
    bool pass = false;
    double measured = 0.0;
    double limit = 0.0;
    std::string note;
};

/// Prints `PASS|FAIL <name> measured=<x> limit=<y> [note]`, one per line.
inline void print_checks(std::ostream& os, const std::vector<CheckResult>& checks) {
    char buf[320];
    for (const auto& c : checks) {
        std::snprintf(buf, sizeof buf, "%s %s measured=%.6e limit=%.6e", c.pass ? "PASS" : "FAIL", c.name.c_str(),
                      c.measured, c.limit);
        os << buf;
        if (!c.note.empty()) os << " " << c.note;
        os << "\n";
    }
}

inline bool all_passed(const std::vector<CheckResult>& checks) {
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

namespace detail {

inline double rel_err(double got, double want) { return std::abs(got - want) / std::abs(want); }

inline CheckResult within(std::string name, double got, double want, double tol) {
    const double e = rel_err(got, want);
    return {std::move(name), e <= tol, e, tol, {}};
}

inline CheckResult truth(std::string name, bool ok, std::string note = {}) {
    return {std::move(name), ok, ok ? 0.0 : 1.0, 0.0, std::move(note)};
}

}  // namespace detail

/// Weight generation and cycle-size selection.
inline std::vector<CheckResult> verify_weights() {
    std::vector<CheckResult> out;
    const SpectralBounds b{std::pow(std::sin(std::numbers::pi / 512.0), 2), 2.0};

    const auto one = make_weights(1, b);
    out.push_back(detail::within("weights.m1_stationary", one.weights[0], 2.0 / (b.kappa_max + b.kappa_min), 1e-15));

    const auto s = make_weights(64, b);
    bool positive = true, descending = true, inside = true;
    for (int i = 0; i < s.size(); ++i) {
        const double w = s.weights[static_cast<std::size_t>(i)];
        positive = positive && w > 0.0 && std::isfinite(w);
        inside = inside && w <= 1.0 / b.kappa_min && w >= 1.0 / b.kappa_max;
        if (i > 0) descending = descending && w < s.weights[static_cast<std::size_t>(i - 1)];
    }
    out.push_back(detail::truth("weights.positive_finite", positive));
    out.push_back(detail::truth("weights.descending", descending));
    out.push_back(detail::truth("weights.within_inverse_bounds", inside));

    const double sigmas[] = {1e-6, 1e-8, 1e-10};
    const int reference[] = {1939, 2470, 3000};
    for (int i = 0; i < 3; ++i) {
        const int m = min_cycle_size(sigmas[i], b);
        const double bound = amplification_bound(m, b).bound;
        const double before = m > 1 ? amplification_bound(m - 1, b).bound : 1.0;
        std::ostringstream nm;
        nm << "weights.min_cycle_size_sigma_" << sigmas[i];
        out.push_back({nm.str(), bound <= sigmas[i] * (1 + 1e-12) && before > sigmas[i] && m <= reference[i], double(m),
                       double(reference[i]), "(M must satisfy the bound, be minimal and not exceed the reference size)"});
    }

    std::stringstream io;
    write_schedule(io, apply_ordering(make_weights(16, b), default_ordering(16)));
    const auto back = read_schedule(io);
    const auto ref = apply_ordering(make_weights(16, b), default_ordering(16));
    out.push_back(detail::truth("weights.schedule_round_trip",
                                back.weights == ref.weights && back.permutation == ref.permutation && back.chebyshev));
    return out;
}

/// Reference orderings and bijectivity.
inline std::vector<CheckResult> verify_orderings() {
    std::vector<CheckResult> out;
    const std::vector<std::vector<int>> expected{
        {1, 2},
        {1, 4, 2, 3},
        {1, 8, 4, 5, 2, 7, 3, 6},
        {1, 16, 8, 9, 4, 13, 5, 12, 2, 15, 7, 10, 3, 14, 6, 11},
    };
    for (int r = 1; r <= 4; ++r)
        out.push_back(detail::truth("orderings.xi_" + std::to_string(1 << r),
                                    lebedev_finogenov(r).perm == expected[static_cast<std::size_t>(r - 1)]));

    bool bijective = true, paired = true;
    for (int r = 0; r <= 14; ++r) {
        const auto p = lebedev_finogenov(r);
        bijective = bijective && is_permutation_of_1_to_m(p.perm);
        for (std::size_t i = 0; r > 0 && i + 1 < p.perm.size(); i += 2)
            paired = paired && p.perm[i] + p.perm[i + 1] == (1 << r) + 1;
    }
    out.push_back(detail::truth("orderings.lf_bijective_to_2^14", bijective));
    out.push_back(detail::truth("orderings.lf_mirror_pairs", paired));

    bool inter = true, agrees = true;
    for (int m = 1; m <= 4096; ++m) {
        const auto p = interleaved(m);
        inter = inter && is_permutation_of_1_to_m(p.perm);
        if (is_power_of_two(m)) agrees = agrees && p.perm == default_ordering(m).perm;
    }
    out.push_back(detail::truth("orderings.interleaved_bijective_to_4096", inter));
    out.push_back(detail::truth("orderings.interleaved_matches_lf_on_powers_of_two", agrees));
    return out;
}

/// Stencil symbol extremes.
inline std::vector<CheckResult> verify_bounds() {
    std::vector<CheckResult> out;
    const Grid g2(std::vector<Axis>(2, Axis{256, 0.0, 1.0, BoundaryKind::Neumann, BoundaryKind::Neumann}));
    const auto b5 = kappa_bounds(five_point(), g2);
    out.push_back(detail::within("bounds.kappa_min_5pt_256_neumann", b5.kappa_min, 3.76491e-5, 1e-5));
    out.push_back({"bounds.kappa_max_5pt", b5.kappa_max == 2.0, b5.kappa_max, 2.0, {}});
    const double kt = rescale_kappa(0.0, b5);
    out.push_back({"bounds.kappa_tilde_zero", std::abs(kt - (-1.00004)) < 5e-6, kt, -1.00004, "(6 digits)"});

    const Grid d2 = Grid::uniform(2, 64, BoundaryKind::Dirichlet);
    out.push_back(detail::within("bounds.kappa_max_9pt", kappa_bounds(nine_point(), d2).kappa_max, 8.0 / 5.0, 1e-15));
    out.push_back(
        detail::within("bounds.kappa_max_17pt", kappa_bounds(seventeen_point(), d2).kappa_max, 64.0 / 45.0, 1e-15));
    const Grid d3 = Grid::uniform(3, 16, BoundaryKind::Dirichlet);
    out.push_back(detail::within("bounds.kappa_max_7pt", kappa_bounds(seven_point(), d3).kappa_max, 2.0, 1e-15));

    // 9-point closed-form minimum for the lowest Dirichlet mode.
    const double n = 64, s = std::sin(std::numbers::pi / (2 * n));
    const double c = std::cos(std::numbers::pi / n);
    const double k9 = 0.8 * s * s + 0.8 * s * s + 0.2 * (1.0 - c * c);
    out.push_back(detail::within("bounds.kappa_min_9pt_64", kappa_bounds(nine_point(), d2).kappa_min, k9, 1e-13));
    return out;
}

/// The mean identities of the inverse weights.
inline std::vector<CheckResult> verify_theorems() {
    std::vector<CheckResult> out;
    const SpectralBounds b{0.01, 2.0};
    for (int m : {3, 16, 1000, 10000}) {
        const auto s = make_weights(m, b);
        out.push_back(detail::within("theorems.harmonic_mean_M" + std::to_string(m), mean_inverse_weight(s),
                                     0.5 * (b.kappa_max + b.kappa_min), 1e-12));
    }
    // The exact decrements shrink like exp(-2 M acosh(A/B)) / M and fall
    // below one ulp within a few doublings, so later steps may only stay
    // level to rounding. Steps whose decrement is resolvable must be strict.
    const double t = std::acosh((b.kappa_max + b.kappa_min) / (b.kappa_max - b.kappa_min));
    const auto excess = [t](double m) { return std::log1p(std::exp(-2.0 * m * t)) / m; };
    double prev = INFINITY, worst = 0.0;
    bool decreasing = true;
    for (int r = 4; r <= 14; ++r) {
        const double m = std::ldexp(1.0, r);
        const double g = geometric_mean_inverse(make_weights(1 << r, b));
        if (std::isfinite(prev)) {
            const double drop = (prev - g) / prev;
            const bool resolvable = excess(m / 2) - excess(m) > 1e-13;
            worst = std::min(worst, drop);
            decreasing = decreasing && (resolvable ? drop > 0.0 : drop >= -8.0 * std::numeric_limits<double>::epsilon());
        }
        prev = g;
    }
    out.push_back({"theorems.geometric_mean_decreasing_2^4..2^14", decreasing, worst,
                   -8.0 * std::numeric_limits<double>::epsilon(), "(most negative relative step)"});
    out.push_back(detail::within("theorems.geometric_mean_limit_M16384", prev, geometric_mean_inverse_limit(b), 1e-3));
    return out;
}

/// Runs a suite by name: weights, orderings, bounds, theorems or all.
inline std::vector<CheckResult> run_verify(const std::string& suite) {
    if (suite == "weights") return verify_weights();
    if (suite == "orderings") return verify_orderings();
    if (suite == "bounds") return verify_bounds();
    if (suite == "theorems") return verify_theorems();
    if (suite == "all") {
        std::vector<CheckResult> all;
        for (const char* s : {"weights", "orderings", "bounds", "theorems"}) {
            auto part = run_verify(s);
            all.insert(all.end(), part.begin(), part.end());
        }
        return all;
    }
    throw ConfigError("unknown verify suite '" + suite + "'");
}

}  // namespace cjm
