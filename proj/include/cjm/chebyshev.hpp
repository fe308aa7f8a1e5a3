#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "cjm/error.hpp"
#include "cjm/stencil.hpp"

namespace cjm {

/// Relaxation factors for one cycle of M weighted-Jacobi sweeps.
///
/// `weights` is held in the order the sweeps apply them. `permutation[n]`
/// is the 1-based natural index (descending omega) of the n-th applied
/// weight. `chebyshev` is true when the multiset of weights is the optimal
/// set for `bounds`, which enables the closed-form amplification.
struct WeightSchedule {
    std::vector<double> weights;
    SpectralBounds bounds;
    std::string ordering = "natural";
    std::vector<int> permutation;
    bool chebyshev = false;

    int size() const { return static_cast<int>(weights.size()); }
};

struct AmplificationProfile {
    double bound = 1.0;             // 1 / |T_M(kappa~(0))|
    double rate = 0.0;              // (1/M) log |T_M(kappa~(0))|
    double kappa_tilde_zero = -1.0;
};

/// Affine map of [kappa_min, kappa_max] onto [-1, 1].
inline double rescale_kappa(double kappa, const SpectralBounds& b) {
    b.validate();
    if (b.kappa_max == b.kappa_min) throw DomainError("degenerate spectral interval: kappa_max == kappa_min");
    return 2.0 * (kappa - b.kappa_min) / (b.kappa_max - b.kappa_min) - 1.0;
}

namespace detail {

// acosh(1 + y) for y >= 0 without forming 1 + y.
inline double acosh1p(double y) { return std::log1p(y + std::sqrt(y * (2.0 + y))); }

// log cosh(t) for t >= 0, overflow free.
inline double log_cosh(double t) { return t == 0.0 ? 0.0 : t + std::log1p(std::exp(-2.0 * t)) - std::numbers::ln2; }

// |kappa~(0)| - 1 = 2 r / (1 - r) with r = kappa_min / kappa_max.
inline double kappa_tilde_zero_excess(const SpectralBounds& b) {
    const double r = b.kappa_min / b.kappa_max;
    return 2.0 * r / (1.0 - r);
}

inline void require_positive_min(const SpectralBounds& b) {
    b.validate();
    if (!(b.kappa_min > 0.0)) throw DomainError("kappa_min must be positive (no finite cycle converges otherwise)");
    if (b.kappa_min == b.kappa_max) throw DomainError("degenerate spectral interval: kappa_max == kappa_min");
}

// log |T_M(kappa~(0))| computed from the excess to avoid cancellation near 1.
inline double log_chebyshev_at_zero(int m, const SpectralBounds& b) {
    return log_cosh(m * acosh1p(kappa_tilde_zero_excess(b)));
}

}  // namespace detail

/// log |T_M(x)| for |x| >= 1 via T_M(x) = cosh(M acosh|x|), evaluated in the
/// log domain so that no M overflows.
inline double log_abs_chebyshev(int m, double x) {
    if (m < 0) throw DomainError("Chebyshev degree must be non-negative");
    const double ax = std::abs(x);
    if (!(ax >= 1.0)) throw DomainError("log_abs_chebyshev needs |x| >= 1 (oscillatory regime)");
    return detail::log_cosh(m * std::acosh(ax));
}

inline AmplificationProfile amplification_bound(int m, const SpectralBounds& b) {
    detail::require_positive_min(b);
    if (m < 1) throw DomainError("cycle size must be at least 1");
    const double logt = detail::log_chebyshev_at_zero(m, b);
    return {std::exp(-logt), logt / m, -(1.0 + detail::kappa_tilde_zero_excess(b))};
}

/// Smallest M with |T_M(kappa~(0))|^-1 <= sigma.
///
/// The arccosh ratio gives the seed; the log-domain bound then confirms it
/// and steps by one where rounding put the seed off. Ties within 1e-12
/// relative in log space count as satisfied.
inline int min_cycle_size(double sigma, const SpectralBounds& b) {
    if (!(sigma > 0.0 && sigma < 1.0)) throw DomainError("sigma must lie in (0, 1)");
    detail::require_positive_min(b);
    const double target = -std::log(sigma);
    const double slack = 1e-12 * std::max(1.0, target);
    const double step = detail::acosh1p(detail::kappa_tilde_zero_excess(b));
    const double seed = std::ceil(std::acosh(1.0 / sigma) / step);
    if (!(seed < static_cast<double>(std::numeric_limits<int>::max() / 2)))
        throw DomainError("required cycle size overflows");
    int m = std::max(1, static_cast<int>(seed));
    auto ok = [&](int k) { return detail::log_chebyshev_at_zero(k, b) >= target - slack; };
    while (m > 1 && ok(m - 1)) --m;
    while (!ok(m)) ++m;
    return m;
}

/// The M optimal weights in natural (descending) order.
///
/// The denominator kappa_max + kappa_min - (kappa_max - kappa_min) cos(theta)
/// is evaluated as 2 kappa_min + 2 (kappa_max - kappa_min) sin^2(theta/2),
/// which avoids cancellation for the largest weights.
inline WeightSchedule make_weights(int m, const SpectralBounds& b) {
    b.validate();
    if (m < 1) throw DomainError("cycle size must be at least 1");
    WeightSchedule s;
    s.bounds = b;
    s.chebyshev = true;
    s.weights.resize(static_cast<std::size_t>(m));
    s.permutation.resize(static_cast<std::size_t>(m));
    const double width = b.kappa_max - b.kappa_min;
    for (int n = 1; n <= m; ++n) {
        const double half = std::numbers::pi * (2.0 * n - 1.0) / (4.0 * m);
        const double sh = std::sin(half);
        s.weights[static_cast<std::size_t>(n - 1)] = 1.0 / (b.kappa_min + width * sh * sh);
        s.permutation[static_cast<std::size_t>(n - 1)] = n;
    }
    return s;
}

/// prod (1 - omega_n kappa), evaluated directly.
inline double amplification_product(double kappa, const std::vector<double>& weights) {
    double g = 1.0;
    for (double w : weights) g *= 1.0 - w * kappa;
    return g;
}

/// G_M(kappa) for one full cycle.
///
/// Optimal schedules use T_M(kappa~)/T_M(kappa~(0)) (cos form inside the
/// interval, log-domain cosh form outside); other schedules fall back to the
/// product.
inline double amplification(double kappa, const WeightSchedule& s) {
    if (kappa == 0.0) return 1.0;
    if (!s.chebyshev) return amplification_product(kappa, s.weights);
    const int m = s.size();
    const double x = rescale_kappa(kappa, s.bounds);
    const double log_den = detail::log_chebyshev_at_zero(m, s.bounds);
    const double den_sign = (m % 2 == 0) ? 1.0 : -1.0;  // sign of T_M at kappa~(0) < -1
    if (std::abs(x) <= 1.0) return std::cos(m * std::acos(x)) * den_sign * std::exp(-log_den);
    const double num_sign = (x > 0.0 || m % 2 == 0) ? 1.0 : -1.0;
    return num_sign * den_sign * std::exp(log_abs_chebyshev(m, x) - log_den);
}

/// Per-iteration factor |G_M(kappa)|^(1/M).
inline double per_iteration_factor(double kappa, const WeightSchedule& s) {
    return std::pow(std::abs(amplification(kappa, s)), 1.0 / s.size());
}

namespace detail {

inline double pairwise_sum(const double* v, std::size_t n) {
    if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += v[i];
        return s;
    }
    const std::size_t h = n / 2;
    return pairwise_sum(v, h) + pairwise_sum(v + h, n - h);
}

}  // namespace detail

/// (1/M) sum omega_n^-1, which equals (kappa_max + kappa_min)/2 for the
/// optimal set.
inline double mean_inverse_weight(const WeightSchedule& s) {
    std::vector<double> inv(s.weights.size());
    for (std::size_t i = 0; i < inv.size(); ++i) inv[i] = 1.0 / s.weights[i];
    return detail::pairwise_sum(inv.data(), inv.size()) / static_cast<double>(inv.size());
}

/// [prod omega_n^-1]^(1/M) as the exponential of the mean log.
inline double geometric_mean_inverse(const WeightSchedule& s) {
    std::vector<double> logs(s.weights.size());
    for (std::size_t i = 0; i < logs.size(); ++i) logs[i] = -std::log(s.weights[i]);
    return std::exp(detail::pairwise_sum(logs.data(), logs.size()) / static_cast<double>(logs.size()));
}

/// M -> infinity limit of geometric_mean_inverse: ((sqrt kmax + sqrt kmin)/2)^2.
inline double geometric_mean_inverse_limit(const SpectralBounds& b) {
    const double r = 0.5 * (std::sqrt(b.kappa_max) + std::sqrt(b.kappa_min));
    return r * r;
}

/// Geometric mean of the weights, an estimate of the optimal SOR factor.
inline double estimate_sor_omega(const WeightSchedule& s) { return 1.0 / geometric_mean_inverse(s); }

/// Closed-form M -> infinity estimate 4 / (sqrt kmax + sqrt kmin)^2.
inline double estimate_sor_omega(const SpectralBounds& b) { return 1.0 / geometric_mean_inverse_limit(b); }

// Schedule text format:
//   # cjm-schedule
//   # M = <int>
//   # kappa_min = <real>
//   # kappa_max = <real>
//   # ordering = <name>
//   # permutation = <1-based indices>
//   <one weight per line, in applied order>

inline void write_schedule(std::ostream& os, const WeightSchedule& s) {
    os.precision(17);
    os << "# cjm-schedule\n";
    os << "# M = " << s.size() << "\n";
    os << "# kappa_min = " << s.bounds.kappa_min << "\n";
    os << "# kappa_max = " << s.bounds.kappa_max << "\n";
    os << "# ordering = " << s.ordering << "\n";
    if (!s.permutation.empty()) {
        os << "# permutation =";
        for (int p : s.permutation) os << ' ' << p;
        os << "\n";
    }
    for (double w : s.weights) os << w << "\n";
}

inline WeightSchedule read_schedule(std::istream& is) {
    WeightSchedule s;
    int declared = -1;
    std::string line;
    bool have_min = false, have_max = false;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto eq = line.find('=');
            if (eq == std::string::npos) continue;
            std::string key = line.substr(1, eq - 1);
            key.erase(0, key.find_first_not_of(' '));
            key.erase(key.find_last_not_of(' ') + 1);
            std::istringstream val(line.substr(eq + 1));
            if (key == "M") {
                val >> declared;
            } else if (key == "kappa_min") {
                val >> s.bounds.kappa_min;
                have_min = true;
            } else if (key == "kappa_max") {
                val >> s.bounds.kappa_max;
                have_max = true;
            } else if (key == "ordering") {
                val >> s.ordering;
            } else if (key == "permutation") {
                int p;
                while (val >> p) s.permutation.push_back(p);
            }
            continue;
        }
        std::istringstream val(line);
        double w;
        if (!(val >> w)) throw ConfigError("schedule: cannot parse weight line '" + line + "'");
        s.weights.push_back(w);
    }
    if (declared >= 0 && declared != s.size())
        throw ConfigError("schedule: header declares M = " + std::to_string(declared) + " but " +
                          std::to_string(s.size()) + " weights follow");
    if (s.weights.empty()) throw ConfigError("schedule: no weights");
    if (!s.permutation.empty() && static_cast<int>(s.permutation.size()) != s.size())
        throw ConfigError("schedule: permutation length does not match weight count");
    for (double w : s.weights)
        if (!(w > 0.0) || !std::isfinite(w)) throw ConfigError("schedule: weights must be positive and finite");
    // Re-derive the optimality flag rather than trusting the file.
    if (have_min && have_max && s.bounds.kappa_min > 0.0 && s.bounds.kappa_max > s.bounds.kappa_min) {
        const WeightSchedule ref = make_weights(s.size(), s.bounds);
        std::vector<double> a = s.weights, b = ref.weights;
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        bool same = true;
        for (std::size_t i = 0; i < a.size() && same; ++i) same = std::abs(a[i] - b[i]) <= 1e-12 * b[i];
        s.chebyshev = same;
    }
    return s;
}

}  // namespace cjm
