#pragma once

#include <sstream>
#include <string>
#include <vector>

#include "cjm/chebyshev.hpp"
#include "cjm/error.hpp"

namespace cjm {

enum class OrderingKind { LebedevFinogenov, NaturalDescending, Interleaved, Explicit };

/// A permutation of 1..M that schedules the weights within a cycle.
/// perm[n] is the natural (descending-omega) index applied at step n.
struct OrderingPlan {
    OrderingKind kind = OrderingKind::NaturalDescending;
    std::vector<int> perm;

    int size() const { return static_cast<int>(perm.size()); }
    friend bool operator==(const OrderingPlan&, const OrderingPlan&) = default;
};

inline std::string to_string(OrderingKind k) {
    switch (k) {
        case OrderingKind::LebedevFinogenov: return "lebedev-finogenov";
        case OrderingKind::NaturalDescending: return "natural";
        case OrderingKind::Interleaved: return "interleaved";
        case OrderingKind::Explicit: return "explicit";
    }
    return "?";
}

inline bool is_permutation_of_1_to_m(const std::vector<int>& perm) {
    std::vector<char> seen(perm.size() + 1, 0);
    for (int p : perm) {
        if (p < 1 || p > static_cast<int>(perm.size()) || seen[static_cast<std::size_t>(p)]) return false;
        seen[static_cast<std::size_t>(p)] = 1;
    }
    return true;
}

inline OrderingPlan natural_ordering(int m) {
    if (m < 1) throw DomainError("ordering length must be at least 1");
    OrderingPlan p{OrderingKind::NaturalDescending, std::vector<int>(static_cast<std::size_t>(m))};
    for (int i = 0; i < m; ++i) p.perm[static_cast<std::size_t>(i)] = i + 1;
    return p;
}

/// Ordering for M = 2^r: Xi_1 = (1) and
/// Xi_{2^r} = (j_1, 2^r+1-j_1, j_2, 2^r+1-j_2, ...) for (j_k) = Xi_{2^(r-1)}.
inline OrderingPlan lebedev_finogenov(int r) {
    if (r < 0 || r > 30) throw DomainError("Lebedev-Finogenov exponent must lie in [0, 30]");
    std::vector<int> xi{1};
    for (int level = 1; level <= r; ++level) {
        const int m = 1 << level;
        std::vector<int> next;
        next.reserve(static_cast<std::size_t>(m));
        for (int j : xi) {
            next.push_back(j);
            next.push_back(m + 1 - j);
        }
        xi = std::move(next);
    }
    return {OrderingKind::LebedevFinogenov, std::move(xi)};
}

/// Max/min interleave for any M by recursive bisection of the index range.
///
/// interleaved(M) pairs each entry j of interleaved(ceil(M/2)) with its
/// mirror M+1-j (emitted once when they coincide), so the first indices are
/// (1, M, ceil(M/2), ...). For M a power of two this is the
/// Lebedev-Finogenov ordering.
inline OrderingPlan interleaved(int m) {
    if (m < 1) throw DomainError("ordering length must be at least 1");
    if (m == 1) return {OrderingKind::Interleaved, {1}};
    const OrderingPlan half = interleaved((m + 1) / 2);
    OrderingPlan out{OrderingKind::Interleaved, {}};
    out.perm.reserve(static_cast<std::size_t>(m));
    for (int j : half.perm) {
        out.perm.push_back(j);
        if (m + 1 - j != j) out.perm.push_back(m + 1 - j);
    }
    return out;
}

inline OrderingPlan explicit_ordering(std::vector<int> perm) {
    if (perm.empty() || !is_permutation_of_1_to_m(perm))
        throw UsageError("explicit ordering is not a permutation of 1..M");
    return {OrderingKind::Explicit, std::move(perm)};
}

inline bool is_power_of_two(int m) { return m > 0 && (m & (m - 1)) == 0; }

inline int next_power_of_two(int m) {
    int p = 1;
    while (p < m) p <<= 1;
    return p;
}

/// Lebedev-Finogenov when M is a power of two, otherwise interleaved.
inline OrderingPlan default_ordering(int m) {
    if (is_power_of_two(m)) {
        int r = 0;
        while ((1 << r) < m) ++r;
        return lebedev_finogenov(r);
    }
    return interleaved(m);
}

/// Ordering by name: "default", "lebedev-finogenov", "interleaved", "natural".
inline OrderingPlan make_ordering(const std::string& name, int m) {
    if (name == "default") return default_ordering(m);
    if (name == "natural") return natural_ordering(m);
    if (name == "interleaved") return interleaved(m);
    if (name == "lebedev-finogenov") {
        if (!is_power_of_two(m))
            throw ConfigError("lebedev-finogenov ordering needs M to be a power of two, got " + std::to_string(m));
        return default_ordering(m);
    }
    throw ConfigError("unknown ordering '" + name + "'");
}

/// Permutes a natural-order schedule. The multiset of weights is unchanged.
inline WeightSchedule apply_ordering(const WeightSchedule& s, const OrderingPlan& plan) {
    if (plan.size() != s.size())
        throw UsageError("ordering has length " + std::to_string(plan.size()) + " but schedule has M = " +
                         std::to_string(s.size()));
    if (!is_permutation_of_1_to_m(plan.perm)) throw UsageError("ordering is not a permutation of 1..M");
    WeightSchedule out = s;
    out.permutation.resize(plan.perm.size());
    for (std::size_t n = 0; n < plan.perm.size(); ++n) {
        const auto src = static_cast<std::size_t>(plan.perm[n] - 1);
        out.weights[n] = s.weights[src];
        out.permutation[n] = s.permutation.empty() ? plan.perm[n] : s.permutation[src];
    }
    out.ordering = to_string(plan.kind);
    return out;
}

/// Whitespace-separated 1-based indices.
inline std::string format_ordering(const OrderingPlan& plan) {
    std::ostringstream os;
    for (std::size_t i = 0; i < plan.perm.size(); ++i) os << (i ? " " : "") << plan.perm[i];
    return os.str();
}

inline OrderingPlan parse_ordering(const std::string& text) {
    std::istringstream is(text);
    std::vector<int> perm;
    std::string tok;
    while (is >> tok) {
        std::size_t used = 0;
        int v = 0;
        try {
            v = std::stoi(tok, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != tok.size()) throw ConfigError("ordering: '" + tok + "' is not an integer");
        perm.push_back(v);
    }
    return explicit_ordering(std::move(perm));
}

}  // namespace cjm
