#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "cjm/chebyshev.hpp"
#include "cjm/ordering.hpp"
#include "oracle/oracle.hpp"

using namespace cjm;
using Catch::Approx;
using std::numbers::pi;

namespace {

const SpectralBounds neumann256{std::pow(std::sin(pi / 512), 2), 2.0};

double max_abs_on_grid(const std::vector<double>& w, const SpectralBounds& b, int samples) {
    double m = 0.0;
    for (int i = 0; i <= samples; ++i) {
        const double k = b.kappa_min + (b.kappa_max - b.kappa_min) * i / samples;
        m = std::max(m, std::abs(amplification_product(k, w)));
    }
    return m;
}

}  // namespace

TEST_CASE("weights match the cosine formula") {
    for (int m : {1, 2, 7, 64, 1000}) {
        const auto s = make_weights(m, {0.003, 1.6});
        const auto ref = oracle::weights(m, 0.003L, 1.6L);
        for (int n = 0; n < m; ++n)
            CHECK(s.weights[static_cast<std::size_t>(n)] ==
                  Approx(static_cast<double>(ref[static_cast<std::size_t>(n)])).epsilon(1e-13));
    }
    CHECK(make_weights(1, {0.5, 2.0}).weights[0] == Approx(2.0 / 2.5));
}

TEST_CASE("rescaling maps the interval onto [-1, 1]") {
    const SpectralBounds b{0.2, 1.8};
    CHECK(rescale_kappa(0.2, b) == -1.0);
    CHECK(rescale_kappa(1.8, b) == Approx(1.0));
    CHECK(rescale_kappa(0.0, b) == Approx(-1.25));
    CHECK(std::round(rescale_kappa(0.0, neumann256) * 1e5) / 1e5 == -1.00004);
    CHECK_THROWS_AS(rescale_kappa(0.0, SpectralBounds{1.0, 1.0}), DomainError);
}

TEST_CASE("closed form, product form and recurrence agree") {
    const SpectralBounds b{0.05, 2.0};
    for (int m : {1, 3, 8, 17, 40}) {
        const auto s = apply_ordering(make_weights(m, b), default_ordering(m));
        const auto w = oracle::weights(m, 0.05L, 2.0L);
        const long double x0 = -(2.0L + 0.05L) / (2.0L - 0.05L);
        for (double k : {0.0, 0.01, 0.05, 0.3, 1.0, 1.7, 2.0}) {
            const long double xr = 2.0L * (k - 0.05L) / 1.95L - 1.0L;
            const double rec = static_cast<double>(oracle::chebyshev(m, xr) / oracle::chebyshev(m, x0));
            const double prod = static_cast<double>(oracle::product(k, w));
            CHECK(amplification(k, s) == Approx(prod).margin(1e-12));
            CHECK(rec == Approx(prod).margin(1e-12));
        }
        CHECK(amplification_bound(m, b).bound ==
              Approx(static_cast<double>(1.0L / std::abs(oracle::chebyshev(m, x0)))).epsilon(1e-12));
    }
}

TEST_CASE("log-domain bound stays finite for huge cycles") {
    const auto p = amplification_bound(5'000'000, neumann256);
    CHECK(std::isfinite(p.rate));
    CHECK(p.rate > 0.0);
    CHECK(p.bound >= 0.0);
    CHECK(std::isfinite(log_abs_chebyshev(1'000'000, 3.0)));
    CHECK(log_abs_chebyshev(1'000'000, 3.0) == Approx(1e6 * std::acosh(3.0) - std::log(2.0)).epsilon(1e-14));
    CHECK_THROWS_AS(log_abs_chebyshev(4, 0.5), DomainError);
}

TEST_CASE("reference cycle sizes reach their target reductions") {
    CHECK(amplification_bound(1939, neumann256).bound <= 1e-6);
    CHECK(amplification_bound(2470, neumann256).bound <= 1e-8);
    CHECK(amplification_bound(3000, neumann256).bound <= 1e-10);
}

TEST_CASE("min_cycle_size is the least admissible M") {
    for (double sigma : {0.5, 1e-3, 1e-6, 1e-10, 1e-14})
        for (const SpectralBounds& b : {neumann256, SpectralBounds{0.01, 2.0}, SpectralBounds{0.3, 1.6}}) {
            const int m = min_cycle_size(sigma, b);
            CHECK(amplification_bound(m, b).bound <= sigma * (1 + 1e-12));
            if (m > 1) CHECK(amplification_bound(m - 1, b).bound > sigma);
        }
    CHECK_THROWS_AS(min_cycle_size(0.0, neumann256), DomainError);
    CHECK_THROWS_AS(min_cycle_size(1.0, neumann256), DomainError);
    CHECK_THROWS_AS(min_cycle_size(1e-6, SpectralBounds{0.0, 2.0}), DomainError);
    CHECK_THROWS_AS(amplification_bound(10, SpectralBounds{0.0, 2.0}), DomainError);
}

TEST_CASE("optimal weights equioscillate and resist perturbation") {
    const SpectralBounds b{0.05, 2.0};
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> jitter(-0.1, 0.1);
    for (int m : {4, 8, 16, 32}) {
        const auto s = make_weights(m, b);
        const double bound = amplification_bound(m, b).bound;
        CHECK(max_abs_on_grid(s.weights, b, 200000) == Approx(bound).epsilon(1e-8));
        // extrema at the Chebyshev points, alternating in sign
        double prev = 0.0;
        for (int j = 0; j <= m; ++j) {
            const double x = std::cos(pi * j / m);
            const double k = b.kappa_min + 0.5 * (x + 1.0) * (b.kappa_max - b.kappa_min);
            const double g = amplification_product(k, s.weights);
            CHECK(std::abs(g) == Approx(bound).epsilon(1e-8));
            if (j > 0) CHECK(g * prev < 0.0);
            prev = g;
        }
        for (int t = 0; t < 100; ++t) {
            auto w = s.weights;
            for (double& x : w) x *= 1.0 + jitter(rng);
            CHECK(max_abs_on_grid(w, b, 20000) > bound);
        }
    }
}

TEST_CASE("mean identities of the inverse weights") {
    for (const SpectralBounds& b : {SpectralBounds{0.01, 2.0}, neumann256}) {
        for (int m : {3, 16, 1000, 10000})
            CHECK(mean_inverse_weight(make_weights(m, b)) ==
                  Approx(0.5 * (b.kappa_max + b.kappa_min)).epsilon(1e-12));
    }
    // geometric mean: closed form (B/2)(2 T_M(A/B))^(1/M) from the root product
    const SpectralBounds b{0.01, 2.0};
    const long double A = 1.005L, B = 0.995L;
    for (int m : {2, 5, 16, 64}) {
        const long double want = (B / 2) * std::pow(2.0L * oracle::chebyshev(m, A / B), 1.0L / m);
        CHECK(geometric_mean_inverse(make_weights(m, b)) == Approx(static_cast<double>(want)).epsilon(1e-13));
    }
    CHECK(geometric_mean_inverse(make_weights(1 << 14, b)) ==
          Approx(std::pow((std::sqrt(2.0) + std::sqrt(0.01)) / 2, 2)).epsilon(1e-3));
    for (int r = 4; r < 7; ++r)
        CHECK(geometric_mean_inverse(make_weights(1 << (r + 1), b)) < geometric_mean_inverse(make_weights(1 << r, b)));
}

TEST_CASE("sor factor estimate approaches the consistently ordered optimum as N grows") {
    // 5-point Dirichlet model problem: kappa in [2 sin^2(pi/2N), 2 cos^2(pi/2N)]
    // only kappa_min is used here; kappa_max = 2 as for the computed bounds.
    double prev_scaled = 0.0;
    for (int n : {64, 128, 256, 512}) {
        const SpectralBounds b{2 * std::pow(std::sin(pi / (2 * n)), 2), 2.0};
        const double young = 2.0 / (1.0 + std::sin(pi / n));
        const double gap = std::abs(estimate_sor_omega(b) - young) / young;
        const double scaled = gap * n * n;
        if (prev_scaled > 0.0) CHECK(scaled == Approx(prev_scaled).epsilon(0.05));
        prev_scaled = scaled;
        if (n >= 256) CHECK(gap < 1e-4);
    }
    const auto s = make_weights(4096, neumann256);
    CHECK(estimate_sor_omega(s) == Approx(estimate_sor_omega(neumann256)).epsilon(1e-10));
}

TEST_CASE("per-iteration factor is the geometric rate") {
    const SpectralBounds b{0.05, 2.0};
    const auto s = make_weights(12, b);
    const double g = std::abs(amplification(0.3, s));
    CHECK(per_iteration_factor(0.3, s) == Approx(std::pow(g, 1.0 / 12)));
    CHECK(amplification(0.0, s) == 1.0);
}

TEST_CASE("schedule files round-trip") {
    const auto s = apply_ordering(make_weights(16, neumann256), default_ordering(16));
    std::stringstream io;
    write_schedule(io, s);
    const auto back = read_schedule(io);
    CHECK(back.weights == s.weights);
    CHECK(back.permutation == s.permutation);
    CHECK(back.ordering == "lebedev-finogenov");
    CHECK(back.chebyshev);
    CHECK(back.bounds == s.bounds);

    std::stringstream tampered;
    tampered << "# M = 2\n# kappa_min = 0.1\n# kappa_max = 2\n1.0\n0.6\n";
    CHECK_FALSE(read_schedule(tampered).chebyshev);

    std::stringstream wrong_count("# M = 3\n1.0\n");
    CHECK_THROWS_AS(read_schedule(wrong_count), ConfigError);
    std::stringstream junk("1.0\nabc\n");
    CHECK_THROWS_AS(read_schedule(junk), ConfigError);
    std::stringstream negative("-1.0\n");
    CHECK_THROWS_AS(read_schedule(negative), ConfigError);
}
