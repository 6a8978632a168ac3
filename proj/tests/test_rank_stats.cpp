// test_rank_stats.cpp — Fractional ranks and Spearman's rank correlation.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"

#include "uecorr/rank_stats.hpp"
#include "uecorr/synth.hpp"

using namespace uecorr;

namespace {

/// Pearson correlation computed directly on two rank vectors; the reference
/// for spearman_rho.
double pearson_on_ranks(const std::vector<double>& a, const std::vector<double>& b) {
    const std::size_t m = a.size();
    double mean_a = 0.0;
    double mean_b = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        mean_a += a[i];
        mean_b += b[i];
    }
    mean_a /= static_cast<double>(m);
    mean_b /= static_cast<double>(m);
    double cov = 0.0;
    double va = 0.0;
    double vb = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        cov += (a[i] - mean_a) * (b[i] - mean_b);
        va += (a[i] - mean_a) * (a[i] - mean_a);
        vb += (b[i] - mean_b) * (b[i] - mean_b);
    }
    return cov / std::sqrt(va * vb);
}

/// Distinct random values: a shuffled 1..m plus a sub-half jitter.
std::vector<double> tie_free_sample(std::size_t m, SeededRng& rng) {
    std::vector<double> v(m);
    for (std::size_t i = 0; i < m; ++i) {
        v[i] = static_cast<double>(i + 1) + rng.uniform(0.0, 0.4);
    }
    for (std::size_t i = m; i > 1; --i) {
        const auto j = static_cast<std::size_t>(rng.uniform(0.0, static_cast<double>(i)));
        std::swap(v[i - 1], v[j]);
    }
    return v;
}

} // namespace

TEST_CASE("ranks: worked five-element example") {
    const std::vector<double> sample = {0.2, 1.2, 0.9, 0.5, 0.1};
    const std::vector<double> expected = {2, 5, 4, 3, 1};
    CHECK(rank_vector(sample) == expected);
}

TEST_CASE("ranks: single element gets rank 1") {
    CHECK(rank_vector(std::vector<double>{7.0}) == std::vector<double>{1.0});
}

TEST_CASE("ranks: ties share the average of the spanned ranks") {
    CHECK(rank_vector(std::vector<double>{3, 3, 5}) == std::vector<double>{1.5, 1.5, 3});
    CHECK(rank_vector(std::vector<double>{4, 4, 4, 4}) ==
          std::vector<double>{2.5, 2.5, 2.5, 2.5});
    CHECK(rank_vector(std::vector<double>{9, 1, 9, 1}) ==
          std::vector<double>{3.5, 1.5, 3.5, 1.5});
}

TEST_CASE("ranks: sum to m(m+1)/2 and stay within [1, m]") {
    SeededRng rng(101);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t m = 2 + static_cast<std::size_t>(rng.uniform(0.0, 40.0));
        std::vector<double> sample(m);
        for (auto& v : sample) {
            // Coarse grid forces plenty of ties.
            v = std::floor(rng.uniform(0.0, 6.0));
        }
        const std::vector<double> ranks = rank_vector(sample);
        double sum = 0.0;
        for (double r : ranks) {
            CHECK(r >= 1.0);
            CHECK(r <= static_cast<double>(m));
            sum += r;
        }
        CHECK(sum == 0.5 * static_cast<double>(m) * static_cast<double>(m + 1));
    }
}

TEST_CASE("ranks: NaN input is rejected") {
    CHECK_THROWS_AS(rank_vector(std::vector<double>{1.0, std::nan("")}), InvalidInput);
}

TEST_CASE("spearman: monotone pairs hit exactly +1 and -1") {
    const std::vector<double> up = {1, 2, 3, 4, 5};
    const std::vector<double> down = {5, 4, 3, 2, 1};
    CHECK(spearman_rho(up, up) == 1.0);
    CHECK(spearman_rho(up, down) == -1.0);

    SeededRng rng(103);
    for (int trial = 0; trial < 20; ++trial) {
        const std::vector<double> u = tie_free_sample(30, rng);
        std::vector<double> inc = u;
        std::vector<double> dec = u;
        for (std::size_t i = 0; i < u.size(); ++i) {
            inc[i] = std::exp(u[i] / 10.0);
            dec[i] = -u[i];
        }
        CHECK(spearman_rho(u, inc) == 1.0);
        CHECK(spearman_rho(u, dec) == -1.0);
    }
}

TEST_CASE("spearman: equals Pearson on explicitly built rank vectors") {
    const std::vector<double> u = {0.2, 1.2, 0.9, 0.5, 0.1};
    const std::vector<double> e = {1, 2, 3, 4, 5};
    const double expected = pearson_on_ranks(rank_vector(u), rank_vector(e));
    CHECK(spearman_rho(u, e) == doctest::Approx(expected).epsilon(1e-14));

    SeededRng rng(107);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<double> a(20);
        std::vector<double> b(20);
        for (std::size_t i = 0; i < a.size(); ++i) {
            a[i] = std::floor(rng.uniform(0.0, 8.0));  // ties included
            b[i] = rng.uniform(-3.0, 3.0);
        }
        if (std::all_of(a.begin(), a.end(), [&](double v) { return v == a[0]; })) {
            continue;
        }
        CHECK(spearman_rho(a, b) ==
              doctest::Approx(pearson_on_ranks(rank_vector(a), rank_vector(b)))
                  .epsilon(1e-12));
    }
}

TEST_CASE("spearman: tie-free closed form 1 - 6*sum(d^2)/(m(m^2-1))") {
    SeededRng rng(109);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t m = 5 + static_cast<std::size_t>(rng.uniform(0.0, 60.0));
        const std::vector<double> u = tie_free_sample(m, rng);
        const std::vector<double> e = tie_free_sample(m, rng);
        const std::vector<double> ru = rank_vector(u);
        const std::vector<double> re = rank_vector(e);
        double d2 = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            d2 += (ru[i] - re[i]) * (ru[i] - re[i]);
        }
        const double md = static_cast<double>(m);
        const double closed = 1.0 - 6.0 * d2 / (md * (md * md - 1.0));
        CHECK(std::abs(spearman_rho(u, e) - closed) <= 1e-12);
    }
}

TEST_CASE("spearman: invariant under strictly increasing transforms") {
    SeededRng rng(113);
    for (int trial = 0; trial < 100; ++trial) {
        const std::vector<double> u = tie_free_sample(25, rng);
        const std::vector<double> e = tie_free_sample(25, rng);
        const double base = spearman_rho(u, e);
        std::vector<double> fu(u.size());
        const int which = trial % 4;
        const double scale = rng.uniform(0.5, 3.0);
        const double offset = rng.uniform(-10.0, 10.0);
        for (std::size_t i = 0; i < u.size(); ++i) {
            switch (which) {
                case 0: fu[i] = scale * u[i] + offset; break;
                case 1: fu[i] = std::exp(u[i] / 30.0); break;
                case 2: fu[i] = u[i] * u[i] * u[i]; break;
                default: fu[i] = std::atan(u[i] / 5.0); break;
            }
        }
        CHECK(spearman_rho(fu, e) == base);
    }
}

TEST_CASE("spearman: symmetric and convention-independent") {
    SeededRng rng(127);
    for (int trial = 0; trial < 30; ++trial) {
        const std::vector<double> u = tie_free_sample(15, rng);
        const std::vector<double> e = tie_free_sample(15, rng);
        CHECK(spearman_rho(u, e) == spearman_rho(e, u));
        // Descending ranks on both sides = ranks of the negated samples.
        std::vector<double> nu(u.size());
        std::vector<double> ne(e.size());
        for (std::size_t i = 0; i < u.size(); ++i) {
            nu[i] = -u[i];
            ne[i] = -e[i];
        }
        CHECK(spearman_rho(nu, ne) == spearman_rho(u, e));
    }
}

TEST_CASE("spearman: stays inside [-1, 1]") {
    SeededRng rng(131);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> u(12);
        std::vector<double> e(12);
        for (std::size_t i = 0; i < u.size(); ++i) {
            u[i] = std::floor(rng.uniform(0.0, 4.0));
            e[i] = std::floor(rng.uniform(0.0, 4.0));
        }
        const bool u_const = std::all_of(u.begin(), u.end(),
                                         [&](double v) { return v == u[0]; });
        const bool e_const = std::all_of(e.begin(), e.end(),
                                         [&](double v) { return v == e[0]; });
        if (u_const || e_const) {
            CHECK_THROWS_AS(spearman_rho(u, e), DegenerateInput);
            continue;
        }
        const double rho = spearman_rho(u, e);
        CHECK(rho >= -1.0);
        CHECK(rho <= 1.0);
    }
}

TEST_CASE("spearman: rejects bad samples") {
    CHECK_THROWS_AS(spearman_rho(std::vector<double>{1, 2}, std::vector<double>{1, 2, 3}),
                    InvalidInput);
    CHECK_THROWS_AS(spearman_rho(std::vector<double>{1}, std::vector<double>{1}),
                    InvalidInput);
    CHECK_THROWS_AS(spearman_rho(std::vector<double>{2, 2, 2}, std::vector<double>{1, 2, 3}),
                    DegenerateInput);
    CHECK_THROWS_AS(spearman_rho(std::vector<double>{1, 2, 3}, std::vector<double>{5, 5, 5}),
                    DegenerateInput);
}
