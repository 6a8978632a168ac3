// rank_stats.cpp — Fractional ranking and Spearman's rho.

#include "uecorr/rank_stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "uecorr/errors.hpp"

namespace uecorr {

std::vector<double> rank_vector(std::span<const double> sample) {
    const std::size_t m = sample.size();
    if (m == 0) {
        throw InvalidInput("cannot rank an empty sample");
    }
    for (double v : sample) {
        if (std::isnan(v)) {
            throw InvalidInput("cannot rank a sample containing NaN");
        }
    }

    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return sample[a] < sample[b]; });

    // Runs of equal values share the average of the 1-based ranks they span.
    std::vector<double> ranks(m);
    std::size_t i = 0;
    while (i < m) {
        std::size_t j = i;
        while (j + 1 < m && sample[order[j + 1]] == sample[order[i]]) {
            ++j;
        }
        const double shared = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j + 1));
        for (std::size_t r = i; r <= j; ++r) {
            ranks[order[r]] = shared;
        }
        i = j + 1;
    }
    return ranks;
}

double spearman_rho(std::span<const double> u, std::span<const double> e) {
    const std::size_t m = u.size();
    if (m != e.size()) {
        throw InvalidInput("samples differ in length: " + std::to_string(m) + " vs " +
                           std::to_string(e.size()));
    }
    if (m < 2) {
        throw InvalidInput("rank correlation needs at least 2 points");
    }
    const auto constant = [](std::span<const double> s) {
        return std::all_of(s.begin(), s.end(), [&](double v) { return v == s[0]; });
    };
    if (constant(u) || constant(e)) {
        throw DegenerateInput("rank correlation is undefined for a constant sample");
    }

    const std::vector<double> ru = rank_vector(u);
    const std::vector<double> re = rank_vector(e);

    // Ranks always sum to m(m+1)/2, so the mean is exactly (m+1)/2. Rank
    // deviations are exact multiples of 0.25 in binary, which keeps the sums
    // below exact and the single-sqrt quotient exactly +/-1 for identical or
    // reversed rankings.
    const double mean = 0.5 * static_cast<double>(m + 1);
    double sxx = 0.0;
    double syy = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double du = ru[i] - mean;
        const double de = re[i] - mean;
        sxx += du * du;
        syy += de * de;
        sxy += du * de;
    }
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

} // namespace uecorr
