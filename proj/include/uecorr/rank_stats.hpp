// rank_stats.hpp — Fractional ranks and Spearman's rank correlation.

#pragma once

#include <span>
#include <vector>

namespace uecorr {

/// Ascending fractional ranks: the smallest value gets rank 1; tied values
/// receive the average of the ranks they span, so ranks always sum to
/// M(M+1)/2. Throws InvalidInput on NaN or an empty sample.
std::vector<double> rank_vector(std::span<const double> sample);

/// Spearman's rank correlation: the Pearson correlation of the two rank
/// vectors, in [-1, 1]. Computed as Sxy / sqrt(Sxx * Syy) over rank
/// deviations from the exact mean (M+1)/2, which yields exactly +/-1 for
/// identical or reversed rankings.
///
/// Throws InvalidInput on length mismatch, M < 2, or NaN; DegenerateInput if
/// either sample is constant (the correlation is undefined, not zero).
double spearman_rho(std::span<const double> u, std::span<const double> e);

} // namespace uecorr
