// gp_oracle.hpp — Reference posterior computed with an explicit dense matrix
// inverse (Gauss-Jordan with partial pivoting). Deliberately independent of
// the library's linear algebra: plain nested vectors, no factorizations.

#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "uecorr/gp.hpp"
#include "uecorr/volume.hpp"

namespace oracle {

using Matrix = std::vector<std::vector<double>>;

inline Matrix invert(Matrix a) {
    const std::size_t n = a.size();
    Matrix inv(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        inv[i][i] = 1.0;
    }
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t row = col + 1; row < n; ++row) {
            if (std::abs(a[row][col]) > std::abs(a[pivot][col])) {
                pivot = row;
            }
        }
        if (a[pivot][col] == 0.0) {
            throw std::runtime_error("oracle: singular matrix");
        }
        std::swap(a[col], a[pivot]);
        std::swap(inv[col], inv[pivot]);
        const double d = a[col][col];
        for (std::size_t j = 0; j < n; ++j) {
            a[col][j] /= d;
            inv[col][j] /= d;
        }
        for (std::size_t row = 0; row < n; ++row) {
            if (row == col || a[row][col] == 0.0) {
                continue;
            }
            const double f = a[row][col];
            for (std::size_t j = 0; j < n; ++j) {
                a[row][j] -= f * a[col][j];
                inv[row][j] -= f * inv[col][j];
            }
        }
    }
    return inv;
}

struct Posterior {
    uecorr::Vec3 mean;
    double var = 0.0;
};

/// Posterior mean and per-component variance at `query`, straight from the
/// closed-form expressions: mu = Ks' (K + jitter I)^-1 D and
/// var = k(q,q) - Ks' (K + jitter I)^-1 Ks.
inline Posterior predict(const uecorr::LandmarkSet& set, const uecorr::KernelParams& params,
                         const uecorr::Vec3& query) {
    const std::size_t n = set.size();
    auto kernel = [&](const uecorr::Vec3& p, const uecorr::Vec3& q) {
        const double dx = p.x - q.x;
        const double dy = p.y - q.y;
        const double dz = p.z - q.z;
        return std::exp(-(dx * dx + dy * dy + dz * dz) / params.a);
    };
    Matrix gram(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            gram[i][j] = kernel(set.landmarks[i].position, set.landmarks[j].position);
        }
        gram[i][i] += params.jitter;
    }
    const Matrix inv = invert(std::move(gram));

    std::vector<double> ks(n);
    for (std::size_t i = 0; i < n; ++i) {
        ks[i] = kernel(query, set.landmarks[i].position);
    }
    std::vector<double> inv_ks(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            inv_ks[i] += inv[i][j] * ks[j];
        }
    }
    Posterior post;
    double quad = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        quad += ks[i] * inv_ks[i];
        post.mean.x += inv_ks[i] * set.landmarks[i].displacement.x;
        post.mean.y += inv_ks[i] * set.landmarks[i].displacement.y;
        post.mean.z += inv_ks[i] * set.landmarks[i].displacement.z;
    }
    post.var = kernel(query, query) - quad;
    return post;
}

} // namespace oracle
