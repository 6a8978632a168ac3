// synth.cpp — Phantom volumes, analytic deformations, landmark sampling.

#include "uecorr/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "uecorr/errors.hpp"

namespace uecorr {

double SeededRng::uniform() {
    // Top 53 bits of the engine output; [0, 1).
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double SeededRng::uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform();
}

double SeededRng::normal() {
    // (0, 1] for the log argument.
    const double u1 = static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Vec3 eval_deformation(const DeformationSpec& spec, const Vec3& x) {
    Vec3 d;
    for (const auto& bump : spec.bumps) {
        const double w = std::exp(-(x - bump.center).squared_norm() / (bump.width * bump.width));
        d = d + bump.amplitude * w;
    }
    return d;
}

Volume3D make_phantom(const PhantomSpec& spec) {
    if (spec.dims.x <= 0 || spec.dims.y <= 0 || spec.dims.z <= 0) {
        throw InvalidInput("phantom dims must be positive");
    }
    if (!(spec.spacing.x > 0.0) || !(spec.spacing.y > 0.0) || !(spec.spacing.z > 0.0)) {
        throw InvalidInput("phantom spacing must be positive");
    }
    if (spec.blob_count < 0) {
        throw InvalidInput("phantom blob count must be non-negative");
    }
    if (!(spec.noise_sigma >= 0.0) || !std::isfinite(spec.noise_sigma)) {
        throw InvalidInput("phantom noise sigma must be non-negative and finite");
    }

    const Vec3 extent = spec.spacing.scaled(Vec3(static_cast<double>(spec.dims.x - 1),
                                                 static_cast<double>(spec.dims.y - 1),
                                                 static_cast<double>(spec.dims.z - 1)));
    // Blob widths scale with the smallest non-degenerate extent so planar
    // volumes stay usable.
    double ref_extent = 0.0;
    for (double e : {extent.x, extent.y, extent.z}) {
        if (e > 0.0 && (ref_extent == 0.0 || e < ref_extent)) {
            ref_extent = e;
        }
    }
    if (ref_extent == 0.0) {
        ref_extent = 1.0;
    }

    SeededRng rng(spec.seed);
    struct Blob {
        Vec3 center;
        double width;
        double amplitude;
    };
    std::vector<Blob> blobs;
    blobs.reserve(static_cast<std::size_t>(spec.blob_count));
    for (int b = 0; b < spec.blob_count; ++b) {
        Blob blob;
        blob.center = Vec3(rng.uniform(0.0, extent.x), rng.uniform(0.0, extent.y),
                           rng.uniform(0.0, extent.z));
        blob.width = rng.uniform(0.08, 0.20) * ref_extent;
        blob.amplitude = rng.uniform(0.5, 1.5);
        blobs.push_back(blob);
    }

    const std::size_t total = static_cast<std::size_t>(spec.dims.count());
    std::vector<float> voxels(total);
    std::size_t out = 0;
    for (int l = 0; l < spec.dims.z; ++l) {
        for (int j = 0; j < spec.dims.y; ++j) {
            for (int i = 0; i < spec.dims.x; ++i, ++out) {
                const Vec3 p = spec.spacing.scaled(Vec3(static_cast<double>(i),
                                                        static_cast<double>(j),
                                                        static_cast<double>(l)));
                double value = 0.0;
                for (const auto& blob : blobs) {
                    value += blob.amplitude *
                             std::exp(-(p - blob.center).squared_norm() /
                                      (blob.width * blob.width));
                }
                voxels[out] = static_cast<float>(value);
            }
        }
    }
    if (spec.noise_sigma > 0.0) {
        for (auto& v : voxels) {
            v = static_cast<float>(static_cast<double>(v) + spec.noise_sigma * rng.normal());
        }
    }
    return Volume3D(spec.dims, spec.spacing, Vec3(0.0, 0.0, 0.0), std::move(voxels));
}

WarpResult warp_volume(const Volume3D& fixed, const DeformationSpec& spec) {
    const Index3 dims = fixed.dims();
    std::vector<float> voxels(static_cast<std::size_t>(dims.count()));
    std::int64_t oob = 0;
    std::size_t out = 0;
    for (int l = 0; l < dims.z; ++l) {
        for (int j = 0; j < dims.y; ++j) {
            for (int i = 0; i < dims.x; ++i, ++out) {
                const Vec3 x = fixed.voxel_to_world(Vec3(static_cast<double>(i),
                                                         static_cast<double>(j),
                                                         static_cast<double>(l)));
                const Vec3 src = x + eval_deformation(spec, x);
                if (fixed.contains_voxel_coord(fixed.world_to_voxel(src))) {
                    voxels[out] = static_cast<float>(fixed.trilinear_sample(src));
                } else {
                    voxels[out] = 0.0f;
                    ++oob;
                }
            }
        }
    }
    WarpResult result{Volume3D(dims, fixed.spacing(), fixed.origin(), std::move(voxels)),
                      static_cast<double>(oob) / static_cast<double>(dims.count())};
    return result;
}

std::pair<LandmarkSet, LandmarkSet> sample_landmarks(const DeformationSpec& spec,
                                                     const Volume3D& vol,
                                                     int n_train,
                                                     int n_test,
                                                     std::uint64_t seed,
                                                     int margin) {
    if (n_train < 1) {
        throw InvalidInput("need at least 1 training landmark");
    }
    if (n_test < 2) {
        throw InvalidInput("need at least 2 test landmarks");
    }
    if (margin < 0) {
        throw InvalidInput("margin must be non-negative");
    }
    const Vec3 lo_vox(static_cast<double>(margin), static_cast<double>(margin),
                      static_cast<double>(margin));
    const Vec3 hi_vox(static_cast<double>(vol.dims().x - 1 - margin),
                      static_cast<double>(vol.dims().y - 1 - margin),
                      static_cast<double>(vol.dims().z - 1 - margin));
    if (lo_vox.x > hi_vox.x || lo_vox.y > hi_vox.y || lo_vox.z > hi_vox.z) {
        throw InvalidInput("margin of " + std::to_string(margin) +
                           " voxels leaves no interior for landmark sampling");
    }

    const int total = n_train + n_test;
    SeededRng rng(seed);
    std::vector<Vec3> positions;
    positions.reserve(static_cast<std::size_t>(total));
    std::int64_t attempts = 0;
    const std::int64_t max_attempts = 1000LL * total + 1000;
    while (static_cast<int>(positions.size()) < total) {
        if (++attempts > max_attempts) {
            throw InvalidInput("interior cannot host " + std::to_string(total) +
                               " distinct landmarks");
        }
        const Vec3 vox(rng.uniform(lo_vox.x, hi_vox.x), rng.uniform(lo_vox.y, hi_vox.y),
                       rng.uniform(lo_vox.z, hi_vox.z));
        const Vec3 p = vol.voxel_to_world(vox);
        const bool duplicate = std::any_of(positions.begin(), positions.end(),
                                           [&](const Vec3& q) { return q == p; });
        if (!duplicate) {
            positions.push_back(p);
        }
    }

    LandmarkSet train;
    LandmarkSet test;
    for (int i = 0; i < total; ++i) {
        Landmark lm;
        lm.id = i;
        lm.position = positions[static_cast<std::size_t>(i)];
        lm.displacement = eval_deformation(spec, lm.position);
        if (i < n_train) {
            train.landmarks.push_back(lm);
        } else {
            test.landmarks.push_back(lm);
        }
    }
    return {std::move(train), std::move(test)};
}

} // namespace uecorr
