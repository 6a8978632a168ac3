// synth.hpp — Synthetic phantoms with analytic ground-truth deformations.
//
// Everything here is a pure function of its spec and seed, so experiment
// results computed on synthetic data are auditable end to end: the true
// displacement at any point is available in closed form.

#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "uecorr/geometry.hpp"
#include "uecorr/volume.hpp"

namespace uecorr {

/// One Gaussian displacement bump: amplitude * exp(-|x - center|^2 / width^2).
struct DeformationBump {
    Vec3 center;                    // mm
    Vec3 amplitude;                 // mm, per component
    double width = 1.0;             // mm, > 0
};

/// Analytic deformation field d(x) = sum of Gaussian bumps.
struct DeformationSpec {
    std::vector<DeformationBump> bumps;
};

/// Closed-form field evaluation; the exact ground truth for every experiment.
Vec3 eval_deformation(const DeformationSpec& spec, const Vec3& x);

/// Phantom recipe. Identical specs produce bit-identical volumes.
struct PhantomSpec {
    std::uint64_t seed = 0;
    Index3 dims;
    Vec3 spacing{1.0, 1.0, 1.0};
    int blob_count = 0;
    double noise_sigma = 0.0;       // additive Gaussian intensity noise
};

/// Deterministic random stream: a mersenne twister (std::mt19937_64, whose
/// output sequence is fixed by the standard) with explicit uniform and
/// Box-Muller normal transforms, avoiding the unspecified std::distribution
/// algorithms so identical seeds reproduce identical draws.
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform in [0, 1), 53-bit resolution.
    double uniform();
    /// Uniform in [lo, hi).
    double uniform(double lo, double hi);
    /// Standard normal via the Box-Muller transform (cosine branch).
    double normal();

private:
    std::mt19937_64 engine_;
};

/// Sum of blob_count random Gaussian intensity blobs plus seeded additive
/// noise. Blob centers are uniform over the volume extent, widths uniform in
/// [8%, 20%] of the smallest extent, amplitudes uniform in [0.5, 1.5].
/// Origin is fixed at (0,0,0). Throws InvalidInput on a bad spec.
Volume3D make_phantom(const PhantomSpec& spec);

struct WarpResult {
    Volume3D volume;
    double oob_fraction = 0.0;      // voxels whose source sample left the volume
};

/// Backward warping: output(x) = trilinear_sample(fixed, x + d(x)).
/// Out-of-bounds source samples are written as 0 and counted.
WarpResult warp_volume(const Volume3D& fixed, const DeformationSpec& spec);

/// Draws n_train + n_test pairwise-distinct positions uniformly over the
/// interior of `vol` (at least `margin` voxels from every face) and assigns
/// each the closed-form displacement of `spec`. Train and test sets are
/// disjoint in both ids and positions. Throws InvalidInput if the interior
/// is empty or the counts are invalid.
std::pair<LandmarkSet, LandmarkSet> sample_landmarks(const DeformationSpec& spec,
                                                     const Volume3D& vol,
                                                     int n_train,
                                                     int n_test,
                                                     std::uint64_t seed,
                                                     int margin);

} // namespace uecorr
