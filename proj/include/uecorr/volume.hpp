// volume.hpp — Scalar 3-D volumes, landmarks, and cubic patch extraction.
//
// Coordinate convention: world mm = origin + spacing ⊙ voxel index, voxels
// stored x-fastest. All sampling is trilinear; positions outside
// [0, dims-1]^3 in continuous voxel coordinates raise OutOfBounds.

#pragma once

#include <cstddef>
#include <vector>

#include "uecorr/errors.hpp"
#include "uecorr/geometry.hpp"

namespace uecorr {

/// Immutable scalar intensity grid with physical geometry.
class Volume3D {
public:
    /// Validates dims > 0, spacing > 0, voxel count, and intensity finiteness;
    /// throws InvalidInput otherwise.
    Volume3D(Index3 dims, Vec3 spacing, Vec3 origin, std::vector<float> voxels);

    const Index3& dims() const { return dims_; }
    const Vec3& spacing() const { return spacing_; }
    const Vec3& origin() const { return origin_; }
    const std::vector<float>& voxels() const { return voxels_; }

    std::size_t voxel_count() const { return voxels_.size(); }

    float at(int i, int j, int l) const {
        return voxels_[static_cast<std::size_t>(i) +
                       static_cast<std::size_t>(dims_.x) *
                           (static_cast<std::size_t>(j) +
                            static_cast<std::size_t>(dims_.y) * static_cast<std::size_t>(l))];
    }

    /// (p - origin) / spacing, component-wise. May be out of range; callers check.
    Vec3 world_to_voxel(const Vec3& p) const { return (p - origin_).divided(spacing_); }

    /// origin + spacing ⊙ v. Inverse of world_to_voxel.
    Vec3 voxel_to_world(const Vec3& v) const { return origin_ + spacing_.scaled(v); }

    /// True iff the continuous voxel coordinate lies in [0, dims-1] per axis.
    bool contains_voxel_coord(const Vec3& v) const;

    /// Trilinear interpolation of the 8 surrounding voxels at world point p.
    /// Throws OutOfBounds if world_to_voxel(p) leaves [0, dims-1]^3.
    double trilinear_sample(const Vec3& p) const;

private:
    Index3 dims_;
    Vec3 spacing_;
    Vec3 origin_;
    std::vector<float> voxels_;
};

/// One fixed-image point with its observed displacement vector, both in mm.
struct Landmark {
    int id = 0;
    Vec3 position;
    Vec3 displacement;
};

/// Ordered list of landmarks. Ids must be unique; duplicate positions are not
/// rejected here — they surface as SingularGram when fitting.
struct LandmarkSet {
    std::vector<Landmark> landmarks;

    std::size_t size() const { return landmarks.size(); }
    bool empty() const { return landmarks.empty(); }
};

/// Throws InvalidInput on duplicate ids or non-finite components.
void validate(const LandmarkSet& set);

/// Cubic sub-volume of (2k+1)^3 trilinear samples centered at `center`,
/// spaced one voxel step apart along each axis, x-fastest ordering.
struct Patch {
    Vec3 center;
    int k = 0;
    std::vector<double> values;
};

/// Samples the (2k+1)^3 lattice center + spacing ⊙ (i,j,l), i,j,l in [-k, k].
/// Throws OutOfBounds if any lattice point escapes the volume (the patch is
/// rejected, never clamped) and InvalidInput for k < 0.
Patch extract_patch(const Volume3D& vol, const Vec3& center, int k);

} // namespace uecorr
