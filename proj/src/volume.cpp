// volume.cpp — Volume geometry, trilinear sampling, patch extraction.

#include "uecorr/volume.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_set>

namespace uecorr {

Volume3D::Volume3D(Index3 dims, Vec3 spacing, Vec3 origin, std::vector<float> voxels)
    : dims_(dims), spacing_(spacing), origin_(origin), voxels_(std::move(voxels)) {
    if (dims_.x <= 0 || dims_.y <= 0 || dims_.z <= 0) {
        throw InvalidInput("volume dims must be positive");
    }
    if (!(spacing_.x > 0.0) || !(spacing_.y > 0.0) || !(spacing_.z > 0.0)) {
        throw InvalidInput("volume spacing must be positive");
    }
    if (!origin_.is_finite() || !spacing_.is_finite()) {
        throw InvalidInput("volume geometry must be finite");
    }
    const auto expected = dims_.count();
    if (static_cast<std::int64_t>(voxels_.size()) != expected) {
        throw InvalidInput("voxel count " + std::to_string(voxels_.size()) +
                           " does not match dims product " + std::to_string(expected));
    }
    for (float v : voxels_) {
        if (!std::isfinite(v)) {
            throw InvalidInput("volume intensities must be finite");
        }
    }
}

bool Volume3D::contains_voxel_coord(const Vec3& v) const {
    return v.x >= 0.0 && v.x <= static_cast<double>(dims_.x - 1) &&
           v.y >= 0.0 && v.y <= static_cast<double>(dims_.y - 1) &&
           v.z >= 0.0 && v.z <= static_cast<double>(dims_.z - 1);
}

double Volume3D::trilinear_sample(const Vec3& p) const {
    const Vec3 v = world_to_voxel(p);
    if (!contains_voxel_coord(v)) {
        throw OutOfBounds("sample point (" + std::to_string(p.x) + ", " + std::to_string(p.y) +
                          ", " + std::to_string(p.z) + ") outside volume");
    }

    // Base cell index; at the exact upper face the cell is the last one with
    // fractional coordinate 1.
    const auto cell = [](double c, int dim) {
        int i0 = static_cast<int>(std::floor(c));
        i0 = std::clamp(i0, 0, std::max(dim - 2, 0));
        const int i1 = std::min(i0 + 1, dim - 1);
        return std::pair<int, double>{i0, c - static_cast<double>(i0)};
    };
    const auto [ix, fx] = cell(v.x, dims_.x);
    const auto [iy, fy] = cell(v.y, dims_.y);
    const auto [iz, fz] = cell(v.z, dims_.z);
    const int jx = std::min(ix + 1, dims_.x - 1);
    const int jy = std::min(iy + 1, dims_.y - 1);
    const int jz = std::min(iz + 1, dims_.z - 1);

    const double c000 = at(ix, iy, iz);
    const double c100 = at(jx, iy, iz);
    const double c010 = at(ix, jy, iz);
    const double c110 = at(jx, jy, iz);
    const double c001 = at(ix, iy, jz);
    const double c101 = at(jx, iy, jz);
    const double c011 = at(ix, jy, jz);
    const double c111 = at(jx, jy, jz);

    const double c00 = c000 * (1.0 - fx) + c100 * fx;
    const double c10 = c010 * (1.0 - fx) + c110 * fx;
    const double c01 = c001 * (1.0 - fx) + c101 * fx;
    const double c11 = c011 * (1.0 - fx) + c111 * fx;
    const double c0 = c00 * (1.0 - fy) + c10 * fy;
    const double c1 = c01 * (1.0 - fy) + c11 * fy;
    return c0 * (1.0 - fz) + c1 * fz;
}

void validate(const LandmarkSet& set) {
    std::unordered_set<int> ids;
    ids.reserve(set.size());
    for (const auto& lm : set.landmarks) {
        if (!lm.position.is_finite() || !lm.displacement.is_finite()) {
            throw InvalidInput("landmark " + std::to_string(lm.id) + " has non-finite components");
        }
        if (!ids.insert(lm.id).second) {
            throw InvalidInput("duplicate landmark id " + std::to_string(lm.id));
        }
    }
}

Patch extract_patch(const Volume3D& vol, const Vec3& center, int k) {
    if (k < 0) {
        throw InvalidInput("patch radius k must be non-negative");
    }
    const double r = static_cast<double>(k);
    // Lattice points are center + spacing*(i,j,l); checking the two extreme
    // corners with the same expression covers the whole axis-aligned lattice.
    const Vec3 lo = center + vol.spacing() * -r;
    const Vec3 hi = center + vol.spacing() * r;
    if (!vol.contains_voxel_coord(vol.world_to_voxel(lo)) ||
        !vol.contains_voxel_coord(vol.world_to_voxel(hi))) {
        throw OutOfBounds("patch lattice at (" + std::to_string(center.x) + ", " +
                          std::to_string(center.y) + ", " + std::to_string(center.z) +
                          ") with k=" + std::to_string(k) + " escapes the volume");
    }

    const int side = 2 * k + 1;
    Patch patch;
    patch.center = center;
    patch.k = k;
    patch.values.reserve(static_cast<std::size_t>(side) * side * side);
    for (int l = -k; l <= k; ++l) {
        for (int j = -k; j <= k; ++j) {
            for (int i = -k; i <= k; ++i) {
                const Vec3 p = center + vol.spacing().scaled(Vec3(static_cast<double>(i),
                                                                  static_cast<double>(j),
                                                                  static_cast<double>(l)));
                patch.values.push_back(vol.trilinear_sample(p));
            }
        }
    }
    return patch;
}

} // namespace uecorr
