// gp.hpp — Gaussian-process interpolation of sparse displacement vectors.
//
// A zero-mean GP with the squared-exponential kernel
//     k(p, q) = exp(-|p - q|^2 / a)
// is fit to N landmark displacements. The posterior mean at a query point is
//     mu = Ks' (K + jitter I)^-1 D
// and the per-component marginal variance is
//     var = k(q, q) - Ks' (K + jitter I)^-1 Ks,
// identical for the three displacement components because they share the
// kernel and therefore a single Cholesky factorization.

#pragma once

#include <Eigen/Dense>

#include "uecorr/geometry.hpp"
#include "uecorr/volume.hpp"

namespace uecorr {

/// Kernel and conditioning parameters. `a` is the squared length scale in
/// mm^2; `jitter` is a diagonal regularizer added to the Gram matrix.
struct KernelParams {
    double a = 1.0;
    double jitter = 1e-8;
};

/// exp(-|p - q|^2 / a). Callers guarantee params are valid.
double kernel_eval(const Vec3& p, const Vec3& q, const KernelParams& params);

/// Median of squared pairwise landmark distances; the default choice for
/// KernelParams::a when none is configured. Falls back to 1 mm^2 when the
/// set has fewer than two landmarks.
double median_squared_distance(const LandmarkSet& set);

/// Posterior summary at one query point.
struct Prediction {
    Vec3 mean;                      // interpolated displacement, mm
    Vec3 var;                       // per-component marginal variance, mm^2
    double u = 0.0;                 // sqrt(var.x + var.y + var.z), mm
};

/// Fitted interpolator. Immutable after gp_fit; predictions are pure reads.
class GPModel {
public:
    const Eigen::MatrixXd& train_points() const { return train_points_; }   // N x 3
    const Eigen::MatrixXd& train_disp() const { return train_disp_; }       // N x 3
    const KernelParams& params() const { return params_; }
    /// Lower-triangular Cholesky factor of K + jitter I.
    const Eigen::MatrixXd& chol() const { return chol_; }
    /// (K + jitter I)^-1 D, one column per displacement component.
    const Eigen::MatrixXd& alpha() const { return alpha_; }

    Eigen::Index train_count() const { return train_points_.rows(); }

private:
    friend GPModel gp_fit(const LandmarkSet&, const KernelParams&);

    Eigen::MatrixXd train_points_;
    Eigen::MatrixXd train_disp_;
    KernelParams params_;
    Eigen::MatrixXd chol_;
    Eigen::MatrixXd alpha_;
};

/// Builds the Gram matrix and factors K + jitter I once for all three
/// displacement columns. Throws InvalidInput for an empty set or invalid
/// params, SingularGram if the factorization fails.
GPModel gp_fit(const LandmarkSet& landmarks, const KernelParams& params);

/// Posterior mean and marginal variance at `query`. Negative variances from
/// floating-point cancellation are clamped to zero.
Prediction gp_predict(const GPModel& model, const Vec3& query);

/// Predicted displacement and combined uncertainty on a regular sub-grid of a
/// volume (every stride-th voxel center along each axis), x-fastest storage.
struct DenseField {
    Index3 grid_dims;               // grid points per axis
    int stride = 1;                 // voxel stride between grid points
    Vec3 spacing;                   // mm between grid points (vol spacing * stride)
    Vec3 origin;                    // mm, copied from the volume
    std::vector<Vec3> mean;
    std::vector<double> u;

    std::size_t index(int i, int j, int l) const {
        return static_cast<std::size_t>(i) +
               static_cast<std::size_t>(grid_dims.x) *
                   (static_cast<std::size_t>(j) +
                    static_cast<std::size_t>(grid_dims.y) * static_cast<std::size_t>(l));
    }
};

/// Evaluates gp_predict at every stride-th voxel center of `vol`.
/// Throws InvalidInput for stride < 1.
DenseField dense_field(const GPModel& model, const Volume3D& vol, int stride);

} // namespace uecorr
