// association.hpp — Uncertainty/error association experiments.
//
// Two protocols over held-out landmarks: point-wise (per-landmark prediction
// error vs. uncertainty) and patch-wise (intensity dissimilarity between
// ground-truth-mapped and predicted-mapped patches vs. mean patch
// uncertainty). Both summarize the monotonic association with Spearman's rho.

#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "uecorr/gp.hpp"
#include "uecorr/volume.hpp"

namespace uecorr {

/// Patch dissimilarity metric.
enum class Metric { SSD, HI };

std::string metric_name(Metric m);
Metric metric_from_name(const std::string& name);

/// |d_g - d_star|, the registration error at one point.
double pointwise_error(const Vec3& d_g, const Vec3& d_star);

/// Mean squared intensity difference over two patches of equal k.
/// Normalized by the (2k+1)^3 voxel count so patch sizes are comparable.
/// Throws ShapeMismatch on differing k or value counts.
double ssd(const Patch& a, const Patch& b);

/// Intensity probability mass function over `bins` equal-width bins spanning
/// [lo, hi]; out-of-range values are clamped into the end bins. Throws
/// InvalidInput for bins < 1 or lo >= hi.
std::vector<double> histogram_pmf(const Patch& p, int bins, double lo, double hi);

/// Histogram Intersection dissimilarity 1 - sum_i min(p_i, q_i), in [0, 1];
/// 0 means identical histograms. Inputs must be equal-length pmfs that each
/// sum to 1 within 1e-9, else InvalidInput.
double histogram_intersection(std::span<const double> p, std::span<const double> q);

/// Mean of Prediction.u over the same (2k+1)^3 lattice used by extract_patch.
/// Throws OutOfBounds if the lattice escapes the volume.
double patch_uncertainty(const GPModel& model, const Volume3D& vol, const Vec3& center, int k);

struct PointRecord {
    int landmark_id = 0;
    double u = 0.0;                 // combined prediction uncertainty, mm
    double eps = 0.0;               // |d_g - d_star|, mm
};

struct PatchRecord {
    int landmark_id = 0;
    double u_patch = 0.0;           // mean uncertainty over the patch, mm
    double eps_patch = 0.0;         // SSD or HI dissimilarity
    Metric metric = Metric::SSD;
    int k = 0;
};

/// Parameter echo carried alongside every report so a run is reproducible
/// from the report alone.
struct ReportConfig {
    double kernel_a = 0.0;
    double jitter = 0.0;
    std::optional<int> k;
    std::optional<Metric> metric;
    std::optional<int> bins;
    int train_count = 0;
    int test_count = 0;
};

struct AssociationReport {
    std::string kind;                       // "pointwise" or "patchwise"
    std::vector<PointRecord> point_records; // kind == "pointwise"
    std::vector<PatchRecord> patch_records; // kind == "patchwise"
    std::optional<double> rho_s;            // nullopt = degenerate
    int m = 0;                              // record count
    int dropped = 0;                        // landmarks lost to out-of-bounds patches
    ReportConfig config;
};

/// Fits a GP on `train`, predicts every `test` landmark, and correlates
/// combined uncertainty with point-wise error. Records are ordered by
/// landmark id. Requires test size >= 2 and train/test position disjointness
/// (DisjointnessViolation otherwise); propagates SingularGram and
/// DegenerateInput.
AssociationReport pointwise_experiment(const LandmarkSet& train,
                                       const LandmarkSet& test,
                                       const KernelParams& params);

/// Patch-wise protocol: for each test landmark at x, compares the fixed-image
/// patch at the ground-truth-mapped center x + d_g against the patch at the
/// predicted-mapped center x + d_star, and correlates the dissimilarity with
/// the mean uncertainty over the predicted-center lattice. Landmarks whose
/// patches leave the volume are dropped and counted. Requires k >= 1 and at
/// least 2 usable records (DegenerateInput otherwise).
AssociationReport patchwise_experiment(const LandmarkSet& train,
                                       const LandmarkSet& test,
                                       const Volume3D& fixed_vol,
                                       const KernelParams& params,
                                       int k,
                                       Metric metric,
                                       int bins);

} // namespace uecorr
