// association.cpp — Point-wise and patch-wise association experiments.

#include "uecorr/association.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "uecorr/errors.hpp"
#include "uecorr/rank_stats.hpp"

namespace uecorr {

namespace {

void check_protocol(const LandmarkSet& train, const LandmarkSet& test) {
    if (train.empty()) {
        throw InvalidInput("experiment needs a non-empty training set");
    }
    if (test.size() < 2) {
        throw InvalidInput("experiment needs at least 2 test landmarks, got " +
                           std::to_string(test.size()));
    }
    // Held-out protocol: a test position must never appear in the training
    // set. Exact comparison; near-coincident points are legitimate.
    for (const auto& t : test.landmarks) {
        for (const auto& tr : train.landmarks) {
            if (t.position == tr.position) {
                throw DisjointnessViolation("test landmark " + std::to_string(t.id) +
                                            " coincides with a training position");
            }
        }
    }
}

std::vector<const Landmark*> by_id(const LandmarkSet& set) {
    std::vector<const Landmark*> ordered;
    ordered.reserve(set.size());
    for (const auto& lm : set.landmarks) {
        ordered.push_back(&lm);
    }
    std::sort(ordered.begin(), ordered.end(),
              [](const Landmark* a, const Landmark* b) { return a->id < b->id; });
    return ordered;
}

} // namespace

std::string metric_name(Metric m) {
    return m == Metric::SSD ? "ssd" : "hi";
}

Metric metric_from_name(const std::string& name) {
    if (name == "ssd") return Metric::SSD;
    if (name == "hi") return Metric::HI;
    throw InvalidInput("unknown metric '" + name + "' (expected ssd or hi)");
}

double pointwise_error(const Vec3& d_g, const Vec3& d_star) {
    return (d_g - d_star).norm();
}

double ssd(const Patch& a, const Patch& b) {
    if (a.k != b.k || a.values.size() != b.values.size()) {
        throw ShapeMismatch("patch shapes differ: k=" + std::to_string(a.k) + " vs k=" +
                            std::to_string(b.k));
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        const double d = a.values[i] - b.values[i];
        sum += d * d;
    }
    return sum / static_cast<double>(a.values.size());
}

std::vector<double> histogram_pmf(const Patch& p, int bins, double lo, double hi) {
    if (bins < 1) {
        throw InvalidInput("histogram needs at least 1 bin");
    }
    if (!(lo < hi)) {
        throw InvalidInput("histogram range is empty: lo >= hi");
    }
    std::vector<std::int64_t> counts(static_cast<std::size_t>(bins), 0);
    const double width = hi - lo;
    for (double v : p.values) {
        int idx = static_cast<int>(std::floor((v - lo) / width * static_cast<double>(bins)));
        idx = std::clamp(idx, 0, bins - 1);
        ++counts[static_cast<std::size_t>(idx)];
    }
    std::vector<double> pmf(counts.size());
    const double n = static_cast<double>(p.values.size());
    for (std::size_t i = 0; i < counts.size(); ++i) {
        pmf[i] = static_cast<double>(counts[i]) / n;
    }
    return pmf;
}

double histogram_intersection(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size()) {
        throw InvalidInput("pmf lengths differ: " + std::to_string(p.size()) + " vs " +
                           std::to_string(q.size()));
    }
    const auto total = [](std::span<const double> s) {
        double t = 0.0;
        for (double v : s) t += v;
        return t;
    };
    if (std::abs(total(p) - 1.0) > 1e-9 || std::abs(total(q) - 1.0) > 1e-9) {
        throw InvalidInput("histogram intersection requires normalized pmfs");
    }
    double overlap = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        overlap += std::min(p[i], q[i]);
    }
    return std::clamp(1.0 - overlap, 0.0, 1.0);
}

double patch_uncertainty(const GPModel& model, const Volume3D& vol, const Vec3& center, int k) {
    if (k < 0) {
        throw InvalidInput("patch radius k must be non-negative");
    }
    const double r = static_cast<double>(k);
    const Vec3 lo = center + vol.spacing() * -r;
    const Vec3 hi = center + vol.spacing() * r;
    if (!vol.contains_voxel_coord(vol.world_to_voxel(lo)) ||
        !vol.contains_voxel_coord(vol.world_to_voxel(hi))) {
        throw OutOfBounds("uncertainty lattice at (" + std::to_string(center.x) + ", " +
                          std::to_string(center.y) + ", " + std::to_string(center.z) +
                          ") with k=" + std::to_string(k) + " escapes the volume");
    }

    double sum = 0.0;
    for (int l = -k; l <= k; ++l) {
        for (int j = -k; j <= k; ++j) {
            for (int i = -k; i <= k; ++i) {
                const Vec3 p = center + vol.spacing().scaled(Vec3(static_cast<double>(i),
                                                                  static_cast<double>(j),
                                                                  static_cast<double>(l)));
                sum += gp_predict(model, p).u;
            }
        }
    }
    const int side = 2 * k + 1;
    return sum / static_cast<double>(side * side * side);
}

AssociationReport pointwise_experiment(const LandmarkSet& train,
                                       const LandmarkSet& test,
                                       const KernelParams& params) {
    check_protocol(train, test);
    const GPModel model = gp_fit(train, params);

    AssociationReport report;
    report.kind = "pointwise";
    report.config.kernel_a = params.a;
    report.config.jitter = params.jitter;
    report.config.train_count = static_cast<int>(train.size());
    report.config.test_count = static_cast<int>(test.size());

    std::vector<double> us;
    std::vector<double> eps;
    for (const Landmark* lm : by_id(test)) {
        const Prediction pred = gp_predict(model, lm->position);
        PointRecord rec;
        rec.landmark_id = lm->id;
        rec.u = pred.u;
        rec.eps = pointwise_error(lm->displacement, pred.mean);
        report.point_records.push_back(rec);
        us.push_back(rec.u);
        eps.push_back(rec.eps);
    }
    report.m = static_cast<int>(report.point_records.size());
    report.rho_s = spearman_rho(us, eps);
    return report;
}

AssociationReport patchwise_experiment(const LandmarkSet& train,
                                       const LandmarkSet& test,
                                       const Volume3D& fixed_vol,
                                       const KernelParams& params,
                                       int k,
                                       Metric metric,
                                       int bins) {
    check_protocol(train, test);
    if (k < 1) {
        throw InvalidInput("patch-wise experiment needs k >= 1");
    }
    if (metric == Metric::HI && bins < 1) {
        throw InvalidInput("histogram metric needs bins >= 1");
    }
    const GPModel model = gp_fit(train, params);

    AssociationReport report;
    report.kind = "patchwise";
    report.config.kernel_a = params.a;
    report.config.jitter = params.jitter;
    report.config.k = k;
    report.config.metric = metric;
    if (metric == Metric::HI) {
        report.config.bins = bins;
    }
    report.config.train_count = static_cast<int>(train.size());
    report.config.test_count = static_cast<int>(test.size());

    std::vector<double> us;
    std::vector<double> eps;
    for (const Landmark* lm : by_id(test)) {
        const Prediction pred = gp_predict(model, lm->position);
        const Vec3 true_center = lm->position + lm->displacement;
        const Vec3 pred_center = lm->position + pred.mean;

        Patch truth;
        Patch predicted;
        double u_patch = 0.0;
        try {
            truth = extract_patch(fixed_vol, true_center, k);
            predicted = extract_patch(fixed_vol, pred_center, k);
            u_patch = patch_uncertainty(model, fixed_vol, pred_center, k);
        } catch (const OutOfBounds&) {
            ++report.dropped;
            continue;
        }

        PatchRecord rec;
        rec.landmark_id = lm->id;
        rec.k = k;
        rec.metric = metric;
        rec.u_patch = u_patch;
        if (metric == Metric::SSD) {
            rec.eps_patch = ssd(predicted, truth);
        } else {
            const auto [lo_it, hi_it] =
                std::minmax_element(truth.values.begin(), truth.values.end());
            const auto [plo_it, phi_it] =
                std::minmax_element(predicted.values.begin(), predicted.values.end());
            const double lo = std::min(*lo_it, *plo_it);
            const double hi = std::max(*hi_it, *phi_it);
            if (lo == hi) {
                // Both patches constant at the same intensity: identical
                // histograms whatever the binning.
                rec.eps_patch = 0.0;
            } else {
                rec.eps_patch = histogram_intersection(histogram_pmf(predicted, bins, lo, hi),
                                                       histogram_pmf(truth, bins, lo, hi));
            }
        }
        report.patch_records.push_back(rec);
        us.push_back(rec.u_patch);
        eps.push_back(rec.eps_patch);
    }

    report.m = static_cast<int>(report.patch_records.size());
    if (report.m < 2) {
        throw DegenerateInput("patch-wise experiment kept " + std::to_string(report.m) +
                              " records after dropping " + std::to_string(report.dropped) +
                              " out-of-bounds landmarks; need at least 2");
    }
    report.rho_s = spearman_rho(us, eps);
    return report;
}

} // namespace uecorr
