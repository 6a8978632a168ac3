// gp.cpp — GP fit, posterior prediction, and dense-field rasterization.

#include "uecorr/gp.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "uecorr/errors.hpp"

namespace uecorr {

namespace {

void check_params(const KernelParams& params) {
    if (!(params.a > 0.0) || !std::isfinite(params.a)) {
        throw InvalidInput("kernel parameter a must be positive and finite");
    }
    if (!(params.jitter >= 0.0) || !std::isfinite(params.jitter)) {
        throw InvalidInput("jitter must be non-negative and finite");
    }
}

} // namespace

double kernel_eval(const Vec3& p, const Vec3& q, const KernelParams& params) {
    return std::exp(-(p - q).squared_norm() / params.a);
}

double median_squared_distance(const LandmarkSet& set) {
    const std::size_t n = set.size();
    if (n < 2) {
        return 1.0;
    }
    std::vector<double> d2;
    d2.reserve(n * (n - 1) / 2);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            d2.push_back((set.landmarks[i].position - set.landmarks[j].position).squared_norm());
        }
    }
    const std::size_t mid = d2.size() / 2;
    std::nth_element(d2.begin(), d2.begin() + static_cast<std::ptrdiff_t>(mid), d2.end());
    double median = d2[mid];
    if (d2.size() % 2 == 0) {
        const double below = *std::max_element(d2.begin(), d2.begin() + static_cast<std::ptrdiff_t>(mid));
        median = 0.5 * (median + below);
    }
    return median > 0.0 ? median : 1.0;
}

GPModel gp_fit(const LandmarkSet& landmarks, const KernelParams& params) {
    check_params(params);
    if (landmarks.empty()) {
        throw InvalidInput("cannot fit a GP on an empty landmark set");
    }
    validate(landmarks);

    const Eigen::Index n = static_cast<Eigen::Index>(landmarks.size());
    Eigen::MatrixXd points(n, 3);
    Eigen::MatrixXd disp(n, 3);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& lm = landmarks.landmarks[static_cast<std::size_t>(i)];
        points.row(i) << lm.position.x, lm.position.y, lm.position.z;
        disp.row(i) << lm.displacement.x, lm.displacement.y, lm.displacement.z;
    }

    Eigen::MatrixXd gram(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& pi = landmarks.landmarks[static_cast<std::size_t>(i)].position;
        gram(i, i) = 1.0 + params.jitter;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const auto& pj = landmarks.landmarks[static_cast<std::size_t>(j)].position;
            const double kij = kernel_eval(pi, pj, params);
            gram(i, j) = kij;
            gram(j, i) = kij;
        }
    }

    Eigen::LLT<Eigen::MatrixXd> llt(gram);
    if (llt.info() != Eigen::Success) {
        throw SingularGram("Gram matrix factorization failed for N=" + std::to_string(n) +
                           " landmarks (duplicate or near-duplicate positions, or jitter too small)");
    }

    GPModel model;
    model.train_points_ = std::move(points);
    model.train_disp_ = std::move(disp);
    model.params_ = params;
    model.chol_ = llt.matrixL();
    model.alpha_ = llt.solve(model.train_disp_);
    return model;
}

Prediction gp_predict(const GPModel& model, const Vec3& query) {
    const Eigen::Index n = model.train_count();
    const double a = model.params().a;

    Eigen::VectorXd k_star(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double dx = model.train_points()(i, 0) - query.x;
        const double dy = model.train_points()(i, 1) - query.y;
        const double dz = model.train_points()(i, 2) - query.z;
        k_star(i) = std::exp(-(dx * dx + dy * dy + dz * dz) / a);
    }

    const Eigen::RowVector3d mean = k_star.transpose() * model.alpha();

    // var = k(q,q) - Ks' (K + jitter I)^-1 Ks = 1 - |L^-1 Ks|^2, shared by all
    // three components. Clamp the tiny negative values cancellation produces.
    const Eigen::VectorXd w =
        model.chol().triangularView<Eigen::Lower>().solve(k_star);
    double var = 1.0 - w.squaredNorm();
    if (var < 0.0) {
        var = 0.0;
    }

    Prediction pred;
    pred.mean = Vec3(mean(0), mean(1), mean(2));
    pred.var = Vec3(var, var, var);
    pred.u = std::sqrt(pred.var.x + pred.var.y + pred.var.z);
    return pred;
}

DenseField dense_field(const GPModel& model, const Volume3D& vol, int stride) {
    if (stride < 1) {
        throw InvalidInput("dense field stride must be >= 1");
    }

    DenseField field;
    field.grid_dims = Index3((vol.dims().x - 1) / stride + 1,
                             (vol.dims().y - 1) / stride + 1,
                             (vol.dims().z - 1) / stride + 1);
    field.stride = stride;
    field.spacing = vol.spacing() * static_cast<double>(stride);
    field.origin = vol.origin();

    const std::size_t total = static_cast<std::size_t>(field.grid_dims.count());
    field.mean.resize(total);
    field.u.resize(total);

    std::size_t out = 0;
    for (int l = 0; l < field.grid_dims.z; ++l) {
        for (int j = 0; j < field.grid_dims.y; ++j) {
            for (int i = 0; i < field.grid_dims.x; ++i, ++out) {
                const Vec3 p = vol.voxel_to_world(Vec3(static_cast<double>(i * stride),
                                                       static_cast<double>(j * stride),
                                                       static_cast<double>(l * stride)));
                const Prediction pred = gp_predict(model, p);
                field.mean[out] = pred.mean;
                field.u[out] = pred.u;
            }
        }
    }
    return field;
}

} // namespace uecorr
