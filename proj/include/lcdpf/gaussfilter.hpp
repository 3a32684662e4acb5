#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace lcdpf {

template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Smallest eigenvalue allowed in a covariance after an update.
inline constexpr double kCovarianceFloor = 1e-10;

/// Gaussian N(mean, cov). The covariance is kept symmetric positive definite.
template <typename Scalar>
struct GaussianBelief {
    Vec<Scalar> mean;
    Mat<Scalar> cov;

    Eigen::Index dim() const { return mean.size(); }
};

using Belief = GaussianBelief<double>;

/// (C + Cᵀ)/2 with eigenvalues raised to at least `floor`.
template <typename Derived>
Mat<typename Derived::Scalar> symmetrize_and_floor(const Eigen::MatrixBase<Derived>& cov,
                                                   typename Derived::Scalar floor = kCovarianceFloor) {
    using Scalar = typename Derived::Scalar;
    Mat<Scalar> sym = (cov + cov.transpose()) / Scalar(2);
    Eigen::SelfAdjointEigenSolver<Mat<Scalar>> es(sym);
    if (es.info() != Eigen::Success) throw std::runtime_error("covariance eigendecomposition failed");
    if (es.eigenvalues().minCoeff() >= floor) return sym;
    const Vec<Scalar> clamped = es.eigenvalues().cwiseMax(floor);
    Mat<Scalar> out = es.eigenvectors() * clamped.asDiagonal() * es.eigenvectors().transpose();
    return (out + out.transpose()) / Scalar(2);
}

/// Lower Cholesky factor; throws when `cov` is not positive definite.
template <typename Derived>
Mat<typename Derived::Scalar> cholesky_lower(const Eigen::MatrixBase<Derived>& cov) {
    Eigen::LLT<Mat<typename Derived::Scalar>> llt(cov);
    if (llt.info() != Eigen::Success) throw std::runtime_error("covariance is not positive definite");
    return llt.matrixL();
}

template <typename Scalar, typename Derived>
Scalar gaussian_logpdf(const GaussianBelief<Scalar>& b, const Eigen::MatrixBase<Derived>& x) {
    Eigen::LLT<Mat<Scalar>> llt(b.cov);
    if (llt.info() != Eigen::Success) throw std::runtime_error("covariance is not positive definite");
    const Vec<Scalar> y = llt.matrixL().solve((x - b.mean).eval());
    const Scalar log_det = Scalar(2) * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    return Scalar(-0.5) * (y.squaredNorm() + log_det +
                           Scalar(b.dim()) * std::log(Scalar(2) * std::numbers::pi_v<Scalar>));
}

/// Sigma-point spread parameter κ; the classic default is κ = 3 − M.
struct UtParams {
    double kappa = 1.0;

    static UtParams classic(Eigen::Index dim) { return {3.0 - static_cast<double>(dim)}; }
};

/// 2M+1 points stored column-wise with matching weights.
template <typename Scalar>
struct SigmaPointSet {
    Mat<Scalar> points;
    Vec<Scalar> weights;
};

template <typename Scalar>
SigmaPointSet<Scalar> sigma_points(const GaussianBelief<Scalar>& b, const UtParams& p) {
    const Eigen::Index m = b.dim();
    const Scalar lambda = Scalar(m) + Scalar(p.kappa);
    if (!(lambda > Scalar(0))) throw std::invalid_argument("sigma points need M + kappa > 0");
    const Mat<Scalar> root = cholesky_lower(Mat<Scalar>(lambda * b.cov));

    SigmaPointSet<Scalar> s;
    s.points.resize(m, 2 * m + 1);
    s.weights.resize(2 * m + 1);
    s.points.col(0) = b.mean;
    s.weights(0) = Scalar(p.kappa) / lambda;
    for (Eigen::Index i = 0; i < m; ++i) {
        s.points.col(1 + i) = b.mean + root.col(i);
        s.points.col(1 + m + i) = b.mean - root.col(i);
        s.weights(1 + i) = s.weights(1 + m + i) = Scalar(1) / (Scalar(2) * lambda);
    }
    return s;
}

/// Unscented measurement update for a scalar measurement z = h(x) + v,
/// v ~ N(0, noise_var). `h` is any callable taking a state column.
template <typename Scalar, typename MeasurementFn>
GaussianBelief<Scalar> unscented_update(const GaussianBelief<Scalar>& prior, Scalar z, MeasurementFn&& h,
                                        Scalar noise_var, const UtParams& p) {
    const SigmaPointSet<Scalar> s = sigma_points(prior, p);
    const Eigen::Index n = s.points.cols();

    Vec<Scalar> predicted(n);
    for (Eigen::Index i = 0; i < n; ++i) predicted(i) = h(s.points.col(i));
    const Scalar z_hat = s.weights.dot(predicted);

    Scalar innovation_var = noise_var;
    Vec<Scalar> cross = Vec<Scalar>::Zero(prior.dim());
    for (Eigen::Index i = 0; i < n; ++i) {
        const Scalar dz = predicted(i) - z_hat;
        innovation_var += s.weights(i) * dz * dz;
        cross += s.weights(i) * (s.points.col(i) - prior.mean) * dz;
    }
    if (!(innovation_var > Scalar(0))) throw std::runtime_error("non-positive innovation variance");

    const Vec<Scalar> gain = cross / innovation_var;
    GaussianBelief<Scalar> post;
    post.mean = prior.mean + gain * (z - z_hat);
    post.cov = symmetrize_and_floor(Mat<Scalar>(prior.cov - innovation_var * gain * gain.transpose()));
    return post;
}

/// Largest accepted mean shift of an update, in prior standard deviations
/// (Mahalanobis distance under the prior covariance).
inline constexpr double kUpdateShiftGate = 4.0;

/// Unscented update that returns the prior unchanged when the posterior mean
/// moves further than `gate` prior standard deviations. For a linear-Gaussian
/// model the shift is at most sqrt(normalized innovation), so larger shifts
/// signal that the sigma points failed to resolve the measurement function
/// (e.g. a target next to an inverse-square sensor).
template <typename Scalar, typename MeasurementFn>
GaussianBelief<Scalar> gated_unscented_update(const GaussianBelief<Scalar>& prior, Scalar z, MeasurementFn&& h,
                                              Scalar noise_var, const UtParams& p, bool* rejected = nullptr,
                                              Scalar gate = Scalar(kUpdateShiftGate)) {
    GaussianBelief<Scalar> post = unscented_update(prior, z, h, noise_var, p);
    Eigen::LLT<Mat<Scalar>> llt(prior.cov);
    const Scalar shift = llt.matrixL().solve((post.mean - prior.mean).eval()).norm();
    const bool reject = !(shift <= gate);
    if (rejected) *rejected = reject;
    return reject ? prior : post;
}

}  // namespace lcdpf
