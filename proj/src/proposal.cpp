#include "lcdpf/proposal.hpp"

#include <Eigen/Cholesky>

#include <stdexcept>

namespace lcdpf {

Belief predicted_moments(const Eigen::MatrixXd& temp_particles) {
    const Eigen::Index j = temp_particles.cols();
    if (j < 2) throw std::invalid_argument("predicted moments need at least two particles");
    Belief b;
    b.mean = temp_particles.rowwise().mean();
    const Eigen::MatrixXd second = temp_particles * temp_particles.transpose() / static_cast<double>(j);
    b.cov = symmetrize_and_floor(Eigen::MatrixXd(second - b.mean * b.mean.transpose()));
    return b;
}

Belief local_pseudoposterior(const Belief& predicted, double z, int num_sensors, const SensorModel& sensor,
                             const UtParams& ut) {
    if (num_sensors < 1) throw std::invalid_argument("sensor count must be positive");
    const Belief inflated{predicted.mean, static_cast<double>(num_sensors) * predicted.cov};
    return gated_unscented_update(
        inflated, z, [&](const auto& x) { return predict(sensor, x); }, noise_var(sensor), ut);
}

FusionResult fuse_pseudoposteriors(const ConsensusWeights& weights, const std::vector<Belief>& pseudoposteriors,
                                   const SumSettings& sums) {
    if (pseudoposteriors.empty()) throw std::invalid_argument("fusion needs at least one pseudoposterior");
    const Eigen::Index m = pseudoposteriors.front().dim();
    const Eigen::Index tri = m * (m + 1) / 2;
    const auto k = static_cast<Eigen::Index>(pseudoposteriors.size());

    Eigen::MatrixXd payload(k, fusion_payload_size(m));
    for (Eigen::Index s = 0; s < k; ++s) {
        const Belief& b = pseudoposteriors[static_cast<std::size_t>(s)];
        if (b.dim() != m) throw std::invalid_argument("pseudoposteriors differ in dimension");
        Eigen::LLT<Eigen::MatrixXd> llt(b.cov);
        if (llt.info() != Eigen::Success) throw std::runtime_error("pseudoposterior covariance is not invertible");
        const Eigen::MatrixXd precision = llt.solve(Eigen::MatrixXd::Identity(m, m));
        Eigen::Index c = 0;
        for (Eigen::Index i = 0; i < m; ++i)
            for (Eigen::Index jj = i; jj < m; ++jj) payload(s, c++) = precision(i, jj);
        payload.block(s, tri, 1, m) = (precision * b.mean).transpose();
        payload(s, tri + m) = 1.0;
    }

    FusionResult out;
    const Eigen::MatrixXd summed = sums.sum(weights, payload, &out.report);
    out.proposals.reserve(pseudoposteriors.size());
    for (Eigen::Index s = 0; s < k; ++s) {
        Eigen::MatrixXd precision(m, m);
        Eigen::Index c = 0;
        for (Eigen::Index i = 0; i < m; ++i)
            for (Eigen::Index jj = i; jj < m; ++jj) precision(i, jj) = precision(jj, i) = summed(s, c++);
        Eigen::LLT<Eigen::MatrixXd> llt(precision);
        if (llt.info() != Eigen::Success) throw std::runtime_error("summed precision is singular");
        Belief q;
        q.cov = llt.solve(Eigen::MatrixXd::Identity(m, m));
        q.cov = (q.cov + q.cov.transpose()) / 2.0;
        q.mean = llt.solve(Eigen::VectorXd(summed.block(s, tri, 1, m).transpose()));
        out.proposals.push_back(std::move(q));
    }
    return out;
}

}  // namespace lcdpf
