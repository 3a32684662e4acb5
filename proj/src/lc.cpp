#include "lcdpf/lc.hpp"

#include <stdexcept>

namespace lcdpf {

LeastSquaresFit<double> local_coefficients(const SensorModel& sensor, double z, const Eigen::MatrixXd& particles,
                                           const Basis& basis) {
    Eigen::VectorXd targets(particles.cols());
    for (Eigen::Index j = 0; j < particles.cols(); ++j) targets(j) = log_likelihood(sensor, z, particles.col(j));
    return fit_least_squares(basis, particles, targets);
}

LikelihoodConsensusResult likelihood_consensus(const ConsensusWeights& weights,
                                               const std::vector<Eigen::VectorXd>& alphas, bool include_constant,
                                               const SumSettings& sums) {
    if (alphas.empty()) throw std::invalid_argument("likelihood consensus needs at least one sensor");
    const Eigen::Index r = alphas.front().size();
    const Eigen::Index skip = include_constant ? 0 : 1;
    Eigen::MatrixXd payload(static_cast<Eigen::Index>(alphas.size()), r - skip);
    for (std::size_t k = 0; k < alphas.size(); ++k) {
        if (alphas[k].size() != r) throw std::invalid_argument("coefficient vectors differ in length");
        payload.row(static_cast<Eigen::Index>(k)) = alphas[k].tail(r - skip).transpose();
    }

    LikelihoodConsensusResult out;
    const Eigen::MatrixXd summed = sums.sum(weights, payload, &out.report);
    out.sums.reserve(alphas.size());
    for (Eigen::Index k = 0; k < summed.rows(); ++k) {
        Eigen::VectorXd a = Eigen::VectorXd::Zero(r);
        a.tail(r - skip) = summed.row(k).transpose();
        out.sums.push_back(std::move(a));
    }
    return out;
}

double log_jlf(const JlfApprox& approx, const Eigen::Ref<const Eigen::VectorXd>& x) {
    return approx.a.dot(eval_basis(approx.basis, x));
}

Eigen::VectorXd log_jlf_batch(const JlfApprox& approx, const Eigen::MatrixXd& points) {
    return design_matrix(approx.basis, points) * approx.a;
}

}  // namespace lcdpf
