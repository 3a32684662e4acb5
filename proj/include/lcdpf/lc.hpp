#pragma once

#include "lcdpf/models.hpp"
#include "lcdpf/network.hpp"
#include "lcdpf/polybasis.hpp"

#include <Eigen/Core>

#include <vector>

namespace lcdpf {

using Basis = MonomialBasis<double>;

/// Approximate joint log-likelihood Σ_r a_r φ_r(x). When the basis does not
/// transmit its constant, a(0) is zero and the value is defined only up to an
/// additive constant.
struct JlfApprox {
    Eigen::VectorXd a;
    Basis basis;
};

/// Least-squares expansion of log f(z | x) over this sensor's particles
/// (one state per column).
LeastSquaresFit<double> local_coefficients(const SensorModel& sensor, double z, const Eigen::MatrixXd& particles,
                                           const Basis& basis);

struct LikelihoodConsensusResult {
    std::vector<Eigen::VectorXd> sums;  // per-sensor estimate of a = Σ_k α_k
    ConsensusReport report;
};

/// Sums the per-sensor coefficient vectors. Only the transmitted part goes
/// through consensus; an untransmitted constant comes back as zero.
LikelihoodConsensusResult likelihood_consensus(const ConsensusWeights& weights,
                                               const std::vector<Eigen::VectorXd>& alphas, bool include_constant,
                                               const SumSettings& sums);

double log_jlf(const JlfApprox& approx, const Eigen::Ref<const Eigen::VectorXd>& x);
/// Batch evaluation over the columns of `points`.
Eigen::VectorXd log_jlf_batch(const JlfApprox& approx, const Eigen::MatrixXd& points);

}  // namespace lcdpf
