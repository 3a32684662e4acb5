#pragma once

#include "lcdpf/gaussfilter.hpp"
#include "lcdpf/models.hpp"
#include "lcdpf/network.hpp"

#include <Eigen/Core>

#include <vector>

namespace lcdpf {

/// Gaussian moments of the temporary particles (one per column) with the
/// 1/J covariance convention, floored to stay positive definite.
Belief predicted_moments(const Eigen::MatrixXd& temp_particles);

/// Unscented update of N(μ', K·C') with this sensor's measurement: a
/// Gaussian stand-in for f(z_k | x) f^{1/K}(x | z_{1:n-1}).
Belief local_pseudoposterior(const Belief& predicted, double z, int num_sensors, const SensorModel& sensor,
                             const UtParams& ut);

/// Scalars per consensus round for fusion: M information-vector entries,
/// M(M+1)/2 precision entries and one round-synchronisation scalar.
inline long fusion_payload_size(long dim) { return dim + dim * (dim + 1) / 2 + 1; }

struct FusionResult {
    std::vector<Belief> proposals;  // per-sensor (μ_n, C_n)
    ConsensusReport report;
};

/// Product of the K Gaussian pseudoposteriors in information form:
/// C = (Σ C̃_k⁻¹)⁻¹, μ = C Σ C̃_k⁻¹ μ̃_k, with the sums taken by consensus.
FusionResult fuse_pseudoposteriors(const ConsensusWeights& weights, const std::vector<Belief>& pseudoposteriors,
                                   const SumSettings& sums);

}  // namespace lcdpf
