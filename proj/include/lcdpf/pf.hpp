#pragma once

#include "lcdpf/gaussfilter.hpp"
#include "lcdpf/lc.hpp"
#include "lcdpf/models.hpp"
#include "lcdpf/network.hpp"
#include "lcdpf/proposal.hpp"
#include "lcdpf/rng.hpp"

#include <Eigen/Core>

#include <span>
#include <string>
#include <vector>

namespace lcdpf {

/// Weighted particles, one state per column. Log-weights are normalized so
/// that their log-sum-exp is zero.
struct ParticleSet {
    Eigen::MatrixXd particles;
    Eigen::VectorXd log_weights;

    Eigen::Index size() const { return particles.cols(); }
    Eigen::VectorXd weights() const { return log_weights.array().exp(); }
};

enum class FilterVariant { LcDpf, LcDpfNa, Cpf };

std::string to_string(FilterVariant v);
FilterVariant parse_variant(const std::string& s);

/// Log-JLF values below (max - kLogJlfFloor) are raised to that level before
/// they enter the importance weights.
inline constexpr double kLogJlfFloor = 700.0;

double log_sum_exp(const Eigen::VectorXd& v);

/// Normalizes in place. Returns false and resets to uniform weights when no
/// entry is finite.
bool normalize_log_weights(Eigen::VectorXd& log_weights);

ParticleSet initialize(const Belief& prior, Eigen::Index count, Rng& rng);

/// Systematic resampling with an explicit stratum offset u ∈ [0, 1/J).
Eigen::MatrixXd resample_systematic(const ParticleSet& ps, double offset);
Eigen::MatrixXd resample_systematic(const ParticleSet& ps, Rng& rng);

/// Weighted particle mean.
State estimate(const ParticleSet& ps);

/// Draws `count` states from N(mean, cov) using its Cholesky factor.
Eigen::MatrixXd sample_gaussian(const Belief& b, Eigen::Index count, Rng& rng);

struct FilterSettings {
    FilterVariant variant = FilterVariant::LcDpf;
    MotionConfig motion;
    int poly_degree = 6;
    SumSettings consensus;
    UtParams ut;
    /// Basis whitening for LC-DPF-NA, which has no shared proposal to whiten
    /// with (the deployment region mapped to [-1, 1]^M).
    Whitening<double> fixed_whitening = Whitening<double>::identity(2);
    /// Oracle bypass of likelihood consensus: weight with the exact joint
    /// log-likelihood (centralized knowledge, no LC traffic).
    bool exact_likelihood = false;
};

struct SensorFilterState {
    int sensor = 0;
    ParticleSet set;
    Rng rng;
};

struct CentralFilterState {
    ParticleSet set;
    Rng rng;
};

struct StepDiagnostics {
    int degenerate_weights = 0;
    int rank_deficient_fits = 0;

    StepDiagnostics& operator+=(const StepDiagnostics& o) {
        degenerate_weights += o.degenerate_weights;
        rank_deficient_fits += o.rank_deficient_fits;
        return *this;
    }
};

struct DpfStepResult {
    std::vector<State> estimates;
    ConsensusReport likelihood_report;
    ConsensusReport fusion_report;
    StepDiagnostics diagnostics;
    std::vector<Belief> proposals;  // empty for LC-DPF-NA

    long scalars_sent_per_sensor() const {
        return likelihood_report.scalars_sent_per_sensor + fusion_report.scalars_sent_per_sensor;
    }
};

/// One time step of the distributed filter across all K sensors:
/// resample, predict, (adapt proposal), draw, likelihood consensus, weight,
/// estimate.
DpfStepResult dpf_step(std::vector<SensorFilterState>& states, std::span<const double> measurements,
                       std::span<const SensorModel> sensors, const ConsensusWeights& weights,
                       const FilterSettings& settings);

struct CpfStepResult {
    State estimate;
    StepDiagnostics diagnostics;
    Belief proposal;
};

/// Centralized filter: sequential unscented updates over all sensors for
/// the proposal, exact joint log-likelihood for the weights.
CpfStepResult cpf_step(CentralFilterState& state, std::span<const double> measurements,
                       std::span<const SensorModel> sensors, const FilterSettings& settings);

}  // namespace lcdpf
