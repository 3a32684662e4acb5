#pragma once

#include "lcdpf/models.hpp"
#include "lcdpf/rng.hpp"

#include <Eigen/Core>

#include <stdexcept>
#include <vector>

namespace lcdpf {

/// Axis-aligned deployment region [0, width] x [0, height].
struct Region {
    double width = 40.0;
    double height = 40.0;
};

struct Topology {
    std::vector<SensorSite> sites;
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> adjacency;
    double comm_range = 0.0;

    int size() const { return static_cast<int>(sites.size()); }
    int degree(int i) const { return static_cast<int>(adjacency.row(i).count()); }
};

/// Doubly stochastic mixing matrix.
struct ConsensusWeights {
    Eigen::MatrixXd matrix;

    int size() const { return static_cast<int>(matrix.rows()); }
};

/// Communication accrued by one consensus call.
struct ConsensusReport {
    int iterations = 0;
    long scalars_sent_per_sensor = 0;

    ConsensusReport& operator+=(const ConsensusReport& o) {
        iterations += o.iterations;
        scalars_sent_per_sensor += o.scalars_sent_per_sensor;
        return *this;
    }
};

/// √K x √K grid of cell centres, each jittered uniformly by up to
/// ±jitter_frac of a cell per axis. Sites are ordered row-major in x.
std::vector<SensorSite> deploy_jittered_grid(int num_sensors, const Region& region, double jitter_frac, Rng& rng);

Topology build_topology(std::vector<SensorSite> sites, double comm_range);

/// Fully connected graph on the given sites (range ignored).
Topology complete_topology(std::vector<SensorSite> sites);

bool is_connected(const Topology& t);

/// W_ij = 1 / (1 + max(d_i, d_j)) on edges, W_ii = 1 - Σ_{j≠i} W_ij.
ConsensusWeights metropolis_weights(const Topology& t);

/// Synchronous average consensus on a K x D payload (row i is node i's
/// vector): I rounds of X ← W X. Each round every node broadcasts its D
/// scalars once.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> consensus_average(
    const ConsensusWeights& w, const Eigen::MatrixBase<Derived>& initial, int iterations,
    ConsensusReport* report = nullptr) {
    using Scalar = typename Derived::Scalar;
    if (iterations < 0) throw std::invalid_argument("consensus iteration count must be non-negative");
    if (initial.rows() != w.size()) throw std::invalid_argument("consensus payload rows must match node count");
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> mix = w.matrix.template cast<Scalar>();
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> x = initial;
    for (int it = 0; it < iterations; ++it) x = (mix * x).eval();
    if (report) {
        report->iterations += iterations;
        report->scalars_sent_per_sensor += static_cast<long>(iterations) * static_cast<long>(initial.cols());
    }
    return x;
}

/// Consensus estimate of the network-wide sum: K times the consensus average.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> consensus_sum(
    const ConsensusWeights& w, const Eigen::MatrixBase<Derived>& initial, int iterations,
    ConsensusReport* report = nullptr) {
    using Scalar = typename Derived::Scalar;
    return Scalar(w.size()) * consensus_average(w, initial, iterations, report);
}

/// Rank-one broadcast of the exact column sums to every node. Used as the
/// oracle bypass of consensus_sum; accrues no communication.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> exact_sum(
    const Eigen::MatrixBase<Derived>& initial) {
    return initial.colwise().sum().replicate(initial.rows(), 1);
}

/// How the per-node sums of LC and proposal fusion are obtained.
struct SumSettings {
    int iterations = 15;
    bool exact = false;

    template <typename Derived>
    Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> sum(
        const ConsensusWeights& w, const Eigen::MatrixBase<Derived>& initial, ConsensusReport* report) const {
        if (initial.rows() != w.size()) throw std::invalid_argument("consensus payload rows must match node count");
        return exact ? exact_sum(initial) : consensus_sum(w, initial, iterations, report);
    }
};

}  // namespace lcdpf
