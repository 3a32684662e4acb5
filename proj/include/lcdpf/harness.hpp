#pragma once

#include "lcdpf/config.hpp"
#include "lcdpf/network.hpp"
#include "lcdpf/pf.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace lcdpf {

/// Squared position errors on the full (run, n, sensor) grid, plus per-run
/// bookkeeping. The CPF has a single estimator, stored as sensor 0.
struct RunRecord {
    FilterVariant variant = FilterVariant::LcDpf;
    int runs = 0;
    int steps = 0;
    int sensors = 0;
    std::vector<double> err_sq;                   // index ((run * steps) + n) * sensors + sensor, n zero-based
    std::vector<std::uint64_t> measurement_hash;  // per run
    std::vector<StepDiagnostics> diagnostics;     // per run

    double& at(int run, int n, int sensor) {
        return err_sq[(static_cast<std::size_t>(run) * steps + n) * sensors + sensor];
    }
    double at(int run, int n, int sensor) const {
        return err_sq[(static_cast<std::size_t>(run) * steps + n) * sensors + sensor];
    }
};

struct CommBudget {
    long per_sensor = 0;  // scalars sent by one sensor in one time step
    long network = 0;     // K x per_sensor
};

/// Reference network totals of the two comparison filters, per time step.
inline constexpr long kReferenceDpf1NetworkTotal = 76875;
inline constexpr long kReferenceDpf2NetworkTotal = 1875;

struct MetricsSummary {
    std::vector<double> rmse;  // RMSE_n, n = 1..steps
    double armse = 0.0;
    CommBudget measured;  // accrued by the consensus engine, averaged per time step
    CommBudget formula;
    StepDiagnostics diagnostics;
    long measured_total_per_sensor = 0;  // all steps and runs
};

/// Truth trajectory and measurements of one Monte Carlo run.
struct RunData {
    std::vector<TargetState> truth;           // n = 0..steps
    std::vector<std::vector<double>> z;       // [n-1][sensor]
    std::uint64_t hash = 0;
};

RunData simulate_run(const ScenarioConfig& cfg, const Topology& topology, int run);

/// Deployment for a given run (run is ignored unless rejitter_per_run).
Topology make_topology(const ScenarioConfig& cfg, int run = 0);

CommBudget comm_budget(const ScenarioConfig& cfg);

std::vector<double> rmse_series(const RunRecord& rec);
double armse(const std::vector<double>& series);
/// ARMSE of a single run (over its time steps and sensors).
double run_armse(const RunRecord& rec, int run);

struct ScenarioResult {
    RunRecord record;
    MetricsSummary summary;
};

/// Called after every time step with the per-sensor estimates (a single
/// entry for the CPF) and the true position.
using StepObserver =
    std::function<void(int run, int n, const std::vector<State>& estimates, const Eigen::Vector2d& truth)>;

ScenarioResult run_scenario(const ScenarioConfig& cfg, const StepObserver& observer = {});

/// Build identifier embedded in every output file.
std::string version_string();

}  // namespace lcdpf
