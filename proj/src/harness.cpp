#include "lcdpf/harness.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

#ifndef LCDPF_VERSION
#define LCDPF_VERSION "unknown"
#endif

namespace lcdpf {

namespace {

constexpr int kMaxTruthAttempts = 1000000;

std::uint64_t fnv1a(std::uint64_t h, double v) {
    unsigned char bytes[sizeof(double)];
    std::memcpy(bytes, &v, sizeof v);
    for (unsigned char b : bytes) {
        h ^= b;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::vector<SensorModel> sensor_models(const ScenarioConfig& cfg, const Topology& t) {
    std::vector<SensorModel> out;
    out.reserve(t.sites.size());
    for (const SensorSite& s : t.sites) out.emplace_back(AcousticSensor{s, cfg.sensor()});
    return out;
}

}  // namespace

std::string version_string() { return LCDPF_VERSION; }

Topology make_topology(const ScenarioConfig& cfg, int run) {
    Rng rng = Rng::derive(cfg.seed, {kDeployment, static_cast<std::uint64_t>(cfg.rejitter_per_run ? run : 0)});
    std::vector<SensorSite> sites = deploy_jittered_grid(cfg.K, cfg.region(), cfg.jitter_frac, rng);
    if (cfg.fully_connected || sites.size() < 2) return complete_topology(std::move(sites));
    return build_topology(std::move(sites), cfg.comm_range);
}

RunData simulate_run(const ScenarioConfig& cfg, const Topology& topology, int run) {
    Rng truth_rng = Rng::derive(cfg.seed, {kTruth, static_cast<std::uint64_t>(run)});
    Rng meas_rng = Rng::derive(cfg.seed, {kMeasurement, static_cast<std::uint64_t>(run)});
    const MotionConfig motion = cfg.motion();
    const SensorConfig sensor = cfg.sensor();

    const auto inside = [&](const Eigen::Vector2d& p) {
        return p(0) >= 0.0 && p(0) <= cfg.region_width && p(1) >= 0.0 && p(1) <= cfg.region_height;
    };

    RunData d;
    for (int attempt = 0;; ++attempt) {
        if (attempt == kMaxTruthAttempts)
            throw std::runtime_error("no truth trajectory stayed inside the region after " +
                                     std::to_string(kMaxTruthAttempts) + " attempts");
        d.truth.clear();
        TargetState tau;
        tau.position = {truth_rng.uniform(-0.5, 0.5) * cfg.init_box + cfg.region_width / 2.0,
                        truth_rng.uniform(-0.5, 0.5) * cfg.init_box + cfg.region_height / 2.0};
        tau.velocity = cfg.init_velocity;
        d.truth.push_back(tau);
        bool ok = true;
        for (int n = 1; n <= cfg.steps; ++n) {
            tau = propagate_truth(tau, motion, truth_rng);
            d.truth.push_back(tau);
            if (cfg.keep_truth_in_region && !inside(tau.position)) {
                ok = false;
                break;
            }
        }
        if (ok) break;
    }

    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (int n = 1; n <= cfg.steps; ++n) {
        std::vector<double> zn;
        zn.reserve(topology.sites.size());
        for (const SensorSite& s : topology.sites) {
            zn.push_back(sense(d.truth[static_cast<std::size_t>(n)].position, s, sensor, meas_rng).value);
            h = fnv1a(h, zn.back());
        }
        d.z.push_back(std::move(zn));
    }
    d.hash = h;
    return d;
}

CommBudget comm_budget(const ScenarioConfig& cfg) {
    CommBudget b;
    if (cfg.variant == FilterVariant::Cpf || cfg.exact_consensus) return b;
    const long lc = cfg.exact_likelihood ? 0 : static_cast<long>(cfg.I) * (basis_size(2, cfg.R_p) - 1);
    const long adapt = cfg.variant == FilterVariant::LcDpf ? static_cast<long>(cfg.I) * fusion_payload_size(2) : 0;
    b.per_sensor = lc + adapt;
    b.network = static_cast<long>(cfg.K) * b.per_sensor;
    return b;
}

std::vector<double> rmse_series(const RunRecord& rec) {
    std::vector<double> out(static_cast<std::size_t>(rec.steps), 0.0);
    for (int n = 0; n < rec.steps; ++n) {
        double acc = 0.0;
        for (int r = 0; r < rec.runs; ++r)
            for (int s = 0; s < rec.sensors; ++s) acc += rec.at(r, n, s);
        out[static_cast<std::size_t>(n)] = std::sqrt(acc / (static_cast<double>(rec.runs) * rec.sensors));
    }
    return out;
}

double armse(const std::vector<double>& series) {
    if (series.empty()) throw std::invalid_argument("ARMSE of an empty series");
    double acc = 0.0;
    for (double v : series) acc += v * v;
    return std::sqrt(acc / static_cast<double>(series.size()));
}

double run_armse(const RunRecord& rec, int run) {
    double acc = 0.0;
    for (int n = 0; n < rec.steps; ++n)
        for (int s = 0; s < rec.sensors; ++s) acc += rec.at(run, n, s);
    return std::sqrt(acc / (static_cast<double>(rec.steps) * rec.sensors));
}

ScenarioResult run_scenario(const ScenarioConfig& cfg, const StepObserver& observer) {
    cfg.validate();
    const FilterSettings settings = cfg.filter_settings();
    const bool central = cfg.variant == FilterVariant::Cpf;

    ScenarioResult res;
    RunRecord& rec = res.record;
    rec.variant = cfg.variant;
    rec.runs = cfg.runs;
    rec.steps = cfg.steps;
    rec.sensors = central ? 1 : cfg.K;
    rec.err_sq.assign(static_cast<std::size_t>(rec.runs) * rec.steps * rec.sensors, 0.0);

    Topology topology;
    ConsensusWeights weights;
    long accrued = 0;
    for (int run = 0; run < cfg.runs; ++run) {
        if (run == 0 || cfg.rejitter_per_run) {
            topology = make_topology(cfg, run);
            if (!is_connected(topology))
                throw std::runtime_error("sensor deployment for seed " + std::to_string(cfg.seed) +
                                         (cfg.rejitter_per_run ? " (run " + std::to_string(run) + ")" : "") +
                                         " is not connected at comm_range " + std::to_string(cfg.comm_range));
            weights = metropolis_weights(topology);
        }
        const RunData data = simulate_run(cfg, topology, run);
        rec.measurement_hash.push_back(data.hash);
        const std::vector<SensorModel> sensors = sensor_models(cfg, topology);
        const Belief prior{data.truth[0].position, cfg.prior_var.asDiagonal().toDenseMatrix()};
        StepDiagnostics diag;

        if (central) {
            CentralFilterState st;
            st.rng = Rng::derive(cfg.seed, {kCentralFilter, static_cast<std::uint64_t>(run)});
            st.set = initialize(prior, cfg.J, st.rng);
            for (int n = 1; n <= cfg.steps; ++n) {
                const CpfStepResult step = cpf_step(st, data.z[n - 1], sensors, settings);
                diag += step.diagnostics;
                rec.at(run, n - 1, 0) = (step.estimate - data.truth[n].position).squaredNorm();
                if (observer) observer(run, n, {step.estimate}, data.truth[n].position);
            }
        } else {
            std::vector<SensorFilterState> states(static_cast<std::size_t>(cfg.K));
            for (int k = 0; k < cfg.K; ++k) {
                auto& st = states[static_cast<std::size_t>(k)];
                st.sensor = k;
                st.rng = cfg.shared_sensor_streams
                             ? Rng::derive(cfg.seed, {kSensorFilter, static_cast<std::uint64_t>(run)})
                             : Rng::derive(cfg.seed, {kSensorFilter, static_cast<std::uint64_t>(run),
                                                      static_cast<std::uint64_t>(k)});
                st.set = initialize(prior, cfg.J, st.rng);
            }
            for (int n = 1; n <= cfg.steps; ++n) {
                const DpfStepResult step = dpf_step(states, data.z[n - 1], sensors, weights, settings);
                diag += step.diagnostics;
                accrued += step.scalars_sent_per_sensor();
                for (int k = 0; k < cfg.K; ++k)
                    rec.at(run, n - 1, k) =
                        (step.estimates[static_cast<std::size_t>(k)] - data.truth[n].position).squaredNorm();
                if (observer) observer(run, n, step.estimates, data.truth[n].position);
            }
        }
        rec.diagnostics.push_back(diag);
        res.summary.diagnostics += diag;
    }

    MetricsSummary& sum = res.summary;
    sum.rmse = rmse_series(rec);
    sum.armse = armse(sum.rmse);
    sum.formula = comm_budget(cfg);
    sum.measured_total_per_sensor = accrued;
    const long step_count = static_cast<long>(cfg.runs) * cfg.steps;
    sum.measured.per_sensor = accrued / step_count;
    sum.measured.network = static_cast<long>(cfg.K) * sum.measured.per_sensor;
    return res;
}

}  // namespace lcdpf
