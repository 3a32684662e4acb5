#pragma once

#include "lcdpf/models.hpp"
#include "lcdpf/network.hpp"
#include "lcdpf/pf.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace lcdpf {

/// Every constant of the tracking experiment. Defaults reproduce the
/// published scenario except `runs` and `steps`, which default to desk scale
/// (20 runs of 50 steps; the full experiment is 1000 x 200).
struct ScenarioConfig {
    int K = 25;
    double region_width = 40.0;
    double region_height = 40.0;
    double comm_range = 18.0;
    double jitter_frac = 0.4;
    bool fully_connected = false;
    bool rejitter_per_run = false;

    double A = 10.0;
    double noise_var = 0.00005;
    double min_dist_sq = 1e-4;

    Eigen::Vector2d filter_driving_var{0.0528, 0.0528};
    Eigen::Vector2d truth_driving_var{0.0033, 0.0033};
    double step_period = 1.0;

    /// Initial target position is uniform in a centred square of this side.
    double init_box = 20.0;
    Eigen::Vector2d init_velocity{0.2, 0.2};
    /// Prior f(x_0): N(true initial position, diag(prior_var)).
    Eigen::Vector2d prior_var{1.0, 1.0};
    /// Redraw truth trajectories (from the same truth stream) until the
    /// whole trajectory stays inside the region.
    bool keep_truth_in_region = true;

    int R_p = 6;
    int I = 15;
    bool exact_consensus = false;
    bool exact_likelihood = false;
    /// Seed every sensor filter of a run identically, so sensors that receive
    /// identical consensus results also hold identical particle clouds.
    bool shared_sensor_streams = true;
    int J = 200;
    int steps = 50;
    int runs = 20;
    FilterVariant variant = FilterVariant::LcDpf;
    double ut_kappa = 1.0;
    std::uint64_t seed = 1;

    void validate() const;

    Region region() const { return {region_width, region_height}; }
    MotionConfig motion() const;
    SensorConfig sensor() const;
    FilterSettings filter_settings() const;

    /// Ordered (key, value) pairs in the config-file syntax.
    std::vector<std::pair<std::string, std::string>> echo() const;
};

/// Parses `key = value` lines ('#' starts a comment). Vector-valued keys
/// take comma-separated components. Unknown keys are errors.
ScenarioConfig parse_config(const std::string& text, ScenarioConfig base = {});
ScenarioConfig load_config(const std::string& path);
std::string format_config(const ScenarioConfig& cfg);

}  // namespace lcdpf
