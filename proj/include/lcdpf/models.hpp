#pragma once

#include "lcdpf/rng.hpp"

#include <Eigen/Core>

#include <variant>

namespace lcdpf {

/// Filter state: target position in metres (M = 2 in the tracking scenario,
/// but everything downstream of the models accepts any dimension).
using State = Eigen::VectorXd;

/// Ground-truth constant-velocity target (x, y, vx, vy).
struct TargetState {
    Eigen::Vector2d position = Eigen::Vector2d::Zero();
    Eigen::Vector2d velocity = Eigen::Vector2d::Zero();
};

struct MotionConfig {
    Eigen::Vector2d truth_driving_var{0.0033, 0.0033};   // diagonal of C_u'
    Eigen::Vector2d filter_driving_var{0.0528, 0.0528};  // diagonal of C_u
    double step_period = 1.0;

    void validate() const;
};

struct SensorSite {
    int index = 0;
    Eigen::Vector2d position = Eigen::Vector2d::Zero();
};

struct Measurement {
    double value = 0.0;
    int sensor = 0;
    int time = 0;
};

struct SensorConfig {
    double amplitude = 10.0;
    double noise_var = 0.00005;
    double min_dist_sq = 1e-4;

    void validate() const;
};

/// Constant-velocity transition matrix G (4x4) for period T.
Eigen::Matrix4d cv_transition(double period);
/// Constant-velocity noise gain W (4x2) for period T.
Eigen::Matrix<double, 4, 2> cv_noise_gain(double period);

/// τ_n = G τ_{n-1} + W u', u' ~ N(0, C_u').
TargetState propagate_truth(const TargetState& prev, const MotionConfig& cfg, Rng& rng);
/// Same map with the driving noise supplied explicitly.
TargetState propagate_truth(const TargetState& prev, const MotionConfig& cfg, const Eigen::Vector2d& noise);

/// Random-walk draw x = prev + u, u ~ N(0, C_u).
State sample_transition(const State& prev, const MotionConfig& cfg, Rng& rng);
double transition_logpdf(const State& x, const State& prev, const MotionConfig& cfg);

/// Noise-free amplitude A / max(|x - ξ|², d_min²).
double acoustic_amplitude(const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::Vector2d& site,
                          const SensorConfig& cfg);

Measurement sense(const Eigen::Vector2d& target_pos, const SensorSite& site, const SensorConfig& cfg, Rng& rng);

double local_log_likelihood(const Measurement& z, const Eigen::Ref<const Eigen::VectorXd>& x,
                            const SensorSite& site, const SensorConfig& cfg);

/// Scalar Gaussian log density log N(residual; 0, var).
double normal_logpdf(double residual, double var);

// ---- Sensor models used by the filters -------------------------------------

/// Acoustic amplitude sensor at a fixed site.
struct AcousticSensor {
    SensorSite site;
    SensorConfig cfg;
};

/// Linear-Gaussian surrogate z = hᵀx + offset + v. Its log-likelihood is an
/// exact quadratic in x, which makes it the reference case for the
/// polynomial likelihood expansion.
struct LinearSensor {
    Eigen::VectorXd h;
    double offset = 0.0;
    double noise_var = 1.0;
};

using SensorModel = std::variant<AcousticSensor, LinearSensor>;

/// Noise-free prediction h(x).
double predict(const SensorModel& s, const Eigen::Ref<const Eigen::VectorXd>& x);
double noise_var(const SensorModel& s);
double log_likelihood(const SensorModel& s, double z, const Eigen::Ref<const Eigen::VectorXd>& x);
double simulate(const SensorModel& s, const Eigen::Ref<const Eigen::VectorXd>& x, Rng& rng);

}  // namespace lcdpf
