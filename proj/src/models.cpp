#include "lcdpf/models.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace lcdpf {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};

}  // namespace

void MotionConfig::validate() const {
    if (!(truth_driving_var.minCoeff() > 0.0) || !(filter_driving_var.minCoeff() > 0.0))
        throw std::invalid_argument("driving-noise variances must be strictly positive");
    if (!(step_period > 0.0)) throw std::invalid_argument("step_period must be positive");
}

void SensorConfig::validate() const {
    if (!(amplitude > 0.0)) throw std::invalid_argument("amplitude A must be positive");
    if (!(noise_var > 0.0)) throw std::invalid_argument("measurement noise variance must be positive");
    if (!(min_dist_sq > 0.0)) throw std::invalid_argument("min_dist_sq must be positive");
}

Eigen::Matrix4d cv_transition(double period) {
    Eigen::Matrix4d g = Eigen::Matrix4d::Identity();
    g(0, 2) = period;
    g(1, 3) = period;
    return g;
}

Eigen::Matrix<double, 4, 2> cv_noise_gain(double period) {
    Eigen::Matrix<double, 4, 2> w = Eigen::Matrix<double, 4, 2>::Zero();
    w(0, 0) = w(1, 1) = 0.5 * period * period;
    w(2, 0) = w(3, 1) = period;
    return w;
}

TargetState propagate_truth(const TargetState& prev, const MotionConfig& cfg, const Eigen::Vector2d& noise) {
    Eigen::Vector4d tau;
    tau << prev.position, prev.velocity;
    const Eigen::Vector4d next = cv_transition(cfg.step_period) * tau + cv_noise_gain(cfg.step_period) * noise;
    return {next.head<2>(), next.tail<2>()};
}

TargetState propagate_truth(const TargetState& prev, const MotionConfig& cfg, Rng& rng) {
    Eigen::Vector2d u;
    u(0) = std::sqrt(cfg.truth_driving_var(0)) * rng.normal();
    u(1) = std::sqrt(cfg.truth_driving_var(1)) * rng.normal();
    return propagate_truth(prev, cfg, u);
}

State sample_transition(const State& prev, const MotionConfig& cfg, Rng& rng) {
    State next = prev;
    for (Eigen::Index i = 0; i < next.size(); ++i)
        next(i) += std::sqrt(cfg.filter_driving_var(i)) * rng.normal();
    return next;
}

double transition_logpdf(const State& x, const State& prev, const MotionConfig& cfg) {
    double lp = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) lp += normal_logpdf(x(i) - prev(i), cfg.filter_driving_var(i));
    return lp;
}

double normal_logpdf(double residual, double var) {
    return -0.5 * (std::log(2.0 * std::numbers::pi * var) + residual * residual / var);
}

double acoustic_amplitude(const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::Vector2d& site,
                          const SensorConfig& cfg) {
    const double d2 = (x.head<2>() - site).squaredNorm();
    return cfg.amplitude / std::max(d2, cfg.min_dist_sq);
}

Measurement sense(const Eigen::Vector2d& target_pos, const SensorSite& site, const SensorConfig& cfg, Rng& rng) {
    return {acoustic_amplitude(target_pos, site.position, cfg) + std::sqrt(cfg.noise_var) * rng.normal(), site.index,
            0};
}

double local_log_likelihood(const Measurement& z, const Eigen::Ref<const Eigen::VectorXd>& x,
                            const SensorSite& site, const SensorConfig& cfg) {
    return normal_logpdf(z.value - acoustic_amplitude(x, site.position, cfg), cfg.noise_var);
}

double predict(const SensorModel& s, const Eigen::Ref<const Eigen::VectorXd>& x) {
    return std::visit(Overloaded{
                          [&](const AcousticSensor& a) { return acoustic_amplitude(x, a.site.position, a.cfg); },
                          [&](const LinearSensor& l) { return l.h.dot(x) + l.offset; },
                      },
                      s);
}

double noise_var(const SensorModel& s) {
    return std::visit(Overloaded{
                          [](const AcousticSensor& a) { return a.cfg.noise_var; },
                          [](const LinearSensor& l) { return l.noise_var; },
                      },
                      s);
}

double log_likelihood(const SensorModel& s, double z, const Eigen::Ref<const Eigen::VectorXd>& x) {
    return normal_logpdf(z - predict(s, x), noise_var(s));
}

double simulate(const SensorModel& s, const Eigen::Ref<const Eigen::VectorXd>& x, Rng& rng) {
    return predict(s, x) + std::sqrt(noise_var(s)) * rng.normal();
}

}  // namespace lcdpf
