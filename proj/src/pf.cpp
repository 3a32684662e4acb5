#include "lcdpf/pf.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace lcdpf {

std::string to_string(FilterVariant v) {
    switch (v) {
        case FilterVariant::LcDpf: return "lcdpf";
        case FilterVariant::LcDpfNa: return "lcdpf-na";
        case FilterVariant::Cpf: return "cpf";
    }
    return "unknown";
}

FilterVariant parse_variant(const std::string& s) {
    if (s == "lcdpf") return FilterVariant::LcDpf;
    if (s == "lcdpf-na") return FilterVariant::LcDpfNa;
    if (s == "cpf") return FilterVariant::Cpf;
    throw std::invalid_argument("unknown filter variant '" + s + "' (expected lcdpf, lcdpf-na or cpf)");
}

double log_sum_exp(const Eigen::VectorXd& v) {
    const double top = v.maxCoeff();
    if (!std::isfinite(top)) return top;
    return top + std::log((v.array() - top).exp().sum());
}

bool normalize_log_weights(Eigen::VectorXd& log_weights) {
    const Eigen::Index n = log_weights.size();
    bool any_finite = false;
    for (Eigen::Index j = 0; j < n; ++j) {
        if (std::isnan(log_weights(j))) log_weights(j) = -std::numeric_limits<double>::infinity();
        any_finite = any_finite || std::isfinite(log_weights(j));
    }
    if (!any_finite) {
        log_weights.setConstant(-std::log(static_cast<double>(n)));
        return false;
    }
    log_weights.array() -= log_sum_exp(log_weights);
    return true;
}

ParticleSet initialize(const Belief& prior, Eigen::Index count, Rng& rng) {
    if (count < 1) throw std::invalid_argument("particle count must be positive");
    ParticleSet ps;
    ps.particles = sample_gaussian(prior, count, rng);
    ps.log_weights = Eigen::VectorXd::Constant(count, -std::log(static_cast<double>(count)));
    return ps;
}

Eigen::MatrixXd resample_systematic(const ParticleSet& ps, double offset) {
    const Eigen::Index n = ps.size();
    const double step = 1.0 / static_cast<double>(n);
    const Eigen::VectorXd w = ps.weights();
    Eigen::MatrixXd out(ps.particles.rows(), n);
    double cumulative = w(0);
    Eigen::Index src = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
        const double u = offset + static_cast<double>(j) * step;
        while (u >= cumulative && src < n - 1) cumulative += w(++src);
        out.col(j) = ps.particles.col(src);
    }
    return out;
}

Eigen::MatrixXd resample_systematic(const ParticleSet& ps, Rng& rng) {
    return resample_systematic(ps, rng.uniform() / static_cast<double>(ps.size()));
}

State estimate(const ParticleSet& ps) {
    return ps.particles * ps.weights();
}

Eigen::MatrixXd sample_gaussian(const Belief& b, Eigen::Index count, Rng& rng) {
    const Eigen::MatrixXd lower = cholesky_lower(b.cov);
    Eigen::MatrixXd out(b.dim(), count);
    for (Eigen::Index j = 0; j < count; ++j) out.col(j) = b.mean + lower * rng.normal_vector(b.dim());
    return out;
}

namespace {

Eigen::VectorXd gaussian_logpdf_batch(const Belief& b, const Eigen::MatrixXd& points) {
    Eigen::LLT<Eigen::MatrixXd> llt(b.cov);
    if (llt.info() != Eigen::Success) throw std::runtime_error("proposal covariance is not positive definite");
    const Eigen::MatrixXd lower = llt.matrixL();
    const double log_norm = lower.diagonal().array().log().sum() +
                            0.5 * static_cast<double>(b.dim()) * std::log(2.0 * std::numbers::pi);
    const Eigen::MatrixXd y = lower.triangularView<Eigen::Lower>().solve(points.colwise() - b.mean);
    return (-0.5 * y.colwise().squaredNorm().array() - log_norm).matrix().transpose();
}

/// Shifts by the maximum and floors at -kLogJlfFloor.
Eigen::VectorXd clamp_log_jlf(Eigen::VectorXd values) {
    const double top = values.maxCoeff();
    if (!std::isfinite(top)) return values;
    return (values.array() - top).cwiseMax(-kLogJlfFloor).matrix();
}

/// log f̃(z|x_j) + log f(x_j | x̄_j) - log q(x_j), with draw j paired with
/// resampled particle j.
Eigen::VectorXd importance_log_weights(const Eigen::VectorXd& log_jlf_values, const Eigen::MatrixXd& particles,
                                       const Eigen::MatrixXd& resampled, const Belief& proposal,
                                       const MotionConfig& motion) {
    Eigen::VectorXd lw = clamp_log_jlf(log_jlf_values) - gaussian_logpdf_batch(proposal, particles);
    for (Eigen::Index j = 0; j < particles.cols(); ++j)
        lw(j) += transition_logpdf(particles.col(j), resampled.col(j), motion);
    return lw;
}

Eigen::VectorXd exact_log_jlf(const Eigen::MatrixXd& points, std::span<const double> measurements,
                              std::span<const SensorModel> sensors) {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(points.cols());
    for (Eigen::Index j = 0; j < points.cols(); ++j)
        for (std::size_t s = 0; s < sensors.size(); ++s) out(j) += log_likelihood(sensors[s], measurements[s], points.col(j));
    return out;
}

Eigen::MatrixXd propagate_particles(const Eigen::MatrixXd& resampled, const MotionConfig& motion, Rng& rng) {
    Eigen::MatrixXd temp(resampled.rows(), resampled.cols());
    for (Eigen::Index j = 0; j < resampled.cols(); ++j) temp.col(j) = sample_transition(resampled.col(j), motion, rng);
    return temp;
}

}  // namespace

DpfStepResult dpf_step(std::vector<SensorFilterState>& states, std::span<const double> measurements,
                       std::span<const SensorModel> sensors, const ConsensusWeights& weights,
                       const FilterSettings& settings) {
    const std::size_t k = states.size();
    if (k == 0 || measurements.size() != k || sensors.size() != k || static_cast<std::size_t>(weights.size()) != k)
        throw std::invalid_argument("dpf_step needs one measurement, sensor model and weight row per filter");
    if (settings.variant == FilterVariant::Cpf) throw std::invalid_argument("dpf_step does not run the CPF variant");
    const bool adapted = settings.variant == FilterVariant::LcDpf;

    DpfStepResult out;
    std::vector<Eigen::MatrixXd> resampled(k), temp(k);
    for (std::size_t s = 0; s < k; ++s) {
        resampled[s] = resample_systematic(states[s].set, states[s].rng);
        temp[s] = propagate_particles(resampled[s], settings.motion, states[s].rng);
    }

    std::vector<Eigen::MatrixXd> draws(k);
    std::vector<Basis> bases;
    bases.reserve(k);
    if (adapted) {
        std::vector<Belief> pseudo;
        pseudo.reserve(k);
        for (std::size_t s = 0; s < k; ++s)
            pseudo.push_back(local_pseudoposterior(predicted_moments(temp[s]), measurements[s], static_cast<int>(k),
                                                   sensors[s], settings.ut));
        FusionResult fused = fuse_pseudoposteriors(weights, pseudo, settings.consensus);
        out.fusion_report = fused.report;
        out.proposals = std::move(fused.proposals);
        for (std::size_t s = 0; s < k; ++s) {
            draws[s] = sample_gaussian(out.proposals[s], temp[s].cols(), states[s].rng);
            bases.emplace_back(static_cast<int>(draws[s].rows()), settings.poly_degree,
                               make_whitening(out.proposals[s]));
        }
    } else {
        for (std::size_t s = 0; s < k; ++s) {
            draws[s] = temp[s];
            bases.emplace_back(static_cast<int>(draws[s].rows()), settings.poly_degree, settings.fixed_whitening);
        }
    }

    std::vector<Eigen::VectorXd> log_jlf_values(k);
    if (settings.exact_likelihood) {
        for (std::size_t s = 0; s < k; ++s) log_jlf_values[s] = exact_log_jlf(draws[s], measurements, sensors);
    } else {
        std::vector<Eigen::VectorXd> alphas;
        alphas.reserve(k);
        for (std::size_t s = 0; s < k; ++s) {
            LeastSquaresFit<double> fit = local_coefficients(sensors[s], measurements[s], draws[s], bases[s]);
            if (fit.rank_deficient) ++out.diagnostics.rank_deficient_fits;
            alphas.push_back(std::move(fit.coefficients));
        }
        LikelihoodConsensusResult lc = likelihood_consensus(weights, alphas, false, settings.consensus);
        out.likelihood_report = lc.report;
        for (std::size_t s = 0; s < k; ++s) log_jlf_values[s] = log_jlf_batch(JlfApprox{lc.sums[s], bases[s]}, draws[s]);
    }

    out.estimates.reserve(k);
    for (std::size_t s = 0; s < k; ++s) {
        const Eigen::VectorXd& values = log_jlf_values[s];
        Eigen::VectorXd lw = adapted ? importance_log_weights(values, draws[s], resampled[s], out.proposals[s],
                                                              settings.motion)
                                     : clamp_log_jlf(values);
        if (!normalize_log_weights(lw)) ++out.diagnostics.degenerate_weights;
        states[s].set.particles = std::move(draws[s]);
        states[s].set.log_weights = std::move(lw);
        out.estimates.push_back(estimate(states[s].set));
    }
    return out;
}

CpfStepResult cpf_step(CentralFilterState& state, std::span<const double> measurements,
                       std::span<const SensorModel> sensors, const FilterSettings& settings) {
    if (measurements.size() != sensors.size() || sensors.empty())
        throw std::invalid_argument("cpf_step needs one measurement per sensor model");

    CpfStepResult out;
    const Eigen::MatrixXd resampled = resample_systematic(state.set, state.rng);
    const Eigen::MatrixXd temp = propagate_particles(resampled, settings.motion, state.rng);

    out.proposal = predicted_moments(temp);
    for (std::size_t s = 0; s < sensors.size(); ++s) {
        const SensorModel& sensor = sensors[s];
        out.proposal = gated_unscented_update(
            out.proposal, measurements[s], [&](const auto& x) { return predict(sensor, x); }, noise_var(sensor),
            settings.ut);
    }
    Eigen::MatrixXd draws = sample_gaussian(out.proposal, temp.cols(), state.rng);

    Eigen::VectorXd lw = importance_log_weights(exact_log_jlf(draws, measurements, sensors), draws, resampled, out.proposal, settings.motion);
    if (!normalize_log_weights(lw)) ++out.diagnostics.degenerate_weights;
    state.set.particles = std::move(draws);
    state.set.log_weights = std::move(lw);
    out.estimate = estimate(state.set);
    return out;
}

}  // namespace lcdpf
