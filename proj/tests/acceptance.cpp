// Acceptance gate: one PASS/FAIL line per criterion. Exit status is non-zero
// when any criterion fails.

#include "lcdpf/config.hpp"
#include "lcdpf/harness.hpp"
#include "lcdpf/lc.hpp"
#include "lcdpf/proposal.hpp"
#include "lcdpf/results_io.hpp"
#include "test_support.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>

using namespace lcdpf;
using namespace lcdpf::oracles;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

int failures = 0;

void report(int id, const char* title, const std::function<Outcome()>& check) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = check();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failures;
    std::printf("[%s] %2d %s: %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", id, title, o.detail.c_str(), secs);
    std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

Outcome communication() {
    ScenarioConfig cfg;
    cfg.runs = 1;
    cfg.steps = 2;
    const CommBudget formula = comm_budget(cfg);
    const ScenarioResult r = run_scenario(cfg);
    const bool ok = formula.network == 12375 && formula.per_sensor == 495 && r.summary.measured.network == 12375 &&
                    r.summary.measured_total_per_sensor == 495L * cfg.steps;
    return {ok, fmt("formula %ld, measured %ld scalars per step network-wide (target 12375)", formula.network,
                    r.summary.measured.network)};
}

bool min_off_edge_ok(const Topology& t, const ConsensusWeights& w) {
    for (int i = 0; i < t.size(); ++i)
        for (int j = 0; j < t.size(); ++j)
            if (w.matrix(i, j) < 0.0 || (i != j && !t.adjacency(i, j) && w.matrix(i, j) != 0.0)) return false;
    return true;
}

Outcome consensus() {
    const ScenarioConfig cfg;
    const Topology t = make_topology(cfg);
    const ConsensusWeights w = metropolis_weights(t);
    double stochastic = max_abs(w.matrix - w.matrix.transpose());
    stochastic = std::max(stochastic, (w.matrix.rowwise().sum().array() - 1.0).abs().maxCoeff());
    stochastic = std::max(stochastic, (w.matrix.colwise().sum().array() - 1.0).abs().maxCoeff());
    Rng rng(2024);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const Eigen::MatrixXd x = Eigen::MatrixXd::NullaryExpr(t.size(), 5, [&] { return rng.uniform(-10, 10); });
        const Eigen::MatrixXd out = consensus_average(w, x, 500);
        worst = std::max(worst, max_abs(out.rowwise() - x.colwise().mean()));
    }
    return {stochastic <= 1e-12 && worst <= 1e-6 && min_off_edge_ok(t, w),
            fmt("doubly stochastic to %.1e, worst I=500 deviation %.1e", stochastic, worst)};
}

Outcome fusion() {
    Rng rng(7);
    const ConsensusWeights w = metropolis_weights(test_graph(3));
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const std::vector<Belief> in{random_belief(2, rng), random_belief(2, rng), random_belief(2, rng)};
        const Belief ref = gaussian_product(in);
        for (const Belief& q : fuse_pseudoposteriors(w, in, SumSettings{0, true}).proposals)
            worst = std::max({worst, (q.mean - ref.mean).cwiseAbs().maxCoeff(), max_abs(q.cov - ref.cov)});
    }
    std::vector<Belief> in1;
    for (int k = 0; k < 3; ++k)
        in1.push_back({Eigen::VectorXd::Constant(1, rng.uniform(-1, 1)), Eigen::MatrixXd::Constant(1, 1, rng.uniform(0.5, 2))});
    const Belief q = fuse_pseudoposteriors(w, in1, SumSettings{0, true}).proposals[0];
    const int n = 20000;
    double z = 0, m1 = 0, m2 = 0;
    for (int i = 0; i < n; ++i) {
        const double x = -8.0 + (i + 0.5) * 16.0 / n;
        double lp = 0;
        for (const Belief& b : in1) lp += gaussian_logpdf(b, Eigen::VectorXd::Constant(1, x));
        z += std::exp(lp), m1 += std::exp(lp) * x, m2 += std::exp(lp) * x * x;
    }
    const double quad = std::max(std::abs(q.mean(0) - m1 / z), std::abs(q.cov(0, 0) - (m2 / z - m1 * m1 / (z * z))));
    return {worst <= 1e-10 && quad <= 1e-3, fmt("distributed vs centralized %.1e, quadrature %.1e", worst, quad)};
}

Outcome ukf_equals_kf() {
    Rng rng(11);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const Belief prior = random_belief(2, rng);
        const Eigen::VectorXd h = rng.normal_vector(2);
        const double r = rng.uniform(0.1, 2.0), z = 3.0 * rng.normal();
        const Belief u = unscented_update(prior, z, [&](const auto& x) { return h.dot(x); }, r, UtParams{1.0});
        const Belief k = kalman_update(prior, h, 0.0, r, z);
        worst = std::max({worst, (u.mean - k.mean).cwiseAbs().maxCoeff(), max_abs(u.cov - k.cov)});
    }
    return {worst <= 1e-10, fmt("max deviation %.1e over 100 trials", worst)};
}

Outcome lc_exactness() {
    Rng rng(5);
    const int k = 4;
    std::vector<SensorModel> sensors;
    std::vector<double> z;
    const Eigen::Vector2d truth(3.0, -1.0);
    for (int s = 0; s < k; ++s) {
        sensors.push_back(random_linear_sensor(2, rng));
        z.push_back(simulate(sensors.back(), truth, rng));
    }
    const Belief proposal{truth + 0.3 * rng.normal_vector(2), 0.5 * Eigen::Matrix2d::Identity()};
    const Basis basis(2, 2, make_whitening(proposal));
    const Eigen::MatrixXd particles = sample_gaussian(proposal, 100, rng);
    std::vector<Eigen::VectorXd> alphas;
    for (int s = 0; s < k; ++s) alphas.push_back(local_coefficients(sensors[s], z[s], particles, basis).coefficients);
    const LikelihoodConsensusResult lc =
        likelihood_consensus(metropolis_weights(test_graph(k)), alphas, false, SumSettings{0, true});
    auto exact_at = [&](const Eigen::MatrixXd& pts) {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(pts.cols());
        for (Eigen::Index j = 0; j < pts.cols(); ++j)
            for (int s = 0; s < k; ++s) v(j) += log_likelihood(sensors[s], z[s], pts.col(j));
        return v;
    };
    const Eigen::MatrixXd test = sample_gaussian(proposal, 100, rng);
    const Eigen::VectorXd approx_t = log_jlf_batch(JlfApprox{lc.sums[0], basis}, test), exact_t = exact_at(test);
    const double centred =
        ((approx_t.array() - approx_t.mean()) - (exact_t.array() - exact_t.mean())).abs().maxCoeff();

    // Importance weights on identical particles: LC vs the exact joint likelihood.
    const MotionConfig motion;
    const Eigen::MatrixXd previous = sample_gaussian(proposal, 100, rng);
    Eigen::VectorXd extra(100);
    for (Eigen::Index j = 0; j < 100; ++j)
        extra(j) = transition_logpdf(particles.col(j), previous.col(j), motion) - gaussian_logpdf(proposal, particles.col(j));
    Eigen::VectorXd lw_lc = log_jlf_batch(JlfApprox{lc.sums[0], basis}, particles) + extra;
    Eigen::VectorXd lw_ex = exact_at(particles) + extra;
    normalize_log_weights(lw_lc);
    normalize_log_weights(lw_ex);
    const double weights = (lw_lc.array().exp() - lw_ex.array().exp()).abs().maxCoeff();
    return {centred <= 1e-6 && weights <= 1e-8,
            fmt("centred log-JLF error %.1e, weight error %.1e", centred, weights)};
}

struct TrendRuns {
    ScenarioResult lc, na, cpf;
};

const TrendRuns& trend_runs() {
    static const TrendRuns runs = [] {
        ScenarioConfig cfg;
        TrendRuns t;
        cfg.variant = FilterVariant::LcDpf;
        t.lc = run_scenario(cfg);
        cfg.variant = FilterVariant::LcDpfNa;
        t.na = run_scenario(cfg);
        cfg.variant = FilterVariant::Cpf;
        t.cpf = run_scenario(cfg);
        return t;
    }();
    return runs;
}

Outcome lc_beats_na() {
    const TrendRuns& t = trend_runs();
    int wins = 0;
    for (int r = 0; r < t.lc.record.runs; ++r)
        if (run_armse(t.lc.record, r) < run_armse(t.na.record, r)) ++wins;
    return {wins >= 18 && t.lc.summary.armse < t.na.summary.armse,
            fmt("ARMSE LC-DPF %.4f m vs LC-DPF-NA %.4f m; LC-DPF lower in %d of %d runs (need 18)",
                t.lc.summary.armse, t.na.summary.armse, wins, t.lc.record.runs)};
}

Outcome lc_near_cpf() {
    const TrendRuns& t = trend_runs();
    const double lc = t.lc.summary.armse, cpf = t.cpf.summary.armse;
    return {lc <= 1.5 * cpf && cpf <= 1.2 * lc,
            fmt("ARMSE LC-DPF %.4f m, CPF %.4f m, ratio %.2f (need <= 1.5)", lc, cpf, lc / cpf)};
}

Outcome degree_sweep() {
    std::vector<double> a;
    for (int rp : {2, 4}) {
        ScenarioConfig cfg;
        cfg.R_p = rp;
        a.push_back(run_scenario(cfg).summary.armse);
    }
    a.push_back(trend_runs().lc.summary.armse);
    const bool ok = a[1] <= 1.1 * a[0] && a[2] <= 1.1 * a[1];
    return {ok, fmt("ARMSE R_p=2: %.4f, R_p=4: %.4f, R_p=6: %.4f m", a[0], a[1], a[2])};
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

Outcome determinism_and_symmetry() {
    ScenarioConfig cfg;
    cfg.runs = 2;
    cfg.steps = 10;
    const auto base = std::filesystem::temp_directory_path() / "lcdpf_acceptance";
    std::filesystem::remove_all(base);
    write_results(base / "a", cfg, run_scenario(cfg));
    write_results(base / "b", cfg, run_scenario(cfg));
    const bool identical = read_file(base / "a" / "summary.json") == read_file(base / "b" / "summary.json") &&
                           read_file(base / "a" / "results.csv") == read_file(base / "b" / "results.csv");
    std::filesystem::remove_all(base);

    ScenarioConfig sym;
    sym.K = 4;
    sym.fully_connected = true;
    sym.runs = 1;
    sym.steps = 20;
    double spread = 0.0;
    int steps_seen = 0;
    run_scenario(sym, [&](int, int, const std::vector<State>& est, const Eigen::Vector2d&) {
        ++steps_seen;
        for (const State& e : est) spread = std::max(spread, (e - est.front()).cwiseAbs().maxCoeff());
    });
    return {identical && steps_seen == 20 && spread <= 1e-4,
            fmt("summary.json %s; fully connected 4-sensor max estimate spread %.1e over %d steps",
                identical ? "bit-identical" : "DIFFERS", spread, steps_seen)};
}

Outcome invariants() {
    std::vector<std::string> broken;
    Rng rng(99);

    for (int m = 1; m <= 4; ++m)
        for (int r = 0; r <= 8; ++r)
            if (enumerate_exponents(m, r).rows() != basis_size(m, r)) broken.push_back("basis count");

    Eigen::VectorXd lw = rng.normal_vector(200) * 100.0;
    Eigen::VectorXd shifted = lw.array() + 777.0;
    normalize_log_weights(lw);
    normalize_log_weights(shifted);
    if (std::abs(log_sum_exp(lw)) > 1e-10) broken.push_back("weight normalization");
    if ((lw.array().exp() - shifted.array().exp()).abs().maxCoeff() > 1e-12) broken.push_back("additive constant");

    const ConsensusWeights w = metropolis_weights(make_topology(ScenarioConfig{}));
    Eigen::MatrixXd x = Eigen::MatrixXd::NullaryExpr(25, 3, [&] { return rng.normal(); });
    const Eigen::RowVectorXd mean = x.colwise().mean();
    for (int it = 0; it < 20; ++it) {
        x = consensus_average(w, x, 1);
        if ((x.colwise().mean() - mean).cwiseAbs().maxCoeff() > 1e-12) {
            broken.push_back("sum conservation");
            break;
        }
    }

    ParticleSet ps;
    ps.particles = Eigen::RowVectorXd::LinSpaced(6, 0, 5);
    Eigen::VectorXd wts(6);
    wts << 0.02, 0.3, 0.08, 0.25, 0.15, 0.2;
    ps.log_weights = wts.array().log();
    Eigen::VectorXd counts = Eigen::VectorXd::Zero(6);
    const int trials = 20000;
    for (int t = 0; t < trials; ++t) {
        const Eigen::MatrixXd out = resample_systematic(ps, rng);
        for (Eigen::Index j = 0; j < 6; ++j) counts(static_cast<Eigen::Index>(out(0, j))) += 1;
    }
    if ((counts / trials - 6.0 * wts).cwiseAbs().maxCoeff() > 0.02) broken.push_back("resampling expectation");

    for (int t = 0; t < 20; ++t) {
        const Belief b = random_belief(2 + t % 3, rng);
        const SigmaPointSet<double> s = sigma_points(b, UtParams{1.0});
        const Eigen::MatrixXd d = s.points.colwise() - b.mean;
        if ((s.points * s.weights - b.mean).cwiseAbs().maxCoeff() > 1e-12 ||
            max_abs(d * s.weights.asDiagonal() * d.transpose() - b.cov) > 1e-10 * max_abs(b.cov)) {
            broken.push_back("UT moment matching");
            break;
        }
    }

    std::string detail = "basis counts, weight normalization, sum conservation, additive-constant invariance, "
                         "resampling expectation, UT moments";
    if (!broken.empty()) {
        detail = "broken:";
        for (const auto& b : broken) detail += " " + b;
    }
    return {broken.empty(), detail};
}

}  // namespace

int main() {
    std::printf("lcdpf acceptance (%s)\n", version_string().c_str());
    report(1, "communication accounting", communication);
    report(2, "consensus correctness", consensus);
    report(3, "Gaussian fusion oracle", fusion);
    report(4, "unscented update equals Kalman update", ukf_equals_kf);
    report(5, "likelihood consensus exact on quadratic log-likelihoods", lc_exactness);
    report(6, "adapted proposal beats unadapted", lc_beats_na);
    report(7, "LC-DPF close to centralized filter", lc_near_cpf);
    report(8, "ARMSE non-increasing in polynomial degree", degree_sweep);
    report(9, "determinism and consensus symmetry", determinism_and_symmetry);
    report(10, "invariant suites", invariants);
    std::printf("%d of 10 criteria passed\n", 10 - failures);
    return failures == 0 ? 0 : 1;
}
