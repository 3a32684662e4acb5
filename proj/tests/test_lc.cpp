#include "lcdpf/lc.hpp"
#include "lcdpf/pf.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

using namespace lcdpf;
using lcdpf::oracles::random_linear_sensor;
using lcdpf::oracles::test_graph;

namespace {

Eigen::MatrixXd cloud(const Belief& b, Eigen::Index count, Rng& rng) { return sample_gaussian(b, count, rng); }

Eigen::VectorXd centred(const Eigen::VectorXd& v) { return v.array() - v.mean(); }

const Belief kCloud{Eigen::Vector2d(1, -1), (Eigen::Matrix2d() << 2.0, 0.3, 0.3, 1.0).finished()};

TEST(LocalCoefficients, QuadraticSurrogateIsExact) {
    Rng rng(3);
    const SensorModel s = random_linear_sensor(2, rng);
    const Basis basis(2, 2, make_whitening(kCloud));
    const Eigen::MatrixXd pts = cloud(kCloud, 100, rng);
    const double z = 1.3;
    const LeastSquaresFit<double> fit = local_coefficients(s, z, pts, basis);
    const Eigen::MatrixXd test = cloud(kCloud, 50, rng);
    for (Eigen::Index j = 0; j < test.cols(); ++j)
        EXPECT_NEAR(eval_basis(basis, test.col(j)).dot(fit.coefficients), log_likelihood(s, z, test.col(j)), 1e-6);
}

TEST(LocalCoefficients, DeterministicForSameInputs) {
    Rng rng(4);
    const SensorModel s = AcousticSensor{{0, {0, 0}}, SensorConfig{}};
    const Basis basis(2, 4, make_whitening(kCloud));
    const Eigen::MatrixXd pts = cloud(kCloud, 80, rng);
    EXPECT_EQ(local_coefficients(s, 2.0, pts, basis).coefficients, local_coefficients(s, 2.0, pts, basis).coefficients);
}

TEST(LocalCoefficients, FlatLikelihoodHasOnlyConstant) {
    // A sensor with zero gain sees the same likelihood everywhere.
    Rng rng(5);
    const SensorModel s = LinearSensor{Eigen::Vector2d::Zero(), 0.0, 1.0};
    const Basis basis(2, 3, make_whitening(kCloud));
    const LeastSquaresFit<double> fit = local_coefficients(s, 0.4, cloud(kCloud, 60, rng), basis);
    EXPECT_NEAR(fit.coefficients(0), normal_logpdf(0.4, 1.0), 1e-10);
    EXPECT_LE(fit.coefficients.tail(fit.coefficients.size() - 1).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(LikelihoodConsensus, ConvergesToExactSum) {
    Rng rng(6);
    const Topology t = [] {
        Rng dep(1);
        return build_topology(deploy_jittered_grid(25, Region{}, 0.4, dep), 18.0);
    }();
    const ConsensusWeights w = metropolis_weights(t);
    std::vector<Eigen::VectorXd> alphas;
    Eigen::VectorXd exact = Eigen::VectorXd::Zero(28);
    for (int k = 0; k < 25; ++k) {
        alphas.push_back(rng.normal_vector(28));
        exact += alphas.back();
    }
    const LikelihoodConsensusResult lc = likelihood_consensus(w, alphas, true, SumSettings{500, false});
    for (const auto& a : lc.sums) EXPECT_LE((a - exact).cwiseAbs().maxCoeff(), 1e-6);
    EXPECT_EQ(lc.report.scalars_sent_per_sensor, 500 * 28);
}

TEST(LikelihoodConsensus, ConstantIsNotTransmitted) {
    const ConsensusWeights w = metropolis_weights(test_graph(4));
    std::vector<Eigen::VectorXd> alphas(4, Eigen::VectorXd::LinSpaced(28, 1.0, 28.0));
    const LikelihoodConsensusResult lc = likelihood_consensus(w, alphas, false, SumSettings{15, false});
    EXPECT_EQ(lc.report.scalars_sent_per_sensor, 15 * 27);
    for (const auto& a : lc.sums) {
        EXPECT_EQ(a(0), 0.0);
        EXPECT_LE((a.tail(27) - 4.0 * alphas[0].tail(27)).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(LikelihoodConsensus, SingleSensorPassesThrough) {
    const ConsensusWeights w{Eigen::MatrixXd::Identity(1, 1)};
    const std::vector<Eigen::VectorXd> alphas{Eigen::Vector3d(1, 2, 3)};
    for (int iters : {0, 3, 50}) {
        const LikelihoodConsensusResult lc = likelihood_consensus(w, alphas, true, SumSettings{iters, false});
        EXPECT_EQ(lc.sums[0], alphas[0]);
    }
}

TEST(LikelihoodConsensus, RejectsMismatchedLengths) {
    const ConsensusWeights w = metropolis_weights(test_graph(3));
    std::vector<Eigen::VectorXd> alphas{Eigen::VectorXd::Zero(6), Eigen::VectorXd::Zero(6), Eigen::VectorXd::Zero(5)};
    EXPECT_THROW(likelihood_consensus(w, alphas, false, SumSettings{}), std::invalid_argument);
    EXPECT_THROW(likelihood_consensus(w, {}, false, SumSettings{}), std::invalid_argument);
}

TEST(LogJlf, ZeroCoefficientsGiveZero) {
    const JlfApprox approx{Eigen::VectorXd::Zero(28), Basis(2, 6, make_whitening(kCloud))};
    Rng rng(2);
    for (int i = 0; i < 10; ++i) EXPECT_EQ(log_jlf(approx, rng.normal_vector(2)), 0.0);
}

TEST(LogJlf, TwoQuadraticSensorsMatchExactUpToConstant) {
    Rng rng(8);
    const std::vector<SensorModel> sensors{random_linear_sensor(2, rng), random_linear_sensor(2, rng)};
    const std::vector<double> z{0.3, -1.1};
    const Basis basis(2, 2, make_whitening(kCloud));
    const Eigen::MatrixXd pts = cloud(kCloud, 100, rng);
    std::vector<Eigen::VectorXd> alphas;
    for (std::size_t k = 0; k < 2; ++k) alphas.push_back(local_coefficients(sensors[k], z[k], pts, basis).coefficients);
    const ConsensusWeights w{Eigen::Matrix2d::Constant(0.5)};
    const LikelihoodConsensusResult lc = likelihood_consensus(w, alphas, false, SumSettings{0, true});
    const Eigen::MatrixXd test = cloud(kCloud, 100, rng);
    Eigen::VectorXd exact(100);
    for (Eigen::Index j = 0; j < 100; ++j)
        exact(j) = log_likelihood(sensors[0], z[0], test.col(j)) + log_likelihood(sensors[1], z[1], test.col(j));
    const Eigen::VectorXd approx = log_jlf_batch(JlfApprox{lc.sums[0], basis}, test);
    EXPECT_LE((centred(approx) - centred(exact)).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(LogJlf, SingleSensorReproducesItsFit) {
    Rng rng(9);
    const SensorModel s = AcousticSensor{{0, {3, 0}}, SensorConfig{}};
    const Basis basis(2, 4, make_whitening(kCloud), true);
    const Eigen::MatrixXd pts = cloud(kCloud, 100, rng);
    const Eigen::VectorXd alpha = local_coefficients(s, 1.0, pts, basis).coefficients;
    const LikelihoodConsensusResult lc =
        likelihood_consensus(ConsensusWeights{Eigen::MatrixXd::Identity(1, 1)}, {alpha}, true, SumSettings{0, true});
    const Eigen::VectorXd values = log_jlf_batch(JlfApprox{lc.sums[0], basis}, pts);
    for (Eigen::Index j = 0; j < pts.cols(); ++j)
        EXPECT_NEAR(values(j), eval_basis(basis, pts.col(j)).dot(alpha), 1e-12 * (1.0 + std::abs(values(j))));
}

TEST(LogJlf, ExpansionsSumCoefficientwise) {
    Rng rng(10);
    const ConsensusWeights w = metropolis_weights(test_graph(5));
    const Basis basis(2, 3, make_whitening(kCloud), true);
    const Eigen::MatrixXd pts = cloud(kCloud, 60, rng);
    std::vector<Eigen::VectorXd> alphas;
    Eigen::VectorXd manual = Eigen::VectorXd::Zero(basis.size());
    for (int k = 0; k < 5; ++k) {
        const SensorModel s = AcousticSensor{{k, rng.normal_vector(2) * 4.0}, SensorConfig{}};
        alphas.push_back(local_coefficients(s, 1.0 + k, pts, basis).coefficients);
        manual += alphas.back();
    }
    const LikelihoodConsensusResult lc = likelihood_consensus(w, alphas, true, SumSettings{0, true});
    for (const auto& a : lc.sums) EXPECT_LE((a - manual).cwiseAbs().maxCoeff(), 1e-12 * manual.cwiseAbs().maxCoeff());
}

// Held-out centred error of the approximate log-JLF for a small acoustic
// scenario whose particle cloud is wide enough for the fit to matter.
double heldout_error(int degree, std::uint64_t seed) {
    Rng rng(seed);
    const Belief b{Eigen::Vector2d(rng.uniform(8, 12), rng.uniform(8, 12)), 0.25 * Eigen::Matrix2d::Identity()};
    std::vector<SensorModel> sensors;
    std::vector<double> z;
    for (int k = 0; k < 4; ++k) {
        sensors.push_back(AcousticSensor{{k, Eigen::Vector2d(k % 2 ? 15.0 : 5.0, k / 2 ? 15.0 : 5.0)}, SensorConfig{}});
        z.push_back(simulate(sensors.back(), b.mean, rng));
    }
    const Basis basis(2, degree, make_whitening(b));
    const Eigen::MatrixXd pts = cloud(b, 200, rng);
    std::vector<Eigen::VectorXd> alphas;
    for (std::size_t k = 0; k < sensors.size(); ++k)
        alphas.push_back(local_coefficients(sensors[k], z[k], pts, basis).coefficients);
    const LikelihoodConsensusResult lc =
        likelihood_consensus(ConsensusWeights{Eigen::MatrixXd::Constant(4, 4, 0.25)}, alphas, false,
                             SumSettings{0, true});
    const Eigen::MatrixXd test = cloud(b, 200, rng);
    Eigen::VectorXd exact = Eigen::VectorXd::Zero(test.cols());
    for (Eigen::Index j = 0; j < test.cols(); ++j)
        for (std::size_t k = 0; k < sensors.size(); ++k) exact(j) += log_likelihood(sensors[k], z[k], test.col(j));
    const Eigen::VectorXd approx = log_jlf_batch(JlfApprox{lc.sums[0], basis}, test);
    return (centred(approx) - centred(exact)).squaredNorm() / static_cast<double>(test.cols());
}

TEST(LogJlf, FidelityImprovesWithDegree) {
    int good = 0;
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        const double e2 = heldout_error(2, seed), e4 = heldout_error(4, seed), e6 = heldout_error(6, seed);
        if (e4 <= e2 && e6 <= e4) ++good;
    }
    EXPECT_GE(good, 48);
}

}  // namespace
