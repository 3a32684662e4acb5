#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <initializer_list>
#include <random>

namespace lcdpf {

/// Seeded random stream. The engine is mt19937_64 (bit-exact across
/// platforms); uniform and normal variates are produced here rather than by
/// the std distributions, whose algorithms are implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

    /// Independent stream keyed by the master seed and a path of labels,
    /// e.g. derive(seed, {kTruth, run}).
    static Rng derive(std::uint64_t master, std::initializer_list<std::uint64_t> path);

    /// Uniform on [0, 1) with 53 random bits.
    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal (Marsaglia polar method, spare value cached).
    double normal();

    Eigen::VectorXd normal_vector(Eigen::Index n);

    std::uint64_t next_u64() { return engine_(); }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// Stream labels. Keeping them distinct guarantees that variants sharing a
/// master seed consume identical truth and measurement noise.
enum StreamTag : std::uint64_t {
    kDeployment = 1,
    kTruth = 2,
    kMeasurement = 3,
    kPrior = 4,
    kSensorFilter = 5,
    kCentralFilter = 6,
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace lcdpf
