#include "lcdpf/network.hpp"

#include <cmath>
#include <queue>

namespace lcdpf {

std::vector<SensorSite> deploy_jittered_grid(int num_sensors, const Region& region, double jitter_frac, Rng& rng) {
    const int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(num_sensors))));
    if (num_sensors < 1 || side * side != num_sensors)
        throw std::invalid_argument("sensor count must be a perfect square");
    if (!(jitter_frac >= 0.0 && jitter_frac < 0.5)) throw std::invalid_argument("jitter_frac must lie in [0, 0.5)");

    const double cell_x = region.width / side;
    const double cell_y = region.height / side;
    std::vector<SensorSite> sites;
    sites.reserve(num_sensors);
    for (int i = 0; i < side; ++i) {
        for (int j = 0; j < side; ++j) {
            const double jx = jitter_frac * cell_x * rng.uniform(-1.0, 1.0);
            const double jy = jitter_frac * cell_y * rng.uniform(-1.0, 1.0);
            SensorSite s;
            s.index = static_cast<int>(sites.size());
            s.position = {(i + 0.5) * cell_x + jx, (j + 0.5) * cell_y + jy};
            sites.push_back(s);
        }
    }
    return sites;
}

Topology build_topology(std::vector<SensorSite> sites, double comm_range) {
    if (sites.size() < 2) throw std::invalid_argument("a topology needs at least two sites");
    const auto k = static_cast<Eigen::Index>(sites.size());
    Topology t;
    t.comm_range = comm_range;
    t.adjacency.setConstant(k, k, false);
    for (Eigen::Index i = 0; i < k; ++i)
        for (Eigen::Index j = i + 1; j < k; ++j)
            if ((sites[i].position - sites[j].position).norm() <= comm_range) t.adjacency(i, j) = t.adjacency(j, i) = true;
    t.sites = std::move(sites);
    return t;
}

Topology complete_topology(std::vector<SensorSite> sites) {
    const auto k = static_cast<Eigen::Index>(sites.size());
    Topology t;
    t.comm_range = std::numeric_limits<double>::infinity();
    t.adjacency.setConstant(k, k, true);
    t.adjacency.diagonal().setConstant(false);
    t.sites = std::move(sites);
    return t;
}

bool is_connected(const Topology& t) {
    const int k = t.size();
    if (k <= 1) return true;
    std::vector<bool> seen(k, false);
    std::queue<int> frontier;
    frontier.push(0);
    seen[0] = true;
    int reached = 1;
    while (!frontier.empty()) {
        const int i = frontier.front();
        frontier.pop();
        for (int j = 0; j < k; ++j) {
            if (t.adjacency(i, j) && !seen[j]) {
                seen[j] = true;
                ++reached;
                frontier.push(j);
            }
        }
    }
    return reached == k;
}

ConsensusWeights metropolis_weights(const Topology& t) {
    const int k = t.size();
    ConsensusWeights w;
    w.matrix.setZero(k, k);
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) {
            if (i != j && t.adjacency(i, j)) w.matrix(i, j) = 1.0 / (1.0 + std::max(t.degree(i), t.degree(j)));
        }
    }
    for (int i = 0; i < k; ++i) w.matrix(i, i) = 1.0 - w.matrix.row(i).sum();
    return w;
}

}  // namespace lcdpf
