#include "lcdpf/results_io.hpp"

#include <fstream>
#include <stdexcept>

namespace lcdpf {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f.precision(17);
    return f;
}

void write_csv_header(std::ofstream& f, const ScenarioConfig& cfg) {
    f << "# version: " << version_string() << "\n";
    for (const auto& [k, v] : cfg.echo()) f << "# " << k << " = " << v << "\n";
}

}  // namespace

nlohmann::json summary_to_json(const ScenarioConfig& cfg, const ScenarioResult& result) {
    const MetricsSummary& s = result.summary;
    nlohmann::json config = nlohmann::json::object();
    for (const auto& [k, v] : cfg.echo()) config[k] = v;

    nlohmann::json j;
    j["version"] = version_string();
    j["config"] = config;
    j["variant"] = to_string(result.record.variant);
    j["rmse"] = s.rmse;
    j["armse"] = s.armse;
    j["comm"] = {
        {"measured_per_sensor_per_step", s.measured.per_sensor},
        {"measured_network_per_step", s.measured.network},
        {"formula_per_sensor_per_step", s.formula.per_sensor},
        {"formula_network_per_step", s.formula.network},
        {"measured_total_per_sensor", s.measured_total_per_sensor},
        {"reference_network_per_step", {{"dpf1", kReferenceDpf1NetworkTotal}, {"dpf2", kReferenceDpf2NetworkTotal}}},
    };
    j["diagnostics"] = {
        {"degenerate_weights", s.diagnostics.degenerate_weights},
        {"rank_deficient_fits", s.diagnostics.rank_deficient_fits},
    };
    j["measurement_hashes"] = result.record.measurement_hash;
    j["conventions"] = {
        {"basis", "graded-lex monomials in whitened coordinates"},
        {"basis_whitening", cfg.variant == FilterVariant::LcDpfNa ? "deployment region mapped to [-1,1]^2"
                                                                   : "per-sensor adapted proposal N(mu_n, C_n)"},
        {"constant_coefficient_transmitted", false},
        {"fusion_payload", "M + M(M+1)/2 + 1 (last scalar is a round-synchronisation value)"},
        {"jitter", "uniform per axis, +/- jitter_frac of a grid cell"},
        {"ut_kappa", cfg.ut_kappa},
    };
    return j;
}

MetricsSummary summary_from_json(const nlohmann::json& j) {
    MetricsSummary s;
    s.rmse = j.at("rmse").get<std::vector<double>>();
    s.armse = j.at("armse").get<double>();
    const auto& c = j.at("comm");
    s.measured = {c.at("measured_per_sensor_per_step").get<long>(), c.at("measured_network_per_step").get<long>()};
    s.formula = {c.at("formula_per_sensor_per_step").get<long>(), c.at("formula_network_per_step").get<long>()};
    s.measured_total_per_sensor = c.at("measured_total_per_sensor").get<long>();
    s.diagnostics.degenerate_weights = j.at("diagnostics").at("degenerate_weights").get<int>();
    s.diagnostics.rank_deficient_fits = j.at("diagnostics").at("rank_deficient_fits").get<int>();
    return s;
}

nlohmann::json topology_to_json(const Topology& t) {
    nlohmann::json sites = nlohmann::json::array();
    for (const SensorSite& s : t.sites) sites.push_back({{"index", s.index}, {"x", s.position(0)}, {"y", s.position(1)}});
    nlohmann::json adjacency = nlohmann::json::array();
    for (int i = 0; i < t.size(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (int j = 0; j < t.size(); ++j) row.push_back(t.adjacency(i, j) ? 1 : 0);
        adjacency.push_back(row);
    }
    nlohmann::json j;
    j["version"] = version_string();
    j["comm_range"] = t.comm_range;
    j["connected"] = is_connected(t);
    j["sites"] = sites;
    j["adjacency"] = adjacency;
    return j;
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
    std::ofstream f = open_out(path);
    f << j.dump(2) << "\n";
}

void write_results(const std::filesystem::path& dir, const ScenarioConfig& cfg, const ScenarioResult& result) {
    std::filesystem::create_directories(dir);
    const RunRecord& rec = result.record;
    const std::string variant = to_string(rec.variant);
    {
        std::ofstream f = open_out(dir / "results.csv");
        write_csv_header(f, cfg);
        f << "variant,run,n,sensor,err_sq\n";
        for (int r = 0; r < rec.runs; ++r)
            for (int n = 0; n < rec.steps; ++n)
                for (int s = 0; s < rec.sensors; ++s)
                    f << variant << ',' << r << ',' << n + 1 << ',' << s << ',' << rec.at(r, n, s) << '\n';
    }
    {
        std::ofstream f = open_out(dir / "rmse_series.csv");
        write_csv_header(f, cfg);
        f << "n,rmse\n";
        for (std::size_t n = 0; n < result.summary.rmse.size(); ++n) f << n + 1 << ',' << result.summary.rmse[n] << '\n';
    }
    write_json(dir / "summary.json", summary_to_json(cfg, result));
}

}  // namespace lcdpf
