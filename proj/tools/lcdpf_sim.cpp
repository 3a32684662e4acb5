#include "lcdpf/config.hpp"
#include "lcdpf/harness.hpp"
#include "lcdpf/results_io.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace lcdpf;

namespace {

struct Overrides {
    std::optional<int> runs;
    std::optional<int> steps;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> variant;
    bool rejitter = false;
};

ScenarioConfig load(const std::string& path, const Overrides& o) {
    ScenarioConfig cfg = path.empty() ? ScenarioConfig{} : load_config(path);
    if (o.runs) cfg.runs = *o.runs;
    if (o.steps) cfg.steps = *o.steps;
    if (o.seed) cfg.seed = *o.seed;
    if (o.variant) cfg.variant = parse_variant(*o.variant);
    if (o.rejitter) cfg.rejitter_per_run = true;
    cfg.validate();
    return cfg;
}

void add_overrides(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--runs", o.runs, "Monte Carlo runs");
    cmd->add_option("--steps", o.steps, "time steps per run");
    cmd->add_option("--seed", o.seed, "master seed");
    cmd->add_option("--variant", o.variant, "lcdpf | lcdpf-na | cpf")
        ->check(CLI::IsMember({"lcdpf", "lcdpf-na", "cpf"}));
    cmd->add_flag("--rejitter-per-run", o.rejitter, "redeploy the jittered grid for every run");
}

std::vector<std::string> split(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

void print_summary(const ScenarioConfig& cfg, const ScenarioResult& r) {
    std::cout << to_string(cfg.variant) << ": ARMSE " << r.summary.armse << " m over " << cfg.runs << " runs x "
              << cfg.steps << " steps; " << r.summary.measured.network << " scalars per step network-wide ("
              << r.summary.measured.per_sensor << " per sensor)\n";
    if (r.summary.diagnostics.degenerate_weights > 0)
        std::cout << "  degenerate weight steps: " << r.summary.diagnostics.degenerate_weights << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Likelihood-consensus distributed particle filter simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "out";
    Overrides overrides;

    auto* run = app.add_subcommand("run", "run one scenario");
    run->add_option("--config", config_path, "scenario config file")->check(CLI::ExistingFile);
    run->add_option("--out", out_dir, "output directory");
    add_overrides(run, overrides);

    std::string param;
    std::string values;
    std::string variants;
    auto* sweep = app.add_subcommand("sweep", "sweep R_p or J and report ARMSE per point");
    sweep->add_option("--param", param, "rp | particles")->required()->check(CLI::IsMember({"rp", "particles"}));
    sweep->add_option("--values", values, "comma-separated values")->required();
    sweep->add_option("--variants", variants, "comma-separated variants (default: lcdpf for rp, lcdpf,lcdpf-na for particles)");
    sweep->add_option("--config", config_path, "scenario config file")->check(CLI::ExistingFile);
    sweep->add_option("--out", out_dir, "output directory");
    add_overrides(sweep, overrides);

    std::string topology_out = "topology.json";
    auto* topo = app.add_subcommand("topology", "export the sensor deployment and communication graph");
    topo->add_option("--config", config_path, "scenario config file")->check(CLI::ExistingFile);
    topo->add_option("--out", topology_out, "output JSON path");
    topo->add_option("--seed", overrides.seed, "master seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            const ScenarioConfig cfg = load(config_path, overrides);
            const ScenarioResult r = run_scenario(cfg);
            write_results(out_dir, cfg, r);
            print_summary(cfg, r);
        } else if (*sweep) {
            ScenarioConfig base = load(config_path, overrides);
            const std::vector<std::string> names =
                split(variants.empty() ? (param == "rp" ? "lcdpf" : "lcdpf,lcdpf-na") : variants);
            fs::create_directories(out_dir);
            std::ofstream table(fs::path(out_dir) / "sweep.csv");
            table.precision(17);
            table << "# version: " << version_string() << "\nparam,value,variant,armse\n";
            for (const std::string& v : split(values)) {
                for (const std::string& name : names) {
                    ScenarioConfig cfg = base;
                    cfg.variant = parse_variant(name);
                    if (param == "rp")
                        cfg.R_p = std::stoi(v);
                    else
                        cfg.J = std::stoi(v);
                    cfg.validate();
                    const ScenarioResult r = run_scenario(cfg);
                    write_results(fs::path(out_dir) / (param + "_" + v + "_" + name), cfg, r);
                    table << param << ',' << v << ',' << name << ',' << r.summary.armse << '\n';
                    std::cout << param << '=' << v << ' ';
                    print_summary(cfg, r);
                }
            }
        } else if (*topo) {
            const ScenarioConfig cfg = load(config_path, overrides);
            const Topology t = make_topology(cfg);
            write_json(topology_out, topology_to_json(t));
            std::cout << "wrote " << topology_out << " (" << t.size() << " sensors, "
                      << (is_connected(t) ? "connected" : "NOT connected") << ")\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
