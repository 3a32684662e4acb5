#include "lcdpf/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace lcdpf {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const double d = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw std::invalid_argument("config key '" + key + "': expected a number, got '" + v + "'");
    }
}

long long to_integer(const std::string& key, const std::string& v) {
    long long out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size())
        throw std::invalid_argument("config key '" + key + "': expected an integer, got '" + v + "'");
    return out;
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw std::invalid_argument("config key '" + key + "': expected true/false, got '" + v + "'");
}

Eigen::Vector2d to_vec2(const std::string& key, const std::string& v) {
    const auto comma = v.find(',');
    if (comma == std::string::npos) {
        const double d = to_double(key, v);
        return {d, d};
    }
    return {to_double(key, trim(v.substr(0, comma))), to_double(key, trim(v.substr(comma + 1)))};
}

std::string num(double d) {
    std::ostringstream os;
    os.precision(17);
    os << d;
    return os.str();
}

std::string vec2(const Eigen::Vector2d& v) { return num(v(0)) + "," + num(v(1)); }

using Setter = std::function<void(ScenarioConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = {
        {"K", [](auto& c, auto& k, auto& v) { c.K = static_cast<int>(to_integer(k, v)); }},
        {"region_width", [](auto& c, auto& k, auto& v) { c.region_width = to_double(k, v); }},
        {"region_height", [](auto& c, auto& k, auto& v) { c.region_height = to_double(k, v); }},
        {"comm_range", [](auto& c, auto& k, auto& v) { c.comm_range = to_double(k, v); }},
        {"jitter_frac", [](auto& c, auto& k, auto& v) { c.jitter_frac = to_double(k, v); }},
        {"fully_connected", [](auto& c, auto& k, auto& v) { c.fully_connected = to_bool(k, v); }},
        {"rejitter_per_run", [](auto& c, auto& k, auto& v) { c.rejitter_per_run = to_bool(k, v); }},
        {"A", [](auto& c, auto& k, auto& v) { c.A = to_double(k, v); }},
        {"noise_var", [](auto& c, auto& k, auto& v) { c.noise_var = to_double(k, v); }},
        {"min_dist_sq", [](auto& c, auto& k, auto& v) { c.min_dist_sq = to_double(k, v); }},
        {"filter_driving_var", [](auto& c, auto& k, auto& v) { c.filter_driving_var = to_vec2(k, v); }},
        {"truth_driving_var", [](auto& c, auto& k, auto& v) { c.truth_driving_var = to_vec2(k, v); }},
        {"step_period", [](auto& c, auto& k, auto& v) { c.step_period = to_double(k, v); }},
        {"init_box", [](auto& c, auto& k, auto& v) { c.init_box = to_double(k, v); }},
        {"init_velocity", [](auto& c, auto& k, auto& v) { c.init_velocity = to_vec2(k, v); }},
        {"prior_var", [](auto& c, auto& k, auto& v) { c.prior_var = to_vec2(k, v); }},
        {"keep_truth_in_region", [](auto& c, auto& k, auto& v) { c.keep_truth_in_region = to_bool(k, v); }},
        {"R_p", [](auto& c, auto& k, auto& v) { c.R_p = static_cast<int>(to_integer(k, v)); }},
        {"I", [](auto& c, auto& k, auto& v) { c.I = static_cast<int>(to_integer(k, v)); }},
        {"exact_consensus", [](auto& c, auto& k, auto& v) { c.exact_consensus = to_bool(k, v); }},
        {"exact_likelihood", [](auto& c, auto& k, auto& v) { c.exact_likelihood = to_bool(k, v); }},
        {"shared_sensor_streams", [](auto& c, auto& k, auto& v) { c.shared_sensor_streams = to_bool(k, v); }},
        {"J", [](auto& c, auto& k, auto& v) { c.J = static_cast<int>(to_integer(k, v)); }},
        {"steps", [](auto& c, auto& k, auto& v) { c.steps = static_cast<int>(to_integer(k, v)); }},
        {"runs", [](auto& c, auto& k, auto& v) { c.runs = static_cast<int>(to_integer(k, v)); }},
        {"variant", [](auto& c, auto&, auto& v) { c.variant = parse_variant(v); }},
        {"ut_kappa", [](auto& c, auto& k, auto& v) { c.ut_kappa = to_double(k, v); }},
        {"seed", [](auto& c, auto& k, auto& v) { c.seed = static_cast<std::uint64_t>(to_integer(k, v)); }},
    };
    return table;
}

}  // namespace

void ScenarioConfig::validate() const {
    const int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(K))));
    if (K < 1 || side * side != K) throw std::invalid_argument("K must be a positive perfect square");
    if (!(region_width > 0.0 && region_height > 0.0)) throw std::invalid_argument("region must have positive size");
    if (!(comm_range > 0.0)) throw std::invalid_argument("comm_range must be positive");
    if (!(jitter_frac >= 0.0 && jitter_frac < 0.5)) throw std::invalid_argument("jitter_frac must lie in [0, 0.5)");
    sensor().validate();
    motion().validate();
    if (!(init_box >= 0.0 && init_box <= std::min(region_width, region_height)))
        throw std::invalid_argument("init_box must fit inside the region");
    if (!(prior_var.minCoeff() > 0.0)) throw std::invalid_argument("prior_var must be positive");
    if (R_p < 0) throw std::invalid_argument("R_p must be non-negative");
    if (I < 0) throw std::invalid_argument("I must be non-negative");
    if (J < 2) throw std::invalid_argument("J must be at least 2");
    if (steps < 1 || runs < 1) throw std::invalid_argument("steps and runs must be positive");
    if (!(2.0 + ut_kappa > 0.0)) throw std::invalid_argument("ut_kappa must satisfy M + kappa > 0");
}

MotionConfig ScenarioConfig::motion() const { return {truth_driving_var, filter_driving_var, step_period}; }

SensorConfig ScenarioConfig::sensor() const { return {A, noise_var, min_dist_sq}; }

FilterSettings ScenarioConfig::filter_settings() const {
    FilterSettings s;
    s.variant = variant;
    s.motion = motion();
    s.poly_degree = R_p;
    s.consensus = {I, exact_consensus};
    s.exact_likelihood = exact_likelihood;
    s.ut = {ut_kappa};
    Eigen::Vector2d half{region_width / 2.0, region_height / 2.0};
    s.fixed_whitening = {half, half.asDiagonal().toDenseMatrix()};
    return s;
}

std::vector<std::pair<std::string, std::string>> ScenarioConfig::echo() const {
    return {
        {"K", std::to_string(K)},
        {"region_width", num(region_width)},
        {"region_height", num(region_height)},
        {"comm_range", num(comm_range)},
        {"jitter_frac", num(jitter_frac)},
        {"fully_connected", fully_connected ? "true" : "false"},
        {"rejitter_per_run", rejitter_per_run ? "true" : "false"},
        {"A", num(A)},
        {"noise_var", num(noise_var)},
        {"min_dist_sq", num(min_dist_sq)},
        {"filter_driving_var", vec2(filter_driving_var)},
        {"truth_driving_var", vec2(truth_driving_var)},
        {"step_period", num(step_period)},
        {"init_box", num(init_box)},
        {"init_velocity", vec2(init_velocity)},
        {"prior_var", vec2(prior_var)},
        {"keep_truth_in_region", keep_truth_in_region ? "true" : "false"},
        {"R_p", std::to_string(R_p)},
        {"I", std::to_string(I)},
        {"exact_consensus", exact_consensus ? "true" : "false"},
        {"exact_likelihood", exact_likelihood ? "true" : "false"},
        {"shared_sensor_streams", shared_sensor_streams ? "true" : "false"},
        {"J", std::to_string(J)},
        {"steps", std::to_string(steps)},
        {"runs", std::to_string(runs)},
        {"variant", to_string(variant)},
        {"ut_kappa", num(ut_kappa)},
        {"seed", std::to_string(seed)},
    };
}

ScenarioConfig parse_config(const std::string& text, ScenarioConfig base) {
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const auto it = setters().find(key);
        if (it == setters().end()) throw std::invalid_argument("unknown config key '" + key + "'");
        it->second(base, key, value);
    }
    return base;
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open config file " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str());
}

std::string format_config(const ScenarioConfig& cfg) {
    std::string out;
    for (const auto& [k, v] : cfg.echo()) out += k + " = " + v + "\n";
    return out;
}

}  // namespace lcdpf
