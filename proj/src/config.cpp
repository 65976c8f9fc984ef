#include "tdbem/config.hpp"

#include <fstream>
#include <functional>
#include <iomanip>
#include <sstream>

namespace tdbem {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return {};
    return s.substr(a, s.find_last_not_of(" \t\r") - a + 1);
}

double to_double(const std::string& key, const std::string& v) {
    std::size_t pos = 0;
    double d = 0.0;
    try {
        d = std::stod(v, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos == 0 || trim(v.substr(pos)) != "") throw ConfigError("config: " + key + " expects a number, got '" + v + "'");
    return d;
}

int to_int(const std::string& key, const std::string& v) {
    const double d = to_double(key, v);
    if (d != static_cast<int>(d)) throw ConfigError("config: " + key + " expects an integer");
    return static_cast<int>(d);
}

Vec3 to_vec(const std::string& key, const std::string& v) {
    std::vector<double> c;
    std::stringstream ss(v);
    std::string part;
    while (std::getline(ss, part, ',')) c.push_back(to_double(key, trim(part)));
    if (c.size() != 3) throw ConfigError("config: " + key + " expects three comma separated numbers");
    return {c[0], c[1], c[2]};
}

std::string fmt(double v) {
    std::ostringstream o;
    o << std::setprecision(17) << v;
    return o.str();
}

std::string fmt(const Vec3& v) { return fmt(v.x()) + ", " + fmt(v.y()) + ", " + fmt(v.z()); }

}  // namespace

std::string to_string(Problem p) { return p == Problem::Dirichlet ? "dirichlet" : "acoustic"; }

void ExperimentConfig::validate() const {
    if (levels < 1 || levels > 6) throw ConfigError("config: levels must be in 1..6");
    if (!(dt_factor > 0.0)) throw ConfigError("config: dt_factor must be positive");
    if (!(horizon > 0.0)) throw ConfigError("config: horizon must be positive");
    if (!(alpha_inf >= 0.0)) throw ConfigError("config: alpha_inf must be real and non-negative");
    if (alpha == 0.0) throw ConfigError("config: alpha must be nonzero");
    if (!(sigma >= 0.0)) throw ConfigError("config: sigma must be non-negative");
    if (!(source.z() > 0.0)) throw ConfigError("config: the source must lie above the plane");
    if (!(pulse_tau > 0.0)) throw ConfigError("config: pulse_tau must be positive");
    for (const auto& x : observers)
        if (!(x.z() > 0.0)) throw ConfigError("config: observers must lie above the plane");
    if (oversample < 1) throw ConfigError("config: oversample must be at least 1");
    if (surrogate_points < 0 || surrogate_points > 12) throw ConfigError("config: surrogate_points must be in 0..12");
    if (!(surrogate_radius > 0.0)) throw ConfigError("config: surrogate_radius must be positive");
    if (threads < 0) throw ConfigError("config: threads must be non-negative");
}

std::map<std::string, std::string> ExperimentConfig::to_map() const {
    std::string obs;
    for (std::size_t i = 0; i < observers.size(); ++i) obs += (i ? "; " : "") + fmt(observers[i]);
    return {{"problem", to_string(problem)},
            {"mesh", mesh.string()},
            {"levels", std::to_string(levels)},
            {"dt_factor", fmt(dt_factor)},
            {"horizon", fmt(horizon)},
            {"alpha_inf", fmt(alpha_inf)},
            {"alpha", fmt(alpha)},
            {"sigma", fmt(sigma)},
            {"source", fmt(source)},
            {"pulse_amplitude", fmt(pulse_amplitude)},
            {"pulse_tau", fmt(pulse_tau)},
            {"observers", obs},
            {"oversample", std::to_string(oversample)},
            {"surrogate_points", std::to_string(surrogate_points)},
            {"surrogate_radius", fmt(surrogate_radius)},
            {"output_dir", output_dir.string()},
            {"cache_dir", cache_dir.string()},
            {"threads", std::to_string(threads)}};
}

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig c;
    const std::map<std::string, std::function<void(const std::string&, const std::string&)>> setters = {
        {"problem",
         [&](const std::string&, const std::string& v) {
             if (v == "dirichlet") c.problem = Problem::Dirichlet;
             else if (v == "acoustic") c.problem = Problem::Acoustic;
             else throw ConfigError("config: problem must be dirichlet or acoustic");
         }},
        {"mesh", [&](const std::string&, const std::string& v) { c.mesh = v; }},
        {"levels", [&](const std::string& k, const std::string& v) { c.levels = to_int(k, v); }},
        {"dt_factor", [&](const std::string& k, const std::string& v) { c.dt_factor = to_double(k, v); }},
        {"horizon", [&](const std::string& k, const std::string& v) { c.horizon = to_double(k, v); }},
        {"alpha_inf", [&](const std::string& k, const std::string& v) { c.alpha_inf = to_double(k, v); }},
        {"alpha", [&](const std::string& k, const std::string& v) { c.alpha = to_double(k, v); }},
        {"sigma", [&](const std::string& k, const std::string& v) { c.sigma = to_double(k, v); }},
        {"source", [&](const std::string& k, const std::string& v) { c.source = to_vec(k, v); }},
        {"pulse_amplitude", [&](const std::string& k, const std::string& v) { c.pulse_amplitude = to_double(k, v); }},
        {"pulse_tau", [&](const std::string& k, const std::string& v) { c.pulse_tau = to_double(k, v); }},
        {"observers",
         [&](const std::string& k, const std::string& v) {
             c.observers.clear();
             std::stringstream ss(v);
             std::string part;
             while (std::getline(ss, part, ';'))
                 if (!trim(part).empty()) c.observers.push_back(to_vec(k, part));
         }},
        {"oversample", [&](const std::string& k, const std::string& v) { c.oversample = to_int(k, v); }},
        {"surrogate_points", [&](const std::string& k, const std::string& v) { c.surrogate_points = to_int(k, v); }},
        {"surrogate_radius", [&](const std::string& k, const std::string& v) { c.surrogate_radius = to_double(k, v); }},
        {"output_dir", [&](const std::string&, const std::string& v) { c.output_dir = v; }},
        {"cache_dir", [&](const std::string&, const std::string& v) { c.cache_dir = v; }},
        {"threads", [&](const std::string& k, const std::string& v) { c.threads = to_int(k, v); }},
    };
    std::stringstream in(text);
    std::string line;
    int no = 0;
    while (std::getline(in, line)) {
        ++no;
        line = trim(line.substr(0, line.find('#')));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(no) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
        const auto it = setters.find(key);
        if (it == setters.end()) throw ConfigError("config line " + std::to_string(no) + ": unknown key '" + key + "'");
        it->second(key, value);
    }
    c.validate();
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

}  // namespace tdbem
