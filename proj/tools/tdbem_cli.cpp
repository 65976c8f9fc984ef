#include <algorithm>
#include <cctype>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "tdbem/harness.hpp"

namespace {

// Accepts "a+bi", "a-bi", "bi" and "a".
tdbem::cplx parse_omega(std::string s) {
    s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }), s.end());
    auto number = [&](const std::string& v) {
        if (v.empty() || v == "+") return 1.0;
        if (v == "-") return -1.0;
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("cannot parse omega '" + s + "'");
        return d;
    };
    if (s.empty()) throw std::invalid_argument("empty omega");
    if (s.back() != 'i' && s.back() != 'j') return {number(s), 0.0};
    const std::string body = s.substr(0, s.size() - 1);
    std::size_t split = std::string::npos;
    for (std::size_t k = 1; k < body.size(); ++k)
        if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') split = k;
    if (split == std::string::npos) return {0.0, number(body)};
    return {number(body.substr(0, split)), number(body.substr(split))};
}

void write(const tdbem::ExperimentResult& r, const tdbem::ExperimentConfig& cfg) {
    const auto files = tdbem::emit_report(r.tables, r.manifest, cfg.output_dir);
    std::cout << r.tables.front().name << ":\n";
    const auto& t = r.tables.front();
    for (std::size_t j = 0; j < t.columns.size(); ++j) std::cout << (j ? "," : "") << t.columns[j];
    std::cout << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t j = 0; j < row.size(); ++j) std::cout << (j ? "," : "") << row[j];
        std::cout << '\n';
    }
    for (const auto& [k, v] : r.manifest.metrics) std::cout << k << " = " << v << '\n';
    std::cout << "wrote " << files.size() << " files to " << cfg.output_dir.string() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Time-domain Galerkin BEM for the wave equation in an absorbing half-space"};
    app.require_subcommand(1);
    app.fallthrough();
    std::string config_path, cache_dir, output_dir, omega_text;
    int threads = -1;
    app.add_option("--threads", threads, "OpenMP threads (default: config value)");
    app.add_option("--cache-dir", cache_dir, "Directory for cached lag blocks");
    app.add_option("--output", output_dir, "Output directory (default: config value)");

    auto* solve = app.add_subcommand("solve", "Solve on the finest configured level and write signals");
    auto* conv = app.add_subcommand("convergence", "Run the refinement study for the configured problem");
    auto* diag = app.add_subcommand("diagnose", "Frequency-domain coercivity and continuity at one omega");
    for (auto* s : {solve, conv, diag}) s->add_option("--config", config_path, "Key = value config file")->required();
    diag->add_option("--omega", omega_text, "Complex frequency a+bi with b > 0")->required();

    CLI11_PARSE(app, argc, argv);
    try {
        tdbem::ExperimentConfig cfg = tdbem::load_config(config_path);
        if (threads >= 0) cfg.threads = threads;
        if (!cache_dir.empty()) cfg.cache_dir = cache_dir;
        if (!output_dir.empty()) cfg.output_dir = output_dir;
#ifdef _OPENMP
        if (cfg.threads > 0) omp_set_num_threads(cfg.threads);
#endif
        if (*solve) write(tdbem::run_solve(cfg), cfg);
        if (*conv)
            write(cfg.problem == tdbem::Problem::Dirichlet ? tdbem::run_dirichlet_convergence(cfg)
                                                           : tdbem::run_acoustic_convergence(cfg),
                  cfg);
        if (*diag) write(tdbem::run_diagnose(cfg, parse_omega(omega_text)), cfg);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
