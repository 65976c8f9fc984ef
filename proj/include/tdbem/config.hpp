#pragma once

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "tdbem/mesh.hpp"

namespace tdbem {

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class Problem { Dirichlet, Acoustic };

/// Experiment parameters. Text form: one `key = value` per line, `#` starts a comment,
/// vectors as `x, y, z`, point lists separated by `;`.
struct ExperimentConfig {
    Problem problem = Problem::Dirichlet;
    std::filesystem::path mesh = "data/octahedron.mesh";
    int levels = 3;             // uniform refinements 0..levels-1
    double dt_factor = 0.5;     // dt = dt_factor * h, rounded so that T / dt is an integer
    double horizon = 10.0;      // T
    double alpha_inf = 0.3;     // half-space absorption
    double alpha = 1.0;         // obstacle impedance (acoustic problem)
    double sigma = 0.0;         // weight in right-hand sides and norms
    Vec3 source{0.1, 0.05, 2.0};
    double pulse_amplitude = 1.0;
    double pulse_tau = 0.5;     // lambda(t) = A (t/tau)^4 e^{-t/tau}
    std::vector<Vec3> observers{{0.0, 0.0, 3.5}, {2.5, 0.0, 2.0}, {0.0, -1.8, 1.0}};
    int oversample = 4;         // field samples per time step
    int surrogate_points = 6;   // exterior sphere points of the Dirichlet surrogate error
    double surrogate_radius = 1.8;
    std::filesystem::path output_dir = "tdbem_out";
    std::filesystem::path cache_dir;  // empty: no block cache
    int threads = 1;

    /// Checks ranges that do not need the mesh.
    void validate() const;
    /// Flat key/value echo, in the text format.
    std::map<std::string, std::string> to_map() const;
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);
std::string to_string(Problem p);

}  // namespace tdbem
