#pragma once

#include <filesystem>
#include <vector>

#include "tdbem/discretization.hpp"
#include "tdbem/kernel.hpp"
#include "tdbem/panel_integration.hpp"

namespace tdbem {

struct PotentialOptions {
    PolarOptions polar{4, 6, 1.0};
    bool free_space = true;
    bool image = true;
    bool sigma = true;
    int n_gauss = 6;  // per time cell for the Sigma parts of the double layer
};

/// S p(t, x) = Int Int G(t - s, x, y) p(s, y) ds dy. x must be off the mesh, x3 > 0.
double eval_single_layer(const Density& d, const SurfaceMesh& mesh, const Vec3& x, double t,
                         const KernelParams& params, const PotentialOptions& opts = {});

/// D phi(t, x) = Int Int dG/dn_y(t - s, x, y) phi(s, y) ds dy, for q = 1 densities.
double eval_double_layer(const Density& d, const SurfaceMesh& mesh, const Vec3& x, double t,
                         const KernelParams& params, const PotentialOptions& opts = {});

/// Sample times on the solver grid, refined by `oversample` points per step.
std::vector<double> observation_times(double dt, int nt, int oversample = 1);

/// Writes `t,value` rows.
void write_signal_csv(const std::filesystem::path& path, const std::vector<double>& t,
                      const std::vector<double>& value);

}  // namespace tdbem
