#pragma once

#include <functional>
#include <vector>

#include "tdbem/analysis.hpp"
#include "tdbem/assembly.hpp"
#include "tdbem/config.hpp"
#include "tdbem/report.hpp"
#include "tdbem/solver.hpp"
#include "tdbem/source.hpp"

namespace tdbem {

class HarnessError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One refinement level: mesh after `level` uniform refinements, nt = nt_0 2^level steps on [0, T].
struct Level {
    int level = 0;
    SurfaceMesh mesh;
    TimeGrid grid;
};

std::vector<Level> make_levels(const ExperimentConfig& cfg);

/// Generalised winding number of a closed mesh around x (1 inside, 0 outside).
double winding_number(const SurfaceMesh& mesh, const Vec3& x);

/// Throws unless the source is inside the closed mesh, at least h/4 away from it.
void check_source(const ExperimentConfig& cfg, const SurfaceMesh& mesh);

PointSourceField manufactured_source(const ExperimentConfig& cfg);

/// Boundary trace f(t, x) of the source field; the Dirichlet solve uses V phi = 2 f.
SpaceTimeFunction manufactured_dirichlet_data(const ExperimentConfig& cfg);

/// Exterior points on a sphere around the mesh centre, for the Dirichlet surrogate error.
std::vector<Vec3> surrogate_points(const ExperimentConfig& cfg, const SurfaceMesh& mesh);

/// Computed against reference fields at points, sampled at observation_times(dt, nt, oversample).
struct FieldComparison {
    std::vector<double> t;
    std::vector<std::vector<double>> computed, reference;  // [point][time]
    std::vector<double> point_error;                      // relative L2-in-time per point
    double error = 0.0;                                   // aggregated over all points
};

FieldComparison compare_field(const std::function<double(double, const Vec3&)>& computed,
                              const std::function<double(double, const Vec3&)>& reference,
                              const std::vector<Vec3>& points, const TimeGrid& grid, int oversample);

struct DirichletSolution {
    Density phi;
    ToeplitzBlocks V;  // <V d_t phi, psi> blocks, box/box, p = 0
    MOTResult mot;
    double assembly_s = 0.0, solve_s = 0.0;
};

DirichletSolution solve_dirichlet(const ExperimentConfig& cfg, const Level& level);

struct AcousticSolution {
    Density phi, p;
    MOTResult mot;
    double assembly_s = 0.0, solve_s = 0.0;
};

/// Data F = d_n u - alpha d_t u and G = -F from the source field u, whose exact densities are
/// phi = -u and p = -d_n u (interior field zero).
AcousticSolution solve_acoustic(const ExperimentConfig& cfg, const Level& level);

/// Tables and manifest entries of an experiment run.
struct ExperimentResult {
    std::vector<Table> tables;  // first table is the summary
    RunManifest manifest;
};

/// Per level: solve, field reproduction at the observers, surrogate error on exterior sphere
/// points, Cauchy difference in the energy surrogate against the next level, fitted rates.
ExperimentResult run_dirichlet_convergence(const ExperimentConfig& cfg);

/// Per level: solve, |||.|||_* error against the exact densities, Cauchy difference against the
/// next level, field reproduction by S p - D phi, fitted rates.
ExperimentResult run_acoustic_convergence(const ExperimentConfig& cfg);

/// Single level (the finest configured one) with signals.
ExperimentResult run_solve(const ExperimentConfig& cfg);

/// Frequency-domain coercivity and continuity on the coarse mesh at one omega.
ExperimentResult run_diagnose(const ExperimentConfig& cfg, cplx omega, int trials = 100);

/// Rate of a positive error sequence at the given steps, NaN when undefined.
double fitted_rate(const std::vector<double>& errors, const std::vector<double>& steps);

}  // namespace tdbem
