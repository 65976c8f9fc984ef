#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "tdbem/assembly.hpp"
#include "tdbem/frequency.hpp"

namespace tdbem {

class AnalysisError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Space-time norm index: time order s in {0, 1}, space order r in {-1/2, 0, 1/2},
/// measure e^{-2 sigma t} dt.
struct NormSpec {
    int s = 0;
    double r = 0.0;
    double sigma = 0.0;

    void validate() const;
};

/// Operators the surrogate norms are built from.
struct NormData {
    /// <V d_t d, d> blocks on the density's basis (r = -1/2).
    const ToeplitzBlocks* energy = nullptr;
    /// Spatial Gram matrix of the 1/2 surrogate on the density's space (r = 1/2).
    const Eigen::MatrixXd* half_gram = nullptr;
};

/// ||d||_{s,r}. r = 0 by quadrature; r = -1/2 is sqrt(b(d, d)) from `energy`; r = 1/2 is the
/// duality surrogate sup_chi <d, chi>/||chi||_{-1/2} from `half_gram`. s = 1 adds ||d_t d|| (q = 1 only).
double weighted_st_norm(const Density& d, const NormSpec& spec, const SurfaceMesh& mesh, const NormData& data = {});

/// b(d, d) = sum_n e^{-2 s n dt} d_n^T sum_k A^k d_{n-k}, s the row weight of the blocks.
double energy_form(const ToeplitzBlocks& blocks, const Eigen::MatrixXd& coeffs);

/// G = M^T Y^{-1} M with M the mass between piecewise constants and `space`, Y the Yukawa single
/// layer with decay s; x^T G x is the squared 1/2 surrogate of sum_j x_j b_j.
Eigen::MatrixXd half_norm_gram(const SurfaceMesh& mesh, const SpaceBasis& space, double s = 1.0,
                               const FrequencyOptions& opts = {});

/// The three terms of |||(p, phi)|||_* and their root-sum-square.
struct AcousticNorm {
    double p = 0.0, phi_half = 0.0, dt_phi = 0.0;
    double total() const;
};

/// |||(p, phi)|||_* of discrete densities; `half_gram` on the phi space.
AcousticNorm energy_norm_acoustic(const Density& phi, const Density& p, const SurfaceMesh& mesh, double sigma,
                                  const Eigen::MatrixXd& half_gram);

/// Exact fields for error norms. p_exact receives the panel index.
struct AcousticExact {
    std::function<double(double, const Vec3&)> phi, dt_phi;
    std::function<double(double, const Vec3&, int)> p;
};

/// |||(p - p_h, phi - phi_h)|||_* with the 1/2 term from the duality surrogate against p = 0 test functions.
AcousticNorm acoustic_error(const Density& phi, const Density& p, const AcousticExact& exact, const SurfaceMesh& mesh,
                            double sigma, const Eigen::MatrixXd& yukawa_p0);

/// Interpolates a density from a coarser nested discretisation onto (fine mesh, fine basis, fine dt).
Density prolongate(const Density& coarse, const SurfaceMesh& coarse_mesh, const SurfaceMesh& fine_mesh,
                   const SpaceTimeBasis& fine_basis, double fine_dt);

struct CoercivityReport {
    cplx omega;
    bool hypotheses_hold = false;  // Re alpha > 0, Re alpha_inf >= 0, Im omega >= sigma
    double min_form = 0.0;         // min Re a_w(U, U) / |U|^2
    double min_single_layer = 0.0; // min Re <-i w V_w phi, phi> / |phi|^2
    int trials = 0;
};

/// Frequency-domain coercivity on random complex coefficient vectors. Hypothesis violations
/// are flagged, not fatal.
CoercivityReport coercivity_check(const SurfaceMesh& mesh, cplx omega, const KernelParams& params,
                                  const MaterialField& material, int trials, unsigned seed = 1,
                                  const FrequencyOptions& opts = {});

/// Re a_w(U, U) for one coefficient vector of a system.
double form_value(const FrequencySystem& sys, const CVector& U);

struct TimeCoercivityReport {
    double min_form = 0.0;  // min a(Phi, Phi) / |Phi|^2 with the e^{-2 sigma t} measure
    int trials = 0;
};

/// Space-time form a(Phi, Phi) with test function Phi itself, weighted by e^{-2 sigma t}.
TimeCoercivityReport time_coercivity_check(const SurfaceMesh& mesh, const TimeGrid& grid, const KernelParams& params,
                                           const MaterialField& material, int trials, unsigned seed = 1,
                                           const AssemblyOptions& opts = {});

struct ContinuityReport {
    double max_ratio = 0.0;
    int trials = 0;
};

/// max |a_w(U, V)| / (|U| |V|) with |U|^2 = |w|^2 |phi|_0^2 + |phi|_{1/2}^2 + |p|_0^2 (discrete surrogates).
ContinuityReport continuity_check(const SurfaceMesh& mesh, cplx omega, const KernelParams& params,
                                  const MaterialField& material, int trials, unsigned seed = 1,
                                  const FrequencyOptions& opts = {});

/// Worst relative Frobenius deviation between sum_k A^k e^{i w k dt} and c0(w) X_w, where
/// c0(w) = (1/dt) Int C(v) e^{-i w v} dv for the time correlation C of the blocks.
double transform_consistency(const ToeplitzBlocks& blocks, const PiecewisePoly& correlation,
                             const std::vector<cplx>& omegas, const std::function<CMatrix(cplx)>& frequency_matrix);

/// Least-squares slope of log(error) against log(step), sign chosen so that error ~ step^slope.
double estimate_rate(const std::vector<double>& errors, const std::vector<double>& steps);

/// Appends one JSON object per line: {"operation", "inputs", "metrics"}.
void append_json_record(const std::string& path, const std::string& operation, const nlohmann::json& inputs,
                        const nlohmann::json& metrics);

}  // namespace tdbem
