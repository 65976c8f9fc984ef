#pragma once

// Internal retarded-potential integration engines shared by the operator assemblers.

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "tdbem/assembly.hpp"

namespace tdbem::engine {

using DenseBlocks = std::vector<Eigen::MatrixXd>;  // index k - lag_min

/// Spatial weight of one channel for the panel pair (test i, trial j): w[a][b] for
/// test shape a and trial shape b. `image` selects the reflected trial panel.
using PairWeight = std::function<void(int i, int j, bool image, double w[3][3])>;

/// One time correlation with its spatial weighting. With `shapes` the channel
/// integrates lambda_a(x) lambda_b(y) w[a][b]; otherwise w[a][b] is the whole
/// spatial factor (used for the constant surface curls of p = 1 functions).
struct Channel {
    PiecewisePoly D;
    bool shapes = true;
    PairWeight weight;
};

struct LagRange {
    int lag_min = 0, lag_max = 0;
    int count() const { return lag_max - lag_min + 1; }
};

/// Int_test Int_trial Int G(u; x, y) D(u - k dt) du for every channel, G the
/// half-space kernel G0(x-y) + G0(x-y') + Sigma (each part switchable in opts).
DenseBlocks single_layer(const SurfaceMesh& mesh, double dt, const SpaceBasis& test, const SpaceBasis& trial,
                         const std::vector<Channel>& channels, double alpha, const AssemblyOptions& opts,
                         LagRange lags);

/// Int_outer Int_inner Int dG/dn_inner(u; x, y) D(u - k dt) du with shapes on both
/// panels and weight 2. D must be continuous. With `transpose` the result is stored
/// as (inner dof, outer dof), otherwise (outer dof, inner dof).
DenseBlocks double_layer(const SurfaceMesh& mesh, double dt, const SpaceBasis& outer, const SpaceBasis& inner,
                         const PiecewisePoly& D, double alpha, const AssemblyOptions& opts, LagRange lags,
                         bool transpose);

/// Outer quadrature rule for the given refinement level.
std::vector<TrianglePoint> outer_rule(int refine);

ToeplitzBlocks to_blocks(const DenseBlocks& dense, OperatorTag tag, double dt, int lag_min, double row_sigma);

}  // namespace tdbem::engine
