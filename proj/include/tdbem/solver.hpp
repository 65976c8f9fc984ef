#pragma once

#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "tdbem/assembly.hpp"

namespace tdbem {

class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Block lower-triangular Toeplitz system sum_{k>=0} A^k x_{n-k} = b_n, n = 0..nt-1.
/// Row n of rhs is b_n.
struct MOTSystem {
    ToeplitzBlocks blocks;
    Eigen::MatrixXd rhs;

    int nt() const noexcept { return static_cast<int>(rhs.rows()); }
    int size() const noexcept { return blocks.cols; }
    void validate() const;
};

struct MOTOptions {
    double max_condition = 1e12;  // reject A^0 beyond this estimate
    int sparse_threshold = 2000;  // sparse LU from this many rows on
    double growth_ratio = 1e3;    // energy-growth flag: late step norms over early peak
};

struct MOTResult {
    Eigen::MatrixXd x;              // row n is x_n
    double condition = 0.0;         // estimate for A^0 (1-norm)
    std::vector<double> step_norm;  // |x_n|
    bool energy_growth = false;
    double residual = 0.0;          // relative residual of the full system
};

/// Forward substitution with one factorisation of A^0.
MOTResult mot_solve(const MOTSystem& sys, const MOTOptions& opts = {});

/// Monolithic solve of the full block lower-triangular matrix; at most 1e4 unknowns.
MOTResult dense_solve(const MOTSystem& sys, const MOTOptions& opts = {});

/// |b - A x| / |b| over all steps (0 when b = 0 and x = 0).
double relative_residual(const MOTSystem& sys, const Eigen::MatrixXd& x);

/// Monolithic matrix of the system, rows/cols ordered (step, dof).
Eigen::MatrixXd monolithic_matrix(const ToeplitzBlocks& blocks, int nt);

}  // namespace tdbem
