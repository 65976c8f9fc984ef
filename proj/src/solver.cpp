#include "tdbem/solver.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <string>

#include <Eigen/SparseLU>

namespace tdbem {

void MOTSystem::validate() const {
    if (blocks.blocks.empty()) throw SolverError("MOT: no blocks");
    if (blocks.lag_min < 0) throw SolverError("MOT: blocks with negative lag are not lower triangular");
    if (blocks.rows != blocks.cols) throw SolverError("MOT: blocks must be square");
    if (blocks.row_weight_sigma != 0.0) throw SolverError("MOT: weighted blocks are for norms, not for solving");
    if (rhs.cols() != blocks.rows) throw SolverError("MOT: rhs width does not match the block size");
}

namespace {

double norm1(const Eigen::SparseMatrix<double>& A) {
    double m = 0.0;
    for (int c = 0; c < A.outerSize(); ++c) {
        double s = 0.0;
        for (Eigen::SparseMatrix<double>::InnerIterator it(A, c); it; ++it) s += std::abs(it.value());
        m = std::max(m, s);
    }
    return m;
}

// Lower bound of |A^{-1}|_1 from a few solves.
double inverse_norm1_estimate(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& solve, int n) {
    std::mt19937 rng(7);
    std::uniform_int_distribution<int> coin(0, 1);
    double best = 0.0;
    for (int t = 0; t < 4; ++t) {
        Eigen::VectorXd v(n);
        for (int i = 0; i < n; ++i) v[i] = coin(rng) ? 1.0 : -1.0;
        best = std::max(best, solve(v).lpNorm<1>() / n);
    }
    for (int i = 0; i < std::min(n, 4); ++i) best = std::max(best, solve(Eigen::VectorXd::Unit(n, i)).lpNorm<1>());
    return best;
}

void finish(const MOTSystem& sys, const MOTOptions& opts, MOTResult& r) {
    r.step_norm.resize(sys.nt());
    for (int n = 0; n < sys.nt(); ++n) r.step_norm[n] = r.x.row(n).norm();
    r.residual = relative_residual(sys, r.x);
    const int nt = sys.nt();
    if (nt >= 8) {
        const double early = *std::max_element(r.step_norm.begin(), r.step_norm.begin() + nt / 2);
        const double late = *std::max_element(r.step_norm.begin() + 3 * nt / 4, r.step_norm.end());
        r.energy_growth = early > 0.0 ? late > opts.growth_ratio * early : late > 0.0;
    }
}

}  // namespace

double relative_residual(const MOTSystem& sys, const Eigen::MatrixXd& x) {
    const int L = sys.blocks.lag_max();
    double num = 0.0, den = 0.0;
    for (int n = 0; n < sys.nt(); ++n) {
        Eigen::VectorXd r = sys.rhs.row(n).transpose();
        for (int k = 0; k <= std::min(n, L); ++k) r -= sys.blocks.block(k) * x.row(n - k).transpose();
        num += r.squaredNorm();
        den += sys.rhs.row(n).squaredNorm();
    }
    return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

Eigen::MatrixXd monolithic_matrix(const ToeplitzBlocks& blocks, int nt) {
    const int m = blocks.rows, c = blocks.cols;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m) * nt, static_cast<Eigen::Index>(c) * nt);
    for (int k = std::max(0, blocks.lag_min); k <= std::min(blocks.lag_max(), nt - 1); ++k) {
        const Eigen::MatrixXd B = blocks.dense(k);
        for (int n = k; n < nt; ++n) A.block(n * m, (n - k) * c, m, c) = B;
    }
    return A;
}

MOTResult mot_solve(const MOTSystem& sys, const MOTOptions& opts) {
    sys.validate();
    const int n = sys.size(), nt = sys.nt();
    const Eigen::SparseMatrix<double> A0 = sys.blocks.block(0);
    MOTResult r;
    r.x = Eigen::MatrixXd::Zero(nt, n);
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> solve;
    Eigen::PartialPivLU<Eigen::MatrixXd> dense_lu;
    Eigen::SparseLU<Eigen::SparseMatrix<double>> sparse_lu;
    if (n < opts.sparse_threshold) {
        dense_lu.compute(Eigen::MatrixXd(A0));
        const double rc = dense_lu.rcond();
        r.condition = rc > 0.0 ? 1.0 / rc : INFINITY;
        solve = [&](const Eigen::VectorXd& b) -> Eigen::VectorXd { return dense_lu.solve(b); };
    } else {
        sparse_lu.compute(A0);
        if (sparse_lu.info() != Eigen::Success) throw SolverError("MOT: sparse factorisation of A0 failed");
        solve = [&](const Eigen::VectorXd& b) -> Eigen::VectorXd { return sparse_lu.solve(b); };
        r.condition = norm1(A0) * inverse_norm1_estimate(solve, n);
    }
    if (!(r.condition <= opts.max_condition))
        throw SolverError("MOT: A0 is singular or ill-conditioned (condition estimate " + std::to_string(r.condition) +
                          ")");
    const int L = sys.blocks.lag_max();
    for (int s = 0; s < nt; ++s) {
        Eigen::VectorXd b = sys.rhs.row(s).transpose();
        for (int k = 1; k <= std::min(s, L); ++k) b -= sys.blocks.block(k) * r.x.row(s - k).transpose();
        r.x.row(s) = solve(b).transpose();
    }
    finish(sys, opts, r);
    return r;
}

MOTResult dense_solve(const MOTSystem& sys, const MOTOptions& opts) {
    sys.validate();
    const long total = static_cast<long>(sys.size()) * sys.nt();
    if (total > 10000) throw SolverError("dense_solve: more than 1e4 unknowns");
    const Eigen::MatrixXd A = monolithic_matrix(sys.blocks, sys.nt());
    Eigen::VectorXd b(total);
    for (int s = 0; s < sys.nt(); ++s) b.segment(static_cast<Eigen::Index>(s) * sys.size(), sys.size()) = sys.rhs.row(s);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
    MOTResult r;
    const double rc = lu.rcond();
    r.condition = rc > 0.0 ? 1.0 / rc : INFINITY;
    if (!(r.condition <= opts.max_condition)) throw SolverError("dense_solve: system is singular or ill-conditioned");
    const Eigen::VectorXd x = lu.solve(b);
    r.x.resize(sys.nt(), sys.size());
    for (int s = 0; s < sys.nt(); ++s) r.x.row(s) = x.segment(static_cast<Eigen::Index>(s) * sys.size(), sys.size());
    finish(sys, opts, r);
    return r;
}

}  // namespace tdbem
