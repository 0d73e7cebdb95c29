#pragma once

#include "udnopt/conic/program.hpp"

#include <Eigen/SparseCholesky>

#include <optional>
#include <stdexcept>
#include <string>

namespace udnopt::conic {

enum class SolveStatus { Optimal, PrimalInfeasible, DualInfeasible, MaxIterations };

std::string to_string(SolveStatus status);

struct AdmmOptions {
    int max_iterations = 10000;
    double eps_abs = 1e-6;
    double eps_rel = 1e-6;
    /// Tolerance on the Farkas residual of an infeasibility certificate.
    double eps_infeasible = 1e-7;
    /// Over-relaxation parameter in (0, 2).
    double relaxation = 1.5;
    /// Ruiz-style row/column equilibration. Off by default.
    bool equilibrate = false;
    /// Residuals and certificates are evaluated every `check_interval` iterations.
    int check_interval = 1;
};

/// Initial primal/dual/slack iterate. Any component may be left empty (zeros are used).
struct WarmStart {
    Eigen::VectorXd x, y, s;
};

/// For Optimal: (x, y, s) is an approximate primal-dual pair. For PrimalInfeasible:
/// y is a certificate with y in K*, A'y ~ 0 and b'y = -1. For DualInfeasible: x is a
/// certificate with Ax + s ~ 0, s in K and c'x = -1. MaxIterations carries the last iterate.
struct ConicSolution {
    Eigen::VectorXd x, y, s;
    SolveStatus status = SolveStatus::MaxIterations;
    double primal_residual = 0.0;
    double dual_residual = 0.0;
    double duality_gap = 0.0;
    double objective = 0.0;
    int iterations = 0;
};

/// Raised on numerical breakdown (failed factorization, non-finite iterates).
class SolverFailure : public std::runtime_error {
public:
    explicit SolverFailure(const std::string& what) : std::runtime_error(what) {}
};

/// Operator-splitting solver on the homogeneous self-dual embedding.
///
/// The KKT-type matrix I + A'A is analysed once at construction; update() with a
/// program of identical sparsity pattern only refactors numerically.
class AdmmSolver {
public:
    explicit AdmmSolver(const StandardConicProgram& prog, AdmmOptions opts = {});

    /// Replaces the numeric data. Throws std::invalid_argument if the pattern or cones differ.
    void update(const StandardConicProgram& prog);

    ConicSolution solve(const std::optional<WarmStart>& warm = std::nullopt) const;

    const AdmmOptions& options() const noexcept { return opts_; }

private:
    void equilibrate_and_factor();

    AdmmOptions opts_;
    StandardConicProgram prog_;

    // Scaled data (identical to the program unless equilibration is on).
    SparseMatrix A_;
    SparseMatrix At_;
    Eigen::VectorXd b_, c_;
    Eigen::VectorXd row_scale_, col_scale_;

    SparseMatrix kkt_pattern_;
    Eigen::SimplicialLDLT<SparseMatrix> ldlt_;
    Eigen::VectorXd g_x_, g_y_;
    double h_dot_g_ = 0.0;
};

ConicSolution admm_solve(const StandardConicProgram& prog, const AdmmOptions& opts = {});

}  // namespace udnopt::conic
