#pragma once

#include "udnopt/manifold/cost.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace udnopt::manifold {

struct IterationRecord {
    int iter = 0;
    double objective = 0.0;
    double grad_norm = 0.0;
    double step = 0.0;  ///< accepted step length (rcg), trust radius (rtr), 0 for altmin
    double elapsed_seconds = 0.0;
};

enum class Termination { GradientTolerance, CostTolerance, MaxIterations, RankCollapse, LineSearchFailure, Stalled };

const char* to_string(Termination t);

struct SolveTrace {
    std::vector<IterationRecord> records;  ///< record 0 is the initial point
    std::optional<FixedRankPoint> final_point;
    Termination reason = Termination::MaxIterations;
    std::string message;

    int iterations() const { return records.empty() ? 0 : records.back().iter; }
    double final_objective() const { return records.empty() ? 0.0 : records.back().objective; }
    /// First iteration whose objective is <= target, or nullopt.
    std::optional<int> iterations_to(double target) const;
};

struct SolverOptions {
    int max_iterations = 1000;
    double gradient_tolerance = 1e-6;
    /// Also stop once f <= cost_tolerance (disabled by default).
    double cost_tolerance = -1.0;
    /// Stop when f > cost_tolerance and f >= stall_ratio * (f from stall_window iterations
    /// earlier). 0 disables.
    int stall_window = 0;
    double stall_ratio = 0.5;

    // Line search (rcg)
    double armijo_c1 = 1e-4;
    double backtrack = 0.5;
    double initial_step = 1.0;
    int max_backtracks = 60;

    // Trust region (rtr)
    double initial_radius = 1.0;
    double max_radius = 1e4;
    double accept_ratio = 0.1;
    int max_inner_iterations = 0;  ///< tCG cap; 0 means manifold dimension
    double tcg_kappa = 0.1;
    double tcg_theta = 1.0;

    // altmin
    double tikhonov = 1e-12;
};

/// Riemannian conjugate gradient: Polak-Ribiere+ with transport, Armijo backtracking, restart to
/// steepest descent whenever the direction is not a descent direction.
SolveTrace rcg_solve(const SmoothCost& cost, const FixedRankPoint& X0, const SolverOptions& opts = {});

/// Riemannian trust region with truncated CG; uses the exact Hessian when the cost has one.
SolveTrace rtr_solve(const SmoothCost& cost, const FixedRankPoint& X0, const SolverOptions& opts = {});

/// Alternating least squares on M = L R^T for masked costs, started from L = U S, R = V.
/// One iteration is one full sweep (L then R); gradient norms are Riemannian at the swept point.
SolveTrace altmin_solve(const MaskedLeastSquares& cost, const FixedRankPoint& X0, const SolverOptions& opts = {});

/// Rank-r truncated SVD of the target matrix (zeros off the mask) plus N(0, sigma^2) entrywise noise,
/// re-truncated to rank r.
FixedRankPoint initial_point(const MaskedLeastSquares& cost, Eigen::Index r, std::uint64_t seed, double sigma = 1e-2);

/// CSV `iter,objective,grad_norm,step,elapsed_seconds`; timing column left empty unless requested.
void write_trace_csv(std::ostream& out, const SolveTrace& trace, bool include_timing = false);

}  // namespace udnopt::manifold
