#pragma once

#include "udnopt/manifold/cost.hpp"
#include "udnopt/manifold/solvers.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <set>
#include <utility>
#include <vector>

namespace udnopt::tim {

/// K transmitter-receiver pairs. Indices are 0-based in the API and 1-based in files.
struct NetworkTopology {
    int K = 0;
    std::set<std::pair<int, int>> connections;  ///< (i, j): receiver i hears transmitter j, i != j
    std::vector<std::set<int>> caches;          ///< empty, or K sets of messages cached at each receiver

    /// Throws std::invalid_argument on self pairs, out-of-range indices or own-message caches.
    void validate() const;
};

/// `K`, then `conn i j` lines, then optional `cache k j1 j2 ...` lines; '#' starts a comment.
NetworkTopology read_topology(std::istream& in);
void write_topology(std::ostream& out, const NetworkTopology& topo);

enum class EntryState { FixedOne, FixedZero, Free };

class SideInfoMask {
public:
    /// Unit diagonal, the given off-diagonal zeros, everything else free.
    SideInfoMask(int K, const std::set<std::pair<int, int>>& fixed_zeros);

    int size() const noexcept { return K_; }
    EntryState state(int i, int j) const;
    const std::set<std::pair<int, int>>& fixed_zeros() const noexcept { return zeros_; }

private:
    int K_;
    std::set<std::pair<int, int>> zeros_;
};

/// (i, j) is FixedZero iff (i, j) is a connection and receiver i does not cache message j.
SideInfoMask build_mask(const NetworkTopology& topo);

/// sum_i (M_ii - 1)^2 + sum_{(i,j) FixedZero} M_ij^2.
manifold::MaskedLeastSquares masked_cost(const SideInfoMask& mask);

/// Largest |violation| of the fixed entries.
double max_violation(const SideInfoMask& mask, const Eigen::MatrixXd& M);

enum class SolverKind { Rcg, Rtr };

struct CompletionOptions {
    int r_max = 0;            ///< 0 means K
    int restarts = 10;
    double eps_feas = 1e-6;   ///< success threshold on the cost value
    SolverKind solver = SolverKind::Rtr;
    manifold::SolverOptions solver_options = [] {
        manifold::SolverOptions o;
        o.max_iterations = 500;
        o.gradient_tolerance = 1e-12;
        o.max_inner_iterations = 100;
        o.stall_window = 10;
        o.stall_ratio = 0.5;
        return o;
    }();
    /// A restart that reaches eps_feas is polished for up to `certify_iterations` more solver
    /// iterations and counts only if f then drops to `certify_tolerance`. Attained completions
    /// converge to rounding level; costs that merely approach 0 with growing entries do not.
    double certify_tolerance = 1e-18;
    int certify_iterations = 500;
    std::uint64_t seed = 0;
    unsigned threads = 1;     ///< restarts run in parallel; 0 = hardware concurrency
};

struct RankAttempt {
    int rank = 0;
    double best_objective = 0.0;
    int restarts_run = 0;
    int solver_failures = 0;  ///< restarts that ended in rank collapse or threw
    int uncertified = 0;      ///< restarts below eps_feas that failed certification
    bool feasible = false;
    bool analytic = false;    ///< decided without running a solver
};

struct CompletionResult {
    int rank = 0;
    Eigen::MatrixXd M;
    double residual = 0.0;  ///< cost value f(M)
    double dof = 0.0;
    bool success = false;
    /// Returned rank is an upper bound found by a nonconvex search, not a certified minimum
    /// (false only when the rank-1 decision or the full-rank identity settles it).
    bool heuristic = true;
    std::vector<RankAttempt> attempts;
};

/// Fixed-rank attempt with restarts. Rank 1 is decided exactly: feasible iff there is no
/// FixedZero entry (then M is all ones), since rank-1 costs can approach 0 without a solution.
/// Higher ranks need a certified restart (see CompletionOptions). The reported point is the
/// first certified restart in restart order, else the one with the lowest cost.
RankAttempt complete_at_rank(const SideInfoMask& mask, int r, const CompletionOptions& opts,
                             Eigen::MatrixXd* completion = nullptr);

/// Incremental search r = 1, 2, ..., r_max; stops at the first feasible rank.
CompletionResult min_rank_complete(const SideInfoMask& mask, const CompletionOptions& opts = {});

struct NuclearNormOptions {
    int max_iterations = 20000;
    double tolerance = 1e-9;
    double rho = 1.0;
    double rank_threshold = 1e-6;  ///< relative to sigma_max
    double eps_feas = 1e-6;
};

enum class NuclearStatus { Converged, MaxIterations };

struct NuclearNormResult {
    CompletionResult completion;
    NuclearStatus status = NuclearStatus::MaxIterations;
    int iterations = 0;
};

/// min ||M||_* subject to the fixed entries, by ADMM alternating singular-value soft
/// thresholding with re-imposition of the fixed entries.
NuclearNormResult nuclear_norm_complete(const SideInfoMask& mask, const NuclearNormOptions& opts = {});

struct PrecoderDecoderSet {
    int n = 0;                 ///< channel uses
    Eigen::MatrixXd decoders;  ///< n x K, column i is u_i
    Eigen::MatrixXd precoders; ///< n x K, column j is v_j; u_i^T v_j = M_ij
};

/// Balanced truncated-SVD factorization M = A^T B with n = r rows.
/// Throws std::invalid_argument when sigma_{r+1} > 1e-6 sigma_max.
PrecoderDecoderSet extract_precoders(const Eigen::MatrixXd& M, int r);

/// 1 / rank; throws for rank < 1.
double dof(int rank);

/// K rows of `1`, `0` or `*`.
void write_mask_csv(std::ostream& out, const SideInfoMask& mask);
/// Completed matrix, 17 significant digits.
void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& M);

}  // namespace udnopt::tim
