#pragma once

#include "udnopt/conic/admm.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace udnopt::detect {

/// Y = Theta Q + W with Theta = H Sigma: N devices, M antennas, K active, pilot length L.
struct DetectionInstance {
    int N = 0;
    int M = 0;
    int K = 0;
    int L = 0;
    double noise_sd = 0.0;
    Eigen::MatrixXcd Q;      ///< N x L pilots
    std::vector<int> support;  ///< sorted active devices
    Eigen::MatrixXcd theta;  ///< M x N, zero outside the support
    Eigen::MatrixXcd Y;      ///< M x L
};

/// Q, H ~ CN(0, 1) entrywise, W ~ CN(0, noise_sd^2), support uniform over K-subsets.
DetectionInstance generate_instance(int N, int M, int K, int L, double noise_sd, std::uint64_t seed);

/// Smallest lambda for which Theta = 0 minimizes the group lasso: max_n ||(Y Q^H)_n||.
double lambda_max(const Eigen::MatrixXcd& Y, const Eigen::MatrixXcd& Q);

/// Noisy-data regularization c * noise_sd * sqrt(M log N).
double default_lambda(double noise_sd, int M, int N, double c = 1.0);

struct GroupLassoOptions {
    int max_iterations = 50000;
    double objective_tolerance = 1e-10;  ///< relative objective change
    double kkt_tolerance = 1e-5;         ///< relative to lambda
    double support_threshold = 1e-3;     ///< relative rule for the reported support
    Eigen::MatrixXcd warm_start;         ///< initial Theta (M x N); empty means zero
};

struct GroupLassoEstimate {
    Eigen::MatrixXcd theta;
    std::vector<int> support;
    double lambda = 0.0;
    std::vector<double> objective_trace;  ///< one entry per accepted iterate, starting at the initial point
    int iterations = 0;
    bool converged = false;
};

/// (1/2)||Y - Theta Q||_F^2 + lambda sum_n ||theta_n||_2.
double group_lasso_objective(const Eigen::MatrixXcd& Y, const Eigen::MatrixXcd& Q, double lambda,
                             const Eigen::MatrixXcd& theta);

struct KktViolation {
    double on_support = 0.0;   ///< max ||g_n + lambda theta_n / ||theta_n|||| over nonzero columns
    double off_support = 0.0;  ///< max ||g_n|| over zero columns
};

/// Block optimality residuals of the group lasso at theta (g = gradient of the smooth part).
KktViolation group_lasso_kkt(const Eigen::MatrixXcd& Y, const Eigen::MatrixXcd& Q, double lambda,
                             const Eigen::MatrixXcd& theta);

/// Accelerated proximal gradient with monotone restart; lambda = 0 returns the minimum-norm
/// least-squares solution directly.
GroupLassoEstimate group_lasso_solve(const Eigen::MatrixXcd& Y, const Eigen::MatrixXcd& Q, double lambda,
                                     const GroupLassoOptions& opts = {});

struct BasisPursuitOptions {
    conic::AdmmOptions admm = [] {
        conic::AdmmOptions o;
        o.eps_abs = 1e-9;
        o.eps_rel = 1e-9;
        o.max_iterations = 20000;
        return o;
    }();
    /// Replace the ADMM iterate by the exact least-squares fit on its support when that
    /// point is feasible and no worse in objective.
    bool polish = false;
    double support_threshold = 1e-3;
};

/// min sum_n ||theta_n||_2 s.t. Theta Q = Y through the conic ADMM solver.
/// Throws conic::SolverFailure if the solver does not reach an optimal status.
GroupLassoEstimate basis_pursuit_group(const Eigen::MatrixXcd& Y, const Eigen::MatrixXcd& Q,
                                       const BasisPursuitOptions& opts = {});

/// ||est - truth||_F^2 / ||truth||_F^2; throws std::invalid_argument when truth = 0 or shapes differ.
double nmse(const Eigen::MatrixXcd& estimate, const Eigen::MatrixXcd& truth);

struct SupportRule {
    enum class Kind { Relative, TopK } kind = Kind::Relative;
    double tau = 1e-3;
    int k = 0;

    static SupportRule relative(double tau) { return {Kind::Relative, tau, 0}; }
    static SupportRule top_k(int k) { return {Kind::TopK, 0.0, k}; }
};

/// Sorted column indices selected by the rule; throws on an empty matrix.
std::vector<int> detect_support(const Eigen::MatrixXcd& theta, const SupportRule& rule);

/// Exact top-K support and relative error <= 1e-5: the phase-transition success criterion.
bool recovery_success(const Eigen::MatrixXcd& estimate, const DetectionInstance& inst, double rel_tol = 1e-5);

}  // namespace udnopt::detect
