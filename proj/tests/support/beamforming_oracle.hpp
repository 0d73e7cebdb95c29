#pragma once

// Reference solutions for downlink power minimization that do not go through the conic solver.

#include "udnopt/sparse/cran.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <vector>

namespace udnopt::testing {

struct DualityResult {
    double power = 0.0;  ///< sum_k ||v_k||^2 from the downlink power solve
    double dual_value = 0.0;  ///< sum_k lambda_k sigma_k^2
    bool converged = false;
};

/// Fixed-point iteration on the uplink dual powers lambda_k with all RRHs cooperating and no
/// per-RRH budgets; downlink powers follow from the SINR equalities along MMSE directions.
inline DualityResult duality_power_min(const sparse::CranInstance& inst, int max_iterations = 100000) {
    std::vector<int> all(inst.num_rrh);
    for (int l = 0; l < inst.num_rrh; ++l) all[l] = l;
    const int K = inst.num_users;
    std::vector<Eigen::VectorXcd> h(K);
    for (int k = 0; k < K; ++k) h[k] = inst.stacked_channel(k, all);
    const Eigen::Index M = K ? h[0].size() : 0;
    Eigen::VectorXd lambda = Eigen::VectorXd::Zero(K);
    DualityResult out;
    auto gram = [&](const Eigen::VectorXd& lam) {
        Eigen::MatrixXcd S = Eigen::MatrixXcd::Identity(M, M);
        for (int j = 0; j < K; ++j) S += lam[j] * h[j] * h[j].adjoint();
        return S;
    };
    for (int it = 0; it < max_iterations; ++it) {
        const Eigen::LDLT<Eigen::MatrixXcd> S(gram(lambda));
        Eigen::VectorXd next(K);
        for (int k = 0; k < K; ++k) {
            const double quad = h[k].dot(S.solve(h[k])).real();
            next[k] = 1.0 / ((1.0 + 1.0 / inst.sinr_target[k]) * quad);
        }
        const double change = (next - lambda).cwiseAbs().maxCoeff();
        lambda = next;
        if (change < 1e-14 * (1.0 + lambda.cwiseAbs().maxCoeff())) {
            out.converged = true;
            break;
        }
    }
    const Eigen::LDLT<Eigen::MatrixXcd> S(gram(lambda));
    std::vector<Eigen::VectorXcd> w(K);
    for (int k = 0; k < K; ++k) w[k] = S.solve(h[k]).normalized();
    Eigen::MatrixXd G(K, K);
    Eigen::VectorXd rhs(K);
    for (int k = 0; k < K; ++k) {
        for (int j = 0; j < K; ++j) {
            const double g = std::norm(h[k].dot(w[j]));
            G(k, j) = j == k ? g / inst.sinr_target[k] : -g;
        }
        rhs[k] = inst.noise_power[k];
    }
    const Eigen::VectorXd p = G.partialPivLu().solve(rhs);
    out.power = p.sum();
    for (int k = 0; k < K; ++k) out.dual_value += lambda[k] * inst.noise_power[k];
    return out;
}

}  // namespace udnopt::testing
