#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <complex>

namespace udnopt::testing {

/// Independent block optimality check: returns the worst violation relative to lambda.
inline double kkt_gap(const Eigen::MatrixXcd& Y, const Eigen::MatrixXcd& Q, double lambda, const Eigen::MatrixXcd& theta) {
    double worst = 0.0;
    for (Eigen::Index n = 0; n < theta.cols(); ++n) {
        Eigen::VectorXcd g = Eigen::VectorXcd::Zero(theta.rows());
        for (Eigen::Index l = 0; l < Q.cols(); ++l) {
            Eigen::VectorXcd r = -Y.col(l);
            for (Eigen::Index j = 0; j < theta.cols(); ++j) r += theta.col(j) * Q(j, l);
            g += r * std::conj(Q(n, l));
        }
        const double nt = theta.col(n).norm();
        if (nt > 0) worst = std::max(worst, (g + lambda * theta.col(n) / nt).norm() / lambda);
        else worst = std::max(worst, g.norm() / lambda - 1.0);
    }
    return worst;
}

}  // namespace udnopt::testing
