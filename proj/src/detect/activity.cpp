#include "udnopt/detect/activity.hpp"

#include "udnopt/conic/complex_program.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace udnopt::detect {

namespace {

void check_shapes(const Eigen::MatrixXcd& Y, const Eigen::MatrixXcd& Q) {
    if (Y.cols() != Q.cols()) throw std::invalid_argument("activity: Y and Q disagree on the pilot length");
    if (!Y.allFinite() || !Q.allFinite()) throw std::invalid_argument("activity: non-finite input");
}

Eigen::VectorXd column_norms(const Eigen::MatrixXcd& theta) { return theta.colwise().norm().transpose(); }

/// Column-wise block soft threshold with level t.
void block_shrink(Eigen::MatrixXcd& V, double t) {
    for (Eigen::Index n = 0; n < V.cols(); ++n) {
        const double nv = V.col(n).norm();
        if (nv <= t) V.col(n).setZero();
        else V.col(n) *= 1.0 - t / nv;
    }
}

}  // namespace

DetectionInstance generate_instance(int N, int M, int K, int L, double noise_sd, std::uint64_t seed) {
    if (N < 1 || M < 1 || L < 1 || K < 0 || K > N)
        throw std::invalid_argument("generate_instance: need N, M, L >= 1 and 0 <= K <= N");
    if (!(noise_sd >= 0) || !std::isfinite(noise_sd)) throw std::invalid_argument("generate_instance: bad noise_sd");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, std::sqrt(0.5));
    auto cn = [&](Eigen::Index r, Eigen::Index c, double sd) {
        Eigen::MatrixXcd out(r, c);
        for (Eigen::Index j = 0; j < c; ++j)
            for (Eigen::Index i = 0; i < r; ++i) {
                const double re = g(rng);
                const double im = g(rng);
                out(i, j) = sd * std::complex<double>(re, im);
            }
        return out;
    };
    DetectionInstance inst;
    inst.N = N;
    inst.M = M;
    inst.K = K;
    inst.L = L;
    inst.noise_sd = noise_sd;
    std::vector<int> perm(N);
    std::iota(perm.begin(), perm.end(), 0);
    for (int i = 0; i < K; ++i) {
        std::uniform_int_distribution<int> pick(i, N - 1);
        std::swap(perm[i], perm[pick(rng)]);
    }
    inst.support.assign(perm.begin(), perm.begin() + K);
    std::sort(inst.support.begin(), inst.support.end());
    inst.Q = cn(N, L, 1.0);
    const Eigen::MatrixXcd H = cn(M, N, 1.0);
    inst.theta = Eigen::MatrixXcd::Zero(M, N);
    for (int n : inst.support) inst.theta.col(n) = H.col(n);
    inst.Y = inst.theta * inst.Q;
    if (noise_sd > 0) inst.Y += cn(M, L, noise_sd);
    return inst;
}

double lambda_max(const Eigen::MatrixXcd& Y, const Eigen::MatrixXcd& Q) {
    check_shapes(Y, Q);
    if (Q.rows() == 0) return 0.0;
    return column_norms(Y * Q.adjoint()).maxCoeff();
}

double default_lambda(double noise_sd, int M, int N, double c) {
    if (M < 1 || N < 1 || noise_sd < 0 || c < 0) throw std::invalid_argument("default_lambda: bad arguments");
    return c * noise_sd * std::sqrt(M * std::log(static_cast<double>(N)));
}

double group_lasso_objective(const Eigen::MatrixXcd& Y, const Eigen::MatrixXcd& Q, double lambda,
                             const Eigen::MatrixXcd& theta) {
    return 0.5 * (Y - theta * Q).squaredNorm() + lambda * column_norms(theta).sum();
}

KktViolation group_lasso_kkt(const Eigen::MatrixXcd& Y, const Eigen::MatrixXcd& Q, double lambda,
                             const Eigen::MatrixXcd& theta) {
    const Eigen::MatrixXcd G = (theta * Q - Y) * Q.adjoint();
    KktViolation v;
    for (Eigen::Index n = 0; n < theta.cols(); ++n) {
        const double nt = theta.col(n).norm();
        if (nt > 0) v.on_support = std::max(v.on_support, (G.col(n) + lambda * theta.col(n) / nt).norm());
        else v.off_support = std::max(v.off_support, G.col(n).norm());
    }
    return v;
}

GroupLassoEstimate group_lasso_solve(const Eigen::MatrixXcd& Y, const Eigen::MatrixXcd& Q, double lambda,
                                     const GroupLassoOptions& opts) {
    check_shapes(Y, Q);
    if (!(lambda >= 0) || !std::isfinite(lambda)) throw std::invalid_argument("group_lasso_solve: lambda must be >= 0");
    const Eigen::Index M = Y.rows();
    const Eigen::Index N = Q.rows();
    GroupLassoEstimate est;
    est.lambda = lambda;
    Eigen::MatrixXcd theta = Eigen::MatrixXcd::Zero(M, N);
    if (opts.warm_start.size() != 0) {
        if (opts.warm_start.rows() != M || opts.warm_start.cols() != N || !opts.warm_start.allFinite())
            throw std::invalid_argument("group_lasso_solve: warm start must be a finite M x N matrix");
        theta = opts.warm_start;
    }
    auto F = [&](const Eigen::MatrixXcd& T) { return group_lasso_objective(Y, Q, lambda, T); };
    est.objective_trace.push_back(F(theta));

    if (lambda == 0.0) {
        // Minimum-norm least squares: Q^H Theta^H = Y^H.
        const Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXcd> cod(Q.adjoint());
        theta = cod.solve(Y.adjoint()).adjoint();
        est.objective_trace.push_back(std::min(F(theta), est.objective_trace.back()));
        est.theta = theta;
        est.converged = true;
        est.support = detect_support(theta, SupportRule::relative(opts.support_threshold));
        return est;
    }

    // lambda >= lambda_max: zero satisfies the optimality conditions exactly.
    if (N == 0 || lambda >= lambda_max(Y, Q)) {
        est.theta = Eigen::MatrixXcd::Zero(M, N);
        est.objective_trace.push_back(std::min(F(est.theta), est.objective_trace.back()));
        est.converged = true;
        return est;
    }

    const double lip = N && Q.cols() ? Eigen::JacobiSVD<Eigen::MatrixXcd>(Q).singularValues()(0) : 0.0;
    if (lip == 0.0) {
        // Q = 0: the data term is constant, so the penalty alone decides.
        est.theta = Eigen::MatrixXcd::Zero(M, N);
        est.objective_trace.push_back(F(est.theta));
        est.converged = true;
        return est;
    }
    const double step = 1.0 / (lip * lip);
    const Eigen::MatrixXcd YQh = Y * Q.adjoint();
    const Eigen::MatrixXcd QQh = Q * Q.adjoint();
    auto prox_grad = [&](const Eigen::MatrixXcd& Z) {
        Eigen::MatrixXcd V = Z - step * (Z * QQh - YQh);
        block_shrink(V, step * lambda);
        return V;
    };

    Eigen::MatrixXcd Z = theta;
    double t = 1.0;
    double f = est.objective_trace.back();
    for (int it = 1; it <= opts.max_iterations; ++it) {
        Eigen::MatrixXcd X = prox_grad(Z);
        double fx = F(X);
        if (fx > f) {
            // Momentum overshot: restart with a plain proximal step from the last accepted iterate.
            t = 1.0;
            X = prox_grad(theta);
            fx = F(X);
            if (fx > f) {
                X = theta;
                fx = f;
            }
            Z = X;
        } else {
            const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
            Z = X + ((t - 1.0) / tn) * (X - theta);
            t = tn;
        }
        const double change = std::abs(f - fx) / std::max(1.0, std::abs(f));
        theta = std::move(X);
        f = fx;
        est.objective_trace.push_back(f);
        est.iterations = it;
        if (change < opts.objective_tolerance) {
            const auto kkt = group_lasso_kkt(Y, Q, lambda, theta);
            if (kkt.on_support <= opts.kkt_tolerance * lambda && kkt.off_support <= lambda * (1.0 + opts.kkt_tolerance)) {
                est.converged = true;
                break;
            }
        }
    }
    est.theta = std::move(theta);
    est.support = detect_support(est.theta, SupportRule::relative(opts.support_threshold));
    return est;
}

GroupLassoEstimate basis_pursuit_group(const Eigen::MatrixXcd& Y, const Eigen::MatrixXcd& Q,
                                       const BasisPursuitOptions& opts) {
    check_shapes(Y, Q);
    const Eigen::Index M = Y.rows();
    const Eigen::Index N = Q.rows();
    const Eigen::Index L = Q.cols();
    GroupLassoEstimate est;
    est.theta = Eigen::MatrixXcd::Zero(M, N);
    if (Y.squaredNorm() == 0.0 || N == 0) {
        est.converged = true;
        est.objective_trace = {0.0};
        return est;
    }

    // Variables: t_n (real), theta(m, n) at complex index m + M n.
    conic::ComplexSocProgram prog;
    prog.num_real = N;
    prog.num_complex = M * N;
    prog.objective = conic::ComplexAffineMap::zero(1, N, M * N);
    prog.objective.real_coef.setOnes();
    auto eq = conic::ComplexAffineMap::zero(M * L, N, M * N);
    for (Eigen::Index l = 0; l < L; ++l)
        for (Eigen::Index m = 0; m < M; ++m) {
            const Eigen::Index row = m + M * l;
            for (Eigen::Index n = 0; n < N; ++n) eq.complex_coef(row, m + M * n) = Q(n, l);
            eq.offset(row) = -Y(m, l);
        }
    prog.equalities.push_back(std::move(eq));
    for (Eigen::Index n = 0; n < N; ++n) {
        conic::ComplexSocConstraint c{conic::ComplexAffineMap::zero(1, N, M * N),
                                      conic::ComplexAffineMap::zero(M, N, M * N)};
        c.head.real_coef(0, n) = 1.0;
        for (Eigen::Index m = 0; m < M; ++m) c.tail.complex_coef(m, m + M * n) = 1.0;
        prog.socs.push_back(std::move(c));
    }
    const auto sol = conic::admm_solve(conic::embed_complex(prog), opts.admm);
    est.iterations = sol.iterations;
    if (sol.status != conic::SolveStatus::Optimal)
        throw conic::SolverFailure(std::string("basis_pursuit_group: ") + conic::to_string(sol.status));
    const auto point = conic::recover_complex(prog, sol.x);
    for (Eigen::Index n = 0; n < N; ++n)
        for (Eigen::Index m = 0; m < M; ++m) est.theta(m, n) = point.complex[m + M * n];
    double objective = column_norms(est.theta).sum();

    if (opts.polish) {
        const auto S = detect_support(est.theta, SupportRule::relative(opts.support_threshold));
        if (!S.empty() && static_cast<Eigen::Index>(S.size()) <= L) {
            Eigen::MatrixXcd QS(S.size(), L);
            for (std::size_t i = 0; i < S.size(); ++i) QS.row(i) = Q.row(S[i]);
            const Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXcd> cod(QS.adjoint());
            const Eigen::MatrixXcd TS = cod.solve(Y.adjoint()).adjoint();
            Eigen::MatrixXcd polished = Eigen::MatrixXcd::Zero(M, N);
            for (std::size_t i = 0; i < S.size(); ++i) polished.col(S[i]) = TS.col(i);
            const double residual = (polished * Q - Y).norm();
            const double pobj = column_norms(polished).sum();
            if (residual <= 1e-10 * Y.norm() && pobj <= objective * (1.0 + 1e-6)) {
                est.theta = std::move(polished);
                objective = pobj;
            }
        }
    }
    est.objective_trace = {objective};
    est.converged = true;
    est.support = detect_support(est.theta, SupportRule::relative(opts.support_threshold));
    return est;
}

double nmse(const Eigen::MatrixXcd& estimate, const Eigen::MatrixXcd& truth) {
    if (estimate.rows() != truth.rows() || estimate.cols() != truth.cols())
        throw std::invalid_argument("nmse: shape mismatch");
    const double denom = truth.squaredNorm();
    if (denom == 0.0) throw std::invalid_argument("nmse: ground truth is zero");
    return (estimate - truth).squaredNorm() / denom;
}

std::vector<int> detect_support(const Eigen::MatrixXcd& theta, const SupportRule& rule) {
    if (theta.size() == 0) throw std::invalid_argument("detect_support: empty estimate");
    const Eigen::VectorXd norms = column_norms(theta);
    std::vector<int> out;
    if (rule.kind == SupportRule::Kind::Relative) {
        const double cut = rule.tau * norms.maxCoeff();
        for (Eigen::Index n = 0; n < norms.size(); ++n)
            if (norms[n] > cut) out.push_back(static_cast<int>(n));
        return out;
    }
    if (rule.k < 0 || rule.k > norms.size()) throw std::invalid_argument("detect_support: top-K out of range");
    std::vector<int> idx(norms.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return norms[a] > norms[b]; });
    out.assign(idx.begin(), idx.begin() + rule.k);
    std::sort(out.begin(), out.end());
    return out;
}

bool recovery_success(const Eigen::MatrixXcd& estimate, const DetectionInstance& inst, double rel_tol) {
    if (inst.K == 0) return estimate.norm() <= rel_tol;
    if (detect_support(estimate, SupportRule::top_k(inst.K)) != inst.support) return false;
    return (estimate - inst.theta).norm() <= rel_tol * inst.theta.norm();
}

}  // namespace udnopt::detect
