#include "udnopt/conic/admm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace udnopt::conic {

std::string to_string(SolveStatus status) {
    switch (status) {
        case SolveStatus::Optimal: return "optimal";
        case SolveStatus::PrimalInfeasible: return "primal_infeasible";
        case SolveStatus::DualInfeasible: return "dual_infeasible";
        case SolveStatus::MaxIterations: return "max_iterations";
    }
    return "unknown";
}

namespace {

double inf_norm(const Eigen::VectorXd& v) { return v.size() == 0 ? 0.0 : v.lpNorm<Eigen::Infinity>(); }

/// Row scaling must be uniform within a second-order block to keep the cone invariant.
void ruiz_equilibrate(SparseMatrix& A, const std::vector<Cone>& cones, Eigen::VectorXd& row_scale,
                      Eigen::VectorXd& col_scale) {
    const Eigen::Index m = A.rows();
    const Eigen::Index n = A.cols();
    row_scale = Eigen::VectorXd::Ones(m);
    col_scale = Eigen::VectorXd::Ones(n);
    for (int pass = 0; pass < 10; ++pass) {
        Eigen::VectorXd row_max = Eigen::VectorXd::Zero(m);
        Eigen::VectorXd col_max = Eigen::VectorXd::Zero(n);
        for (Eigen::Index j = 0; j < A.outerSize(); ++j) {
            for (SparseMatrix::InnerIterator it(A, j); it; ++it) {
                const double a = std::abs(it.value());
                row_max[it.row()] = std::max(row_max[it.row()], a);
                col_max[j] = std::max(col_max[j], a);
            }
        }
        Eigen::Index offset = 0;
        for (const auto& cone : cones) {
            const auto d = static_cast<Eigen::Index>(cone.dim());
            if (cone.kind() == ConeKind::SecondOrder) {
                const double mx = row_max.segment(offset, d).maxCoeff();
                row_max.segment(offset, d).setConstant(mx);
            }
            offset += d;
        }
        Eigen::VectorXd dr(m), dc(n);
        for (Eigen::Index i = 0; i < m; ++i) dr[i] = row_max[i] > 0 ? 1.0 / std::sqrt(row_max[i]) : 1.0;
        for (Eigen::Index j = 0; j < n; ++j) dc[j] = col_max[j] > 0 ? 1.0 / std::sqrt(col_max[j]) : 1.0;
        A = dr.asDiagonal() * A * dc.asDiagonal();
        row_scale.array() *= dr.array();
        col_scale.array() *= dc.array();
    }
}

SparseMatrix ones_like(const SparseMatrix& A) {
    SparseMatrix P = A;
    std::fill(P.valuePtr(), P.valuePtr() + P.nonZeros(), 1.0);
    return P;
}

}  // namespace

AdmmSolver::AdmmSolver(const StandardConicProgram& prog, AdmmOptions opts)
    : opts_(opts), prog_(prog) {
    if (opts_.max_iterations < 0 || opts_.eps_abs < 0 || opts_.eps_rel < 0 || opts_.eps_infeasible <= 0 ||
        opts_.relaxation <= 0 || opts_.relaxation >= 2 || opts_.check_interval < 1) {
        throw std::invalid_argument("admm: invalid solver options");
    }
    // Symbolic pattern of I + A'A from an all-ones copy of A, so explicit zeros count.
    const SparseMatrix P = ones_like(prog_.A());
    SparseMatrix I(P.cols(), P.cols());
    I.setIdentity();
    kkt_pattern_ = SparseMatrix(P.transpose()) * P + I;
    kkt_pattern_.makeCompressed();
    std::fill(kkt_pattern_.valuePtr(), kkt_pattern_.valuePtr() + kkt_pattern_.nonZeros(), 0.0);
    ldlt_.analyzePattern(kkt_pattern_);
    equilibrate_and_factor();
}

void AdmmSolver::update(const StandardConicProgram& prog) {
    if (!same_pattern(prog.A(), prog_.A()) || prog.cones() != prog_.cones())
        throw std::invalid_argument("admm: update requires an identical sparsity pattern and cone list");
    prog_ = prog;
    equilibrate_and_factor();
}

void AdmmSolver::equilibrate_and_factor() {
    A_ = prog_.A();
    if (opts_.equilibrate) {
        ruiz_equilibrate(A_, prog_.cones(), row_scale_, col_scale_);
    } else {
        row_scale_ = Eigen::VectorXd::Ones(A_.rows());
        col_scale_ = Eigen::VectorXd::Ones(A_.cols());
    }
    b_ = row_scale_.cwiseProduct(prog_.b());
    c_ = col_scale_.cwiseProduct(prog_.c());
    A_.makeCompressed();
    At_ = A_.transpose();

    SparseMatrix I(A_.cols(), A_.cols());
    I.setIdentity();
    SparseMatrix K = kkt_pattern_ + SparseMatrix(At_ * A_) + I;
    K.makeCompressed();
    if (!same_pattern(K, kkt_pattern_)) throw SolverFailure("admm: KKT pattern drifted after stuffing");
    ldlt_.factorize(K);
    if (ldlt_.info() != Eigen::Success) throw SolverFailure("admm: factorization of I + A'A failed");

    // g = (I + Q0)^{-1} h with h = (c, b).
    const Eigen::VectorXd rhs = c_ - At_ * b_;
    g_x_ = ldlt_.solve(rhs);
    g_y_ = b_ + A_ * g_x_;
    h_dot_g_ = c_.dot(g_x_) + b_.dot(g_y_);
}

ConicSolution AdmmSolver::solve(const std::optional<WarmStart>& warm) const {
    const Eigen::Index n = A_.cols();
    const Eigen::Index m = A_.rows();
    const auto& cones = prog_.cones();
    const double alpha = opts_.relaxation;

    Eigen::VectorXd ux = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd uy = Eigen::VectorXd::Zero(m);
    Eigen::VectorXd vs = Eigen::VectorXd::Zero(m);
    double ut = 1.0;
    double vk = 1.0;
    if (warm) {
        if (warm->x.size() == n) ux = warm->x.cwiseQuotient(col_scale_);
        if (warm->y.size() == m) uy = project_dual_cone_product(warm->y.cwiseQuotient(row_scale_), cones);
        if (warm->s.size() == m) vs = project_cone_product(warm->s.cwiseProduct(row_scale_), cones);
        vk = 0.0;
    }

    const Eigen::VectorXd& b = prog_.b();
    const Eigen::VectorXd& c = prog_.c();
    const SparseMatrix& A = prog_.A();
    const double b_norm = inf_norm(b);
    const double c_norm = inf_norm(c);

    ConicSolution sol;
    Eigen::VectorXd zx(n), zy(m), ry(m), wy(m);
    for (int k = 1; k <= opts_.max_iterations; ++k) {
        // Linear step: solve (I + Q) z = u + v.
        wy = uy + vs;
        const double wt = ut + vk;
        zx = ldlt_.solve(ux - At_ * wy);
        zy = wy + A_ * zx;
        const double zt = (wt + c_.dot(zx) + b_.dot(zy)) / (1.0 + h_dot_g_);
        zx -= zt * g_x_;
        zy -= zt * g_y_;

        // Relaxed projection onto R^n x K* x R+, then the dual update.
        ux = alpha * zx + (1.0 - alpha) * ux;
        ry = alpha * zy + (1.0 - alpha) * uy;
        const double rt = alpha * zt + (1.0 - alpha) * ut;
        uy = project_dual_cone_product(ry - vs, cones);
        const double ut_new = std::max(0.0, rt - vk);
        vs += uy - ry;
        vk += ut_new - rt;
        ut = ut_new;

        if (!std::isfinite(ut) || !std::isfinite(vk)) throw SolverFailure("admm: non-finite iterate");
        sol.iterations = k;
        if (k % opts_.check_interval != 0 && k != opts_.max_iterations) continue;

        const Eigen::VectorXd x_raw = col_scale_.cwiseProduct(ux);
        const Eigen::VectorXd y_raw = row_scale_.cwiseProduct(uy);
        const Eigen::VectorXd s_raw = vs.cwiseQuotient(row_scale_);
        if (!x_raw.allFinite() || !y_raw.allFinite() || !s_raw.allFinite())
            throw SolverFailure("admm: non-finite iterate");

        if (ut > 0.0) {
            sol.x = x_raw / ut;
            sol.y = y_raw / ut;
            sol.s = s_raw / ut;
            const Eigen::VectorXd Ax = A * sol.x;
            const Eigen::VectorXd Aty = A.transpose() * sol.y;
            const double cx = c.dot(sol.x);
            const double by = b.dot(sol.y);
            sol.primal_residual = inf_norm(Ax + sol.s - b);
            sol.dual_residual = inf_norm(Aty + c);
            sol.duality_gap = std::abs(cx + by);
            sol.objective = cx;
            const bool p_ok = sol.primal_residual <=
                              opts_.eps_abs + opts_.eps_rel * std::max({inf_norm(Ax), inf_norm(sol.s), b_norm});
            const bool d_ok = sol.dual_residual <= opts_.eps_abs + opts_.eps_rel * std::max(inf_norm(Aty), c_norm);
            const bool g_ok = sol.duality_gap <= opts_.eps_abs + opts_.eps_rel * std::max(std::abs(cx), std::abs(by));
            if (p_ok && d_ok && g_ok) {
                sol.status = SolveStatus::Optimal;
                return sol;
            }
        }

        const double by_raw = b.dot(y_raw);
        if (by_raw < 0.0) {
            const Eigen::VectorXd cert = y_raw / (-by_raw);
            if (inf_norm(A.transpose() * cert) <= opts_.eps_infeasible) {
                sol.status = SolveStatus::PrimalInfeasible;
                sol.y = cert;
                sol.x = Eigen::VectorXd::Zero(n);
                sol.s = Eigen::VectorXd::Zero(m);
                sol.objective = std::numeric_limits<double>::infinity();
                return sol;
            }
        }
        const double cx_raw = c.dot(x_raw);
        if (cx_raw < 0.0) {
            const Eigen::VectorXd cert = x_raw / (-cx_raw);
            const Eigen::VectorXd scert = s_raw / (-cx_raw);
            if (inf_norm(A * cert + scert) <= opts_.eps_infeasible) {
                sol.status = SolveStatus::DualInfeasible;
                sol.x = cert;
                sol.s = scert;
                sol.y = Eigen::VectorXd::Zero(m);
                sol.objective = -std::numeric_limits<double>::infinity();
                return sol;
            }
        }
    }
    sol.status = SolveStatus::MaxIterations;
    if (sol.x.size() != n) {
        sol.x = Eigen::VectorXd::Zero(n);
        sol.y = Eigen::VectorXd::Zero(m);
        sol.s = Eigen::VectorXd::Zero(m);
    }
    return sol;
}

ConicSolution admm_solve(const StandardConicProgram& prog, const AdmmOptions& opts) {
    return AdmmSolver(prog, opts).solve();
}

}  // namespace udnopt::conic
