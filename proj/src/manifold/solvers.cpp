#include "udnopt/manifold/solvers.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <random>

namespace udnopt::manifold {

const char* to_string(Termination t) {
    switch (t) {
        case Termination::GradientTolerance: return "gradient_tolerance";
        case Termination::CostTolerance: return "cost_tolerance";
        case Termination::MaxIterations: return "max_iterations";
        case Termination::RankCollapse: return "rank_collapse";
        case Termination::LineSearchFailure: return "line_search_failure";
        case Termination::Stalled: return "stalled";
    }
    return "unknown";
}

std::optional<int> SolveTrace::iterations_to(double target) const {
    for (const auto& r : records)
        if (r.objective <= target) return r.iter;
    return std::nullopt;
}

namespace {

class Clock {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void validate(const SmoothCost& cost, const FixedRankPoint& X0, const SolverOptions& opts) {
    if (cost.rows() != X0.rows() || cost.cols() != X0.cols())
        throw std::invalid_argument("solver: initial point does not match the cost shape");
    if (opts.max_iterations < 0 || !(opts.gradient_tolerance >= 0))
        throw std::invalid_argument("solver: bad iteration cap or tolerance");
    if (opts.stall_window < 0 || !(opts.stall_ratio > 0 && opts.stall_ratio <= 1))
        throw std::invalid_argument("solver: bad stall window or ratio");
}

/// Shared stopping test; returns true (and sets the reason) when the solver should stop.
bool converged(SolveTrace& trace, double f, double gnorm, const SolverOptions& opts) {
    if (gnorm <= opts.gradient_tolerance) {
        trace.reason = Termination::GradientTolerance;
        return true;
    }
    if (f <= opts.cost_tolerance) {
        trace.reason = Termination::CostTolerance;
        return true;
    }
    const auto w = static_cast<std::size_t>(opts.stall_window);
    if (w > 0 && trace.records.size() > w && f >= opts.stall_ratio * trace.records[trace.records.size() - 1 - w].objective) {
        trace.reason = Termination::Stalled;
        return true;
    }
    return false;
}

/// Boundary step: tau >= 0 with ||eta + tau delta|| = radius.
double to_boundary(const TangentVector& eta, const TangentVector& delta, double radius) {
    const double ed = inner(eta, delta);
    const double dd = inner(delta, delta);
    const double ee = inner(eta, eta);
    return (-ed + std::sqrt(ed * ed + dd * (radius * radius - ee))) / dd;
}

}  // namespace

SolveTrace rcg_solve(const SmoothCost& cost, const FixedRankPoint& X0, const SolverOptions& opts) {
    validate(cost, X0, opts);
    Clock clock;
    SolveTrace trace;
    FixedRankPoint X = X0;
    double f = cost.value(X);
    TangentVector g = riemannian_gradient(cost, X);
    double gnorm = norm(g);
    trace.records.push_back({0, f, gnorm, 0.0, clock.seconds()});
    TangentVector d = -1.0 * g;
    double alpha_prev = opts.initial_step;
    bool first = true;

    for (int it = 1; !converged(trace, f, gnorm, opts); ++it) {
        if (it > opts.max_iterations) {
            trace.reason = Termination::MaxIterations;
            break;
        }
        double slope = inner(g, d);
        if (!(slope < 0)) {
            d = -1.0 * g;
            slope = -gnorm * gnorm;
        }
        double alpha = first ? opts.initial_step : 2.0 * alpha_prev;
        first = false;
        std::optional<FixedRankPoint> Xn;
        double fn = 0.0;
        try {
            for (int b = 0; b <= opts.max_backtracks; ++b, alpha *= opts.backtrack) {
                FixedRankPoint cand = retract(X, d, alpha);
                const double fc = cost.value(cand);
                if (fc <= f + opts.armijo_c1 * alpha * slope) {
                    Xn = std::move(cand);
                    fn = fc;
                    break;
                }
            }
        } catch (const RankCollapse& e) {
            trace.reason = Termination::RankCollapse;
            trace.message = e.what();
            break;
        }
        if (!Xn) {
            trace.reason = Termination::LineSearchFailure;
            break;
        }
        TangentVector gn = riemannian_gradient(cost, *Xn);
        const TangentVector g_moved = transport(X, *Xn, g);
        const TangentVector d_moved = transport(X, *Xn, d);
        const double beta = std::max(0.0, inner(gn, gn - g_moved) / (gnorm * gnorm));
        d = -1.0 * gn + beta * d_moved;
        X = std::move(*Xn);
        f = fn;
        g = std::move(gn);
        gnorm = norm(g);
        alpha_prev = alpha;
        trace.records.push_back({it, f, gnorm, alpha, clock.seconds()});
    }
    trace.final_point = X;
    return trace;
}

SolveTrace rtr_solve(const SmoothCost& cost, const FixedRankPoint& X0, const SolverOptions& opts) {
    validate(cost, X0, opts);
    Clock clock;
    SolveTrace trace;
    const Eigen::Index p = X0.rows(), q = X0.cols(), r = X0.rank();
    const int dim = static_cast<int>(r * (p + q - r));
    const int max_inner = opts.max_inner_iterations > 0 ? opts.max_inner_iterations : dim;

    FixedRankPoint X = X0;
    double f = cost.value(X);
    AmbientMatrix egrad = cost.gradient(X);
    TangentVector g = project_tangent(X, egrad);
    double gnorm = norm(g);
    double radius = opts.initial_radius;
    trace.records.push_back({0, f, gnorm, radius, clock.seconds()});

    for (int it = 1; !converged(trace, f, gnorm, opts); ++it) {
        if (it > opts.max_iterations) {
            trace.reason = Termination::MaxIterations;
            break;
        }
        // Steihaug-Toint truncated CG on the quadratic model.
        auto H = [&](const TangentVector& v) { return riemannian_hessian(cost, X, egrad, v); };
        TangentVector eta = TangentVector::zero(X);
        TangentVector Heta = TangentVector::zero(X);
        TangentVector res = g;
        double rr = gnorm * gnorm;
        const double r0 = gnorm;
        TangentVector delta = -1.0 * res;
        bool on_boundary = false;
        for (int j = 0; j < max_inner; ++j) {
            const TangentVector Hd = H(delta);
            const double kappa = inner(delta, Hd);
            const double a = rr / kappa;
            const TangentVector trial = eta + a * delta;
            if (!(kappa > 0) || norm(trial) >= radius) {
                const double tau = to_boundary(eta, delta, radius);
                eta += tau * delta;
                Heta += tau * Hd;
                on_boundary = true;
                break;
            }
            eta = trial;
            Heta += a * Hd;
            res += a * Hd;
            const double rr_new = inner(res, res);
            if (std::sqrt(rr_new) <= r0 * std::min(std::pow(r0, opts.tcg_theta), opts.tcg_kappa)) break;
            delta = -1.0 * res + (rr_new / rr) * delta;
            rr = rr_new;
        }

        std::optional<FixedRankPoint> Xn;
        double fn = std::numeric_limits<double>::infinity();
        try {
            Xn = retract(X, eta, 1.0);
            fn = cost.value(*Xn);
        } catch (const RankCollapse&) {
            Xn.reset();  // treated as a rejected step
        }
        const double model_decrease = -inner(g, eta) - 0.5 * inner(eta, Heta);
        const double reg = 1e3 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(f));
        const double rho = Xn ? (f - fn + reg) / (model_decrease + reg) : -1.0;
        if (!(rho >= 0.25)) radius *= 0.25;
        else if (rho > 0.75 && on_boundary) radius = std::min(2.0 * radius, opts.max_radius);
        if (Xn && rho > opts.accept_ratio && fn <= f) {
            X = std::move(*Xn);
            f = fn;
            egrad = cost.gradient(X);
            g = project_tangent(X, egrad);
            gnorm = norm(g);
        }
        trace.records.push_back({it, f, gnorm, radius, clock.seconds()});
        if (radius < 1e-14 * std::max(1.0, opts.initial_radius)) {
            trace.reason = Termination::LineSearchFailure;
            trace.message = "trust region collapsed";
            break;
        }
    }
    trace.final_point = X;
    return trace;
}

namespace {

/// Solves each row of `out` from the masked least-squares normal equations with `other` fixed.
/// by_row selects whether mask rows (true) or mask columns (false) index `out`.
void als_update(const MaskedLeastSquares& cost, bool by_row, const Eigen::MatrixXd& other, Eigen::MatrixXd& out,
                double tikhonov) {
    const Eigen::Index r = other.cols();
    std::vector<Eigen::MatrixXd> A(out.rows(), Eigen::MatrixXd::Zero(r, r));
    std::vector<Eigen::VectorXd> b(out.rows(), Eigen::VectorXd::Zero(r));
    for (const auto& e : cost.entries()) {
        const Eigen::Index i = by_row ? e.row : e.col;
        const Eigen::Index j = by_row ? e.col : e.row;
        const auto y = other.row(j).transpose();
        A[i].noalias() += e.weight * y * y.transpose();
        b[i] += e.weight * e.target * y;
    }
    for (Eigen::Index i = 0; i < out.rows(); ++i) {
        const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(A[i], Eigen::EigenvaluesOnly);
        const double top = std::max(eig.eigenvalues().maxCoeff(), 0.0);
        if (eig.eigenvalues().minCoeff() > 1e-12 * top && top > 0) {
            out.row(i) = A[i].llt().solve(b[i]).transpose();
        } else {
            const Eigen::MatrixXd reg = A[i] + tikhonov * std::max(1.0, top) * Eigen::MatrixXd::Identity(r, r);
            out.row(i) = reg.llt().solve(b[i]).transpose();
        }
    }
}

FixedRankPoint point_of_factors(const Eigen::MatrixXd& L, const Eigen::MatrixXd& R) {
    Eigen::HouseholderQR<Eigen::MatrixXd> ql(L), qr(R);
    const Eigen::Index r = L.cols();
    const Eigen::MatrixXd Ql = ql.householderQ() * Eigen::MatrixXd::Identity(L.rows(), r);
    const Eigen::MatrixXd Qr = qr.householderQ() * Eigen::MatrixXd::Identity(R.rows(), r);
    const Eigen::MatrixXd Rl = ql.matrixQR().topRows(r).triangularView<Eigen::Upper>();
    const Eigen::MatrixXd Rr = qr.matrixQR().topRows(r).triangularView<Eigen::Upper>();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(Rl * Rr.transpose(), Eigen::ComputeFullU | Eigen::ComputeFullV);
    return {Ql * svd.matrixU(), svd.singularValues().asDiagonal().toDenseMatrix(), Qr * svd.matrixV()};
}

}  // namespace

SolveTrace altmin_solve(const MaskedLeastSquares& cost, const FixedRankPoint& X0, const SolverOptions& opts) {
    validate(cost, X0, opts);
    Clock clock;
    SolveTrace trace;
    Eigen::MatrixXd L = X0.U() * X0.S();
    Eigen::MatrixXd R = X0.V();
    FixedRankPoint X = X0;
    double f = cost.value(X);
    double gnorm = norm(riemannian_gradient(cost, X));
    trace.records.push_back({0, f, gnorm, 0.0, clock.seconds()});
    for (int it = 1; !converged(trace, f, gnorm, opts); ++it) {
        if (it > opts.max_iterations) {
            trace.reason = Termination::MaxIterations;
            break;
        }
        als_update(cost, true, R, L, opts.tikhonov);
        als_update(cost, false, L, R, opts.tikhonov);
        f = cost.value_factored(L, R);
        try {
            X = point_of_factors(L, R);
        } catch (const RankCollapse& e) {
            trace.records.push_back({it, f, std::numeric_limits<double>::quiet_NaN(), 0.0, clock.seconds()});
            trace.reason = Termination::RankCollapse;
            trace.message = e.what();
            break;
        }
        gnorm = norm(riemannian_gradient(cost, X));
        trace.records.push_back({it, f, gnorm, 0.0, clock.seconds()});
    }
    trace.final_point = X;
    return trace;
}

FixedRankPoint initial_point(const MaskedLeastSquares& cost, Eigen::Index r, std::uint64_t seed, double sigma) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, sigma);
    Eigen::MatrixXd T = FixedRankPoint::from_dense(cost.target_matrix(), r).dense();
    for (Eigen::Index j = 0; j < T.cols(); ++j)
        for (Eigen::Index i = 0; i < T.rows(); ++i) T(i, j) += g(rng);
    return FixedRankPoint::from_dense(T, r);
}

void write_trace_csv(std::ostream& out, const SolveTrace& trace, bool include_timing) {
    const auto flags = out.flags();
    const auto prec = out.precision();
    out << std::setprecision(17);
    out << "iter,objective,grad_norm,step,elapsed_seconds\n";
    for (const auto& r : trace.records) {
        out << r.iter << ',' << r.objective << ',' << r.grad_norm << ',' << r.step << ',';
        if (include_timing) out << r.elapsed_seconds;
        out << '\n';
    }
    out.flags(flags);
    out.precision(prec);
}

}  // namespace udnopt::manifold
