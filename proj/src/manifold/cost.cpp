#include "udnopt/manifold/cost.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>

namespace udnopt::manifold {

AmbientMatrix SmoothCost::hessian(const FixedRankPoint&, const TangentVector&) const {
    throw std::logic_error("SmoothCost: this cost has no Euclidean Hessian");
}

double DistanceCost::value(const FixedRankPoint& X) const { return 0.5 * (X.dense() - A_).squaredNorm(); }

AmbientMatrix DistanceCost::gradient(const FixedRankPoint& X) const { return Eigen::MatrixXd(X.dense() - A_); }

AmbientMatrix DistanceCost::hessian(const FixedRankPoint& X, const TangentVector& xi) const {
    return AmbientMatrix::of(X, xi);
}

double LinearCost::value(const FixedRankPoint& X) const { return (C_.array() * X.dense().array()).sum(); }

AmbientMatrix LinearCost::gradient(const FixedRankPoint&) const { return C_; }

AmbientMatrix LinearCost::hessian(const FixedRankPoint& X, const TangentVector&) const {
    return LowRankMatrix{Eigen::MatrixXd::Zero(X.rows(), 1), Eigen::MatrixXd::Zero(X.cols(), 1)};
}

MaskedLeastSquares::MaskedLeastSquares(Eigen::Index rows, Eigen::Index cols, std::vector<MaskEntry> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
    if (rows < 1 || cols < 1) throw std::invalid_argument("masked cost: empty matrix shape");
    std::set<std::pair<Eigen::Index, Eigen::Index>> seen;
    for (const auto& e : entries_) {
        if (e.row < 0 || e.row >= rows || e.col < 0 || e.col >= cols)
            throw std::invalid_argument("masked cost: entry out of range");
        if (!std::isfinite(e.target) || !std::isfinite(e.weight) || e.weight < 0)
            throw std::invalid_argument("masked cost: bad target or weight");
        if (!seen.emplace(e.row, e.col).second) throw std::invalid_argument("masked cost: duplicate entry");
    }
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(entries_.size());
    for (const auto& e : entries_) trips.emplace_back(e.row, e.col, 0.0);
    pattern_.resize(rows_, cols_);
    pattern_.setFromTriplets(trips.begin(), trips.end());
    pattern_.makeCompressed();
    slot_.reserve(entries_.size());
    for (const auto& e : entries_) {
        const auto* begin = pattern_.innerIndexPtr() + pattern_.outerIndexPtr()[e.col];
        const auto* end = pattern_.innerIndexPtr() + pattern_.outerIndexPtr()[e.col + 1];
        slot_.push_back(std::lower_bound(begin, end, static_cast<int>(e.row)) - pattern_.innerIndexPtr());
    }
}

double MaskedLeastSquares::value(const FixedRankPoint& X) const {
    const Eigen::MatrixXd US = X.U() * X.S();
    double f = 0.0;
    for (const auto& e : entries_) {
        const double d = US.row(e.row).dot(X.V().row(e.col)) - e.target;
        f += e.weight * d * d;
    }
    return f;
}

double MaskedLeastSquares::value_factored(const Eigen::MatrixXd& L, const Eigen::MatrixXd& R) const {
    double f = 0.0;
    for (const auto& e : entries_) {
        const double d = L.row(e.row).dot(R.row(e.col)) - e.target;
        f += e.weight * d * d;
    }
    return f;
}

Eigen::SparseMatrix<double> MaskedLeastSquares::scatter(const std::vector<double>& values) const {
    Eigen::SparseMatrix<double> G = pattern_;
    for (std::size_t k = 0; k < values.size(); ++k) G.valuePtr()[slot_[k]] = values[k];
    return G;
}

AmbientMatrix MaskedLeastSquares::gradient(const FixedRankPoint& X) const {
    const Eigen::MatrixXd US = X.U() * X.S();
    std::vector<double> g(entries_.size());
    for (std::size_t k = 0; k < entries_.size(); ++k) {
        const auto& e = entries_[k];
        g[k] = 2.0 * e.weight * (US.row(e.row).dot(X.V().row(e.col)) - e.target);
    }
    return scatter(g);
}

AmbientMatrix MaskedLeastSquares::hessian(const FixedRankPoint& X, const TangentVector& xi) const {
    // xi_ij = (U M + Up)_i . V_j + U_i . Vp_j
    const Eigen::MatrixXd left = X.U() * xi.M + xi.Up;
    std::vector<double> h(entries_.size());
    for (std::size_t k = 0; k < entries_.size(); ++k) {
        const auto& e = entries_[k];
        const double x = left.row(e.row).dot(X.V().row(e.col)) + X.U().row(e.row).dot(xi.Vp.row(e.col));
        h[k] = 2.0 * e.weight * x;
    }
    return scatter(h);
}

Eigen::MatrixXd MaskedLeastSquares::target_matrix() const {
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(rows_, cols_);
    for (const auto& e : entries_) T(e.row, e.col) = e.target;
    return T;
}

TangentVector riemannian_gradient(const SmoothCost& cost, const FixedRankPoint& X) {
    return project_tangent(X, cost.gradient(X));
}

TangentVector riemannian_hessian(const SmoothCost& cost, const FixedRankPoint& X, const AmbientMatrix& egrad,
                                 const TangentVector& xi) {
    if (cost.has_hessian()) {
        TangentVector h = project_tangent(X, cost.hessian(X, xi));
        // Curvature of the embedded manifold: normal part of the gradient paired with xi.
        const Eigen::MatrixXd Sinv = X.S().inverse();
        const Eigen::MatrixXd GVp = egrad.times(xi.Vp) * Sinv.transpose();
        const Eigen::MatrixXd GtUp = egrad.transpose_times(xi.Up) * Sinv;
        h.Up += GVp - X.U() * (X.U().transpose() * GVp);
        h.Vp += GtUp - X.V() * (X.V().transpose() * GtUp);
        return h;
    }
    const double nx = norm(xi);
    if (nx == 0.0) return TangentVector::zero(X);
    const double t = std::ldexp(1.0, -14) / nx;
    const FixedRankPoint Y = retract(X, xi, t);
    TangentVector diff = transport(Y, X, riemannian_gradient(cost, Y)) - project_tangent(X, egrad);
    return (1.0 / t) * diff;
}

}  // namespace udnopt::manifold
