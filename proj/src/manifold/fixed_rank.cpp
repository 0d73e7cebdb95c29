#include "udnopt/manifold/fixed_rank.hpp"

#include <Eigen/SVD>

#include <string>

namespace udnopt::manifold {

namespace {

void check_rank_floor(const Eigen::MatrixXd& S) {
    const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXd>(S).singularValues();
    if (sv.size() == 0 || !(sv(sv.size() - 1) >= kRankFloor * sv(0)) || sv(0) == 0.0)
        throw RankCollapse("fixed-rank point: core matrix is numerically singular");
}

/// Thin orthonormal basis Q and R with A = Q R (Q has min(rows, cols) columns).
void thin_qr(const Eigen::MatrixXd& A, Eigen::MatrixXd& Q, Eigen::MatrixXd& R) {
    const Eigen::Index k = std::min(A.rows(), A.cols());
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(A);
    Q = qr.householderQ() * Eigen::MatrixXd::Identity(A.rows(), k);
    R = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
}

}  // namespace

FixedRankPoint::FixedRankPoint(Eigen::MatrixXd U, Eigen::MatrixXd S, Eigen::MatrixXd V)
    : U_(std::move(U)), S_(std::move(S)), V_(std::move(V)) {
    const Eigen::Index r = S_.rows();
    if (r < 1) throw std::invalid_argument("fixed-rank point: rank must be >= 1");
    if (S_.cols() != r || U_.cols() != r || V_.cols() != r)
        throw std::invalid_argument("fixed-rank point: factor shapes disagree");
    if (U_.rows() < r || V_.rows() < r) throw std::invalid_argument("fixed-rank point: rank exceeds dimensions");
    if (!U_.allFinite() || !S_.allFinite() || !V_.allFinite())
        throw std::invalid_argument("fixed-rank point: non-finite factors");
    const auto I = Eigen::MatrixXd::Identity(r, r);
    if ((U_.transpose() * U_ - I).cwiseAbs().maxCoeff() > 1e-10 ||
        (V_.transpose() * V_ - I).cwiseAbs().maxCoeff() > 1e-10)
        throw std::invalid_argument("fixed-rank point: U and V need orthonormal columns");
    check_rank_floor(S_);
}

FixedRankPoint FixedRankPoint::from_dense(const Eigen::MatrixXd& M, Eigen::Index r) {
    if (r < 1 || r > std::min(M.rows(), M.cols())) throw std::invalid_argument("from_dense: bad rank");
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
    return {svd.matrixU().leftCols(r), svd.singularValues().head(r).asDiagonal().toDenseMatrix(),
            svd.matrixV().leftCols(r)};
}

TangentVector TangentVector::zero(const FixedRankPoint& X) {
    const auto r = X.rank();
    return {Eigen::MatrixXd::Zero(r, r), Eigen::MatrixXd::Zero(X.rows(), r), Eigen::MatrixXd::Zero(X.cols(), r)};
}

TangentVector& TangentVector::operator+=(const TangentVector& o) {
    M += o.M;
    Up += o.Up;
    Vp += o.Vp;
    return *this;
}

TangentVector& TangentVector::operator*=(double a) {
    M *= a;
    Up *= a;
    Vp *= a;
    return *this;
}

double inner(const TangentVector& a, const TangentVector& b) {
    return (a.M.array() * b.M.array()).sum() + (a.Up.array() * b.Up.array()).sum() +
           (a.Vp.array() * b.Vp.array()).sum();
}

double norm(const TangentVector& v) { return std::sqrt(inner(v, v)); }

Eigen::MatrixXd ambient_dense(const FixedRankPoint& X, const TangentVector& xi) {
    return X.U() * xi.M * X.V().transpose() + xi.Up * X.V().transpose() + X.U() * xi.Vp.transpose();
}

Eigen::Index AmbientMatrix::rows() const {
    return std::visit([](const auto& m) -> Eigen::Index {
        if constexpr (std::is_same_v<std::decay_t<decltype(m)>, LowRankMatrix>) return m.A.rows();
        else return m.rows();
    }, data_);
}

Eigen::Index AmbientMatrix::cols() const {
    return std::visit([](const auto& m) -> Eigen::Index {
        if constexpr (std::is_same_v<std::decay_t<decltype(m)>, LowRankMatrix>) return m.B.rows();
        else return m.cols();
    }, data_);
}

Eigen::MatrixXd AmbientMatrix::times(const Eigen::MatrixXd& W) const {
    return std::visit([&](const auto& m) -> Eigen::MatrixXd {
        if constexpr (std::is_same_v<std::decay_t<decltype(m)>, LowRankMatrix>) return m.A * (m.B.transpose() * W);
        else return m * W;
    }, data_);
}

Eigen::MatrixXd AmbientMatrix::transpose_times(const Eigen::MatrixXd& W) const {
    return std::visit([&](const auto& m) -> Eigen::MatrixXd {
        if constexpr (std::is_same_v<std::decay_t<decltype(m)>, LowRankMatrix>) return m.B * (m.A.transpose() * W);
        else return m.transpose() * W;
    }, data_);
}

Eigen::MatrixXd AmbientMatrix::dense() const {
    return std::visit([](const auto& m) -> Eigen::MatrixXd {
        if constexpr (std::is_same_v<std::decay_t<decltype(m)>, LowRankMatrix>) return m.A * m.B.transpose();
        else return Eigen::MatrixXd(m);
    }, data_);
}

AmbientMatrix AmbientMatrix::of(const FixedRankPoint& X, const TangentVector& xi) {
    // U M V^T + Up V^T + U Vp^T = [U M + Up, U] [V, Vp]^T
    const Eigen::Index r = X.rank();
    LowRankMatrix lr{Eigen::MatrixXd(X.rows(), 2 * r), Eigen::MatrixXd(X.cols(), 2 * r)};
    lr.A << X.U() * xi.M + xi.Up, X.U();
    lr.B << X.V(), xi.Vp;
    return lr;
}

TangentVector project_tangent(const FixedRankPoint& X, const AmbientMatrix& Z) {
    if (Z.rows() != X.rows() || Z.cols() != X.cols())
        throw std::invalid_argument("project_tangent: ambient shape does not match the point");
    const Eigen::MatrixXd ZV = Z.times(X.V());
    const Eigen::MatrixXd ZtU = Z.transpose_times(X.U());
    TangentVector t;
    t.M = X.U().transpose() * ZV;
    t.Up = ZV - X.U() * t.M;
    t.Vp = ZtU - X.V() * t.M.transpose();
    return t;
}

FixedRankPoint retract(const FixedRankPoint& X, const TangentVector& xi, double alpha) {
    const Eigen::Index r = X.rank();
    if (xi.M.rows() != r || xi.M.cols() != r || xi.Up.rows() != X.rows() || xi.Up.cols() != r ||
        xi.Vp.rows() != X.cols() || xi.Vp.cols() != r)
        throw std::invalid_argument("retract: tangent vector does not match the point");
    // X + alpha xi = [U, Up] C [V, Vp]^T with C = [[S + alpha M, alpha I], [alpha I, 0]].
    Eigen::MatrixXd A(X.rows(), 2 * r), B(X.cols(), 2 * r);
    A << X.U(), xi.Up;
    B << X.V(), xi.Vp;
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(2 * r, 2 * r);
    C.topLeftCorner(r, r) = X.S() + alpha * xi.M;
    C.topRightCorner(r, r).diagonal().setConstant(alpha);
    C.bottomLeftCorner(r, r).diagonal().setConstant(alpha);
    Eigen::MatrixXd Qa, Ra, Qb, Rb;
    thin_qr(A, Qa, Ra);
    thin_qr(B, Qb, Rb);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(Ra * C * Rb.transpose(), Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Eigen::VectorXd sv = svd.singularValues();
    if (!(sv(r - 1) >= kRankFloor * sv(0)) || sv(0) == 0.0)
        throw RankCollapse("retract: step leaves the rank-" + std::to_string(r) + " manifold");
    Eigen::MatrixXd U = Qa * svd.matrixU().leftCols(r);
    Eigen::MatrixXd V = Qb * svd.matrixV().leftCols(r);
    return {std::move(U), sv.head(r).asDiagonal().toDenseMatrix(), std::move(V)};
}

TangentVector transport(const FixedRankPoint& from, const FixedRankPoint& to, const TangentVector& xi) {
    if (from.rows() != to.rows() || from.cols() != to.cols() || from.rank() != to.rank())
        throw std::invalid_argument("transport: points live on different manifolds");
    return project_tangent(to, AmbientMatrix::of(from, xi));
}

}  // namespace udnopt::manifold
