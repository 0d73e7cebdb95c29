#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <stdexcept>
#include <variant>

namespace udnopt::manifold {

/// Thrown when an iterate would leave the fixed-rank manifold.
class RankCollapse : public std::runtime_error {
public:
    explicit RankCollapse(const std::string& what) : std::runtime_error(what) {}
};

/// sigma_min(S) below this fraction of sigma_max counts as rank collapse.
inline constexpr double kRankFloor = 1e-12;

/// Real p x q matrix of rank r stored as U S V^T with orthonormal U, V and invertible S.
class FixedRankPoint {
public:
    /// Validates orthonormality (1e-10), shapes and the rank floor.
    FixedRankPoint(Eigen::MatrixXd U, Eigen::MatrixXd S, Eigen::MatrixXd V);

    /// Rank-r truncated SVD of a dense matrix.
    static FixedRankPoint from_dense(const Eigen::MatrixXd& M, Eigen::Index r);

    const Eigen::MatrixXd& U() const noexcept { return U_; }
    const Eigen::MatrixXd& S() const noexcept { return S_; }
    const Eigen::MatrixXd& V() const noexcept { return V_; }
    Eigen::Index rows() const noexcept { return U_.rows(); }
    Eigen::Index cols() const noexcept { return V_.rows(); }
    Eigen::Index rank() const noexcept { return S_.rows(); }

    Eigen::MatrixXd dense() const { return U_ * S_ * V_.transpose(); }
    double entry(Eigen::Index i, Eigen::Index j) const { return U_.row(i) * S_ * V_.row(j).transpose(); }

private:
    Eigen::MatrixXd U_, S_, V_;
};

/// xi = U M V^T + Up V^T + U Vp^T with U^T Up = 0 and V^T Vp = 0.
struct TangentVector {
    Eigen::MatrixXd M, Up, Vp;

    static TangentVector zero(const FixedRankPoint& X);

    TangentVector& operator+=(const TangentVector& o);
    TangentVector& operator*=(double a);
    friend TangentVector operator+(TangentVector a, const TangentVector& b) { return a += b; }
    friend TangentVector operator-(TangentVector a, const TangentVector& b) { return a += -1.0 * b; }
    friend TangentVector operator*(double a, TangentVector v) { return v *= a; }
};

/// Embedded metric: the three components are mutually orthogonal in the ambient space.
double inner(const TangentVector& a, const TangentVector& b);
double norm(const TangentVector& v);

/// The represented p x q matrix of a tangent vector.
Eigen::MatrixXd ambient_dense(const FixedRankPoint& X, const TangentVector& xi);

/// Factored ambient matrix A B^T.
struct LowRankMatrix {
    Eigen::MatrixXd A, B;
};

/// Ambient p x q matrix in whichever form is cheapest for the producer.
class AmbientMatrix {
public:
    using Storage = std::variant<Eigen::MatrixXd, Eigen::SparseMatrix<double>, LowRankMatrix>;

    AmbientMatrix(Eigen::MatrixXd m) : data_(std::move(m)) {}
    AmbientMatrix(Eigen::SparseMatrix<double> m) : data_(std::move(m)) {}
    AmbientMatrix(LowRankMatrix m) : data_(std::move(m)) {}

    Eigen::Index rows() const;
    Eigen::Index cols() const;
    Eigen::MatrixXd times(const Eigen::MatrixXd& W) const;             ///< Z W
    Eigen::MatrixXd transpose_times(const Eigen::MatrixXd& W) const;   ///< Z^T W
    Eigen::MatrixXd dense() const;

    /// Ambient form of a tangent vector, kept factored.
    static AmbientMatrix of(const FixedRankPoint& X, const TangentVector& xi);

private:
    Storage data_;
};

/// Orthogonal projection onto the tangent space at X (embedded metric).
TangentVector project_tangent(const FixedRankPoint& X, const AmbientMatrix& Z);

/// Metric-projection retraction: best rank-r approximation of X + alpha xi, from QR/SVD of
/// thin factors only. Throws RankCollapse below the rank floor.
FixedRankPoint retract(const FixedRankPoint& X, const TangentVector& xi, double alpha = 1.0);

/// Vector transport by projection of the ambient vector.
TangentVector transport(const FixedRankPoint& from, const FixedRankPoint& to, const TangentVector& xi);

}  // namespace udnopt::manifold
