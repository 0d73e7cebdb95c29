#pragma once

#include "udnopt/manifold/fixed_rank.hpp"

#include <vector>

namespace udnopt::manifold {

/// Smooth real function of a p x q matrix, evaluated at fixed-rank points.
class SmoothCost {
public:
    virtual ~SmoothCost() = default;
    virtual Eigen::Index rows() const = 0;
    virtual Eigen::Index cols() const = 0;
    virtual double value(const FixedRankPoint& X) const = 0;
    virtual AmbientMatrix gradient(const FixedRankPoint& X) const = 0;
    virtual bool has_hessian() const { return false; }
    /// Euclidean Hessian applied to the ambient form of xi.
    virtual AmbientMatrix hessian(const FixedRankPoint& X, const TangentVector& xi) const;
};

/// f(M) = 1/2 ||M - A||_F^2.
class DistanceCost final : public SmoothCost {
public:
    explicit DistanceCost(Eigen::MatrixXd target) : A_(std::move(target)) {}
    Eigen::Index rows() const override { return A_.rows(); }
    Eigen::Index cols() const override { return A_.cols(); }
    double value(const FixedRankPoint& X) const override;
    AmbientMatrix gradient(const FixedRankPoint& X) const override;
    bool has_hessian() const override { return true; }
    AmbientMatrix hessian(const FixedRankPoint& X, const TangentVector& xi) const override;

private:
    Eigen::MatrixXd A_;
};

/// f(M) = <C, M>.
class LinearCost final : public SmoothCost {
public:
    explicit LinearCost(Eigen::MatrixXd C) : C_(std::move(C)) {}
    Eigen::Index rows() const override { return C_.rows(); }
    Eigen::Index cols() const override { return C_.cols(); }
    double value(const FixedRankPoint& X) const override;
    AmbientMatrix gradient(const FixedRankPoint& X) const override;
    bool has_hessian() const override { return true; }
    AmbientMatrix hessian(const FixedRankPoint& X, const TangentVector& xi) const override;

private:
    Eigen::MatrixXd C_;
};

struct MaskEntry {
    Eigen::Index row;
    Eigen::Index col;
    double target;
    double weight = 1.0;
};

/// f(M) = sum_e weight_e (M[row_e, col_e] - target_e)^2 with a mask-sparse gradient.
class MaskedLeastSquares final : public SmoothCost {
public:
    /// Rejects out-of-range, duplicate, negative-weight or non-finite entries.
    MaskedLeastSquares(Eigen::Index rows, Eigen::Index cols, std::vector<MaskEntry> entries);

    Eigen::Index rows() const override { return rows_; }
    Eigen::Index cols() const override { return cols_; }
    const std::vector<MaskEntry>& entries() const noexcept { return entries_; }

    double value(const FixedRankPoint& X) const override;
    /// Same objective for M = L R^T.
    double value_factored(const Eigen::MatrixXd& L, const Eigen::MatrixXd& R) const;
    AmbientMatrix gradient(const FixedRankPoint& X) const override;
    bool has_hessian() const override { return true; }
    AmbientMatrix hessian(const FixedRankPoint& X, const TangentVector& xi) const override;

    /// Dense matrix holding the targets on the mask and zeros elsewhere.
    Eigen::MatrixXd target_matrix() const;

private:
    Eigen::SparseMatrix<double> scatter(const std::vector<double>& values) const;

    Eigen::Index rows_, cols_;
    std::vector<MaskEntry> entries_;
    Eigen::SparseMatrix<double> pattern_;
    std::vector<Eigen::Index> slot_;  ///< position of entry k in pattern_'s value array
};

TangentVector riemannian_gradient(const SmoothCost& cost, const FixedRankPoint& X);

/// Exact Riemannian Hessian when the cost supplies a Euclidean Hessian, otherwise a finite
/// difference of Riemannian gradients along the retraction. `egrad` is the Euclidean gradient at X.
TangentVector riemannian_hessian(const SmoothCost& cost, const FixedRankPoint& X, const AmbientMatrix& egrad,
                                 const TangentVector& xi);

}  // namespace udnopt::manifold
