#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

namespace udnopt::conic {

enum class ConeKind { Zero, NonNegative, SecondOrder };

/// One block of a cone product. SecondOrder(d) is {(t, z) : t >= ||z||, z in R^(d-1)}.
class Cone {
public:
    static Cone zero(std::size_t dim);
    static Cone nonnegative(std::size_t dim);
    static Cone second_order(std::size_t dim);

    ConeKind kind() const noexcept { return kind_; }
    std::size_t dim() const noexcept { return dim_; }

    bool operator==(const Cone&) const = default;

private:
    Cone(ConeKind kind, std::size_t dim) : kind_(kind), dim_(dim) {}

    ConeKind kind_;
    std::size_t dim_;
};

std::size_t total_dim(std::span<const Cone> cones) noexcept;

/// Euclidean projection onto the cone. Throws std::invalid_argument on a size mismatch.
Eigen::VectorXd project_cone(const Eigen::Ref<const Eigen::VectorXd>& v, const Cone& cone);

/// Projection onto the dual cone. Zero is dual to the whole space; the others are self-dual.
Eigen::VectorXd project_dual_cone(const Eigen::Ref<const Eigen::VectorXd>& v, const Cone& cone);

/// Blockwise projection onto the product of `cones`, in row order.
Eigen::VectorXd project_cone_product(const Eigen::Ref<const Eigen::VectorXd>& v,
                                     std::span<const Cone> cones);

Eigen::VectorXd project_dual_cone_product(const Eigen::Ref<const Eigen::VectorXd>& v,
                                          std::span<const Cone> cones);

/// Distance from v to the cone product (0 for members).
double cone_product_distance(const Eigen::Ref<const Eigen::VectorXd>& v, std::span<const Cone> cones);

}  // namespace udnopt::conic
