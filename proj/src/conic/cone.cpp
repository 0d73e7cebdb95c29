#include "udnopt/conic/cone.hpp"

#include <stdexcept>
#include <string>

namespace udnopt::conic {

Cone Cone::zero(std::size_t dim) {
    if (dim < 1) throw std::invalid_argument("zero cone needs dimension >= 1");
    return {ConeKind::Zero, dim};
}

Cone Cone::nonnegative(std::size_t dim) {
    if (dim < 1) throw std::invalid_argument("nonnegative cone needs dimension >= 1");
    return {ConeKind::NonNegative, dim};
}

Cone Cone::second_order(std::size_t dim) {
    if (dim < 2) throw std::invalid_argument("second-order cone needs dimension >= 2");
    return {ConeKind::SecondOrder, dim};
}

std::size_t total_dim(std::span<const Cone> cones) noexcept {
    std::size_t m = 0;
    for (const auto& k : cones) m += k.dim();
    return m;
}

namespace {

void check_size(Eigen::Index size, std::size_t expected) {
    if (static_cast<std::size_t>(size) != expected) {
        throw std::invalid_argument("cone projection: vector length " + std::to_string(size) +
                                    " does not match cone dimension " + std::to_string(expected));
    }
}

void project_soc_inplace(Eigen::Ref<Eigen::VectorXd> v) {
    const double t = v[0];
    const double nz = v.tail(v.size() - 1).norm();
    if (nz <= t) return;
    // Includes the kink t == -||z||, where the origin is the unique projection.
    if (nz <= -t) {
        v.setZero();
        return;
    }
    const double a = 0.5 * (t + nz);
    v[0] = a;
    v.tail(v.size() - 1) *= a / nz;
}

void project_block_inplace(Eigen::Ref<Eigen::VectorXd> v, const Cone& cone, bool dual) {
    switch (cone.kind()) {
        case ConeKind::Zero:
            if (!dual) v.setZero();
            break;
        case ConeKind::NonNegative:
            v = v.cwiseMax(0.0);
            break;
        case ConeKind::SecondOrder:
            project_soc_inplace(v);
            break;
    }
}

Eigen::VectorXd project_product(const Eigen::Ref<const Eigen::VectorXd>& v,
                                std::span<const Cone> cones, bool dual) {
    check_size(v.size(), total_dim(cones));
    Eigen::VectorXd out = v;
    Eigen::Index offset = 0;
    for (const auto& cone : cones) {
        const auto d = static_cast<Eigen::Index>(cone.dim());
        project_block_inplace(out.segment(offset, d), cone, dual);
        offset += d;
    }
    return out;
}

}  // namespace

Eigen::VectorXd project_cone(const Eigen::Ref<const Eigen::VectorXd>& v, const Cone& cone) {
    check_size(v.size(), cone.dim());
    Eigen::VectorXd out = v;
    project_block_inplace(out, cone, false);
    return out;
}

Eigen::VectorXd project_dual_cone(const Eigen::Ref<const Eigen::VectorXd>& v, const Cone& cone) {
    check_size(v.size(), cone.dim());
    Eigen::VectorXd out = v;
    project_block_inplace(out, cone, true);
    return out;
}

Eigen::VectorXd project_cone_product(const Eigen::Ref<const Eigen::VectorXd>& v,
                                     std::span<const Cone> cones) {
    return project_product(v, cones, false);
}

Eigen::VectorXd project_dual_cone_product(const Eigen::Ref<const Eigen::VectorXd>& v,
                                          std::span<const Cone> cones) {
    return project_product(v, cones, true);
}

double cone_product_distance(const Eigen::Ref<const Eigen::VectorXd>& v, std::span<const Cone> cones) {
    return (v - project_cone_product(v, cones)).norm();
}

}  // namespace udnopt::conic
