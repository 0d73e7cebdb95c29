#pragma once

#include "udnopt/conic/program.hpp"

#include <Eigen/Dense>

#include <vector>

namespace udnopt::conic {

/// w = real_coef * r + complex_coef * z + offset, with r real and z complex variables.
struct ComplexAffineMap {
    Eigen::MatrixXcd real_coef;
    Eigen::MatrixXcd complex_coef;
    Eigen::VectorXcd offset;

    static ComplexAffineMap zero(Eigen::Index rows, Eigen::Index num_real, Eigen::Index num_complex);

    Eigen::Index rows() const noexcept { return offset.size(); }
    Eigen::VectorXcd evaluate(const Eigen::VectorXd& r, const Eigen::VectorXcd& z) const;
};

/// Re(head(x)) >= ||tail(x)||_2 with tail complex-valued.
struct ComplexSocConstraint {
    ComplexAffineMap head;
    ComplexAffineMap tail;
};

/// minimize Re(objective(x)) subject to
///   equalities(x) = 0, Re(nonnegatives(x)) >= 0 (componentwise), and the SOC constraints.
struct ComplexSocProgram {
    Eigen::Index num_real = 0;
    Eigen::Index num_complex = 0;
    ComplexAffineMap objective;
    std::vector<ComplexAffineMap> equalities;
    std::vector<ComplexAffineMap> nonnegatives;
    std::vector<ComplexSocConstraint> socs;
};

/// Real variables are ordered (r, Re z, Im z); every complex row becomes the pair (Re, Im),
/// equalities contribute 2 zero-cone rows per complex row, a complex SOC of tail length d
/// becomes SecondOrder(1 + 2d). Zero coefficients are not stored.
StandardConicProgram embed_complex(const ComplexSocProgram& prog);

struct ComplexPoint {
    Eigen::VectorXd real;
    Eigen::VectorXcd complex;
};

/// Inverse of the variable stacking used by embed_complex.
ComplexPoint recover_complex(const ComplexSocProgram& prog, const Eigen::VectorXd& x);

/// (Re v, Im v) stacking; preserves the Euclidean norm.
Eigen::VectorXd realify(const Eigen::VectorXcd& v);
Eigen::VectorXcd complexify(const Eigen::VectorXd& v);

}  // namespace udnopt::conic
