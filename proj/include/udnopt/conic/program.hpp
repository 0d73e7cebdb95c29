#pragma once

#include "udnopt/conic/cone.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <iosfwd>
#include <vector>

namespace udnopt::conic {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor>;

/// minimize c'x  subject to  Ax + s = b,  s in K = cones[0] x cones[1] x ...
///
/// Immutable once built. Explicitly stored zeros in A are part of the sparsity
/// pattern and are never pruned, so re-stuffed programs keep the same structure.
class StandardConicProgram {
public:
    StandardConicProgram(Eigen::VectorXd c, SparseMatrix A, Eigen::VectorXd b, std::vector<Cone> cones);

    const Eigen::VectorXd& c() const noexcept { return c_; }
    const SparseMatrix& A() const noexcept { return A_; }
    const Eigen::VectorXd& b() const noexcept { return b_; }
    const std::vector<Cone>& cones() const noexcept { return cones_; }

    Eigen::Index num_vars() const noexcept { return c_.size(); }
    Eigen::Index num_rows() const noexcept { return b_.size(); }

private:
    Eigen::VectorXd c_;
    SparseMatrix A_;
    Eigen::VectorXd b_;
    std::vector<Cone> cones_;
};

/// True when both matrices store exactly the same (row, col) index sets.
bool same_pattern(const SparseMatrix& lhs, const SparseMatrix& rhs);

/// Plain text format:
///   n m k
///   c_0 ... c_{n-1}          (one value per line)
///   row col value            (one triplet per line, 0-based, explicit zeros kept)
///   b_0 ... b_{m-1}          (one value per line)
///   Z d | N d | Q d          (k cone lines in row order)
/// Values are written with 17 significant digits.
void write_program(std::ostream& out, const StandardConicProgram& prog);
StandardConicProgram read_program(std::istream& in);

}  // namespace udnopt::conic
