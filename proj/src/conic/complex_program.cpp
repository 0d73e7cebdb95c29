#include "udnopt/conic/complex_program.hpp"

#include <stdexcept>

namespace udnopt::conic {

ComplexAffineMap ComplexAffineMap::zero(Eigen::Index rows, Eigen::Index num_real, Eigen::Index num_complex) {
    return {Eigen::MatrixXcd::Zero(rows, num_real), Eigen::MatrixXcd::Zero(rows, num_complex),
            Eigen::VectorXcd::Zero(rows)};
}

Eigen::VectorXcd ComplexAffineMap::evaluate(const Eigen::VectorXd& r, const Eigen::VectorXcd& z) const {
    return real_coef * r.cast<std::complex<double>>() + complex_coef * z + offset;
}

Eigen::VectorXd realify(const Eigen::VectorXcd& v) {
    Eigen::VectorXd out(2 * v.size());
    out << v.real(), v.imag();
    return out;
}

Eigen::VectorXcd complexify(const Eigen::VectorXd& v) {
    if (v.size() % 2 != 0) throw std::invalid_argument("complexify: odd length");
    const Eigen::Index h = v.size() / 2;
    Eigen::VectorXcd out(h);
    for (Eigen::Index i = 0; i < h; ++i) out[i] = {v[i], v[h + i]};
    return out;
}

namespace {

void check_map(const ComplexAffineMap& map, const ComplexSocProgram& prog, const char* what) {
    if (map.real_coef.rows() != map.rows() || map.complex_coef.rows() != map.rows() ||
        map.real_coef.cols() != prog.num_real || map.complex_coef.cols() != prog.num_complex) {
        throw std::invalid_argument(std::string("embed_complex: inconsistent dimensions in ") + what);
    }
}

class RowWriter {
public:
    RowWriter(Eigen::Index num_real, Eigen::Index num_complex)
        : nr_(num_real), nc_(num_complex) {}

    /// Appends s = map(x) for the real (imag=false) or imaginary part of one complex row.
    void append(const ComplexAffineMap& map, Eigen::Index row, bool imag) {
        const Eigen::Index r = rows_++;
        // Standard form: s = b - A x, so A = -coef and b = offset.
        for (Eigen::Index j = 0; j < nr_; ++j) {
            const auto a = map.real_coef(row, j);
            push(r, j, -(imag ? a.imag() : a.real()));
        }
        for (Eigen::Index j = 0; j < nc_; ++j) {
            const auto a = map.complex_coef(row, j);
            // Re(a z) = Re a Re z - Im a Im z ; Im(a z) = Im a Re z + Re a Im z
            push(r, nr_ + j, -(imag ? a.imag() : a.real()));
            push(r, nr_ + nc_ + j, -(imag ? a.real() : -a.imag()));
        }
        const auto o = map.offset[row];
        b_.push_back(imag ? o.imag() : o.real());
    }

    Eigen::Index rows() const noexcept { return rows_; }

    SparseMatrix matrix() const {
        SparseMatrix A(rows_, nr_ + 2 * nc_);
        A.setFromTriplets(trip_.begin(), trip_.end());
        return A;
    }

    Eigen::VectorXd rhs() const { return Eigen::Map<const Eigen::VectorXd>(b_.data(), rows_); }

private:
    void push(Eigen::Index r, Eigen::Index c, double v) {
        if (v != 0.0) trip_.emplace_back(r, c, v);
    }

    Eigen::Index nr_, nc_;
    Eigen::Index rows_ = 0;
    std::vector<Eigen::Triplet<double>> trip_;
    std::vector<double> b_;
};

}  // namespace

StandardConicProgram embed_complex(const ComplexSocProgram& prog) {
    if (prog.num_real < 0 || prog.num_complex < 0) throw std::invalid_argument("embed_complex: negative size");
    check_map(prog.objective, prog, "objective");
    if (prog.objective.rows() != 1) throw std::invalid_argument("embed_complex: objective must be a single row");

    const Eigen::Index nr = prog.num_real;
    const Eigen::Index nc = prog.num_complex;
    Eigen::VectorXd c(nr + 2 * nc);
    for (Eigen::Index j = 0; j < nr; ++j) c[j] = prog.objective.real_coef(0, j).real();
    for (Eigen::Index j = 0; j < nc; ++j) {
        const auto a = prog.objective.complex_coef(0, j);
        c[nr + j] = a.real();
        c[nr + nc + j] = -a.imag();
    }

    RowWriter writer(nr, nc);
    std::vector<Cone> cones;
    for (const auto& eq : prog.equalities) {
        check_map(eq, prog, "equality");
        if (eq.rows() == 0) continue;
        for (Eigen::Index i = 0; i < eq.rows(); ++i) writer.append(eq, i, false);
        for (Eigen::Index i = 0; i < eq.rows(); ++i) writer.append(eq, i, true);
        cones.push_back(Cone::zero(static_cast<std::size_t>(2 * eq.rows())));
    }
    for (const auto& nn : prog.nonnegatives) {
        check_map(nn, prog, "nonnegative block");
        if (nn.rows() == 0) continue;
        for (Eigen::Index i = 0; i < nn.rows(); ++i) writer.append(nn, i, false);
        cones.push_back(Cone::nonnegative(static_cast<std::size_t>(nn.rows())));
    }
    for (const auto& soc : prog.socs) {
        check_map(soc.head, prog, "soc head");
        check_map(soc.tail, prog, "soc tail");
        if (soc.head.rows() != 1) throw std::invalid_argument("embed_complex: soc head must be a single row");
        writer.append(soc.head, 0, false);
        for (Eigen::Index i = 0; i < soc.tail.rows(); ++i) writer.append(soc.tail, i, false);
        for (Eigen::Index i = 0; i < soc.tail.rows(); ++i) writer.append(soc.tail, i, true);
        cones.push_back(Cone::second_order(static_cast<std::size_t>(1 + 2 * soc.tail.rows())));
    }
    return {std::move(c), writer.matrix(), writer.rhs(), std::move(cones)};
}

ComplexPoint recover_complex(const ComplexSocProgram& prog, const Eigen::VectorXd& x) {
    const Eigen::Index nr = prog.num_real;
    const Eigen::Index nc = prog.num_complex;
    if (x.size() != nr + 2 * nc) throw std::invalid_argument("recover_complex: length mismatch");
    ComplexPoint p;
    p.real = x.head(nr);
    p.complex.resize(nc);
    for (Eigen::Index j = 0; j < nc; ++j) p.complex[j] = {x[nr + j], x[nr + nc + j]};
    return p;
}

}  // namespace udnopt::conic
