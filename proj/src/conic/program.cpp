#include "udnopt/conic/program.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace udnopt::conic {

StandardConicProgram::StandardConicProgram(Eigen::VectorXd c, SparseMatrix A, Eigen::VectorXd b,
                                           std::vector<Cone> cones)
    : c_(std::move(c)), A_(std::move(A)), b_(std::move(b)), cones_(std::move(cones)) {
    if (A_.rows() != b_.size() || A_.cols() != c_.size()) {
        throw std::invalid_argument("conic program: A is " + std::to_string(A_.rows()) + "x" +
                                    std::to_string(A_.cols()) + " but c has length " +
                                    std::to_string(c_.size()) + " and b has length " +
                                    std::to_string(b_.size()));
    }
    if (static_cast<Eigen::Index>(total_dim(cones_)) != b_.size()) {
        throw std::invalid_argument("conic program: cone dimensions sum to " +
                                    std::to_string(total_dim(cones_)) + ", expected " +
                                    std::to_string(b_.size()));
    }
    A_.makeCompressed();
    const auto finite = [](const auto& v) { return v.allFinite(); };
    if (!finite(c_) || !finite(b_) ||
        !Eigen::Map<const Eigen::VectorXd>(A_.valuePtr(), A_.nonZeros()).allFinite()) {
        throw std::invalid_argument("conic program: non-finite data");
    }
}

bool same_pattern(const SparseMatrix& lhs, const SparseMatrix& rhs) {
    if (lhs.rows() != rhs.rows() || lhs.cols() != rhs.cols() || lhs.nonZeros() != rhs.nonZeros())
        return false;
    if (!lhs.isCompressed() || !rhs.isCompressed()) {
        SparseMatrix a = lhs, b = rhs;
        a.makeCompressed();
        b.makeCompressed();
        return same_pattern(a, b);
    }
    for (Eigen::Index j = 0; j <= lhs.cols(); ++j)
        if (lhs.outerIndexPtr()[j] != rhs.outerIndexPtr()[j]) return false;
    for (Eigen::Index k = 0; k < lhs.nonZeros(); ++k)
        if (lhs.innerIndexPtr()[k] != rhs.innerIndexPtr()[k]) return false;
    return true;
}

void write_program(std::ostream& out, const StandardConicProgram& prog) {
    const auto flags = out.flags();
    const auto precision = out.precision();
    out << std::setprecision(17);
    out << prog.num_vars() << ' ' << prog.num_rows() << ' ' << prog.cones().size() << '\n';
    for (Eigen::Index i = 0; i < prog.num_vars(); ++i) out << prog.c()[i] << '\n';
    const auto& A = prog.A();
    for (Eigen::Index j = 0; j < A.outerSize(); ++j)
        for (SparseMatrix::InnerIterator it(A, j); it; ++it)
            out << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
    for (Eigen::Index i = 0; i < prog.num_rows(); ++i) out << prog.b()[i] << '\n';
    for (const auto& cone : prog.cones()) {
        const char tag = cone.kind() == ConeKind::Zero ? 'Z' : cone.kind() == ConeKind::NonNegative ? 'N' : 'Q';
        out << tag << ' ' << cone.dim() << '\n';
    }
    out.flags(flags);
    out.precision(precision);
}

namespace {

std::vector<std::string> tokens_of(const std::string& line) {
    std::istringstream ss(line);
    std::vector<std::string> toks;
    for (std::string t; ss >> t;) toks.push_back(t);
    return toks;
}

double parse_double(const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument("program file: bad number '" + s + "'");
    }
    if (used != s.size()) throw std::invalid_argument("program file: bad number '" + s + "'");
    return v;
}

long parse_index(const std::string& s) {
    std::size_t used = 0;
    long v = 0;
    try {
        v = std::stol(s, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument("program file: bad integer '" + s + "'");
    }
    if (used != s.size() || v < 0) throw std::invalid_argument("program file: bad integer '" + s + "'");
    return v;
}

}  // namespace

StandardConicProgram read_program(std::istream& in) {
    std::vector<std::vector<std::string>> lines;
    for (std::string line; std::getline(in, line);) {
        auto toks = tokens_of(line);
        if (!toks.empty()) lines.push_back(std::move(toks));
    }
    if (lines.empty() || lines[0].size() != 3) throw std::invalid_argument("program file: missing 'n m k' header");
    const long n = parse_index(lines[0][0]);
    const long m = parse_index(lines[0][1]);
    const long k = parse_index(lines[0][2]);
    std::size_t pos = 1;
    auto expect_scalar_line = [&](const char* what) {
        if (pos >= lines.size() || lines[pos].size() != 1)
            throw std::invalid_argument(std::string("program file: expected one value per line for ") + what);
        return parse_double(lines[pos++][0]);
    };

    Eigen::VectorXd c(n);
    for (long i = 0; i < n; ++i) c[i] = expect_scalar_line("c");

    std::vector<Eigen::Triplet<double>> triplets;
    while (pos < lines.size() && lines[pos].size() == 3) {
        const long r = parse_index(lines[pos][0]);
        const long col = parse_index(lines[pos][1]);
        if (r >= m || col >= n) throw std::invalid_argument("program file: triplet index out of range");
        triplets.emplace_back(r, col, parse_double(lines[pos][2]));
        ++pos;
    }

    Eigen::VectorXd b(m);
    for (long i = 0; i < m; ++i) b[i] = expect_scalar_line("b");

    std::vector<Cone> cones;
    for (long i = 0; i < k; ++i) {
        if (pos >= lines.size() || lines[pos].size() != 2)
            throw std::invalid_argument("program file: expected cone descriptor 'Z|N|Q d'");
        const auto& tag = lines[pos][0];
        const auto d = static_cast<std::size_t>(parse_index(lines[pos][1]));
        if (tag == "Z") cones.push_back(Cone::zero(d));
        else if (tag == "N") cones.push_back(Cone::nonnegative(d));
        else if (tag == "Q") cones.push_back(Cone::second_order(d));
        else throw std::invalid_argument("program file: unknown cone tag '" + tag + "'");
        ++pos;
    }
    if (pos != lines.size()) throw std::invalid_argument("program file: trailing content");

    SparseMatrix A(m, n);
    // Duplicates are summed, matching the triplet semantics of the writer (which never emits any).
    A.setFromTriplets(triplets.begin(), triplets.end());
    return {std::move(c), std::move(A), std::move(b), std::move(cones)};
}

}  // namespace udnopt::conic
