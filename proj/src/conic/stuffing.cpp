#include "udnopt/conic/stuffing.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <utility>

namespace udnopt::conic {

StuffingTemplate::StuffingTemplate(StandardConicProgram skeleton, std::vector<Slot> slots,
                                   std::map<std::string, std::size_t> param_sizes)
    : skeleton_(std::move(skeleton)), slots_(std::move(slots)), param_sizes_(std::move(param_sizes)) {
    for (const auto& s : slots_) {
        const auto it = param_sizes_.find(s.param);
        if (it == param_sizes_.end())
            throw std::invalid_argument("stuffing template: slot refers to undeclared parameter '" + s.param + "'");
        if (s.component >= it->second)
            throw std::invalid_argument("stuffing template: component out of range for '" + s.param + "'");
        const Eigen::Index limit = s.target == SlotTarget::A   ? skeleton_.A().nonZeros()
                                   : s.target == SlotTarget::b ? skeleton_.num_rows()
                                                               : skeleton_.num_vars();
        if (s.position < 0 || s.position >= limit)
            throw std::invalid_argument("stuffing template: slot position outside the skeleton");
    }
}

StandardConicProgram stuff(const StuffingTemplate& tmpl, const ParameterSet& params) {
    for (const auto& [name, size] : tmpl.param_sizes()) {
        const auto it = params.find(name);
        if (it == params.end()) throw std::invalid_argument("stuff: missing parameter '" + name + "'");
        if (it->second.size() != size)
            throw std::invalid_argument("stuff: parameter '" + name + "' has length " +
                                        std::to_string(it->second.size()) + ", expected " + std::to_string(size));
        for (double v : it->second)
            if (!std::isfinite(v)) throw std::invalid_argument("stuff: non-finite value in '" + name + "'");
    }
    for (const auto& [name, values] : params) {
        if (!tmpl.param_sizes().contains(name)) throw std::invalid_argument("stuff: unknown parameter '" + name + "'");
    }

    const auto& sk = tmpl.skeleton();
    SparseMatrix A = sk.A();
    Eigen::VectorXd b = sk.b();
    Eigen::VectorXd c = sk.c();
    double* a_values = A.valuePtr();
    for (const auto& s : tmpl.slots()) {
        const double v = s.scale * params.at(s.param)[s.component];
        switch (s.target) {
            case SlotTarget::A: a_values[s.position] = v; break;
            case SlotTarget::b: b[s.position] = v; break;
            case SlotTarget::c: c[s.position] = v; break;
        }
    }
    return {std::move(c), std::move(A), std::move(b), sk.cones()};
}

TemplateBuilder::TemplateBuilder(Eigen::Index num_vars) : num_vars_(num_vars) {
    if (num_vars < 0) throw std::invalid_argument("template builder: negative variable count");
}

Eigen::Index TemplateBuilder::add_cone(const Cone& cone) {
    const Eigen::Index first = rows_;
    cones_.push_back(cone);
    rows_ += static_cast<Eigen::Index>(cone.dim());
    return first;
}

void TemplateBuilder::declare(const std::string& param, std::size_t size) {
    const auto [it, inserted] = param_sizes_.emplace(param, size);
    if (!inserted && it->second != size)
        throw std::invalid_argument("template builder: parameter '" + param + "' redeclared with another size");
}

void TemplateBuilder::check_row(Eigen::Index row) const {
    if (row < 0 || row >= rows_) throw std::invalid_argument("template builder: row out of range");
}

void TemplateBuilder::check_col(Eigen::Index col) const {
    if (col < 0 || col >= num_vars_) throw std::invalid_argument("template builder: column out of range");
}

void TemplateBuilder::set_A(Eigen::Index row, Eigen::Index col, double value) {
    check_row(row);
    check_col(col);
    entries_.push_back({row, col, value, false, {}});
}

void TemplateBuilder::slot_A(Eigen::Index row, Eigen::Index col, const std::string& param,
                             std::size_t component, double scale) {
    check_row(row);
    check_col(col);
    entries_.push_back({row, col, 0.0, true, Slot{param, component, SlotTarget::A, 0, scale}});
}

void TemplateBuilder::set_b(Eigen::Index row, double value) {
    check_row(row);
    b_fixed_[row] = value;
}

void TemplateBuilder::slot_b(Eigen::Index row, const std::string& param, std::size_t component, double scale) {
    check_row(row);
    vector_slots_.push_back(Slot{param, component, SlotTarget::b, row, scale});
}

void TemplateBuilder::set_c(Eigen::Index col, double value) {
    check_col(col);
    c_fixed_[col] = value;
}

void TemplateBuilder::slot_c(Eigen::Index col, const std::string& param, std::size_t component, double scale) {
    check_col(col);
    vector_slots_.push_back(Slot{param, component, SlotTarget::c, col, scale});
}

StuffingTemplate TemplateBuilder::build() const {
    std::set<std::pair<Eigen::Index, Eigen::Index>> seen;
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(entries_.size());
    for (const auto& e : entries_) {
        if (!seen.emplace(e.row, e.col).second)
            throw std::invalid_argument("template builder: duplicate entry in A");
        triplets.emplace_back(e.row, e.col, e.value);
    }
    SparseMatrix A(rows_, num_vars_);
    A.setFromTriplets(triplets.begin(), triplets.end());
    A.makeCompressed();

    std::vector<Slot> slots;
    for (const auto& e : entries_) {
        if (!e.is_slot) continue;
        const Eigen::Index begin = A.outerIndexPtr()[e.col];
        const Eigen::Index end = A.outerIndexPtr()[e.col + 1];
        const int* inner = A.innerIndexPtr();
        const auto* hit = std::lower_bound(inner + begin, inner + end, static_cast<int>(e.row));
        Slot s = e.slot;
        s.position = hit - inner;
        slots.push_back(std::move(s));
    }
    std::set<std::pair<int, Eigen::Index>> vec_seen;
    for (const auto& s : vector_slots_) {
        if (!vec_seen.emplace(static_cast<int>(s.target), s.position).second)
            throw std::invalid_argument("template builder: duplicate slot in b or c");
        slots.push_back(s);
    }

    Eigen::VectorXd b = Eigen::VectorXd::Zero(rows_);
    for (const auto& [row, v] : b_fixed_) b[row] = v;
    Eigen::VectorXd c = Eigen::VectorXd::Zero(num_vars_);
    for (const auto& [col, v] : c_fixed_) c[col] = v;
    return {StandardConicProgram(std::move(c), std::move(A), std::move(b), cones_), std::move(slots), param_sizes_};
}

}  // namespace udnopt::conic
