#pragma once

#include "udnopt/conic/program.hpp"

#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace udnopt::conic {

/// Named, vector-valued instance parameters (channel coefficients, targets, budgets, weights).
using ParameterSet = std::map<std::string, std::vector<double>>;

enum class SlotTarget { A, b, c };

/// Writes scale * params[param][component] into one stored entry of A, b or c.
/// For A targets `position` indexes the compressed value array of the skeleton.
struct Slot {
    std::string param;
    std::size_t component = 0;
    SlotTarget target = SlotTarget::A;
    Eigen::Index position = 0;
    double scale = 1.0;
};

/// A pre-analysed program skeleton plus the map from parameters to value positions.
/// The skeleton's sparsity pattern and cones never change; stuffing only rewrites values.
class StuffingTemplate {
public:
    StuffingTemplate(StandardConicProgram skeleton, std::vector<Slot> slots,
                     std::map<std::string, std::size_t> param_sizes);

    const StandardConicProgram& skeleton() const noexcept { return skeleton_; }
    const std::vector<Slot>& slots() const noexcept { return slots_; }
    const std::map<std::string, std::size_t>& param_sizes() const noexcept { return param_sizes_; }

private:
    StandardConicProgram skeleton_;
    std::vector<Slot> slots_;
    std::map<std::string, std::size_t> param_sizes_;
};

/// Fills every slot from `params`. Throws std::invalid_argument on a missing or
/// unknown parameter name, a wrong parameter length, or a non-finite value.
StandardConicProgram stuff(const StuffingTemplate& tmpl, const ParameterSet& params);

/// Incremental construction of a StuffingTemplate: rows are appended cone by cone,
/// entries are either fixed numbers or parameter slots.
class TemplateBuilder {
public:
    explicit TemplateBuilder(Eigen::Index num_vars);

    /// Appends a cone block and returns the index of its first row.
    Eigen::Index add_cone(const Cone& cone);

    void declare(const std::string& param, std::size_t size);

    void set_A(Eigen::Index row, Eigen::Index col, double value);
    void slot_A(Eigen::Index row, Eigen::Index col, const std::string& param, std::size_t component,
                double scale = 1.0);
    void set_b(Eigen::Index row, double value);
    void slot_b(Eigen::Index row, const std::string& param, std::size_t component, double scale = 1.0);
    void set_c(Eigen::Index col, double value);
    void slot_c(Eigen::Index col, const std::string& param, std::size_t component, double scale = 1.0);

    Eigen::Index num_rows() const noexcept { return rows_; }

    StuffingTemplate build() const;

private:
    struct PendingA {
        Eigen::Index row, col;
        double value;
        bool is_slot;
        Slot slot;
    };

    void check_row(Eigen::Index row) const;
    void check_col(Eigen::Index col) const;

    Eigen::Index num_vars_;
    Eigen::Index rows_ = 0;
    std::vector<Cone> cones_;
    std::vector<PendingA> entries_;
    std::map<Eigen::Index, double> b_fixed_;
    std::map<Eigen::Index, double> c_fixed_;
    std::vector<Slot> vector_slots_;
    std::map<std::string, std::size_t> param_sizes_;
};

}  // namespace udnopt::conic
