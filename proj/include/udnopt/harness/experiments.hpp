#pragma once

#include "udnopt/manifold/solvers.hpp"
#include "udnopt/sparse/beamforming.hpp"
#include "udnopt/tim/side_info.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace udnopt::harness {

/// Invalid experiment configuration (the CLI maps it to exit code 2).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct HeatmapCell {
    int axis1 = 0;
    int axis2 = 0;
    int successes = 0;
    int trials = 0;
    double probability() const { return trials ? static_cast<double>(successes) / trials : 0.0; }
};

/// Cells in axis1-major, axis2-minor order.
struct Heatmap {
    std::string axis1_name;
    std::string axis2_name;
    std::vector<int> axis1;
    std::vector<int> axis2;
    std::vector<HeatmapCell> cells;
    nlohmann::json metadata;

    const HeatmapCell& at(std::size_t i1, std::size_t i2) const { return cells.at(i1 * axis2.size() + i2); }
};

/// `first`, then every multiple of `step` above it, then `last` (deduplicated, ascending).
std::vector<int> stepped_range(int first, int step, int last);

/// Uniformly random `count` off-diagonal positions of a rows x cols matrix.
std::set<std::pair<int, int>> sample_off_diagonal(int rows, int cols, int count, std::uint64_t seed);

struct SparsePtConfig {
    int n = 100;
    int m = 2;
    int k_min = 1;
    int k_max = 20;
    int l_min = 0;  ///< 0 means l_step
    int l_step = 4;
    int l_max = 0;  ///< 0 means n
    int trials = 20;
    std::uint64_t seed = 1;
    unsigned threads = 1;
    double success_tol = 1e-5;
};

/// Axis 1 is K (active devices), axis 2 is L (pilot length).
Heatmap run_sparse_phase_transition(const SparsePtConfig& cfg);

struct NmseConfig {
    int n = 100;
    int m = 2;
    int k = 20;
    double noise_sd = 0.1;
    int l_min = 0;
    int l_step = 10;
    int l_max = 0;
    int trials = 20;
    double lambda_scale = 1.0;  ///< c in lambda = c * noise_sd * sqrt(M log N)
    std::uint64_t seed = 1;
    unsigned threads = 1;
};

struct NmsePoint {
    int l = 0;
    double mean = 0.0;
    double standard_error = 0.0;
    int trials = 0;
    int unconverged = 0;
};

struct NmseCurve {
    std::vector<NmsePoint> points;
    nlohmann::json metadata;
};

NmseCurve run_nmse_curve(const NmseConfig& cfg);

struct TimPtConfig {
    int k = 30;
    std::vector<int> ranks;  ///< empty means 1..10 (capped at k)
    int s_step = 58;
    int s_max = -1;          ///< -1 means k (k - 1)
    int trials = 20;
    tim::CompletionOptions completion;
    std::uint64_t seed = 1;
    unsigned threads = 1;
};

/// Axis 1 is the rank r, axis 2 is |S|.
Heatmap run_tim_phase_transition(const TimPtConfig& cfg);

enum class SolverName { Rcg, Rtr, Altmin };
const char* to_string(SolverName s);
SolverName parse_solver(const std::string& name);

struct ConvergeConfig {
    int p = 100;
    int q = 100;
    int rank = 5;
    int omega = 400;
    std::vector<SolverName> solvers{SolverName::Rcg, SolverName::Rtr, SolverName::Altmin};
    int trials = 1;              ///< instances, each with its own seed
    int max_iterations = 500;
    double target = 1e-6;        ///< solvers stop once f <= target
    std::uint64_t seed = 1;
    unsigned threads = 1;
};

struct ConvergeRun {
    int trial = 0;
    std::uint64_t instance_seed = 0;
    SolverName solver = SolverName::Rcg;
    manifold::SolveTrace trace;
    std::optional<int> iterations_to_target;
    double wall_seconds = 0.0;
    std::string error;  ///< non-empty when the solver threw
};

struct ConvergeResult {
    std::vector<ConvergeRun> runs;  ///< trial-major, solver-minor
    nlohmann::json metadata;
};

ConvergeResult run_convergence_comparison(const ConvergeConfig& cfg);

struct GsbfDemoConfig {
    int num_rrh = 4;
    int num_users = 3;
    sparse::CranGeneratorOptions generator;
    std::optional<sparse::CranInstance> instance;  ///< overrides the generator (single trial)
    int trials = 1;
    int oracle_max_rrh = 4;  ///< exhaustive oracle only when L <= this
    std::uint64_t seed = 1;
    unsigned threads = 1;
};

struct GsbfDemoRow {
    int trial = 0;
    std::uint64_t instance_seed = 0;
    bool feasible = false;
    std::vector<int> active;
    double network_power = 0.0;
    double all_active_power = 0.0;
    std::optional<double> oracle_power;
    std::optional<double> gap;  ///< (gsbf - oracle) / oracle
};

struct GsbfDemoResult {
    std::vector<GsbfDemoRow> rows;
    nlohmann::json metadata;
};

GsbfDemoResult run_gsbf_demo(const GsbfDemoConfig& cfg);

struct AdmissionDemoConfig {
    int num_rrh = 2;
    int num_users = 6;
    sparse::CranGeneratorOptions generator = [] {
        sparse::CranGeneratorOptions g;
        g.sinr_target = 2.0;
        return g;
    }();
    std::optional<sparse::CranInstance> instance;
    int trials = 1;
    int oracle_max_users = 10;  ///< enumeration of the largest feasible subset only when K <= this
    std::uint64_t seed = 1;
    unsigned threads = 1;
};

struct AdmissionDemoRow {
    int trial = 0;
    std::uint64_t instance_seed = 0;
    std::vector<int> admitted;
    std::vector<int> removed;
    std::vector<int> added;
    double transmit_power = 0.0;
    std::optional<int> oracle_size;
};

struct AdmissionDemoResult {
    std::vector<AdmissionDemoRow> rows;
    nlohmann::json metadata;
};

AdmissionDemoResult run_admission_demo(const AdmissionDemoConfig& cfg);

// Output. Numbers use 17 significant digits so equal runs give byte-identical files.

/// `axis1,axis2,successes,trials,probability`
void write_heatmap_csv(std::ostream& out, const Heatmap& grid);
/// `L,mean_nmse,standard_error,trials,unconverged`
void write_nmse_csv(std::ostream& out, const NmseCurve& curve);
/// `trial,solver,iterations,iterations_to_target,final_objective,reason,wall_seconds`; wall time empty unless requested.
void write_converge_summary_csv(std::ostream& out, const ConvergeResult& res, bool include_timing = false);
/// `trial,instance_seed,feasible,active,network_power,all_active_power,oracle_power,gap`
void write_gsbf_csv(std::ostream& out, const GsbfDemoResult& res);
/// `trial,instance_seed,admitted_count,admitted,removed,added,transmit_power,oracle_size`
void write_admission_csv(std::ostream& out, const AdmissionDemoResult& res);

/// Metadata common to every run (tool name, version, kind).
nlohmann::json base_metadata(const std::string& kind);

}  // namespace udnopt::harness
