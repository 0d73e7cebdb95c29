#pragma once

#include "udnopt/conic/admm.hpp"
#include "udnopt/conic/stuffing.hpp"
#include "udnopt/sparse/cran.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <vector>

namespace udnopt::sparse {

/// Aggregate beamformer: beams[l][k] = z_lk (length N_l); RRH l's group is z~_l = [z_l1, ..., z_lK].
struct BeamformingSolution {
    bool feasible = false;
    conic::SolveStatus status = conic::SolveStatus::MaxIterations;
    std::vector<std::vector<Eigen::VectorXcd>> beams;
    std::vector<int> active;  ///< sorted RRH indices
    double transmit_power = 0.0;
    double network_power = 0.0;
    std::vector<double> sinr;  ///< achieved SINR per user
};

/// Which problem family a program skeleton encodes.
enum class ProgramKind {
    PowerMin,   ///< min sum_l (1/eta_l) ||z~_l||^2, SINR and per-RRH power constraints
    GroupNorm,  ///< min sum_l w_l ||z~_l||_2, same constraints
    Admission,  ///< min sum_k s_k, relaxed SINR constraints g_k <= s_k, s >= 0
};

/// Shape of a program: which RRHs carry beams and which users are served.
struct ProgramShape {
    ProgramKind kind = ProgramKind::PowerMin;
    std::vector<int> antennas;  ///< N_l of each RRH of the instance
    std::vector<int> active;
    std::vector<int> served;

    auto operator<=>(const ProgramShape&) const = default;
};

struct BeamformingOptions {
    conic::AdmmOptions admm = [] {
        conic::AdmmOptions o;
        o.eps_abs = 1e-8;
        o.eps_rel = 1e-8;
        o.max_iterations = 20000;
        return o;
    }();
    /// Slack allowed on SINR and power constraints when certifying a solution as feasible.
    double feasibility_tol = 1e-6;
};

/// Builds and caches stuffing templates per program shape, then stuffs instance data.
/// Safe to share across threads.
class BeamformingPrograms {
public:
    const conic::StuffingTemplate& get(const ProgramShape& shape);

    static conic::StuffingTemplate build(const ProgramShape& shape);
    static conic::ParameterSet parameters(const CranInstance& inst, const ProgramShape& shape,
                                          const std::vector<double>& weights = {});

private:
    std::mutex mutex_;
    std::map<ProgramShape, std::unique_ptr<conic::StuffingTemplate>> cache_;
};

/// SINR_k = |h_k^H v_k|^2 / (sum_{j != k} |h_k^H v_j|^2 + sigma_k^2).
std::vector<double> achieved_sinr(const CranInstance& inst, const std::vector<std::vector<Eigen::VectorXcd>>& beams);

/// sum_{l in A} (1/eta_l) sum_k ||z_lk||^2 + sum_{l in A} P^c_l.
double network_power(const CranInstance& inst, const BeamformingSolution& sol);

/// Minimum transmit power beamforming over the given active RRH set (users with gamma_k = 0 get no beam).
BeamformingSolution socp_power_min(const CranInstance& inst, const std::vector<int>& active,
                                   const BeamformingOptions& opts = {}, BeamformingPrograms* cache = nullptr);

/// Checks the SOC SINR constraints and per-RRH budgets of a beamformer within `tol`.
bool satisfies_constraints(const CranInstance& inst, const std::vector<std::vector<Eigen::VectorXcd>>& beams,
                           const std::vector<int>& served, double tol);

struct GsbfCandidate {
    std::vector<int> active;
    double network_power;
};

struct GsbfResult {
    BeamformingSolution solution;
    std::vector<double> weights;       ///< stage-1 w_l (infinite for RRHs with no channel gain)
    std::vector<double> group_scores;  ///< stage-1 ||z~_l||_2
    std::vector<int> order;            ///< switch-off priority
    std::vector<GsbfCandidate> candidates;  ///< every feasible active set visited in stage 3
    double all_active_power = 0.0;
};

/// w_l = sqrt(P^c_l K / sum_k ||h_lk||^2); +inf when RRH l has no channel to anybody.
std::vector<double> gsbf_weights(const CranInstance& inst);

/// Three-stage group sparse beamforming: weighted mixed l1/l2 relaxation, ordering by group
/// norm, greedy switch-off with power-min refinement.
GsbfResult group_sparse_beamforming(const CranInstance& inst, const BeamformingOptions& opts = {},
                                    BeamformingPrograms* cache = nullptr);

struct ExhaustiveResult {
    bool feasible = false;
    std::vector<int> active;
    double network_power = 0.0;
};

/// Enumerates all 2^L - 1 active sets; intended for L <= ~6.
ExhaustiveResult exhaustive_network_power(const CranInstance& inst, const BeamformingOptions& opts = {},
                                          BeamformingPrograms* cache = nullptr);

}  // namespace udnopt::sparse
