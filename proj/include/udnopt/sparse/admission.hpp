#pragma once

#include "udnopt/sparse/beamforming.hpp"

#include <vector>

namespace udnopt::sparse {

/// QoS constraints g_k(v) <= 0 given by the SOC SINR constraints of a C-RAN with every RRH active.
/// Users with gamma_k = 0 carry no constraint and are always admitted.
struct AdmissionInstance {
    CranInstance network;
};

struct AdmissionResult {
    std::vector<int> admitted;          ///< sorted user indices
    std::vector<double> slack;          ///< z_k of the l1 surrogate, one per user (0 for unconstrained users)
    double threshold = 0.0;             ///< epsilon used to read the support of z
    std::vector<int> removed;           ///< users dropped during deflation, in removal order
    std::vector<int> added;             ///< rejected users re-admitted by the greedy pass, in order
    BeamformingSolution certificate;    ///< power-min beamformer serving exactly the admitted users
};

/// Solves min sum_k z_k s.t. g_k(v) <= z_k, z >= 0, admits {k : z_k <= eps} with
/// eps = 1e-5 (1 + max z), and deflates by largest z_k until the admitted set is jointly feasible.
/// Rejected users are then re-offered one at a time in ascending z_k and kept when still feasible.
/// Throws conic::SolverFailure when the surrogate cannot be solved.
AdmissionResult user_admission(const AdmissionInstance& instance, const BeamformingOptions& opts = {},
                               BeamformingPrograms* cache = nullptr);

/// Copy of the instance with gamma_k cleared for users outside `users`.
CranInstance restrict_users(const CranInstance& inst, const std::vector<int>& users);

/// Largest jointly feasible user subset by enumeration (K <= ~12); ties resolved lexicographically.
std::vector<int> max_admissible_subset(const CranInstance& inst, const BeamformingOptions& opts = {},
                                       BeamformingPrograms* cache = nullptr);

}  // namespace udnopt::sparse
