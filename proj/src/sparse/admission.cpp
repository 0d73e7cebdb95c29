#include "udnopt/sparse/admission.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <stdexcept>

namespace udnopt::sparse {

CranInstance restrict_users(const CranInstance& inst, const std::vector<int>& users) {
    CranInstance out = inst;
    std::vector<bool> keep(inst.num_users, false);
    for (int k : users) {
        if (k < 0 || k >= inst.num_users) throw std::invalid_argument("restrict_users: user index out of range");
        keep[k] = true;
    }
    for (int k = 0; k < inst.num_users; ++k)
        if (!keep[k]) out.sinr_target[k] = 0.0;
    return out;
}

namespace {

std::vector<int> all_rrhs(const CranInstance& inst) {
    std::vector<int> all(inst.num_rrh);
    std::iota(all.begin(), all.end(), 0);
    return all;
}

}  // namespace

AdmissionResult user_admission(const AdmissionInstance& instance, const BeamformingOptions& opts,
                               BeamformingPrograms* cache) {
    const CranInstance& inst = instance.network;
    inst.validate();
    if (inst.num_rrh == 0) throw std::invalid_argument("user_admission: need at least one RRH");
    AdmissionResult res;
    res.slack.assign(inst.num_users, 0.0);
    std::vector<int> constrained;
    for (int k = 0; k < inst.num_users; ++k)
        if (inst.sinr_target[k] > 0) constrained.push_back(k);

    if (!constrained.empty()) {
        BeamformingPrograms local;
        BeamformingPrograms& programs = cache ? *cache : local;
        ProgramShape shape{ProgramKind::Admission, inst.antennas, all_rrhs(inst), constrained};
        const auto prog = conic::stuff(programs.get(shape), BeamformingPrograms::parameters(inst, shape));
        const auto sol = conic::admm_solve(prog, opts.admm);
        if (sol.status != conic::SolveStatus::Optimal)
            throw conic::SolverFailure("user_admission: l1 surrogate not solved (" +
                                       std::string(conic::to_string(sol.status)) + ")");
        for (std::size_t q = 0; q < constrained.size(); ++q)
            res.slack[constrained[q]] = std::max(0.0, sol.x[static_cast<Eigen::Index>(q)]);
    }
    const double zmax = res.slack.empty() ? 0.0 : *std::max_element(res.slack.begin(), res.slack.end());
    res.threshold = 1e-5 * (1.0 + zmax);
    for (int k = 0; k < inst.num_users; ++k)
        if (res.slack[k] <= res.threshold) res.admitted.push_back(k);

    for (;;) {
        res.certificate = socp_power_min(restrict_users(inst, res.admitted), all_rrhs(inst), opts, cache);
        if (res.certificate.feasible) break;
        // Drop the constrained admitted user with the largest slack (lowest index on ties).
        int worst = -1;
        for (int k : res.admitted)
            if (inst.sinr_target[k] > 0 && (worst < 0 || res.slack[k] > res.slack[worst])) worst = k;
        if (worst < 0) break;
        res.removed.push_back(worst);
        res.admitted.erase(std::find(res.admitted.begin(), res.admitted.end(), worst));
    }
    if (!res.certificate.feasible) return res;

    // The l1 surrogate can spread slack over users that would fit together (symmetric
    // conflicts); offer the rejected users back in ascending slack order.
    std::vector<int> rejected;
    for (int k = 0; k < inst.num_users; ++k)
        if (std::find(res.admitted.begin(), res.admitted.end(), k) == res.admitted.end()) rejected.push_back(k);
    std::stable_sort(rejected.begin(), rejected.end(), [&](int a, int b) { return res.slack[a] < res.slack[b]; });
    for (int k : rejected) {
        auto trial = res.admitted;
        trial.insert(std::upper_bound(trial.begin(), trial.end(), k), k);
        auto sol = socp_power_min(restrict_users(inst, trial), all_rrhs(inst), opts, cache);
        if (!sol.feasible) continue;
        res.admitted = std::move(trial);
        res.certificate = std::move(sol);
        res.added.push_back(k);
    }
    return res;
}

std::vector<int> max_admissible_subset(const CranInstance& inst, const BeamformingOptions& opts,
                                       BeamformingPrograms* cache) {
    inst.validate();
    if (inst.num_users > 16) throw std::invalid_argument("max_admissible_subset: K too large");
    const auto rrhs = all_rrhs(inst);
    std::vector<int> best;
    bool found = false;
    const unsigned full = 1u << inst.num_users;
    for (int size = inst.num_users; size >= 0 && !found; --size) {
        for (unsigned mask = 0; mask < full; ++mask) {
            if (std::popcount(mask) != size) continue;
            std::vector<int> users;
            for (int k = 0; k < inst.num_users; ++k)
                if (mask & (1u << k)) users.push_back(k);
            if (socp_power_min(restrict_users(inst, users), rrhs, opts, cache).feasible) {
                if (!found || users < best) best = users;
                found = true;
            }
        }
    }
    return best;
}

}  // namespace udnopt::sparse
