#include "udnopt/sparse/beamforming.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace udnopt::sparse {

namespace {

using conic::Cone;

/// Column layout shared by template construction, parameter stuffing and extraction.
struct Layout {
    Eigen::Index extra = 0;      // leading real variables (t, t_a or s_q)
    Eigen::Index total_ant = 0;  // sum of N_l over active RRHs
    Eigen::Index num_beam = 0;   // complex beam entries
    std::vector<Eigen::Index> offset;  // antenna offset of each active RRH

    Layout(const ProgramShape& shape) {
        for (int l : shape.active) {
            offset.push_back(total_ant);
            total_ant += shape.antennas[l];
        }
        num_beam = static_cast<Eigen::Index>(shape.served.size()) * total_ant;
        switch (shape.kind) {
            case ProgramKind::PowerMin: extra = 1; break;
            case ProgramKind::GroupNorm: extra = static_cast<Eigen::Index>(shape.active.size()); break;
            case ProgramKind::Admission: extra = static_cast<Eigen::Index>(shape.served.size()); break;
        }
    }

    Eigen::Index num_vars() const { return extra + 2 * num_beam; }
    Eigen::Index beam(std::size_t q, std::size_t a, Eigen::Index n) const {
        return static_cast<Eigen::Index>(q) * total_ant + offset[a] + n;
    }
    Eigen::Index re(Eigen::Index j) const { return extra + j; }
    Eigen::Index im(Eigen::Index j) const { return extra + num_beam + j; }
    /// Component of the "h"/"gh" parameters for user position q, active RRH a, antenna n.
    std::size_t hidx(std::size_t q, std::size_t a, Eigen::Index n, int part) const {
        return static_cast<std::size_t>(2 * beam(q, a, n) + part);
    }
};

void validate_shape(const ProgramShape& shape) {
    const int L = static_cast<int>(shape.antennas.size());
    for (int l : shape.active)
        if (l < 0 || l >= L) throw std::invalid_argument("beamforming: active RRH index out of range");
    if (shape.active.empty()) throw std::invalid_argument("beamforming: empty active set");
    if (shape.served.empty()) throw std::invalid_argument("beamforming: no served users");
}

}  // namespace

conic::StuffingTemplate BeamformingPrograms::build(const ProgramShape& shape) {
    validate_shape(shape);
    const Layout lay(shape);
    const std::size_t A = shape.active.size();
    const std::size_t U = shape.served.size();
    conic::TemplateBuilder tb(lay.num_vars());
    tb.declare("h", static_cast<std::size_t>(2 * lay.num_beam));
    tb.declare("gh", static_cast<std::size_t>(2 * lay.num_beam));
    tb.declare("sigma", U);
    tb.declare("sqrt_budget", A);

    switch (shape.kind) {
        case ProgramKind::PowerMin: {
            tb.declare("inv_sqrt_eta", A);
            tb.set_c(0, 1.0);
            const auto r = tb.add_cone(Cone::second_order(static_cast<std::size_t>(1 + 2 * lay.num_beam)));
            tb.set_A(r, 0, -1.0);
            for (std::size_t q = 0; q < U; ++q)
                for (std::size_t a = 0; a < A; ++a)
                    for (Eigen::Index n = 0; n < shape.antennas[shape.active[a]]; ++n) {
                        const auto j = lay.beam(q, a, n);
                        tb.slot_A(r + 1 + j, lay.re(j), "inv_sqrt_eta", a, -1.0);
                        tb.slot_A(r + 1 + lay.num_beam + j, lay.im(j), "inv_sqrt_eta", a, -1.0);
                    }
            break;
        }
        case ProgramKind::GroupNorm: {
            tb.declare("weights", A);
            for (std::size_t a = 0; a < A; ++a) {
                const Eigen::Index N = shape.antennas[shape.active[a]];
                tb.slot_c(static_cast<Eigen::Index>(a), "weights", a);
                const auto r = tb.add_cone(Cone::second_order(static_cast<std::size_t>(1 + 2 * U * N)));
                tb.set_A(r, static_cast<Eigen::Index>(a), -1.0);
                Eigen::Index row = r + 1;
                for (std::size_t q = 0; q < U; ++q)
                    for (Eigen::Index n = 0; n < N; ++n) {
                        const auto j = lay.beam(q, a, n);
                        tb.set_A(row++, lay.re(j), -1.0);
                        tb.set_A(row++, lay.im(j), -1.0);
                    }
            }
            break;
        }
        case ProgramKind::Admission: {
            for (std::size_t q = 0; q < U; ++q) tb.set_c(static_cast<Eigen::Index>(q), 1.0);
            const auto r = tb.add_cone(Cone::nonnegative(U));
            for (std::size_t q = 0; q < U; ++q) tb.set_A(r + static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(q), -1.0);
            break;
        }
    }

    // SINR constraints: sqrt(1 + 1/gamma_k) Re(h_k^H v_k) [+ s_k] >= ||(h_k^H V, sigma_k)||.
    for (std::size_t q = 0; q < U; ++q) {
        const auto r = tb.add_cone(Cone::second_order(2 + 2 * U));
        if (shape.kind == ProgramKind::Admission) tb.set_A(r, static_cast<Eigen::Index>(q), -1.0);
        for (std::size_t a = 0; a < A; ++a)
            for (Eigen::Index n = 0; n < shape.antennas[shape.active[a]]; ++n) {
                const auto j = lay.beam(q, a, n);
                // Re(conj(h) v) = hr vr + hi vi
                tb.slot_A(r, lay.re(j), "gh", lay.hidx(q, a, n, 0), -1.0);
                tb.slot_A(r, lay.im(j), "gh", lay.hidx(q, a, n, 1), -1.0);
            }
        for (std::size_t p = 0; p < U; ++p) {
            const Eigen::Index re_row = r + 1 + 2 * static_cast<Eigen::Index>(p);
            const Eigen::Index im_row = re_row + 1;
            for (std::size_t a = 0; a < A; ++a)
                for (Eigen::Index n = 0; n < shape.antennas[shape.active[a]]; ++n) {
                    const auto j = lay.beam(p, a, n);
                    const auto hr = lay.hidx(q, a, n, 0);
                    const auto hi = lay.hidx(q, a, n, 1);
                    tb.slot_A(re_row, lay.re(j), "h", hr, -1.0);
                    tb.slot_A(re_row, lay.im(j), "h", hi, -1.0);
                    // Im(conj(h) v) = hr vi - hi vr
                    tb.slot_A(im_row, lay.re(j), "h", hi, 1.0);
                    tb.slot_A(im_row, lay.im(j), "h", hr, -1.0);
                }
        }
        tb.slot_b(r + 1 + 2 * static_cast<Eigen::Index>(U), "sigma", q);
    }

    // Per-RRH power budgets ||z~_l|| <= sqrt(P_l).
    for (std::size_t a = 0; a < A; ++a) {
        const Eigen::Index N = shape.antennas[shape.active[a]];
        const auto r = tb.add_cone(Cone::second_order(static_cast<std::size_t>(1 + 2 * U * N)));
        tb.slot_b(r, "sqrt_budget", a);
        Eigen::Index row = r + 1;
        for (std::size_t q = 0; q < U; ++q)
            for (Eigen::Index n = 0; n < N; ++n) {
                const auto j = lay.beam(q, a, n);
                tb.set_A(row++, lay.re(j), -1.0);
                tb.set_A(row++, lay.im(j), -1.0);
            }
    }
    return tb.build();
}

conic::ParameterSet BeamformingPrograms::parameters(const CranInstance& inst, const ProgramShape& shape,
                                                    const std::vector<double>& weights) {
    const Layout lay(shape);
    const std::size_t A = shape.active.size();
    const std::size_t U = shape.served.size();
    std::vector<double> h(static_cast<std::size_t>(2 * lay.num_beam));
    std::vector<double> gh(h.size());
    std::vector<double> sigma(U);
    for (std::size_t q = 0; q < U; ++q) {
        const int k = shape.served[q];
        const double gamma = inst.sinr_target[k];
        // Served users without a QoS target only need a valid cone row; gain 1 keeps it harmless.
        const double gain = gamma > 0 ? std::sqrt(1.0 + 1.0 / gamma) : 1.0;
        sigma[q] = std::sqrt(inst.noise_power[k]);
        for (std::size_t a = 0; a < A; ++a) {
            const auto& hk = inst.channels[shape.active[a]][k];
            for (Eigen::Index n = 0; n < hk.size(); ++n) {
                h[lay.hidx(q, a, n, 0)] = hk[n].real();
                h[lay.hidx(q, a, n, 1)] = hk[n].imag();
                gh[lay.hidx(q, a, n, 0)] = gain * hk[n].real();
                gh[lay.hidx(q, a, n, 1)] = gain * hk[n].imag();
            }
        }
    }
    std::vector<double> budget(A);
    for (std::size_t a = 0; a < A; ++a) budget[a] = std::sqrt(inst.power_budget[shape.active[a]]);
    conic::ParameterSet params{{"h", h}, {"gh", gh}, {"sigma", sigma}, {"sqrt_budget", budget}};
    if (shape.kind == ProgramKind::PowerMin) {
        std::vector<double> eta(A);
        for (std::size_t a = 0; a < A; ++a) eta[a] = 1.0 / std::sqrt(inst.efficiency[shape.active[a]]);
        params["inv_sqrt_eta"] = eta;
    } else if (shape.kind == ProgramKind::GroupNorm) {
        if (weights.size() != A) throw std::invalid_argument("beamforming: one weight per active RRH required");
        params["weights"] = weights;
    }
    return params;
}

const conic::StuffingTemplate& BeamformingPrograms::get(const ProgramShape& shape) {
    std::lock_guard lock(mutex_);
    auto& slot = cache_[shape];
    if (!slot) slot = std::make_unique<conic::StuffingTemplate>(build(shape));
    return *slot;
}

std::vector<double> achieved_sinr(const CranInstance& inst, const std::vector<std::vector<Eigen::VectorXcd>>& beams) {
    std::vector<double> out(inst.num_users, 0.0);
    for (int k = 0; k < inst.num_users; ++k) {
        double signal = 0.0;
        double interference = inst.noise_power[k];
        for (int j = 0; j < inst.num_users; ++j) {
            std::complex<double> hv = 0.0;
            for (int l = 0; l < inst.num_rrh; ++l) hv += inst.channels[l][k].dot(beams[l][j]);
            if (j == k) signal = std::norm(hv);
            else interference += std::norm(hv);
        }
        out[k] = signal / interference;
    }
    return out;
}

double network_power(const CranInstance& inst, const BeamformingSolution& sol) {
    if (sol.beams.size() != static_cast<std::size_t>(inst.num_rrh))
        throw std::invalid_argument("network_power: beam table does not match L");
    double total = 0.0;
    for (int l : sol.active) {
        if (l < 0 || l >= inst.num_rrh) throw std::invalid_argument("network_power: active index out of range");
        if (sol.beams[l].size() != static_cast<std::size_t>(inst.num_users))
            throw std::invalid_argument("network_power: beam table does not match K");
        double group = 0.0;
        for (const auto& z : sol.beams[l]) {
            if (z.size() != inst.antennas[l]) throw std::invalid_argument("network_power: beam length != N_l");
            group += z.squaredNorm();
        }
        total += group / inst.efficiency[l] + inst.fronthaul_power[l];
    }
    return total;
}

bool satisfies_constraints(const CranInstance& inst, const std::vector<std::vector<Eigen::VectorXcd>>& beams,
                           const std::vector<int>& served, double tol) {
    for (int k : served) {
        if (inst.sinr_target[k] <= 0) continue;
        std::complex<double> own = 0.0;
        double tail = inst.noise_power[k];
        for (int j = 0; j < inst.num_users; ++j) {
            std::complex<double> hv = 0.0;
            for (int l = 0; l < inst.num_rrh; ++l) hv += inst.channels[l][k].dot(beams[l][j]);
            tail += std::norm(hv);
            if (j == k) own = hv;
        }
        const double slack = std::sqrt(1.0 + 1.0 / inst.sinr_target[k]) * std::abs(own) - std::sqrt(tail);
        if (slack < -tol) return false;
    }
    for (int l = 0; l < inst.num_rrh; ++l) {
        double p = 0.0;
        for (const auto& z : beams[l]) p += z.squaredNorm();
        if (p > inst.power_budget[l] * (1.0 + tol)) return false;
    }
    return true;
}

namespace {

std::vector<std::vector<Eigen::VectorXcd>> zero_beams(const CranInstance& inst) {
    std::vector<std::vector<Eigen::VectorXcd>> beams(inst.num_rrh);
    for (int l = 0; l < inst.num_rrh; ++l)
        beams[l].assign(inst.num_users, Eigen::VectorXcd::Zero(inst.antennas[l]));
    return beams;
}

std::vector<int> users_with_targets(const CranInstance& inst) {
    std::vector<int> served;
    for (int k = 0; k < inst.num_users; ++k)
        if (inst.sinr_target[k] > 0) served.push_back(k);
    return served;
}

double transmit_power_of(const CranInstance& inst, const std::vector<std::vector<Eigen::VectorXcd>>& beams) {
    double p = 0.0;
    for (int l = 0; l < inst.num_rrh; ++l)
        for (const auto& z : beams[l]) p += z.squaredNorm() / inst.efficiency[l];
    return p;
}

}  // namespace

namespace detail {

/// Solves the program for `shape` and unpacks the beams, rotating each user's beam so
/// that h_k^H v_k is real and nonnegative.
struct SolvedBeams {
    conic::ConicSolution conic;
    std::vector<std::vector<Eigen::VectorXcd>> beams;
};

SolvedBeams solve_shape(const CranInstance& inst, const ProgramShape& shape, const std::vector<double>& weights,
                        const BeamformingOptions& opts, BeamformingPrograms* cache) {
    BeamformingPrograms local;
    BeamformingPrograms& programs = cache ? *cache : local;
    const auto& tmpl = programs.get(shape);
    const auto prog = conic::stuff(tmpl, BeamformingPrograms::parameters(inst, shape, weights));
    SolvedBeams out;
    out.conic = conic::admm_solve(prog, opts.admm);
    out.beams = zero_beams(inst);
    if (out.conic.status != conic::SolveStatus::Optimal) return out;
    const Layout lay(shape);
    for (std::size_t q = 0; q < shape.served.size(); ++q)
        for (std::size_t a = 0; a < shape.active.size(); ++a) {
            const int l = shape.active[a];
            auto& z = out.beams[l][shape.served[q]];
            for (Eigen::Index n = 0; n < inst.antennas[l]; ++n) {
                const auto j = lay.beam(q, a, n);
                z[n] = {out.conic.x[lay.re(j)], out.conic.x[lay.im(j)]};
            }
        }
    for (int k : shape.served) {
        std::complex<double> hv = 0.0;
        for (int l : shape.active) hv += inst.channels[l][k].dot(out.beams[l][k]);
        if (std::abs(hv) == 0.0) continue;
        const auto rot = std::conj(hv) / std::abs(hv);
        for (int l : shape.active) out.beams[l][k] *= rot;
    }
    return out;
}

}  // namespace detail

BeamformingSolution socp_power_min(const CranInstance& inst, const std::vector<int>& active,
                                   const BeamformingOptions& opts, BeamformingPrograms* cache) {
    inst.validate();
    if (active.empty()) throw std::invalid_argument("socp_power_min: active set must be nonempty");
    std::vector<int> act = active;
    std::sort(act.begin(), act.end());
    act.erase(std::unique(act.begin(), act.end()), act.end());
    for (int l : act)
        if (l < 0 || l >= inst.num_rrh) throw std::invalid_argument("socp_power_min: RRH index out of range");

    BeamformingSolution sol;
    sol.active = act;
    const auto served = users_with_targets(inst);
    if (served.empty()) {
        sol.feasible = true;
        sol.status = conic::SolveStatus::Optimal;
        sol.beams = zero_beams(inst);
    } else {
        ProgramShape shape{ProgramKind::PowerMin, inst.antennas, act, served};
        auto solved = detail::solve_shape(inst, shape, {}, opts, cache);
        sol.status = solved.conic.status;
        sol.beams = std::move(solved.beams);
        sol.feasible = sol.status == conic::SolveStatus::Optimal &&
                       satisfies_constraints(inst, sol.beams, served, opts.feasibility_tol);
    }
    sol.sinr = achieved_sinr(inst, sol.beams);
    sol.transmit_power = transmit_power_of(inst, sol.beams);
    sol.network_power = network_power(inst, sol);
    return sol;
}

std::vector<double> gsbf_weights(const CranInstance& inst) {
    std::vector<double> w(inst.num_rrh);
    for (int l = 0; l < inst.num_rrh; ++l) {
        double gain = 0.0;
        for (const auto& h : inst.channels[l]) gain += h.squaredNorm();
        w[l] = gain > 0 ? std::sqrt(inst.fronthaul_power[l] * inst.num_users / gain)
                        : std::numeric_limits<double>::infinity();
    }
    return w;
}

GsbfResult group_sparse_beamforming(const CranInstance& inst, const BeamformingOptions& opts,
                                    BeamformingPrograms* cache) {
    inst.validate();
    GsbfResult res;
    const int L = inst.num_rrh;
    std::vector<int> all(L);
    std::iota(all.begin(), all.end(), 0);
    res.weights = gsbf_weights(inst);
    res.group_scores.assign(L, 0.0);

    const auto served = users_with_targets(inst);
    if (inst.num_users == 0 || served.empty()) {
        // Nothing to serve: every RRH can be switched off.
        res.solution.feasible = true;
        res.solution.status = conic::SolveStatus::Optimal;
        res.solution.beams = zero_beams(inst);
        res.solution.sinr = achieved_sinr(inst, res.solution.beams);
        return res;
    }

    // Stage 1: weighted mixed l1/l2 relaxation over RRHs that reach somebody.
    std::vector<int> useful;
    for (int l = 0; l < L; ++l)
        if (std::isfinite(res.weights[l])) useful.push_back(l);
    if (useful.empty()) {
        res.solution.beams = zero_beams(inst);
        res.solution.status = conic::SolveStatus::PrimalInfeasible;
        return res;
    }
    std::vector<double> w;
    for (int l : useful) w.push_back(res.weights[l]);
    ProgramShape shape{ProgramKind::GroupNorm, inst.antennas, useful, served};
    const auto relaxed = detail::solve_shape(inst, shape, w, opts, cache);
    if (relaxed.conic.status != conic::SolveStatus::Optimal) {
        res.solution.beams = zero_beams(inst);
        res.solution.status = relaxed.conic.status;
        return res;
    }
    for (int l = 0; l < L; ++l) {
        double s = 0.0;
        for (const auto& z : relaxed.beams[l]) s += z.squaredNorm();
        res.group_scores[l] = std::sqrt(s);
    }

    // Stage 2: RRHs without any channel first, then ascending group norm.
    res.order = all;
    std::stable_sort(res.order.begin(), res.order.end(), [&](int a, int b) {
        const bool dead_a = !std::isfinite(res.weights[a]);
        const bool dead_b = !std::isfinite(res.weights[b]);
        if (dead_a != dead_b) return dead_a;
        return res.group_scores[a] < res.group_scores[b];
    });

    // Stage 3: greedy switch-off, keeping each deactivation that stays feasible.
    auto best = socp_power_min(inst, all, opts, cache);
    res.all_active_power = best.network_power;
    if (!best.feasible) {
        res.solution = best;
        return res;
    }
    res.candidates.push_back({all, best.network_power});
    std::vector<int> current = all;
    for (int l : res.order) {
        if (current.size() == 1) break;
        std::vector<int> trial;
        std::copy_if(current.begin(), current.end(), std::back_inserter(trial), [l](int x) { return x != l; });
        auto sol = socp_power_min(inst, trial, opts, cache);
        if (!sol.feasible) continue;
        current = trial;
        res.candidates.push_back({trial, sol.network_power});
        if (sol.network_power < best.network_power) best = std::move(sol);
    }
    res.solution = std::move(best);
    return res;
}

ExhaustiveResult exhaustive_network_power(const CranInstance& inst, const BeamformingOptions& opts,
                                          BeamformingPrograms* cache) {
    inst.validate();
    if (inst.num_rrh > 20) throw std::invalid_argument("exhaustive_network_power: L too large");
    ExhaustiveResult best;
    for (unsigned mask = 1; mask < (1u << inst.num_rrh); ++mask) {
        std::vector<int> active;
        for (int l = 0; l < inst.num_rrh; ++l)
            if (mask & (1u << l)) active.push_back(l);
        const auto sol = socp_power_min(inst, active, opts, cache);
        if (!sol.feasible) continue;
        if (!best.feasible || sol.network_power < best.network_power) {
            best.feasible = true;
            best.active = active;
            best.network_power = sol.network_power;
        }
    }
    return best;
}

}  // namespace udnopt::sparse
