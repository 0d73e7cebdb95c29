#include "udnopt/tim/side_info.hpp"

#include "udnopt/parallel.hpp"
#include "udnopt/seed.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace udnopt::tim {

void NetworkTopology::validate() const {
    if (K < 1) throw std::invalid_argument("topology: K must be >= 1");
    for (auto [i, j] : connections) {
        if (i < 0 || i >= K || j < 0 || j >= K) throw std::invalid_argument("topology: connection index out of range");
        if (i == j) throw std::invalid_argument("topology: self pair in the connection set");
    }
    if (!caches.empty()) {
        if (caches.size() != static_cast<std::size_t>(K)) throw std::invalid_argument("topology: need K cache sets");
        for (int k = 0; k < K; ++k)
            for (int j : caches[k]) {
                if (j < 0 || j >= K) throw std::invalid_argument("topology: cached message out of range");
                if (j == k) throw std::invalid_argument("topology: receiver caches its own message");
            }
    }
}

NetworkTopology read_topology(std::istream& in) {
    NetworkTopology topo;
    bool have_k = false;
    int lineno = 0;
    auto index = [&](std::istringstream& ss) {
        long v = 0;
        if (!(ss >> v)) throw std::invalid_argument("topology line " + std::to_string(lineno) + ": expected an index");
        if (v < 1 || v > topo.K)
            throw std::invalid_argument("topology line " + std::to_string(lineno) + ": index out of range");
        return static_cast<int>(v - 1);
    };
    for (std::string line; std::getline(in, line);) {
        ++lineno;
        line = line.substr(0, line.find('#'));
        std::istringstream ss(line);
        std::string head;
        if (!(ss >> head)) continue;
        if (!have_k) {
            std::size_t used = 0;
            long k = 0;
            try {
                k = std::stol(head, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != head.size() || k < 1 || k > 100000)
                throw std::invalid_argument("topology: first line must be the user count K");
            topo.K = static_cast<int>(k);
            have_k = true;
        } else if (head == "conn") {
            const int i = index(ss);
            const int j = index(ss);
            topo.connections.emplace(i, j);
        } else if (head == "cache") {
            if (topo.caches.empty()) topo.caches.resize(topo.K);
            const int k = index(ss);
            while (ss >> std::ws && !ss.eof()) topo.caches[k].insert(index(ss));
            continue;
        } else {
            throw std::invalid_argument("topology line " + std::to_string(lineno) + ": unknown keyword '" + head + "'");
        }
        if (std::string extra; ss >> extra)
            throw std::invalid_argument("topology line " + std::to_string(lineno) + ": trailing tokens");
    }
    if (!have_k) throw std::invalid_argument("topology: empty input");
    topo.validate();
    return topo;
}

void write_topology(std::ostream& out, const NetworkTopology& topo) {
    topo.validate();
    out << topo.K << '\n';
    for (auto [i, j] : topo.connections) out << "conn " << i + 1 << ' ' << j + 1 << '\n';
    for (std::size_t k = 0; k < topo.caches.size(); ++k) {
        if (topo.caches[k].empty()) continue;
        out << "cache " << k + 1;
        for (int j : topo.caches[k]) out << ' ' << j + 1;
        out << '\n';
    }
}

SideInfoMask::SideInfoMask(int K, const std::set<std::pair<int, int>>& fixed_zeros) : K_(K), zeros_(fixed_zeros) {
    if (K < 1) throw std::invalid_argument("mask: K must be >= 1");
    for (auto [i, j] : zeros_)
        if (i < 0 || i >= K || j < 0 || j >= K || i == j)
            throw std::invalid_argument("mask: fixed zeros must be off-diagonal and in range");
}

EntryState SideInfoMask::state(int i, int j) const {
    if (i < 0 || i >= K_ || j < 0 || j >= K_) throw std::out_of_range("mask: entry out of range");
    if (i == j) return EntryState::FixedOne;
    return zeros_.count({i, j}) ? EntryState::FixedZero : EntryState::Free;
}

SideInfoMask build_mask(const NetworkTopology& topo) {
    topo.validate();
    std::set<std::pair<int, int>> zeros;
    for (auto [i, j] : topo.connections) {
        const bool cached = !topo.caches.empty() && topo.caches[i].count(j);
        if (!cached) zeros.emplace(i, j);
    }
    return {topo.K, zeros};
}

manifold::MaskedLeastSquares masked_cost(const SideInfoMask& mask) {
    std::vector<manifold::MaskEntry> entries;
    for (int i = 0; i < mask.size(); ++i) entries.push_back({i, i, 1.0});
    for (auto [i, j] : mask.fixed_zeros()) entries.push_back({i, j, 0.0});
    return {mask.size(), mask.size(), std::move(entries)};
}

double max_violation(const SideInfoMask& mask, const Eigen::MatrixXd& M) {
    if (M.rows() != mask.size() || M.cols() != mask.size()) throw std::invalid_argument("max_violation: shape mismatch");
    double v = 0.0;
    for (int i = 0; i < mask.size(); ++i) v = std::max(v, std::abs(M(i, i) - 1.0));
    for (auto [i, j] : mask.fixed_zeros()) v = std::max(v, std::abs(M(i, j)));
    return v;
}

RankAttempt complete_at_rank(const SideInfoMask& mask, int r, const CompletionOptions& opts,
                             Eigen::MatrixXd* completion) {
    const int K = mask.size();
    if (r < 1 || r > K) throw std::invalid_argument("complete_at_rank: rank must lie in [1, K]");
    if (opts.restarts < 1) throw std::invalid_argument("complete_at_rank: need at least one restart");
    RankAttempt att;
    att.rank = r;
    if (r == 1) {
        att.analytic = true;
        att.feasible = mask.fixed_zeros().empty();
        att.best_objective = att.feasible ? 0.0 : std::numeric_limits<double>::infinity();
        if (completion) *completion = att.feasible ? Eigen::MatrixXd::Ones(K, K) : Eigen::MatrixXd();
        return att;
    }

    const auto cost = masked_cost(mask);
    auto sopts = opts.solver_options;
    sopts.cost_tolerance = opts.eps_feas;
    struct Outcome {
        double f = std::numeric_limits<double>::infinity();
        bool failed = false;
        bool reached = false;    // f <= eps_feas after the main run
        bool certified = false;
        Eigen::MatrixXd M;
    };
    auto run = [&](const manifold::FixedRankPoint& X0, const manifold::SolverOptions& o) {
        return opts.solver == SolverKind::Rtr ? manifold::rtr_solve(cost, X0, o) : manifold::rcg_solve(cost, X0, o);
    };
    auto polish = sopts;
    polish.cost_tolerance = opts.certify_tolerance;
    polish.gradient_tolerance = 0.0;
    polish.max_iterations = opts.certify_iterations;
    std::vector<Outcome> out(opts.restarts);
    parallel_for(out.size(), opts.threads, [&](std::size_t k) {
        try {
            const auto X0 = manifold::initial_point(cost, r, derive_seed(opts.seed, {static_cast<std::uint64_t>(r), k}));
            auto trace = run(X0, sopts);
            out[k].f = trace.final_objective();
            out[k].failed = trace.reason == manifold::Termination::RankCollapse;
            out[k].reached = out[k].f <= opts.eps_feas;
            if (out[k].reached) {
                trace = run(*trace.final_point, polish);
                out[k].certified = trace.final_objective() <= opts.certify_tolerance;
            }
            out[k].M = trace.final_point->dense();
        } catch (const std::exception&) {
            out[k].failed = true;
        }
    });
    att.restarts_run = opts.restarts;
    std::size_t chosen = out.size();
    std::size_t best = 0;
    for (std::size_t k = 0; k < out.size(); ++k) {
        att.solver_failures += out[k].failed;
        att.uncertified += out[k].reached && !out[k].certified;
        if (out[k].f < out[best].f) best = k;
        if (chosen == out.size() && out[k].certified) chosen = k;
    }
    att.best_objective = out[best].f;
    att.feasible = chosen != out.size();
    if (att.feasible) att.best_objective = std::min(att.best_objective, out[chosen].f);
    if (completion) *completion = out[att.feasible ? chosen : best].M;
    return att;
}

CompletionResult min_rank_complete(const SideInfoMask& mask, const CompletionOptions& opts) {
    const int K = mask.size();
    const int r_max = opts.r_max > 0 ? std::min(opts.r_max, K) : K;
    CompletionResult res;
    for (int r = 1; r <= r_max; ++r) {
        res.attempts.push_back(complete_at_rank(mask, r, opts, &res.M));
        res.rank = r;
        if (res.attempts.back().feasible) {
            res.success = true;
            break;
        }
    }
    res.heuristic = !(res.success && res.rank == 1);
    res.residual = std::numeric_limits<double>::infinity();
    if (res.M.size()) {
        res.residual = 0.0;
        const auto cost = masked_cost(mask);
        for (const auto& e : cost.entries()) res.residual += std::pow(res.M(e.row, e.col) - e.target, 2);
    }
    res.dof = dof(res.rank);
    return res;
}

NuclearNormResult nuclear_norm_complete(const SideInfoMask& mask, const NuclearNormOptions& opts) {
    const int K = mask.size();
    if (!(opts.rho > 0) || opts.max_iterations < 1) throw std::invalid_argument("nuclear_norm_complete: bad options");
    auto impose = [&](Eigen::MatrixXd& Z) {
        for (int i = 0; i < K; ++i) Z(i, i) = 1.0;
        for (auto [i, j] : mask.fixed_zeros()) Z(i, j) = 0.0;
    };
    Eigen::MatrixXd Z = Eigen::MatrixXd::Identity(K, K);
    Eigen::MatrixXd Lam = Eigen::MatrixXd::Zero(K, K);
    Eigen::MatrixXd X = Z;
    NuclearNormResult res;
    for (int it = 1; it <= opts.max_iterations; ++it) {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(Z - Lam, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const Eigen::VectorXd s = (svd.singularValues().array() - 1.0 / opts.rho).max(0.0);
        X = svd.matrixU() * s.asDiagonal() * svd.matrixV().transpose();
        const Eigen::MatrixXd Zprev = Z;
        Z = X + Lam;
        impose(Z);
        Lam += X - Z;
        res.iterations = it;
        const double scale = std::max(1.0, X.norm());
        if ((X - Z).norm() <= opts.tolerance * scale && opts.rho * (Z - Zprev).norm() <= opts.tolerance * scale) {
            res.status = NuclearStatus::Converged;
            break;
        }
    }
    auto& c = res.completion;
    c.M = X;
    const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXd>(X).singularValues();
    c.rank = 0;
    for (Eigen::Index k = 0; k < sv.size(); ++k)
        if (sv(k) > opts.rank_threshold * sv(0)) ++c.rank;
    c.rank = std::max(c.rank, 1);
    const auto cost = masked_cost(mask);
    for (const auto& e : cost.entries()) c.residual += std::pow(X(e.row, e.col) - e.target, 2);
    c.success = c.residual <= opts.eps_feas;
    c.dof = dof(c.rank);
    return res;
}

PrecoderDecoderSet extract_precoders(const Eigen::MatrixXd& M, int r) {
    if (M.rows() != M.cols() || M.size() == 0) throw std::invalid_argument("extract_precoders: M must be square");
    if (r < 1 || r > M.rows()) throw std::invalid_argument("extract_precoders: rank out of range");
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& s = svd.singularValues();
    if (r < s.size() && s(r) > 1e-6 * s(0))
        throw std::invalid_argument("extract_precoders: numerical rank exceeds r");
    const Eigen::VectorXd root = s.head(r).cwiseSqrt();
    PrecoderDecoderSet set;
    set.n = r;
    set.decoders = (svd.matrixU().leftCols(r) * root.asDiagonal()).transpose();
    set.precoders = (svd.matrixV().leftCols(r) * root.asDiagonal()).transpose();
    return set;
}

double dof(int rank) {
    if (rank < 1) throw std::invalid_argument("dof: rank must be >= 1");
    return 1.0 / rank;
}

void write_mask_csv(std::ostream& out, const SideInfoMask& mask) {
    for (int i = 0; i < mask.size(); ++i) {
        for (int j = 0; j < mask.size(); ++j) {
            const auto s = mask.state(i, j);
            out << (j ? "," : "") << (s == EntryState::FixedOne ? "1" : s == EntryState::FixedZero ? "0" : "*");
        }
        out << '\n';
    }
}

void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& M) {
    const auto flags = out.flags();
    const auto prec = out.precision();
    out << std::setprecision(17);
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        for (Eigen::Index j = 0; j < M.cols(); ++j) out << (j ? "," : "") << M(i, j);
        out << '\n';
    }
    out.flags(flags);
    out.precision(prec);
}

}  // namespace udnopt::tim
