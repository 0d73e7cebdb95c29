#include "udnopt/harness/experiments.hpp"

#include "udnopt/conic/admm.hpp"
#include "udnopt/detect/activity.hpp"
#include "udnopt/parallel.hpp"
#include "udnopt/seed.hpp"
#include "udnopt/sparse/admission.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>

#ifndef UDNOPT_VERSION
#define UDNOPT_VERSION "unknown"
#endif

namespace udnopt::harness {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
}

std::uint64_t u64(long long v) { return static_cast<std::uint64_t>(v); }

std::string join(const std::vector<int>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + std::to_string(v[i]);
    return s;
}

/// Restores stream formatting on scope exit.
class Precision {
public:
    explicit Precision(std::ostream& out) : out_(out), flags_(out.flags()), prec_(out.precision()) {
        out_ << std::setprecision(17);
    }
    ~Precision() {
        out_.flags(flags_);
        out_.precision(prec_);
    }

private:
    std::ostream& out_;
    std::ios::fmtflags flags_;
    std::streamsize prec_;
};

Heatmap empty_grid(std::string a1, std::string a2, std::vector<int> axis1, std::vector<int> axis2) {
    Heatmap g;
    g.axis1_name = std::move(a1);
    g.axis2_name = std::move(a2);
    g.axis1 = std::move(axis1);
    g.axis2 = std::move(axis2);
    for (int x : g.axis1)
        for (int y : g.axis2) g.cells.push_back({x, y, 0, 0});
    return g;
}

}  // namespace

std::vector<int> stepped_range(int first, int step, int last) {
    require(step >= 1, "range step must be >= 1");
    require(first <= last, "range is empty");
    std::vector<int> v{first};
    for (int x = (first / step + 1) * step; x < last; x += step) v.push_back(x);
    if (v.back() != last) v.push_back(last);
    return v;
}

std::set<std::pair<int, int>> sample_off_diagonal(int rows, int cols, int count, std::uint64_t seed) {
    std::vector<std::pair<int, int>> off;
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j)
            if (i != j) off.emplace_back(i, j);
    require(count >= 0 && count <= static_cast<int>(off.size()), "more off-diagonal positions requested than exist");
    std::mt19937_64 rng(seed);
    // Partial Fisher-Yates: the first `count` slots are a uniform sample.
    for (int k = 0; k < count; ++k) {
        std::uniform_int_distribution<std::size_t> pick(k, off.size() - 1);
        std::swap(off[k], off[pick(rng)]);
    }
    return {off.begin(), off.begin() + count};
}

nlohmann::json base_metadata(const std::string& kind) {
    return {{"tool", "udnopt"}, {"version", UDNOPT_VERSION}, {"experiment", kind}};
}

Heatmap run_sparse_phase_transition(const SparsePtConfig& cfg) {
    require(cfg.n >= 1 && cfg.m >= 1, "n and m must be >= 1");
    require(cfg.k_min >= 0 && cfg.k_min <= cfg.k_max && cfg.k_max <= cfg.n, "need 0 <= k-min <= k-max <= n");
    require(cfg.trials >= 1, "trials must be >= 1");
    require(cfg.success_tol > 0, "success tolerance must be positive");
    const int l_min = cfg.l_min > 0 ? cfg.l_min : cfg.l_step;
    const int l_max = cfg.l_max > 0 ? cfg.l_max : cfg.n;
    require(l_min >= 1, "pilot lengths must be >= 1");
    std::vector<int> ks;
    for (int k = cfg.k_min; k <= cfg.k_max; ++k) ks.push_back(k);
    auto grid = empty_grid("K", "L", ks, stepped_range(l_min, cfg.l_step, l_max));

    const std::size_t T = cfg.trials;
    std::vector<char> ok(grid.cells.size() * T, 0), failed(grid.cells.size() * T, 0);
    // Cells near the transition can need far more ADMM iterations than the default cap.
    const detect::BasisPursuitOptions bp = [] {
        detect::BasisPursuitOptions o;
        o.admm.max_iterations = 400000;
        return o;
    }();
    parallel_for(ok.size(), cfg.threads, [&](std::size_t job) {
        const auto& cell = grid.cells[job / T];
        const auto t = job % T;
        const auto inst = detect::generate_instance(cfg.n, cfg.m, cell.axis1, cell.axis2, 0.0,
                                                    derive_seed(cfg.seed, {u64(cell.axis1), u64(cell.axis2), t}));
        try {
            const auto est = detect::basis_pursuit_group(inst.Y, inst.Q, bp);
            ok[job] = detect::recovery_success(est.theta, inst, cfg.success_tol);
        } catch (const conic::SolverFailure&) {
            failed[job] = 1;
        }
    });
    int failures = 0;
    for (std::size_t c = 0; c < grid.cells.size(); ++c) {
        grid.cells[c].trials = cfg.trials;
        for (std::size_t t = 0; t < T; ++t) {
            grid.cells[c].successes += ok[c * T + t];
            failures += failed[c * T + t];
        }
    }
    grid.metadata = base_metadata("sparse-pt");
    grid.metadata["axes"] = {{"axis1", "K (active devices)"}, {"axis2", "L (pilot length)"}};
    grid.metadata["parameters"] = {{"N", cfg.n}, {"M", cfg.m}, {"K", ks}, {"L", grid.axis2}, {"noise_sd", 0.0}};
    grid.metadata["criterion"] =
        "basis pursuit (min sum of column norms s.t. Theta Q = Y); success iff the top-K support equals the true "
        "support and ||Theta_hat - Theta||_F / ||Theta||_F <= success_tol (K = 0: ||Theta_hat||_F <= success_tol)";
    grid.metadata["tolerances"] = {{"success_tol", cfg.success_tol},
                                   {"admm_eps_abs", bp.admm.eps_abs},
                                   {"admm_eps_rel", bp.admm.eps_rel},
                                   {"admm_max_iterations", bp.admm.max_iterations}};
    grid.metadata["seeds"] = {{"base", cfg.seed}, {"per_trial", "derive_seed(base, {K, L, trial})"}};
    grid.metadata["trials_per_cell"] = cfg.trials;
    grid.metadata["solver_failures"] = failures;
    return grid;
}

NmseCurve run_nmse_curve(const NmseConfig& cfg) {
    require(cfg.n >= 1 && cfg.m >= 1, "n and m must be >= 1");
    require(cfg.k >= 1 && cfg.k <= cfg.n, "need 1 <= k <= n");
    require(cfg.noise_sd >= 0 && std::isfinite(cfg.noise_sd), "noise sd must be finite and >= 0");
    require(cfg.trials >= 1, "trials must be >= 1");
    require(cfg.lambda_scale >= 0, "lambda scale must be >= 0");
    const int l_min = cfg.l_min > 0 ? cfg.l_min : cfg.l_step;
    const int l_max = cfg.l_max > 0 ? cfg.l_max : cfg.n;
    require(l_min >= 1, "pilot lengths must be >= 1");
    const auto ls = stepped_range(l_min, cfg.l_step, l_max);
    const double lambda = detect::default_lambda(cfg.noise_sd, cfg.m, cfg.n, cfg.lambda_scale);

    const std::size_t T = cfg.trials;
    std::vector<double> err(ls.size() * T);
    std::vector<char> unconverged(err.size(), 0);
    parallel_for(err.size(), cfg.threads, [&](std::size_t job) {
        const int L = ls[job / T];
        const auto t = job % T;
        const auto inst = detect::generate_instance(cfg.n, cfg.m, cfg.k, L, cfg.noise_sd,
                                                    derive_seed(cfg.seed, {u64(cfg.k), u64(L), t}));
        const auto est = detect::group_lasso_solve(inst.Y, inst.Q, lambda);
        err[job] = detect::nmse(est.theta, inst.theta);
        unconverged[job] = !est.converged;
    });
    NmseCurve curve;
    for (std::size_t i = 0; i < ls.size(); ++i) {
        NmsePoint p;
        p.l = ls[i];
        p.trials = cfg.trials;
        double sum = 0.0;
        for (std::size_t t = 0; t < T; ++t) {
            sum += err[i * T + t];
            p.unconverged += unconverged[i * T + t];
        }
        p.mean = sum / T;
        if (T > 1) {
            double ss = 0.0;
            for (std::size_t t = 0; t < T; ++t) ss += std::pow(err[i * T + t] - p.mean, 2);
            p.standard_error = std::sqrt(ss / (T - 1) / T);
        }
        curve.points.push_back(p);
    }
    curve.metadata = base_metadata("nmse");
    curve.metadata["parameters"] = {{"N", cfg.n}, {"M", cfg.m}, {"K", cfg.k}, {"L", ls}, {"noise_sd", cfg.noise_sd}};
    curve.metadata["criterion"] =
        "group lasso (penalized) estimate; NMSE = ||Theta_hat - Theta||_F^2 / ||Theta||_F^2; mean and standard "
        "error (sample sd / sqrt(trials)) per L";
    curve.metadata["tolerances"] = {{"lambda", lambda},
                                    {"lambda_rule", "c * noise_sd * sqrt(M log N)"},
                                    {"lambda_scale", cfg.lambda_scale},
                                    {"objective_tolerance", detect::GroupLassoOptions{}.objective_tolerance},
                                    {"kkt_tolerance", detect::GroupLassoOptions{}.kkt_tolerance}};
    curve.metadata["seeds"] = {{"base", cfg.seed}, {"per_trial", "derive_seed(base, {K, L, trial})"}};
    curve.metadata["trials_per_point"] = cfg.trials;
    return curve;
}

Heatmap run_tim_phase_transition(const TimPtConfig& cfg) {
    require(cfg.k >= 1, "k must be >= 1");
    require(cfg.trials >= 1, "trials must be >= 1");
    require(cfg.completion.restarts >= 1, "restarts must be >= 1");
    require(cfg.completion.eps_feas >= 0, "eps_feas must be >= 0");
    std::vector<int> ranks = cfg.ranks;
    if (ranks.empty())
        for (int r = 1; r <= std::min(10, cfg.k); ++r) ranks.push_back(r);
    std::sort(ranks.begin(), ranks.end());
    ranks.erase(std::unique(ranks.begin(), ranks.end()), ranks.end());
    for (int r : ranks) require(r >= 1 && r <= cfg.k, "ranks must lie in 1..k");
    const int s_max = cfg.s_max >= 0 ? cfg.s_max : cfg.k * (cfg.k - 1);
    require(s_max <= cfg.k * (cfg.k - 1), "|S| cannot exceed k (k - 1)");
    auto grid = empty_grid("r", "S", ranks, stepped_range(0, cfg.s_step, s_max));

    const std::size_t T = cfg.trials;
    std::vector<char> ok(grid.cells.size() * T, 0);
    std::vector<int> uncertified(ok.size(), 0), failures(ok.size(), 0);
    parallel_for(ok.size(), cfg.threads, [&](std::size_t job) {
        const auto& cell = grid.cells[job / T];
        const auto t = job % T;
        // The mask depends on (|S|, trial) only, so every rank sees the same masks.
        const tim::SideInfoMask mask(cfg.k, sample_off_diagonal(cfg.k, cfg.k, cell.axis2,
                                                                derive_seed(cfg.seed, {u64(cell.axis2), t})));
        auto opts = cfg.completion;
        opts.seed = derive_seed(cfg.seed, {u64(cell.axis1), u64(cell.axis2), t});
        opts.threads = 1;
        const auto att = tim::complete_at_rank(mask, cell.axis1, opts);
        ok[job] = att.feasible;
        uncertified[job] = att.uncertified;
        failures[job] = att.solver_failures;
    });
    int total_uncertified = 0, total_failures = 0;
    for (std::size_t c = 0; c < grid.cells.size(); ++c) {
        grid.cells[c].trials = cfg.trials;
        for (std::size_t t = 0; t < T; ++t) {
            grid.cells[c].successes += ok[c * T + t];
            total_uncertified += uncertified[c * T + t];
            total_failures += failures[c * T + t];
        }
    }
    const auto& co = cfg.completion;
    const auto& so = co.solver_options;
    grid.metadata = base_metadata("tim-pt");
    grid.metadata["axes"] = {{"axis1", "r (rank)"}, {"axis2", "|S| (forced-zero off-diagonal entries)"}};
    grid.metadata["parameters"] = {{"K", cfg.k}, {"ranks", ranks}, {"S", grid.axis2}};
    grid.metadata["criterion"] =
        "fixed-rank completion at rank r with restarts; a restart succeeds iff its cost reaches eps_feas and, "
        "after further polishing, certify_tolerance; rank 1 decided exactly (feasible iff S is empty)";
    grid.metadata["tolerances"] = {{"eps_feas", co.eps_feas},
                                   {"certify_tolerance", co.certify_tolerance},
                                   {"certify_iterations", co.certify_iterations},
                                   {"max_iterations", so.max_iterations},
                                   {"gradient_tolerance", so.gradient_tolerance},
                                   {"max_inner_iterations", so.max_inner_iterations},
                                   {"stall_window", so.stall_window},
                                   {"stall_ratio", so.stall_ratio}};
    grid.metadata["solver"] = co.solver == tim::SolverKind::Rtr ? "rtr" : "rcg";
    grid.metadata["restarts"] = co.restarts;
    grid.metadata["seeds"] = {{"base", cfg.seed},
                              {"mask", "derive_seed(base, {|S|, trial})"},
                              {"restarts", "derive_seed(derive_seed(base, {r, |S|, trial}), {r, restart})"}};
    grid.metadata["trials_per_cell"] = cfg.trials;
    grid.metadata["uncertified_restarts"] = total_uncertified;
    grid.metadata["solver_failures"] = total_failures;
    return grid;
}

const char* to_string(SolverName s) {
    switch (s) {
        case SolverName::Rcg: return "rcg";
        case SolverName::Rtr: return "rtr";
        case SolverName::Altmin: return "altmin";
    }
    return "?";
}

SolverName parse_solver(const std::string& name) {
    if (name == "rcg") return SolverName::Rcg;
    if (name == "rtr") return SolverName::Rtr;
    if (name == "altmin") return SolverName::Altmin;
    throw ConfigError("unknown solver '" + name + "' (expected rcg, rtr or altmin)");
}

ConvergeResult run_convergence_comparison(const ConvergeConfig& cfg) {
    require(cfg.p >= 1 && cfg.q >= 1, "p and q must be >= 1");
    require(cfg.rank >= 1 && cfg.rank <= std::min(cfg.p, cfg.q), "rank must lie in 1..min(p, q)");
    require(cfg.omega >= 0 && static_cast<long long>(cfg.omega) <=
                                  static_cast<long long>(cfg.p) * cfg.q - std::min(cfg.p, cfg.q),
            "omega exceeds the number of off-diagonal positions");
    require(!cfg.solvers.empty(), "no solvers selected");
    require(cfg.trials >= 1, "trials must be >= 1");
    require(cfg.max_iterations >= 0, "max iterations must be >= 0");

    const std::size_t S = cfg.solvers.size();
    ConvergeResult res;
    res.runs.resize(cfg.trials * S);
    parallel_for(res.runs.size(), cfg.threads, [&](std::size_t job) {
        auto& run = res.runs[job];
        run.trial = static_cast<int>(job / S);
        run.solver = cfg.solvers[job % S];
        run.instance_seed = derive_seed(cfg.seed, {u64(run.trial)});
        std::vector<manifold::MaskEntry> entries;
        for (int i = 0; i < std::min(cfg.p, cfg.q); ++i) entries.push_back({i, i, 1.0});
        for (auto [i, j] : sample_off_diagonal(cfg.p, cfg.q, cfg.omega, run.instance_seed))
            entries.push_back({i, j, 0.0});
        const manifold::MaskedLeastSquares cost(cfg.p, cfg.q, std::move(entries));
        const auto X0 = manifold::initial_point(cost, cfg.rank, derive_seed(run.instance_seed, {1}));
        manifold::SolverOptions o;
        o.max_iterations = cfg.max_iterations;
        o.gradient_tolerance = 1e-14;
        o.cost_tolerance = cfg.target;
        const auto start = std::chrono::steady_clock::now();
        try {
            switch (run.solver) {
                case SolverName::Rcg: run.trace = manifold::rcg_solve(cost, X0, o); break;
                case SolverName::Rtr: run.trace = manifold::rtr_solve(cost, X0, o); break;
                case SolverName::Altmin: run.trace = manifold::altmin_solve(cost, X0, o); break;
            }
            run.iterations_to_target = run.trace.iterations_to(cfg.target);
        } catch (const std::exception& e) {
            run.error = e.what();
        }
        run.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    });
    std::vector<std::string> names;
    for (auto s : cfg.solvers) names.emplace_back(to_string(s));
    res.metadata = base_metadata("converge");
    res.metadata["parameters"] = {{"p", cfg.p}, {"q", cfg.q}, {"rank", cfg.rank}, {"omega", cfg.omega},
                                  {"solvers", names}};
    res.metadata["criterion"] =
        "f(M) = sum_i (M_ii - 1)^2 + sum_{(i,j) in Omega} M_ij^2 over rank-r matrices; all solvers start from the "
        "same point; iterations_to_target is the first iteration with f <= target";
    res.metadata["tolerances"] = {{"target", cfg.target},
                                  {"max_iterations", cfg.max_iterations},
                                  {"gradient_tolerance", 1e-14}};
    res.metadata["seeds"] = {{"base", cfg.seed},
                             {"instance", "derive_seed(base, {trial})"},
                             {"initial_point", "derive_seed(instance, {1})"}};
    res.metadata["trials"] = cfg.trials;
    return res;
}

GsbfDemoResult run_gsbf_demo(const GsbfDemoConfig& cfg) {
    require(cfg.trials >= 1, "trials must be >= 1");
    if (cfg.instance) {
        require(cfg.trials == 1, "an instance file allows a single trial");
        cfg.instance->validate();
    } else {
        require(cfg.num_rrh >= 1 && cfg.num_users >= 0, "need L >= 1 and K >= 0");
    }
    GsbfDemoResult res;
    res.rows.resize(cfg.trials);
    sparse::BeamformingPrograms cache;
    parallel_for(res.rows.size(), cfg.threads, [&](std::size_t t) {
        auto& row = res.rows[t];
        row.trial = static_cast<int>(t);
        row.instance_seed = cfg.instance ? 0 : derive_seed(cfg.seed, {t});
        const auto inst = cfg.instance ? *cfg.instance
                                       : sparse::random_cran_instance(cfg.num_rrh, cfg.num_users, row.instance_seed,
                                                                      cfg.generator);
        const auto g = sparse::group_sparse_beamforming(inst, {}, &cache);
        row.feasible = g.solution.feasible;
        row.active = g.solution.active;
        row.network_power = g.solution.network_power;
        row.all_active_power = g.all_active_power;
        if (inst.num_rrh <= cfg.oracle_max_rrh) {
            const auto ex = sparse::exhaustive_network_power(inst, {}, &cache);
            if (ex.feasible) {
                row.oracle_power = ex.network_power;
                if (row.feasible) row.gap = (row.network_power - ex.network_power) / ex.network_power;
            }
        }
    });
    std::vector<double> gaps;
    for (const auto& r : res.rows)
        if (r.gap) gaps.push_back(*r.gap);
    res.metadata = base_metadata("gsbf");
    const auto& g = cfg.generator;
    res.metadata["parameters"] =
        cfg.instance ? nlohmann::json{{"instance", "file"}, {"L", cfg.instance->num_rrh}, {"K", cfg.instance->num_users}}
                     : nlohmann::json{{"L", cfg.num_rrh},
                                      {"K", cfg.num_users},
                                      {"antennas_per_rrh", g.antennas_per_rrh},
                                      {"power_budget", g.power_budget},
                                      {"efficiency", g.efficiency},
                                      {"fronthaul_power", g.fronthaul_power},
                                      {"sinr_target", g.sinr_target},
                                      {"noise_power", g.noise_power},
                                      {"min_gain", g.min_gain}};
    res.metadata["criterion"] =
        "three-stage group sparse beamforming; gap = (GSBF network power - exhaustive optimum) / exhaustive optimum";
    res.metadata["tolerances"] = {{"admm_eps", sparse::BeamformingOptions{}.admm.eps_abs},
                                  {"feasibility_tol", sparse::BeamformingOptions{}.feasibility_tol}};
    res.metadata["seeds"] = {{"base", cfg.seed}, {"instance", "derive_seed(base, {trial})"}};
    res.metadata["trials"] = cfg.trials;
    if (!gaps.empty()) {
        std::sort(gaps.begin(), gaps.end());
        const auto n = gaps.size();
        res.metadata["gap_median"] = n % 2 ? gaps[n / 2] : 0.5 * (gaps[n / 2 - 1] + gaps[n / 2]);
        res.metadata["gap_max"] = gaps.back();
    }
    return res;
}

AdmissionDemoResult run_admission_demo(const AdmissionDemoConfig& cfg) {
    require(cfg.trials >= 1, "trials must be >= 1");
    if (cfg.instance) {
        require(cfg.trials == 1, "an instance file allows a single trial");
        cfg.instance->validate();
    } else {
        require(cfg.num_rrh >= 1 && cfg.num_users >= 0, "need L >= 1 and K >= 0");
    }
    AdmissionDemoResult res;
    res.rows.resize(cfg.trials);
    sparse::BeamformingPrograms cache;
    parallel_for(res.rows.size(), cfg.threads, [&](std::size_t t) {
        auto& row = res.rows[t];
        row.trial = static_cast<int>(t);
        row.instance_seed = cfg.instance ? 0 : derive_seed(cfg.seed, {t});
        const auto inst = cfg.instance ? *cfg.instance
                                       : sparse::random_cran_instance(cfg.num_rrh, cfg.num_users, row.instance_seed,
                                                                      cfg.generator);
        const auto a = sparse::user_admission({inst}, {}, &cache);
        row.admitted = a.admitted;
        row.removed = a.removed;
        row.added = a.added;
        row.transmit_power = a.certificate.transmit_power;
        if (inst.num_users <= cfg.oracle_max_users)
            row.oracle_size = static_cast<int>(sparse::max_admissible_subset(inst, {}, &cache).size());
    });
    res.metadata = base_metadata("admission");
    const auto& g = cfg.generator;
    res.metadata["parameters"] =
        cfg.instance ? nlohmann::json{{"instance", "file"}, {"L", cfg.instance->num_rrh}, {"K", cfg.instance->num_users}}
                     : nlohmann::json{{"L", cfg.num_rrh},
                                      {"K", cfg.num_users},
                                      {"antennas_per_rrh", g.antennas_per_rrh},
                                      {"power_budget", g.power_budget},
                                      {"sinr_target", g.sinr_target},
                                      {"noise_power", g.noise_power},
                                      {"min_gain", g.min_gain}};
    res.metadata["criterion"] =
        "l1 slack surrogate, admit users with slack <= 1e-5 (1 + max slack), deflate by largest slack until "
        "jointly feasible, then greedily re-admit in ascending slack order; oracle_size is the largest feasible subset";
    res.metadata["tolerances"] = {{"admm_eps", sparse::BeamformingOptions{}.admm.eps_abs},
                                  {"feasibility_tol", sparse::BeamformingOptions{}.feasibility_tol}};
    res.metadata["seeds"] = {{"base", cfg.seed}, {"instance", "derive_seed(base, {trial})"}};
    res.metadata["trials"] = cfg.trials;
    return res;
}

void write_heatmap_csv(std::ostream& out, const Heatmap& grid) {
    Precision p(out);
    out << "axis1,axis2,successes,trials,probability\n";
    for (const auto& c : grid.cells)
        out << c.axis1 << ',' << c.axis2 << ',' << c.successes << ',' << c.trials << ',' << c.probability() << '\n';
}

void write_nmse_csv(std::ostream& out, const NmseCurve& curve) {
    Precision p(out);
    out << "L,mean_nmse,standard_error,trials,unconverged\n";
    for (const auto& pt : curve.points)
        out << pt.l << ',' << pt.mean << ',' << pt.standard_error << ',' << pt.trials << ',' << pt.unconverged << '\n';
}

void write_converge_summary_csv(std::ostream& out, const ConvergeResult& res, bool include_timing) {
    Precision p(out);
    out << "trial,solver,iterations,iterations_to_target,final_objective,reason,wall_seconds\n";
    for (const auto& r : res.runs) {
        out << r.trial << ',' << to_string(r.solver) << ',';
        if (r.error.empty()) {
            out << r.trace.iterations() << ',';
            if (r.iterations_to_target) out << *r.iterations_to_target;
            out << ',' << r.trace.final_objective() << ',' << manifold::to_string(r.trace.reason);
        } else {
            out << ",,,error";
        }
        out << ',';
        if (include_timing) out << r.wall_seconds;
        out << '\n';
    }
}

void write_gsbf_csv(std::ostream& out, const GsbfDemoResult& res) {
    Precision p(out);
    out << "trial,instance_seed,feasible,active,network_power,all_active_power,oracle_power,gap\n";
    for (const auto& r : res.rows) {
        out << r.trial << ',' << r.instance_seed << ',' << (r.feasible ? 1 : 0) << ',' << join(r.active) << ',';
        if (r.feasible) out << r.network_power << ',' << r.all_active_power;
        else out << ',';
        out << ',';
        if (r.oracle_power) out << *r.oracle_power;
        out << ',';
        if (r.gap) out << *r.gap;
        out << '\n';
    }
}

void write_admission_csv(std::ostream& out, const AdmissionDemoResult& res) {
    Precision p(out);
    out << "trial,instance_seed,admitted_count,admitted,removed,added,transmit_power,oracle_size\n";
    for (const auto& r : res.rows) {
        out << r.trial << ',' << r.instance_seed << ',' << r.admitted.size() << ',' << join(r.admitted) << ','
            << join(r.removed) << ',' << join(r.added) << ',' << r.transmit_power << ',';
        if (r.oracle_size) out << *r.oracle_size;
        out << '\n';
    }
}

}  // namespace udnopt::harness
