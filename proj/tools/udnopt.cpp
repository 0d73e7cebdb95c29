#include "udnopt/conic/admm.hpp"
#include "udnopt/harness/experiments.hpp"
#include "udnopt/sparse/cran.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>

namespace fs = std::filesystem;
using namespace udnopt;
using harness::ConfigError;

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kSolverFailure = 3;

struct Common {
    std::uint64_t seed = 1;
    int trials = 20;
    std::string out = "-";
    unsigned threads = 1;
};

void add_common(CLI::App* cmd, Common& c, int default_trials) {
    c.trials = default_trials;
    cmd->add_option("--seed", c.seed, "Base seed")->capture_default_str();
    cmd->add_option("--trials", c.trials, "Trials per cell or point")->capture_default_str();
    cmd->add_option("--out", c.out, "Output CSV path; '-' writes to stdout")->capture_default_str();
    cmd->add_option("--threads", c.threads, "Worker threads (0 = all cores)")->capture_default_str();
}

/// Writes `body` to the CSV target and the metadata sidecar next to it (stderr for stdout runs).
void emit(const Common& c, const std::function<void(std::ostream&)>& body, const nlohmann::json& meta) {
    if (c.out == "-") {
        body(std::cout);
        std::cerr << meta.dump(2) << '\n';
        return;
    }
    std::ofstream csv(c.out);
    if (!csv) throw ConfigError("cannot open output file " + c.out);
    body(csv);
    std::ofstream side(c.out + ".meta.json");
    if (!side) throw ConfigError("cannot open metadata file " + c.out + ".meta.json");
    side << meta.dump(2) << '\n';
    if (!csv || !side) throw ConfigError("write failed for " + c.out);
}

sparse::CranInstance load_instance(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open instance file " + path);
    try {
        return sparse::read_cran_instance(in);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Experiment driver for sparse and low-rank network optimization"};
    app.require_subcommand(1);
    std::function<int()> action;

    // sparse-pt
    Common spc;
    harness::SparsePtConfig sp;
    auto* sp_cmd = app.add_subcommand("sparse-pt", "Activity-detection phase transition over (K, L)");
    add_common(sp_cmd, spc, 20);
    sp_cmd->add_option("--n", sp.n, "Devices N")->capture_default_str();
    sp_cmd->add_option("--m", sp.m, "BS antennas M")->capture_default_str();
    sp_cmd->add_option("--k-min", sp.k_min, "Smallest active count K")->capture_default_str();
    sp_cmd->add_option("--k-max", sp.k_max, "Largest active count K")->capture_default_str();
    sp_cmd->add_option("--l-min", sp.l_min, "Smallest pilot length (0 = l-step)")->capture_default_str();
    sp_cmd->add_option("--l-step", sp.l_step, "Pilot length step")->capture_default_str();
    sp_cmd->add_option("--l-max", sp.l_max, "Largest pilot length (0 = N)")->capture_default_str();
    sp_cmd->add_option("--success-tol", sp.success_tol, "Relative error bound for success")->capture_default_str();
    sp_cmd->callback([&] {
        action = [&] {
            sp.seed = spc.seed;
            sp.trials = spc.trials;
            sp.threads = spc.threads;
            const auto grid = harness::run_sparse_phase_transition(sp);
            emit(spc, [&](std::ostream& o) { harness::write_heatmap_csv(o, grid); }, grid.metadata);
            return kOk;
        };
    });

    // nmse
    Common nmc;
    harness::NmseConfig nm;
    auto* nm_cmd = app.add_subcommand("nmse", "Group-lasso NMSE versus pilot length");
    add_common(nm_cmd, nmc, 20);
    nm_cmd->add_option("--n", nm.n, "Devices N")->capture_default_str();
    nm_cmd->add_option("--m", nm.m, "BS antennas M")->capture_default_str();
    nm_cmd->add_option("--k", nm.k, "Active devices K")->capture_default_str();
    nm_cmd->add_option("--noise-sd", nm.noise_sd, "Noise standard deviation")->capture_default_str();
    nm_cmd->add_option("--l-min", nm.l_min, "Smallest pilot length (0 = l-step)")->capture_default_str();
    nm_cmd->add_option("--l-step", nm.l_step, "Pilot length step")->capture_default_str();
    nm_cmd->add_option("--l-max", nm.l_max, "Largest pilot length (0 = N)")->capture_default_str();
    nm_cmd->add_option("--lambda-scale", nm.lambda_scale, "c in lambda = c sd sqrt(M log N)")->capture_default_str();
    nm_cmd->callback([&] {
        action = [&] {
            nm.seed = nmc.seed;
            nm.trials = nmc.trials;
            nm.threads = nmc.threads;
            const auto curve = harness::run_nmse_curve(nm);
            emit(nmc, [&](std::ostream& o) { harness::write_nmse_csv(o, curve); }, curve.metadata);
            return kOk;
        };
    });

    // tim-pt
    Common tpc;
    harness::TimPtConfig tp;
    int rank_min = 1, rank_max = 10;
    std::vector<int> extra_ranks;
    std::string tp_solver = "rtr";
    auto* tp_cmd = app.add_subcommand("tim-pt", "Topological interference management phase transition over (r, |S|)");
    add_common(tp_cmd, tpc, 20);
    tp_cmd->add_option("--k", tp.k, "Users K")->capture_default_str();
    tp_cmd->add_option("--rank-min", rank_min, "Smallest rank")->capture_default_str();
    tp_cmd->add_option("--rank-max", rank_max, "Largest rank")->capture_default_str();
    tp_cmd->add_option("--extra-rank", extra_ranks, "Additional ranks to include (e.g. K)");
    tp_cmd->add_option("--s-step", tp.s_step, "|S| step")->capture_default_str();
    tp_cmd->add_option("--s-max", tp.s_max, "Largest |S| (-1 = K(K-1))")->capture_default_str();
    tp_cmd->add_option("--restarts", tp.completion.restarts, "Restarts per attempt")->capture_default_str();
    tp_cmd->add_option("--eps-feas", tp.completion.eps_feas, "Cost threshold for a feasible restart")
        ->capture_default_str();
    tp_cmd->add_option("--max-iterations", tp.completion.solver_options.max_iterations, "Solver iteration cap")
        ->capture_default_str();
    tp_cmd->add_option("--solver", tp_solver, "rtr or rcg")->check(CLI::IsMember({"rtr", "rcg"}))->capture_default_str();
    tp_cmd->callback([&] {
        action = [&] {
            if (rank_min < 1 || rank_min > rank_max) throw ConfigError("need 1 <= rank-min <= rank-max");
            tp.ranks.clear();
            for (int r = rank_min; r <= rank_max; ++r) tp.ranks.push_back(r);
            tp.ranks.insert(tp.ranks.end(), extra_ranks.begin(), extra_ranks.end());
            tp.completion.solver = tp_solver == "rcg" ? tim::SolverKind::Rcg : tim::SolverKind::Rtr;
            tp.seed = tpc.seed;
            tp.trials = tpc.trials;
            tp.threads = tpc.threads;
            const auto grid = harness::run_tim_phase_transition(tp);
            emit(tpc, [&](std::ostream& o) { harness::write_heatmap_csv(o, grid); }, grid.metadata);
            return kOk;
        };
    });

    // converge
    Common cvc;
    harness::ConvergeConfig cv;
    std::vector<std::string> solver_names{"rcg", "rtr", "altmin"};
    bool timing = false;
    auto* cv_cmd = app.add_subcommand("converge", "Solver convergence comparison on the interference cost");
    add_common(cv_cmd, cvc, 1);
    cv_cmd->add_option("--p", cv.p, "Rows")->capture_default_str();
    cv_cmd->add_option("--q", cv.q, "Columns")->capture_default_str();
    cv_cmd->add_option("--rank", cv.rank, "Rank r")->capture_default_str();
    cv_cmd->add_option("--omega", cv.omega, "Forced-zero off-diagonal entries |Omega|")->capture_default_str();
    cv_cmd->add_option("--solvers", solver_names, "Any of rcg, rtr, altmin")->delimiter(',')->capture_default_str();
    cv_cmd->add_option("--max-iterations", cv.max_iterations, "Iteration cap")->capture_default_str();
    cv_cmd->add_option("--target", cv.target, "Stop once the cost reaches this value")->capture_default_str();
    cv_cmd->add_flag("--timing", timing, "Fill the wall-time columns");
    cv_cmd->callback([&] {
        action = [&] {
            cv.solvers.clear();
            for (const auto& s : solver_names) cv.solvers.push_back(harness::parse_solver(s));
            cv.seed = cvc.seed;
            cv.trials = cvc.trials;
            cv.threads = cvc.threads;
            const auto res = harness::run_convergence_comparison(cv);
            auto meta = res.metadata;
            if (cvc.out != "-") {
                const fs::path base(cvc.out);
                std::vector<std::string> traces;
                for (const auto& r : res.runs) {
                    if (!r.error.empty()) continue;
                    fs::path p = base;
                    p.replace_filename(base.stem().string() + "_trace_" + harness::to_string(r.solver) + "_" +
                                       std::to_string(r.trial) + ".csv");
                    std::ofstream t(p);
                    if (!t) throw ConfigError("cannot open trace file " + p.string());
                    manifold::write_trace_csv(t, r.trace, timing);
                    traces.push_back(p.filename().string());
                }
                meta["trace_files"] = traces;
            }
            emit(cvc, [&](std::ostream& o) { harness::write_converge_summary_csv(o, res, timing); }, meta);
            for (const auto& r : res.runs)
                if (!r.error.empty()) std::cerr << "solver " << harness::to_string(r.solver) << " failed: " << r.error << '\n';
            const bool all_failed =
                std::all_of(res.runs.begin(), res.runs.end(), [](const auto& r) { return !r.error.empty(); });
            return all_failed ? kSolverFailure : kOk;
        };
    });

    // gsbf
    Common gbc;
    harness::GsbfDemoConfig gb;
    std::string gb_instance;
    auto* gb_cmd = app.add_subcommand("gsbf", "Group sparse beamforming demo with exhaustive oracle for small L");
    add_common(gb_cmd, gbc, 1);
    gb_cmd->add_option("--instance", gb_instance, "C-RAN instance file (overrides the generator)");
    gb_cmd->add_option("--l", gb.num_rrh, "RRHs L")->capture_default_str();
    gb_cmd->add_option("--k", gb.num_users, "Users K")->capture_default_str();
    gb_cmd->add_option("--antennas", gb.generator.antennas_per_rrh, "Antennas per RRH")->capture_default_str();
    gb_cmd->add_option("--sinr", gb.generator.sinr_target, "SINR target (linear)")->capture_default_str();
    gb_cmd->add_option("--fronthaul-power", gb.generator.fronthaul_power, "Static RRH + fronthaul power [W]")
        ->capture_default_str();
    gb_cmd->add_option("--power-budget", gb.generator.power_budget, "Per-RRH power budget [W]")->capture_default_str();
    gb_cmd->add_option("--oracle-max-l", gb.oracle_max_rrh, "Run the exhaustive oracle when L <= this")
        ->capture_default_str();
    gb_cmd->callback([&] {
        action = [&] {
            if (!gb_instance.empty()) gb.instance = load_instance(gb_instance);
            gb.seed = gbc.seed;
            gb.trials = gbc.trials;
            gb.threads = gbc.threads;
            const auto res = harness::run_gsbf_demo(gb);
            emit(gbc, [&](std::ostream& o) { harness::write_gsbf_csv(o, res); }, res.metadata);
            return kOk;
        };
    });

    // admission
    Common adc;
    harness::AdmissionDemoConfig ad;
    std::string ad_instance;
    auto* ad_cmd = app.add_subcommand("admission", "User admission demo with enumeration oracle for small K");
    add_common(ad_cmd, adc, 1);
    ad_cmd->add_option("--instance", ad_instance, "C-RAN instance file (overrides the generator)");
    ad_cmd->add_option("--l", ad.num_rrh, "RRHs L")->capture_default_str();
    ad_cmd->add_option("--k", ad.num_users, "Users K")->capture_default_str();
    ad_cmd->add_option("--antennas", ad.generator.antennas_per_rrh, "Antennas per RRH")->capture_default_str();
    ad_cmd->add_option("--sinr", ad.generator.sinr_target, "SINR target (linear)")->capture_default_str();
    ad_cmd->add_option("--power-budget", ad.generator.power_budget, "Per-RRH power budget [W]")->capture_default_str();
    ad_cmd->add_option("--oracle-max-k", ad.oracle_max_users, "Enumerate the optimum when K <= this")
        ->capture_default_str();
    ad_cmd->callback([&] {
        action = [&] {
            if (!ad_instance.empty()) ad.instance = load_instance(ad_instance);
            ad.seed = adc.seed;
            ad.trials = adc.trials;
            ad.threads = adc.threads;
            const auto res = harness::run_admission_demo(ad);
            emit(adc, [&](std::ostream& o) { harness::write_admission_csv(o, res); }, res.metadata);
            return kOk;
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kConfigError;
    }
    try {
        return action();
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const conic::SolverFailure& e) {
        std::cerr << "solver failure: " << e.what() << '\n';
        return kSolverFailure;
    } catch (const std::exception& e) {
        std::cerr << "solver failure: " << e.what() << '\n';
        return kSolverFailure;
    }
}
