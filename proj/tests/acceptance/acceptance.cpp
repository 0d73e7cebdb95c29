// Acceptance suite: one PASS/FAIL line per criterion. Usage: acceptance [criterion ...]

#include "support/conic_oracle.hpp"
#include "support/detect_oracle.hpp"
#include "support/manifold_random.hpp"
#include "support/tim_oracle.hpp"
#include "udnopt/conic/admm.hpp"
#include "udnopt/conic/cone.hpp"
#include "udnopt/detect/activity.hpp"
#include "udnopt/harness/experiments.hpp"
#include "udnopt/manifold/solvers.hpp"
#include "udnopt/seed.hpp"
#include "udnopt/tim/side_info.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <unistd.h>

using namespace udnopt;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

/// Collects failed checks and a short summary for one criterion.
class Report {
public:
    void check(bool ok, const std::string& what) {
        ++checks_;
        if (!ok && failures_.size() < 8) failures_.push_back(what);
        failed_ += !ok;
    }
    void note(const std::string& s) { notes_.push_back(s); }
    bool passed() const { return failed_ == 0; }
    std::string summary() const {
        std::ostringstream o;
        o << checks_ - failed_ << "/" << checks_ << " checks";
        for (const auto& n : notes_) o << "; " << n;
        for (const auto& f : failures_) o << "; FAILED " << f;
        if (failed_ > static_cast<int>(failures_.size())) o << "; ...";
        return o.str();
    }

private:
    int checks_ = 0;
    int failed_ = 0;
    std::vector<std::string> failures_;
    std::vector<std::string> notes_;
};

template <class T>
std::string str(const T& v) {
    std::ostringstream o;
    o << std::setprecision(4) << v;
    return o.str();
}

unsigned max_threads() { return std::max(2u, std::thread::hardware_concurrency()); }

/// Least-squares isotonic (nondecreasing) fit by pool-adjacent-violators.
std::vector<double> isotonic_fit(const std::vector<double>& y) {
    struct Block {
        double sum;
        int count;
    };
    std::vector<Block> blocks;
    for (double v : y) {
        blocks.push_back({v, 1});
        while (blocks.size() > 1) {
            const auto& b = blocks[blocks.size() - 1];
            const auto& a = blocks[blocks.size() - 2];
            if (a.sum / a.count <= b.sum / b.count) break;
            Block merged{a.sum + b.sum, a.count + b.count};
            blocks.pop_back();
            blocks.back() = merged;
        }
    }
    std::vector<double> fit;
    for (const auto& b : blocks) fit.insert(fit.end(), b.count, b.sum / b.count);
    return fit;
}

/// Total absolute deviation, in trials, of success counts from their nondecreasing isotonic fit.
double isotonic_deviation(const std::vector<double>& counts) {
    const auto fit = isotonic_fit(counts);
    double d = 0.0;
    for (std::size_t i = 0; i < counts.size(); ++i) d += std::abs(counts[i] - fit[i]);
    return d;
}

// 1. Cone kernels.
void cone_kernels(Report& rep) {
    std::mt19937_64 rng(101);
    std::uniform_int_distribution<int> dim(1, 12);
    std::normal_distribution<double> g(0.0, 3.0);
    auto rand_vec = [&](int n) { return VectorXd::NullaryExpr(n, [&] { return g(rng); }).eval(); };
    using conic::Cone;
    const std::vector<std::pair<std::string, std::function<Cone(int)>>> kinds{
        {"zero", [](int n) { return Cone::zero(n); }},
        {"nonnegative", [](int n) { return Cone::nonnegative(n); }},
        {"second-order", [](int n) { return Cone::second_order(std::max(n, 2)); }}};
    for (const auto& [name, make] : kinds) {
        int idem = 0, nonexp = 0, orth = 0, polar = 0;
        for (int trial = 0; trial < 1000; ++trial) {
            const Cone cone = make(dim(rng));
            const VectorXd u = rand_vec(cone.dim()), v = rand_vec(cone.dim());
            const VectorXd pu = conic::project_cone(u, cone), pv = conic::project_cone(v, cone);
            const VectorXd ppu = conic::project_cone(pu, cone);
            if (cone.kind() == conic::ConeKind::SecondOrder)
                idem += (ppu - pu).norm() <= 1e-12 * std::max(1.0, pu.norm());
            else
                idem += ppu == pu;
            nonexp += (pu - pv).norm() <= (u - v).norm() + 1e-12;
            const VectorXd r = u - pu;
            orth += std::abs(pu.dot(r)) <= 1e-10;
            // The polar cone is minus the dual cone.
            polar += (-r - conic::project_dual_cone(-r, cone)).norm() <= 1e-10;
        }
        rep.check(idem == 1000, name + " idempotence " + str(idem) + "/1000");
        rep.check(nonexp == 1000, name + " nonexpansive " + str(nonexp) + "/1000");
        rep.check(orth == 1000, name + " orthogonality " + str(orth) + "/1000");
        rep.check(polar == 1000, name + " polar residual " + str(polar) + "/1000");
    }
    rep.note("1000 inputs x 3 cone types");
}

// 2. Conic solver.
void conic_solver(Report& rep) {
    std::mt19937_64 rng(202);
    std::uniform_int_distribution<int> size(5, 50);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const int n = size(rng);
        const int m = std::max(n, size(rng));
        const auto planted = testing::random_planted_socp(rng, n, m);
        const auto sol = conic::admm_solve(planted.program);
        const auto ref = testing::pdhg_reference(planted.program, 400000, 1e-8);
        const double scale = std::max(1.0, std::abs(ref.objective));
        const double rel = std::abs(sol.objective - ref.objective) / scale;
        worst = std::max(worst, rel);
        rep.check(sol.status == conic::SolveStatus::Optimal, "instance " + str(trial) + " status");
        rep.check(rel <= 1e-3, "instance " + str(trial) + " rel gap " + str(rel));
    }
    rep.note("worst relative gap to first-order oracle " + str(worst));

    auto v = [](std::initializer_list<double> x) {
        VectorXd out(static_cast<Eigen::Index>(x.size()));
        Eigen::Index i = 0;
        for (double e : x) out[i++] = e;
        return out;
    };
    auto sp = [](const MatrixXd& d) { return conic::SparseMatrix(d.sparseView()); };
    using conic::Cone;
    {
        const conic::StandardConicProgram p(v({1}), sp(MatrixXd::Constant(1, 1, -1.0)), v({-1}), {Cone::nonnegative(1)});
        const auto s = conic::admm_solve(p);
        rep.check(s.status == conic::SolveStatus::Optimal && std::abs(s.x[0] - 1.0) <= 1e-5, "x* = 1");
    }
    {
        MatrixXd A = MatrixXd::Zero(3, 1);
        A(0, 0) = -1;
        const conic::StandardConicProgram p(v({1}), sp(A), v({0, 3, 4}), {Cone::second_order(3)});
        const auto s = conic::admm_solve(p);
        rep.check(s.status == conic::SolveStatus::Optimal && std::abs(s.x[0] - 5.0) <= 1e-5, "t* = 5");
    }
    {
        MatrixXd A(2, 1);
        A << -1, 1;
        const conic::StandardConicProgram p(v({1}), sp(A), v({-1, 0}), {Cone::nonnegative(2)});
        const auto s = conic::admm_solve(p);
        rep.check(s.status == conic::SolveStatus::PrimalInfeasible, "infeasible pair");
    }
}

// 3. Sparse recovery phase transition.
void sparse_phase_transition(Report& rep) {
    harness::SparsePtConfig cfg;
    cfg.n = 50;
    cfg.m = 2;
    cfg.k_min = 1;
    cfg.k_max = 20;
    cfg.l_min = 1;
    cfg.l_step = 4;
    cfg.l_max = 50;
    cfg.trials = 20;
    cfg.threads = max_threads();
    const auto g = harness::run_sparse_phase_transition(cfg);
    double worst_dev = 0.0;
    for (std::size_t i = 0; i < g.axis1.size(); ++i) {
        std::vector<double> counts;
        for (std::size_t j = 0; j < g.axis2.size(); ++j) counts.push_back(g.at(i, j).successes);
        bool bracket = false;
        for (std::size_t a = 0; a < counts.size() && !bracket; ++a)
            for (std::size_t b = a + 1; b < counts.size() && !bracket; ++b)
                bracket = g.at(i, a).probability() <= 0.1 && g.at(i, b).probability() >= 0.9;
        const double dev = isotonic_deviation(counts);
        worst_dev = std::max(worst_dev, dev);
        rep.check(bracket, "K=" + str(g.axis1[i]) + " has no L1 < L2 bracket");
        rep.check(dev <= 2.0, "K=" + str(g.axis1[i]) + " isotonic deviation " + str(dev));
    }
    rep.check(g.metadata["solver_failures"] == 0, "solver failures " + g.metadata["solver_failures"].dump());
    rep.note("worst isotonic deviation " + str(worst_dev) + " trials");
}

// 4. NMSE curve.
void nmse_curve(Report& rep) {
    harness::NmseConfig cfg;
    cfg.n = 50;
    cfg.m = 2;
    cfg.k = 10;
    cfg.noise_sd = 0.1;
    cfg.l_step = 5;
    cfg.trials = 20;
    cfg.threads = max_threads();
    const auto curve = harness::run_nmse_curve(cfg);
    std::ostringstream pts;
    for (std::size_t i = 0; i < curve.points.size(); ++i) {
        const auto& p = curve.points[i];
        pts << (i ? " " : "") << p.l << ":" << str(p.mean);
        rep.check(p.unconverged == 0, "L=" + str(p.l) + " unconverged " + str(p.unconverged));
        if (i == 0) continue;
        const auto& q = curve.points[i - 1];
        const double se = std::hypot(p.standard_error, q.standard_error);
        rep.check(p.mean <= q.mean + se, "L=" + str(p.l) + " mean " + str(p.mean) + " > " + str(q.mean) + " + " + str(se));
    }
    rep.note("NMSE " + pts.str());

    harness::NmseConfig clean = cfg;
    clean.noise_sd = 0.0;
    clean.l_min = clean.l_max = cfg.n;
    const double control = harness::run_nmse_curve(clean).points.at(0).mean;
    rep.check(control <= 1e-10, "noiseless L=N NMSE " + str(control));
    rep.note("noiseless control " + str(control));
}

// 5. Topological interference management phase transition.
void tim_phase_transition(Report& rep) {
    harness::TimPtConfig cfg;
    cfg.k = 30;
    cfg.ranks = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 30};
    cfg.s_step = 58;
    cfg.trials = 20;
    cfg.completion.restarts = 10;
    cfg.threads = max_threads();
    const auto g = harness::run_tim_phase_transition(cfg);
    const std::size_t R = g.axis1.size(), S = g.axis2.size();
    double worst = 0.0;
    for (std::size_t i = 0; i < R; ++i) {
        std::vector<double> counts;
        for (std::size_t j = S; j-- > 0;) counts.push_back(g.at(i, j).successes);
        const double dev = isotonic_deviation(counts);
        worst = std::max(worst, dev);
        rep.check(dev <= 2.0, "r=" + str(g.axis1[i]) + " not nonincreasing in |S| (deviation " + str(dev) + ")");
    }
    for (std::size_t j = 0; j < S; ++j) {
        std::vector<double> counts;
        for (std::size_t i = 0; i < R; ++i) counts.push_back(g.at(i, j).successes);
        const double dev = isotonic_deviation(counts);
        worst = std::max(worst, dev);
        rep.check(dev <= 2.0, "|S|=" + str(g.axis2[j]) + " not nondecreasing in r (deviation " + str(dev) + ")");
    }
    for (std::size_t i = 0; i < R; ++i)
        rep.check(g.at(i, 0).successes == cfg.trials, "|S|=0 row at r=" + str(g.axis1[i]));
    for (std::size_t j = 0; j < S; ++j)
        rep.check(g.at(R - 1, j).successes == cfg.trials, "r=K at |S|=" + str(g.axis2[j]));
    rep.note("worst isotonic deviation " + str(worst) + " trials");
    rep.note("uncertified restarts " + g.metadata["uncertified_restarts"].dump());
}

// 6. Solver convergence comparison.
void convergence(Report& rep) {
    harness::ConvergeConfig cfg;
    cfg.p = cfg.q = 100;
    cfg.rank = 5;
    cfg.omega = 400;
    cfg.trials = 10;
    cfg.max_iterations = 500;
    cfg.target = 1e-6;
    cfg.threads = max_threads();
    const auto res = harness::run_convergence_comparison(cfg);
    std::map<harness::SolverName, std::vector<std::optional<int>>> hit;
    bool monotone = true;
    for (const auto& r : res.runs) {
        rep.check(r.error.empty(), harness::to_string(r.solver) + std::string(" error: ") + r.error);
        hit[r.solver].push_back(r.iterations_to_target);
        for (std::size_t i = 1; i < r.trace.records.size(); ++i)
            monotone &= r.trace.records[i].objective <= r.trace.records[i - 1].objective;
    }
    auto reached = [](const std::vector<std::optional<int>>& v) {
        return static_cast<int>(std::count_if(v.begin(), v.end(), [](const auto& x) { return x.has_value(); }));
    };
    using harness::SolverName;
    const int rcg = reached(hit[SolverName::Rcg]), rtr = reached(hit[SolverName::Rtr]);
    int rtr_faster = 0;
    for (int t = 0; t < cfg.trials; ++t) {
        const auto a = hit[SolverName::Rtr][t], b = hit[SolverName::Altmin][t];
        rtr_faster += a && (!b || *a <= *b);
    }
    rep.check(rcg >= 9, "rcg reached target on " + str(rcg) + "/10");
    rep.check(rtr >= 9, "rtr reached target on " + str(rtr) + "/10");
    rep.check(rtr_faster >= 9, "rtr <= altmin iterations on " + str(rtr_faster) + "/10");
    rep.check(monotone, "non-monotone trace");
    auto median_iters = [](std::vector<std::optional<int>> v) {
        std::vector<int> x;
        for (auto e : v) x.push_back(e ? *e : 1 << 30);
        std::sort(x.begin(), x.end());
        return x[x.size() / 2] == 1 << 30 ? std::string("-") : str(x[x.size() / 2]);
    };
    rep.note("reached rcg " + str(rcg) + " rtr " + str(rtr) + " altmin " + str(reached(hit[SolverName::Altmin])) +
             "; median iterations rcg " + median_iters(hit[SolverName::Rcg]) + " rtr " +
             median_iters(hit[SolverName::Rtr]) + " altmin " + median_iters(hit[SolverName::Altmin]));
}

// 7. Manifold geometry.
void manifold_geometry(Report& rep) {
    using namespace manifold;
    std::mt19937_64 rng(707);
    const Eigen::Index p = 9, q = 7, r = 3;
    const DistanceCost dist(testing::gaussian(p, q, rng));
    const LinearCost lin(testing::gaussian(p, q, rng));
    const auto masked = testing::random_mask_cost(p, q, 30, rng);
    std::vector<MaskEntry> tim_entries;
    for (int i = 0; i < 9; ++i) tim_entries.push_back({i, i, 1.0});
    for (auto [i, j] : harness::sample_off_diagonal(9, 9, 20, 4)) tim_entries.push_back({i, j, 0.0});
    const MaskedLeastSquares tim(9, 9, tim_entries);
    const std::vector<std::pair<std::string, const SmoothCost*>> costs{
        {"distance", &dist}, {"linear", &lin}, {"masked", &masked}, {"interference", &tim}};
    double worst = 0.0;
    for (const auto& [name, cost] : costs) {
        int ok = 0;
        for (int point = 0; point < 10; ++point) {
            const auto X = testing::random_point(cost->rows(), cost->cols(), r, rng);
            const auto grad = riemannian_gradient(*cost, X);
            for (int dir = 0; dir < 10; ++dir) {
                auto eta = testing::random_tangent(X, rng);
                eta *= 1.0 / norm(eta);
                const double exact = inner(grad, eta);
                const double fd = testing::directional_fd(*cost, X, eta, 1e-5);
                const double rel = std::abs(fd - exact) / std::max(std::abs(exact), 1e-3 * norm(grad));
                worst = std::max(worst, rel);
                ok += rel <= 1e-5;
            }
        }
        rep.check(ok == 100, name + " gradient agreement " + str(ok) + "/100");
    }
    rep.note("worst gradient relative error " + str(worst));

    double min_slope = 1e9;
    for (int rep_i = 0; rep_i < 5; ++rep_i) {
        const auto X = testing::random_point(12, 10, 3, rng);
        auto xi = testing::random_tangent(X, rng);
        xi *= X.dense().norm() / norm(xi);
        std::vector<double> lt, le;
        for (double t = 1e-1; t >= 1e-4; t *= 0.5) {
            lt.push_back(std::log(t));
            le.push_back(std::log((retract(X, xi, t).dense() - (X.dense() + t * ambient_dense(X, xi))).norm()));
        }
        const Eigen::Map<VectorXd> x(lt.data(), static_cast<Eigen::Index>(lt.size()));
        const Eigen::Map<VectorXd> y(le.data(), static_cast<Eigen::Index>(le.size()));
        const double slope = ((x.array() - x.mean()) * (y.array() - y.mean())).sum() / (x.array() - x.mean()).square().sum();
        min_slope = std::min(min_slope, slope);
    }
    rep.check(min_slope >= 1.9, "retraction slope " + str(min_slope));
    rep.note("min retraction slope " + str(min_slope));

    double gauge = 0.0;
    for (int rep_i = 0; rep_i < 10; ++rep_i) {
        const auto X = testing::random_point(9, 9, 3, rng);
        const MatrixXd Qu = testing::orthogonal(3, rng), Qv = testing::orthogonal(3, rng);
        const FixedRankPoint Y(X.U() * Qu, Qu.transpose() * X.S() * Qv, X.V() * Qv);
        const auto gx = riemannian_gradient(tim, X), gy = riemannian_gradient(tim, Y);
        const double scale = std::max(1.0, norm(gx));
        gauge = std::max(gauge, std::abs(tim.value(X) - tim.value(Y)) / std::max(1.0, tim.value(X)));
        gauge = std::max(gauge, (ambient_dense(X, gx) - ambient_dense(Y, gy)).norm() / scale);
        gauge = std::max(gauge, (retract(X, gx, -0.1).dense() - retract(Y, gy, -0.1).dense()).norm() / scale);
    }
    rep.check(gauge <= 1e-8, "gauge invariance " + str(gauge));
    rep.note("gauge discrepancy " + str(gauge));
}

// 8. Exact TIM properties.
void tim_exact(Report& rep) {
    tim::CompletionOptions opts;
    opts.restarts = 5;
    for (int K = 1; K <= 4; ++K) {
        std::vector<std::pair<int, int>> off;
        for (int i = 0; i < K; ++i)
            for (int j = 0; j < K; ++j)
                if (i != j) off.emplace_back(i, j);
        int agree = 0, total = 0;
        for (unsigned bits = 0; bits < (1u << off.size()); ++bits) {
            std::set<std::pair<int, int>> zeros;
            for (std::size_t b = 0; b < off.size(); ++b)
                if (bits >> b & 1u) zeros.insert(off[b]);
            const tim::SideInfoMask mask(K, zeros);
            const auto res = tim::min_rank_complete(mask, opts);
            ++total;
            agree += res.success && (res.rank == 1) == zeros.empty();
        }
        rep.check(agree == total, "K=" + str(K) + " rank-1 iff empty on " + str(agree) + "/" + str(total));
    }
    rep.note("all 1 + 1 + 64 + 4096 masks with K <= 4");

    for (int K : {2, 3, 5, 8}) {
        std::set<std::pair<int, int>> all;
        for (int i = 0; i < K; ++i)
            for (int j = 0; j < K; ++j)
                if (i != j) all.insert({i, j});
        const auto res = tim::min_rank_complete(tim::SideInfoMask(K, all), opts);
        rep.check(res.success && res.rank == K && std::abs(res.dof - 1.0 / K) <= 1e-15,
                  "full interference K=" + str(K) + " rank " + str(res.rank));
    }

    const auto zeros = testing::example_zeros();
    int oracle = testing::exact_small_rank(5, zeros);
    if (oracle < 0) {
        const tim::SideInfoMask mask(5, zeros);
        const MatrixXd W = testing::example_rank3_witness();
        Eigen::JacobiSVD<MatrixXd> svd(W);
        if (tim::max_violation(mask, W) == 0.0 && svd.rank() == 3) oracle = 3;
    }
    const auto res = tim::min_rank_complete(tim::SideInfoMask(5, zeros), opts);
    rep.check(oracle == 3, "oracle rank " + str(oracle));
    rep.check(res.success && res.rank == oracle, "example network rank " + str(res.rank) + " vs oracle " + str(oracle));
    rep.note("example network rank " + str(res.rank) + ", oracle " + str(oracle));
}

// 9. Group sparse beamforming against the exhaustive oracle.
void gsbf_gap(Report& rep) {
    harness::GsbfDemoConfig cfg;
    cfg.num_rrh = 4;
    cfg.num_users = 3;
    cfg.trials = 20;
    cfg.threads = max_threads();
    const auto res = harness::run_gsbf_demo(cfg);
    std::vector<double> gaps;
    for (const auto& r : res.rows) {
        rep.check(r.feasible, "trial " + str(r.trial) + " infeasible");
        rep.check(r.oracle_power.has_value(), "trial " + str(r.trial) + " has no oracle");
        if (!r.feasible || !r.oracle_power) continue;
        rep.check(r.network_power >= *r.oracle_power * (1 - 1e-6),
                  "trial " + str(r.trial) + " beats the oracle: " + str(r.network_power) + " < " + str(*r.oracle_power));
        gaps.push_back(*r.gap);
    }
    std::sort(gaps.begin(), gaps.end());
    if (gaps.empty()) {
        rep.check(false, "no gaps");
        return;
    }
    const std::size_t n = gaps.size();
    const double median = n % 2 ? gaps[n / 2] : 0.5 * (gaps[n / 2 - 1] + gaps[n / 2]);
    rep.check(median <= 0.10, "median gap " + str(median));
    std::ostringstream dist;
    for (std::size_t i = 0; i < n; ++i) dist << (i ? " " : "") << str(gaps[i]);
    rep.note("median gap " + str(median) + ", sorted gaps [" + dist.str() + "]");
}

// 10. Group lasso certificates.
void group_lasso_certificates(Report& rep) {
    std::mt19937_64 rng(1010);
    std::uniform_int_distribution<int> nn(20, 50), mm(1, 4), frac(10, 90);
    std::uniform_real_distribution<double> lam(0.02, 0.9);
    double worst_on = 0.0, worst_off = 0.0, worst_oracle = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const int N = nn(rng), M = mm(rng);
        const int L = std::max(2, N * frac(rng) / 100);
        const int K = std::max(1, L / 3);
        const auto inst = detect::generate_instance(N, M, K, L, 0.1, derive_seed(1010, {std::uint64_t(trial)}));
        const double lmax = detect::lambda_max(inst.Y, inst.Q);
        for (double scale : {1.0, 1.5}) {
            const auto off = detect::group_lasso_solve(inst.Y, inst.Q, scale * lmax);
            rep.check(off.theta.norm() == 0.0 && off.support.empty(), "shutoff at " + str(scale) + " lambda_max");
        }
        const double lambda = lam(rng) * lmax;
        const auto est = detect::group_lasso_solve(inst.Y, inst.Q, lambda);
        const auto v = detect::group_lasso_kkt(inst.Y, inst.Q, lambda, est.theta);
        const double oracle = testing::kkt_gap(inst.Y, inst.Q, lambda, est.theta);
        worst_on = std::max(worst_on, v.on_support / lambda);
        worst_off = std::max(worst_off, v.off_support / lambda - 1.0);
        worst_oracle = std::max(worst_oracle, oracle);
        rep.check(est.converged, "instance " + str(trial) + " not converged");
        rep.check(v.on_support <= 1e-5 * lambda, "instance " + str(trial) + " on-support " + str(v.on_support / lambda));
        rep.check(v.off_support <= lambda * (1 + 1e-5), "instance " + str(trial) + " off-support " + str(v.off_support / lambda));
        rep.check(oracle <= 1e-5, "instance " + str(trial) + " independent KKT " + str(oracle));
    }
    rep.note("worst on-support " + str(worst_on) + " lambda, off-support excess " + str(worst_off) +
             ", independent check " + str(worst_oracle));
}

// 11. Determinism of the command-line tool.
std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream o;
    o << in.rdbuf();
    return o.str();
}

void determinism(Report& rep) {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / ("udnopt_acceptance_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    const std::vector<std::pair<std::string, std::string>> commands{
        {"sparse-pt", "--n 30 --k-max 8 --l-step 6 --trials 4"},
        {"nmse", "--n 30 --k 5 --l-step 6 --trials 4"},
        {"tim-pt", "--k 10 --rank-max 4 --s-step 15 --trials 3 --restarts 3"},
        {"converge", "--p 30 --q 30 --rank 3 --omega 60 --trials 3 --max-iterations 200"},
        {"gsbf", "--trials 4"},
        {"admission", "--trials 4"}};
    for (const auto& [cmd, flags] : commands) {
        std::vector<std::string> outputs;
        for (const auto& [tag, threads] : std::vector<std::pair<std::string, unsigned>>{
                 {"a", 1}, {"b", 1}, {"c", max_threads()}, {"d", 0}}) {
            const fs::path out = dir / (cmd + "_" + tag + ".csv");
            const std::string line = std::string(UDNOPT_CLI) + " " + cmd + " " + flags + " --seed 3 --threads " +
                                     std::to_string(threads) + " --out " + out.string();
            const int status = std::system(line.c_str());
            rep.check(status == 0, cmd + " exit status " + str(status));
            std::string all = slurp(out);
            const auto prefix = cmd + "_" + tag + "_trace_";
            std::vector<std::string> traces;
            for (const auto& e : fs::directory_iterator(dir)) {
                const auto name = e.path().filename().string();
                if (name.rfind(prefix, 0) == 0) traces.push_back(name);
            }
            std::sort(traces.begin(), traces.end());
            for (const auto& name : traces) all += name.substr(prefix.size()) + "\n" + slurp(dir / name);
            outputs.push_back(all);
        }
        rep.check(!outputs[0].empty(), cmd + " produced no output");
        bool same = true;
        for (const auto& o : outputs) same &= o == outputs[0];
        rep.check(same, cmd + " outputs differ");
    }
    fs::remove_all(dir);
    rep.note("6 commands x 4 runs (threads 1, 1, " + str(max_threads()) + ", all cores)");
}

}  // namespace

int main(int argc, char** argv) {
    struct Criterion {
        int id;
        const char* name;
        double limit_seconds;
        void (*run)(Report&);
    };
    const std::vector<Criterion> all{
        {1, "cone kernel suite", 10, cone_kernels},
        {2, "conic solver correctness", 60, conic_solver},
        {3, "sparse recovery phase transition", 15 * 60, sparse_phase_transition},
        {4, "NMSE versus pilot length", 10 * 60, nmse_curve},
        {5, "interference management phase transition", 30 * 60, tim_phase_transition},
        {6, "solver convergence comparison", 5 * 60, convergence},
        {7, "manifold geometry suite", 30, manifold_geometry},
        {8, "exact interference management properties", 5 * 60, tim_exact},
        {9, "group sparse beamforming oracle gap", 10 * 60, gsbf_gap},
        {10, "group lasso certificates", 60, group_lasso_certificates},
        {11, "determinism", 0, determinism},
    };
    std::set<int> selected;
    for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

    int failed = 0;
    for (const auto& c : all) {
        if (!selected.empty() && !selected.count(c.id)) continue;
        Report rep;
        const auto start = std::chrono::steady_clock::now();
        try {
            c.run(rep);
        } catch (const std::exception& e) {
            rep.check(false, std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.limit_seconds > 0) rep.check(secs < c.limit_seconds, "runtime over " + str(c.limit_seconds) + " s");
        const bool ok = rep.passed();
        failed += !ok;
        std::cout << "criterion " << std::setw(2) << c.id << ": " << (ok ? "PASS" : "FAIL") << "  " << c.name << " ("
                  << std::fixed << std::setprecision(1) << secs << " s)" << std::defaultfloat << "  "
                  << rep.summary() << std::endl;
    }
    return failed ? 1 : 0;
}
