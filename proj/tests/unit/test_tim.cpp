#include "support/tim_oracle.hpp"
#include "udnopt/tim/side_info.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

using namespace udnopt::tim;
using Eigen::MatrixXd;
using Zeros = std::set<std::pair<int, int>>;

namespace {

/// 1-based connection list of the five-user example network.
NetworkTopology example_topology() {
    NetworkTopology t;
    t.K = 5;
    for (auto [i, j] : {std::pair{1, 3}, {1, 4}, {2, 3}, {2, 4}, {3, 1}, {3, 5}, {4, 1}, {4, 5}, {5, 1}})
        t.connections.emplace(i - 1, j - 1);
    return t;
}

Zeros random_zeros(int K, int count, std::mt19937_64& rng) {
    std::vector<std::pair<int, int>> off;
    for (int i = 0; i < K; ++i)
        for (int j = 0; j < K; ++j)
            if (i != j) off.emplace_back(i, j);
    std::shuffle(off.begin(), off.end(), rng);
    return {off.begin(), off.begin() + count};
}

Zeros mask_from_bits(int K, unsigned bits) {
    Zeros z;
    int b = 0;
    for (int i = 0; i < K; ++i)
        for (int j = 0; j < K; ++j)
            if (i != j && ((bits >> b++) & 1u)) z.emplace(i, j);
    return z;
}

void check_success_invariants(const SideInfoMask& mask, const CompletionResult& res, double eps) {
    CHECK(res.dof * res.rank == doctest::Approx(1.0));
    if (!res.success) return;
    CHECK(max_violation(mask, res.M) <= std::sqrt(eps));
    const Eigen::VectorXd sv = Eigen::JacobiSVD<MatrixXd>(res.M).singularValues();
    if (res.rank < sv.size()) CHECK(sv(res.rank) <= 1e-8 * sv(0));
}

CompletionOptions quick(int restarts = 3) {
    CompletionOptions o;
    o.restarts = restarts;
    return o;
}

}  // namespace

TEST_CASE("example network mask") {
    const auto mask = build_mask(example_topology());
    CHECK(mask.size() == 5);
    CHECK(mask.fixed_zeros().size() == 9);
    int ones = 0;
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) {
            const auto s = mask.state(i, j);
            if (s == EntryState::FixedOne) {
                ++ones;
                CHECK(i == j);
            }
            if (s == EntryState::FixedZero) CHECK(example_topology().connections.count({i, j}) == 1);
        }
    CHECK(ones == 5);
    CHECK(mask.state(0, 2) == EntryState::FixedZero);
    CHECK(mask.state(0, 1) == EntryState::Free);
    CHECK_THROWS_AS(mask.state(5, 0), std::out_of_range);
}

TEST_CASE("caches free exactly the cached interfering entries") {
    auto topo = example_topology();
    topo.caches = {{1, 4}, {0, 4}, {1, 3}, {1, 2}, {0, 2, 3}};  // 1-based {2,5} {1,5} {2,4} {2,3} {1,3,4}
    const auto mask = build_mask(topo);
    CHECK(mask.fixed_zeros().size() == 8);
    CHECK(mask.state(4, 0) == EntryState::Free);
    const auto plain = build_mask(example_topology());
    CHECK(std::includes(plain.fixed_zeros().begin(), plain.fixed_zeros().end(), mask.fixed_zeros().begin(),
                        mask.fixed_zeros().end()));
}

TEST_CASE("empty connection set completes at rank one with the all-ones matrix") {
    NetworkTopology t;
    t.K = 4;
    const auto mask = build_mask(t);
    CHECK(mask.fixed_zeros().empty());
    const auto res = min_rank_complete(mask);
    CHECK(res.success);
    CHECK(res.rank == 1);
    CHECK_FALSE(res.heuristic);
    CHECK(res.dof == 1.0);
    CHECK((res.M - MatrixXd::Ones(4, 4)).norm() == 0.0);
    CHECK(res.attempts.front().analytic);
}

TEST_CASE("masked cost values and gradient") {
    const auto mask = build_mask(example_topology());
    const auto cost = masked_cost(mask);
    CHECK(cost.entries().size() == 14);
    const MatrixXd I = MatrixXd::Identity(5, 5);
    CHECK(cost.value(udnopt::manifold::FixedRankPoint::from_dense(I, 5)) == doctest::Approx(0.0));
    CHECK(cost.value_factored(MatrixXd::Zero(5, 2), MatrixXd::Zero(5, 2)) == doctest::Approx(5.0));
    CHECK(cost.value_factored(MatrixXd::Ones(5, 1), MatrixXd::Ones(5, 1)) == doctest::Approx(9.0));

    std::mt19937_64 rng(3);
    std::normal_distribution<double> g;
    MatrixXd L(5, 2), R(5, 2), dL(5, 2);
    for (auto* A : {&L, &R, &dL})
        for (Eigen::Index k = 0; k < A->size(); ++k) (*A)(k) = g(rng);
    const auto X = udnopt::manifold::FixedRankPoint::from_dense(L * R.transpose(), 2);
    const MatrixXd G = cost.gradient(X).dense();
    const double h = 1e-6;
    const double fd = (cost.value_factored(L + h * dL, R) - cost.value_factored(L - h * dL, R)) / (2 * h);
    CHECK(fd == doctest::Approx((G * R).cwiseProduct(dL).sum()).epsilon(1e-6));
}

TEST_CASE("exact rank-two oracle on hand-checked masks") {
    CHECK(udnopt::testing::rank2_feasible(2, {{0, 1}}));
    CHECK(udnopt::testing::rank2_feasible(2, {{0, 1}, {1, 0}}));  // identity
    CHECK(udnopt::testing::rank2_feasible(3, {{0, 1}, {1, 2}}));
    CHECK_FALSE(udnopt::testing::rank2_feasible(3, {{0, 1}, {1, 2}, {2, 0}, {0, 2}, {1, 0}, {2, 1}}));  // needs I_3
    CHECK_FALSE(udnopt::testing::rank2_feasible(5, build_mask(example_topology()).fixed_zeros()));
}

TEST_CASE("rank one is returned exactly when no entry is forced to zero (all masks, K <= 3)") {
    for (int K = 1; K <= 3; ++K) {
        const unsigned count = 1u << (K * (K - 1));
        for (unsigned bits = 0; bits < count; ++bits) {
            const SideInfoMask mask(K, mask_from_bits(K, bits));
            const auto res = min_rank_complete(mask, quick());
            CAPTURE(K);
            CAPTURE(bits);
            CHECK(res.success);
            CHECK((res.rank == 1) == mask.fixed_zeros().empty());
            if (res.rank == 2) CHECK(udnopt::testing::rank2_feasible(K, mask.fixed_zeros()));
            if (res.rank == 3) CHECK_FALSE(udnopt::testing::rank2_feasible(K, mask.fixed_zeros()));
            check_success_invariants(mask, res, 1e-6);
        }
    }
}

TEST_CASE("full interference needs rank K") {
    for (int K : {2, 3, 5}) {
        NetworkTopology t;
        t.K = K;
        for (int i = 0; i < K; ++i)
            for (int j = 0; j < K; ++j)
                if (i != j) t.connections.emplace(i, j);
        const auto mask = build_mask(t);
        const auto res = min_rank_complete(mask, quick());
        CHECK(res.success);
        CHECK(res.rank == K);
        CHECK(res.dof == doctest::Approx(1.0 / K));
        CHECK((res.M - MatrixXd::Identity(K, K)).cwiseAbs().maxCoeff() <= 1e-6);
    }
}

TEST_CASE("example network needs three channel uses") {
    const auto mask = build_mask(example_topology());
    // Oracle: rank 1 and rank 2 are ruled out exactly, rank 3 has an explicit witness.
    CHECK(udnopt::testing::exact_small_rank(5, mask.fixed_zeros()) == -1);
    const MatrixXd W = udnopt::testing::example_rank3_witness();
    CHECK(max_violation(mask, W) == 0.0);
    CHECK(Eigen::FullPivLU<MatrixXd>(W).rank() == 3);

    for (auto kind : {SolverKind::Rtr, SolverKind::Rcg}) {
        for (std::uint64_t seed : {0u, 1u, 2u}) {
            CompletionOptions o;
            o.solver = kind;
            o.seed = seed;
            const auto res = min_rank_complete(mask, o);
            CAPTURE(seed);
            CHECK(res.success);
            CHECK(res.rank == 3);
            CHECK(res.attempts.size() == 3);
            check_success_invariants(mask, res, o.eps_feas);

            const auto pd = extract_precoders(res.M, res.rank);
            CHECK(pd.n == 3);
            CHECK((pd.decoders.transpose() * pd.precoders - res.M).cwiseAbs().maxCoeff() <= 1e-6);
        }
    }
}

TEST_CASE("rank-two near-solutions of the example network are not accepted") {
    const auto mask = build_mask(example_topology());
    CompletionOptions o;
    o.restarts = 10;
    const auto att = complete_at_rank(mask, 2, o);
    CHECK_FALSE(att.feasible);
    CHECK(att.restarts_run == 10);
}

TEST_CASE("certified rank-two completions agree with the exact oracle on random masks") {
    std::mt19937_64 rng(11);
    int feasible = 0, found = 0;
    for (int trial = 0; trial < 30; ++trial) {
        const int K = 12;
        const auto zeros = random_zeros(K, 4 + trial % 10, rng);
        const SideInfoMask mask(K, zeros);
        CompletionOptions o = quick(5);
        o.seed = trial;
        MatrixXd M;
        const auto att = complete_at_rank(mask, 2, o, &M);
        const bool truth = udnopt::testing::rank2_feasible(K, zeros);
        feasible += truth;
        found += att.feasible;
        if (att.feasible) {
            CHECK(truth);
            CHECK(max_violation(mask, M) <= 1e-3);
        }
    }
    CHECK(feasible > 5);
    CHECK(found >= feasible - 1);
}

TEST_CASE("fixed-rank attempt at full rank always succeeds") {
    std::mt19937_64 rng(4);
    const int K = 6;
    const SideInfoMask mask(K, random_zeros(K, 20, rng));
    MatrixXd M;
    const auto att = complete_at_rank(mask, K, quick(), &M);
    CHECK(att.feasible);
    CHECK(max_violation(mask, M) <= 1e-3);
}

TEST_CASE("cache growth never adds fixed zeros and does not raise the rank") {
    std::mt19937_64 rng(8);
    std::bernoulli_distribution coin(0.5), rare(0.25);
    int raised = 0;
    for (int trial = 0; trial < 10; ++trial) {
        NetworkTopology t;
        t.K = 5;
        for (int i = 0; i < t.K; ++i)
            for (int j = 0; j < t.K; ++j)
                if (i != j && coin(rng)) t.connections.emplace(i, j);
        auto cached = t;
        cached.caches.resize(t.K);
        for (int i = 0; i < t.K; ++i)
            for (int j = 0; j < t.K; ++j)
                if (i != j && rare(rng)) cached.caches[i].insert(j);
        const auto a = build_mask(t), b = build_mask(cached);
        CHECK(std::includes(a.fixed_zeros().begin(), a.fixed_zeros().end(), b.fixed_zeros().begin(),
                            b.fixed_zeros().end()));
        CompletionOptions o = quick(5);
        o.seed = trial;
        raised += min_rank_complete(b, o).rank > min_rank_complete(a, o).rank;
    }
    CHECK(raised == 0);
}

TEST_CASE("nuclear norm completion") {
    SUBCASE("full interference gives the identity") {
        const SideInfoMask mask(4, mask_from_bits(4, (1u << 12) - 1));
        const auto res = nuclear_norm_complete(mask);
        CHECK(res.status == NuclearStatus::Converged);
        CHECK((res.completion.M - MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() <= 1e-6);
        CHECK(res.completion.rank == 4);
        CHECK(res.completion.success);
    }
    SUBCASE("no constraints beyond the diagonal") {
        const auto res = nuclear_norm_complete(SideInfoMask(2, {}));
        CHECK(res.completion.success);
        CHECK(res.completion.M(0, 0) == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(res.completion.M(1, 1) == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(res.completion.dof * res.completion.rank == doctest::Approx(1.0));
    }
    SUBCASE("example network is feasible and no better than the exact minimum") {
        const auto mask = build_mask(example_topology());
        const auto res = nuclear_norm_complete(mask);
        CHECK(res.completion.success);
        CHECK(res.completion.rank >= 3);
        // trace(M) = K bounds the nuclear norm from below, so the optimum value is K.
        const Eigen::VectorXd sv = Eigen::JacobiSVD<MatrixXd>(res.completion.M).singularValues();
        CHECK(sv.sum() == doctest::Approx(5.0).epsilon(1e-6));
    }
    SUBCASE("iteration cap is reported") {
        NuclearNormOptions o;
        o.max_iterations = 1;
        CHECK(nuclear_norm_complete(build_mask(example_topology()), o).status == NuclearStatus::MaxIterations);
    }
}

TEST_CASE("precoder extraction") {
    SUBCASE("identity gives an orthogonal scheme") {
        const auto pd = extract_precoders(MatrixXd::Identity(4, 4), 4);
        CHECK(pd.n == 4);
        CHECK((pd.decoders.transpose() * pd.precoders - MatrixXd::Identity(4, 4)).norm() <= 1e-12);
    }
    SUBCASE("all ones uses one channel") {
        const auto pd = extract_precoders(MatrixXd::Ones(3, 3), 1);
        CHECK(pd.n == 1);
        CHECK(pd.decoders.cwiseAbs().isApprox(MatrixXd::Ones(1, 3)));
        CHECK(pd.precoders.cwiseAbs().isApprox(MatrixXd::Ones(1, 3)));
        CHECK((pd.decoders.transpose() * pd.precoders - MatrixXd::Ones(3, 3)).norm() <= 1e-12);
    }
    SUBCASE("witness of the example network") {
        const MatrixXd W = udnopt::testing::example_rank3_witness();
        const auto pd = extract_precoders(W, 3);
        CHECK((pd.decoders.transpose() * pd.precoders - W).cwiseAbs().maxCoeff() <= 1e-6);
    }
    CHECK_THROWS_AS(extract_precoders(MatrixXd::Identity(3, 3), 2), std::invalid_argument);
    CHECK_THROWS_AS(extract_precoders(MatrixXd::Ones(2, 3), 1), std::invalid_argument);
}

TEST_CASE("degrees of freedom") {
    CHECK(dof(1) == 1.0);
    CHECK(dof(2) == 0.5);
    CHECK(dof(5) == doctest::Approx(0.2));
    CHECK_THROWS_AS(dof(0), std::invalid_argument);
}

TEST_CASE("topology files") {
    auto topo = example_topology();
    topo.caches = {{1, 4}, {}, {1, 3}, {1, 2}, {0, 2, 3}};
    std::stringstream ss;
    write_topology(ss, topo);
    const auto back = read_topology(ss);
    CHECK(back.K == topo.K);
    CHECK(back.connections == topo.connections);
    CHECK(back.caches == topo.caches);

    std::istringstream commented("# users\n3\nconn 1 2   # first\n\nconn 3 1\ncache 1 2\n");
    const auto t = read_topology(commented);
    CHECK(t.K == 3);
    CHECK(t.connections == std::set<std::pair<int, int>>{{0, 1}, {2, 0}});
    CHECK(build_mask(t).fixed_zeros() == Zeros{{2, 0}});

    for (const char* bad : {"", "x\n", "3\nconn 1 4\n", "3\nconn 2 2\n", "3\ncache 1 1\n", "3\nlink 1 2\n",
                            "3\nconn 1 2 3\n", "3\nconn 1\n"}) {
        std::istringstream in(bad);
        CAPTURE(bad);
        CHECK_THROWS_AS(read_topology(in), std::invalid_argument);
    }
}

TEST_CASE("mask and matrix CSV export") {
    std::ostringstream m;
    write_mask_csv(m, SideInfoMask(3, {{0, 2}, {2, 1}}));
    CHECK(m.str() == "1,*,0\n*,1,*\n*,0,1\n");
    std::ostringstream v;
    MatrixXd A(1, 2);
    A << 0.1, -2;
    write_matrix_csv(v, A);
    CHECK(v.str() == "0.10000000000000001,-2\n");
}

TEST_CASE("invalid masks are rejected") {
    CHECK_THROWS_AS(SideInfoMask(0, {}), std::invalid_argument);
    CHECK_THROWS_AS(SideInfoMask(3, {{1, 1}}), std::invalid_argument);
    CHECK_THROWS_AS(SideInfoMask(3, {{0, 3}}), std::invalid_argument);
    NetworkTopology t;
    t.K = 2;
    t.caches = {{0}, {}};
    CHECK_THROWS_AS(build_mask(t), std::invalid_argument);
}
