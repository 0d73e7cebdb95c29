#pragma once

#include <Eigen/Dense>

#include <numeric>
#include <set>
#include <utility>
#include <vector>

namespace udnopt::testing {

/// Exact real rank-2 feasibility of {M_ii = 1, M_ij = 0 on zeros}.
/// With M_ij = a_i . b_j in R^2, a zero at (i, j) forces b_j parallel to rot90(a_i). Nodes
/// 0..K-1 stand for the direction of rot90(a_i), nodes K..2K-1 for the direction of b_j; each zero
/// merges node i with node K + j. Feasible iff no b_i shares a class with rot90(a_i), since
/// distinct classes can take distinct directions and a_i . b_i != 0 then scales to 1.
inline bool rank2_feasible(int K, const std::set<std::pair<int, int>>& zeros) {
    std::vector<int> parent(2 * K);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (const auto& [i, j] : zeros) parent[find(i)] = find(K + j);
    for (int i = 0; i < K; ++i)
        if (find(i) == find(K + i)) return false;
    return true;
}

/// Smallest rank certified by exact arguments, or -1 if ranks 1 and 2 are ruled out and the
/// caller must supply a witness.
inline int exact_small_rank(int K, const std::set<std::pair<int, int>>& zeros) {
    if (zeros.empty()) return 1;
    if (rank2_feasible(K, zeros)) return 2;
    return -1;
}

/// Forced zeros of the five-user example mask, 0-based.
inline std::set<std::pair<int, int>> example_zeros() {
    return {{0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 0}, {2, 4}, {3, 0}, {3, 4}, {4, 0}};
}

/// Rank-3 completion of the five-user example mask (1-based zeros (1,3) (1,4) (2,3) (2,4)
/// (3,1) (3,5) (4,1) (4,5) (5,1)): rows are a_i, columns b_j.
inline Eigen::MatrixXd example_rank3_witness() {
    Eigen::MatrixXd A(5, 3), B(3, 5);
    A << 0, 0, 1,
         0, 0, 1,
         1, -1, 0,
         -1, 1, 0,
         1, 0, 0;
    B.col(0) << 0, 0, 1;
    B.col(1) << 0, 0, 1;
    B.col(2) << 1, 0, 0;
    B.col(3) << 0, 1, 0;
    B.col(4) << 1, 1, 0;
    return A * B;
}

}  // namespace udnopt::testing
