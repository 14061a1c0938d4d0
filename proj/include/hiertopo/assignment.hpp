#pragma once

// Exact minimum-cost perfect matching on a dense square cost matrix
// (Hungarian method with shortest augmenting paths, O(n^3)).

#include <hiertopo/errors.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

namespace hiertopo {

/// Returns row_to_col such that sum_i cost(i, row_to_col[i]) is minimal.
/// Costs must be finite.
inline std::vector<std::size_t> solve_assignment(const Eigen::MatrixXd& cost) {
    const auto n = static_cast<std::size_t>(cost.rows());
    if (cost.rows() != cost.cols()) throw DimensionMismatch("solve_assignment: cost matrix not square");
    if (!cost.allFinite()) throw ValidationError("solve_assignment: costs must be finite");
    if (n == 0) return {};

    constexpr double inf = std::numeric_limits<double>::infinity();
    // 1-based potentials; column 0 is a virtual source.
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), min_slack(n + 1);
    std::vector<std::size_t> col_owner(n + 1, 0), way(n + 1, 0);
    std::vector<char> used(n + 1);

    for (std::size_t row = 1; row <= n; ++row) {
        col_owner[0] = row;
        std::size_t j0 = 0;
        std::fill(min_slack.begin(), min_slack.end(), inf);
        std::fill(used.begin(), used.end(), 0);
        do {
            used[j0] = 1;
            const std::size_t i0 = col_owner[j0];
            double delta = inf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double slack = cost(static_cast<Eigen::Index>(i0 - 1), static_cast<Eigen::Index>(j - 1)) -
                                     u[i0] - v[j];
                if (slack < min_slack[j]) {
                    min_slack[j] = slack;
                    way[j] = j0;
                }
                if (min_slack[j] < delta) {
                    delta = min_slack[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[col_owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    min_slack[j] -= delta;
                }
            }
            j0 = j1;
        } while (col_owner[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            col_owner[j0] = col_owner[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    std::vector<std::size_t> row_to_col(n);
    for (std::size_t j = 1; j <= n; ++j) row_to_col[col_owner[j] - 1] = j - 1;
    return row_to_col;
}

}  // namespace hiertopo
