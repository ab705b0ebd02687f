// Brute-force and numerical oracles used by the test suite only.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

#include "tabord/global_order.hpp"
#include "tabord/graph.hpp"
#include "tabord/rewiring.hpp"

namespace oracles {

// Exhaustive minimum-arrangement search; feasible for m <= 8.
inline std::pair<std::vector<int>, double> best_order(const tabord::FeatureGraph& g) {
    const int m = g.num_vertices;
    std::vector<int> perm(m);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<int> best = perm;
    double best_q = std::numeric_limits<double>::infinity();
    do {
        const double q = tabord::dispersion(g, perm);
        if (q < best_q) {
            best_q = q;
            best = perm;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return {best, best_q};
}

inline std::pair<std::vector<int>, double> best_global(
    const std::vector<tabord::FeatureGraph>& graphs, const tabord::ClusterWeights& alphas) {
    const int m = graphs[0].num_vertices;
    std::vector<int> perm(m);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<int> best = perm;
    double best_g = std::numeric_limits<double>::infinity();
    do {
        const double s = tabord::global_dispersion(graphs, alphas, perm);
        if (s < best_g) {
            best_g = s;
            best = perm;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return {best, best_g};
}

// Max relative error between an analytic gradient and central differences.
// The denominator floor keeps near-zero coordinates on an absolute scale
// (1e-4 * floor), below which central differences are pure roundoff noise.
inline double max_fd_error(const std::function<double(const std::vector<double>&)>& f,
                           const std::vector<double>& at, const std::vector<double>& grad,
                           double h = 1e-5) {
    double worst = 0.0;
    std::vector<double> x = at;
    for (std::size_t i = 0; i < at.size(); ++i) {
        x[i] = at[i] + h;
        const double up = f(x);
        x[i] = at[i] - h;
        const double dn = f(x);
        x[i] = at[i];
        const double fd = (up - dn) / (2.0 * h);
        const double denom = std::max({std::abs(fd), std::abs(grad[i]), 1e-3});
        worst = std::max(worst, std::abs(fd - grad[i]) / denom);
    }
    return worst;
}

// Gradient descent on (psi/auc^s - 1)^2, the objective optimize_psi solves
// in closed form.
inline double gd_optimize_psi(double auc, double s, int iters = 20000, double lr = 0.01) {
    const double target = std::pow(auc, s);
    double psi = 0.5;
    for (int i = 0; i < iters; ++i) {
        const double r = psi / target - 1.0;
        psi -= lr * 2.0 * r / target;
    }
    return psi;
}

// Fraction of adjacent position pairs whose features share a block.
inline double block_contiguity(const std::vector<int>& order,
                               const std::vector<int>& block_of) {
    int same = 0;
    const int m = static_cast<int>(order.size());
    for (int p = 0; p + 1 < m; ++p)
        if (block_of[order[p]] == block_of[order[p + 1]]) ++same;
    // perfect score: every block occupies a contiguous run
    int blocks = 1 + *std::max_element(block_of.begin(), block_of.end());
    return static_cast<double>(same) / static_cast<double>(m - blocks);
}

}  // namespace oracles
