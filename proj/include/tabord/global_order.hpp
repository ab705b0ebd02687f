#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "tabord/dataset.hpp"
#include "tabord/errors.hpp"
#include "tabord/graph.hpp"
#include "tabord/rewiring.hpp"

namespace tabord {

/// Global feature permutation with its provenance.
struct GlobalOrdering {
    std::vector<int> order;  // order[p] = feature at position p
    ClusterWeights alphas;
    std::vector<LocalOrdering> local;
    double score = 0.0;  // weighted arrangement cost on the rewired graphs
};

/// Weighted global arrangement cost G = sum_j alpha_j * dispersion_j.
inline double global_dispersion(const std::vector<FeatureGraph>& graphs,
                                const ClusterWeights& alphas, const std::vector<int>& order) {
    if (graphs.size() != alphas.alphas.size())
        throw Error(ErrorKind::validation, "graphs/alphas size mismatch");
    double g = 0.0;
    for (std::size_t j = 0; j < graphs.size(); ++j)
        g += alphas.alphas[j] * dispersion(graphs[j], order);
    return g;
}

/// Alpha-weighted Borda aggregation of the local orderings followed by a
/// greedy adjacent-swap descent on the weighted cost G evaluated with the
/// clusters' rewired graphs. The post-pass never increases G.
inline GlobalOrdering aggregate(const std::vector<LocalOrdering>& locals,
                                const std::vector<FeatureGraph>& graphs,
                                const ClusterWeights& alphas,
                                Direction direction = Direction::ascending) {
    if (locals.empty() || locals.size() != alphas.alphas.size() ||
        locals.size() != graphs.size())
        throw InconsistentFeatureSetsError();
    const int m = static_cast<int>(locals[0].order.size());
    for (const auto& lo : locals) {
        if (static_cast<int>(lo.order.size()) != m) throw InconsistentFeatureSetsError();
        detail::check_permutation(lo.order, m);
    }

    std::vector<double> key(m, 0.0);
    for (std::size_t j = 0; j < locals.size(); ++j) {
        const std::vector<int> pos = detail::positions_of(locals[j].order);
        for (int f = 0; f < m; ++f) key[f] += alphas.alphas[j] * pos[f];
    }
    std::vector<int> order(m);
    std::iota(order.begin(), order.end(), 0);
    const bool desc = direction == Direction::descending;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (key[a] != key[b]) return desc ? key[a] > key[b] : key[a] < key[b];
        return a < b;
    });

    // adjacent-swap descent, accepted only on strict improvement. The
    // weighted objective is linear in the per-cluster weights, so one
    // combined weight matrix suffices and each swap is an O(m) delta.
    Eigen::MatrixXd W = Eigen::MatrixXd::Zero(m, m);
    for (std::size_t j = 0; j < graphs.size(); ++j) W += alphas.alphas[j] * graphs[j].weights;
    std::vector<int> pos = detail::positions_of(order);
    bool improved = true;
    while (improved) {
        improved = false;
        for (int p = 0; p + 1 < m; ++p) {
            const int u = order[p], v = order[p + 1];
            double delta = 0.0;
            for (int x = 0; x < m; ++x) {
                if (x == u || x == v) continue;
                const double du = std::abs(p + 1 - pos[x]) - std::abs(p - pos[x]);
                delta += W(u, x) * du - W(v, x) * du;
            }
            if (delta < -1e-12) {
                std::swap(order[p], order[p + 1]);
                pos[u] = p + 1;
                pos[v] = p;
                improved = true;
            }
        }
    }
    const double score = global_dispersion(graphs, alphas, order);

    GlobalOrdering g;
    g.order = std::move(order);
    g.alphas = alphas;
    g.local = locals;
    g.score = score;
    return g;
}

/// Mean pairwise position distance weighted by inverse distance between the
/// features' cluster-centroid profiles c_u (columns of the centroid matrix).
inline double coherence_penalty(const std::vector<int>& order,
                                const Eigen::MatrixXd& centroid_feature_means,
                                double eps = 1e-6) {
    if (eps <= 0.0) throw Error(ErrorKind::validation, "eps must be > 0");
    const int m = static_cast<int>(centroid_feature_means.cols());
    detail::check_permutation(order, m);
    if (m < 2) return 0.0;
    const std::vector<int> pos = detail::positions_of(order);
    double acc = 0.0;
    for (int u = 0; u < m; ++u)
        for (int v = u + 1; v < m; ++v) {
            const double d =
                (centroid_feature_means.col(u) - centroid_feature_means.col(v)).norm();
            acc += std::abs(pos[u] - pos[v]) / (d + eps);
        }
    return acc / (static_cast<double>(m) * (m - 1) / 2.0);
}

/// Reorder columns (and names) of X; values are preserved bitwise.
inline DataMatrix apply_permutation(const DataMatrix& X, const std::vector<int>& order) {
    const int m = static_cast<int>(X.cols());
    detail::check_permutation(order, m);
    DataMatrix out = X;
    for (int p = 0; p < m; ++p) {
        out.values.col(p) = X.values.col(order[p]);
        out.column_names[p] = X.column_names[order[p]];
        if (!X.zero_variance.empty()) out.zero_variance[p] = X.zero_variance[order[p]];
    }
    return out;
}

}  // namespace tabord
