#pragma once

#include <cstdint>
#include <vector>

#include "tabord/dataset.hpp"
#include "tabord/global_order.hpp"
#include "tabord/graph.hpp"
#include "tabord/rewiring.hpp"

namespace tabord {

/// Configuration of the full ordering pipeline (clustering through
/// aggregation). Rewiring settings apply to every cluster; each cluster's
/// rewiring stream is derived from the base seed and the cluster id.
struct OrderingConfig {
    int clusters = 12;
    EdgeMetric metric = EdgeMetric::euclidean;
    RewiringConfig rewiring;
    std::uint64_t seed = 0;
};

struct OrderingResult {
    DataMatrix standardized;
    ClusterAssignment assignment;
    std::vector<FeatureGraph> raw_graphs;
    std::vector<FeatureGraph> rewired_graphs;
    std::vector<LocalOrdering> locals;
    ClusterWeights alphas;
    GlobalOrdering global;
    double coherence = 0.0;  // P_g of the emitted order
};

/// standardize -> kmeans -> per-cluster graph + rewiring -> alpha weights ->
/// weighted aggregation. Deterministic for fixed (X, cfg).
inline OrderingResult run_ordering(const DataMatrix& X, const OrderingConfig& cfg) {
    OrderingResult res;
    res.standardized = standardize(X);
    const int n = static_cast<int>(X.rows());
    if (cfg.clusters > n) throw TooManyClustersError(cfg.clusters, n);
    res.assignment = kmeans(res.standardized, cfg.clusters, cfg.seed);

    for (int j = 0; j < cfg.clusters; ++j) {
        FeatureGraph g = build_graph(res.standardized, res.assignment, j, cfg.metric);
        res.raw_graphs.push_back(g);
        RewiringConfig rc = cfg.rewiring;
        rc.seed = detail::mix_seed(cfg.seed, 0x7265776972ULL, static_cast<std::uint64_t>(j));
        auto [rewired, local] = rewire_local(g, rc);
        res.rewired_graphs.push_back(std::move(rewired));
        res.locals.push_back(std::move(local));
    }

    res.alphas = cluster_alphas(res.assignment.centroids);
    res.global = aggregate(res.locals, res.rewired_graphs, res.alphas,
                           cfg.rewiring.direction);
    res.coherence = coherence_penalty(res.global.order, res.assignment.centroids);
    return res;
}

}  // namespace tabord
