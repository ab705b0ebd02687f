#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "tabord/dataset.hpp"
#include "tabord/errors.hpp"

namespace tabord {

enum class EdgeMetric { kl, euclidean, manhattan, variance, correlation };

inline EdgeMetric parse_metric(const std::string& s) {
    if (s == "kl") return EdgeMetric::kl;
    if (s == "euclidean") return EdgeMetric::euclidean;
    if (s == "manhattan") return EdgeMetric::manhattan;
    if (s == "variance") return EdgeMetric::variance;
    if (s == "correlation") return EdgeMetric::correlation;
    throw Error(ErrorKind::validation, "unknown edge metric: " + s);
}

inline std::string metric_name(EdgeMetric m) {
    switch (m) {
        case EdgeMetric::kl: return "kl";
        case EdgeMetric::euclidean: return "euclidean";
        case EdgeMetric::manhattan: return "manhattan";
        case EdgeMetric::variance: return "variance";
        case EdgeMetric::correlation: return "correlation";
    }
    return "?";
}

/// Hard sample-to-cluster assignment with centroids.
struct ClusterAssignment {
    int k = 0;
    std::vector<int> assignment;  // n entries in [0,k)
    Eigen::MatrixXd centroids;    // k x m
    std::vector<int> sizes;
};

/// Weighted undirected graph over the m features of one cluster.
/// Weights are similarities: build_graph kernelizes the dissimilarity
/// metric zeta so that strongly related feature pairs carry large weight
/// and the arrangement objective places them at nearby positions.
struct FeatureGraph {
    int cluster_id = 0;
    int num_vertices = 0;
    EdgeMetric metric = EdgeMetric::euclidean;
    Eigen::MatrixXd weights;                 // symmetric, zero diagonal
    std::vector<std::uint8_t> edge_present;  // row-major m*m adjacency
    bool fallback_whole_data = false;        // cluster had < 2 samples

    static FeatureGraph empty(int m) {
        FeatureGraph g;
        g.num_vertices = m;
        g.weights = Eigen::MatrixXd::Zero(m, m);
        g.edge_present.assign(static_cast<std::size_t>(m) * m, 0);
        return g;
    }

    bool has_edge(int u, int v) const {
        return u != v && edge_present[static_cast<std::size_t>(u) * num_vertices + v] != 0;
    }
    double weight(int u, int v) const { return weights(u, v); }

    void set_edge(int u, int v, double w) {
        weights(u, v) = weights(v, u) = w;
        edge_present[static_cast<std::size_t>(u) * num_vertices + v] = 1;
        edge_present[static_cast<std::size_t>(v) * num_vertices + u] = 1;
    }
    void remove_edge(int u, int v) {
        weights(u, v) = weights(v, u) = 0.0;
        edge_present[static_cast<std::size_t>(u) * num_vertices + v] = 0;
        edge_present[static_cast<std::size_t>(v) * num_vertices + u] = 0;
    }
    int edge_count() const {
        int c = 0;
        for (int u = 0; u < num_vertices; ++u)
            for (int v = u + 1; v < num_vertices; ++v)
                if (has_edge(u, v)) ++c;
        return c;
    }
};

/// Cluster importance weights, positive and summing to 1.
struct ClusterWeights {
    std::vector<double> alphas;
};

/// Lloyd's k-means with k-means++ style seeding. Deterministic for a given
/// seed; ties broken by lowest index; empty clusters are repaired by
/// reassigning the sample farthest from its centroid.
inline ClusterAssignment kmeans(const DataMatrix& X, int k, std::uint64_t seed,
                                int max_iters = 100,
                                std::vector<double>* objective_trace = nullptr) {
    const int n = static_cast<int>(X.rows()), m = static_cast<int>(X.cols());
    if (k < 1 || k > n) throw TooManyClustersError(k, n);

    std::mt19937_64 rng(seed);
    Eigen::MatrixXd centroids(k, m);

    // k-means++ seeding
    std::uniform_int_distribution<int> first(0, n - 1);
    centroids.row(0) = X.values.row(first(rng));
    Eigen::VectorXd d2 = (X.values.rowwise() - centroids.row(0)).rowwise().squaredNorm();
    for (int c = 1; c < k; ++c) {
        const double total = d2.sum();
        int pick = 0;
        if (total <= 0.0) {
            pick = first(rng);
        } else {
            std::uniform_real_distribution<double> u(0.0, total);
            double r = u(rng), acc = 0.0;
            for (int i = 0; i < n; ++i) {
                acc += d2(i);
                if (acc >= r) { pick = i; break; }
            }
        }
        centroids.row(c) = X.values.row(pick);
        d2 = d2.cwiseMin((X.values.rowwise() - centroids.row(c)).rowwise().squaredNorm());
    }

    std::vector<int> assign(n, 0);
    double prev_obj = std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < max_iters; ++iter) {
        double obj = 0.0;
        for (int i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            int bj = 0;
            for (int j = 0; j < k; ++j) {
                const double d = (X.values.row(i) - centroids.row(j)).squaredNorm();
                if (d < best - 1e-15) { best = d; bj = j; }
            }
            assign[i] = bj;
            obj += best;
        }
        if (objective_trace) objective_trace->push_back(obj);
        std::vector<int> sizes(k, 0);
        for (int a : assign) ++sizes[a];
        for (int j = 0; j < k; ++j) {
            if (sizes[j] > 0) continue;
            // repair: move the sample farthest from its centroid
            int worst = 0;
            double worst_d = -1.0;
            for (int i = 0; i < n; ++i) {
                if (sizes[assign[i]] <= 1) continue;
                const double d = (X.values.row(i) - centroids.row(assign[i])).squaredNorm();
                if (d > worst_d) { worst_d = d; worst = i; }
            }
            --sizes[assign[worst]];
            assign[worst] = j;
            ++sizes[j];
        }
        Eigen::MatrixXd next = Eigen::MatrixXd::Zero(k, m);
        for (int i = 0; i < n; ++i) next.row(assign[i]) += X.values.row(i);
        for (int j = 0; j < k; ++j) next.row(j) /= static_cast<double>(sizes[j]);
        centroids = next;
        if (std::abs(prev_obj - obj) < 1e-12) break;
        prev_obj = obj;
    }

    ClusterAssignment out;
    out.k = k;
    out.assignment = std::move(assign);
    out.centroids = std::move(centroids);
    out.sizes.assign(k, 0);
    for (int a : out.assignment) ++out.sizes[a];
    return out;
}

/// Dissimilarity zeta(u,v) >= 0 between two feature columns.
inline double edge_weight(const Eigen::VectorXd& col_u, const Eigen::VectorXd& col_v,
                          EdgeMetric metric, int kl_bins = 32) {
    if (col_u.size() != col_v.size())
        throw LengthMismatchError(static_cast<std::size_t>(col_u.size()),
                                  static_cast<std::size_t>(col_v.size()));
    if (col_u.size() < 2)
        throw Error(ErrorKind::validation, "edge_weight needs vectors of length >= 2");
    const Eigen::Index n = col_u.size();

    switch (metric) {
        case EdgeMetric::euclidean:
            return (col_u - col_v).norm();
        case EdgeMetric::manhattan:
            return (col_u - col_v).lpNorm<1>();
        case EdgeMetric::variance: {
            const auto var = [n](const Eigen::VectorXd& c) {
                return (c.array() - c.mean()).square().sum() / static_cast<double>(n - 1);
            };
            return std::abs(var(col_u) - var(col_v));
        }
        case EdgeMetric::correlation: {
            Eigen::VectorXd a = col_u.array() - col_u.mean();
            Eigen::VectorXd b = col_v.array() - col_v.mean();
            const double na = a.norm(), nb = b.norm();
            if (na <= 1e-15 || nb <= 1e-15) return 0.0;  // constant column, flagged upstream
            return 1.0 - std::abs(a.dot(b) / (na * nb));
        }
        case EdgeMetric::kl: {
            // Symmetrized KL over Laplace-smoothed histograms on shared bins.
            const double lo = std::min(col_u.minCoeff(), col_v.minCoeff());
            const double hi = std::max(col_u.maxCoeff(), col_v.maxCoeff());
            const double width = (hi > lo) ? (hi - lo) : 1.0;
            std::vector<double> p(kl_bins, 1e-6), q(kl_bins, 1e-6);
            for (Eigen::Index i = 0; i < n; ++i) {
                int bu = static_cast<int>((col_u(i) - lo) / width * kl_bins);
                int bv = static_cast<int>((col_v(i) - lo) / width * kl_bins);
                p[std::clamp(bu, 0, kl_bins - 1)] += 1.0;
                q[std::clamp(bv, 0, kl_bins - 1)] += 1.0;
            }
            const double sp = std::accumulate(p.begin(), p.end(), 0.0);
            const double sq = std::accumulate(q.begin(), q.end(), 0.0);
            double kl = 0.0;
            for (int b = 0; b < kl_bins; ++b) {
                const double pb = p[b] / sp, qb = q[b] / sq;
                kl += pb * std::log(pb / qb) + qb * std::log(qb / pb);
            }
            return std::max(kl, 0.0);
        }
    }
    return 0.0;
}

/// Complete similarity graph over all m features, evaluated on the rows of
/// one cluster. Dissimilarities are kernelized as w = exp(-zeta/mean zeta),
/// so related features (small zeta) get weights near 1.
inline FeatureGraph build_graph(const DataMatrix& X, const ClusterAssignment& assign,
                                int cluster_id, EdgeMetric metric, int kl_bins = 32) {
    const int n = static_cast<int>(X.rows()), m = static_cast<int>(X.cols());
    if (cluster_id < 0 || cluster_id >= assign.k)
        throw Error(ErrorKind::validation, "cluster id out of range");
    if (assign.sizes[cluster_id] == 0) throw EmptyClusterError(cluster_id);

    std::vector<int> rows;
    for (int i = 0; i < n; ++i)
        if (assign.assignment[i] == cluster_id) rows.push_back(i);
    bool fallback = false;
    if (rows.size() < 2) {  // too few samples for any metric; use all rows
        rows.resize(n);
        for (int i = 0; i < n; ++i) rows[i] = i;
        fallback = true;
    }

    Eigen::MatrixXd sub(static_cast<Eigen::Index>(rows.size()), m);
    for (std::size_t r = 0; r < rows.size(); ++r) sub.row(static_cast<Eigen::Index>(r)) = X.values.row(rows[r]);

    Eigen::MatrixXd zeta = Eigen::MatrixXd::Zero(m, m);
    double zsum = 0.0;
    int pairs = 0;
    for (int u = 0; u < m; ++u)
        for (int v = u + 1; v < m; ++v) {
            const double z = edge_weight(sub.col(u), sub.col(v), metric, kl_bins);
            zeta(u, v) = zeta(v, u) = z;
            zsum += z;
            ++pairs;
        }
    const double zmean = pairs > 0 ? zsum / pairs : 0.0;

    FeatureGraph g = FeatureGraph::empty(m);
    g.cluster_id = cluster_id;
    g.metric = metric;
    g.fallback_whole_data = fallback;
    for (int u = 0; u < m; ++u)
        for (int v = u + 1; v < m; ++v) {
            const double w = (zmean <= 1e-15) ? 1.0 : std::exp(-zeta(u, v) / zmean);
            g.set_edge(u, v, w);
        }
    return g;
}

/// Inverse-distance cluster weights: clusters close to the rest weigh more.
inline ClusterWeights cluster_alphas(const Eigen::MatrixXd& centroids, double eps = 1e-6) {
    const int k = static_cast<int>(centroids.rows());
    if (k < 1) throw Error(ErrorKind::validation, "need at least one centroid");
    if (eps <= 0.0) throw Error(ErrorKind::validation, "eps must be > 0");
    std::vector<double> raw(k, 0.0);
    if (k == 1) {
        raw[0] = 1.0;
    } else {
        for (int j = 0; j < k; ++j)
            for (int i = 0; i < k; ++i)
                if (i != j) raw[j] += 1.0 / ((centroids.row(j) - centroids.row(i)).norm() + eps);
    }
    const double total = std::accumulate(raw.begin(), raw.end(), 0.0);
    for (double& r : raw) r /= total;
    return {std::move(raw)};
}

}  // namespace tabord
