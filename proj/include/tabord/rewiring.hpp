#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include "tabord/errors.hpp"
#include "tabord/graph.hpp"

namespace tabord {

enum class CentralityKind { degree, betweenness, eigenvector };
enum class Direction { ascending, descending };

inline CentralityKind parse_centrality(const std::string& s) {
    if (s == "degree") return CentralityKind::degree;
    if (s == "betweenness") return CentralityKind::betweenness;
    if (s == "eigenvector") return CentralityKind::eigenvector;
    throw Error(ErrorKind::validation, "unknown centrality: " + s);
}

inline Direction parse_direction(const std::string& s) {
    if (s == "asc" || s == "ascending") return Direction::ascending;
    if (s == "desc" || s == "descending") return Direction::descending;
    throw Error(ErrorKind::validation, "unknown direction: " + s);
}

struct RewiringConfig {
    CentralityKind centrality = CentralityKind::degree;
    double learning_rate_lambda = 0.1;
    double decay_epsilon = 0.05;
    double prune_theta = 0.05;
    double tolerance = 0.021;
    double mutation_prob = 0.2;
    int max_rounds = 15;
    std::uint64_t seed = 0;
    Direction direction = Direction::ascending;
    double rewire_top_fraction = 0.25;  // clique over top ceil(m*frac) vertices
};

struct LocalOrdering {
    int cluster_id = 0;
    std::vector<int> order;  // order[p] = feature placed at position p
    std::vector<double> quality_history;
    int rounds_used = 0;
    bool converged = false;
};

struct RewireRoundTrace {
    int round = 0;
    double q = 0.0;
    int edges_pruned = 0;
    int edges_added = 0;
    bool mutated = false;
};

namespace detail {

inline void check_permutation(const std::vector<int>& order, int m) {
    if (static_cast<int>(order.size()) != m) throw NotAPermutationError();
    std::vector<bool> seen(m, false);
    for (int f : order) {
        if (f < 0 || f >= m || seen[f]) throw NotAPermutationError();
        seen[f] = true;
    }
}

inline std::vector<int> positions_of(const std::vector<int>& order) {
    std::vector<int> pos(order.size());
    for (std::size_t p = 0; p < order.size(); ++p) pos[order[p]] = static_cast<int>(p);
    return pos;
}

}  // namespace detail

/// Per-vertex influence scores in [0,1] (max-normalized).
inline Eigen::VectorXd centrality(const FeatureGraph& g, CentralityKind kind) {
    const int m = g.num_vertices;
    if (m == 0) throw Error(ErrorKind::validation, "empty graph");
    Eigen::VectorXd c = Eigen::VectorXd::Zero(m);

    switch (kind) {
        case CentralityKind::degree: {
            for (int u = 0; u < m; ++u)
                for (int v = 0; v < m; ++v)
                    if (g.has_edge(u, v)) c(u) += g.weight(u, v);
            break;
        }
        case CentralityKind::betweenness: {
            // Brandes with Dijkstra; edge length = weight.
            for (int s = 0; s < m; ++s) {
                std::vector<double> dist(m, std::numeric_limits<double>::infinity());
                std::vector<double> sigma(m, 0.0), delta(m, 0.0);
                std::vector<std::vector<int>> preds(m);
                std::vector<bool> done(m, false);
                dist[s] = 0.0;
                sigma[s] = 1.0;
                std::vector<int> settled;
                for (int it = 0; it < m; ++it) {
                    int u = -1;
                    double best = std::numeric_limits<double>::infinity();
                    for (int v = 0; v < m; ++v)
                        if (!done[v] && dist[v] < best) { best = dist[v]; u = v; }
                    if (u < 0) break;
                    done[u] = true;
                    settled.push_back(u);
                    for (int v = 0; v < m; ++v) {
                        if (!g.has_edge(u, v)) continue;
                        const double nd = dist[u] + g.weight(u, v);
                        const double tol = 1e-12 * (1.0 + std::abs(nd));
                        if (nd < dist[v] - tol) {
                            dist[v] = nd;
                            sigma[v] = sigma[u];
                            preds[v] = {u};
                        } else if (std::abs(nd - dist[v]) <= tol) {
                            sigma[v] += sigma[u];
                            preds[v].push_back(u);
                        }
                    }
                }
                for (auto it = settled.rbegin(); it != settled.rend(); ++it) {
                    const int w = *it;
                    for (int p : preds[w])
                        delta[p] += sigma[p] / sigma[w] * (1.0 + delta[w]);
                    if (w != s) c(w) += delta[w];
                }
            }
            if (m > 2) c /= static_cast<double>(m - 1) * (m - 2);  // pairs counted twice
            return c.cwiseMin(1.0);
        }
        case CentralityKind::eigenvector: {
            // shift by the max row sum so bipartite spectra (+/- pairs)
            // cannot make the iteration oscillate
            const double sigma = g.weights.cwiseAbs().rowwise().sum().maxCoeff() + 1.0;
            Eigen::VectorXd v = Eigen::VectorXd::Constant(m, 1.0 / std::sqrt(m));
            for (int it = 0; it < 1000; ++it) {
                Eigen::VectorXd next = g.weights * v + sigma * v;
                const double norm = next.norm();
                if (norm <= 1e-30) return Eigen::VectorXd::Zero(m);
                next /= norm;
                if ((next - v).cwiseAbs().maxCoeff() < 1e-9) { v = next; break; }
                v = next;
            }
            c = v.cwiseAbs();
            break;
        }
    }
    const double mx = c.maxCoeff();
    if (mx > 0.0) c /= mx;
    return c;
}

/// Weighted linear arrangement cost: sum of w(u,v) * |pos(u) - pos(v)|.
inline double dispersion(const FeatureGraph& g, const std::vector<int>& order) {
    detail::check_permutation(order, g.num_vertices);
    const std::vector<int> pos = detail::positions_of(order);
    double cost = 0.0;
    for (int u = 0; u < g.num_vertices; ++u)
        for (int v = u + 1; v < g.num_vertices; ++v)
            if (g.has_edge(u, v)) cost += g.weight(u, v) * std::abs(pos[u] - pos[v]);
    return cost;
}

/// Quality of a local ordering; same arrangement cost, minimized during
/// rewiring (similarity weights pull related features together).
inline double quality(const FeatureGraph& g, const std::vector<int>& order) {
    return dispersion(g, order);
}

namespace detail {

// Connected components over present edges; each sorted ascending.
inline std::vector<std::vector<int>> components(const FeatureGraph& g) {
    const int m = g.num_vertices;
    std::vector<int> comp(m, -1);
    std::vector<std::vector<int>> out;
    for (int s = 0; s < m; ++s) {
        if (comp[s] >= 0) continue;
        std::vector<int> stack = {s}, members;
        comp[s] = static_cast<int>(out.size());
        while (!stack.empty()) {
            const int u = stack.back();
            stack.pop_back();
            members.push_back(u);
            for (int v = 0; v < m; ++v)
                if (comp[v] < 0 && g.has_edge(u, v)) {
                    comp[v] = comp[s];
                    stack.push_back(v);
                }
        }
        std::sort(members.begin(), members.end());
        out.push_back(std::move(members));
    }
    return out;
}

}  // namespace detail

/// Spectral sequencing: features sorted by the Fiedler vector of the graph
/// Laplacian, ties broken by index. Disconnected graphs are ordered
/// component by component, heaviest total edge weight first. `descending`
/// reverses the full sequence.
inline std::vector<int> initial_order(const FeatureGraph& g,
                                      Direction direction = Direction::ascending) {
    const int m = g.num_vertices;
    if (m == 0) throw Error(ErrorKind::validation, "empty graph");

    auto comps = detail::components(g);
    std::vector<double> total_w(comps.size(), 0.0);
    for (std::size_t c = 0; c < comps.size(); ++c)
        for (std::size_t a = 0; a < comps[c].size(); ++a)
            for (std::size_t b = a + 1; b < comps[c].size(); ++b)
                if (g.has_edge(comps[c][a], comps[c][b]))
                    total_w[c] += g.weight(comps[c][a], comps[c][b]);
    std::vector<std::size_t> comp_order(comps.size());
    std::iota(comp_order.begin(), comp_order.end(), 0);
    std::sort(comp_order.begin(), comp_order.end(), [&](std::size_t a, std::size_t b) {
        if (total_w[a] != total_w[b]) return total_w[a] > total_w[b];
        return comps[a][0] < comps[b][0];
    });

    std::vector<int> order;
    order.reserve(m);
    for (std::size_t ci : comp_order) {
        const auto& verts = comps[ci];
        const int s = static_cast<int>(verts.size());
        if (s <= 2) {
            for (int v : verts) order.push_back(v);
            continue;
        }
        Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(s, s);
        for (int a = 0; a < s; ++a)
            for (int b = 0; b < s; ++b)
                if (a != b && g.has_edge(verts[a], verts[b])) {
                    const double w = g.weight(verts[a], verts[b]);
                    lap(a, b) -= w;
                    lap(a, a) += w;
                }
        Eigen::VectorXd fiedler;
        if (s <= 32) {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(lap);
            fiedler = es.eigenvectors().col(1);
        } else {
            // Shifted power iteration on sigma*I - L, deflating the constant
            // eigenvector; keeps large components quadratic per iteration.
            const double sigma = 2.0 * lap.diagonal().maxCoeff() + 1.0;
            Eigen::VectorXd v(s);
            for (int i = 0; i < s; ++i) v(i) = i - (s - 1) / 2.0;
            v /= v.norm();
            for (int it = 0; it < 2000; ++it) {
                Eigen::VectorXd next = sigma * v - lap * v;
                next.array() -= next.mean();
                const double norm = next.norm();
                if (norm <= 1e-30) break;
                next /= norm;
                const double delta = std::min((next - v).cwiseAbs().maxCoeff(),
                                              (next + v).cwiseAbs().maxCoeff());
                v = next;
                if (delta < 1e-12) break;
            }
            fiedler = v;
        }
        for (int a = 0; a < s; ++a) {
            if (std::abs(fiedler(a)) > 1e-9) {
                if (fiedler(a) > 0.0) fiedler = -fiedler;  // canonical sign
                break;
            }
        }
        std::vector<int> idx(s);
        std::iota(idx.begin(), idx.end(), 0);
        std::sort(idx.begin(), idx.end(), [&](int a, int b) {
            if (fiedler(a) != fiedler(b)) return fiedler(a) < fiedler(b);
            return verts[a] < verts[b];
        });
        for (int a : idx) order.push_back(verts[a]);
    }
    if (direction == Direction::descending) std::reverse(order.begin(), order.end());
    return order;
}

/// Centrality-driven Hebbian step on every existing edge:
/// w' = max(0, w + lambda*C(u)*C(v) - eps*w).
inline FeatureGraph hebbian_update(const FeatureGraph& g, const Eigen::VectorXd& c,
                                   double lambda, double eps) {
    if (c.size() != g.num_vertices)
        throw LengthMismatchError(static_cast<std::size_t>(c.size()),
                                  static_cast<std::size_t>(g.num_vertices));
    FeatureGraph out = g;
    for (int u = 0; u < g.num_vertices; ++u)
        for (int v = u + 1; v < g.num_vertices; ++v)
            if (g.has_edge(u, v)) {
                const double w = g.weight(u, v) + lambda * c(u) * c(v) - eps * g.weight(u, v);
                out.set_edge(u, v, std::max(0.0, w));
            }
    return out;
}

/// Drop edges below theta, then complete the clique among the top
/// ceil(m*top_fraction) vertices by centrality; a freshly created edge
/// starts at max(0, lambda*C(u)*C(v)) (absent edge counts as weight 0).
inline FeatureGraph prune_and_rewire(const FeatureGraph& g, const Eigen::VectorXd& c,
                                     double theta, double lambda, double eps,
                                     double top_fraction = 0.25, int* pruned = nullptr,
                                     int* added = nullptr) {
    (void)eps;  // absent edges have zero prior weight, so the decay term vanishes
    if (theta < 0.0) throw Error(ErrorKind::validation, "theta must be >= 0");
    const int m = g.num_vertices;
    FeatureGraph out = g;
    int n_pruned = 0, n_added = 0;
    for (int u = 0; u < m; ++u)
        for (int v = u + 1; v < m; ++v)
            if (out.has_edge(u, v) && out.weight(u, v) < theta) {
                out.remove_edge(u, v);
                ++n_pruned;
            }
    const int top = std::min(m, static_cast<int>(std::ceil(m * top_fraction)));
    std::vector<int> idx(m);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
        if (c(a) != c(b)) return c(a) > c(b);
        return a < b;
    });
    for (int a = 0; a < top; ++a)
        for (int b = a + 1; b < top; ++b) {
            const int u = idx[a], v = idx[b];
            if (!out.has_edge(u, v)) {
                out.set_edge(u, v, std::max(0.0, lambda * c(u) * c(v)));
                ++n_added;
            }
        }
    if (pruned) *pruned = n_pruned;
    if (added) *added = n_added;
    return out;
}

/// Iterative rewiring loop: centrality -> prune/rewire -> Hebbian update ->
/// spectral re-ordering. A candidate order is accepted only if it does not
/// increase the arrangement quality on the input metric graph, so the
/// quality history is non-increasing. Stops when |dQ| < tolerance (with an
/// optional improving transposition, applied with probability mutation_prob)
/// or after max_rounds.
inline std::pair<FeatureGraph, LocalOrdering> rewire_local(
    const FeatureGraph& g, const RewiringConfig& cfg,
    std::vector<RewireRoundTrace>* trace = nullptr) {
    if (cfg.tolerance <= 0.0 || cfg.max_rounds < 1)
        throw Error(ErrorKind::validation, "invalid rewiring config");

    LocalOrdering lo;
    lo.cluster_id = g.cluster_id;
    lo.order = initial_order(g, cfg.direction);
    double qc = quality(g, lo.order);
    lo.quality_history.push_back(qc);

    FeatureGraph work = g;
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    for (int round = 1; round <= cfg.max_rounds; ++round) {
        lo.rounds_used = round;
        const Eigen::VectorXd c = centrality(work, cfg.centrality);
        int pruned = 0, added = 0;
        work = prune_and_rewire(work, c, cfg.prune_theta, cfg.learning_rate_lambda,
                                cfg.decay_epsilon, cfg.rewire_top_fraction, &pruned, &added);
        work = hebbian_update(work, c, cfg.learning_rate_lambda, cfg.decay_epsilon);

        const std::vector<int> cand = initial_order(work, cfg.direction);
        const double q_cand = quality(g, cand);
        const double dq = q_cand - qc;
        if (q_cand <= qc) {
            lo.order = cand;
            qc = q_cand;
            lo.quality_history.push_back(qc);
        }

        bool mutated = false;
        const bool stop = std::abs(dq) < cfg.tolerance;
        if (stop && cfg.mutation_prob > 0.0 && unit(rng) < cfg.mutation_prob) {
            const int m = g.num_vertices;
            if (m >= 2) {
                std::uniform_int_distribution<int> pick(0, m - 1);
                int a = pick(rng), b = pick(rng);
                while (b == a) b = pick(rng);
                std::vector<int> mut = lo.order;
                std::swap(mut[a], mut[b]);
                const double q_mut = quality(g, mut);
                if (q_mut < qc) {
                    lo.order = std::move(mut);
                    qc = q_mut;
                    lo.quality_history.push_back(qc);
                    mutated = true;
                }
            }
        }
        if (trace) trace->push_back({round, qc, pruned, added, mutated});
        if (stop) {
            lo.converged = true;
            break;
        }
    }
    return {std::move(work), std::move(lo)};
}

}  // namespace tabord
