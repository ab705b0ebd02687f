#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "tabord/dataset.hpp"
#include "tabord/errors.hpp"
#include "tabord/global_order.hpp"
#include "tabord/graph.hpp"

namespace tabord {

enum class LossMode { dfo, dispersion };
enum class TaskLoss { bce, cce, mse };

struct LossConfig {
    LossMode mode = LossMode::dfo;
    double lambda_d = 0.4;
    double lambda_g = 0.3;
    double lambda_reg = 0.0;
    TaskLoss task = TaskLoss::bce;
    std::vector<double> class_weights;  // empty = unweighted

    void validate() const {
        if (mode == LossMode::dfo) {
            if (lambda_d < 0.0 || lambda_g < 0.0 || lambda_d + lambda_g > 1.0 + 1e-12)
                throw InvalidLambdasError("need lambda_d, lambda_g >= 0 and lambda_d + lambda_g <= 1");
        } else {
            if (lambda_reg < 0.0 || lambda_reg > 1.0)
                throw InvalidLambdasError("need lambda_reg in [0,1]");
        }
    }
};

struct FusionConfig {
    int m = 0;        // features / sequence length
    int d = 16;       // token dimension
    int d_k = 16;     // attention key dimension
    int outputs = 1;  // 1 for binary/regression, C for multiclass
    int window = 0;   // 0 = full causal (window = m)
};

/// Ordering-derived per-feature importance in [0,1].
struct ImportanceScores {
    std::vector<double> gamma;
};

/// All trainable tensors of the fusion stack, with paired gradient slots.
struct FusionParams {
    Eigen::MatrixXd value_w, value_b, pos;  // m x d
    double gate_w = 0.0, gate_b = 0.0;
    Eigen::MatrixXd wq, wk, wv;  // d x d_k
    Eigen::MatrixXd wo;          // d_k x d
    Eigen::MatrixXd head_w;      // d x outputs
    Eigen::VectorXd head_b;      // outputs

    Eigen::MatrixXd g_value_w, g_value_b, g_pos;
    double g_gate_w = 0.0, g_gate_b = 0.0;
    Eigen::MatrixXd g_wq, g_wk, g_wv, g_wo, g_head_w;
    Eigen::VectorXd g_head_b;

    static FusionParams zeros(const FusionConfig& cfg) {
        FusionParams p;
        p.value_w = Eigen::MatrixXd::Zero(cfg.m, cfg.d);
        p.value_b = Eigen::MatrixXd::Zero(cfg.m, cfg.d);
        p.pos = Eigen::MatrixXd::Zero(cfg.m, cfg.d);
        p.wq = Eigen::MatrixXd::Zero(cfg.d, cfg.d_k);
        p.wk = Eigen::MatrixXd::Zero(cfg.d, cfg.d_k);
        p.wv = Eigen::MatrixXd::Zero(cfg.d, cfg.d_k);
        p.wo = Eigen::MatrixXd::Zero(cfg.d_k, cfg.d);
        p.head_w = Eigen::MatrixXd::Zero(cfg.d, cfg.outputs);
        p.head_b = Eigen::VectorXd::Zero(cfg.outputs);
        p.zero_grad();
        return p;
    }

    static FusionParams random_init(const FusionConfig& cfg, std::uint64_t seed) {
        FusionParams p = zeros(cfg);
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> u(-0.1, 0.1);
        auto fill = [&](Eigen::MatrixXd& mat) {
            for (Eigen::Index i = 0; i < mat.rows(); ++i)
                for (Eigen::Index j = 0; j < mat.cols(); ++j) mat(i, j) = u(rng);
        };
        fill(p.value_w);
        fill(p.value_b);
        fill(p.pos);
        p.gate_w = u(rng);
        p.gate_b = u(rng);
        fill(p.wq);
        fill(p.wk);
        fill(p.wv);
        fill(p.wo);
        fill(p.head_w);
        for (Eigen::Index i = 0; i < p.head_b.size(); ++i) p.head_b(i) = u(rng);
        return p;
    }

    void zero_grad() {
        g_value_w = Eigen::MatrixXd::Zero(value_w.rows(), value_w.cols());
        g_value_b = g_value_w;
        g_pos = g_value_w;
        g_gate_w = g_gate_b = 0.0;
        g_wq = Eigen::MatrixXd::Zero(wq.rows(), wq.cols());
        g_wk = g_wq;
        g_wv = g_wq;
        g_wo = Eigen::MatrixXd::Zero(wo.rows(), wo.cols());
        g_head_w = Eigen::MatrixXd::Zero(head_w.rows(), head_w.cols());
        g_head_b = Eigen::VectorXd::Zero(head_b.size());
    }

    void sgd_step(double lr) {
        value_w -= lr * g_value_w;
        value_b -= lr * g_value_b;
        pos -= lr * g_pos;
        gate_w -= lr * g_gate_w;
        gate_b -= lr * g_gate_b;
        wq -= lr * g_wq;
        wk -= lr * g_wk;
        wv -= lr * g_wv;
        wo -= lr * g_wo;
        head_w -= lr * g_head_w;
        head_b -= lr * g_head_b;
    }

    // Flat views, used by the checkpoint format and finite-difference tests.
    std::vector<double> flatten() const {
        std::vector<double> out;
        auto push = [&](const Eigen::MatrixXd& mat) {
            out.insert(out.end(), mat.data(), mat.data() + mat.size());
        };
        push(value_w);
        push(value_b);
        push(pos);
        out.push_back(gate_w);
        out.push_back(gate_b);
        push(wq);
        push(wk);
        push(wv);
        push(wo);
        push(head_w);
        out.insert(out.end(), head_b.data(), head_b.data() + head_b.size());
        return out;
    }

    std::vector<double> flatten_grad() const {
        FusionParams tmp = *this;
        tmp.value_w = g_value_w;
        tmp.value_b = g_value_b;
        tmp.pos = g_pos;
        tmp.gate_w = g_gate_w;
        tmp.gate_b = g_gate_b;
        tmp.wq = g_wq;
        tmp.wk = g_wk;
        tmp.wv = g_wv;
        tmp.wo = g_wo;
        tmp.head_w = g_head_w;
        tmp.head_b = g_head_b;
        return tmp.flatten();
    }

    void unflatten(const std::vector<double>& flat) {
        std::size_t at = 0;
        auto pull = [&](Eigen::MatrixXd& mat) {
            std::copy(flat.begin() + at, flat.begin() + at + mat.size(), mat.data());
            at += static_cast<std::size_t>(mat.size());
        };
        pull(value_w);
        pull(value_b);
        pull(pos);
        gate_w = flat[at++];
        gate_b = flat[at++];
        pull(wq);
        pull(wk);
        pull(wv);
        pull(wo);
        pull(head_w);
        std::copy(flat.begin() + at, flat.begin() + at + head_b.size(), head_b.data());
    }
};

/// Gamma from rewired graph structure: alpha-weighted incident edge weight
/// per feature, min-max normalized (constant profiles map to 0.5).
inline ImportanceScores importance_scores(const std::vector<FeatureGraph>& graphs,
                                          const ClusterWeights& alphas) {
    if (graphs.empty() || graphs.size() != alphas.alphas.size())
        throw Error(ErrorKind::validation, "graphs/alphas size mismatch");
    const int m = graphs[0].num_vertices;
    std::vector<double> raw(m, 0.0);
    for (std::size_t j = 0; j < graphs.size(); ++j)
        for (int u = 0; u < m; ++u)
            for (int v = 0; v < m; ++v)
                if (graphs[j].has_edge(u, v)) raw[u] += alphas.alphas[j] * graphs[j].weight(u, v);
    const double lo = *std::min_element(raw.begin(), raw.end());
    const double hi = *std::max_element(raw.begin(), raw.end());
    if (hi - lo < 1e-15) return {std::vector<double>(m, 0.5)};
    for (double& r : raw) r = (r - lo) / (hi - lo);
    return {std::move(raw)};
}

/// Per-feature linear lift of the scalar value plus learned positional
/// embedding: token_p = value_w_p * x_p + value_b_p + pos_p.
inline Eigen::MatrixXd ope_forward(const Eigen::VectorXd& x_row, const FusionParams& p) {
    if (x_row.size() != p.value_w.rows())
        throw ShapeMismatchError("ope input length vs embedding rows");
    Eigen::MatrixXd tokens = p.value_b + p.pos;
    for (Eigen::Index f = 0; f < x_row.size(); ++f) tokens.row(f) += p.value_w.row(f) * x_row(f);
    return tokens;
}

/// Sigmoid importance gate sigma(gate_w*gamma + gate_b) scaling each token row.
inline Eigen::MatrixXd pigl_forward(const Eigen::MatrixXd& tokens,
                                    const Eigen::VectorXd& gamma, const FusionParams& p) {
    if (gamma.size() != tokens.rows()) throw ShapeMismatchError("gamma length vs token rows");
    Eigen::MatrixXd out = tokens;
    for (Eigen::Index f = 0; f < tokens.rows(); ++f) {
        const double gate = 1.0 / (1.0 + std::exp(-(p.gate_w * gamma(f) + p.gate_b)));
        out.row(f) *= gate;
    }
    return out;
}

/// Additive attention mask: entry (p,q) is 0 iff q <= p and p-q <= window,
/// -inf otherwise. window = m gives the full causal mask.
inline Eigen::MatrixXd dma_mask(int m, int window) {
    if (window < 1 || window > m) throw InvalidWindowError(window, m);
    const double neg_inf = -std::numeric_limits<double>::infinity();
    Eigen::MatrixXd mask = Eigen::MatrixXd::Constant(m, m, neg_inf);
    for (int p = 0; p < m; ++p)
        for (int q = 0; q <= p; ++q)
            if (p - q <= window) mask(p, q) = 0.0;
    return mask;
}

namespace detail {

inline Eigen::MatrixXd masked_softmax_rows(const Eigen::MatrixXd& scores) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(scores.rows(), scores.cols());
    for (Eigen::Index p = 0; p < scores.rows(); ++p) {
        double mx = -std::numeric_limits<double>::infinity();
        for (Eigen::Index q = 0; q < scores.cols(); ++q) mx = std::max(mx, scores(p, q));
        double sum = 0.0;
        for (Eigen::Index q = 0; q < scores.cols(); ++q) {
            const double e = std::exp(scores(p, q) - mx);  // exp(-inf) == 0
            a(p, q) = e;
            sum += e;
        }
        a.row(p) /= sum;
    }
    return a;
}

}  // namespace detail

/// Scaled dot-product attention with additive mask and residual connection.
/// Optionally reports the attention weight matrix.
inline Eigen::MatrixXd masked_attention(const Eigen::MatrixXd& tokens,
                                        const Eigen::MatrixXd& mask, const FusionParams& p,
                                        Eigen::MatrixXd* attn_weights = nullptr) {
    if (mask.rows() != tokens.rows() || mask.cols() != tokens.rows())
        throw ShapeMismatchError("mask vs token count");
    const double scale = 1.0 / std::sqrt(static_cast<double>(p.wq.cols()));
    const Eigen::MatrixXd q = tokens * p.wq;
    const Eigen::MatrixXd k = tokens * p.wk;
    const Eigen::MatrixXd v = tokens * p.wv;
    const Eigen::MatrixXd a = detail::masked_softmax_rows(q * k.transpose() * scale + mask);
    if (attn_weights) *attn_weights = a;
    return tokens + a * v * p.wo;
}

/// Mean absolute difference between adjacent reordered columns.
inline double dispersion_penalty(const Eigen::MatrixXd& batch) {
    const int m = static_cast<int>(batch.cols());
    if (m < 2) throw TooFewFeaturesError(m);
    double acc = 0.0;
    for (Eigen::Index i = 0; i < batch.rows(); ++i)
        for (int j = 0; j + 1 < m; ++j) acc += std::abs(batch(i, j) - batch(i, j + 1));
    return acc / static_cast<double>(batch.rows());
}

/// Combine the task loss with the dispersion and coherence penalties.
inline double train_loss(double task_loss, double p_d, double p_g, const LossConfig& cfg) {
    cfg.validate();
    if (cfg.mode == LossMode::dfo)
        return cfg.lambda_d * p_d + cfg.lambda_g * p_g +
               (1.0 - cfg.lambda_d - cfg.lambda_g) * task_loss;
    return cfg.lambda_reg * p_d + (1.0 - cfg.lambda_reg) * task_loss;
}

namespace detail {

inline double sample_weight(const LossConfig& cfg, double label) {
    if (cfg.class_weights.empty()) return 1.0;
    const int c = static_cast<int>(std::lround(label));
    if (c < 0 || c >= static_cast<int>(cfg.class_weights.size()))
        throw Error(ErrorKind::validation, "label outside class_weights range");
    return cfg.class_weights[static_cast<std::size_t>(c)];
}

// Task loss and d(loss)/d(logits) for one sample.
inline double task_loss_and_grad(const Eigen::VectorXd& logits, double label,
                                 const LossConfig& cfg, Eigen::VectorXd& dlogits) {
    const double w = sample_weight(cfg, label);
    switch (cfg.task) {
        case TaskLoss::mse: {
            const double diff = logits(0) - label;
            dlogits = Eigen::VectorXd::Constant(1, 2.0 * diff);
            return diff * diff;
        }
        case TaskLoss::bce: {
            const double z = logits(0);
            // softplus(z) - y*z, numerically stable
            const double loss = (z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z))) -
                                label * z;
            const double p = 1.0 / (1.0 + std::exp(-z));
            dlogits = Eigen::VectorXd::Constant(1, w * (p - label));
            return w * loss;
        }
        case TaskLoss::cce: {
            const int c = static_cast<int>(std::lround(label));
            if (c < 0 || c >= logits.size())
                throw Error(ErrorKind::validation, "class label outside logit range");
            const double mx = logits.maxCoeff();
            const double lse = mx + std::log((logits.array() - mx).exp().sum());
            Eigen::VectorXd p = (logits.array() - lse).exp();
            dlogits = w * p;
            dlogits(c) -= w;
            return w * (lse - logits(c));
        }
    }
    return 0.0;
}

}  // namespace detail

struct BatchEval {
    double task_loss = 0.0;
    double p_d = 0.0;
    double p_g = 0.0;
    double total = 0.0;
    Eigen::MatrixXd predictions;  // n x outputs, after the task link
};

/// Full-batch forward pass, and analytic gradients of the training loss
/// when with_grad is set. Inputs are assumed already reordered; gamma is
/// aligned to positions. p_g is an ordering constant (no parameter grad).
inline BatchEval evaluate(const Eigen::MatrixXd& x, const std::vector<double>& labels,
                          const Eigen::VectorXd& gamma, FusionParams& p,
                          const FusionConfig& cfg, const LossConfig& lc, double p_g,
                          bool with_grad) {
    lc.validate();
    const int n = static_cast<int>(x.rows()), m = cfg.m;
    if (static_cast<int>(x.cols()) != m) throw ShapeMismatchError("batch columns vs config m");
    if (static_cast<int>(labels.size()) != n)
        throw ShapeMismatchError("label count vs batch rows");

    const int window = cfg.window > 0 ? cfg.window : m;
    const Eigen::MatrixXd mask = dma_mask(m, window);
    const double scale = 1.0 / std::sqrt(static_cast<double>(cfg.d_k));
    const double inv_n = 1.0 / static_cast<double>(n);
    const double task_scale =
        lc.mode == LossMode::dfo ? (1.0 - lc.lambda_d - lc.lambda_g) : (1.0 - lc.lambda_reg);

    Eigen::VectorXd gates(m), gate_deriv(m);
    for (int f = 0; f < m; ++f) {
        const double s = 1.0 / (1.0 + std::exp(-(p.gate_w * gamma(f) + p.gate_b)));
        gates(f) = s;
        gate_deriv(f) = s * (1.0 - s);
    }

    if (with_grad) p.zero_grad();
    BatchEval ev;
    ev.predictions.resize(n, cfg.outputs);
    double task_acc = 0.0;

    for (int i = 0; i < n; ++i) {
        const Eigen::VectorXd x_row = x.row(i).transpose();
        const Eigen::MatrixXd t0 = ope_forward(x_row, p);
        Eigen::MatrixXd t1 = t0;
        for (int f = 0; f < m; ++f) t1.row(f) *= gates(f);
        const Eigen::MatrixXd q = t1 * p.wq;
        const Eigen::MatrixXd k = t1 * p.wk;
        const Eigen::MatrixXd v = t1 * p.wv;
        const Eigen::MatrixXd a = detail::masked_softmax_rows(q * k.transpose() * scale + mask);
        const Eigen::MatrixXd z = a * v;
        const Eigen::MatrixXd o = t1 + z * p.wo;
        const Eigen::VectorXd h = o.colwise().mean().transpose();
        const Eigen::VectorXd logits = p.head_w.transpose() * h + p.head_b;

        // task link for reporting
        switch (lc.task) {
            case TaskLoss::mse:
                ev.predictions(i, 0) = logits(0);
                break;
            case TaskLoss::bce:
                ev.predictions(i, 0) = 1.0 / (1.0 + std::exp(-logits(0)));
                break;
            case TaskLoss::cce: {
                const double mx = logits.maxCoeff();
                Eigen::VectorXd e = (logits.array() - mx).exp();
                ev.predictions.row(i) = (e / e.sum()).transpose();
                break;
            }
        }

        Eigen::VectorXd dlogits;
        task_acc += detail::task_loss_and_grad(logits, labels[i], lc, dlogits);
        if (!with_grad) continue;

        // chain rule back through head, pooling, attention, gate, embeddings
        dlogits *= task_scale * inv_n;
        p.g_head_w += h * dlogits.transpose();
        p.g_head_b += dlogits;
        const Eigen::VectorXd dh = p.head_w * dlogits;
        Eigen::MatrixXd dout =
            Eigen::VectorXd::Constant(m, 1.0 / m) * dh.transpose();  // m x d

        Eigen::MatrixXd dt1 = dout;
        const Eigen::MatrixXd dz = dout * p.wo.transpose();
        p.g_wo += z.transpose() * dout;
        const Eigen::MatrixXd da = dz * v.transpose();
        Eigen::MatrixXd dv = a.transpose() * dz;
        Eigen::MatrixXd ds(m, m);
        for (int r = 0; r < m; ++r) {
            const double dot = da.row(r).dot(a.row(r));
            ds.row(r) = a.row(r).cwiseProduct((da.row(r).array() - dot).matrix());
        }
        const Eigen::MatrixXd dq = ds * k * scale;
        const Eigen::MatrixXd dk = ds.transpose() * q * scale;
        p.g_wq += t1.transpose() * dq;
        p.g_wk += t1.transpose() * dk;
        p.g_wv += t1.transpose() * dv;
        dt1 += dq * p.wq.transpose() + dk * p.wk.transpose() + dv * p.wv.transpose();

        for (int f = 0; f < m; ++f) {
            const double dgate = dt1.row(f).dot(t0.row(f));
            const double dact = dgate * gate_deriv(f);
            p.g_gate_w += dact * gamma(f);
            p.g_gate_b += dact;
            const Eigen::RowVectorXd dt0 = dt1.row(f) * gates(f);
            p.g_value_w.row(f) += dt0 * x_row(f);
            p.g_value_b.row(f) += dt0;
            p.g_pos.row(f) += dt0;
        }
    }

    ev.task_loss = task_acc * inv_n;
    ev.p_d = dispersion_penalty(x);
    ev.p_g = p_g;
    ev.total = train_loss(ev.task_loss, ev.p_d, ev.p_g, lc);
    return ev;
}

/// Single-sample pipeline: prediction (after the task link) and total loss.
inline std::pair<Eigen::VectorXd, double> forward(const Eigen::VectorXd& x_row, double label,
                                                  const Eigen::VectorXd& gamma,
                                                  FusionParams& p, const FusionConfig& cfg,
                                                  const LossConfig& lc, double p_g = 0.0) {
    Eigen::MatrixXd batch = x_row.transpose();
    const BatchEval ev = evaluate(batch, {label}, gamma, p, cfg, lc, p_g, false);
    return {ev.predictions.row(0).transpose(), ev.total};
}

struct EpochStats {
    double task_loss = 0.0, p_d = 0.0, p_g = 0.0, total = 0.0;
};

struct FitResult {
    FusionParams params;
    std::vector<EpochStats> trace;
};

/// Deterministic full-batch gradient descent on reordered, labeled data.
inline FitResult fit(const DataMatrix& X, const GlobalOrdering& ordering,
                     const ImportanceScores& gamma, const FusionConfig& cfg,
                     const LossConfig& lc, int epochs, double lr, std::uint64_t seed,
                     double p_g = 0.0) {
    if (!X.has_labels()) throw UnlabeledDataError();
    const DataMatrix xr = apply_permutation(X, ordering.order);
    const int m = static_cast<int>(xr.cols());
    Eigen::VectorXd gamma_pos(m);
    for (int pidx = 0; pidx < m; ++pidx)
        gamma_pos(pidx) = gamma.gamma[static_cast<std::size_t>(ordering.order[pidx])];

    FusionConfig fc = cfg;
    fc.m = m;
    FitResult out;
    out.params = FusionParams::random_init(fc, seed);
    for (int e = 0; e < epochs; ++e) {
        const BatchEval ev =
            evaluate(xr.values, xr.labels, gamma_pos, out.params, fc, lc, p_g, true);
        out.params.sgd_step(lr);
        out.trace.push_back({ev.task_loss, ev.p_d, ev.p_g, ev.total});
    }
    return out;
}

}  // namespace tabord
