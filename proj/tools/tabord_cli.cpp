// Command-line front end: analyze (ordering-effectiveness report),
// order (global feature permutation), train (toy fusion training).

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "tabord/tabord.hpp"

namespace {

using namespace tabord;

struct CommonOpts {
    std::string input;
    std::string label;
    std::string out;
    std::string format = "json";
    std::uint64_t seed = 0;
};

struct OrderOpts {
    int clusters = 12;
    std::string metric = "euclidean";
    std::string direction = "desc";
    double tolerance = 0.021;
    double mutation_prob = 0.2;
    double theta = 0.05;
    double lambda = 0.1;
    double decay = 0.05;
    std::string centrality = "degree";
};

struct TrainOpts {
    std::string loss = "dfo";
    double lambda_d = 0.4;
    double lambda_g = 0.3;
    double lambda_reg = 0.0;
    int d = 16;
    int d_k = 16;
    int epochs = 100;
    double lr = 0.001;
    std::string permutation;  // optional precomputed permutation file
};

void add_common(CLI::App* cmd, CommonOpts& c) {
    cmd->add_option("--input", c.input, "input CSV path")->required();
    cmd->add_option("--label", c.label, "label column name");
    cmd->add_option("--out", c.out, "output file path")->required();
    cmd->add_option("--format", c.format, "output format")
        ->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--seed", c.seed, "random seed");
}

void add_order_opts(CLI::App* cmd, OrderOpts& o) {
    cmd->add_option("--clusters", o.clusters, "number of sample clusters");
    cmd->add_option("--metric", o.metric, "edge dissimilarity metric")
        ->check(CLI::IsMember({"kl", "euclidean", "manhattan", "variance", "correlation"}));
    cmd->add_option("--direction", o.direction, "ordering direction")
        ->check(CLI::IsMember({"asc", "desc", "ascending", "descending"}));
    cmd->add_option("--tolerance", o.tolerance, "rewiring stop tolerance");
    cmd->add_option("--mutation-prob", o.mutation_prob, "mutation probability");
    cmd->add_option("--theta", o.theta, "edge pruning threshold");
    cmd->add_option("--lambda", o.lambda, "Hebbian learning rate");
    cmd->add_option("--decay", o.decay, "Hebbian decay");
    cmd->add_option("--centrality", o.centrality, "centrality kind")
        ->check(CLI::IsMember({"degree", "betweenness", "eigenvector"}));
}

DataMatrix load_input(const CommonOpts& c) {
    std::optional<std::string> label;
    if (!c.label.empty()) label = c.label;
    return load_csv(c.input, label);
}

OrderingConfig make_ordering_config(const CommonOpts& c, const OrderOpts& o) {
    OrderingConfig cfg;
    cfg.clusters = o.clusters;
    cfg.metric = parse_metric(o.metric);
    cfg.seed = c.seed;
    cfg.rewiring.centrality = parse_centrality(o.centrality);
    cfg.rewiring.direction = parse_direction(o.direction);
    cfg.rewiring.tolerance = o.tolerance;
    cfg.rewiring.mutation_prob = o.mutation_prob;
    cfg.rewiring.prune_theta = o.theta;
    cfg.rewiring.learning_rate_lambda = o.lambda;
    cfg.rewiring.decay_epsilon = o.decay;
    return cfg;
}

int cmd_analyze(const CommonOpts& c) {
    DataMatrix X = load_input(c);
    const std::string name = std::filesystem::path(c.input).stem().string();
    FoeReport r = analyze(standardize(X));
    if (c.format == "csv")
        atomic_write(c.out, foe_report_csv(r, name));
    else
        atomic_write(c.out, foe_report_json(r, name).dump(2) + "\n");
    std::cout << "mean_idf=" << r.mean_idf << " -> ordering "
              << (r.mean_idf < 0.5 ? "recommended" : "not recommended") << "\n";
    return 0;
}

int cmd_order(const CommonOpts& c, const OrderOpts& o) {
    DataMatrix X = load_input(c);
    OrderingResult res = run_ordering(X, make_ordering_config(c, o));
    if (c.format == "csv")
        atomic_write(c.out, permutation_csv(res.global));
    else
        atomic_write(c.out, permutation_json(res.global, X.column_names).dump(2) + "\n");
    std::cout << "score=" << res.global.score << " coherence=" << res.coherence << "\n";
    return 0;
}

int cmd_train(const CommonOpts& c, const OrderOpts& o, const TrainOpts& t) {
    DataMatrix X = load_input(c);
    if (!X.has_labels()) throw UnlabeledDataError();

    GlobalOrdering ordering;
    double p_g = 0.0;
    ImportanceScores gamma;
    if (!t.permutation.empty()) {
        ordering = load_permutation(t.permutation);
        gamma.gamma.assign(static_cast<std::size_t>(X.cols()), 0.5);
    } else {
        OrderingResult res = run_ordering(X, make_ordering_config(c, o));
        ordering = res.global;
        p_g = res.coherence;
        gamma = importance_scores(res.rewired_graphs, res.alphas);
    }

    LossConfig lc;
    lc.mode = t.loss == "dispersion" ? LossMode::dispersion : LossMode::dfo;
    lc.lambda_d = t.lambda_d;
    lc.lambda_g = t.lambda_g;
    lc.lambda_reg = t.lambda_reg;
    switch (X.task) {
        case Task::binary: lc.task = TaskLoss::bce; break;
        case Task::multiclass: lc.task = TaskLoss::cce; break;
        default: lc.task = TaskLoss::mse; break;
    }

    FusionConfig fc;
    fc.m = static_cast<int>(X.cols());
    fc.d = t.d;
    fc.d_k = t.d_k;
    if (lc.task == TaskLoss::cce) {
        int classes = 0;
        for (double y : X.labels) classes = std::max(classes, static_cast<int>(y) + 1);
        fc.outputs = classes;
    }

    DataMatrix Xs = standardize(X);
    FitResult fr = fit(Xs, ordering, gamma, fc, lc, t.epochs, t.lr, c.seed, p_g);
    atomic_write(c.out, checkpoint_json(fc, lc, fr.params).dump(2) + "\n");
    atomic_write(c.out + ".trace.csv", loss_trace_csv(fr.trace));
    if (!fr.trace.empty())
        std::cout << "final_loss=" << fr.trace.back().total << "\n";
    else
        std::cout << "final_loss=n/a\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"feature ordering engine for tabular data"};
    app.require_subcommand(1);

    CommonOpts ca, co, ct;
    OrderOpts oo, ot;
    TrainOpts tt;

    CLI::App* analyze_cmd = app.add_subcommand("analyze", "intrinsic-dimensionality report");
    add_common(analyze_cmd, ca);

    CLI::App* order_cmd = app.add_subcommand("order", "compute a global feature permutation");
    add_common(order_cmd, co);
    add_order_opts(order_cmd, oo);

    CLI::App* train_cmd = app.add_subcommand("train", "train the order-aware fusion stack");
    add_common(train_cmd, ct);
    add_order_opts(train_cmd, ot);
    train_cmd->add_option("--loss", tt.loss, "loss mode")
        ->check(CLI::IsMember({"dfo", "dispersion"}));
    train_cmd->add_option("--lambda-d", tt.lambda_d, "dispersion penalty weight");
    train_cmd->add_option("--lambda-g", tt.lambda_g, "coherence penalty weight");
    train_cmd->add_option("--lambda-reg", tt.lambda_reg, "dispersion-mode weight");
    train_cmd->add_option("--d", tt.d, "token dimension");
    train_cmd->add_option("--d-k", tt.d_k, "attention key dimension");
    train_cmd->add_option("--epochs", tt.epochs, "training epochs");
    train_cmd->add_option("--lr", tt.lr, "learning rate");
    train_cmd->add_option("--permutation", tt.permutation, "precomputed permutation file");

    try {
        app.parse(argc, argv);
        if (analyze_cmd->parsed()) return cmd_analyze(ca);
        if (order_cmd->parsed()) return cmd_order(co, oo);
        if (train_cmd->parsed()) return cmd_train(ct, ot, tt);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const tabord::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        switch (e.kind()) {
            case tabord::ErrorKind::io: return 2;
            case tabord::ErrorKind::validation: return 3;
            case tabord::ErrorKind::numeric: return 4;
        }
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
    return 0;
}
