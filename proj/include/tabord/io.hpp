#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tabord/errors.hpp"
#include "tabord/foe.hpp"
#include "tabord/fusion.hpp"
#include "tabord/global_order.hpp"

namespace tabord {

/// Write content to path via a temp file and rename, so readers never see a
/// partially written file.
inline void atomic_write(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorKind::io, "cannot open for writing: " + tmp);
        out << content;
        if (!out) throw Error(ErrorKind::io, "write failed: " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw Error(ErrorKind::io, "cannot rename " + tmp + " to " + path);
}

inline nlohmann::json foe_report_json(const FoeReport& r, const std::string& dataset) {
    nlohmann::json j;
    j["dataset"] = dataset;
    j["thresholds"] = r.thresholds;
    j["intrinsic_dims"] = r.intrinsic_dims;
    j["idfs"] = r.idfs;
    j["mean_idf"] = r.mean_idf;
    j["success_probs"] = r.success_probs;
    j["auc"] = r.auc;
    j["psi_star"] = r.psi_star;
    j["s"] = r.sensitivity_s;
    if (r.foe_infinite)
        j["foe"] = "undefined";
    else
        j["foe"] = r.foe;
    j["complexity"] = r.complexity;
    j["complexity_interpretation"] = "A";
    return j;
}

inline std::string foe_report_csv(const FoeReport& r, const std::string& dataset) {
    std::ostringstream out;
    out.precision(17);
    out << "dataset,threshold,intrinsic_dim,idf,success_prob\n";
    for (std::size_t i = 0; i < r.thresholds.size(); ++i)
        out << dataset << ',' << r.thresholds[i] << ',' << r.intrinsic_dims[i] << ','
            << r.idfs[i] << ',' << r.success_probs[i] << '\n';
    out << "# mean_idf=" << r.mean_idf << " auc=" << r.auc << " psi_star=" << r.psi_star
        << " foe=";
    if (r.foe_infinite)
        out << "undefined";
    else
        out << r.foe;
    out << " complexity=" << r.complexity << '\n';
    return out.str();
}

inline nlohmann::json permutation_json(const GlobalOrdering& g,
                                       const std::vector<std::string>& column_names) {
    nlohmann::json j;
    j["order"] = g.order;
    std::vector<std::string> names;
    for (int f : g.order) names.push_back(column_names[static_cast<std::size_t>(f)]);
    j["column_names"] = names;
    j["score"] = g.score;
    j["alphas"] = g.alphas.alphas;
    return j;
}

inline std::string permutation_csv(const GlobalOrdering& g) {
    std::ostringstream out;
    out << "feature_index\n";
    for (int f : g.order) out << f << '\n';
    return out.str();
}

inline GlobalOrdering load_permutation(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FileNotFoundError(path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::validation, "invalid permutation file: " + std::string(e.what()));
    }
    GlobalOrdering g;
    g.order = j.at("order").get<std::vector<int>>();
    if (j.contains("score")) g.score = j["score"].get<double>();
    if (j.contains("alphas")) g.alphas.alphas = j["alphas"].get<std::vector<double>>();
    return g;
}

inline nlohmann::json checkpoint_json(const FusionConfig& cfg, const LossConfig& lc,
                                      const FusionParams& params) {
    nlohmann::json j;
    j["version"] = 1;
    j["config"] = {{"m", cfg.m},       {"d", cfg.d},           {"d_k", cfg.d_k},
                   {"outputs", cfg.outputs}, {"window", cfg.window}};
    j["loss"] = {{"mode", lc.mode == LossMode::dfo ? "dfo" : "dispersion"},
                 {"lambda_d", lc.lambda_d},
                 {"lambda_g", lc.lambda_g},
                 {"lambda_reg", lc.lambda_reg},
                 {"task", lc.task == TaskLoss::bce   ? "bce"
                          : lc.task == TaskLoss::cce ? "cce"
                                                     : "mse"}};
    j["params"] = params.flatten();
    return j;
}

inline std::string loss_trace_csv(const std::vector<EpochStats>& trace) {
    std::ostringstream out;
    out.precision(17);
    out << "epoch,task_loss,p_d,p_g,total\n";
    for (std::size_t e = 0; e < trace.size(); ++e)
        out << e << ',' << trace[e].task_loss << ',' << trace[e].p_d << ',' << trace[e].p_g
            << ',' << trace[e].total << '\n';
    return out.str();
}

inline std::string round_trace_jsonl(const std::vector<RewireRoundTrace>& trace) {
    std::ostringstream out;
    for (const auto& t : trace) {
        nlohmann::json j = {{"round", t.round},
                            {"q", t.q},
                            {"edges_pruned", t.edges_pruned},
                            {"edges_added", t.edges_added},
                            {"mutated", t.mutated}};
        out << j.dump() << '\n';
    }
    return out.str();
}

}  // namespace tabord
