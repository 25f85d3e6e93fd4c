#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <string>
#include <vector>

#include "subcount/canonical.hpp"
#include "subcount/count_table.hpp"
#include "subcount/error.hpp"
#include "subcount/gossip.hpp"
#include "subcount/graph.hpp"
#include "subcount/metrics.hpp"
#include "subcount/oracle.hpp"
#include "subcount/pipeline.hpp"
#include "subcount/queries.hpp"
#include "subcount/shmp.hpp"
#include "subcount/synthgen.hpp"
#include "subcount/wl.hpp"

namespace fs = std::filesystem;
using namespace subcount;

namespace {

// Shared knobs: defaults here, then an optional JSON config file, then any
// explicitly passed flag, in that order of precedence (later wins).
struct CommonOpts {
    std::string config_path;
    int depth = 4;
    std::string queries = "3-5";
    uint64_t seed = 1;
    double holdout = 0.2;
    int shmp_layers = 4, shmp_hidden = 32, shmp_head = 64;
    int gossip_layers = 2, gossip_hidden = 32, gossip_gate_hidden = 32;
    int epochs = 100, batch = 8;
    int gossip_epochs = 50, gossip_batch = 8;
    double lr = 1e-3;
};

void add_common_options(CLI::App* cmd, CommonOpts& o, bool training) {
    cmd->add_option("--config", o.config_path, "JSON config file; flags override its values");
    cmd->add_option("--depth", o.depth, "neighborhood depth d")->capture_default_str();
    cmd->add_option("--queries", o.queries, "query size range, e.g. 3-5 or 4")->capture_default_str();
    cmd->add_option("--seed", o.seed, "master seed")->capture_default_str();
    if (!training) return;
    cmd->add_option("--holdout", o.holdout, "holdout fraction of graphs")->capture_default_str();
    cmd->add_option("--shmp-layers", o.shmp_layers, "encoder layers")->capture_default_str();
    cmd->add_option("--shmp-hidden", o.shmp_hidden, "encoder width")->capture_default_str();
    cmd->add_option("--shmp-head", o.shmp_head, "head hidden width")->capture_default_str();
    cmd->add_option("--gossip-layers", o.gossip_layers, "gossip layers")->capture_default_str();
    cmd->add_option("--gossip-hidden", o.gossip_hidden, "gossip width")->capture_default_str();
    cmd->add_option("--gossip-gate-hidden", o.gossip_gate_hidden, "gate MLP width")->capture_default_str();
    cmd->add_option("--epochs", o.epochs, "neighborhood training epochs")->capture_default_str();
    cmd->add_option("--batch", o.batch, "neighborhoods per training batch")->capture_default_str();
    cmd->add_option("--gossip-epochs", o.gossip_epochs, "gossip training epochs")->capture_default_str();
    cmd->add_option("--gossip-batch", o.gossip_batch, "graph-query pairs per batch")->capture_default_str();
    cmd->add_option("--lr", o.lr, "Adam learning rate")->capture_default_str();
}

// SUBCOUNT_THREADS sets the worker count for the exact-count stage; unset
// means single-threaded. Counts are identical for any value.
int env_thread_count() {
    const char* raw = std::getenv("SUBCOUNT_THREADS");
    if (raw == nullptr || *raw == '\0') return 1;
    std::string s(raw);
    size_t used = 0;
    int n = 0;
    try {
        n = std::stoi(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != s.size() || n < 1)
        throw ValidationError("SUBCOUNT_THREADS must be a positive integer, got '" + s + "'");
    return n;
}

std::pair<int, int> parse_query_range(const std::string& s) {
    try {
        auto dash = s.find('-');
        if (dash == std::string::npos) {
            int k = std::stoi(s);
            return {k, k};
        }
        return {std::stoi(s.substr(0, dash)), std::stoi(s.substr(dash + 1))};
    } catch (const std::exception&) {
        throw ValidationError("bad query range '" + s + "': expected MIN-MAX or a single size");
    }
}

void apply_config_file(CommonOpts& o, CLI::App* cmd) {
    if (o.config_path.empty()) return;
    std::ifstream in(o.config_path);
    if (!in) throw ValidationError("cannot read config file " + o.config_path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ValidationError(o.config_path + ": " + e.what());
    }
    // Flags the user passed explicitly keep their values. Commands that do
    // not define a flag just take the config value.
    auto keep = [&](const char* flag) {
        const CLI::Option* opt = cmd->get_option_no_throw(flag);
        return opt != nullptr && opt->count() > 0;
    };
    if (!keep("--depth")) o.depth = j.value("depth", o.depth);
    if (!keep("--queries")) {
        int qmin = j.value("query_min", parse_query_range(o.queries).first);
        int qmax = j.value("query_max", parse_query_range(o.queries).second);
        o.queries = std::to_string(qmin) + "-" + std::to_string(qmax);
    }
    if (!keep("--seed")) o.seed = j.value("seed", o.seed);
    if (!keep("--holdout")) o.holdout = j.value("holdout_fraction", o.holdout);
    if (j.contains("shmp")) {
        const auto& s = j["shmp"];
        if (!keep("--shmp-layers")) o.shmp_layers = s.value("layers", o.shmp_layers);
        if (!keep("--shmp-hidden")) o.shmp_hidden = s.value("hidden", o.shmp_hidden);
        if (!keep("--shmp-head")) o.shmp_head = s.value("head_hidden", o.shmp_head);
    }
    if (j.contains("gossip")) {
        const auto& s = j["gossip"];
        if (!keep("--gossip-layers")) o.gossip_layers = s.value("layers", o.gossip_layers);
        if (!keep("--gossip-hidden")) o.gossip_hidden = s.value("hidden", o.gossip_hidden);
        if (!keep("--gossip-gate-hidden"))
            o.gossip_gate_hidden = s.value("gate_hidden", o.gossip_gate_hidden);
    }
    if (j.contains("nbr_train")) {
        const auto& s = j["nbr_train"];
        if (!keep("--epochs")) o.epochs = s.value("epochs", o.epochs);
        if (!keep("--batch")) o.batch = s.value("batch_instances", o.batch);
        if (!keep("--lr")) o.lr = s.value("lr", o.lr);
    }
    if (j.contains("gossip_train")) {
        const auto& s = j["gossip_train"];
        if (!keep("--gossip-epochs")) o.gossip_epochs = s.value("epochs", o.gossip_epochs);
        if (!keep("--gossip-batch")) o.gossip_batch = s.value("batch_instances", o.gossip_batch);
    }
}

PipelineConfig to_pipeline_config(const CommonOpts& o) {
    PipelineConfig cfg;
    cfg.depth = o.depth;
    auto [qmin, qmax] = parse_query_range(o.queries);
    cfg.query_min = qmin;
    cfg.query_max = qmax;
    cfg.seed = o.seed;
    cfg.holdout_fraction = o.holdout;
    cfg.shmp.layers = o.shmp_layers;
    cfg.shmp.hidden = o.shmp_hidden;
    cfg.shmp.head_hidden = o.shmp_head;
    cfg.gossip.layers = o.gossip_layers;
    cfg.gossip.hidden = o.gossip_hidden;
    cfg.gossip.gate_hidden = o.gossip_gate_hidden;
    cfg.gossip.query_dim = o.shmp_hidden;
    cfg.nbr_train.epochs = o.epochs;
    cfg.nbr_train.batch_instances = o.batch;
    cfg.nbr_train.adam.lr = o.lr;
    cfg.gossip_train.epochs = o.gossip_epochs;
    cfg.gossip_train.batch_instances = o.gossip_batch;
    cfg.gossip_train.adam.lr = o.lr;
    return cfg;
}

QuerySet checked_queries(const PipelineConfig& cfg) {
    QuerySet qs = enumerate_queries(cfg.query_min, cfg.query_max);
    if (cfg.depth < qs.max_diameter())
        throw ValidationError("depth " + std::to_string(cfg.depth) +
                              " is smaller than the largest query diameter " +
                              std::to_string(qs.max_diameter()) +
                              "; neighborhoods would clip occurrences");
    return qs;
}

// Count table rows must line up with the dataset graphs one to one.
void check_truth(const LoadedDataset& ds, const CountTable& truth, const QuerySet& qs) {
    if (truth.num_queries != qs.size())
        throw ValidationError("count table has " + std::to_string(truth.num_queries) +
                              " queries, expected " + std::to_string(qs.size()));
    if (truth.graphs.size() != ds.graphs.size())
        throw ValidationError("count table covers " + std::to_string(truth.graphs.size()) +
                              " graphs, dataset has " + std::to_string(ds.graphs.size()));
    for (size_t i = 0; i < ds.ids.size(); ++i) {
        if (truth.graphs[i].graph_id != ds.ids[i])
            throw ValidationError("count table graph ids do not match the dataset");
        if (static_cast<int>(truth.graphs[i].per_node.size()) != ds.graphs[i].num_nodes)
            throw ValidationError("count table node rows do not match graph " +
                                  std::to_string(ds.ids[i]));
    }
}

void write_curve(const std::string& path, const std::vector<double>& losses) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "epoch,loss\n";
    for (size_t i = 0; i < losses.size(); ++i) out << i << "," << losses[i] << "\n";
}

std::vector<int> all_positions(size_t n) {
    std::vector<int> p(n);
    for (size_t i = 0; i < n; ++i) p[i] = static_cast<int>(i);
    return p;
}

int run(int argc, char** argv) {
    CLI::App app{"subgraph counting via canonical partition, neighborhood regression, "
                 "and gossip refinement"};
    app.require_subcommand(1);

    // gen-dataset
    auto* gen = app.add_subcommand("gen-dataset", "generate a synthetic graph corpus");
    std::string gen_spec = "default", gen_out;
    uint64_t gen_seed = 1;
    gen->add_option("--spec", gen_spec, "spec name (default|desk) or JSON file")->capture_default_str();
    gen->add_option("--seed", gen_seed, "dataset seed")->capture_default_str();
    gen->add_option("--out", gen_out, "output directory")->required();

    // ground-truth
    auto* gt = app.add_subcommand("ground-truth", "exact per-node canonical counts");
    CommonOpts gt_opts;
    std::string gt_dataset, gt_out;
    gt->add_option("--dataset", gt_dataset, "dataset directory")->required();
    gt->add_option("--out", gt_out, "output directory")->required();
    add_common_options(gt, gt_opts, false);

    // train
    auto* tr = app.add_subcommand("train", "train the neighborhood or gossip stage");
    CommonOpts tr_opts;
    std::string tr_stage, tr_dataset, tr_truth, tr_ckpt_out, tr_curve_out, tr_nbr_ckpt;
    tr->add_option("--stage", tr_stage, "neighborhood or gossip")
        ->required()
        ->check(CLI::IsMember({"neighborhood", "gossip"}));
    tr->add_option("--dataset", tr_dataset, "dataset directory")->required();
    tr->add_option("--truth", tr_truth, "ground-truth counts CSV")->required();
    tr->add_option("--ckpt-out", tr_ckpt_out, "checkpoint output path")->required();
    tr->add_option("--curve-out", tr_curve_out, "loss curve CSV output path");
    tr->add_option("--nbr-ckpt", tr_nbr_ckpt, "trained neighborhood checkpoint (gossip stage)");
    add_common_options(tr, tr_opts, true);

    // predict
    auto* pr = app.add_subcommand("predict", "per-node and total counts for target graphs");
    CommonOpts pr_opts;
    std::string pr_ckpt, pr_gossip_ckpt, pr_target, pr_dataset, pr_out;
    pr->add_option("--ckpt", pr_ckpt, "neighborhood checkpoint")->required();
    pr->add_option("--gossip-ckpt", pr_gossip_ckpt, "optional gossip checkpoint");
    pr->add_option("--target", pr_target, "single target graph file (node order = index order)");
    pr->add_option("--dataset", pr_dataset, "dataset directory");
    pr->add_option("--out", pr_out, "output directory")->required();
    add_common_options(pr, pr_opts, false);

    // eval
    auto* ev = app.add_subcommand("eval", "score predictions against exact counts");
    std::string ev_pred, ev_truth, ev_out, ev_csv, ev_scope = "cells";
    ev->add_option("--pred", ev_pred, "predicted counts CSV")->required();
    ev->add_option("--truth", ev_truth, "exact counts CSV")->required();
    ev->add_option("--out", ev_out, "metric report JSON path")->required();
    ev->add_option("--csv", ev_csv, "optional flat CSV report path");
    ev->add_option("--scope", ev_scope, "cells (per node) or totals (per graph)")
        ->capture_default_str()
        ->check(CLI::IsMember({"cells", "totals"}));

    // wl-study
    auto* wl = app.add_subcommand("wl-study", "color-refinement vs typed-degree separability");
    int wl_min = 6, wl_max = 8;
    std::string wl_out;
    std::vector<std::string> wl_files;
    wl->add_option("--min-size", wl_min, "smallest graph size")->capture_default_str();
    wl->add_option("--max-size", wl_max, "largest graph size (sizes over 8 need --graphs)")->capture_default_str();
    wl->add_option("--graphs", wl_files, "extra connected regular graph files");
    wl->add_option("--out", wl_out, "study CSV path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);  // prints help or the parse error
        return code == 0 ? 0 : 2;
    }

    if (*gen) {
        DatasetSpec spec = load_spec(gen_spec);
        auto graphs = generate_all(spec, gen_seed);
        fs::create_directories(gen_out);
        write_dataset(graphs, spec, gen_seed, gen_out);
        int fallbacks = 0;
        for (const auto& g : graphs) fallbacks += g.pl_fallback ? 1 : 0;
        std::cout << "wrote " << graphs.size() << " graphs to " << gen_out << " ("
                  << fallbacks << " power-law fallbacks)\n";
        return 0;
    }

    if (*gt) {
        apply_config_file(gt_opts, gt);
        PipelineConfig cfg = to_pipeline_config(gt_opts);
        QuerySet qs = checked_queries(cfg);
        LoadedDataset ds = load_dataset(gt_dataset);
        CountTable table = ground_truth_table(qs, ds.graphs, cfg.depth, &ds.ids, env_thread_count());
        fs::create_directories(gt_out);
        save_count_csv(table, gt_out + "/counts.csv", gt_out + "/totals.csv");
        save_query_set(qs, gt_out + "/queries");
        std::cout << "exact counts for " << ds.graphs.size() << " graphs x " << qs.size()
                  << " queries -> " << gt_out << "\n";
        return 0;
    }

    if (*tr) {
        apply_config_file(tr_opts, tr);
        PipelineConfig cfg = to_pipeline_config(tr_opts);
        QuerySet qs = checked_queries(cfg);
        LoadedDataset ds = load_dataset(tr_dataset);
        CountTable truth = load_count_csv(tr_truth);
        check_truth(ds, truth, qs);
        std::vector<int> train_pos, holdout_pos;
        split_dataset(ds.graphs.size(), cfg.holdout_fraction, cfg.seed, train_pos, holdout_pos);
        std::vector<double> curve;
        if (tr_stage == "neighborhood") {
            ShmpModel model = train_neighborhood_stage(ds.graphs, train_pos, truth, qs, cfg, &curve);
            save_shmp(tr_ckpt_out, model);
        } else {
            if (tr_nbr_ckpt.empty())
                throw ValidationError("--stage gossip needs --nbr-ckpt");
            ShmpModel model = load_shmp(tr_nbr_ckpt);
            PredTable preds =
                predict_neighborhood(model, ds.graphs, ds.ids, train_pos, qs, cfg.depth);
            GossipModel gossip =
                train_gossip_stage(model, ds.graphs, train_pos, truth, preds, qs, cfg, &curve);
            save_gossip(tr_ckpt_out, gossip);
        }
        if (!tr_curve_out.empty()) write_curve(tr_curve_out, curve);
        std::cout << tr_stage << " stage: " << train_pos.size() << " training graphs, "
                  << curve.size() << " epochs, loss " << curve.front() << " -> " << curve.back()
                  << ", checkpoint " << tr_ckpt_out << "\n";
        return 0;
    }

    if (*pr) {
        apply_config_file(pr_opts, pr);
        PipelineConfig cfg = to_pipeline_config(pr_opts);
        QuerySet qs = checked_queries(cfg);
        if (pr_target.empty() == pr_dataset.empty())
            throw ValidationError("predict needs exactly one of --target or --dataset");
        std::vector<Graph> graphs;
        std::vector<int> ids;
        if (!pr_target.empty()) {
            graphs.push_back(load_graph(pr_target));
            ids.push_back(0);
        } else {
            LoadedDataset ds = load_dataset(pr_dataset);
            graphs = std::move(ds.graphs);
            ids = std::move(ds.ids);
        }
        ShmpModel model = load_shmp(pr_ckpt);
        PredTable preds =
            predict_neighborhood(model, graphs, ids, all_positions(graphs.size()), qs, cfg.depth);
        if (!pr_gossip_ckpt.empty()) {
            GossipModel gossip = load_gossip(pr_gossip_ckpt);
            if (gossip.config.query_dim != model.config.hidden)
                throw ValidationError("gossip checkpoint expects query embeddings of width " +
                                      std::to_string(gossip.config.query_dim) +
                                      ", neighborhood model produces " +
                                      std::to_string(model.config.hidden));
            preds = refine_with_gossip(gossip, model, graphs, all_positions(graphs.size()), qs,
                                       preds);
        }
        fs::create_directories(pr_out);
        save_pred_csv(preds, pr_out + "/counts.csv", pr_out + "/totals.csv");
        std::cout << "predictions for " << graphs.size() << " graphs x " << qs.size()
                  << " queries -> " << pr_out << "\n";
        return 0;
    }

    if (*ev) {
        PredTable pred = load_pred_csv(ev_pred);
        CountTable truth = load_count_csv(ev_truth);
        MetricReport report = ev_scope == "cells" ? position_distribution_error(pred, truth)
                                                  : totals_error(pred, truth);
        if (auto dir = fs::path(ev_out).parent_path(); !dir.empty()) fs::create_directories(dir);
        save_metric_report_json(ev_out, report);
        if (!ev_csv.empty()) save_metric_report_csv(ev_csv, report);
        std::cout << ev_scope << ": normalized_mse " << report.normalized_mse << ", mae "
                  << report.mae << ", q-error median " << report.q.median << " ("
                  << report.q.skipped << " zero rows skipped) over " << report.cells
                  << " samples\n";
        return 0;
    }

    if (*wl) {
        std::vector<Graph> extra;
        for (const auto& f : wl_files) extra.push_back(load_graph(f));
        auto rows = shmp_distinguishability_study(wl_min, wl_max, extra);
        if (auto dir = fs::path(wl_out).parent_path(); !dir.empty()) fs::create_directories(dir);
        save_study_csv(wl_out, rows);
        for (const auto& r : rows)
            std::cout << "size " << r.size << ": " << r.graphs << " graphs, " << r.pairs
                      << " pairs, " << r.wl_indistinguishable << " wl-indistinguishable, "
                      << r.shmp_indistinguishable << " typed-histogram-indistinguishable\n";
        return 0;
    }

    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
