#include "subcount/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "subcount/canonical.hpp"
#include "subcount/error.hpp"
#include "subcount/rng.hpp"

namespace subcount {

namespace {

constexpr uint64_t kSplitStream = 0x73706c;  // train/holdout shuffle
constexpr uint64_t kStageStream = 0x737467;  // per-stage model/train seeds

void check_alignment(const std::vector<Graph>& graphs, const CountTable& truth) {
    if (truth.graphs.size() != graphs.size())
        throw ValidationError("pipeline: count table does not cover the dataset");
    for (size_t i = 0; i < graphs.size(); ++i)
        if (static_cast<int>(truth.graphs[i].per_node.size()) != graphs[i].num_nodes)
            throw ValidationError("pipeline: count table node rows mismatch at position " +
                                  std::to_string(i));
}

std::vector<Graph> query_graphs(const QuerySet& queries) {
    std::vector<Graph> out;
    out.reserve(queries.queries.size());
    for (const auto& q : queries.queries) out.push_back(q.graph);
    return out;
}

std::vector<Tensor2> query_embeddings(const ShmpModel& model, const QuerySet& queries) {
    std::vector<Tensor2> out;
    out.reserve(queries.queries.size());
    for (const auto& q : queries.queries) out.push_back(embed_query(model, q.graph));
    return out;
}

}  // namespace

void split_dataset(size_t count, double holdout_fraction, uint64_t seed,
                   std::vector<int>& train_pos, std::vector<int>& holdout_pos) {
    if (count == 0) throw ValidationError("split_dataset: empty dataset");
    if (holdout_fraction < 0.0 || holdout_fraction >= 1.0)
        throw ValidationError("split_dataset: holdout fraction must be in [0,1)");
    std::vector<int> order(count);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(derive_seed(seed, kSplitStream, 0));
    rng.shuffle(order);
    size_t holdout = static_cast<size_t>(std::llround(holdout_fraction * static_cast<double>(count)));
    if (count >= 2 && holdout_fraction > 0.0) holdout = std::clamp<size_t>(holdout, 1, count - 1);
    holdout_pos.assign(order.begin(), order.begin() + static_cast<long>(holdout));
    train_pos.assign(order.begin() + static_cast<long>(holdout), order.end());
    std::sort(train_pos.begin(), train_pos.end());
    std::sort(holdout_pos.begin(), holdout_pos.end());
}

std::vector<NbrInstance> build_nbr_instances(const std::vector<Graph>& graphs,
                                             const std::vector<int>& positions,
                                             const CountTable& truth, int depth) {
    check_alignment(graphs, truth);
    std::vector<NbrInstance> out;
    for (int pos : positions) {
        const Graph& g = graphs.at(pos);
        const auto& rows = truth.graphs[pos].per_node;
        auto nbs = partition_all(g, depth);
        for (int v = 0; v < g.num_nodes; ++v) {
            NbrInstance inst;
            inst.graph = nbs[v].graph;
            inst.canonical_node = nbs[v].canonical_node;
            inst.targets.reserve(truth.num_queries);
            for (int q = 0; q < truth.num_queries; ++q)
                inst.targets.emplace_back(q, static_cast<double>(rows[v][q]));
            out.push_back(std::move(inst));
        }
    }
    return out;
}

ShmpModel train_neighborhood_stage(const std::vector<Graph>& graphs,
                                   const std::vector<int>& train_pos, const CountTable& truth,
                                   const QuerySet& queries, const PipelineConfig& cfg,
                                   std::vector<double>* curve) {
    if (truth.num_queries != queries.size())
        throw ValidationError("pipeline: count table query count mismatch");
    auto instances = build_nbr_instances(graphs, train_pos, truth, cfg.depth);
    ShmpModel model = make_shmp_model(cfg.shmp, derive_seed(cfg.seed, kStageStream, 0));
    NbrTrainConfig tc = cfg.nbr_train;
    tc.seed = derive_seed(cfg.seed, kStageStream, 1);
    auto losses = train_neighborhood(model, query_graphs(queries), instances, tc);
    if (curve) *curve = std::move(losses);
    return model;
}

PredTable predict_neighborhood(const ShmpModel& model, const std::vector<Graph>& graphs,
                               const std::vector<int>& ids, const std::vector<int>& positions,
                               const QuerySet& queries, int depth) {
    if (ids.size() != graphs.size())
        throw ValidationError("predict_neighborhood: ids must align with graphs");
    PredTable t;
    t.num_queries = queries.size();
    auto qembs = query_embeddings(model, queries);
    for (int pos : positions) {
        const Graph& g = graphs.at(pos);
        auto nbs = partition_all(g, depth);
        std::vector<const CanonicalNeighborhood*> ptrs;
        ptrs.reserve(nbs.size());
        for (const auto& nb : nbs) ptrs.push_back(&nb);
        Tensor2 emb = embed_neighborhoods(model, ptrs);
        PredTable::PerGraph pg;
        pg.graph_id = ids.at(pos);
        pg.per_node.assign(g.num_nodes, std::vector<double>(t.num_queries, 0.0));
        for (int q = 0; q < t.num_queries; ++q) {
            auto preds = head_predictions(model, emb, qembs[q]);
            for (int v = 0; v < g.num_nodes; ++v) pg.per_node[v][q] = preds[v];
        }
        t.graphs.push_back(std::move(pg));
    }
    return t;
}

std::vector<GossipInstance> build_gossip_instances(const ShmpModel& model,
                                                   const std::vector<Graph>& graphs,
                                                   const std::vector<int>& positions,
                                                   const CountTable& truth,
                                                   const PredTable& nbr_preds,
                                                   const QuerySet& queries) {
    check_alignment(graphs, truth);
    if (nbr_preds.graphs.size() != positions.size())
        throw ValidationError("pipeline: predictions must cover the selected positions");
    auto qembs = query_embeddings(model, queries);
    std::vector<GossipInstance> out;
    for (size_t i = 0; i < positions.size(); ++i) {
        const Graph& g = graphs.at(positions[i]);
        const auto& pred_rows = nbr_preds.graphs[i].per_node;
        const auto& truth_rows = truth.graphs[positions[i]].per_node;
        if (static_cast<int>(pred_rows.size()) != g.num_nodes)
            throw ValidationError("pipeline: prediction rows mismatch");
        for (int q = 0; q < queries.size(); ++q) {
            GossipInstance inst;
            inst.target = g;
            inst.query_embedding = qembs[q];
            inst.inputs.resize(g.num_nodes);
            inst.targets.resize(g.num_nodes);
            for (int v = 0; v < g.num_nodes; ++v) {
                inst.inputs[v] = pred_rows[v][q];
                inst.targets[v] = static_cast<double>(truth_rows[v][q]);
            }
            out.push_back(std::move(inst));
        }
    }
    return out;
}

GossipModel train_gossip_stage(const ShmpModel& model, const std::vector<Graph>& graphs,
                               const std::vector<int>& train_pos, const CountTable& truth,
                               const PredTable& nbr_preds_train, const QuerySet& queries,
                               const PipelineConfig& cfg, std::vector<double>* curve) {
    auto instances =
        build_gossip_instances(model, graphs, train_pos, truth, nbr_preds_train, queries);
    GossipConfig gc = cfg.gossip;
    gc.query_dim = model.config.hidden;
    GossipModel gossip = make_gossip_model(gc, derive_seed(cfg.seed, kStageStream, 2));
    GossipTrainConfig tc = cfg.gossip_train;
    tc.seed = derive_seed(cfg.seed, kStageStream, 3);
    auto losses = train_gossip(gossip, instances, tc);
    if (curve) *curve = std::move(losses);
    return gossip;
}

PredTable refine_with_gossip(const GossipModel& gossip, const ShmpModel& model,
                             const std::vector<Graph>& graphs, const std::vector<int>& positions,
                             const QuerySet& queries, const PredTable& nbr_preds) {
    if (nbr_preds.graphs.size() != positions.size())
        throw ValidationError("pipeline: predictions must cover the selected positions");
    auto qembs = query_embeddings(model, queries);
    PredTable t;
    t.num_queries = nbr_preds.num_queries;
    for (size_t i = 0; i < positions.size(); ++i) {
        const Graph& g = graphs.at(positions[i]);
        const auto& pred_rows = nbr_preds.graphs[i].per_node;
        PredTable::PerGraph pg;
        pg.graph_id = nbr_preds.graphs[i].graph_id;
        pg.per_node.assign(g.num_nodes, std::vector<double>(t.num_queries, 0.0));
        for (int q = 0; q < t.num_queries; ++q) {
            std::vector<double> inputs(g.num_nodes);
            for (int v = 0; v < g.num_nodes; ++v) inputs[v] = pred_rows[v][q];
            auto refined = gossip_forward(gossip, g, inputs, qembs[q]);
            for (int v = 0; v < g.num_nodes; ++v) pg.per_node[v][q] = refined[v];
        }
        t.graphs.push_back(std::move(pg));
    }
    return t;
}

CountTable subset_table(const CountTable& t, const std::vector<int>& positions) {
    CountTable out;
    out.num_queries = t.num_queries;
    for (int pos : positions) out.graphs.push_back(t.graphs.at(pos));
    return out;
}

std::map<int, double> per_size_nmse(const PredTable& pred, const CountTable& truth,
                                    const QuerySet& queries, bool totals) {
    if (pred.num_queries != queries.size() || truth.num_queries != queries.size())
        throw ValidationError("per_size_nmse: query count mismatch");
    if (pred.graphs.size() != truth.graphs.size())
        throw ValidationError("per_size_nmse: graph count mismatch");
    std::map<int, std::pair<std::vector<double>, std::vector<double>>> pools;
    for (size_t i = 0; i < pred.graphs.size(); ++i) {
        const auto& pg = pred.graphs[i];
        const auto& tg = truth.graphs[i];
        if (pg.graph_id != tg.graph_id || pg.per_node.size() != tg.per_node.size())
            throw ValidationError("per_size_nmse: tables misaligned");
        if (totals) {
            auto pt = pred.totals(pg);
            auto tt = truth.totals(tg);
            for (int q = 0; q < queries.size(); ++q) {
                auto& pool = pools[queries.queries[q].graph.num_nodes];
                pool.first.push_back(pt[q]);
                pool.second.push_back(static_cast<double>(tt[q]));
            }
        } else {
            for (size_t v = 0; v < pg.per_node.size(); ++v) {
                for (int q = 0; q < queries.size(); ++q) {
                    auto& pool = pools[queries.queries[q].graph.num_nodes];
                    pool.first.push_back(pg.per_node[v][q]);
                    pool.second.push_back(static_cast<double>(tg.per_node[v][q]));
                }
            }
        }
    }
    std::map<int, double> out;
    for (auto& [size, pool] : pools) out[size] = normalized_mse(pool.first, pool.second);
    return out;
}

void save_shmp(const std::string& path, const ShmpModel& m) {
    std::map<std::string, double> hyper{{"layers", double(m.config.layers)},
                                        {"hidden", double(m.config.hidden)},
                                        {"head_hidden", double(m.config.head_hidden)},
                                        {"leaky_slope", m.config.leaky_slope}};
    save_checkpoint(path, "shmp", hyper, m.params);
}

ShmpModel load_shmp(const std::string& path) {
    Checkpoint ck = load_checkpoint(path);
    if (ck.kind != "shmp") throw std::runtime_error(path + ": not a neighborhood checkpoint");
    ShmpConfig cfg;
    cfg.layers = static_cast<int>(ck.hyper.at("layers"));
    cfg.hidden = static_cast<int>(ck.hyper.at("hidden"));
    cfg.head_hidden = static_cast<int>(ck.hyper.at("head_hidden"));
    cfg.leaky_slope = ck.hyper.at("leaky_slope");
    ShmpModel expect = make_shmp_model(cfg, 0);
    if (ck.params.names != expect.params.names)
        throw std::runtime_error(path + ": parameter set does not match the hyperparameters");
    for (const auto& name : expect.params.names)
        if (!ck.params.get(name).same_shape(expect.params.get(name)))
            throw std::runtime_error(path + ": tensor shape mismatch for " + name);
    ShmpModel m;
    m.config = cfg;
    m.params = std::move(ck.params);
    return m;
}

void save_gossip(const std::string& path, const GossipModel& m) {
    std::map<std::string, double> hyper{{"layers", double(m.config.layers)},
                                        {"hidden", double(m.config.hidden)},
                                        {"gate_hidden", double(m.config.gate_hidden)},
                                        {"query_dim", double(m.config.query_dim)},
                                        {"leaky_slope", m.config.leaky_slope}};
    save_checkpoint(path, "gossip", hyper, m.params);
}

GossipModel load_gossip(const std::string& path) {
    Checkpoint ck = load_checkpoint(path);
    if (ck.kind != "gossip") throw std::runtime_error(path + ": not a gossip checkpoint");
    GossipConfig cfg;
    cfg.layers = static_cast<int>(ck.hyper.at("layers"));
    cfg.hidden = static_cast<int>(ck.hyper.at("hidden"));
    cfg.gate_hidden = static_cast<int>(ck.hyper.at("gate_hidden"));
    cfg.query_dim = static_cast<int>(ck.hyper.at("query_dim"));
    cfg.leaky_slope = ck.hyper.at("leaky_slope");
    GossipModel expect = make_gossip_model(cfg, 0);
    if (ck.params.names != expect.params.names)
        throw std::runtime_error(path + ": parameter set does not match the hyperparameters");
    for (const auto& name : expect.params.names)
        if (!ck.params.get(name).same_shape(expect.params.get(name)))
            throw std::runtime_error(path + ": tensor shape mismatch for " + name);
    GossipModel m;
    m.config = cfg;
    m.params = std::move(ck.params);
    return m;
}

}  // namespace subcount
