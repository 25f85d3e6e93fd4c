#include "subcount/shmp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "subcount/error.hpp"
#include "subcount/rng.hpp"

namespace subcount {

namespace {

constexpr uint64_t kParamStream = 0x706172;  // parameter init
constexpr uint64_t kTrainStream = 0x74726e;  // batch shuffling

int encoder_in_dim(const ShmpConfig& cfg, int layer) { return layer == 0 ? 2 : cfg.hidden; }

}  // namespace

ShmpConfig desk_shmp_config() {
    ShmpConfig cfg;
    cfg.layers = 4;
    cfg.hidden = 32;
    cfg.head_hidden = 64;
    return cfg;
}

ShmpModel make_shmp_model(const ShmpConfig& cfg, uint64_t seed) {
    if (cfg.layers < 1 || cfg.hidden < 1 || cfg.head_hidden < 1)
        throw ValidationError("shmp: layers, hidden, and head sizes must be positive");
    ShmpModel m;
    m.config = cfg;
    uint64_t idx = 0;
    auto init = [&](int r, int c) { return xavier_init(r, c, derive_seed(seed, kParamStream, idx++)); };
    for (const char* enc : {"nbr", "qry"}) {
        for (int l = 0; l < cfg.layers; ++l) {
            std::string p = std::string(enc) + ".l" + std::to_string(l) + ".";
            int in = encoder_in_dim(cfg, l);
            m.params.add(p + "w_self", init(in, cfg.hidden));
            m.params.add(p + "w_tri", init(in, cfg.hidden));
            m.params.add(p + "w_plain", init(in, cfg.hidden));
            m.params.add(p + "bias", Tensor2::zeros(1, cfg.hidden));
        }
    }
    m.params.add("head.w0", init(2 * cfg.hidden, cfg.head_hidden));
    m.params.add("head.b0", Tensor2::zeros(1, cfg.head_hidden));
    m.params.add("head.w1", init(cfg.head_hidden, 1));
    m.params.add("head.b1", Tensor2::zeros(1, 1));
    return m;
}

void tie_edge_weights(ShmpModel& model) {
    for (const char* enc : {"nbr", "qry"}) {
        for (int l = 0; l < model.config.layers; ++l) {
            std::string p = std::string(enc) + ".l" + std::to_string(l) + ".";
            model.params.get(p + "w_plain") = model.params.get(p + "w_tri");
        }
    }
}

TypedEdges typed_edges(const Graph& g) {
    TypedEdges te;
    std::vector<EdgeType> types = triangle_edge_types(g);
    for (size_t e = 0; e < g.edges.size(); ++e) {
        auto [u, v] = g.edges[e];
        auto& src = types[e] == EdgeType::Triangle ? te.tri_src : te.plain_src;
        auto& dst = types[e] == EdgeType::Triangle ? te.tri_dst : te.plain_dst;
        src.push_back(u);
        dst.push_back(v);
        src.push_back(v);
        dst.push_back(u);
    }
    return te;
}

Tensor2 initial_features(const Graph& g, int canonical_node) {
    if (canonical_node < -1 || canonical_node >= g.num_nodes)
        throw ValidationError("initial_features: canonical node out of range");
    Tensor2 f(g.num_nodes, 2);
    for (int i = 0; i < g.num_nodes; ++i) {
        f.at(i, 0) = 1.0;
        f.at(i, 1) = i == canonical_node ? 1.0 : 0.0;
    }
    return f;
}

void PackedBatch::add(const Graph& g, const TypedEdges& te, int canonical_node) {
    Tensor2 f = initial_features(g, canonical_node);
    features.data.insert(features.data.end(), f.data.begin(), f.data.end());
    features.rows += f.rows;
    auto offset = [&](const std::vector<int>& in, std::vector<int>& out) {
        for (int x : in) out.push_back(x + total_nodes);
    };
    offset(te.tri_src, tri_src);
    offset(te.tri_dst, tri_dst);
    offset(te.plain_src, plain_src);
    offset(te.plain_dst, plain_dst);
    for (int i = 0; i < g.num_nodes; ++i) node_graph.push_back(num_graphs);
    total_nodes += g.num_nodes;
    num_graphs += 1;
}

Tape::Id TapeParams::operator()(const std::string& name) {
    auto it = ids.find(name);
    if (it != ids.end()) return it->second;
    Tape::Id id = tape.leaf(store.get(name));
    ids.emplace(name, id);
    return id;
}

std::map<std::string, Tensor2> TapeParams::grads() const {
    std::map<std::string, Tensor2> out;
    for (const auto& name : store.names) {
        auto it = ids.find(name);
        if (it != ids.end()) {
            out[name] = tape.grad(it->second);
        } else {
            const Tensor2& v = store.get(name);
            out[name] = Tensor2::zeros(v.rows, v.cols);
        }
    }
    return out;
}

Tape::Id shmp_encode(Tape& tape, TapeParams& params, const ShmpConfig& cfg,
                     const std::string& prefix, const PackedBatch& batch) {
    if (batch.num_graphs == 0) throw ValidationError("shmp: empty batch");
    Tape::Id x = tape.leaf(batch.features);
    for (int l = 0; l < cfg.layers; ++l) {
        std::string p = prefix + ".l" + std::to_string(l) + ".";
        Tape::Id self = tape.matmul(x, params(p + "w_self"));
        auto typed = [&](const std::vector<int>& src, const std::vector<int>& dst,
                         const std::string& w) {
            Tape::Id msgs = tape.gather_rows(x, src);
            Tape::Id agg = tape.scatter_add_rows(msgs, dst, batch.total_nodes);
            return tape.matmul(agg, params(w));
        };
        Tape::Id tri = typed(batch.tri_src, batch.tri_dst, p + "w_tri");
        Tape::Id plain = typed(batch.plain_src, batch.plain_dst, p + "w_plain");
        Tape::Id pre = tape.add_rowvec(tape.add(tape.add(self, tri), plain), params(p + "bias"));
        x = tape.leaky_relu(pre, cfg.leaky_slope);
    }
    return tape.scatter_add_rows(x, batch.node_graph, batch.num_graphs);
}

Tape::Id shmp_head(Tape& tape, TapeParams& params, const ShmpConfig& cfg, Tape::Id nbr_embed,
                   Tape::Id query_embed) {
    Tape::Id h = tape.concat_cols(nbr_embed, query_embed);
    Tape::Id z = tape.leaky_relu(tape.add_rowvec(tape.matmul(h, params("head.w0")), params("head.b0")),
                                 cfg.leaky_slope);
    return tape.add_rowvec(tape.matmul(z, params("head.w1")), params("head.b1"));
}

Tensor2 embed_graph(const ShmpModel& model, const std::string& prefix, const Graph& g,
                    const TypedEdges& te, int canonical_node) {
    Tape tape;
    TapeParams tp{tape, model.params, {}};
    PackedBatch batch;
    batch.add(g, te, canonical_node);
    return tape.value(shmp_encode(tape, tp, model.config, prefix, batch));
}

Tensor2 embed_query(const ShmpModel& model, const Graph& query) {
    return embed_graph(model, "qry", query, typed_edges(query), -1);
}

Tensor2 embed_neighborhoods(const ShmpModel& model,
                            const std::vector<const CanonicalNeighborhood*>& nbs) {
    const int chunk = 256;
    Tensor2 out(static_cast<int>(nbs.size()), model.config.hidden);
    for (size_t start = 0; start < nbs.size(); start += chunk) {
        size_t stop = std::min(nbs.size(), start + chunk);
        Tape tape;
        TapeParams tp{tape, model.params, {}};
        PackedBatch batch;
        for (size_t i = start; i < stop; ++i)
            batch.add(nbs[i]->graph, typed_edges(nbs[i]->graph), nbs[i]->canonical_node);
        const Tensor2& emb = tape.value(shmp_encode(tape, tp, model.config, "nbr", batch));
        std::copy(emb.data.begin(), emb.data.end(),
                  out.data.begin() + static_cast<long>(start) * model.config.hidden);
    }
    return out;
}

std::vector<double> head_predictions(const ShmpModel& model, const Tensor2& nbr_embed,
                                     const Tensor2& query_embed) {
    if (query_embed.rows != 1 || query_embed.cols != model.config.hidden)
        throw ValidationError("head_predictions: bad query embedding shape");
    Tape tape;
    TapeParams tp{tape, model.params, {}};
    Tape::Id nbr = tape.leaf(nbr_embed);
    Tape::Id qry = tape.gather_rows(tape.leaf(query_embed), std::vector<int>(nbr_embed.rows, 0));
    const Tensor2& raw = tape.value(shmp_head(tape, tp, model.config, nbr, qry));
    std::vector<double> out(raw.data.size());
    for (size_t i = 0; i < out.size(); ++i) out[i] = std::max(0.0, raw.data[i]);
    return out;
}

double predict_canonical_count(const ShmpModel& model, const Graph& query,
                               const CanonicalNeighborhood& nb) {
    Tensor2 emb =
        embed_graph(model, "nbr", nb.graph, typed_edges(nb.graph), nb.canonical_node);
    return head_predictions(model, emb, embed_query(model, query))[0];
}

LossAndGrads neighborhood_loss(const ShmpModel& model, const std::vector<Graph>& queries,
                               const std::vector<const NbrInstance*>& batch) {
    if (batch.empty()) throw ValidationError("neighborhood_loss: empty batch");
    Tape tape;
    TapeParams tp{tape, model.params, {}};
    PackedBatch qpack;
    for (const Graph& q : queries) qpack.add(q, typed_edges(q), -1);
    PackedBatch npack;
    std::vector<int> nbr_rows, qry_rows;
    std::vector<double> targets;
    for (size_t i = 0; i < batch.size(); ++i) {
        const NbrInstance& inst = *batch[i];
        npack.add(inst.graph, typed_edges(inst.graph), inst.canonical_node);
        for (auto [q, t] : inst.targets) {
            if (q < 0 || q >= static_cast<int>(queries.size()))
                throw ValidationError("neighborhood_loss: target query out of range");
            nbr_rows.push_back(static_cast<int>(i));
            qry_rows.push_back(q);
            targets.push_back(t);
        }
    }
    if (targets.empty()) throw ValidationError("neighborhood_loss: batch has no targets");
    Tape::Id qry_emb = shmp_encode(tape, tp, model.config, "qry", qpack);
    Tape::Id nbr_emb = shmp_encode(tape, tp, model.config, "nbr", npack);
    Tape::Id raw = shmp_head(tape, tp, model.config, tape.gather_rows(nbr_emb, nbr_rows),
                             tape.gather_rows(qry_emb, qry_rows));
    Tape::Id elems = tape.smooth_l1(raw, Tensor2::column(targets));
    Tape::Id loss = tape.scale(tape.sum_rows(elems), 1.0 / static_cast<double>(targets.size()));
    tape.backward(loss);
    return {tape.value(loss).data[0], tp.grads()};
}

std::vector<double> train_neighborhood(ShmpModel& model, const std::vector<Graph>& queries,
                                       const std::vector<NbrInstance>& data,
                                       const NbrTrainConfig& cfg) {
    if (data.empty()) throw ValidationError("train_neighborhood: empty dataset");
    if (cfg.epochs < 1 || cfg.batch_instances < 1)
        throw ValidationError("train_neighborhood: epochs and batch size must be positive");
    size_t total_targets = 0;
    for (const auto& inst : data) total_targets += inst.targets.size();
    if (total_targets == 0) throw ValidationError("train_neighborhood: dataset has no targets");

    std::vector<int> order(data.size());
    std::iota(order.begin(), order.end(), 0);
    Rng rng(derive_seed(cfg.seed, kTrainStream, 0));
    std::vector<double> curve;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        rng.shuffle(order);
        double epoch_sum = 0.0;
        for (size_t start = 0; start < order.size(); start += cfg.batch_instances) {
            size_t stop = std::min(order.size(), start + cfg.batch_instances);
            std::vector<const NbrInstance*> batch;
            size_t batch_targets = 0;
            for (size_t i = start; i < stop; ++i) {
                batch.push_back(&data[order[i]]);
                batch_targets += data[order[i]].targets.size();
            }
            if (batch_targets == 0) continue;
            LossAndGrads lg = neighborhood_loss(model, queries, batch);
            if (!std::isfinite(lg.loss))
                throw std::runtime_error("train_neighborhood: non-finite loss at epoch " +
                                         std::to_string(epoch));
            adam_step(model.params, lg.grads, cfg.adam);
            epoch_sum += lg.loss * static_cast<double>(batch_targets);
        }
        curve.push_back(epoch_sum / static_cast<double>(total_targets));
    }
    return curve;
}

}  // namespace subcount
