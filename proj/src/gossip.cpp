#include "subcount/gossip.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "subcount/error.hpp"
#include "subcount/rng.hpp"

namespace subcount {

namespace {

constexpr uint64_t kParamStream = 0x677061;  // parameter init
constexpr uint64_t kTrainStream = 0x677472;  // batch shuffling

std::string layer_prefix(int l) { return "l" + std::to_string(l) + "."; }

// Directed edge lists split by index direction: "up" edges point at the
// higher-index endpoint (gate weight P), "down" edges at the lower one
// (weight 1-P). node_index is a permutation, so ties cannot occur.
struct SplitEdges {
    std::vector<int> up_src, up_dst, dn_src, dn_dst;
};

SplitEdges split_by_index(const Graph& g) {
    SplitEdges se;
    for (auto [u, v] : g.edges) {
        int lo = g.node_index[u] < g.node_index[v] ? u : v;
        int hi = lo == u ? v : u;
        se.up_src.push_back(lo);
        se.up_dst.push_back(hi);
        se.dn_src.push_back(hi);
        se.dn_dst.push_back(lo);
    }
    return se;
}

// Raw (unclamped) refined counts for one instance, as an n x 1 tape node.
Tape::Id forward_instance(Tape& tape, TapeParams& params, const GossipConfig& cfg,
                          const Graph& target, const Tensor2& preds_col,
                          const Tensor2& query_embedding) {
    if (query_embedding.rows != 1 || query_embedding.cols != cfg.query_dim)
        throw ValidationError("gossip: query embedding shape mismatch");
    if (preds_col.rows != target.num_nodes || preds_col.cols != 1)
        throw ValidationError("gossip: need one prediction per target node");
    SplitEdges se = split_by_index(target);
    Tape::Id qleaf = tape.leaf(query_embedding);
    Tape::Id gate_hidden = tape.leaky_relu(
        tape.add_rowvec(tape.matmul(qleaf, params("gate.w0")), params("gate.b0")), cfg.leaky_slope);
    Tape::Id x = tape.add_rowvec(tape.matmul(tape.leaf(preds_col), params("expand.w")),
                                 params("expand.b"));
    for (int l = 0; l < cfg.layers; ++l) {
        std::string p = layer_prefix(l);
        Tape::Id gate = tape.sigmoid(
            tape.add_rowvec(tape.matmul(gate_hidden, params(p + "gate_w")), params(p + "gate_b")));
        Tape::Id phi = tape.leaky_relu(
            tape.add_rowvec(tape.matmul(x, params(p + "w_msg")), params(p + "b_msg")),
            cfg.leaky_slope);
        Tape::Id up = tape.mul_scalar(tape.gather_rows(phi, se.up_src), gate);
        Tape::Id dn = tape.mul_scalar(tape.gather_rows(phi, se.dn_src), tape.rsub_const(1.0, gate));
        Tape::Id agg = tape.add(tape.scatter_add_rows(up, se.up_dst, target.num_nodes),
                                tape.scatter_add_rows(dn, se.dn_dst, target.num_nodes));
        x = tape.leaky_relu(
            tape.add_rowvec(tape.add(tape.matmul(x, params(p + "w_self")), agg), params(p + "bias")),
            cfg.leaky_slope);
    }
    return tape.add_rowvec(tape.matmul(x, params("out.w")), params("out.b"));
}

}  // namespace

GossipConfig desk_gossip_config() {
    GossipConfig cfg;
    cfg.hidden = 32;
    cfg.gate_hidden = 32;
    cfg.query_dim = 32;
    return cfg;
}

GossipModel make_gossip_model(const GossipConfig& cfg, uint64_t seed) {
    if (cfg.layers < 1 || cfg.hidden < 1 || cfg.gate_hidden < 1 || cfg.query_dim < 1)
        throw ValidationError("gossip: all dimensions must be positive");
    GossipModel m;
    m.config = cfg;
    uint64_t idx = 0;
    auto init = [&](int r, int c) { return xavier_init(r, c, derive_seed(seed, kParamStream, idx++)); };
    m.params.add("expand.w", init(1, cfg.hidden));
    m.params.add("expand.b", Tensor2::zeros(1, cfg.hidden));
    m.params.add("gate.w0", init(cfg.query_dim, cfg.gate_hidden));
    m.params.add("gate.b0", Tensor2::zeros(1, cfg.gate_hidden));
    for (int l = 0; l < cfg.layers; ++l) {
        std::string p = layer_prefix(l);
        m.params.add(p + "w_msg", init(cfg.hidden, cfg.hidden));
        m.params.add(p + "b_msg", Tensor2::zeros(1, cfg.hidden));
        m.params.add(p + "w_self", init(cfg.hidden, cfg.hidden));
        m.params.add(p + "bias", Tensor2::zeros(1, cfg.hidden));
        m.params.add(p + "gate_w", init(cfg.gate_hidden, 1));
        m.params.add(p + "gate_b", Tensor2::zeros(1, 1));
    }
    m.params.add("out.w", init(cfg.hidden, 1));
    m.params.add("out.b", Tensor2::zeros(1, 1));
    return m;
}

std::vector<double> gate_values(const GossipModel& model, const Tensor2& query_embedding) {
    const GossipConfig& cfg = model.config;
    if (query_embedding.rows != 1 || query_embedding.cols != cfg.query_dim)
        throw ValidationError("gate_values: query embedding shape mismatch");
    Tape tape;
    TapeParams tp{tape, model.params, {}};
    Tape::Id qleaf = tape.leaf(query_embedding);
    Tape::Id hidden = tape.leaky_relu(
        tape.add_rowvec(tape.matmul(qleaf, tp("gate.w0")), tp("gate.b0")), cfg.leaky_slope);
    std::vector<double> out;
    for (int l = 0; l < cfg.layers; ++l) {
        std::string p = layer_prefix(l);
        Tape::Id gate = tape.sigmoid(
            tape.add_rowvec(tape.matmul(hidden, tp(p + "gate_w")), tp(p + "gate_b")));
        out.push_back(tape.value(gate).data[0]);
    }
    return out;
}

std::vector<double> gossip_forward(const GossipModel& model, const Graph& target,
                                   const std::vector<double>& node_preds,
                                   const Tensor2& query_embedding) {
    if (static_cast<int>(node_preds.size()) != target.num_nodes)
        throw ValidationError("gossip_forward: need one prediction per target node");
    Tape tape;
    TapeParams tp{tape, model.params, {}};
    Tape::Id raw = forward_instance(tape, tp, model.config, target, Tensor2::column(node_preds),
                                    query_embedding);
    std::vector<double> out(tape.value(raw).data);
    for (double& x : out) x = std::max(0.0, x);
    return out;
}

LossAndGrads gossip_loss(const GossipModel& model,
                         const std::vector<const GossipInstance*>& batch) {
    if (batch.empty()) throw ValidationError("gossip_loss: empty batch");
    Tape tape;
    TapeParams tp{tape, model.params, {}};
    Tape::Id total = -1;
    size_t total_nodes = 0;
    for (const GossipInstance* inst : batch) {
        int n = inst->target.num_nodes;
        if (static_cast<int>(inst->inputs.size()) != n ||
            static_cast<int>(inst->targets.size()) != n)
            throw ValidationError("gossip_loss: inputs/targets must cover every node");
        Tape::Id raw = forward_instance(tape, tp, model.config, inst->target,
                                        Tensor2::column(inst->inputs), inst->query_embedding);
        Tape::Id part = tape.sum_rows(tape.smooth_l1(raw, Tensor2::column(inst->targets)));
        total = total < 0 ? part : tape.add(total, part);
        total_nodes += static_cast<size_t>(n);
    }
    Tape::Id loss = tape.scale(total, 1.0 / static_cast<double>(total_nodes));
    tape.backward(loss);
    return {tape.value(loss).data[0], tp.grads()};
}

std::vector<double> train_gossip(GossipModel& model, const std::vector<GossipInstance>& data,
                                 const GossipTrainConfig& cfg) {
    if (data.empty()) throw ValidationError("train_gossip: empty dataset");
    if (cfg.epochs < 1 || cfg.batch_instances < 1)
        throw ValidationError("train_gossip: epochs and batch size must be positive");
    size_t total_nodes = 0;
    for (const auto& inst : data) total_nodes += inst.targets.size();

    std::vector<int> order(data.size());
    std::iota(order.begin(), order.end(), 0);
    Rng rng(derive_seed(cfg.seed, kTrainStream, 0));
    std::vector<double> curve;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        rng.shuffle(order);
        double epoch_sum = 0.0;
        for (size_t start = 0; start < order.size(); start += cfg.batch_instances) {
            size_t stop = std::min(order.size(), start + cfg.batch_instances);
            std::vector<const GossipInstance*> batch;
            size_t batch_nodes = 0;
            for (size_t i = start; i < stop; ++i) {
                batch.push_back(&data[order[i]]);
                batch_nodes += data[order[i]].targets.size();
            }
            LossAndGrads lg = gossip_loss(model, batch);
            if (!std::isfinite(lg.loss))
                throw std::runtime_error("train_gossip: non-finite loss at epoch " +
                                         std::to_string(epoch));
            adam_step(model.params, lg.grads, cfg.adam);
            epoch_sum += lg.loss * static_cast<double>(batch_nodes);
        }
        curve.push_back(epoch_sum / static_cast<double>(total_nodes));
    }
    return curve;
}

double homophily_ratio(const Graph& g, const std::vector<int64_t>& values) {
    if (g.edges.empty()) throw ValidationError("homophily_ratio: graph has no edges");
    if (static_cast<int>(values.size()) != g.num_nodes)
        throw ValidationError("homophily_ratio: need one value per node");
    int64_t equal = 0;
    for (auto [u, v] : g.edges)
        if (values[u] == values[v]) equal += 1;
    return static_cast<double>(equal) / static_cast<double>(g.edges.size());
}

double index_count_correlation(const std::vector<int>& indices,
                               const std::vector<double>& values) {
    if (indices.size() != values.size())
        throw ValidationError("index_count_correlation: length mismatch");
    size_t n = indices.size();
    if (n < 2) throw ValidationError("index_count_correlation: need at least two nodes");
    double mx = 0.0, my = 0.0;
    for (size_t i = 0; i < n; ++i) {
        mx += indices[i];
        my += values[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (size_t i = 0; i < n; ++i) {
        double dx = indices[i] - mx;
        double dy = values[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0)
        throw ValidationError("index_count_correlation: zero variance");
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace subcount
