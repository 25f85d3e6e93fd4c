#pragma once

#include <cstdint>
#include <vector>

#include "subcount/graph.hpp"
#include "subcount/optim.hpp"
#include "subcount/shmp.hpp"
#include "subcount/tape.hpp"

namespace subcount {

// Gated message passing over the target graph that refines per-node
// canonical-count predictions. Each layer has a single gate value P in
// (0,1) computed from the query embedding: a message along an edge toward
// the higher-index endpoint is weighted P, the reverse direction 1-P, so
// the two directional weights always sum to one. P near 0.5 averages
// neighbors (count homophily); P near 1 pushes mass from low-index nodes
// to high-index ones (the index bias canonical counts inherit).

struct GossipConfig {
    int layers = 2;
    int hidden = 64;
    int gate_hidden = 64;
    int query_dim = 64;  // width of the query embeddings fed to the gates
    double leaky_slope = 0.01;
};

// Profile matching desk_shmp_config() embedding width.
GossipConfig desk_gossip_config();

struct GossipModel {
    GossipConfig config;
    ParamStore params;
};

GossipModel make_gossip_model(const GossipConfig& cfg, uint64_t seed);

// Weight applied to a message src -> dst under gate p, by node index.
inline double directed_gate(double p, int src_index, int dst_index) {
    return src_index <= dst_index ? p : 1.0 - p;
}

// One gate per layer, each in (0,1); sigmoid of a 2-layer MLP on the
// query embedding (1 x query_dim).
std::vector<double> gate_values(const GossipModel& model, const Tensor2& query_embedding);

// Refined per-node counts, clamped at zero. node_preds holds one
// prediction per target node.
std::vector<double> gossip_forward(const GossipModel& model, const Graph& target,
                                   const std::vector<double>& node_preds,
                                   const Tensor2& query_embedding);

// One (target graph, query) pair: frozen upstream predictions as inputs,
// exact canonical counts as supervision.
struct GossipInstance {
    Graph target;
    Tensor2 query_embedding;
    std::vector<double> inputs;
    std::vector<double> targets;
};

struct GossipTrainConfig {
    int epochs = 50;
    int batch_instances = 8;
    uint64_t seed = 1;
    AdamConfig adam;
};

// Mean smooth-l1 over every node of every instance in the batch.
LossAndGrads gossip_loss(const GossipModel& model,
                         const std::vector<const GossipInstance*>& batch);

// Adam over shuffled mini-batches; per-epoch mean losses, deterministic
// under the seed. Throws on non-finite loss.
std::vector<double> train_gossip(GossipModel& model, const std::vector<GossipInstance>& data,
                                 const GossipTrainConfig& cfg);

// Fraction of edges whose endpoints carry equal values. Errors on an
// edgeless graph.
double homophily_ratio(const Graph& g, const std::vector<int64_t>& values);

// Pearson correlation between node indices and node values. Errors when
// either side has zero variance.
double index_count_correlation(const std::vector<int>& indices, const std::vector<double>& values);

}  // namespace subcount
