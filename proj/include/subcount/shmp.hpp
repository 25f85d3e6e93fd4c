#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "subcount/canonical.hpp"
#include "subcount/graph.hpp"
#include "subcount/optim.hpp"
#include "subcount/tape.hpp"
#include "subcount/triangles.hpp"

namespace subcount {

// Heterogeneous message-passing encoder pair plus a regression head. One
// encoder embeds canonical neighborhoods, an identically shaped one with
// its own weights embeds queries, and the head maps the concatenated pair
// of embeddings to a predicted canonical count.
//
// Edges carry one of two types (triangle member or not) and each layer
// keeps separate message weights per type, so triangle structure survives
// aggregation; a plain homogeneous network is the special case where the
// two message weights coincide.

struct ShmpConfig {
    int layers = 8;
    int hidden = 64;
    int head_hidden = 256;
    double leaky_slope = 0.01;
};

// Small profile used by the CLI defaults and the training tests.
ShmpConfig desk_shmp_config();

struct ShmpModel {
    ShmpConfig config;
    ParamStore params;
};

ShmpModel make_shmp_model(const ShmpConfig& cfg, uint64_t seed);

// Copy each layer's triangle message weights onto the plain ones (both
// encoders), turning the model into a homogeneous message passer.
void tie_edge_weights(ShmpModel& model);

// Directed edge lists split by triangle membership; both directions of
// every undirected edge appear.
struct TypedEdges {
    std::vector<int> tri_src, tri_dst;
    std::vector<int> plain_src, plain_dst;
};
TypedEdges typed_edges(const Graph& g);

// Per-node inputs: column 0 is the constant 1, column 1 flags the
// canonical node. Pass canonical_node = -1 for query graphs (no flag).
Tensor2 initial_features(const Graph& g, int canonical_node);

// Several graphs packed as one disjoint union so a whole batch runs
// through the encoder as a handful of large matmuls. node_graph maps each
// packed node back to its graph's position in the batch.
struct PackedBatch {
    Tensor2 features{0, 2};
    std::vector<int> tri_src, tri_dst, plain_src, plain_dst;
    std::vector<int> node_graph;
    int num_graphs = 0;
    int total_nodes = 0;

    void add(const Graph& g, const TypedEdges& te, int canonical_node);
};

// Parameter leaves for one tape, created on first use so every occurrence
// of a parameter in the forward pass shares a single node (gradients then
// accumulate correctly across the batch).
struct TapeParams {
    Tape& tape;
    const ParamStore& store;
    std::map<std::string, Tape::Id> ids;

    Tape::Id operator()(const std::string& name);
    // Gradient per parameter; zero tensors for parameters the forward pass
    // never touched.
    std::map<std::string, Tensor2> grads() const;
};

// Runs the encoder named by prefix ("nbr" or "qry") over a packed batch.
// Returns the id of the num_graphs x hidden matrix of sum-pooled
// embeddings.
Tape::Id shmp_encode(Tape& tape, TapeParams& params, const ShmpConfig& cfg,
                     const std::string& prefix, const PackedBatch& batch);

// Regression head on row-aligned neighborhood/query embeddings; returns
// raw (unclamped) predictions, one row each.
Tape::Id shmp_head(Tape& tape, TapeParams& params, const ShmpConfig& cfg, Tape::Id nbr_embed,
                   Tape::Id query_embed);

// Inference helpers (no gradients kept, outputs clamped where noted).
Tensor2 embed_graph(const ShmpModel& model, const std::string& prefix, const Graph& g,
                    const TypedEdges& te, int canonical_node);
Tensor2 embed_query(const ShmpModel& model, const Graph& query);
// One row per neighborhood; packs internally in fixed-size chunks.
Tensor2 embed_neighborhoods(const ShmpModel& model,
                            const std::vector<const CanonicalNeighborhood*>& nbs);
// Clamped counts, one per row of nbr_embed, all against the same query.
std::vector<double> head_predictions(const ShmpModel& model, const Tensor2& nbr_embed,
                                     const Tensor2& query_embed);
double predict_canonical_count(const ShmpModel& model, const Graph& query,
                               const CanonicalNeighborhood& nb);

// One neighborhood with its supervision targets, sparse over the query
// list: (query position, canonical count) pairs.
struct NbrInstance {
    Graph graph;
    int canonical_node = 0;
    std::vector<std::pair<int, double>> targets;
};

struct NbrTrainConfig {
    int epochs = 100;
    int batch_instances = 8;
    uint64_t seed = 1;
    AdamConfig adam;
};

struct LossAndGrads {
    double loss = 0.0;
    std::map<std::string, Tensor2> grads;
};

// Mean smooth-l1 over every (neighborhood, query) pair in the batch, with
// gradients for all parameters.
LossAndGrads neighborhood_loss(const ShmpModel& model, const std::vector<Graph>& queries,
                               const std::vector<const NbrInstance*>& batch);

// Adam over shuffled mini-batches; returns the mean training loss per
// epoch. Deterministic for a fixed seed. Throws if the loss goes
// non-finite.
std::vector<double> train_neighborhood(ShmpModel& model, const std::vector<Graph>& queries,
                                       const std::vector<NbrInstance>& data,
                                       const NbrTrainConfig& cfg);

}  // namespace subcount
