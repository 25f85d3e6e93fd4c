#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "subcount/count_table.hpp"
#include "subcount/gossip.hpp"
#include "subcount/graph.hpp"
#include "subcount/metrics.hpp"
#include "subcount/queries.hpp"
#include "subcount/shmp.hpp"

namespace subcount {

// Glue between the stages: exact counts -> neighborhood training data ->
// per-node predictions -> gossip refinement -> per-size scores. The CLI
// commands and the end-to-end tests both drive these functions so they
// exercise the same code paths.

struct PipelineConfig {
    int depth = 4;
    int query_min = 3;
    int query_max = 5;
    uint64_t seed = 1;
    double holdout_fraction = 0.2;
    ShmpConfig shmp = desk_shmp_config();
    GossipConfig gossip = desk_gossip_config();
    NbrTrainConfig nbr_train;
    GossipTrainConfig gossip_train;
};

// Deterministic split by graph position; the holdout gets
// round(count * fraction) graphs, at least one of each side when count > 1.
void split_dataset(size_t count, double holdout_fraction, uint64_t seed,
                   std::vector<int>& train_pos, std::vector<int>& holdout_pos);

// One training instance per node of each selected graph: the node's
// canonical neighborhood plus its exact canonical count for every query.
// `truth` must be aligned with `graphs` position by position.
std::vector<NbrInstance> build_nbr_instances(const std::vector<Graph>& graphs,
                                             const std::vector<int>& positions,
                                             const CountTable& truth, int depth);

ShmpModel train_neighborhood_stage(const std::vector<Graph>& graphs,
                                   const std::vector<int>& train_pos, const CountTable& truth,
                                   const QuerySet& queries, const PipelineConfig& cfg,
                                   std::vector<double>* curve);

// Per-node predictions for the selected graphs (graph ids taken from
// `ids`, aligned with `graphs`).
PredTable predict_neighborhood(const ShmpModel& model, const std::vector<Graph>& graphs,
                               const std::vector<int>& ids, const std::vector<int>& positions,
                               const QuerySet& queries, int depth);

// One gossip training instance per (graph, query), with the frozen
// neighborhood predictions as inputs and exact counts as supervision.
std::vector<GossipInstance> build_gossip_instances(const ShmpModel& model,
                                                   const std::vector<Graph>& graphs,
                                                   const std::vector<int>& positions,
                                                   const CountTable& truth,
                                                   const PredTable& nbr_preds,
                                                   const QuerySet& queries);

GossipModel train_gossip_stage(const ShmpModel& model, const std::vector<Graph>& graphs,
                               const std::vector<int>& train_pos, const CountTable& truth,
                               const PredTable& nbr_preds_train, const QuerySet& queries,
                               const PipelineConfig& cfg, std::vector<double>* curve);

PredTable refine_with_gossip(const GossipModel& gossip, const ShmpModel& model,
                             const std::vector<Graph>& graphs, const std::vector<int>& positions,
                             const QuerySet& queries, const PredTable& nbr_preds);

// Rows of `t` for the given positions, in the given order.
CountTable subset_table(const CountTable& t, const std::vector<int>& positions);

// Normalized MSE pooled per query size; `totals` scores per-graph sums,
// otherwise every (node, query) cell counts.
std::map<int, double> per_size_nmse(const PredTable& pred, const CountTable& truth,
                                    const QuerySet& queries, bool totals);

// Model checkpoints (JSON; hyperparameters embedded and checked on load).
void save_shmp(const std::string& path, const ShmpModel& m);
ShmpModel load_shmp(const std::string& path);
void save_gossip(const std::string& path, const GossipModel& m);
GossipModel load_gossip(const std::string& path);

}  // namespace subcount
