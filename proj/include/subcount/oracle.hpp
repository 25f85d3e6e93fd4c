#pragma once

#include <cstdint>

#include "subcount/canonical.hpp"
#include "subcount/count_table.hpp"
#include "subcount/graph.hpp"
#include "subcount/queries.hpp"

namespace subcount {

// Exact counting. These enumerate connected node subsets of the target and
// isomorphism-test each one, which is deliberately simple: this is the
// reference every learned prediction is judged against. Queries must be
// connected and have at most 8 nodes. Counts are 64-bit; overflow throws.

// Number of connected induced subgraphs of `target` isomorphic to `query`.
int64_t count_subgraphs(const Graph& query, const Graph& target);

// Occurrences charged to `node`: those whose largest node_index sits at
// `node`. Summed over all nodes this recovers count_subgraphs exactly, each
// occurrence having exactly one top-index member.
int64_t canonical_count(const Graph& query, const Graph& target, int node);

// Both identities behind the per-node decomposition, checked exactly:
//   sum_v canonical_count(q, target, v)                    == count_subgraphs
//   sum_v canonical_count(q, neighborhood(v), center of v) == count_subgraphs
// Requires d >= diameter(query) or the neighborhoods may clip occurrences.
bool verify_decomposition(const Graph& query, const Graph& target, int depth);

// Batch versions used for dataset-scale work: one subset enumeration per
// (graph, size) classifying each subset against every query of that size
// through a small lookup table keyed on the induced adjacency bits.
std::vector<int64_t> count_subgraphs_all(const QuerySet& queries, const Graph& target);
// [node][query]
std::vector<std::vector<int64_t>> canonical_counts_all(const QuerySet& queries,
                                                       const Graph& target);

// Exact per-node table for one graph: counts[v][q] = canonical_count of
// query q inside the depth-d neighborhood of v. Errors if depth is below
// the largest query diameter (the decomposition identity needs it).
std::vector<std::vector<int64_t>> ground_truth_counts(const QuerySet& queries,
                                                      const Graph& target, int depth);

// Same across a list of graphs, as a CountTable with graph_ids 0..n-1 (or
// the ids supplied). Graphs are independent integer work, so threads > 1
// splits them across workers; the assembled table is identical for any
// thread count.
CountTable ground_truth_table(const QuerySet& queries, const std::vector<Graph>& targets,
                              int depth, const std::vector<int>* graph_ids = nullptr,
                              int threads = 1);

}  // namespace subcount
