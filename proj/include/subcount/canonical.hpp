#pragma once

#include <string>

#include "subcount/graph.hpp"

namespace subcount {

// The depth-d neighborhood that "belongs" to one node. Extracted by BFS
// from the center that only ever steps onto nodes with node_index <= the
// center's; higher-indexed nodes neither join nor bridge. The center
// therefore carries the largest node_index in the result, and every pattern
// whose top-index member is the center lies inside (for d at least the
// pattern diameter).
struct CanonicalNeighborhood {
    Graph graph;               // local ids 0..k-1; node_index = ranks of original indices
    std::vector<int> origin;   // local id -> node id in the target graph
    int canonical_node = 0;    // local id of the center
    int depth = 0;
};

CanonicalNeighborhood canonical_partition(const Graph& target, int center, int depth);

// One neighborhood per node, in node-id order.
std::vector<CanonicalNeighborhood> partition_all(const Graph& target, int depth);

// Debug dump: for each neighborhood, an edge list "node_<id>.edges" named
// by the center's id in the target graph, plus a sidecar "node_<id>.map"
// with one "local_id original_id" line per node.
void save_neighborhood_dump(const std::vector<CanonicalNeighborhood>& parts,
                            const std::string& dir);

// How much smaller per-neighborhood work is, versus running a matcher on
// the whole graph, for a few cost models S(V). Each entry is
// log10(S(V_target) / sum_i S(V_neighborhood_i)), computed in log space so
// S(1000) = 2^1000 does not overflow. Positive means the split wins.
struct PartitionComplexityReport {
    int target_nodes = 0;
    std::vector<int> neighborhood_sizes;           // node-id order
    double log10_reduction_exp2 = 0.0;             // S(V) = 2^V
    double log10_reduction_quadratic = 0.0;        // S(V) = V^2
    double log10_reduction_factorial = 0.0;        // S(V) = V! * V
};

PartitionComplexityReport partition_complexity_report(const Graph& target, int depth);

std::string format_complexity_report(const PartitionComplexityReport& r);

}  // namespace subcount
