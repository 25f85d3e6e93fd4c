#pragma once

#include <string>

#include "subcount/graph.hpp"

namespace subcount {

struct Query {
    std::string name;  // e.g. "q3_0"
    Graph graph;
    int diameter = 0;
};

struct QuerySet {
    std::vector<Query> queries;

    int size() const { return static_cast<int>(queries.size()); }
    int max_diameter() const;
    int max_nodes() const;
};

// All connected graphs with min_nodes..max_nodes nodes, one representative
// per isomorphism class, by brute force over edge subsets with isomorphism
// dedup. Order is deterministic: by node count, then by discovery order
// over the numeric edge-subset encoding. Bounds: 1 <= min <= max <= 7.
QuerySet enumerate_queries(int min_nodes, int max_nodes);

// All connected degree-regular graphs on n nodes: one file of patterns per
// isomorphism class across every feasible degree. Backtracking with exact
// degree pruning; n is capped at 10 (enough for the built-in studies).
std::vector<Graph> connected_regular_graphs(int n, int degree);

// Query set directory: one edge-list file per query plus queries.txt with
// lines "name num_nodes diameter file".
void save_query_set(const QuerySet& qs, const std::string& dir);
QuerySet load_query_set(const std::string& dir);

}  // namespace subcount
