#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace subcount {

// Simple undirected graph. Nodes are 0..num_nodes-1. Edges are stored
// normalized (first < second), sorted, without duplicates; self-loops are
// rejected at construction.
//
// node_index is a permutation of 0..num_nodes-1 that orders the nodes for
// the counting decomposition: every pattern occurrence is charged to the
// member with the largest node_index. It is independent of node ids so that
// the ordering can be re-randomized without relabeling the graph.
struct Graph {
    int num_nodes = 0;
    std::vector<std::pair<int, int>> edges;
    std::vector<int> node_index;  // identity unless assign_indices was called

    int num_edges() const { return static_cast<int>(edges.size()); }
    bool operator==(const Graph&) const = default;
};

// Validates node range, self-loops and duplicates; normalizes and sorts the
// edge list; node_index starts as identity.
Graph make_graph(int num_nodes, std::vector<std::pair<int, int>> edges);

// Sorted adjacency lists.
std::vector<std::vector<int>> adjacency_list(const Graph& g);

bool has_edge(const Graph& g, int a, int b);

// Text format: first non-comment line "num_nodes num_edges", then one
// "u v" line per edge. Lines starting with '#' are comments. Errors carry
// the 1-based line number.
Graph parse_edge_list(const std::string& text, const std::string& origin = "<string>");
Graph load_graph(const std::string& path);
std::string format_edge_list(const Graph& g);
void save_graph(const Graph& g, const std::string& path);

// Overwrites node_index with a uniformly random permutation drawn from
// `seed`. Same (num_nodes, seed) gives the same permutation.
void assign_indices(Graph& g, uint64_t seed);

bool is_connected(const Graph& g);

// Longest shortest path, by BFS from every node. Error on disconnected or
// empty graphs.
int diameter(const Graph& g);

// Induced subgraph on `nodes` (need not be sorted; must be distinct and in
// range). Local ids follow the order given in `nodes`; node_index of the
// result holds the *ranks* of the original indices, so relative order is
// preserved.
Graph induced_subgraph(const Graph& g, const std::vector<int>& nodes);

// New graph with node ids permuted: node v becomes perm[v]. Carries
// node_index along (the index travels with the node).
Graph relabel(const Graph& g, const std::vector<int>& perm);

}  // namespace subcount
