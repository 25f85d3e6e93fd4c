#include "subcount/canonical.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "subcount/error.hpp"

namespace subcount {

CanonicalNeighborhood canonical_partition(const Graph& target, int center, int depth) {
    if (center < 0 || center >= target.num_nodes)
        throw ValidationError("canonical_partition: center out of range");
    if (depth < 0) throw ValidationError("canonical_partition: negative depth");

    auto adj = adjacency_list(target);
    int center_idx = target.node_index[center];

    // Level-by-level BFS. The index restriction applies to traversal: a
    // node with a larger index is skipped outright, so it cannot relay the
    // frontier even if a path through it would reach small-index nodes.
    std::vector<char> member(target.num_nodes, 0);
    member[center] = 1;
    std::vector<int> frontier{center};
    for (int level = 0; level < depth && !frontier.empty(); ++level) {
        std::vector<int> next;
        for (int v : frontier)
            for (int u : adj[v]) {
                if (member[u] || target.node_index[u] > center_idx) continue;
                member[u] = 1;
                next.push_back(u);
            }
        frontier = std::move(next);
    }

    std::vector<int> nodes;
    for (int v = 0; v < target.num_nodes; ++v)
        if (member[v]) nodes.push_back(v);

    CanonicalNeighborhood out;
    out.graph = induced_subgraph(target, nodes);
    out.origin = nodes;
    out.depth = depth;
    out.canonical_node =
        static_cast<int>(std::find(nodes.begin(), nodes.end(), center) - nodes.begin());
    return out;
}

std::vector<CanonicalNeighborhood> partition_all(const Graph& target, int depth) {
    std::vector<CanonicalNeighborhood> out;
    out.reserve(target.num_nodes);
    for (int v = 0; v < target.num_nodes; ++v) out.push_back(canonical_partition(target, v, depth));
    return out;
}

void save_neighborhood_dump(const std::vector<CanonicalNeighborhood>& parts,
                            const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    for (const auto& nb : parts) {
        std::string stem = "node_" + std::to_string(nb.origin.at(nb.canonical_node));
        save_graph(nb.graph, (fs::path(dir) / (stem + ".edges")).string());
        std::ofstream map(fs::path(dir) / (stem + ".map"));
        if (!map) throw std::runtime_error("cannot write neighborhood map in " + dir);
        for (size_t local = 0; local < nb.origin.size(); ++local)
            map << local << ' ' << nb.origin[local] << '\n';
    }
}

namespace {

// log10 of sum(10^x) without leaving log space.
double log10_sum(const std::vector<double>& xs) {
    double hi = -HUGE_VAL;
    for (double x : xs) hi = std::max(hi, x);
    if (!std::isfinite(hi)) return hi;
    double acc = 0.0;
    for (double x : xs) acc += std::pow(10.0, x - hi);
    return hi + std::log10(acc);
}

double log10_factorial(int n) { return std::lgamma(n + 1.0) / std::log(10.0); }

}  // namespace

PartitionComplexityReport partition_complexity_report(const Graph& target, int depth) {
    if (target.num_nodes == 0)
        throw ValidationError("partition_complexity_report: empty graph");
    PartitionComplexityReport r;
    r.target_nodes = target.num_nodes;

    std::vector<double> exp2_terms, quad_terms, fact_terms;
    for (const auto& nb : partition_all(target, depth)) {
        int k = nb.graph.num_nodes;
        r.neighborhood_sizes.push_back(k);
        exp2_terms.push_back(k * std::log10(2.0));
        quad_terms.push_back(2.0 * std::log10(static_cast<double>(k)));
        fact_terms.push_back(log10_factorial(k) + std::log10(static_cast<double>(k)));
    }

    int n = target.num_nodes;
    r.log10_reduction_exp2 = n * std::log10(2.0) - log10_sum(exp2_terms);
    r.log10_reduction_quadratic = 2.0 * std::log10(static_cast<double>(n)) - log10_sum(quad_terms);
    r.log10_reduction_factorial =
        log10_factorial(n) + std::log10(static_cast<double>(n)) - log10_sum(fact_terms);
    return r;
}

std::string format_complexity_report(const PartitionComplexityReport& r) {
    int largest = 0;
    for (int k : r.neighborhood_sizes) largest = std::max(largest, k);
    std::ostringstream out;
    out << "target nodes: " << r.target_nodes << "\n"
        << "neighborhoods: " << r.neighborhood_sizes.size() << " (largest " << largest << ")\n"
        << "log10 reduction, S(V)=2^V:  " << r.log10_reduction_exp2 << "\n"
        << "log10 reduction, S(V)=V^2:  " << r.log10_reduction_quadratic << "\n"
        << "log10 reduction, S(V)=V!*V: " << r.log10_reduction_factorial << "\n";
    return out.str();
}

}  // namespace subcount
