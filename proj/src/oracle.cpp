#include "subcount/oracle.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <thread>

#include "subcount/error.hpp"
#include "subcount/iso.hpp"
#include "subcount/subsets.hpp"

namespace subcount {
namespace {

constexpr int kMaxQueryNodes = 8;

void check_query(const Graph& query) {
    if (query.num_nodes < 1 || query.num_nodes > kMaxQueryNodes)
        throw ValidationError("oracle: query must have 1..8 nodes");
    if (!is_connected(query)) throw ValidationError("oracle: query must be connected");
}

void bump(int64_t& counter) {
    if (counter == INT64_MAX) throw std::runtime_error("oracle: count overflow");
    ++counter;
}

// Adjacency of the chosen subset packed into C(k,2) bits, pair (i,j) i<j in
// lexicographic order. Perfect key for classifying small induced subgraphs.
uint32_t induced_bits(const std::vector<std::vector<char>>& adj_matrix,
                      const std::vector<int>& subset) {
    uint32_t bits = 0;
    int bit = 0;
    int k = static_cast<int>(subset.size());
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j, ++bit)
            if (adj_matrix[subset[i]][subset[j]]) bits |= 1u << bit;
    return bits;
}

std::vector<std::vector<char>> adjacency_matrix(const Graph& g) {
    std::vector<std::vector<char>> m(g.num_nodes, std::vector<char>(g.num_nodes, 0));
    for (auto [a, b] : g.edges) m[a][b] = m[b][a] = 1;
    return m;
}

Graph graph_from_bits(int k, uint32_t bits) {
    std::vector<std::pair<int, int>> edges;
    int bit = 0;
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j, ++bit)
            if (bits & (1u << bit)) edges.emplace_back(i, j);
    return make_graph(k, std::move(edges));
}

// query ids per (size, labeled adjacency bits); -1 where no query matches
struct SubsetClassifier {
    std::map<int, std::vector<int>> tables;  // size -> 2^C(k,2) entries

    explicit SubsetClassifier(const QuerySet& queries) {
        std::map<int, std::vector<int>> by_size;
        for (int qi = 0; qi < queries.size(); ++qi)
            by_size[queries.queries[qi].graph.num_nodes].push_back(qi);
        for (auto& [k, ids] : by_size) {
            int pairs = k * (k - 1) / 2;
            std::vector<int> table(size_t(1) << pairs, -1);
            for (uint32_t bits = 0; bits < table.size(); ++bits) {
                Graph g = graph_from_bits(k, bits);
                if (!is_connected(g)) continue;
                for (int qi : ids)
                    if (is_isomorphic(g, queries.queries[qi].graph)) {
                        table[bits] = qi;
                        break;
                    }
            }
            tables[k] = std::move(table);
        }
    }

    int classify(int k, uint32_t bits) const { return tables.at(k)[bits]; }
    std::vector<int> sizes() const {
        std::vector<int> out;
        for (auto& [k, _] : tables) out.push_back(k);
        return out;
    }
};

int max_query_diameter(const QuerySet& queries) {
    int d = 0;
    for (const auto& q : queries.queries) d = std::max(d, q.diameter);
    return d;
}

}  // namespace

int64_t count_subgraphs(const Graph& query, const Graph& target) {
    check_query(query);
    int64_t count = 0;
    for_each_connected_subset(target, query.num_nodes, [&](const std::vector<int>& subset) {
        Graph sub = induced_subgraph(target, subset);
        if (is_isomorphic(sub, query)) bump(count);
    });
    return count;
}

int64_t canonical_count(const Graph& query, const Graph& target, int node) {
    check_query(query);
    if (node < 0 || node >= target.num_nodes)
        throw ValidationError("canonical_count: node out of range");
    int node_idx = target.node_index[node];
    int64_t count = 0;
    for_each_connected_subset_containing(
        target, node, query.num_nodes, [&](const std::vector<int>& subset) {
            for (int v : subset)
                if (target.node_index[v] > node_idx) return;  // someone outranks `node`
            Graph sub = induced_subgraph(target, subset);
            if (is_isomorphic(sub, query)) bump(count);
        });
    return count;
}

bool verify_decomposition(const Graph& query, const Graph& target, int depth) {
    check_query(query);
    if (depth < diameter(query))
        throw ValidationError("verify_decomposition: depth below query diameter");

    int64_t whole = count_subgraphs(query, target);

    int64_t by_node = 0, by_neighborhood = 0;
    for (int v = 0; v < target.num_nodes; ++v) {
        by_node += canonical_count(query, target, v);
        auto nb = canonical_partition(target, v, depth);
        by_neighborhood += canonical_count(query, nb.graph, nb.canonical_node);
    }
    return by_node == whole && by_neighborhood == whole;
}

std::vector<int64_t> count_subgraphs_all(const QuerySet& queries, const Graph& target) {
    for (const auto& q : queries.queries) check_query(q.graph);
    SubsetClassifier classifier(queries);
    auto matrix = adjacency_matrix(target);
    std::vector<int64_t> counts(queries.size(), 0);
    for (int k : classifier.sizes())
        for_each_connected_subset(target, k, [&](const std::vector<int>& subset) {
            int qi = classifier.classify(k, induced_bits(matrix, subset));
            if (qi >= 0) bump(counts[qi]);
        });
    return counts;
}

std::vector<std::vector<int64_t>> canonical_counts_all(const QuerySet& queries,
                                                       const Graph& target) {
    for (const auto& q : queries.queries) check_query(q.graph);
    SubsetClassifier classifier(queries);
    auto matrix = adjacency_matrix(target);
    std::vector<std::vector<int64_t>> counts(target.num_nodes,
                                             std::vector<int64_t>(queries.size(), 0));
    for (int v = 0; v < target.num_nodes; ++v) {
        int v_idx = target.node_index[v];
        for (int k : classifier.sizes())
            for_each_connected_subset_containing(target, v, k, [&](const std::vector<int>& subset) {
                for (int u : subset)
                    if (target.node_index[u] > v_idx) return;
                int qi = classifier.classify(k, induced_bits(matrix, subset));
                if (qi >= 0) bump(counts[v][qi]);
            });
    }
    return counts;
}

std::vector<std::vector<int64_t>> ground_truth_counts(const QuerySet& queries,
                                                      const Graph& target, int depth) {
    for (const auto& q : queries.queries) check_query(q.graph);
    if (depth < max_query_diameter(queries))
        throw ValidationError("ground truth: depth " + std::to_string(depth) +
                              " is below the largest query diameter " +
                              std::to_string(max_query_diameter(queries)));
    SubsetClassifier classifier(queries);
    std::vector<std::vector<int64_t>> counts(target.num_nodes,
                                             std::vector<int64_t>(queries.size(), 0));
    for (int v = 0; v < target.num_nodes; ++v) {
        auto nb = canonical_partition(target, v, depth);
        auto matrix = adjacency_matrix(nb.graph);
        // the center carries the top node_index inside its neighborhood, so
        // "contains the center" and "center outranks the rest" coincide
        for (int k : classifier.sizes())
            for_each_connected_subset_containing(
                nb.graph, nb.canonical_node, k, [&](const std::vector<int>& subset) {
                    int qi = classifier.classify(k, induced_bits(matrix, subset));
                    if (qi >= 0) bump(counts[v][qi]);
                });
    }
    return counts;
}

CountTable ground_truth_table(const QuerySet& queries, const std::vector<Graph>& targets,
                              int depth, const std::vector<int>* graph_ids, int threads) {
    if (threads < 1) throw ValidationError("ground_truth_table: thread count must be positive");
    CountTable table;
    table.num_queries = queries.size();
    table.graphs.resize(targets.size());
    for (size_t i = 0; i < targets.size(); ++i)
        table.graphs[i].graph_id = graph_ids ? (*graph_ids)[i] : static_cast<int>(i);

    // Each slot depends only on its own graph, so work order cannot change
    // the result; the shared counter only balances load.
    std::atomic<size_t> next{0};
    auto run_slice = [&] {
        for (size_t i = next.fetch_add(1); i < targets.size(); i = next.fetch_add(1))
            table.graphs[i].per_node = ground_truth_counts(queries, targets[i], depth);
    };
    size_t pool = std::min<size_t>(threads, targets.empty() ? 1 : targets.size());
    if (pool <= 1) {
        run_slice();
    } else {
        std::vector<std::thread> crew;
        std::vector<std::exception_ptr> errors(pool);
        crew.reserve(pool);
        for (size_t t = 0; t < pool; ++t)
            crew.emplace_back([&, t] {
                try {
                    run_slice();
                } catch (...) {
                    errors[t] = std::current_exception();
                }
            });
        for (auto& th : crew) th.join();
        for (const auto& err : errors)
            if (err) std::rethrow_exception(err);
    }
    return table;
}

}  // namespace subcount
