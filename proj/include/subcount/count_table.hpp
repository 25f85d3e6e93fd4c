#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace subcount {

// Per-node, per-query counts for a set of graphs. T is int64_t for exact
// ground truth and double for model predictions; both serialize to the same
// CSV layout so the evaluator can diff them row by row.
template <typename T>
struct Table {
    struct PerGraph {
        int graph_id = 0;
        std::vector<std::vector<T>> per_node;  // [node][query]
    };
    int num_queries = 0;
    std::vector<PerGraph> graphs;  // ascending graph_id

    std::vector<T> totals(const PerGraph& g) const {
        std::vector<T> t(num_queries, T(0));
        for (const auto& row : g.per_node)
            for (int q = 0; q < num_queries; ++q) t[q] += row[q];
        return t;
    }
};

using CountTable = Table<int64_t>;
using PredTable = Table<double>;

// counts CSV: graph_id,node_id,query_id,count (one row per node x query)
// totals CSV: graph_id,query_id,total
void save_count_csv(const CountTable& t, const std::string& counts_path,
                    const std::string& totals_path);
void save_pred_csv(const PredTable& t, const std::string& counts_path,
                   const std::string& totals_path);
CountTable load_count_csv(const std::string& counts_path);
PredTable load_pred_csv(const std::string& counts_path);

}  // namespace subcount
