#include "subcount/count_table.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "subcount/error.hpp"

namespace subcount {
namespace {

// Shortest decimal that round-trips; keeps prediction CSVs byte-stable.
std::string format_value(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    double back;
    std::sscanf(buf, "%lg", &back);
    for (int prec = 1; prec < 17; ++prec) {
        char shorter[32];
        std::snprintf(shorter, sizeof shorter, "%.*g", prec, v);
        std::sscanf(shorter, "%lg", &back);
        if (back == v) return shorter;
    }
    return buf;
}

std::string format_value(int64_t v) { return std::to_string(v); }

template <typename T>
void save_impl(const Table<T>& t, const std::string& counts_path, const std::string& totals_path) {
    std::ofstream counts(counts_path);
    if (!counts) throw std::runtime_error("cannot write " + counts_path);
    counts << "graph_id,node_id,query_id,count\n";
    for (const auto& g : t.graphs)
        for (size_t v = 0; v < g.per_node.size(); ++v)
            for (int q = 0; q < t.num_queries; ++q)
                counts << g.graph_id << ',' << v << ',' << q << ','
                       << format_value(g.per_node[v][q]) << '\n';

    std::ofstream totals(totals_path);
    if (!totals) throw std::runtime_error("cannot write " + totals_path);
    totals << "graph_id,query_id,total\n";
    for (const auto& g : t.graphs) {
        auto sums = t.totals(g);
        for (int q = 0; q < t.num_queries; ++q)
            totals << g.graph_id << ',' << q << ',' << format_value(sums[q]) << '\n';
    }
}

template <typename T>
Table<T> load_impl(const std::string& counts_path) {
    std::ifstream in(counts_path);
    if (!in) throw ValidationError("cannot open " + counts_path);
    std::string line;
    if (!std::getline(in, line) || line != "graph_id,node_id,query_id,count")
        throw ValidationError(counts_path + ": bad or missing header");

    // graph_id -> node_id -> query_id -> value
    std::map<int, std::map<int, std::map<int, T>>> cells;
    int lineno = 1, max_query = -1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ls(line);
        int g, v, q;
        char c1, c2, c3;
        std::string tail;
        if (!(ls >> g >> c1 >> v >> c2 >> q >> c3) || c1 != ',' || c2 != ',' || c3 != ',' ||
            !std::getline(ls, tail) || tail.empty())
            throw ValidationError(counts_path + ":" + std::to_string(lineno) + ": bad row");
        T val;
        // int64 counts are parsed as integers so values past 2^53 survive
        if constexpr (std::is_integral_v<T>)
            val = static_cast<T>(std::stoll(tail));
        else
            val = std::stod(tail);
        cells[g][v][q] = val;
        max_query = std::max(max_query, q);
    }

    Table<T> t;
    t.num_queries = max_query + 1;
    for (auto& [gid, nodes] : cells) {
        typename Table<T>::PerGraph pg;
        pg.graph_id = gid;
        int expect = 0;
        for (auto& [vid, qs] : nodes) {
            if (vid != expect++)
                throw ValidationError(counts_path + ": graph " + std::to_string(gid) +
                                      " has non-contiguous node ids");
            std::vector<T> row(t.num_queries, T(0));
            for (auto& [qid, val] : qs) row[qid] = val;
            pg.per_node.push_back(std::move(row));
        }
        t.graphs.push_back(std::move(pg));
    }
    return t;
}

}  // namespace

void save_count_csv(const CountTable& t, const std::string& counts_path,
                    const std::string& totals_path) {
    save_impl(t, counts_path, totals_path);
}
void save_pred_csv(const PredTable& t, const std::string& counts_path,
                   const std::string& totals_path) {
    save_impl(t, counts_path, totals_path);
}
CountTable load_count_csv(const std::string& counts_path) { return load_impl<int64_t>(counts_path); }
PredTable load_pred_csv(const std::string& counts_path) { return load_impl<double>(counts_path); }

}  // namespace subcount
