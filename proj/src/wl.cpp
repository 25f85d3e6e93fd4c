#include "subcount/wl.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include "subcount/error.hpp"
#include "subcount/iso.hpp"
#include "subcount/queries.hpp"
#include "subcount/rng.hpp"
#include "subcount/triangles.hpp"

namespace subcount {

namespace {

uint64_t hash_mix(uint64_t h, uint64_t x) { return splitmix64(h ^ x); }

bool is_regular(const Graph& g, int* degree_out) {
    std::vector<int> deg(g.num_nodes, 0);
    for (auto [u, v] : g.edges) {
        deg[u] += 1;
        deg[v] += 1;
    }
    for (int d : deg)
        if (d != deg[0]) return false;
    if (degree_out) *degree_out = g.num_nodes ? deg[0] : 0;
    return true;
}

}  // namespace

std::vector<uint64_t> wl_colors(const Graph& g, int rounds) {
    if (rounds < 0) rounds = g.num_nodes;
    auto adj = adjacency_list(g);
    std::vector<uint64_t> color(g.num_nodes);
    for (int v = 0; v < g.num_nodes; ++v)
        color[v] = hash_mix(0x776c30, static_cast<uint64_t>(adj[v].size()));
    std::vector<uint64_t> next(g.num_nodes);
    for (int r = 0; r < rounds; ++r) {
        for (int v = 0; v < g.num_nodes; ++v) {
            std::vector<uint64_t> nb;
            nb.reserve(adj[v].size());
            for (int u : adj[v]) nb.push_back(color[u]);
            std::sort(nb.begin(), nb.end());
            uint64_t h = hash_mix(0x776c31, color[v]);
            for (uint64_t c : nb) h = hash_mix(h, c);
            next[v] = h;
        }
        color = next;
    }
    return color;
}

std::vector<uint64_t> wl_histogram(const Graph& g, int rounds) {
    std::vector<uint64_t> h = wl_colors(g, rounds);
    std::sort(h.begin(), h.end());
    return h;
}

bool wl_indistinguishable(const Graph& a, const Graph& b) {
    int rounds = std::max(a.num_nodes, b.num_nodes);
    return wl_histogram(a, rounds) == wl_histogram(b, rounds);
}

std::vector<std::pair<int, int>> typed_degree_histogram(const Graph& g) {
    std::vector<EdgeType> types = triangle_edge_types(g);
    std::vector<std::pair<int, int>> deg(g.num_nodes, {0, 0});
    for (size_t e = 0; e < g.edges.size(); ++e) {
        auto [u, v] = g.edges[e];
        if (types[e] == EdgeType::Triangle) {
            deg[u].first += 1;
            deg[v].first += 1;
        } else {
            deg[u].second += 1;
            deg[v].second += 1;
        }
    }
    std::sort(deg.begin(), deg.end());
    return deg;
}

bool shmp_indistinguishable(const Graph& a, const Graph& b) {
    return wl_indistinguishable(a, b) && typed_degree_histogram(a) == typed_degree_histogram(b);
}

std::vector<StudyRow> shmp_distinguishability_study(int min_size, int max_size,
                                                    const std::vector<Graph>& extra) {
    if (min_size < 3 || max_size < min_size)
        throw ValidationError("study: need 3 <= min_size <= max_size");
    for (const Graph& g : extra) {
        if (!is_connected(g)) throw ValidationError("study: extra graphs must be connected");
        if (!is_regular(g, nullptr)) throw ValidationError("study: extra graphs must be regular");
    }
    std::vector<StudyRow> rows;
    for (int size = min_size; size <= max_size; ++size) {
        std::vector<Graph> graphs;
        if (size <= 8) {
            for (int d = 2; d < size; ++d) {
                auto regs = connected_regular_graphs(size, d);
                graphs.insert(graphs.end(), regs.begin(), regs.end());
            }
        }
        for (const Graph& g : extra) {
            if (g.num_nodes != size) continue;
            bool dup = false;
            for (const Graph& h : graphs)
                if (g.num_nodes <= 16 && h.num_nodes <= 16 && is_isomorphic(g, h)) dup = true;
            if (!dup) graphs.push_back(g);
        }
        StudyRow row;
        row.size = size;
        row.graphs = static_cast<int>(graphs.size());
        for (size_t i = 0; i < graphs.size(); ++i) {
            for (size_t j = i + 1; j < graphs.size(); ++j) {
                row.pairs += 1;
                if (!wl_indistinguishable(graphs[i], graphs[j])) continue;
                row.wl_indistinguishable += 1;
                if (shmp_indistinguishable(graphs[i], graphs[j])) row.shmp_indistinguishable += 1;
            }
        }
        rows.push_back(row);
    }
    return rows;
}

void save_study_csv(const std::string& path, const std::vector<StudyRow>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "size,graphs,pairs,wl_indistinguishable,shmp_indistinguishable\n";
    for (const auto& r : rows)
        out << r.size << "," << r.graphs << "," << r.pairs << "," << r.wl_indistinguishable << ","
            << r.shmp_indistinguishable << "\n";
}

}  // namespace subcount
