#pragma once

// Test-only utilities: tiny named graphs and slow reference implementations
// that the fast library code is checked against. The references here use a
// different strategy on purpose (raw permutations, raw subset scans) so a
// shared bug cannot hide.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <set>
#include <vector>

#include "subcount/graph.hpp"
#include "subcount/rng.hpp"

namespace testutil {

using subcount::Graph;
using subcount::make_graph;

inline Graph path(int n) {
    std::vector<std::pair<int, int>> e;
    for (int i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
    return make_graph(n, e);
}

inline Graph cycle(int n) {
    auto e = path(n).edges;
    e.emplace_back(0, n - 1);
    return make_graph(n, e);
}

inline Graph complete(int n) {
    std::vector<std::pair<int, int>> e;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) e.emplace_back(i, j);
    return make_graph(n, e);
}

// center is node 0
inline Graph star(int leaves) {
    std::vector<std::pair<int, int>> e;
    for (int i = 1; i <= leaves; ++i) e.emplace_back(0, i);
    return make_graph(leaves + 1, e);
}

// parts {0,1,2} and {3,4,5}
inline Graph k33() {
    std::vector<std::pair<int, int>> e;
    for (int a = 0; a < 3; ++a)
        for (int b = 3; b < 6; ++b) e.emplace_back(a, b);
    return make_graph(6, e);
}

// triangles 0-1-2 and 3-4-5, rungs i..i+3
inline Graph prism() {
    return make_graph(6, {{0, 1}, {0, 2}, {1, 2}, {3, 4}, {3, 5}, {4, 5}, {0, 3}, {1, 4}, {2, 5}});
}

// Reference isomorphism: try all n! bijections.
inline bool naive_isomorphic(const Graph& a, const Graph& b) {
    if (a.num_nodes != b.num_nodes || a.edges.size() != b.edges.size()) return false;
    std::vector<int> perm(a.num_nodes);
    std::iota(perm.begin(), perm.end(), 0);
    std::set<std::pair<int, int>> eb(b.edges.begin(), b.edges.end());
    do {
        bool ok = true;
        for (auto [x, y] : a.edges) {
            int px = perm[x], py = perm[y];
            if (px > py) std::swap(px, py);
            if (!eb.count({px, py})) {
                ok = false;
                break;
            }
        }
        if (ok) return true;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return false;
}

// Reference subset scan: every C(n,k) combination, filtered for
// connectivity by union-find.
inline std::vector<std::vector<int>> naive_connected_subsets(const Graph& g, int k) {
    std::vector<std::vector<int>> out;
    std::vector<int> pick;
    auto connected = [&](const std::vector<int>& nodes) {
        std::vector<int> parent(nodes.size());
        std::iota(parent.begin(), parent.end(), 0);
        auto find = [&](int x) {
            while (parent[x] != x) x = parent[x] = parent[parent[x]];
            return x;
        };
        for (size_t i = 0; i < nodes.size(); ++i)
            for (size_t j = i + 1; j < nodes.size(); ++j)
                if (subcount::has_edge(g, nodes[i], nodes[j])) {
                    int a = find(static_cast<int>(i)), b = find(static_cast<int>(j));
                    parent[a] = b;
                }
        for (size_t i = 1; i < nodes.size(); ++i)
            if (find(static_cast<int>(i)) != find(0)) return false;
        return true;
    };
    auto rec = [&](auto&& self, int from) -> void {
        if (static_cast<int>(pick.size()) == k) {
            if (connected(pick)) out.push_back(pick);
            return;
        }
        for (int v = from; v < g.num_nodes; ++v) {
            pick.push_back(v);
            self(self, v + 1);
            pick.pop_back();
        }
    };
    rec(rec, 0);
    return out;
}

// Seeded G(n, m) graph for property tests.
inline Graph random_graph(int n, int m, uint64_t seed) {
    subcount::Rng rng(seed);
    std::vector<std::pair<int, int>> all;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) all.emplace_back(i, j);
    rng.shuffle(all);
    m = std::min<int>(m, static_cast<int>(all.size()));
    all.resize(m);
    return make_graph(n, all);
}

}  // namespace testutil
