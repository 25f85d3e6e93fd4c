#include "subcount/iso.hpp"

#include <algorithm>
#include <cstdint>

#include "subcount/error.hpp"

namespace subcount {
namespace {

constexpr int kMaxIsoNodes = 16;

std::vector<uint32_t> adjacency_masks(const Graph& g) {
    std::vector<uint32_t> mask(g.num_nodes, 0);
    for (auto [a, b] : g.edges) {
        mask[a] |= 1u << b;
        mask[b] |= 1u << a;
    }
    return mask;
}

struct Matcher {
    int n;
    const std::vector<uint32_t>& adj_a;
    const std::vector<uint32_t>& adj_b;
    std::vector<int> order;     // nodes of `a` in matching order
    std::vector<int> map;       // a-node -> b-node, -1 if unmapped
    uint32_t used_b = 0;

    bool extend(int pos) {
        if (pos == n) return true;
        int v = order[pos];
        uint32_t va = adj_a[v];
        for (int w = 0; w < n; ++w) {
            if (used_b & (1u << w)) continue;
            if (__builtin_popcount(adj_b[w]) != __builtin_popcount(va)) continue;
            // w must mirror v's adjacency toward everything already mapped
            bool ok = true;
            for (int q = 0; q < pos; ++q) {
                int u = order[q];
                bool ea = (va >> u) & 1u;
                bool eb = (adj_b[w] >> map[u]) & 1u;
                if (ea != eb) {
                    ok = false;
                    break;
                }
            }
            if (!ok) continue;
            map[v] = w;
            used_b |= 1u << w;
            if (extend(pos + 1)) return true;
            used_b &= ~(1u << w);
            map[v] = -1;
        }
        return false;
    }
};

}  // namespace

bool is_isomorphic(const Graph& a, const Graph& b) {
    if (a.num_nodes > kMaxIsoNodes || b.num_nodes > kMaxIsoNodes)
        throw ValidationError("is_isomorphic: graphs larger than 16 nodes are not supported");
    if (a.num_nodes != b.num_nodes || a.num_edges() != b.num_edges()) return false;
    int n = a.num_nodes;
    if (n == 0) return true;

    auto adj_a = adjacency_masks(a);
    auto adj_b = adjacency_masks(b);

    std::vector<int> deg_a(n), deg_b(n);
    for (int v = 0; v < n; ++v) {
        deg_a[v] = __builtin_popcount(adj_a[v]);
        deg_b[v] = __builtin_popcount(adj_b[v]);
    }
    auto sorted_a = deg_a, sorted_b = deg_b;
    std::sort(sorted_a.begin(), sorted_a.end());
    std::sort(sorted_b.begin(), sorted_b.end());
    if (sorted_a != sorted_b) return false;

    // Match high-degree nodes first; fewer candidates, earlier pruning.
    Matcher m{n, adj_a, adj_b, {}, std::vector<int>(n, -1), 0};
    m.order.resize(n);
    for (int v = 0; v < n; ++v) m.order[v] = v;
    std::sort(m.order.begin(), m.order.end(), [&](int x, int y) {
        if (deg_a[x] != deg_a[y]) return deg_a[x] > deg_a[y];
        return x < y;
    });
    return m.extend(0);
}

}  // namespace subcount
