#include "subcount/triangles.hpp"

#include <algorithm>
#include <map>

namespace subcount {

std::vector<EdgeType> triangle_edge_types(const Graph& g) {
    int n = g.num_nodes;
    auto adj = adjacency_list(g);

    // rank[] orders nodes by (degree, id); each triangle is visited once,
    // from its lowest-ranked corner, and intersections run over the short
    // "forward" lists only.
    std::vector<int> rank(n);
    {
        std::vector<int> order(n);
        for (int v = 0; v < n; ++v) order[v] = v;
        std::sort(order.begin(), order.end(), [&](int x, int y) {
            if (adj[x].size() != adj[y].size()) return adj[x].size() < adj[y].size();
            return x < y;
        });
        for (int r = 0; r < n; ++r) rank[order[r]] = r;
    }
    std::vector<std::vector<int>> fwd(n);  // neighbors with higher rank, sorted by rank
    for (int v = 0; v < n; ++v) {
        for (int u : adj[v])
            if (rank[u] > rank[v]) fwd[v].push_back(u);
        std::sort(fwd[v].begin(), fwd[v].end(), [&](int x, int y) { return rank[x] < rank[y]; });
    }

    std::map<std::pair<int, int>, int> edge_pos;
    for (int i = 0; i < g.num_edges(); ++i) edge_pos[g.edges[i]] = i;
    auto pos = [&](int a, int b) {
        if (a > b) std::swap(a, b);
        return edge_pos.at({a, b});
    };

    std::vector<EdgeType> types(g.num_edges(), EdgeType::Plain);
    for (int v = 0; v < n; ++v) {
        for (int u : fwd[v]) {
            // common forward neighbors of v and u close a triangle v-u-w
            size_t i = 0, j = 0;
            const auto& fv = fwd[v];
            const auto& fu = fwd[u];
            while (i < fv.size() && j < fu.size()) {
                if (rank[fv[i]] < rank[fu[j]])
                    ++i;
                else if (rank[fv[i]] > rank[fu[j]])
                    ++j;
                else {
                    int w = fv[i];
                    types[pos(v, u)] = EdgeType::Triangle;
                    types[pos(v, w)] = EdgeType::Triangle;
                    types[pos(u, w)] = EdgeType::Triangle;
                    ++i;
                    ++j;
                }
            }
        }
    }
    return types;
}

}  // namespace subcount
