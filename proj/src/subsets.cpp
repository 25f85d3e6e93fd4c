#include "subcount/subsets.hpp"

#include <algorithm>

#include "subcount/error.hpp"

namespace subcount {
namespace {

struct Enumerator {
    const std::vector<std::vector<int>>& adj;
    int k;
    const std::function<void(const std::vector<int>&)>& fn;
    std::vector<int> subset;
    std::vector<char> in_subset;
    std::vector<char> blocked;  // already adjacent to the subset, or below the root

    // extension: candidate nodes adjacent to the subset, each recorded once
    void extend(std::vector<int>& extension) {
        if (static_cast<int>(subset.size()) == k) {
            auto sorted = subset;
            std::sort(sorted.begin(), sorted.end());
            fn(sorted);
            return;
        }
        // Take candidates from the back; a candidate removed at this level
        // stays unavailable for the rest of the level, which is what makes
        // every subset come out exactly once.
        std::vector<int> local = std::move(extension);
        while (!local.empty()) {
            int w = local.back();
            local.pop_back();

            std::vector<int> next = local;
            std::vector<int> newly_blocked;
            for (int u : adj[w]) {
                if (blocked[u] || in_subset[u]) continue;
                blocked[u] = 1;
                newly_blocked.push_back(u);
                next.push_back(u);
            }
            subset.push_back(w);
            in_subset[w] = 1;
            extend(next);
            in_subset[w] = 0;
            subset.pop_back();
            for (int u : newly_blocked) blocked[u] = 0;
        }
    }

    void run_from_root(int root) {
        subset.assign(1, root);
        in_subset.assign(adj.size(), 0);
        in_subset[root] = 1;
        std::vector<int> extension;
        for (int u : adj[root]) {
            if (blocked[u]) continue;
            blocked[u] = 1;
            extension.push_back(u);
        }
        extend(extension);
        for (int u : adj[root]) blocked[u] = 0;
        in_subset[root] = 0;
    }
};

}  // namespace

void for_each_connected_subset(const Graph& g, int k,
                               const std::function<void(const std::vector<int>&)>& fn) {
    if (k < 1) throw ValidationError("connected subsets: k must be positive");
    if (k > g.num_nodes) return;
    auto adj = adjacency_list(g);
    Enumerator e{adj, k, fn, {}, {}, std::vector<char>(g.num_nodes, 0)};
    for (int root = 0; root < g.num_nodes; ++root) {
        // nodes below the root are permanently off limits for this root
        e.blocked.assign(g.num_nodes, 0);
        for (int v = 0; v < root; ++v) e.blocked[v] = 1;
        e.run_from_root(root);
    }
}

void for_each_connected_subset_containing(const Graph& g, int anchor, int k,
                                          const std::function<void(const std::vector<int>&)>& fn) {
    if (anchor < 0 || anchor >= g.num_nodes)
        throw ValidationError("connected subsets: anchor out of range");
    if (k < 1) throw ValidationError("connected subsets: k must be positive");
    if (k > g.num_nodes) return;
    auto adj = adjacency_list(g);
    Enumerator e{adj, k, fn, {}, {}, std::vector<char>(g.num_nodes, 0)};
    e.run_from_root(anchor);
}

}  // namespace subcount
