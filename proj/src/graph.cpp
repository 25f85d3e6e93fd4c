#include "subcount/graph.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <sstream>

#include "subcount/error.hpp"
#include "subcount/rng.hpp"

namespace subcount {

Graph make_graph(int num_nodes, std::vector<std::pair<int, int>> edges) {
    if (num_nodes < 0) throw ValidationError("graph: negative node count");
    for (auto& e : edges) {
        if (e.first == e.second)
            throw ValidationError("graph: self-loop at node " + std::to_string(e.first));
        if (e.first < 0 || e.second < 0 || e.first >= num_nodes || e.second >= num_nodes)
            throw ValidationError("graph: edge (" + std::to_string(e.first) + "," +
                                  std::to_string(e.second) + ") out of range for " +
                                  std::to_string(num_nodes) + " nodes");
        if (e.first > e.second) std::swap(e.first, e.second);
    }
    std::sort(edges.begin(), edges.end());
    auto dup = std::adjacent_find(edges.begin(), edges.end());
    if (dup != edges.end())
        throw ValidationError("graph: duplicate edge (" + std::to_string(dup->first) + "," +
                              std::to_string(dup->second) + ")");
    Graph g;
    g.num_nodes = num_nodes;
    g.edges = std::move(edges);
    g.node_index.resize(num_nodes);
    for (int i = 0; i < num_nodes; ++i) g.node_index[i] = i;
    return g;
}

std::vector<std::vector<int>> adjacency_list(const Graph& g) {
    std::vector<std::vector<int>> adj(g.num_nodes);
    for (auto [a, b] : g.edges) {
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    for (auto& nbrs : adj) std::sort(nbrs.begin(), nbrs.end());
    return adj;
}

bool has_edge(const Graph& g, int a, int b) {
    if (a > b) std::swap(a, b);
    return std::binary_search(g.edges.begin(), g.edges.end(), std::make_pair(a, b));
}

Graph parse_edge_list(const std::string& text, const std::string& origin) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    auto fail = [&](const std::string& msg) {
        throw ValidationError(origin + ":" + std::to_string(lineno) + ": " + msg);
    };

    int n = -1, m = -1;
    std::vector<std::pair<int, int>> edges;
    while (std::getline(in, line)) {
        ++lineno;
        size_t pos = line.find_first_not_of(" \t\r");
        if (pos == std::string::npos || line[pos] == '#') continue;
        std::istringstream ls(line);
        if (n < 0) {
            if (!(ls >> n >> m) || n < 0 || m < 0) fail("expected header 'num_nodes num_edges'");
            std::string rest;
            if (ls >> rest) fail("trailing tokens after header");
            edges.reserve(static_cast<size_t>(m));
        } else {
            int a, b;
            if (!(ls >> a >> b)) fail("expected edge 'u v'");
            std::string rest;
            if (ls >> rest) fail("trailing tokens after edge");
            if (a < 0 || b < 0 || a >= n || b >= n) fail("edge endpoint out of range");
            if (a == b) fail("self-loop");
            edges.emplace_back(a, b);
        }
    }
    if (n < 0) throw ValidationError(origin + ": empty edge list file");
    if (static_cast<int>(edges.size()) != m)
        throw ValidationError(origin + ": header promises " + std::to_string(m) + " edges, found " +
                              std::to_string(edges.size()));
    try {
        return make_graph(n, std::move(edges));
    } catch (const ValidationError& e) {
        throw ValidationError(origin + ": " + e.what());
    }
}

Graph load_graph(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open graph file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_edge_list(buf.str(), path);
}

std::string format_edge_list(const Graph& g) {
    std::ostringstream out;
    out << g.num_nodes << ' ' << g.num_edges() << '\n';
    for (auto [a, b] : g.edges) out << a << ' ' << b << '\n';
    return out.str();
}

void save_graph(const Graph& g, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write graph file: " + path);
    out << format_edge_list(g);
}

void assign_indices(Graph& g, uint64_t seed) {
    Rng rng(derive_seed(seed, /*stream=*/0x1d7, static_cast<uint64_t>(g.num_nodes)));
    std::vector<int> perm(g.num_nodes);
    for (int i = 0; i < g.num_nodes; ++i) perm[i] = i;
    rng.shuffle(perm);
    g.node_index = std::move(perm);
}

bool is_connected(const Graph& g) {
    if (g.num_nodes == 0) return false;
    auto adj = adjacency_list(g);
    std::vector<char> seen(g.num_nodes, 0);
    std::deque<int> queue{0};
    seen[0] = 1;
    int reached = 1;
    while (!queue.empty()) {
        int v = queue.front();
        queue.pop_front();
        for (int u : adj[v])
            if (!seen[u]) {
                seen[u] = 1;
                ++reached;
                queue.push_back(u);
            }
    }
    return reached == g.num_nodes;
}

int diameter(const Graph& g) {
    if (g.num_nodes == 0) throw ValidationError("diameter: empty graph");
    auto adj = adjacency_list(g);
    int best = 0;
    std::vector<int> dist(g.num_nodes);
    for (int s = 0; s < g.num_nodes; ++s) {
        std::fill(dist.begin(), dist.end(), -1);
        std::deque<int> queue{s};
        dist[s] = 0;
        int reached = 1;
        while (!queue.empty()) {
            int v = queue.front();
            queue.pop_front();
            for (int u : adj[v])
                if (dist[u] < 0) {
                    dist[u] = dist[v] + 1;
                    best = std::max(best, dist[u]);
                    ++reached;
                    queue.push_back(u);
                }
        }
        if (reached != g.num_nodes) throw ValidationError("diameter: graph is disconnected");
    }
    return best;
}

Graph induced_subgraph(const Graph& g, const std::vector<int>& nodes) {
    int k = static_cast<int>(nodes.size());
    std::vector<int> local(g.num_nodes, -1);
    for (int i = 0; i < k; ++i) {
        int v = nodes[i];
        if (v < 0 || v >= g.num_nodes) throw ValidationError("induced_subgraph: node out of range");
        if (local[v] >= 0) throw ValidationError("induced_subgraph: duplicate node");
        local[v] = i;
    }
    std::vector<std::pair<int, int>> edges;
    for (auto [a, b] : g.edges)
        if (local[a] >= 0 && local[b] >= 0) edges.emplace_back(local[a], local[b]);
    Graph sub = make_graph(k, std::move(edges));

    // node_index: rank of the original indices among the selected nodes.
    std::vector<int> order(k);
    for (int i = 0; i < k; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](int x, int y) { return g.node_index[nodes[x]] < g.node_index[nodes[y]]; });
    for (int rank = 0; rank < k; ++rank) sub.node_index[order[rank]] = rank;
    return sub;
}

Graph relabel(const Graph& g, const std::vector<int>& perm) {
    if (static_cast<int>(perm.size()) != g.num_nodes)
        throw ValidationError("relabel: permutation size mismatch");
    std::vector<std::pair<int, int>> edges;
    edges.reserve(g.edges.size());
    for (auto [a, b] : g.edges) edges.emplace_back(perm[a], perm[b]);
    Graph out = make_graph(g.num_nodes, std::move(edges));
    for (int v = 0; v < g.num_nodes; ++v) out.node_index[perm[v]] = g.node_index[v];
    return out;
}

}  // namespace subcount
