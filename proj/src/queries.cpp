#include "subcount/queries.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "subcount/error.hpp"
#include "subcount/iso.hpp"

namespace fs = std::filesystem;

namespace subcount {

int QuerySet::max_diameter() const {
    int best = 0;
    for (const auto& q : queries) best = std::max(best, q.diameter);
    return best;
}

int QuerySet::max_nodes() const {
    int best = 0;
    for (const auto& q : queries) best = std::max(best, q.graph.num_nodes);
    return best;
}

namespace {

// Cheap relabel-invariant key to bucket candidates before the real
// isomorphism test: (degree sequence, sorted neighbor-degree profiles).
std::string invariant_key(const Graph& g) {
    auto adj = adjacency_list(g);
    std::vector<std::vector<int>> profiles(g.num_nodes);
    for (int v = 0; v < g.num_nodes; ++v) {
        for (int u : adj[v]) profiles[v].push_back(static_cast<int>(adj[u].size()));
        std::sort(profiles[v].begin(), profiles[v].end());
        profiles[v].insert(profiles[v].begin(), static_cast<int>(adj[v].size()));
    }
    std::sort(profiles.begin(), profiles.end());
    std::ostringstream key;
    for (const auto& p : profiles) {
        for (int x : p) key << x << ',';
        key << ';';
    }
    return key.str();
}

std::vector<Graph> connected_graphs_of_size(int k) {
    std::vector<std::pair<int, int>> pairs;
    for (int a = 0; a < k; ++a)
        for (int b = a + 1; b < k; ++b) pairs.emplace_back(a, b);
    int np = static_cast<int>(pairs.size());

    std::vector<Graph> reps;
    std::map<std::string, std::vector<int>> buckets;  // invariant key -> rep positions
    for (uint32_t bits = 0; bits < (1u << np); ++bits) {
        std::vector<std::pair<int, int>> edges;
        for (int i = 0; i < np; ++i)
            if (bits & (1u << i)) edges.push_back(pairs[i]);
        if (k >= 2 && static_cast<int>(edges.size()) < k - 1) continue;  // can't be connected
        Graph g = make_graph(k, std::move(edges));
        if (!is_connected(g)) continue;
        auto& bucket = buckets[invariant_key(g)];
        bool fresh = std::none_of(bucket.begin(), bucket.end(),
                                  [&](int r) { return is_isomorphic(g, reps[r]); });
        if (fresh) {
            bucket.push_back(static_cast<int>(reps.size()));
            reps.push_back(std::move(g));
        }
    }
    return reps;
}

}  // namespace

QuerySet enumerate_queries(int min_nodes, int max_nodes) {
    if (min_nodes < 1 || min_nodes > max_nodes || max_nodes > 7)
        throw ValidationError("enumerate_queries: need 1 <= min <= max <= 7");
    QuerySet qs;
    for (int k = min_nodes; k <= max_nodes; ++k) {
        auto reps = connected_graphs_of_size(k);
        for (size_t i = 0; i < reps.size(); ++i) {
            Query q;
            q.name = "q" + std::to_string(k) + "_" + std::to_string(i);
            q.diameter = k == 1 ? 0 : diameter(reps[i]);
            q.graph = std::move(reps[i]);
            qs.queries.push_back(std::move(q));
        }
    }
    return qs;
}

std::vector<Graph> connected_regular_graphs(int n, int degree) {
    if (n < 1 || n > 10) throw ValidationError("connected_regular_graphs: n must be in [1,10]");
    if (degree < 0 || degree >= n) return {};
    if ((n * degree) % 2 != 0) return {};  // handshake parity

    // Assign each vertex's forward neighbors in order; residual[] tracks
    // missing degree. Every labeled regular graph appears exactly once.
    std::vector<Graph> reps;
    std::map<std::string, std::vector<int>> buckets;
    std::vector<int> residual(n, degree);
    std::vector<std::pair<int, int>> edges;

    auto emit = [&]() {
        Graph g = make_graph(n, edges);
        if (!is_connected(g)) return;
        auto& bucket = buckets[invariant_key(g)];
        bool fresh = std::none_of(bucket.begin(), bucket.end(),
                                  [&](int r) { return is_isomorphic(g, reps[r]); });
        if (fresh) {
            bucket.push_back(static_cast<int>(reps.size()));
            reps.push_back(std::move(g));
        }
    };

    // choose `need` neighbors for v among candidates u > v with residual > 0
    auto fill = [&](auto&& self, int v, int need, int from) -> void {
        if (need == 0) {
            int next = v + 1;
            while (next < n && residual[next] == 0) ++next;
            if (next == n) {
                emit();
                return;
            }
            self(self, next, residual[next], next + 1);
            return;
        }
        // not enough candidates left to satisfy v
        int avail = 0;
        for (int u = from; u < n; ++u)
            if (residual[u] > 0) ++avail;
        if (avail < need) return;
        for (int u = from; u < n; ++u) {
            if (residual[u] == 0) continue;
            --residual[u];
            edges.emplace_back(v, u);
            self(self, v, need - 1, u + 1);
            edges.pop_back();
            ++residual[u];
        }
    };

    if (degree == 0) {
        if (n == 1) reps.push_back(make_graph(1, {}));
        return reps;
    }
    fill(fill, 0, degree, 1);
    return reps;
}

void save_query_set(const QuerySet& qs, const std::string& dir) {
    fs::create_directories(dir);
    std::ofstream index(fs::path(dir) / "queries.txt");
    if (!index) throw std::runtime_error("cannot write query index in " + dir);
    for (const auto& q : qs.queries) {
        std::string file = q.name + ".txt";
        save_graph(q.graph, (fs::path(dir) / file).string());
        index << q.name << ' ' << q.graph.num_nodes << ' ' << q.diameter << ' ' << file << '\n';
    }
}

QuerySet load_query_set(const std::string& dir) {
    std::ifstream index(fs::path(dir) / "queries.txt");
    if (!index) throw ValidationError("cannot open query index in " + dir);
    QuerySet qs;
    std::string line;
    int lineno = 0;
    while (std::getline(index, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        Query q;
        int n, diam;
        std::string file;
        if (!(ls >> q.name >> n >> diam >> file))
            throw ValidationError(dir + "/queries.txt:" + std::to_string(lineno) +
                                  ": expected 'name num_nodes diameter file'");
        q.graph = load_graph((fs::path(dir) / file).string());
        if (q.graph.num_nodes != n)
            throw ValidationError(dir + "/queries.txt:" + std::to_string(lineno) +
                                  ": node count disagrees with " + file);
        q.diameter = diam;
        qs.queries.push_back(std::move(q));
    }
    return qs;
}

}  // namespace subcount
