#include "subcount/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "subcount/error.hpp"
#include "subcount/rng.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace subcount {

DatasetSpec default_spec() { return DatasetSpec{}; }

DatasetSpec desk_spec() {
    DatasetSpec s;
    s.count_small = 200;
    s.node_min_small = 10;
    s.node_max_small = 30;
    s.deg_min_small = 1.0;
    s.deg_max_small = 6.0;
    s.count_large = 0;
    return s;
}

DatasetSpec load_spec(const std::string& path_or_name) {
    if (path_or_name == "default") return default_spec();
    if (path_or_name == "desk") return desk_spec();
    std::ifstream in(path_or_name);
    if (!in) throw ValidationError("spec: no built-in or file named '" + path_or_name + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ValidationError("spec " + path_or_name + ": " + e.what());
    }
    DatasetSpec s;
    s.count_small = j.value("count_small", s.count_small);
    s.count_large = j.value("count_large", s.count_large);
    if (j.contains("node_range_small")) {
        s.node_min_small = j["node_range_small"][0];
        s.node_max_small = j["node_range_small"][1];
    }
    if (j.contains("node_range_large")) {
        s.node_min_large = j["node_range_large"][0];
        s.node_max_large = j["node_range_large"][1];
    }
    if (j.contains("degree_range_small")) {
        s.deg_min_small = j["degree_range_small"][0];
        s.deg_max_small = j["degree_range_small"][1];
    }
    if (j.contains("degree_range_large")) {
        s.deg_min_large = j["degree_range_large"][0];
        s.deg_max_large = j["degree_range_large"][1];
    }
    if (s.count_small < 0 || s.count_large < 0 || s.node_min_small < 1 ||
        s.node_min_small > s.node_max_small || s.node_min_large < 1 ||
        s.node_min_large > s.node_max_large || s.deg_min_small > s.deg_max_small ||
        s.deg_min_large > s.deg_max_large || s.deg_min_small < 0 || s.deg_min_large < 0)
        throw ValidationError("spec " + path_or_name + ": inconsistent ranges");
    return s;
}

const char* generator_name(Generator g) {
    switch (g) {
        case Generator::ER: return "er";
        case Generator::WS: return "ws";
        case Generator::ExtBA: return "extba";
        case Generator::PLCluster: return "plcluster";
        case Generator::BA: return "ba";
        case Generator::Gnm: return "gnm";
    }
    return "?";
}

namespace {

constexpr uint64_t kStreamJob = 0x6a6f62;    // job sampling
constexpr uint64_t kStreamGraph = 0x677261;  // graph structure
constexpr uint64_t kStreamIndex = 0x696478;  // node_index permutation

int64_t max_edges(int n) { return static_cast<int64_t>(n) * (n - 1) / 2; }

// round half to even, the tie rule used for every quantized parameter;
// spelled out so it cannot drift with the floating-point environment
int64_t round_even(double x) {
    double f = std::floor(x);
    double frac = x - f;
    if (frac > 0.5) return static_cast<int64_t>(f) + 1;
    if (frac < 0.5) return static_cast<int64_t>(f);
    int64_t lo = static_cast<int64_t>(f);
    return lo % 2 == 0 ? lo : lo + 1;
}

const Generator kPool[] = {Generator::ER,        Generator::WS, Generator::ExtBA,
                           Generator::PLCluster, Generator::BA, Generator::Gnm};

}  // namespace

std::vector<GenJob> generate_jobs(const DatasetSpec& spec, uint64_t seed) {
    Rng rng(derive_seed(seed, kStreamJob, 0));
    std::vector<GenJob> jobs;
    jobs.reserve(static_cast<size_t>(spec.count_small + spec.count_large));

    auto sample_band = [&](int count, int n_min, int n_max, double d_min, double d_max) {
        for (int i = 0; i < count; ++i) {
            GenJob job;
            job.index = static_cast<int>(jobs.size());
            job.n = static_cast<int>(rng.next_int(n_min, n_max));
            double deg = d_min + rng.next_double() * (d_max - d_min);
            job.m = std::clamp<int64_t>(round_even(job.n * deg / 2.0), 0, max_edges(job.n));
            job.generator = kPool[rng.next_below(6)];
            job.graph_seed = derive_seed(seed, kStreamGraph, static_cast<uint64_t>(job.index));
            job.index_seed = derive_seed(seed, kStreamIndex, static_cast<uint64_t>(job.index));
            jobs.push_back(job);
        }
    };
    sample_band(spec.count_small, spec.node_min_small, spec.node_max_small, spec.deg_min_small,
                spec.deg_max_small);
    sample_band(spec.count_large, spec.node_min_large, spec.node_max_large, spec.deg_min_large,
                spec.deg_max_large);
    return jobs;
}

ErParams er_params(int n, int64_t m) {
    ErParams out;
    if (n >= 2) out.p = std::clamp(2.0 * static_cast<double>(m) / (static_cast<double>(n) * (n - 1)), 0.0, 1.0);
    return out;
}

WsParams ws_params(int n, int64_t m) {
    if (n < 3) throw ValidationError("ws_params: need at least 3 nodes");
    WsParams out;
    int64_t k = 2 * round_even(static_cast<double>(m) / n);
    k = std::max<int64_t>(k, 2);
    int64_t cap = (n - 1) % 2 == 0 ? n - 1 : n - 2;  // largest even ring degree
    out.k = static_cast<int>(std::min(k, cap));
    out.p = 0.1;
    return out;
}

ExtBaParams extba_params(int n, int64_t m) {
    ExtBaParams out;
    if (n < 1) throw ValidationError("extba_params: empty graph");
    out.attach = static_cast<int>(m / n);
    double p = (static_cast<double>(m) - static_cast<double>(out.attach) * n) / n;
    out.p = std::clamp(p, 0.0, 1.0 - out.q - 0.01);
    return out;
}

PlParams pl_params(int n, int64_t m) {
    PlParams out;
    double disc = static_cast<double>(n) * n - 4.0 * static_cast<double>(m);
    if (disc < 0) {  // no real k solves (n-k)k = m
        out.feasible = false;
        return out;
    }
    out.k = static_cast<int>(std::floor((n - std::sqrt(disc)) / 2.0));
    if (out.k < 2 || out.k >= n) {
        out.feasible = false;
        return out;
    }
    double base = static_cast<double>(n - out.k) * out.k;
    out.p = std::clamp((static_cast<double>(m) - base) /
                           (static_cast<double>(out.k - 1) * (n - out.k)),
                       0.0, 1.0);
    return out;
}

int ba_attach(int n, int64_t m) {
    if (n < 1) throw ValidationError("ba_attach: empty graph");
    return static_cast<int>(std::max<int64_t>(1, round_even(static_cast<double>(m) / n)));
}

namespace {

// Dense adjacency bookkeeping shared by the growth models. n stays <= a few
// thousand here, so the matrix is cheap and keeps every edge query O(1).
struct Builder {
    int n;
    std::vector<std::vector<char>> adj;
    std::vector<std::pair<int, int>> edges;
    std::vector<int> repeated;  // one entry per edge endpoint, for degree-biased picks

    explicit Builder(int n_) : n(n_), adj(n_, std::vector<char>(n_, 0)) {}

    bool has(int a, int b) const { return adj[a][b]; }
    void add(int a, int b) {
        adj[a][b] = adj[b][a] = 1;
        edges.emplace_back(std::min(a, b), std::max(a, b));
        repeated.push_back(a);
        repeated.push_back(b);
    }

    Graph finish() { return make_graph(n, edges); }
};

Graph gen_gnm(int n, int64_t m, Rng& rng) {
    m = std::clamp<int64_t>(m, 0, max_edges(n));
    // Floyd's sampling: uniform m-subset of pair slots without a full deck
    std::vector<char> chosen(static_cast<size_t>(max_edges(n)), 0);
    std::vector<int64_t> picks;
    for (int64_t i = max_edges(n) - m; i < max_edges(n); ++i) {
        int64_t j = static_cast<int64_t>(rng.next_below(static_cast<uint64_t>(i + 1)));
        if (chosen[static_cast<size_t>(j)]) j = i;
        chosen[static_cast<size_t>(j)] = 1;
        picks.push_back(j);
    }
    std::sort(picks.begin(), picks.end());
    std::vector<std::pair<int, int>> edges;
    // pair slot t -> (a, b): slots for a are contiguous, a rows of length n-1-a
    for (int64_t t : picks) {
        int a = 0;
        int64_t skip = 0;
        while (skip + (n - 1 - a) <= t) skip += n - 1 - a++;
        edges.emplace_back(a, static_cast<int>(a + 1 + (t - skip)));
    }
    return make_graph(n, edges);
}

Graph gen_er(int n, double p, Rng& rng) {
    std::vector<std::pair<int, int>> edges;
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
            if (rng.next_bool(p)) edges.emplace_back(a, b);
    return make_graph(n, edges);
}

Graph gen_ws(int n, int k, double p, Rng& rng) {
    Builder b(n);
    for (int u = 0; u < n; ++u)
        for (int off = 1; off <= k / 2; ++off) {
            int v = (u + off) % n;
            if (!b.has(u, v)) b.add(u, v);
        }
    // rewire each lattice edge (kept in construction order) with prob p
    auto lattice = b.edges;
    for (auto [u, v] : lattice) {
        if (!rng.next_bool(p)) continue;
        int deg_u = 0;
        for (int w = 0; w < n; ++w) deg_u += b.adj[u][w];
        if (deg_u >= n - 1) continue;  // saturated, nowhere to rewire
        int w;
        do {
            w = static_cast<int>(rng.next_below(static_cast<uint64_t>(n)));
        } while (w == u || b.adj[u][w]);
        b.adj[u][v] = b.adj[v][u] = 0;
        b.adj[u][w] = b.adj[w][u] = 1;
    }
    std::vector<std::pair<int, int>> edges;
    for (int a = 0; a < n; ++a)
        for (int c = a + 1; c < n; ++c)
            if (b.adj[a][c]) edges.emplace_back(a, c);
    return make_graph(n, edges);
}

// Degree-biased pick among nodes < limit, skipping self and anything in
// `avoid`. Falls back to a uniform pick over the acceptable nodes when the
// biased draw keeps missing (or when there are no edges yet); returns -1 if
// nothing is acceptable. Bounded, so no job can hang the generator.
int pick_biased(Builder& b, Rng& rng, int limit, const std::vector<char>& avoid, int self) {
    for (int tries = 0; tries < 64 && !b.repeated.empty(); ++tries) {
        int t = b.repeated[rng.next_below(b.repeated.size())];
        if (t < limit && t != self && !avoid[t]) return t;
    }
    std::vector<int> acceptable;
    for (int t = 0; t < limit; ++t)
        if (t != self && !avoid[t]) acceptable.push_back(t);
    if (acceptable.empty()) return -1;
    return acceptable[rng.next_below(acceptable.size())];
}

// Attach one new node with up to `attach` distinct degree-biased edges.
void attach_preferential(Builder& b, Rng& rng, int v, int attach) {
    attach = std::min(attach, v);  // at most every existing node
    std::vector<char> linked(b.n, 0);
    for (int e = 0; e < attach; ++e) {
        int t = pick_biased(b, rng, v, linked, v);
        if (t < 0) break;
        linked[t] = 1;
        b.add(v, t);
    }
}

Graph gen_ba(int n, int attach, Rng& rng) {
    attach = std::clamp(attach, 1, std::max(1, n - 1));
    int seed_nodes = std::min(attach + 1, n);
    Builder b(n);
    for (int a = 0; a < seed_nodes; ++a)
        for (int c = a + 1; c < seed_nodes; ++c) b.add(a, c);
    for (int v = seed_nodes; v < n; ++v) attach_preferential(b, rng, v, attach);
    return b.finish();
}

Graph gen_extba(int n, int attach, double p, double q, Rng& rng) {
    int seed_nodes = std::min(attach + 1, n);
    Builder b(n);
    for (int a = 0; a < seed_nodes; ++a)
        for (int c = a + 1; c < seed_nodes; ++c) b.add(a, c);
    for (int v = seed_nodes; v < n; ++v) {
        attach_preferential(b, rng, v, attach);
        if (rng.next_bool(p)) {
            // extra edge between a uniform node and a degree-biased partner
            int a = static_cast<int>(rng.next_below(static_cast<uint64_t>(v + 1)));
            int c = pick_biased(b, rng, v + 1, b.adj[a], a);
            if (c >= 0) b.add(a, c);
        }
        if (rng.next_bool(q) && !b.edges.empty()) {
            // rewire: move one endpoint of a uniform edge to a degree-biased node
            size_t ei = rng.next_below(b.edges.size());
            auto [a, c] = b.edges[ei];
            int w = pick_biased(b, rng, v + 1, b.adj[a], a);
            if (w >= 0) {
                b.adj[a][c] = b.adj[c][a] = 0;
                b.adj[a][w] = b.adj[w][a] = 1;
                b.edges[ei] = {std::min(a, w), std::max(a, w)};
                // repeated[] drifts from true degrees after a rewire;
                // rebuild it so the bias stays honest
                b.repeated.clear();
                for (auto [x, y] : b.edges) {
                    b.repeated.push_back(x);
                    b.repeated.push_back(y);
                }
            }
        }
    }
    return b.finish();
}

Graph gen_pl(int n, int k, double p, Rng& rng) {
    // k seed nodes without edges; each newcomer adds k degree-biased edges,
    // and after each of the k-1 later ones may also close a triangle
    Builder b(n);
    for (int v = k; v < n; ++v) {
        std::vector<char> linked(b.n, 0);
        for (int e = 0; e < std::min(k, v); ++e) {
            int t = pick_biased(b, rng, v, linked, v);
            if (t < 0) break;
            linked[t] = 1;
            b.add(v, t);
            if (e > 0 && rng.next_bool(p)) {
                // triangle closure: link to a neighbor of the fresh target
                std::vector<int> candidates;
                for (int w = 0; w < v; ++w)
                    if (b.adj[t][w] && !linked[w]) candidates.push_back(w);
                if (!candidates.empty()) {
                    int w = candidates[rng.next_below(candidates.size())];
                    linked[w] = 1;
                    b.add(v, w);
                }
            }
        }
    }
    return b.finish();
}

}  // namespace

GeneratedGraph generate_graph(const GenJob& job) {
    Rng rng(job.graph_seed);
    GeneratedGraph out;
    out.job = job;
    switch (job.generator) {
        case Generator::ER:
            out.graph = gen_er(job.n, er_params(job.n, job.m).p, rng);
            break;
        case Generator::WS:
            if (job.n < 3) {
                out.graph = gen_gnm(job.n, job.m, rng);
            } else {
                auto w = ws_params(job.n, job.m);
                out.graph = gen_ws(job.n, w.k, w.p, rng);
            }
            break;
        case Generator::ExtBA: {
            auto e = extba_params(job.n, job.m);
            out.graph = gen_extba(job.n, e.attach, e.p, e.q, rng);
            break;
        }
        case Generator::PLCluster: {
            auto pl = pl_params(job.n, job.m);
            if (pl.feasible) {
                out.graph = gen_pl(job.n, pl.k, pl.p, rng);
            } else {
                out.graph = gen_gnm(job.n, job.m, rng);
                out.pl_fallback = true;
            }
            break;
        }
        case Generator::BA:
            out.graph = gen_ba(job.n, ba_attach(job.n, job.m), rng);
            break;
        case Generator::Gnm:
            out.graph = gen_gnm(job.n, job.m, rng);
            break;
    }
    assign_indices(out.graph, job.index_seed);
    return out;
}

std::vector<GeneratedGraph> generate_all(const DatasetSpec& spec, uint64_t seed) {
    std::vector<GeneratedGraph> out;
    for (const GenJob& job : generate_jobs(spec, seed)) out.push_back(generate_graph(job));
    return out;
}

namespace {

json spec_to_json(const DatasetSpec& s) {
    json j;
    j["count_small"] = s.count_small;
    j["node_range_small"] = {s.node_min_small, s.node_max_small};
    j["degree_range_small"] = {s.deg_min_small, s.deg_max_small};
    j["count_large"] = s.count_large;
    j["node_range_large"] = {s.node_min_large, s.node_max_large};
    j["degree_range_large"] = {s.deg_min_large, s.deg_max_large};
    return j;
}

json params_to_json(const GenJob& job) {
    json p;
    switch (job.generator) {
        case Generator::ER:
            p["p"] = er_params(job.n, job.m).p;
            break;
        case Generator::WS:
            if (job.n >= 3) {
                auto w = ws_params(job.n, job.m);
                p["k"] = w.k;
                p["p"] = w.p;
            }
            break;
        case Generator::ExtBA: {
            auto e = extba_params(job.n, job.m);
            p["attach"] = e.attach;
            p["p"] = e.p;
            p["q"] = e.q;
            break;
        }
        case Generator::PLCluster: {
            auto pl = pl_params(job.n, job.m);
            if (pl.feasible) {
                p["k"] = pl.k;
                p["p"] = pl.p;
            }
            break;
        }
        case Generator::BA:
            p["attach"] = ba_attach(job.n, job.m);
            break;
        case Generator::Gnm:
            break;
    }
    return p;
}

}  // namespace

void write_dataset(const std::vector<GeneratedGraph>& graphs, const DatasetSpec& spec,
                   uint64_t seed, const std::string& dir) {
    fs::create_directories(fs::path(dir) / "graphs");
    json manifest;
    manifest["format_version"] = 1;
    manifest["seed"] = seed;
    manifest["spec"] = spec_to_json(spec);
    manifest["graphs"] = json::array();
    for (const auto& g : graphs) {
        std::string file = "graphs/" + std::to_string(g.job.index) + ".txt";
        save_graph(g.graph, (fs::path(dir) / file).string());
        json entry;
        entry["id"] = g.job.index;
        entry["file"] = file;
        entry["generator"] = generator_name(g.job.generator);
        entry["n"] = g.job.n;
        entry["m_target"] = g.job.m;
        entry["m_actual"] = g.graph.num_edges();
        entry["graph_seed"] = g.job.graph_seed;
        entry["index_seed"] = g.job.index_seed;
        entry["params"] = params_to_json(g.job);
        entry["fallback_gnm"] = g.pl_fallback;
        manifest["graphs"].push_back(entry);
    }
    std::ofstream out(fs::path(dir) / "manifest.json");
    if (!out) throw std::runtime_error("cannot write manifest in " + dir);
    out << manifest.dump(2) << '\n';
}

LoadedDataset load_dataset(const std::string& dir) {
    std::ifstream in(fs::path(dir) / "manifest.json");
    if (!in) throw ValidationError("no manifest.json in " + dir);
    json manifest;
    try {
        in >> manifest;
    } catch (const json::exception& e) {
        throw ValidationError(dir + "/manifest.json: " + e.what());
    }
    LoadedDataset out;
    out.seed = manifest.value("seed", 0ull);
    for (const auto& entry : manifest.at("graphs")) {
        Graph g = load_graph((fs::path(dir) / entry.at("file").get<std::string>()).string());
        assign_indices(g, entry.at("index_seed").get<uint64_t>());
        out.ids.push_back(entry.at("id").get<int>());
        out.graphs.push_back(std::move(g));
    }
    return out;
}

}  // namespace subcount
