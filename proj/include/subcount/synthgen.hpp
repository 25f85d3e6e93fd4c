#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "subcount/graph.hpp"

namespace subcount {

// Synthetic training corpora: a band of small dense-ish graphs plus a band
// of large sparse ones, spread across six random-graph families. Each job
// fixes (generator, n, target edge count m); the family parameters are then
// solved from (n, m) so every family aims at the same expected density.
struct DatasetSpec {
    int count_small = 1380;
    int node_min_small = 10, node_max_small = 59;
    double deg_min_small = 1.0, deg_max_small = 12.0;
    int count_large = 447;
    int node_min_large = 60, node_max_large = 800;
    double deg_min_large = 1.0, deg_max_large = 3.0;
};

DatasetSpec default_spec();   // the full corpus above
DatasetSpec desk_spec();      // 200 graphs, n in [10,30], degree in [1,6]
DatasetSpec load_spec(const std::string& path_or_name);  // name or JSON file

enum class Generator { ER, WS, ExtBA, PLCluster, BA, Gnm };

const char* generator_name(Generator g);

struct GenJob {
    int index = 0;
    Generator generator = Generator::ER;
    int n = 0;
    int64_t m = 0;           // target edge count
    uint64_t graph_seed = 0;
    uint64_t index_seed = 0;
};

// Deterministic under seed: n uniform integer in band, average degree
// uniform real, m = round(n*deg/2) clamped to [0, n(n-1)/2], generator
// uniform over the six families. Per-job seeds come from
// derive_seed(dataset_seed, stream, job_index).
std::vector<GenJob> generate_jobs(const DatasetSpec& spec, uint64_t seed);

// Family parameters from (n, m). Pure, so they can be checked directly.
struct ErParams {
    double p = 0.0;  // 2m / (n(n-1))
};
struct WsParams {
    int k = 2;       // even ring degree nearest to 2m/n, ties toward even k/2
    double p = 0.1;  // rewire probability
};
struct ExtBaParams {
    int attach = 0;   // floor(m/n)
    double p = 0.0;   // extra-edge rate, clamped to [0, 1-q-0.01]
    double q = 0.1;   // rewire rate
};
struct PlParams {
    int k = 0;        // edges per new node
    double p = 0.0;   // triangle-closure rate, clamped to [0,1]
    bool feasible = true;  // false: fall back to Gnm (k < 2 or no real root)
};
ErParams er_params(int n, int64_t m);
WsParams ws_params(int n, int64_t m);
ExtBaParams extba_params(int n, int64_t m);
PlParams pl_params(int n, int64_t m);
int ba_attach(int n, int64_t m);  // max(1, round(m/n))

struct GeneratedGraph {
    GenJob job;
    Graph graph;              // node_index already assigned from job.index_seed
    bool pl_fallback = false; // PL job that had to use Gnm instead
};

// Runs one job. Structure only depends on job.graph_seed; indices on
// job.index_seed. Never throws for jobs produced by generate_jobs.
GeneratedGraph generate_graph(const GenJob& job);

std::vector<GeneratedGraph> generate_all(const DatasetSpec& spec, uint64_t seed);

// On-disk dataset: manifest.json plus graphs/<id>.txt. The manifest records
// the spec, every job's parameters and seeds, and fallbacks, so a dataset
// can be reproduced or its indices re-derived without extra files.
void write_dataset(const std::vector<GeneratedGraph>& graphs, const DatasetSpec& spec,
                   uint64_t seed, const std::string& dir);

struct LoadedDataset {
    uint64_t seed = 0;
    std::vector<int> ids;
    std::vector<Graph> graphs;  // node_index restored from recorded index seeds
};
LoadedDataset load_dataset(const std::string& dir);

}  // namespace subcount
