#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "helpers.hpp"
#include "subcount/error.hpp"
#include "subcount/synthgen.hpp"

using namespace subcount;
namespace fs = std::filesystem;

TEST_CASE("er parameters") {
    CHECK(er_params(10, 9).p == doctest::Approx(0.2));
    CHECK(er_params(10, 0).p == 0.0);
    CHECK(er_params(4, 6).p == doctest::Approx(1.0));
    CHECK(er_params(1, 0).p == 0.0);
}

TEST_CASE("ws parameters") {
    CHECK(ws_params(10, 20).k == 4);
    CHECK(ws_params(10, 5).k == 2);   // rounds to 0, floor kicks in
    CHECK(ws_params(6, 9).k == 4);    // 2m/n = 3: tie resolved toward even ring degree
    CHECK(ws_params(10, 20).p == doctest::Approx(0.1));
    CHECK(ws_params(4, 6).k == 2);    // capped at the largest even degree < n
    CHECK_THROWS_AS(ws_params(2, 1), ValidationError);
}

TEST_CASE("extended-ba parameters") {
    auto a = extba_params(10, 25);
    CHECK(a.attach == 2);
    CHECK(a.p == doctest::Approx(0.5));
    CHECK(a.q == doctest::Approx(0.1));

    CHECK(extba_params(10, 20).p == doctest::Approx(0.0));

    // raw p = 0.9 collides with q; clamped just below
    auto c = extba_params(10, 29);
    CHECK(c.p == doctest::Approx(0.89));
    CHECK(c.p < 0.9);

    CHECK(extba_params(10, 7).attach == 0);  // sparser than one edge per node
}

TEST_CASE("pl parameters") {
    auto a = pl_params(10, 16);
    CHECK(a.feasible);
    CHECK(a.k == 2);
    CHECK(a.p == doctest::Approx(0.0));

    auto b = pl_params(10, 21);
    CHECK(b.k == 3);
    CHECK(b.p == doctest::Approx(0.0));

    auto c = pl_params(10, 23);
    CHECK(c.k == 3);  // largest k with (n-k)k <= m: (10-3)*3 = 21
    CHECK(c.p == doctest::Approx(2.0 / 14.0));

    auto d = pl_params(10, 24);  // (10-4)*4 = 24 exactly, no closure needed
    CHECK(d.k == 4);
    CHECK(d.p == doctest::Approx(0.0));

    CHECK_FALSE(pl_params(10, 9).feasible);   // k would be 0
    CHECK_FALSE(pl_params(10, 30).feasible);  // denser than (n-k)k can reach
}

TEST_CASE("ba attach") {
    CHECK(ba_attach(10, 20) == 2);
    CHECK(ba_attach(10, 3) == 1);   // floor at 1
    CHECK(ba_attach(10, 45) == 4);  // 4.5 ties to even
}

TEST_CASE("job generation") {
    DatasetSpec spec = default_spec();
    auto jobs = generate_jobs(spec, 99);
    CHECK(jobs.size() == 1827);

    int small = 0, large = 0;
    std::set<Generator> gens;
    for (const auto& j : jobs) {
        bool in_small = j.n >= 10 && j.n <= 59;
        bool in_large = j.n >= 60 && j.n <= 800;
        CHECK((in_small || in_large));
        (j.index < spec.count_small ? small : large)++;
        if (j.index < spec.count_small) CHECK(in_small);
        else CHECK(in_large);
        CHECK(j.m >= 0);
        CHECK(j.m <= static_cast<int64_t>(j.n) * (j.n - 1) / 2);
        gens.insert(j.generator);
    }
    CHECK(small == 1380);
    CHECK(large == 447);
    CHECK(gens.size() == 6);  // all six families show up across 1827 draws

    // determinism and seed sensitivity
    auto again = generate_jobs(spec, 99);
    for (size_t i = 0; i < jobs.size(); ++i) {
        CHECK(jobs[i].n == again[i].n);
        CHECK(jobs[i].m == again[i].m);
        CHECK(jobs[i].graph_seed == again[i].graph_seed);
    }
    auto other = generate_jobs(spec, 100);
    bool differs = false;
    for (size_t i = 0; i < jobs.size(); ++i)
        if (jobs[i].n != other[i].n || jobs[i].m != other[i].m) differs = true;
    CHECK(differs);
}

TEST_CASE("gnm hits the target edge count exactly") {
    for (uint64_t s = 0; s < 30; ++s) {
        GenJob job{0, Generator::Gnm, 25, 60, s, s};
        auto g = generate_graph(job);
        CHECK(g.graph.num_edges() == 60);
        CHECK(g.graph.num_nodes == 25);
    }
}

TEST_CASE("ba produces the construction edge count and stays connected") {
    for (uint64_t s = 0; s < 30; ++s) {
        GenJob job{0, Generator::BA, 10, 20, s, s};
        auto g = generate_graph(job);
        CHECK(g.graph.num_edges() == 17);  // 2(n-2)+1 with a 3-clique seed
        CHECK(is_connected(g.graph));
    }
}

TEST_CASE("ws edge count equals n*k/2") {
    for (uint64_t s = 0; s < 20; ++s) {
        GenJob job{0, Generator::WS, 12, 24, s, s};  // k = 4
        auto g = generate_graph(job);
        CHECK(g.graph.num_edges() == 24);
    }
}

TEST_CASE("pl fallback is flagged") {
    GenJob job{0, Generator::PLCluster, 10, 40, 7, 7};  // denser than n^2/4
    auto g = generate_graph(job);
    CHECK(g.pl_fallback);
    CHECK(g.graph.num_edges() == 40);  // fell back to exact-m sampling
}

TEST_CASE("mean edge count tracks the target on a quantization-friendly grid") {
    // BA-style families quantize their per-node attachment, so the grid
    // sticks to integer m/n where every family can express the target.
    const int kSeeds = 200;
    for (int n : {20, 50}) {
        for (int deg : {2, 4, 6}) {
            int64_t m = static_cast<int64_t>(n) * deg / 2;
            for (Generator gen : {Generator::ER, Generator::WS, Generator::ExtBA,
                                  Generator::PLCluster, Generator::BA, Generator::Gnm}) {
                double total = 0;
                for (int s = 0; s < kSeeds; ++s) {
                    GenJob job{0, gen, n, m, derive_seed(1234, 1, static_cast<uint64_t>(s)),
                               derive_seed(1234, 2, static_cast<uint64_t>(s))};
                    total += generate_graph(job).graph.num_edges();
                }
                double mean = total / kSeeds;
                INFO("generator ", generator_name(gen), " n ", n, " deg ", deg, " mean ", mean);
                CHECK(mean >= 0.8 * static_cast<double>(m));
                CHECK(mean <= 1.2 * static_cast<double>(m));
            }
        }
    }
}

TEST_CASE("er mean matches the binomial expectation") {
    int n = 30;
    int64_t m = 87;
    double total = 0;
    const int kSeeds = 300;
    for (int s = 0; s < kSeeds; ++s) {
        GenJob job{0, Generator::ER, n, m, derive_seed(5, 1, static_cast<uint64_t>(s)), 1};
        total += generate_graph(job).graph.num_edges();
    }
    // sd of the mean is ~0.5 edges here; 5% of m is generous
    CHECK(total / kSeeds == doctest::Approx(static_cast<double>(m)).epsilon(0.05));
}

TEST_CASE("no job from the default ranges can throw") {
    DatasetSpec spec = default_spec();
    // scale the counts up to fuzz harder than any real corpus
    spec.count_small = 8000;
    spec.count_large = 2000;
    // structure generation only; building all 2000 large graphs with
    // indices would dominate test time for no extra coverage
    for (const auto& job : generate_jobs(spec, 31337)) {
        if (job.index % 7 != 0 && job.n > 100) continue;
        auto g = generate_graph(job);
        CHECK(g.graph.num_nodes == job.n);
        CHECK(g.graph.num_edges() <= static_cast<int64_t>(job.n) * (job.n - 1) / 2);
    }
}

TEST_CASE("dataset write and load round trip") {
    std::string dir = (fs::temp_directory_path() / "subcount_ds_test").string();
    fs::remove_all(dir);

    DatasetSpec spec;
    spec.count_small = 12;
    spec.node_min_small = 8;
    spec.node_max_small = 15;
    spec.deg_min_small = 1.0;
    spec.deg_max_small = 4.0;
    spec.count_large = 0;

    auto graphs = generate_all(spec, 2024);
    write_dataset(graphs, spec, 2024, dir);

    auto loaded = load_dataset(dir);
    REQUIRE(loaded.graphs.size() == graphs.size());
    CHECK(loaded.seed == 2024);
    for (size_t i = 0; i < graphs.size(); ++i) {
        CHECK(loaded.ids[i] == graphs[i].job.index);
        CHECK(loaded.graphs[i].edges == graphs[i].graph.edges);
        CHECK(loaded.graphs[i].node_index == graphs[i].graph.node_index);  // re-derived
    }

    // regenerating into a second directory gives byte-identical files
    std::string dir2 = (fs::temp_directory_path() / "subcount_ds_test2").string();
    fs::remove_all(dir2);
    write_dataset(generate_all(spec, 2024), spec, 2024, dir2);
    auto slurp = [](const std::string& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    CHECK(slurp(dir + "/manifest.json") == slurp(dir2 + "/manifest.json"));
    for (size_t i = 0; i < graphs.size(); ++i) {
        std::string rel = "/graphs/" + std::to_string(graphs[i].job.index) + ".txt";
        CHECK(slurp(dir + rel) == slurp(dir2 + rel));
    }
    fs::remove_all(dir);
    fs::remove_all(dir2);
}

TEST_CASE("spec loading") {
    CHECK(load_spec("default").count_small == 1380);
    CHECK(load_spec("desk").count_small == 200);
    CHECK(load_spec("desk").count_large == 0);
    CHECK_THROWS_AS(load_spec("/nonexistent/spec.json"), ValidationError);

    std::string path = (fs::temp_directory_path() / "subcount_spec.json").string();
    {
        std::ofstream out(path);
        out << R"({"count_small": 5, "node_range_small": [4, 9], "degree_range_small": [1, 3],
                   "count_large": 0})";
    }
    auto s = load_spec(path);
    CHECK(s.count_small == 5);
    CHECK(s.node_min_small == 4);
    CHECK(s.node_max_small == 9);
    fs::remove(path);

    {
        std::ofstream out(path);
        out << R"({"node_range_small": [9, 4]})";
    }
    CHECK_THROWS_AS(load_spec(path), ValidationError);
    fs::remove(path);
}
