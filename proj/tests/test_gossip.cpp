#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "subcount/gossip.hpp"
#include "subcount/rng.hpp"

using namespace subcount;
using namespace testutil;

namespace {

GossipConfig tiny_config() {
    GossipConfig cfg;
    cfg.hidden = 8;
    cfg.gate_hidden = 8;
    cfg.query_dim = 4;
    return cfg;
}

Tensor2 random_embedding(int dim, uint64_t seed) {
    Tensor2 t(1, dim);
    Rng rng(seed);
    for (double& x : t.data) x = 2.0 * rng.next_double() - 1.0;
    return t;
}

// All gate parameters zeroed: sigmoid(0) pins every layer's gate to 0.5.
void zero_gates(GossipModel& m) {
    for (auto* name : {"gate.w0", "gate.b0"})
        for (double& x : m.params.get(name).data) x = 0.0;
    for (int l = 0; l < m.config.layers; ++l) {
        for (double& x : m.params.get("l" + std::to_string(l) + ".gate_w").data) x = 0.0;
        for (double& x : m.params.get("l" + std::to_string(l) + ".gate_b").data) x = 0.0;
    }
}

// Saturate the gate bias so sigmoid returns exactly 1: messages flow only
// toward higher node indices.
void saturate_gates(GossipModel& m) {
    zero_gates(m);
    for (int l = 0; l < m.config.layers; ++l)
        m.params.get("l" + std::to_string(l) + ".gate_b").at(0, 0) = 50.0;
}

}  // namespace

TEST_CASE("model construction and shapes") {
    GossipConfig desk = desk_gossip_config();
    CHECK(desk.layers == 2);
    CHECK(desk.hidden == 32);
    GossipConfig full;
    CHECK(full.layers == 2);
    CHECK(full.hidden == 64);

    GossipModel m = make_gossip_model(tiny_config(), 1);
    CHECK(m.params.get("expand.w").rows == 1);
    CHECK(m.params.get("expand.w").cols == 8);
    CHECK(m.params.get("gate.w0").rows == 4);
    CHECK(m.params.get("out.w").cols == 1);

    GossipModel m2 = make_gossip_model(tiny_config(), 1);
    CHECK(m.params.get("l0.w_msg").data == m2.params.get("l0.w_msg").data);
}

TEST_CASE("gates") {
    GossipModel m = make_gossip_model(tiny_config(), 2);
    Tensor2 q = random_embedding(4, 3);

    SUBCASE("zero weights give exactly one half") {
        zero_gates(m);
        for (double p : gate_values(m, q)) CHECK(p == 0.5);
    }
    SUBCASE("gates are a pure function of the query embedding") {
        CHECK(gate_values(m, q) == gate_values(m, q));
        Tensor2 q2 = random_embedding(4, 4);
        CHECK(gate_values(m, q) != gate_values(m, q2));
    }
    SUBCASE("gates stay strictly inside (0,1) and complement exactly") {
        for (uint64_t s = 0; s < 20; ++s) {
            for (double p : gate_values(m, random_embedding(4, s))) {
                CHECK(p > 0.0);
                CHECK(p < 1.0);
                // the two directional weights of any edge sum to 1 in
                // exact IEEE arithmetic, not just approximately
                CHECK(directed_gate(p, 2, 5) + directed_gate(p, 5, 2) == 1.0);
            }
        }
        CHECK(directed_gate(1.0, 0, 1) == 1.0);  // toward the larger index
        CHECK(directed_gate(1.0, 1, 0) == 0.0);
        CHECK(directed_gate(0.25, 3, 7) == 0.25);
        CHECK(directed_gate(0.25, 7, 3) == 0.75);
    }
    SUBCASE("embedding width is validated") {
        CHECK_THROWS(gate_values(m, random_embedding(5, 0)));
    }
}

TEST_CASE("forward basics") {
    GossipModel m = make_gossip_model(tiny_config(), 5);
    Tensor2 q = random_embedding(4, 6);

    SUBCASE("outputs are clamped non-negative and finite") {
        Graph g = random_graph(8, 12, 1);
        auto out = gossip_forward(m, g, std::vector<double>(8, 1.5), q);
        REQUIRE(out.size() == 8);
        for (double x : out) {
            CHECK(x >= 0.0);
            CHECK(std::isfinite(x));
        }
    }
    SUBCASE("prediction count must match the node count") {
        CHECK_THROWS(gossip_forward(m, path(3), {1.0, 2.0}, q));
    }
    SUBCASE("an isolated node ignores everyone else") {
        // node 3 has no edges; nodes 0-2 form a triangle
        Graph g = make_graph(4, {{0, 1}, {1, 2}, {0, 2}});
        auto a = gossip_forward(m, g, {1.0, 2.0, 3.0, 0.7}, q);
        auto b = gossip_forward(m, g, {9.0, -4.0, 0.0, 0.7}, q);
        CHECK(a[3] == b[3]);
        CHECK(a[0] != b[0]);
    }
}

TEST_CASE("saturated gates route messages strictly up the index order") {
    GossipModel m = make_gossip_model(tiny_config(), 7);
    saturate_gates(m);
    m.params.get("out.b").at(0, 0) = 5.0;  // keep outputs off the >= 0 clamp
    Tensor2 q = random_embedding(4, 8);
    Graph g = path(4);  // node_index is the identity

    auto base = gossip_forward(m, g, {1.0, 1.0, 1.0, 1.0}, q);
    auto bumped = gossip_forward(m, g, {1.0, 1.0, 1.0, 5.0}, q);
    // with P == 1 nothing flows from node 3 down to 0..2, bit for bit
    CHECK(base[0] == bumped[0]);
    CHECK(base[1] == bumped[1]);
    CHECK(base[2] == bumped[2]);

    auto head = gossip_forward(m, g, {5.0, 1.0, 1.0, 1.0}, q);
    CHECK(head[1] != base[1]);  // upward messages still flow
}

TEST_CASE("half gates treat both edge directions the same") {
    GossipModel m = make_gossip_model(tiny_config(), 9);
    zero_gates(m);
    Tensor2 q = random_embedding(4, 10);

    // swap the node indices of two structurally symmetric nodes of C4;
    // with P pinned at 0.5 the direction split cannot matter
    Graph g = cycle(4);
    std::vector<double> preds{0.3, 1.7, 0.3, 1.7};
    auto base = gossip_forward(m, g, preds, q);
    Graph swapped = g;
    std::swap(swapped.node_index[0], swapped.node_index[2]);
    auto flipped = gossip_forward(m, swapped, preds, q);
    for (int v = 0; v < 4; ++v) CHECK(base[v] == doctest::Approx(flipped[v]).epsilon(1e-12));
}

TEST_CASE("loss gradients match finite differences end to end") {
    GossipModel m = make_gossip_model(tiny_config(), 11);
    std::vector<GossipInstance> data;
    for (uint64_t s = 0; s < 3; ++s) {
        GossipInstance inst;
        inst.target = random_graph(6, 8, s);
        inst.query_embedding = random_embedding(4, s + 50);
        for (int v = 0; v < 6; ++v) {
            inst.inputs.push_back(0.3 * v + 0.1);
            inst.targets.push_back(double((v * 7 + 3) % 4));
        }
        data.push_back(inst);
    }
    std::vector<const GossipInstance*> batch{&data[0], &data[1], &data[2]};
    LossAndGrads lg = gossip_loss(m, batch);
    CHECK(std::isfinite(lg.loss));

    Rng rng(13);
    const double h = 1e-5;
    for (int trial = 0; trial < 25; ++trial) {
        const std::string& name = m.params.names[rng.next_below(m.params.names.size())];
        Tensor2& w = m.params.get(name);
        size_t coord = rng.next_below(w.data.size());
        double keep = w.data[coord];
        w.data[coord] = keep + h;
        double up = gossip_loss(m, batch).loss;
        w.data[coord] = keep - h;
        double down = gossip_loss(m, batch).loss;
        w.data[coord] = keep;
        double fd = (up - down) / (2 * h);
        double an = lg.grads.at(name).data[coord];
        INFO(name << "[" << coord << "] fd " << fd << " tape " << an);
        CHECK(std::fabs(fd - an) <= 1e-4 * std::max({1.0, std::fabs(fd), std::fabs(an)}));
    }
}

TEST_CASE("oracle-perfect inputs train to a near-identity refinement") {
    GossipModel m = make_gossip_model(tiny_config(), 15);
    std::vector<GossipInstance> data;
    for (uint64_t s = 0; s < 8; ++s) {
        GossipInstance inst;
        inst.target = random_graph(6, 9, s + 30);
        inst.query_embedding = random_embedding(4, s + 70);
        for (int v = 0; v < 6; ++v) {
            double truth = double((v + static_cast<int>(s)) % 3);
            inst.inputs.push_back(truth);   // inputs already equal the truth
            inst.targets.push_back(truth);
        }
        data.push_back(inst);
    }
    GossipTrainConfig cfg;
    cfg.epochs = 150;
    cfg.batch_instances = 4;
    cfg.seed = 3;
    auto curve = train_gossip(m, data, cfg);
    CHECK(curve.back() < curve.front());
    CHECK(curve.back() < 0.05);

    auto refined = gossip_forward(m, data[0].target, data[0].inputs, data[0].query_embedding);
    double worst = 0.0;
    for (int v = 0; v < 6; ++v)
        worst = std::max(worst, std::fabs(refined[v] - data[0].targets[v]));
    CHECK(worst < 0.75);  // stays close to the already-correct inputs
}

TEST_CASE("gossip training is deterministic") {
    std::vector<GossipInstance> data;
    for (uint64_t s = 0; s < 4; ++s) {
        GossipInstance inst;
        inst.target = random_graph(5, 6, s);
        inst.query_embedding = random_embedding(4, s);
        inst.inputs = {1, 0, 2, 1, 0};
        inst.targets = {1, 1, 2, 0, 0};
        data.push_back(inst);
    }
    GossipTrainConfig cfg;
    cfg.epochs = 20;
    cfg.batch_instances = 2;
    cfg.seed = 8;
    auto run = [&] {
        GossipModel m = make_gossip_model(tiny_config(), 19);
        auto curve = train_gossip(m, data, cfg);
        return std::pair(curve, m.params.get("l1.w_msg").data);
    };
    auto [c1, w1] = run();
    auto [c2, w2] = run();
    CHECK(c1 == c2);
    CHECK(w1 == w2);
}

TEST_CASE("homophily ratio") {
    CHECK(homophily_ratio(path(3), {4, 4, 4}) == 1.0);
    CHECK(homophily_ratio(path(3), {0, 0, 1}) == 0.5);
    // K4 with values [1,1,2,2]: equal on edges 0-1 and 2-3, so 2 of 6
    CHECK(homophily_ratio(complete(4), {1, 1, 2, 2}) == doctest::Approx(2.0 / 6.0));
    CHECK_THROWS(homophily_ratio(make_graph(3, {}), {1, 2, 3}));
    CHECK_THROWS(homophily_ratio(path(3), {1, 2}));
}

TEST_CASE("index-count correlation") {
    CHECK(index_count_correlation({0, 1, 2, 3}, {0, 1, 2, 3}) == doctest::Approx(1.0));
    CHECK(index_count_correlation({0, 1, 2, 3}, {5, 4, 3, 2}) == doctest::Approx(-1.0));
    // triangle canonical counts by index: [0, 0, 1]
    CHECK(index_count_correlation({0, 1, 2}, {0, 0, 1}) ==
          doctest::Approx(std::sqrt(3.0) / 2).epsilon(1e-12));
    CHECK_THROWS(index_count_correlation({0, 1, 2}, {7, 7, 7}));
    CHECK_THROWS(index_count_correlation({0}, {1}));
    CHECK_THROWS(index_count_correlation({0, 1}, {1}));
}
