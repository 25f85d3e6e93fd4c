#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <functional>

#include "subcount/optim.hpp"
#include "subcount/rng.hpp"
#include "subcount/tape.hpp"
#include "subcount/tensor.hpp"

using namespace subcount;

namespace {

Tensor2 random_tensor(int r, int c, uint64_t seed, double lo = -1.0, double hi = 1.0) {
    Tensor2 t(r, c);
    Rng rng(seed);
    for (double& x : t.data) x = lo + (hi - lo) * rng.next_double();
    return t;
}

// Central finite differences against the tape's gradients. `build` wires
// leaves (already on the tape, ids given) into a 1x1 root. Every input
// coordinate is perturbed, so transposed or dropped gradient terms cannot
// hide.
void gradcheck(std::vector<Tensor2> inputs,
               const std::function<Tape::Id(Tape&, const std::vector<Tape::Id>&)>& build,
               double tol = 1e-5) {
    auto eval = [&](const std::vector<Tensor2>& vals) {
        Tape tape;
        std::vector<Tape::Id> ids;
        for (const auto& v : vals) ids.push_back(tape.leaf(v));
        return tape.value(build(tape, ids)).data[0];
    };
    Tape tape;
    std::vector<Tape::Id> ids;
    for (const auto& v : inputs) ids.push_back(tape.leaf(v));
    Tape::Id root = build(tape, ids);
    REQUIRE(tape.value(root).rows == 1);
    REQUIRE(tape.value(root).cols == 1);
    tape.backward(root);

    const double h = 1e-5;
    for (size_t which = 0; which < inputs.size(); ++which) {
        for (size_t i = 0; i < inputs[which].data.size(); ++i) {
            auto plus = inputs, minus = inputs;
            plus[which].data[i] += h;
            minus[which].data[i] -= h;
            double fd = (eval(plus) - eval(minus)) / (2 * h);
            double an = tape.grad(ids[which]).data[i];
            double err = std::fabs(fd - an) / std::max({1.0, std::fabs(fd), std::fabs(an)});
            INFO("input " << which << " coord " << i << " fd " << fd << " tape " << an);
            CHECK(err <= tol);
        }
    }
}

// Weighted reduction to 1x1 with distinct weights per cell (u_i * v_j), so
// a transposed gradient changes the answer.
Tape::Id pin(Tape& tape, Tape::Id x) {
    const Tensor2& v = tape.value(x);
    Tensor2 left(1, v.rows), right(v.cols, 1);
    for (int i = 0; i < v.rows; ++i) left.at(0, i) = 0.3 + 0.7 * i;
    for (int j = 0; j < v.cols; ++j) right.at(j, 0) = 0.9 - 0.4 * j;
    return tape.matmul(tape.matmul(tape.leaf(left), x), tape.leaf(right));
}

}  // namespace

TEST_CASE("tensor helpers") {
    Tensor2 t = Tensor2::from_rows({{1, 2}, {3, 4}});
    CHECK(t.rows == 2);
    CHECK(t.cols == 2);
    CHECK(t.at(1, 0) == 3);
    Tensor2 c = Tensor2::column({5, 6, 7});
    CHECK(c.rows == 3);
    CHECK(c.cols == 1);
    CHECK(frobenius_distance(t, t) == 0.0);
    CHECK(frobenius_distance(Tensor2::scalar(1), Tensor2::scalar(4)) == doctest::Approx(3.0));
    CHECK(all_finite(t));
    t.at(0, 1) = std::nan("");
    CHECK(!all_finite(t));
}

TEST_CASE("forward values") {
    Tape tape;
    Tape::Id a = tape.leaf(Tensor2::from_rows({{1, 2}, {3, 4}}));
    Tape::Id b = tape.leaf(Tensor2::from_rows({{5, 6}, {7, 8}}));

    SUBCASE("matmul") {
        const Tensor2& v = tape.value(tape.matmul(a, b));
        CHECK(v.at(0, 0) == 19);
        CHECK(v.at(0, 1) == 22);
        CHECK(v.at(1, 0) == 43);
        CHECK(v.at(1, 1) == 50);
    }
    SUBCASE("add_rowvec broadcasts down rows") {
        Tape::Id bias = tape.leaf(Tensor2::from_rows({{10, 20}}));
        const Tensor2& v = tape.value(tape.add_rowvec(a, bias));
        CHECK(v.at(0, 0) == 11);
        CHECK(v.at(1, 1) == 24);
    }
    SUBCASE("leaky relu keeps positives, scales negatives") {
        Tape::Id x = tape.leaf(Tensor2::from_rows({{-2, 3}}));
        const Tensor2& v = tape.value(tape.leaky_relu(x, 0.01));
        CHECK(v.at(0, 0) == doctest::Approx(-0.02));
        CHECK(v.at(0, 1) == 3);
    }
    SUBCASE("sigmoid at zero is one half") {
        Tape::Id x = tape.leaf(Tensor2::zeros(1, 3));
        const Tensor2& v = tape.value(tape.sigmoid(x));
        CHECK(v.at(0, 1) == 0.5);
    }
    SUBCASE("sum_rows gives column sums") {
        const Tensor2& v = tape.value(tape.sum_rows(a));
        CHECK(v.rows == 1);
        CHECK(v.at(0, 0) == 4);
        CHECK(v.at(0, 1) == 6);
    }
    SUBCASE("gather then scatter round trip") {
        Tape::Id g = tape.gather_rows(a, {1, 0, 1});
        CHECK(tape.value(g).at(0, 0) == 3);
        Tape::Id s = tape.scatter_add_rows(g, {0, 0, 1}, 2);
        CHECK(tape.value(s).at(0, 0) == 4);   // rows 1 and 0 of a
        CHECK(tape.value(s).at(1, 0) == 3);
    }
    SUBCASE("rsub and mul_scalar") {
        Tape::Id p = tape.leaf(Tensor2::scalar(0.25));
        const Tensor2& v = tape.value(tape.mul_scalar(a, tape.rsub_const(1.0, p)));
        CHECK(v.at(1, 1) == 3.0);
    }
    SUBCASE("empty gather and scatter are legal") {
        Tape::Id g = tape.gather_rows(a, {});
        CHECK(tape.value(g).rows == 0);
        Tape::Id s = tape.scatter_add_rows(g, {}, 2);
        CHECK(tape.value(s).rows == 2);
        CHECK(tape.value(s).at(0, 0) == 0);
    }
    SUBCASE("shape mismatches fail at build time") {
        CHECK_THROWS(tape.matmul(a, tape.leaf(Tensor2::zeros(3, 2))));
        CHECK_THROWS(tape.add(a, tape.leaf(Tensor2::zeros(1, 2))));
        CHECK_THROWS(tape.backward(a));  // root must be 1x1
    }
}

TEST_CASE("smooth l1 values") {
    CHECK(smooth_l1_value(0, 0) == 0.0);
    CHECK(smooth_l1_value(0.5, 0) == 0.125);
    CHECK(smooth_l1_value(2, 0) == 1.5);
    CHECK(smooth_l1_value(0, 2) == 1.5);     // symmetric
    CHECK(smooth_l1_value(1, 0) == 0.5);     // continuous at the crossover
    CHECK(smooth_l1_value(7.25, 7.25) == 0.0);
}

TEST_CASE("primitive gradients match finite differences") {
    SUBCASE("matmul") {
        gradcheck({random_tensor(3, 4, 1), random_tensor(4, 2, 2)},
                  [](Tape& t, const std::vector<Tape::Id>& in) {
                      return pin(t, t.matmul(in[0], in[1]));
                  });
    }
    SUBCASE("add and add_rowvec") {
        gradcheck({random_tensor(3, 2, 3), random_tensor(3, 2, 4), random_tensor(1, 2, 5)},
                  [](Tape& t, const std::vector<Tape::Id>& in) {
                      return pin(t, t.add_rowvec(t.add(in[0], in[1]), in[2]));
                  });
    }
    SUBCASE("leaky relu") {
        gradcheck({random_tensor(3, 3, 6)}, [](Tape& t, const std::vector<Tape::Id>& in) {
            return pin(t, t.leaky_relu(in[0], 0.01));
        });
    }
    SUBCASE("sigmoid") {
        gradcheck({random_tensor(2, 3, 7, -3, 3)}, [](Tape& t, const std::vector<Tape::Id>& in) {
            return pin(t, t.sigmoid(in[0]));
        });
    }
    SUBCASE("sum_rows") {
        gradcheck({random_tensor(4, 3, 8)}, [](Tape& t, const std::vector<Tape::Id>& in) {
            return pin(t, t.sum_rows(in[0]));
        });
    }
    SUBCASE("concat_cols") {
        gradcheck({random_tensor(2, 2, 9), random_tensor(2, 3, 10)},
                  [](Tape& t, const std::vector<Tape::Id>& in) {
                      return pin(t, t.concat_cols(in[0], in[1]));
                  });
    }
    SUBCASE("gather with repeated rows accumulates") {
        gradcheck({random_tensor(3, 2, 11)}, [](Tape& t, const std::vector<Tape::Id>& in) {
            return pin(t, t.gather_rows(in[0], {2, 0, 2, 1, 2}));
        });
    }
    SUBCASE("scatter_add with colliding groups") {
        gradcheck({random_tensor(5, 2, 12)}, [](Tape& t, const std::vector<Tape::Id>& in) {
            return pin(t, t.scatter_add_rows(in[0], {1, 0, 1, 2, 1}, 3));
        });
    }
    SUBCASE("scale, mul_scalar, rsub_const") {
        gradcheck({random_tensor(2, 2, 13), Tensor2::scalar(0.37)},
                  [](Tape& t, const std::vector<Tape::Id>& in) {
                      Tape::Id gated = t.mul_scalar(t.scale(in[0], 2.5), t.rsub_const(1.0, in[1]));
                      return pin(t, gated);
                  });
    }
    SUBCASE("smooth_l1 in both regimes") {
        // diffs land near -2.4, -0.3, 0.4, 2.6: well away from the |d| = 1
        // crossover where the finite difference straddles the kink
        Tensor2 pred = Tensor2::column({-2.0, 0.1, 0.9, 3.1});
        Tensor2 target = Tensor2::from_rows({{0.4}, {0.4}, {0.5}, {0.5}});
        gradcheck({pred}, [&](Tape& t, const std::vector<Tape::Id>& in) {
            return pin(t, t.smooth_l1(in[0], target));
        });
    }
    SUBCASE("deep composition") {
        gradcheck({random_tensor(4, 3, 14), random_tensor(3, 3, 15), random_tensor(1, 3, 16)},
                  [](Tape& t, const std::vector<Tape::Id>& in) {
                      Tape::Id x = t.leaky_relu(t.add_rowvec(t.matmul(in[0], in[1]), in[2]), 0.01);
                      Tape::Id g = t.gather_rows(x, {0, 2, 2, 3});
                      Tape::Id s = t.scatter_add_rows(g, {1, 0, 1, 1}, 2);
                      return pin(t, t.sigmoid(s));
                  });
    }
}

TEST_CASE("gradients accumulate when a node is used twice") {
    Tape tape;
    Tape::Id x = tape.leaf(Tensor2::scalar(3.0));
    Tape::Id y = tape.mul_scalar(x, x);  // x^2
    tape.backward(y);
    CHECK(tape.grad(x).data[0] == doctest::Approx(6.0));
}

TEST_CASE("adam") {
    SUBCASE("first step moves by about lr against the gradient sign") {
        ParamStore ps;
        ps.add("w", Tensor2::from_rows({{1.0, -2.0}}));
        std::map<std::string, Tensor2> grads;
        grads["w"] = Tensor2::from_rows({{0.5, -0.25}});
        AdamConfig cfg;
        adam_step(ps, grads, cfg);
        CHECK(ps.step_count == 1);
        CHECK(ps.get("w").at(0, 0) == doctest::Approx(1.0 - cfg.lr).epsilon(1e-4));
        CHECK(ps.get("w").at(0, 1) == doctest::Approx(-2.0 + cfg.lr).epsilon(1e-4));
    }
    SUBCASE("zero gradient leaves the parameter alone") {
        ParamStore ps;
        ps.add("w", Tensor2::scalar(4.0));
        std::map<std::string, Tensor2> grads{{"w", Tensor2::scalar(0.0)}};
        adam_step(ps, grads, AdamConfig{});
        CHECK(ps.get("w").data[0] == 4.0);
    }
    SUBCASE("missing or malformed gradients throw") {
        ParamStore ps;
        ps.add("w", Tensor2::scalar(1.0));
        CHECK_THROWS(adam_step(ps, {}, AdamConfig{}));
        std::map<std::string, Tensor2> bad{{"w", Tensor2::scalar(std::nan(""))}};
        CHECK_THROWS(adam_step(ps, bad, AdamConfig{}));
        std::map<std::string, Tensor2> wrong{{"w", Tensor2::zeros(2, 2)}};
        CHECK_THROWS(adam_step(ps, wrong, AdamConfig{}));
    }
    SUBCASE("identical runs give identical parameters") {
        auto run = [] {
            ParamStore ps;
            ps.add("w", xavier_init(4, 4, 99));
            Rng rng(7);
            for (int step = 0; step < 25; ++step) {
                Tensor2 g(4, 4);
                for (double& x : g.data) x = rng.next_double() - 0.5;
                adam_step(ps, {{"w", g}}, AdamConfig{});
            }
            return ps.get("w").data;
        };
        CHECK(run() == run());
    }
}

TEST_CASE("xavier init is seeded and bounded") {
    Tensor2 a = xavier_init(6, 10, 42);
    Tensor2 b = xavier_init(6, 10, 42);
    Tensor2 c = xavier_init(6, 10, 43);
    CHECK(a.data == b.data);
    CHECK(a.data != c.data);
    double bound = std::sqrt(6.0 / 16.0);
    for (double x : a.data) CHECK(std::fabs(x) <= bound);
}

TEST_CASE("checkpoint round trip") {
    ParamStore ps;
    ps.add("alpha", xavier_init(2, 3, 1));
    ps.add("beta", Tensor2::from_rows({{1e-17, -0.0}, {3.5, 123456789.125}}));
    ps.step_count = 77;
    std::string path = std::string(std::getenv("TMPDIR") ? std::getenv("TMPDIR") : "/tmp") +
                       "/subcount_ckpt_test.json";
    save_checkpoint(path, "shmp", {{"layers", 4.0}}, ps);
    Checkpoint ck = load_checkpoint(path);
    CHECK(ck.kind == "shmp");
    CHECK(ck.hyper.at("layers") == 4.0);
    CHECK(ck.params.step_count == 77);
    CHECK(ck.params.names == ps.names);
    CHECK(ck.params.get("alpha").data == ps.get("alpha").data);
    CHECK(ck.params.get("beta").data == ps.get("beta").data);
    std::remove(path.c_str());
    CHECK_THROWS(load_checkpoint(path));
}

TEST_CASE("param store rejects duplicates and unknowns") {
    ParamStore ps;
    ps.add("w", Tensor2::scalar(1));
    CHECK_THROWS(ps.add("w", Tensor2::scalar(2)));
    CHECK_THROWS(ps.get("missing"));
    CHECK(ps.has("w"));
    CHECK(!ps.has("missing"));
}
