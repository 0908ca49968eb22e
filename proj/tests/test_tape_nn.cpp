#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

#include "pisac/env.hpp"
#include "pisac/nn.hpp"
#include "pisac/tape.hpp"

using namespace pisac;

namespace {

double eval_scalar(ParamStore& params, const std::function<int(Tape&)>& build) {
    Tape tape(&params);
    return tape.value(build(tape)).scalar();
}

/// Central-difference check of every parameter gradient of a scalar build.
double max_grad_rel_error(ParamStore& params, const std::function<int(Tape&)>& build,
                          double h = 1e-5) {
    params.zero_grad();
    {
        Tape tape(&params);
        tape.backward(build(tape));
    }
    std::vector<Matrix> analytic;
    for (const auto& p : params.all()) analytic.push_back(p.grad);

    double worst = 0.0;
    for (int pi = 0; pi < params.size(); ++pi) {
        for (int i = 0; i < params[pi].value.size(); ++i) {
            double& slot = params[pi].value.data[static_cast<size_t>(i)];
            const double keep = slot;
            slot = keep + h;
            const double up = eval_scalar(params, build);
            slot = keep - h;
            const double down = eval_scalar(params, build);
            slot = keep;
            const double numeric = (up - down) / (2.0 * h);
            const double exact = analytic[static_cast<size_t>(pi)].data[static_cast<size_t>(i)];
            const double denom = std::max({std::abs(numeric), std::abs(exact), 1e-6});
            worst = std::max(worst, std::abs(numeric - exact) / denom);
        }
    }
    return worst;
}

HeteroGraph toy_graph(int n_antenna, int n_user, int n_target, int dim, Rng& rng) {
    HeteroGraph g;
    g.n_antenna = n_antenna;
    g.n_user = n_user;
    g.n_target = n_target;
    g.features = Matrix(g.node_count(), dim);
    for (double& v : g.features.data) v = rng.uniform(-1.0, 1.0);
    for (int i = 0; i < n_antenna; ++i) {
        for (int k = 0; k < n_user; ++k) {
            g.edges[0].emplace_back(i, n_antenna + k);
            g.edges[0].emplace_back(n_antenna + k, i);
        }
        for (int l = 0; l < n_target; ++l) {
            g.edges[1].emplace_back(i, n_antenna + n_user + l);
            g.edges[1].emplace_back(n_antenna + n_user + l, i);
        }
    }
    for (int k = 0; k < n_user; ++k)
        for (int l = 0; l < n_target; ++l) {
            g.edges[2].emplace_back(n_antenna + k, n_antenna + n_user + l);
            g.edges[2].emplace_back(n_antenna + n_user + l, n_antenna + k);
        }
    return g;
}

HeteroGraph permute_graph(const HeteroGraph& g, const std::vector<int>& perm) {
    HeteroGraph out = g;
    for (int v = 0; v < g.node_count(); ++v)
        for (int c = 0; c < g.features.cols; ++c)
            out.features.at(perm[static_cast<size_t>(v)], c) = g.features.at(v, c);
    for (int r = 0; r < kRelationCount; ++r)
        for (size_t e = 0; e < g.edges[static_cast<size_t>(r)].size(); ++e) {
            const auto& [src, dst] = g.edges[static_cast<size_t>(r)][e];
            out.edges[static_cast<size_t>(r)][e] = {perm[static_cast<size_t>(src)],
                                                    perm[static_cast<size_t>(dst)]};
        }
    return out;
}

}  // namespace

TEST_CASE("dense layer basics") {
    ParamStore params;
    Rng rng(1);
    Dense d = Dense::create(params, "d", 3, 3, rng);
    // overwrite with identity / zero bias
    params[d.w].value = Matrix(3, 3, {1, 0, 0, 0, 1, 0, 0, 0, 1});
    params[d.b].value = Matrix(1, 3);

    Tape tape(&params);
    const int x = tape.constant(Matrix(2, 3, {1, 2, 3, 4, 5, 6}));
    const int y = d.forward(tape, x);
    CHECK(tape.value(y).data == std::vector<double>{1, 2, 3, 4, 5, 6});
}

TEST_CASE("softmax and relu reference points") {
    ParamStore params;
    Tape tape(&params);
    const int x = tape.constant(Matrix(1, 2, {0.0, 0.0}));
    const auto& sm = tape.value(tape.softmax_rows(x));
    CHECK(sm.data[0] == doctest::Approx(0.5));
    CHECK(sm.data[1] == doctest::Approx(0.5));

    const int r = tape.relu_op(tape.constant(Matrix(1, 1, {-3.0})));
    CHECK(tape.value(r).data[0] == 0.0);
}

TEST_CASE("relgnn forward closed-form cases") {
    ParamStore params;
    Rng rng(2);

    SUBCASE("isolated node with identity self weight passes through") {
        RelGnnLayer layer =
            RelGnnLayer::create(params, "g", 2, 2, false, Activation::Identity, rng);
        for (int id : layer.w_rel) params[id].value = Matrix(2, 2);
        params[layer.w_self].value = Matrix(2, 2, {1, 0, 0, 1});

        HeteroGraph g;
        g.n_antenna = 1;
        g.features = Matrix(1, 2, {0.3, -0.7});
        Tape tape(&params);
        const int h = layer.forward(tape, tape.constant(g.features), g);
        CHECK(tape.value(h).data == std::vector<double>{0.3, -0.7});
    }

    SUBCASE("one neighbor via one relation with identity weights sums") {
        RelGnnLayer layer =
            RelGnnLayer::create(params, "g", 2, 2, false, Activation::Identity, rng);
        for (int id : layer.w_rel) params[id].value = Matrix(2, 2, {1, 0, 0, 1});
        params[layer.w_self].value = Matrix(2, 2, {1, 0, 0, 1});

        HeteroGraph g;
        g.n_antenna = 1;
        g.n_user = 1;
        g.features = Matrix(2, 2, {1, 0, 0, 1});
        g.edges[0] = {{0, 1}, {1, 0}};
        Tape tape(&params);
        const int h = layer.forward(tape, tape.constant(g.features), g);
        CHECK(tape.value(h).row(0)[0] == 1.0);  // self [1,0] + neighbor [0,1]
        CHECK(tape.value(h).row(0)[1] == 1.0);
        CHECK(tape.value(h).row(1)[0] == 1.0);
        CHECK(tape.value(h).row(1)[1] == 1.0);
    }

    SUBCASE("two equal neighbors contribute exactly twice one") {
        RelGnnLayer layer =
            RelGnnLayer::create(params, "g2", 3, 4, false, Activation::Identity, rng);
        HeteroGraph one;
        one.n_antenna = 2;
        one.features = Matrix(2, 3, {0.5, 0.5, 0.5, 0.2, -0.4, 0.9});
        one.edges[0] = {{1, 0}};
        HeteroGraph two;
        two.n_antenna = 3;
        two.features = Matrix(3, 3, {0.5, 0.5, 0.5, 0.2, -0.4, 0.9, 0.2, -0.4, 0.9});
        two.edges[0] = {{1, 0}, {2, 0}};

        Tape tape(&params);
        const int h1 = layer.forward(tape, tape.constant(one.features), one);
        const int h2 = layer.forward(tape, tape.constant(two.features), two);
        const double self_part = [&] {
            HeteroGraph iso;
            iso.n_antenna = 1;
            iso.features = Matrix(1, 3, {0.5, 0.5, 0.5});
            const int h = layer.forward(tape, tape.constant(iso.features), iso);
            return tape.value(h).at(0, 0);
        }();
        const double one_contrib = tape.value(h1).at(0, 0) - self_part;
        const double two_contrib = tape.value(h2).at(0, 0) - self_part;
        CHECK(two_contrib == doctest::Approx(2.0 * one_contrib).epsilon(1e-12));
    }
}

TEST_CASE("relgnn with identity activation is linear in the features") {
    ParamStore params;
    Rng rng(3);
    RelGnnLayer layer = RelGnnLayer::create(params, "g", 4, 4, false, Activation::Identity, rng);
    HeteroGraph g = toy_graph(3, 2, 1, 4, rng);
    HeteroGraph g2 = g;
    for (double& v : g2.features.data) v = rng.uniform(-1.0, 1.0);

    Tape tape(&params);
    const int ha = layer.forward(tape, tape.constant(g.features), g);
    const int hb = layer.forward(tape, tape.constant(g2.features), g2);

    Matrix sum_features = g.features;
    for (int i = 0; i < sum_features.size(); ++i)
        sum_features.data[static_cast<size_t>(i)] += g2.features.data[static_cast<size_t>(i)];
    HeteroGraph gsum = g;
    gsum.features = sum_features;
    const int hsum = layer.forward(tape, tape.constant(gsum.features), gsum);

    for (int i = 0; i < tape.value(hsum).size(); ++i) {
        const double want = tape.value(ha).data[static_cast<size_t>(i)] +
                            tape.value(hb).data[static_cast<size_t>(i)];
        CHECK(tape.value(hsum).data[static_cast<size_t>(i)] ==
              doctest::Approx(want).epsilon(1e-12));
    }
}

TEST_CASE("mean pool") {
    ParamStore params;
    Tape tape(&params);
    const int x = tape.constant(Matrix(2, 2, {1, 2, 3, 4}));
    const auto& pooled = tape.value(tape.mean_rows(x));
    CHECK(pooled.data == std::vector<double>{2, 3});

    const int same = tape.constant(Matrix(3, 2, {7, 8, 7, 8, 7, 8}));
    CHECK(tape.value(tape.mean_rows(same)).data == std::vector<double>{7, 8});
}

TEST_CASE("pooled embedding is permutation invariant") {
    ParamStore params;
    Rng rng(5);
    RelGnnLayer l1 = RelGnnLayer::create(params, "l1", 6, 16, false, Activation::Tanh, rng);
    RelGnnLayer l2 = RelGnnLayer::create(params, "l2", 16, 16, false, Activation::Tanh, rng);

    for (int trial = 0; trial < 20; ++trial) {
        HeteroGraph g = toy_graph(4, 3, 2, 6, rng);
        std::vector<int> perm(static_cast<size_t>(g.node_count()));
        std::iota(perm.begin(), perm.end(), 0);
        for (size_t i = perm.size(); i > 1; --i)
            std::swap(perm[i - 1], perm[static_cast<size_t>(rng.uniform() * i)]);
        const HeteroGraph gp = permute_graph(g, perm);

        Tape tape(&params);
        const int h = tape.mean_rows(
            l2.forward(tape, l1.forward(tape, tape.constant(g.features), g), g));
        const int hp = tape.mean_rows(
            l2.forward(tape, l1.forward(tape, tape.constant(gp.features), gp), gp));
        for (int c = 0; c < 16; ++c)
            CHECK(std::abs(tape.value(h).data[static_cast<size_t>(c)] -
                           tape.value(hp).data[static_cast<size_t>(c)]) <= 1e-12);
    }
}

TEST_CASE("backward requires a scalar root") {
    ParamStore params;
    Tape tape(&params);
    const int x = tape.constant(Matrix(1, 2, {1.0, 2.0}));
    CHECK_THROWS_AS(tape.backward(x), std::invalid_argument);
}

TEST_CASE("backward of x squared") {
    ParamStore params;
    const int x = params.add("x", Matrix(1, 1, {3.0}));
    Tape tape(&params);
    const int xn = tape.param(x);
    tape.backward(tape.sum_all(tape.mul(xn, xn)));
    CHECK(params[x].grad.data[0] == doctest::Approx(6.0).epsilon(1e-12));
}

TEST_CASE("gradient check: every primitive op") {
    for (uint64_t seed = 1; seed <= 20; ++seed) {
        Rng rng(seed);
        ParamStore params;
        const int a = params.add("a", uniform_init(3, 4, 4, rng));
        const int b = params.add("b", uniform_init(3, 4, 4, rng));
        const int w = params.add("w", uniform_init(5, 4, 4, rng));
        const int bias = params.add("bias", uniform_init(1, 4, 4, rng));

        auto check = [&](const std::function<int(Tape&)>& build) {
            CHECK(max_grad_rel_error(params, build) < 1e-4);
        };
        check([&](Tape& t) { return t.sum_all(t.matmul_nt(t.param(a), t.param(w))); });
        check([&](Tape& t) { return t.sum_all(t.add(t.param(a), t.param(b))); });
        check([&](Tape& t) { return t.sum_all(t.add_row(t.param(a), t.param(bias))); });
        check([&](Tape& t) { return t.sum_all(t.sub(t.param(a), t.param(b))); });
        check([&](Tape& t) { return t.sum_all(t.mul(t.param(a), t.param(b))); });
        check([&](Tape& t) {
            return t.sum_all(t.div(t.param(a), t.add_const(t.mul(t.param(b), t.param(b)), 1.0)));
        });
        check([&](Tape& t) { return t.sum_all(t.scale(t.param(a), -1.3)); });
        check([&](Tape& t) { return t.sum_all(t.tanh_op(t.param(a))); });
        check([&](Tape& t) { return t.sum_all(t.logistic_op(t.param(a))); });
        check([&](Tape& t) { return t.sum_all(t.exp_op(t.param(a))); });
        check([&](Tape& t) { return t.sum_all(t.softmax_rows(t.param(a))); });
        check([&](Tape& t) { return t.sum_all(t.mean_rows(t.param(a))); });
        check([&](Tape& t) { return t.sum_all(t.min_elem(t.param(a), t.param(b))); });
        // relu and clip at points away from their kinks
        check([&](Tape& t) { return t.sum_all(t.relu_op(t.add_const(t.param(a), 3.0))); });
        check([&](Tape& t) { return t.sum_all(t.clip(t.param(a), -0.9999, 0.9999)); });
    }
}

TEST_CASE("gradient check: dense + tanh + mean composite") {
    for (uint64_t seed = 1; seed <= 20; ++seed) {
        Rng rng(seed * 31);
        ParamStore params;
        Dense d1 = Dense::create(params, "d1", 4, 8, rng);
        Dense d2 = Dense::create(params, "d2", 8, 1, rng);
        const Matrix x = uniform_init(5, 4, 4, rng);
        auto build = [&](Tape& t) {
            const int h = t.tanh_op(d1.forward(t, t.constant(x)));
            return t.sum_all(t.mean_rows(d2.forward(t, h)));
        };
        CHECK(max_grad_rel_error(params, build) < 1e-4);
    }
}

TEST_CASE("gradient check: relgnn layers on a 13-node graph") {
    for (uint64_t seed = 1; seed <= 20; ++seed) {
        Rng rng(seed * 77);
        ParamStore params;
        RelGnnLayer l1 = RelGnnLayer::create(params, "l1", 6, 8, false, Activation::Tanh, rng);
        RelGnnLayer l2 = RelGnnLayer::create(params, "l2", 8, 8, false, Activation::Tanh, rng);
        const HeteroGraph g = toy_graph(6, 6, 1, 6, rng);
        auto build = [&](Tape& t) {
            const int h = l2.forward(t, l1.forward(t, t.constant(g.features), g), g);
            return t.sum_all(t.mean_rows(h));
        };
        CHECK(max_grad_rel_error(params, build) < 1e-4);
    }
}

TEST_CASE("gradient check: homogeneous (grl) layer") {
    for (uint64_t seed = 1; seed <= 5; ++seed) {
        Rng rng(seed * 101);
        ParamStore params;
        RelGnnLayer layer = RelGnnLayer::create(params, "l", 6, 8, true, Activation::Tanh, rng);
        const HeteroGraph g = toy_graph(4, 3, 1, 6, rng);
        auto build = [&](Tape& t) {
            return t.sum_all(t.mean_rows(layer.forward(t, t.constant(g.features), g)));
        };
        CHECK(max_grad_rel_error(params, build) < 1e-4);
    }
}

TEST_CASE("identical seeds give identical parameter bytes") {
    auto make = [](uint64_t seed) {
        Rng rng(seed);
        ParamStore params;
        Dense::create(params, "d1", 6, 64, rng);
        RelGnnLayer::create(params, "l", 64, 64, false, Activation::Tanh, rng);
        return params;
    };
    const ParamStore a = make(99);
    const ParamStore b = make(99);
    const ParamStore c = make(100);
    REQUIRE(a.size() == b.size());
    bool all_equal = true;
    bool any_diff_c = false;
    for (int i = 0; i < a.size(); ++i) {
        all_equal = all_equal && a[i].value.data == b[i].value.data;
        any_diff_c = any_diff_c || a[i].value.data != c[i].value.data;
    }
    CHECK(all_equal);
    CHECK(any_diff_c);
}

TEST_CASE("adam updates move parameters against the gradient") {
    ParamStore params;
    const int x = params.add("x", Matrix(1, 1, {1.0}));
    Adam adam;
    adam.add_group({x}, 0.1);
    for (int i = 0; i < 50; ++i) {
        params.zero_grad();
        Tape tape(&params);
        const int xn = tape.param(x);
        tape.backward(tape.sum_all(tape.mul(xn, xn)));  // minimize x^2
        adam.step(params);
    }
    CHECK(std::abs(params[x].value.data[0]) < 0.5);
}
