#include <doctest.h>

#include <cmath>
#include <functional>

#include "signglove/nn/autodiff.hpp"
#include "signglove/nn/layers.hpp"
#include "signglove/rng.hpp"

using namespace signglove;
using nn::Tensor;
using nn::ValuePtr;

namespace {

Tensor random_tensor(std::vector<std::size_t> shape, Rng& rng, double sigma = 1.0,
                     double kink_guard = 0.0) {
    Tensor t(std::move(shape));
    for (auto& v : t.values()) {
        v = rng.gaussian(0.0, sigma);
        if (kink_guard > 0.0 && std::abs(v) < kink_guard)
            v += (v >= 0.0 ? kink_guard : -kink_guard);
    }
    return t;
}

// Central finite differences against the analytic gradient of a scalar
// rebuildable loss. `build` must recompute the loss from the leaves' current
// values every call.
void check_gradients(const std::function<ValuePtr()>& build,
                     const std::vector<ValuePtr>& leaves, double h = 1e-4,
                     double tol = 1e-4) {
    for (const auto& leaf : leaves) leaf->zero_grad();
    auto loss = build();
    nn::backward(loss);
    std::vector<Tensor> analytic;
    for (const auto& leaf : leaves) {
        leaf->ensure_grad();
        analytic.push_back(leaf->grad);
    }

    for (std::size_t li = 0; li < leaves.size(); ++li) {
        auto& leaf = leaves[li];
        for (std::size_t i = 0; i < leaf->val.numel(); ++i) {
            const double keep = leaf->val[i];
            leaf->val[i] = keep + h;
            const double up = build()->val[0];
            leaf->val[i] = keep - h;
            const double down = build()->val[0];
            leaf->val[i] = keep;
            const double fd = (up - down) / (2.0 * h);
            const double a = analytic[li][i];
            const double rel = std::abs(a - fd) / std::max({1.0, std::abs(a), std::abs(fd)});
            if (rel >= tol) {
                CAPTURE(li);
                CAPTURE(i);
                CAPTURE(a);
                CAPTURE(fd);
            }
            REQUIRE(rel < tol);
        }
    }
    for (const auto& leaf : leaves) leaf->zero_grad();
}

}  // namespace

TEST_CASE("elementwise op values") {
    auto x = nn::make_constant(Tensor({4}, {-2.0, 0.0, 3.0, -0.5}));
    auto y = nn::relu(x);
    CHECK(y->val[0] == 0.0);
    CHECK(y->val[1] == 0.0);
    CHECK(y->val[2] == 3.0);
    CHECK(y->val[3] == 0.0);

    auto z = nn::make_constant(Tensor({1, 1, 3}, {2.0, 4.0, 6.0}));
    CHECK(nn::global_avgpool1d(z)->val[0] == doctest::Approx(4.0));
}

TEST_CASE("conv1d hand values") {
    // Identity kernel [0,1,0] with same padding passes the input through.
    auto x = nn::make_constant(Tensor({1, 1, 5}, {1, 2, 3, 4, 5}));
    auto w_id = nn::make_constant(Tensor({1, 1, 3}, {0, 1, 0}));
    auto b0 = nn::make_constant(Tensor({1}, {0.0}));
    auto y = nn::conv1d(x, w_id, b0, 1);
    REQUIRE(y->val.shape() == std::vector<std::size_t>{1, 1, 5});
    for (std::size_t i = 0; i < 5; ++i) CHECK(y->val[i] == x->val[i]);

    // Box kernel [1,1,1] on [1,2,3]: zero pads give [3,6,5].
    auto x2 = nn::make_constant(Tensor({1, 1, 3}, {1, 2, 3}));
    auto w_box = nn::make_constant(Tensor({1, 1, 3}, {1, 1, 1}));
    auto y2 = nn::conv1d(x2, w_box, b0, 1);
    CHECK(y2->val[0] == 3.0);
    CHECK(y2->val[1] == 6.0);
    CHECK(y2->val[2] == 5.0);
}

TEST_CASE("maxpool truncates odd tails") {
    auto x = nn::make_constant(Tensor({1, 1, 5}, {1, 9, 2, 3, 99}));
    auto y = nn::maxpool1d(x, 2);
    REQUIRE(y->val.shape() == std::vector<std::size_t>{1, 1, 2});
    CHECK(y->val[0] == 9.0);
    CHECK(y->val[1] == 3.0);  // the trailing 99 is dropped
}

TEST_CASE("softmax rows are normalized and stable at large logits") {
    Tensor logits({2, 3}, {1e4, -1e4, 0.0, 3.0, 2.0, 1.0});
    Tensor probs;
    nn::softmax_rows(logits, probs);
    for (std::size_t b = 0; b < 2; ++b) {
        double sum = 0.0;
        for (std::size_t c = 0; c < 3; ++c) {
            CHECK(std::isfinite(probs.at(b, c)));
            sum += probs.at(b, c);
        }
        CHECK(std::abs(sum - 1.0) < 1e-9);
    }
    CHECK(probs.at(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("focal loss values and reductions") {
    // Two equal logits: p_t = 1/2 exactly; gamma=2 gives 0.25*ln 2.
    auto logits2 = nn::make_constant(Tensor({1, 2}, {0.0, 0.0}));
    auto loss2 = nn::focal_loss(logits2, {0}, 1.0, 2.0);
    CHECK(std::abs(loss2->val[0] - 0.25 * std::log(2.0)) < 1e-12);

    // Eleven classes arranged so p_t = 1/2.
    std::vector<double> vals(11, 0.0);
    vals[0] = std::log(10.0);
    auto logits11 = nn::make_constant(Tensor({1, 11}, vals));
    auto loss11 = nn::focal_loss(logits11, {0}, 1.0, 2.0);
    CHECK(std::abs(loss11->val[0] - 0.25 * std::log(2.0)) < 1e-12);

    // gamma = 0 equals cross-entropy, computed independently via log-sum-exp.
    Rng rng(11);
    Tensor raw = random_tensor({8, 11}, rng, 2.0);
    std::vector<int> targets;
    for (int b = 0; b < 8; ++b) targets.push_back(static_cast<int>(rng.uniform_int(0, 10)));
    auto logits = nn::make_constant(raw);
    auto loss = nn::focal_loss(logits, targets, 1.0, 0.0);
    double expect = 0.0;
    for (std::size_t b = 0; b < 8; ++b) {
        double mx = raw.at(b, 0);
        for (std::size_t c = 1; c < 11; ++c) mx = std::max(mx, raw.at(b, c));
        double lse = 0.0;
        for (std::size_t c = 0; c < 11; ++c) lse += std::exp(raw.at(b, c) - mx);
        expect += -(raw.at(b, static_cast<std::size_t>(targets[b])) - mx - std::log(lse));
    }
    expect /= 8.0;
    CHECK(std::abs(loss->val[0] - expect) < 1e-12);

    // p_t -> 1 drives the loss to zero.
    auto confident = nn::make_constant(Tensor({1, 2}, {40.0, -40.0}));
    CHECK(nn::focal_loss(confident, {0}, 1.0, 2.0)->val[0] < 1e-12);
}

TEST_CASE("finite differences: conv1d") {
    Rng rng(21);
    auto x = nn::make_parameter(random_tensor({2, 3, 7}, rng));
    auto w = nn::make_parameter(random_tensor({4, 3, 3}, rng));
    auto b = nn::make_parameter(random_tensor({4}, rng));
    const Tensor reducer = random_tensor({2, 4, 7}, rng);
    check_gradients([&] { return nn::weighted_sum(nn::conv1d(x, w, b, 1), reducer); },
                    {x, w, b});
}

TEST_CASE("finite differences: linear") {
    Rng rng(22);
    auto x = nn::make_parameter(random_tensor({3, 6}, rng));
    auto w = nn::make_parameter(random_tensor({6, 4}, rng));
    auto b = nn::make_parameter(random_tensor({4}, rng));
    const Tensor reducer = random_tensor({3, 4}, rng);
    check_gradients([&] { return nn::weighted_sum(nn::linear(x, w, b), reducer); },
                    {x, w, b});
}

TEST_CASE("finite differences: relu, maxpool, avgpool, concat") {
    Rng rng(23);

    auto xr = nn::make_parameter(random_tensor({3, 5}, rng, 1.0, /*kink_guard=*/0.05));
    const Tensor red_r = random_tensor({3, 5}, rng);
    check_gradients([&] { return nn::weighted_sum(nn::relu(xr), red_r); }, {xr});

    // Keep pooled pairs separated so the argmax cannot flip under h.
    Tensor pool_in({2, 2, 6});
    for (std::size_t i = 0; i < pool_in.numel(); ++i)
        pool_in[i] = static_cast<double>(i % 2 == 0 ? i : -static_cast<double>(i)) * 0.37 +
                     (i % 2 ? 0.11 : -0.23);
    auto xp = nn::make_parameter(pool_in);
    const Tensor red_p = random_tensor({2, 2, 3}, rng);
    check_gradients([&] { return nn::weighted_sum(nn::maxpool1d(xp, 2), red_p); }, {xp});

    auto xa = nn::make_parameter(random_tensor({2, 3, 5}, rng));
    const Tensor red_a = random_tensor({2, 3}, rng);
    check_gradients([&] { return nn::weighted_sum(nn::global_avgpool1d(xa), red_a); }, {xa});

    auto c1 = nn::make_parameter(random_tensor({2, 3}, rng));
    auto c2 = nn::make_parameter(random_tensor({2, 4}, rng));
    const Tensor red_c = random_tensor({2, 7}, rng);
    check_gradients(
        [&] { return nn::weighted_sum(nn::concat_features({c1, c2}), red_c); }, {c1, c2});
}

TEST_CASE("finite differences: batchnorm (both ranks) and layernorm") {
    Rng rng(24);

    nn::BatchNorm1d bn3(3);
    bn3.set_training(true);
    auto x3 = nn::make_parameter(random_tensor({4, 3, 5}, rng));
    const Tensor red3 = random_tensor({4, 3, 5}, rng);
    check_gradients([&] { return nn::weighted_sum(bn3.forward(x3), red3); },
                    {x3, bn3.gamma, bn3.beta});

    nn::BatchNorm1d bn2(6);
    bn2.set_training(true);
    auto x2 = nn::make_parameter(random_tensor({5, 6}, rng));
    const Tensor red2 = random_tensor({5, 6}, rng);
    check_gradients([&] { return nn::weighted_sum(bn2.forward(x2), red2); },
                    {x2, bn2.gamma, bn2.beta});

    nn::LayerNorm ln(7);
    auto xl = nn::make_parameter(random_tensor({4, 7}, rng));
    const Tensor redl = random_tensor({4, 7}, rng);
    check_gradients([&] { return nn::weighted_sum(ln.forward(xl), redl); },
                    {xl, ln.gamma, ln.beta});
}

TEST_CASE("finite differences: dropout with a pinned mask") {
    Rng rng(25);
    nn::Dropout drop(0.5, 7);
    drop.set_training(true);
    auto x = nn::make_parameter(random_tensor({4, 6}, rng));
    const Tensor red = random_tensor({4, 6}, rng);
    check_gradients(
        [&] {
            drop.reseed(1234);  // identical mask on every rebuild
            return nn::weighted_sum(drop.forward(x), red);
        },
        {x});
}

TEST_CASE("finite differences: focal loss, both gammas") {
    Rng rng(26);
    for (const double gamma : {0.0, 2.0}) {
        auto logits = nn::make_parameter(random_tensor({6, 11}, rng, 1.5));
        std::vector<int> targets;
        for (int b = 0; b < 6; ++b)
            targets.push_back(static_cast<int>(rng.uniform_int(0, 10)));
        check_gradients([&] { return nn::focal_loss(logits, targets, 1.0, gamma); },
                        {logits});
    }
}

TEST_CASE("finite differences: composed three-layer network end to end") {
    Rng init(27);
    nn::Linear l1(6, 8, init), l2(8, 11, init);
    nn::BatchNorm1d bn(8);
    bn.set_training(true);
    auto x = nn::make_parameter(random_tensor({5, 6}, init, 1.0, 0.05));
    std::vector<int> targets = {0, 3, 7, 10, 5};

    std::vector<ValuePtr> leaves = {x, l1.weight, l1.bias, bn.gamma, bn.beta,
                                    l2.weight, l2.bias};
    check_gradients(
        [&] {
            auto h = nn::relu(bn.forward(l1.forward(x)));
            return nn::focal_loss(l2.forward(h), targets, 1.0, 2.0);
        },
        leaves);
}

TEST_CASE("eval mode forwards are bit-identical") {
    Rng init(28);
    nn::Linear l1(6, 8, init), l2(8, 4, init);
    nn::BatchNorm1d bn(8);
    nn::Dropout drop(0.5, 3);
    for (nn::Module* m : {static_cast<nn::Module*>(&l1), static_cast<nn::Module*>(&bn),
                          static_cast<nn::Module*>(&drop), static_cast<nn::Module*>(&l2)})
        m->set_training(false);

    Rng data(29);
    auto x = nn::make_constant(random_tensor({3, 6}, data));
    auto run = [&] { return l2.forward(drop.forward(nn::relu(bn.forward(l1.forward(x))))); };
    const auto a = run();
    const auto b = run();
    for (std::size_t i = 0; i < a->val.numel(); ++i) CHECK(a->val[i] == b->val[i]);
}

TEST_CASE("layernorm output is standardized before the affine map") {
    Rng rng(30);
    nn::LayerNorm ln(9);
    auto x = nn::make_parameter(random_tensor({4, 9}, rng, 3.0));
    auto y = ln.forward(x);  // gamma=1, beta=0 at init
    for (std::size_t b = 0; b < 4; ++b) {
        double mean = 0.0, var = 0.0;
        for (std::size_t f = 0; f < 9; ++f) mean += y->val.at(b, f);
        mean /= 9.0;
        for (std::size_t f = 0; f < 9; ++f) {
            const double d = y->val.at(b, f) - mean;
            var += d * d;
        }
        var /= 9.0;
        CHECK(std::abs(mean) < 1e-9);
        CHECK(var == doctest::Approx(1.0).epsilon(1e-3));  // eps shrinks it slightly
    }
}
