#include "disae/nn/dense.hpp"
#include "disae/nn/losses.hpp"
#include "disae/nn/optimizer.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace disae;
using namespace disae::nn;

namespace {

DenseNet one_by_one(double w, double b, Activation act = Activation::linear) {
    DenseNet net({1, 1}, {act});
    net.mutable_layers()[0].W(0, 0) = w;
    net.mutable_layers()[0].b(0) = b;
    return net;
}

// Finite-difference check of backward() for the scalar sum(out .* probe).
double dense_fd_error(DenseNet& net, const Matrix& x, const Matrix& probe) {
    const auto cache = net.forward_cached(x);
    const Gradients g = net.backward(cache, probe);
    const double h = 1e-6;
    auto f = [&] { return (net.forward(x).array() * probe.array()).sum(); };
    double worst = 0.0;
    for (std::size_t l = 0; l < net.n_layers(); ++l) {
        for (int part = 0; part < 2; ++part) {
            const Matrix analytic = part == 0 ? g.dW[l] : Matrix(g.db[l]);
            Matrix numeric(analytic.rows(), analytic.cols());
            for (Index i = 0; i < analytic.size(); ++i) {
                auto& layer = net.mutable_layers()[l];
                double& w = part == 0 ? layer.W.data()[i] : layer.b.data()[i];
                const double saved = w;
                w = saved + h;
                const double up = f();
                w = saved - h;
                const double down = f();
                w = saved;
                numeric.data()[i] = (up - down) / (2 * h);
            }
            const double scale = std::max({analytic.norm(), numeric.norm(), 1e-7});
            worst = std::max(worst, (analytic - numeric).norm() / scale);
        }
    }
    // Input gradient.
    Matrix xin = x;
    Matrix numeric(x.rows(), x.cols());
    for (Index i = 0; i < x.size(); ++i) {
        const double saved = xin.data()[i];
        xin.data()[i] = saved + h;
        const double up = (net.forward(xin).array() * probe.array()).sum();
        xin.data()[i] = saved - h;
        const double down = (net.forward(xin).array() * probe.array()).sum();
        xin.data()[i] = saved;
        numeric.data()[i] = (up - down) / (2 * h);
    }
    const auto cache2 = net.forward_cached(x);
    const Matrix din = net.backward(cache2, probe).d_input;
    worst = std::max(worst, (din - numeric).norm() / std::max({din.norm(), numeric.norm(), 1e-7}));
    return worst;
}

}  // namespace

TEST_SUITE("nn-core") {

TEST_CASE("forward: identity layer, zero relu net, 1x1 arithmetic") {
    DenseNet id({3, 3}, {Activation::linear});
    id.mutable_layers()[0].W = Matrix::Identity(3, 3);
    Rng rng(1);
    Matrix x(4, 3);
    for (Index i = 0; i < x.size(); ++i) x.data()[i] = rng.normal();
    CHECK(id.forward(x) == x);

    const DenseNet zero({3, 5, 2}, {Activation::relu, Activation::relu});
    CHECK(zero.forward(x).cwiseAbs().maxCoeff() == 0.0);

    Matrix three(1, 1);
    three << 3.0;
    CHECK(one_by_one(2.0, 1.0).forward(three)(0, 0) == 7.0);
}

TEST_CASE("forward rejects a width mismatch, backward a stale cache") {
    DenseNet net({2, 3}, {Activation::linear});
    CHECK_THROWS_AS(net.forward(Matrix::Zero(1, 3)), ShapeError);
    const auto cache = net.forward_cached(Matrix::Ones(2, 2));
    net.mutable_layers()[0].W(0, 0) = 1.0;
    CHECK_THROWS_AS(net.backward(cache, Matrix::Ones(2, 3)), Error);
    CHECK_THROWS_AS(DenseNet({2}, {}), ConfigError);
    CHECK_THROWS_AS(DenseNet({2, 3}, {}), ConfigError);
}

TEST_CASE("backward: at the optimum of the 1x1 net every gradient is zero") {
    DenseNet net = one_by_one(2.0, 1.0);
    Matrix x(1, 1), target(1, 1);
    x << 3.0;
    target << 7.0;
    const auto cache = net.forward_cached(x);
    const LossValue l = mse(cache.result(), target);
    CHECK(l.value == 0.0);
    const Gradients g = net.backward(cache, l.grad);
    CHECK(g.dW[0](0, 0) == 0.0);
    CHECK(g.db[0](0) == 0.0);
}

TEST_CASE("backward: relu with negative pre-activation passes no gradient") {
    DenseNet net = one_by_one(1.0, -5.0, Activation::relu);
    Matrix x(1, 1);
    x << 2.0;
    const auto cache = net.forward_cached(x);
    const Gradients g = net.backward(cache, Matrix::Ones(1, 1));
    CHECK(g.dW[0](0, 0) == 0.0);
    CHECK(g.db[0](0) == 0.0);
    CHECK(g.d_input(0, 0) == 0.0);
}

TEST_CASE("property: backward matches finite differences on random nets") {
    Rng rng(77);
    for (int trial = 0; trial < 60; ++trial) {
        std::vector<int> hidden;
        const int depth = 1 + static_cast<int>(rng.below(3));
        for (int d = 0; d < depth; ++d) hidden.push_back(1 + static_cast<int>(rng.below(6)));
        const int in = 1 + static_cast<int>(rng.below(5));
        const int out = 1 + static_cast<int>(rng.below(4));
        DenseNet net = make_mlp(in, hidden, out, rng.below(2) ? Activation::relu : Activation::linear, rng);
        for (auto& layer : net.mutable_layers())
            for (Index j = 0; j < layer.b.size(); ++j) layer.b(j) = rng.uniform(-0.5, 0.5);
        REQUIRE(net.parameter_count() <= 1000);
        Matrix x(5, in), probe(5, out);
        for (Index i = 0; i < x.size(); ++i) x.data()[i] = rng.normal();
        for (Index i = 0; i < probe.size(); ++i) probe.data()[i] = rng.normal();
        CHECK(dense_fd_error(net, x, probe) < 1e-4);
    }
}

TEST_CASE("initialization is seeded and bounded by the fan-in limit") {
    Rng a(5), b(5);
    const DenseNet n1 = make_mlp(8, {16}, 2, Activation::linear, a);
    const DenseNet n2 = make_mlp(8, {16}, 2, Activation::linear, b);
    CHECK(n1.layers()[0].W == n2.layers()[0].W);
    CHECK(n1.layers()[0].W.cwiseAbs().maxCoeff() <= std::sqrt(6.0 / 8.0));
    CHECK(n1.layers()[1].W.cwiseAbs().maxCoeff() <= std::sqrt(3.0 / 16.0));
    CHECK(n1.layers()[0].b.isZero());
    CHECK(n1.all_finite());
    CHECK(n1.parameter_count() == 8 * 16 + 16 + 16 * 2 + 2);
}

TEST_CASE("gradient reversal: identity forward, -lambda backward") {
    Matrix g(1, 2);
    g << 2.0, -4.0;
    const Matrix r = grad_reversal_backward(g, 0.5);
    CHECK(r(0, 0) == -1.0);
    CHECK(r(0, 1) == 2.0);
    CHECK(grad_reversal_backward(g, 0.0).cwiseAbs().maxCoeff() == 0.0);
    CHECK(grad_reversal_backward(g, 1.0) == -g);
    const GradReversal layer{0.7};
    CHECK(layer.forward(g) == g);
    CHECK(layer.backward(g) == -0.7 * g);
}

TEST_CASE("losses: mse(x,x)=0, uniform logits give ln C, hand softmax") {
    Matrix x = Matrix::Random(4, 3);
    CHECK(mse(x, x).value == 0.0);
    const std::vector<int> labels{0, 2, 1, 4, 3};
    CHECK(std::abs(softmax_cross_entropy(Matrix::Zero(5, 5), labels).value - std::log(5.0)) < 1e-12);
    Matrix logits(1, 2);
    logits << std::log(3.0), 0.0;
    const std::vector<int> zero{0};
    CHECK(std::abs(softmax_cross_entropy(logits, zero).value - (-std::log(0.75))) < 1e-12);
    CHECK(std::abs(-std::log(0.75) - 0.2877) < 1e-4);
    const std::vector<int> bad{2};
    CHECK_THROWS_AS(softmax_cross_entropy(logits, bad), ValidationError);
    CHECK_THROWS_AS(mse(x, Matrix::Zero(4, 2)), ShapeError);
}

TEST_CASE("property: loss gradients match finite differences") {
    Rng rng(13);
    for (int trial = 0; trial < 100; ++trial) {
        const Index n = 1 + static_cast<Index>(rng.below(5));
        const Index c = 2 + static_cast<Index>(rng.below(4));
        Matrix logits(n, c), target(n, c);
        std::vector<int> y;
        for (Index i = 0; i < logits.size(); ++i) {
            logits.data()[i] = 3.0 * rng.normal();
            target.data()[i] = rng.normal();
        }
        for (Index i = 0; i < n; ++i) y.push_back(static_cast<int>(rng.below(static_cast<std::uint64_t>(c))));
        const LossValue ce = softmax_cross_entropy(logits, y);
        const LossValue sq = mse(logits, target);
        const double h = 1e-6;
        for (Index i = 0; i < logits.size(); ++i) {
            Matrix up = logits, down = logits;
            up.data()[i] += h;
            down.data()[i] -= h;
            const double d_ce = (softmax_cross_entropy(up, y).value - softmax_cross_entropy(down, y).value) / (2 * h);
            const double d_sq = (mse(up, target).value - mse(down, target).value) / (2 * h);
            CHECK(std::abs(d_ce - ce.grad.data()[i]) < 1e-7);
            CHECK(std::abs(d_sq - sq.grad.data()[i]) < 1e-7);
        }
        const Matrix p = softmax(logits);
        for (Index i = 0; i < n; ++i) CHECK(std::abs(p.row(i).sum() - 1.0) < 1e-12);
    }
}

TEST_CASE("softmax is stable for huge logits; argmax and accuracy") {
    Matrix logits(2, 3);
    logits << 1000.0, 1001.0, 999.0, -1e4, -1e4, -1e4 + 1;
    const Matrix p = softmax(logits);
    CHECK(p.allFinite());
    CHECK(argmax_rows(logits) == std::vector<int>{1, 2});
    const std::vector<int> pred{1, 2, 0, 0}, truth{1, 0, 0, 1};
    CHECK(accuracy(pred, truth) == 0.5);
}

TEST_CASE("AdamW: zero gradients leave parameters unchanged except decay; biases never decay") {
    Vector w = Vector::Constant(3, 2.0), b = Vector::Constant(2, 1.0);
    const Vector gw = Vector::Zero(3), gb = Vector::Zero(2);
    AdamW opt({0.1, 0.9, 0.999, 1e-8, 0.5});
    const std::vector<ParamBlock> blocks{{"w", w.data(), gw.data(), 3, true}, {"b", b.data(), gb.data(), 2, false}};
    opt.step(blocks);
    CHECK(w.isApprox(Vector::Constant(3, 2.0 * (1 - 0.1 * 0.5)), 1e-15));
    CHECK(b == Vector::Constant(2, 1.0));
    AdamW plain({0.1});
    plain.step(blocks);
    CHECK(w.isApprox(Vector::Constant(3, 1.9), 1e-15));
    CHECK(plain.first_moments().size() == 2);
    CHECK(plain.first_moments()[0].size() == 3);
    CHECK(plain.second_moments()[1].size() == 2);
}

TEST_CASE("AdamW: first step moves each parameter by lr against the gradient sign") {
    Vector w(3);
    w << 1.0, -2.0, 0.5;
    Vector g(3);
    g << 0.3, -7.0, 1e-3;
    AdamW opt({0.01});
    opt.step({{"w", w.data(), g.data(), 3, true}});
    CHECK(std::abs(w(0) - 0.99) < 1e-6);
    CHECK(std::abs(w(1) + 1.99) < 1e-6);
    CHECK(std::abs(w(2) - 0.49) < 1e-4);
    CHECK(opt.steps() == 1);
}

TEST_CASE("AdamW: non-finite gradient names the block; layout changes are rejected") {
    Vector w = Vector::Ones(2);
    Vector g(2);
    g << 1.0, std::nan("");
    AdamW opt;
    try {
        opt.step({{"encoder.layer0.W", w.data(), g.data(), 2, true}});
        FAIL("expected a divergence error");
    } catch (const DivergenceError& e) {
        CHECK(std::string(e.what()).find("encoder.layer0.W") != std::string::npos);
    }
    g(1) = 0.0;
    opt.step({{"w", w.data(), g.data(), 2, true}});
    CHECK_THROWS_AS(opt.step({{"w", w.data(), g.data(), 1, true}}), ShapeError);
}

TEST_CASE("AdamW minimises a quadratic") {
    Vector w = Vector::Constant(4, 5.0);
    Vector g(4);
    AdamW opt({0.05});
    for (int i = 0; i < 2000; ++i) {
        g = 2.0 * (w - Vector::Constant(4, 1.0));
        opt.step({{"w", w.data(), g.data(), 4, true}});
    }
    CHECK((w - Vector::Constant(4, 1.0)).cwiseAbs().maxCoeff() < 1e-3);
}

TEST_CASE("plateau: patience 2 over [1,1,1] reduces once after epoch 3; two reductions quarter the lr") {
    PlateauSchedule s({2, 0.5, 1e-5, 1e-6});
    double lr = 1.0;
    lr = s.update(lr, 1.0);
    CHECK(lr == 1.0);
    lr = s.update(lr, 1.0);
    CHECK(lr == 1.0);
    lr = s.update(lr, 1.0);
    CHECK(lr == 0.5);
    lr = s.update(lr, 1.0);
    lr = s.update(lr, 1.0);
    CHECK(lr == 0.25);
    // Improvements below the threshold do not count.
    PlateauSchedule t({1, 0.5, 1e-5, 1e-6});
    t.update(1.0, 1.0);
    CHECK(t.update(1.0, 1.0 - 1e-7) == 0.5);
    CHECK(t.update(1.0, 0.5) == 1.0);
}

TEST_CASE("plateau: minimum lr floor and invalid factors") {
    PlateauSchedule s({1, 0.1, 1e-3, 1e-6});
    double lr = 1e-2;
    s.update(lr, 1.0);
    for (int i = 0; i < 5; ++i) lr = s.update(lr, 2.0);
    CHECK(lr == 1e-3);
    CHECK_THROWS_AS(PlateauSchedule({1, 1.0, 0.0, 0.0}), ConfigError);
    CHECK_THROWS_AS(PlateauSchedule({1, 0.0, 0.0, 0.0}), ConfigError);
}

}  // TEST_SUITE
