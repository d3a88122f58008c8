#include <doctest.h>

#include <cmath>
#include <vector>

#include "samlab/autodiff.hpp"
#include "samlab/objective.hpp"
#include "samlab/prng.hpp"

using namespace samlab;

namespace {

// Central-difference gradient oracle, h = 1e-5 * (1 + |w_i|) per coordinate.
GradVector fd_gradient(const ModelSpec& model, const ParamVector& params, const Batch& batch) {
    GradVector grad(params.size());
    ParamVector probe = params;
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double h = 1e-5 * (1.0 + std::abs(params[i]));
        probe[i] = params[i] + h;
        const double up = forward(model, probe, batch);
        probe[i] = params[i] - h;
        const double down = forward(model, probe, batch);
        probe[i] = params[i];
        grad[i] = (up - down) / (2.0 * h);
    }
    return grad;
}

double guarded_rel_error(double a, double b) {
    return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

Batch single_row_batch(double x, double t) {
    Batch batch;
    batch.inputs = Matrix(1, 1);
    batch.inputs.at(0, 0) = x;
    batch.targets = Matrix(1, 1);
    batch.targets.at(0, 0) = t;
    return batch;
}

ModelSpec scalar_model(LossKind loss) {
    ModelSpec m;
    m.widths = {1, 1};
    m.activations = {Activation::identity};
    m.loss = loss;
    m.with_bias = false;
    return m;
}

Batch random_batch(int rows, int in_dim, int out_dim, Xoshiro256pp& rng, bool one_hot) {
    Batch batch;
    batch.inputs = Matrix(rows, in_dim);
    for (auto& v : batch.inputs.data) v = rng.normal();
    batch.targets = Matrix(rows, out_dim);
    if (one_hot) {
        for (int r = 0; r < rows; ++r)
            batch.targets.at(r, static_cast<int>(rng.below(static_cast<std::uint64_t>(out_dim)))) = 1.0;
    } else {
        for (auto& v : batch.targets.data) v = rng.normal();
    }
    return batch;
}

} // namespace

TEST_CASE("forward: zero weights, zero target -> zero mse loss") {
    ModelSpec m;
    m.widths = {2, 2};
    m.activations = {Activation::identity};
    m.loss = LossKind::mse;
    ParamVector params(static_cast<std::size_t>(param_count(m)), 0.0);
    Batch batch;
    batch.inputs = Matrix(3, 2);
    batch.inputs.data = {1.0, 2.0, -1.0, 0.5, 0.0, 3.0};
    batch.targets = Matrix(3, 2);
    CHECK(forward(m, params, batch) == 0.0);
}

TEST_CASE("forward/backward: scalar half-square loss") {
    // l(w) = 0.5 w^2 via a bias-free 1-1 linear model, x=1, target 0
    const ModelSpec m = scalar_model(LossKind::mse);
    const Batch batch = single_row_batch(1.0, 0.0);
    ParamVector w = {2.0};
    CompGraph graph(m, w, batch);
    CHECK(graph.forward() == doctest::Approx(2.0).epsilon(1e-15));
    const GradVector grad = graph.backward();
    CHECK(grad.size() == 1);
    CHECK(grad[0] == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("backward: loss linear in the parameter has constant gradient") {
    // l(w) = c*w via the mean-output readout; gradient is exactly c everywhere
    const double c = -3.25;
    const ModelSpec m = scalar_model(LossKind::mean_output);
    const Batch batch = single_row_batch(c, 0.0);
    Xoshiro256pp rng(3);
    for (int trial = 0; trial < 10; ++trial) {
        ParamVector w = {rng.uniform(-5.0, 5.0)};
        const auto [loss, grad] = loss_and_grad(m, w, batch);
        CHECK(loss == doctest::Approx(c * w[0]).epsilon(1e-15));
        CHECK(grad[0] == c);
    }
}

TEST_CASE("backward before forward is a state error") {
    const ModelSpec m = scalar_model(LossKind::mse);
    const Batch batch = single_row_batch(1.0, 0.0);
    ParamVector w = {1.0};
    CompGraph graph(m, w, batch);
    CHECK_THROWS_AS(graph.backward(), StateError);
}

TEST_CASE("dimension mismatches are configuration errors") {
    const ModelSpec m = scalar_model(LossKind::mse);
    Batch batch = single_row_batch(1.0, 0.0);
    ParamVector wrong_len = {1.0, 2.0};
    CHECK_THROWS_AS(CompGraph(m, wrong_len, batch), ConfigError);
    Batch empty;
    empty.inputs = Matrix(0, 1);
    empty.targets = Matrix(0, 1);
    ParamVector w = {1.0};
    CHECK_THROWS_AS(CompGraph(m, w, empty), ConfigError);
    Batch wide = batch;
    wide.inputs = Matrix(1, 3);
    CHECK_THROWS_AS(CompGraph(m, w, wide), ConfigError);
}

TEST_CASE("forward of a 2-16-2 tanh mlp matches a straight-line reimplementation") {
    ModelSpec m;
    m.widths = {2, 16, 2};
    m.activations = {Activation::tanh_fn, Activation::identity};
    m.loss = LossKind::mse;
    m.init_seed = 21;
    const ParamVector params = init_params(m);
    Xoshiro256pp rng(77);
    const Batch batch = random_batch(5, 2, 2, rng, false);

    // oracle: hand-rolled forward pass, no graph machinery
    const auto layout = layer_layout(m);
    double oracle = 0.0;
    for (int r = 0; r < batch.inputs.rows; ++r) {
        std::vector<double> h = {batch.inputs.at(r, 0), batch.inputs.at(r, 1)};
        for (int l = 0; l < 2; ++l) {
            const auto& ll = layout[static_cast<std::size_t>(l)];
            std::vector<double> next(static_cast<std::size_t>(ll.out));
            for (int o = 0; o < ll.out; ++o) {
                double acc = params[static_cast<std::size_t>(ll.bias_offset + o)];
                for (int i = 0; i < ll.in; ++i)
                    acc += params[static_cast<std::size_t>(ll.weight_offset + o * ll.in + i)] *
                           h[static_cast<std::size_t>(i)];
                next[static_cast<std::size_t>(o)] = l == 0 ? std::tanh(acc) : acc;
            }
            h = next;
        }
        for (int c = 0; c < 2; ++c) {
            const double d = h[static_cast<std::size_t>(c)] - batch.targets.at(r, c);
            oracle += 0.5 * d * d;
        }
    }
    oracle /= batch.inputs.rows;

    CHECK(forward(m, params, batch) == doctest::Approx(oracle).epsilon(1e-14));
}

TEST_CASE("gradient check: every op kind against central differences, 100 seeds") {
    struct Arch {
        std::vector<Activation> acts;
        LossKind loss;
        bool one_hot;
    };
    const std::vector<Arch> archs = {
        {{Activation::tanh_fn, Activation::identity}, LossKind::mse, false},
        {{Activation::softplus, Activation::identity}, LossKind::mse, false},
        {{Activation::relu, Activation::identity}, LossKind::mse, false},
        {{Activation::tanh_fn, Activation::identity}, LossKind::softmax_ce, true},
        {{Activation::softplus, Activation::tanh_fn}, LossKind::softmax_ce, true},
        {{Activation::identity, Activation::identity}, LossKind::mean_output, false},
    };

    int checked = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        for (std::size_t arch_idx = 0; arch_idx < archs.size(); ++arch_idx) {
            const Arch& arch = archs[arch_idx];
            ModelSpec m;
            Xoshiro256pp rng(derive_seed(seed, 500 + arch_idx));
            const int hidden = 2 + static_cast<int>(rng.below(6));
            const int out = 2 + static_cast<int>(rng.below(2));
            m.widths = {2, hidden, out};
            m.activations = arch.acts;
            m.loss = arch.loss;
            m.init_seed = derive_seed(seed, 501);
            ParamVector params = init_params(m);
            for (auto& p : params) p += 0.2 * rng.normal();

            Batch batch = random_batch(4, 2, out, rng, arch.one_hot);

            const bool has_relu = arch.acts[0] == Activation::relu || arch.acts[1] == Activation::relu;
            if (has_relu) {
                // keep pre-activations away from the kink so differences are valid
                bool near_kink = true;
                std::uint64_t resample = 0;
                while (near_kink) {
                    near_kink = false;
                    const Matrix pre = forward_outputs(
                        ModelSpec{{2, hidden}, {Activation::identity}, LossKind::mse, m.init_seed, true},
                        ParamVector(params.begin(), params.begin() + (2 * hidden + hidden)), batch.inputs);
                    for (double v : pre.data)
                        if (std::abs(v) < 1e-3) near_kink = true;
                    if (near_kink) {
                        Xoshiro256pp re(derive_seed(seed, 600 + resample++));
                        batch = random_batch(4, 2, out, re, arch.one_hot);
                    }
                }
            }

            const auto [loss, grad] = loss_and_grad(m, params, batch);
            (void)loss;
            const GradVector fd = fd_gradient(m, params, batch);
            for (std::size_t i = 0; i < grad.size(); ++i) {
                CHECK(guarded_rel_error(grad[i], fd[i]) <= 1e-6);
            }
        }
        ++checked;
    }
    CHECK(checked == 100);
}

TEST_CASE("determinism: identical inputs give bit-identical loss and gradient") {
    ModelSpec m;
    m.widths = {3, 8, 2};
    m.activations = {Activation::tanh_fn, Activation::identity};
    m.loss = LossKind::softmax_ce;
    m.init_seed = 5;
    const ParamVector params = init_params(m);
    Xoshiro256pp rng(8);
    const Batch batch = random_batch(6, 3, 2, rng, true);

    const auto [l1, g1] = loss_and_grad(m, params, batch);
    const auto [l2, g2] = loss_and_grad(m, params, batch);
    CHECK(l1 == l2);
    CHECK(g1 == g2);

    // re-running forward on one graph reproduces the cached values
    CompGraph graph(m, params, batch);
    const double first = graph.forward();
    CHECK(graph.forward() == first);
    CHECK(graph.loss() == first);
    CHECK(first == l1);
}

TEST_CASE("hessian-vector product on a diagonal quadratic") {
    // l(w) = 0.5 w^T diag(2,1) w
    AnalyticObjective quad(
        2, [](std::span<const double> w) { return 0.5 * (2.0 * w[0] * w[0] + w[1] * w[1]); },
        [](std::span<const double> w) { return GradVector{2.0 * w[0], w[1]}; });
    const ParamVector w = {0.3, -0.7};
    const GradVector h1 = hessian_vector_product(quad, w, Vec{1.0, 0.0});
    CHECK(h1[0] == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(h1[1] == doctest::Approx(0.0).epsilon(1e-6));
    const GradVector h2 = hessian_vector_product(quad, w, Vec{0.0, 1.0});
    CHECK(h2[0] == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(h2[1] == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("hessian-vector product rejects the zero vector") {
    AnalyticObjective quad(
        2, [](std::span<const double> w) { return w[0] * w[0] + w[1] * w[1]; },
        [](std::span<const double> w) { return GradVector{2.0 * w[0], 2.0 * w[1]}; });
    CHECK_THROWS_AS(hessian_vector_product(quad, Vec{1.0, 1.0}, Vec{0.0, 0.0}), NumericError);
}

TEST_CASE("hessian-vector product agrees with the directional second difference") {
    ModelSpec m;
    m.widths = {2, 6, 2};
    m.activations = {Activation::tanh_fn, Activation::identity};
    m.loss = LossKind::mse;
    m.init_seed = 13;
    const ParamVector params = init_params(m);
    Xoshiro256pp rng(14);
    const Batch batch = random_batch(4, 2, 2, rng, false);
    ModelObjective obj(m, batch);

    Vec v(params.size());
    for (auto& x : v) x = rng.normal();

    const GradVector hv = hessian_vector_product(obj, params, v);
    const double quad_form = dot(v, hv);

    const double h = 1e-3 / norm(v);
    const double center = obj.value(params);
    const double up = obj.value(add_scaled(params, h, v));
    const double down = obj.value(add_scaled(params, -h, v));
    const double second_diff = (up - 2.0 * center + down) / (h * h);

    CHECK(std::abs(quad_form - second_diff) <= 1e-3 * std::max(1.0, std::abs(second_diff)));
}
