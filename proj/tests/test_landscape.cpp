#include <doctest.h>

#include <cmath>

#include "samlab/landscape.hpp"
#include "samlab/prng.hpp"

using namespace samlab;

namespace {

// l(w) = 0.5 w^T A w with A = diag(2,1)
AnalyticObjective diag_quadratic() {
    return AnalyticObjective(
        2, [](std::span<const double> w) { return 0.5 * (2.0 * w[0] * w[0] + w[1] * w[1]); },
        [](std::span<const double> w) { return GradVector{2.0 * w[0], w[1]}; });
}

} // namespace

TEST_CASE("ray probe: k=0 reproduces the base loss bit for bit") {
    const auto obj = diag_quadratic();
    const ParamVector w = {0.8, -0.6};
    AscentConfig cfg;
    cfg.rho = 0.5;
    cfg.steps = 3;
    const std::vector<double> grid = {0.0, 0.25, 0.5, 1.0};
    const RayProbe probe = ray_probe(obj, w, cfg, grid);
    CHECK(probe.losses[0] == obj.value(w));
}

TEST_CASE("ray probe matches the closed form on a quadratic") {
    const auto obj = diag_quadratic();
    const ParamVector w = {1.0, 1.0};
    AscentConfig cfg;
    cfg.rho = 0.4;
    cfg.steps = 1;
    const auto grid = default_ray_grid(cfg.rho);
    const RayProbe probe = ray_probe(obj, w, cfg, grid);
    const AscentTrajectory traj = ascent_single(obj, w, cfg.rho);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double a = w[0] + grid[i] * traj.direction[0];
        const double b = w[1] + grid[i] * traj.direction[1];
        const double expected = 0.5 * (2.0 * a * a + b * b);
        CHECK(probe.losses[i] == doctest::Approx(expected).epsilon(1e-13));
    }
}

TEST_CASE("ray probe rejects a degenerate direction and a bad grid") {
    const auto obj = diag_quadratic();
    AscentConfig cfg;
    cfg.rho = 0.4;
    cfg.steps = 1;
    const std::vector<double> grid = {0.0, 0.1};
    CHECK_THROWS_AS(ray_probe(obj, {0.0, 0.0}, cfg, grid), NumericError);
    const std::vector<double> bad_grid = {0.0, 0.1, 0.1};
    CHECK_THROWS_AS(ray_probe(obj, {1.0, 1.0}, cfg, bad_grid), ConfigError);
}

TEST_CASE("grid probe on the quadratic matches the closed form everywhere") {
    const auto obj = diag_quadratic();
    const ParamVector w = {0.5, -0.2};
    const Vec e1 = {1.0, 0.0}, e2 = {0.0, 1.0};
    const auto xs = symmetric_grid(1.0, 11);
    const auto ys = symmetric_grid(1.0, 9);
    const GridProbe probe = grid_probe(obj, w, e1, e2, xs, ys);
    CHECK_FALSE(probe.normalized_a);
    CHECK_FALSE(probe.normalized_b);
    for (std::size_t i = 0; i < xs.size(); ++i)
        for (std::size_t j = 0; j < ys.size(); ++j) {
            const double a = w[0] + xs[i];
            const double b = w[1] + ys[j];
            const double expected = 0.5 * (2.0 * a * a + b * b);
            CHECK(probe.losses.at(static_cast<int>(i), static_cast<int>(j)) ==
                  doctest::Approx(expected).epsilon(1e-13));
        }
}

TEST_CASE("grid probe: zero-offset cell equals the base loss; centred quadratic is symmetric") {
    const auto obj = diag_quadratic();
    const ParamVector w = {0.0, 0.0};
    const Vec e1 = {1.0, 0.0}, e2 = {0.0, 1.0};
    const auto grid = symmetric_grid(0.8, 9);
    const GridProbe probe = grid_probe(obj, w, e1, e2, grid, grid);
    CHECK(probe.losses.at(4, 4) == obj.value(w));  // grid midpoint is (0,0)
    for (int i = 0; i < 9; ++i)
        for (int j = 0; j < 9; ++j)
            CHECK(probe.losses.at(i, j) == doctest::Approx(probe.losses.at(8 - i, 8 - j)).epsilon(1e-12));
}

TEST_CASE("grid probe normalizes non-unit directions and flags it") {
    const auto obj = diag_quadratic();
    const ParamVector w = {0.3, 0.3};
    const Vec stretched = {2.0, 0.0}, unit = {0.0, 1.0};
    const auto grid = symmetric_grid(0.5, 5);
    const GridProbe probe = grid_probe(obj, w, stretched, unit, grid, grid);
    CHECK(probe.normalized_a);
    CHECK_FALSE(probe.normalized_b);
    CHECK(probe.dir_a[0] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("cosine matrix: exact unit diagonal, symmetry, range") {
    ModelSpec m;
    m.widths = {2, 8, 2};
    m.activations = {Activation::tanh_fn, Activation::identity};
    m.loss = LossKind::softmax_ce;
    m.init_seed = 4;
    DatasetSpec dspec;
    dspec.train_count = 32;
    const Dataset data = generate_dataset(dspec);
    ModelObjective obj(m, first_batch(data.train, 16));
    const ParamVector params = init_params(m);

    const CosineMatrix cm = cosine_matrix(obj, params, 4, 0.3);
    REQUIRE(cm.values.rows == 5);
    for (int i = 0; i < 5; ++i) {
        CHECK(cm.values.at(i, i) == 1.0);
        for (int j = 0; j < 5; ++j) {
            CHECK(cm.values.at(i, j) == cm.values.at(j, i));
            CHECK(cm.values.at(i, j) <= 1.0);
            CHECK(cm.values.at(i, j) >= -1.0);
            CHECK(cm.entry_defined(i, j));
        }
    }
}

TEST_CASE("cosine matrix on a linear loss is all ones") {
    AnalyticObjective lin(
        3, [](std::span<const double> w) { return 2.0 * w[0] - w[1] + 0.5 * w[2]; },
        [](std::span<const double>) { return GradVector{2.0, -1.0, 0.5}; });
    const CosineMatrix cm = cosine_matrix(lin, {0.1, 0.2, 0.3}, 3, 0.5);
    for (int i = 0; i < cm.values.rows; ++i)
        for (int j = 0; j < cm.values.cols; ++j) CHECK(cm.values.at(i, j) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("cosine matrix marks zero-gradient entries undefined instead of NaN") {
    // gradient vanishes at the origin; perturbed gradients stay finite
    AnalyticObjective quad(
        2, [](std::span<const double> w) { return 0.5 * (w[0] * w[0] + w[1] * w[1]); },
        [](std::span<const double> w) { return GradVector{w[0], w[1]}; });
    const CosineMatrix cm = cosine_matrix(quad, {0.0, 0.0}, 2, 0.3);
    // every trajectory is degenerate: all entries undefined, none NaN
    for (int i = 0; i < cm.values.rows; ++i)
        for (int j = 0; j < cm.values.cols; ++j) {
            CHECK_FALSE(cm.entry_defined(i, j));
            CHECK_FALSE(std::isnan(cm.values.at(i, j)));
        }
}

TEST_CASE("decrease matrix: zero gradient gives zero decrease; half-square analytic value") {
    AnalyticObjective half_square(
        1, [](std::span<const double> w) { return 0.5 * w[0] * w[0]; },
        [](std::span<const double> w) { return GradVector{w[0]}; });
    std::vector<LabeledPoint> points = {{"w", {1.0}}};
    std::vector<LabeledGrad> grads = {{"zero", {0.0}}, {"g_w", {1.0}}};
    const DecreaseMatrix dm = decrease_matrix(half_square, points, grads, 0.1);
    CHECK(dm.delta.at(0, 0) == 0.0);
    CHECK(dm.delta.at(0, 1) == doctest::Approx(0.095).epsilon(1e-15));
}

TEST_CASE("decrease matrix entries equal an independent recomputation") {
    ModelSpec m;
    m.widths = {2, 6, 2};
    m.activations = {Activation::softplus, Activation::identity};
    m.loss = LossKind::mse;
    m.init_seed = 6;
    DatasetSpec dspec;
    dspec.train_count = 16;
    const Dataset data = generate_dataset(dspec);
    ModelObjective obj(m, first_batch(data.train, 8));
    const ParamVector params = init_params(m);

    const GradVector g = obj.gradient(params);
    AscentConfig cfg;
    cfg.rho = 0.2;
    cfg.steps = 2;
    const AscentTrajectory traj = ascent_multi(obj, params, cfg);
    std::vector<LabeledPoint> points = {{"w", params}, {"p2", traj.final_perturbed}};
    std::vector<LabeledGrad> grads = {{"g_w", g}, {"g_p2", obj.gradient(traj.final_perturbed)}};
    const DecreaseMatrix dm = decrease_matrix(obj, points, grads, 0.1);

    for (std::size_t i = 0; i < points.size(); ++i)
        for (std::size_t j = 0; j < grads.size(); ++j) {
            const double expected =
                obj.value(points[i].point) - obj.value(add_scaled(points[i].point, -0.1, grads[j].grad));
            CHECK(std::abs(dm.delta.at(static_cast<int>(i), static_cast<int>(j)) - expected) <= 1e-12);
        }
}

TEST_CASE("interpolated points run from one endpoint to the other") {
    const auto pts = interpolated_points({0.0, 0.0}, {1.0, 2.0}, 5, "q");
    REQUIRE(pts.size() == 5);
    CHECK(pts.front().point == ParamVector{0.0, 0.0});
    CHECK(pts.back().point == ParamVector{1.0, 2.0});
    CHECK(pts[2].point[0] == doctest::Approx(0.5));
    CHECK(pts[2].point[1] == doctest::Approx(1.0));
}

TEST_CASE("perturbed loss table: rho=0 column equals the plain loss; architecture checks") {
    DatasetSpec dspec;
    dspec.train_count = 24;
    const Dataset data = generate_dataset(dspec);
    ModelSpec m = default_mlp(2, 2, 3);
    m.widths = {2, 6, 2};
    m.activations = {Activation::tanh_fn, Activation::identity};

    ModelGroup group;
    group.label = "probe";
    for (std::uint64_t s : {1ULL, 2ULL}) {
        ModelSpec ms = m;
        ms.init_seed = s;
        group.seed_models.push_back({ms, init_params(ms)});
    }
    const std::vector<int> steps = {1, 3};
    const PerturbedLossTable table = perturbed_loss_table({group}, data.train, 8, 0.0, steps);
    // at rho = 0 the perturbed losses equal the unperturbed column
    CHECK(table.mean_by_steps.at(0, 0) == doctest::Approx(table.base_mean[0]).epsilon(1e-15));
    CHECK(table.mean_by_steps.at(0, 1) == doctest::Approx(table.base_mean[0]).epsilon(1e-15));

    ModelGroup mismatched = group;
    mismatched.seed_models[1].model.widths = {2, 7, 2};
    mismatched.seed_models[1].params = init_params(mismatched.seed_models[1].model);
    CHECK_THROWS_AS(perturbed_loss_table({mismatched}, data.train, 8, 0.1, steps), ConfigError);
}
