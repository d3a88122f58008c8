#include <doctest.h>

#include <cmath>
#include <numbers>

#include "samlab/ascent.hpp"
#include "samlab/bruteforce.hpp"
#include "samlab/spectrum.hpp"
#include "samlab/toylosses.hpp"

using namespace samlab;

namespace {

AnalyticObjective diag_quadratic3() {
    // l(w) = 0.5 w^T diag(5,2,1) w
    return AnalyticObjective(
        3,
        [](std::span<const double> w) {
            return 0.5 * (5.0 * w[0] * w[0] + 2.0 * w[1] * w[1] + w[2] * w[2]);
        },
        [](std::span<const double> w) { return GradVector{5.0 * w[0], 2.0 * w[1], w[2]}; });
}

} // namespace

TEST_CASE("spectrum of diag(5,2,1): top two eigenvalues via deflation") {
    const auto obj = diag_quadratic3();
    const ParamVector w = {0.1, -0.2, 0.3};
    const SpectrumReport report = hessian_spectrum(obj, w, 3, 100, 7);
    REQUIRE(report.eigenvalues.size() == 3);
    CHECK(report.eigenvalues[0].value == doctest::Approx(5.0).epsilon(1e-6));
    CHECK(report.eigenvalues[1].value == doctest::Approx(2.0).epsilon(1e-4));
    CHECK(report.eigenvalues[2].value == doctest::Approx(1.0).epsilon(1e-3));
    for (const auto& e : report.eigenvalues) {
        CHECK(e.converged);
        CHECK(e.iterations <= 100);
    }
    // sorted by |value| descending
    CHECK(std::abs(report.eigenvalues[0].value) >= std::abs(report.eigenvalues[1].value));
    CHECK(std::abs(report.eigenvalues[1].value) >= std::abs(report.eigenvalues[2].value));
}

TEST_CASE("every reported eigenpair satisfies the residual contract") {
    const auto obj = diag_quadratic3();
    const ParamVector w = {0.0, 0.0, 0.0};
    const SpectrumReport report = hessian_spectrum(obj, w, 2, 100, 3);
    for (const auto& e : report.eigenvalues) {
        const GradVector hv = hessian_vector_product(obj, w, e.vector);
        Vec resid = hv;
        axpy(-e.value, e.vector, resid);
        if (e.converged) CHECK(norm(resid) <= 1e-2 * std::abs(e.value) * norm(e.vector) + 1e-12);
    }
}

TEST_CASE("spectrum on a 2-parameter model matches the dense finite-difference Hessian") {
    const auto obj = *make_toy_loss("trig_bowl");
    const ParamVector w = {0.4, -0.3};
    const SpectrumReport report = hessian_spectrum(obj, w, 2, 100, 11);

    // oracle: dense 2x2 Hessian by finite differences of the gradient,
    // then the closed-form symmetric eigenvalues
    const double h = 1e-5;
    Matrix hess(2, 2);
    for (int j = 0; j < 2; ++j) {
        Vec up = w, down = w;
        up[static_cast<std::size_t>(j)] += h;
        down[static_cast<std::size_t>(j)] -= h;
        const GradVector gu = obj.gradient(up);
        const GradVector gd = obj.gradient(down);
        for (int i = 0; i < 2; ++i)
            hess.at(i, j) = (gu[static_cast<std::size_t>(i)] - gd[static_cast<std::size_t>(i)]) / (2.0 * h);
    }
    const double a = hess.at(0, 0), b = 0.5 * (hess.at(0, 1) + hess.at(1, 0)), c = hess.at(1, 1);
    const double mean = 0.5 * (a + c);
    const double r = std::sqrt(0.25 * (a - c) * (a - c) + b * b);
    const double l1 = mean + r, l2 = mean - r;
    const double top = std::abs(l1) >= std::abs(l2) ? l1 : l2;
    const double second = std::abs(l1) >= std::abs(l2) ? l2 : l1;

    CHECK(report.eigenvalues[0].value == doctest::Approx(top).epsilon(1e-4));
    CHECK(report.eigenvalues[1].value == doctest::Approx(second).epsilon(1e-3));
}

TEST_CASE("spectrum estimates are seed-robust") {
    const auto obj = diag_quadratic3();
    const ParamVector w = {0.5, 0.5, 0.5};
    const SpectrumReport a = hessian_spectrum(obj, w, 2, 100, 1);
    const SpectrumReport b = hessian_spectrum(obj, w, 2, 100, 999);
    CHECK(std::abs(a.eigenvalues[0].value - b.eigenvalues[0].value) <= 1e-4);
    CHECK(std::abs(a.eigenvalues[1].value - b.eigenvalues[1].value) <= 1e-4);
}

TEST_CASE("bruteforce inner max on a quadratic circle") {
    // l(w) = 0.5 w^T diag(1,4) w at w = 0, rho = 1: max 2 at u = (0, +/-1)
    AnalyticObjective quad(
        2, [](std::span<const double> w) { return 0.5 * (w[0] * w[0] + 4.0 * w[1] * w[1]); },
        [](std::span<const double> w) { return GradVector{w[0], 4.0 * w[1]}; });
    const InnerMaxResult result = bruteforce_inner_max(quad, {0.0, 0.0}, 1.0, 3600);
    CHECK(result.max_loss == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(std::abs(result.argmax_direction[1]) == doctest::Approx(1.0).epsilon(1e-5));
    CHECK(result.evaluations == 3600);
}

TEST_CASE("bruteforce max sandwiches the true max on closed-form losses") {
    for (const auto& name : toy_loss_names()) {
        const auto obj = make_toy_loss(name);
        const ParamVector w = {0.3, 0.2};
        const double rho = 0.8;
        const InnerMaxResult coarse = bruteforce_inner_max(*obj, w, rho, 180);
        const InnerMaxResult fine = bruteforce_inner_max(*obj, w, rho, 5400);

        // Lipschitz bound on the circle from sampled gradient norms
        double lip = 0.0;
        for (int i = 0; i < 720; ++i) {
            const double theta = 2.0 * std::numbers::pi * i / 720.0;
            const Vec u = {std::cos(theta), std::sin(theta)};
            lip = std::max(lip, norm(obj->gradient(add_scaled(w, rho, u))));
        }
        const double tol = 1.5 * lip * rho * coarse.grid_spacing / 2.0;
        CHECK(coarse.max_loss <= fine.max_loss + 1e-12);
        CHECK(fine.max_loss <= coarse.max_loss + tol);
    }
}

TEST_CASE("bruteforce on three parameters and the size guard") {
    const auto obj3 = diag_quadratic3();
    const InnerMaxResult r3 = bruteforce_inner_max(obj3, {0.0, 0.0, 0.0}, 1.0, 72);
    CHECK(r3.max_loss == doctest::Approx(2.5).epsilon(1e-2));  // 0.5 * 5 on the top axis
    CHECK(r3.evaluations == 72 * 72);

    AnalyticObjective big(
        4, [](std::span<const double> w) { return dot(w, w); },
        [](std::span<const double> w) { return scaled(w, 2.0); });
    CHECK_THROWS_AS(bruteforce_inner_max(big, {0.0, 0.0, 0.0, 0.0}, 1.0, 100), ConfigError);
}

TEST_CASE("multi-step ascent stays below the brute-force bound and beats single-step") {
    // the acceptance suite runs the full criterion; this is the smoke version
    const auto obj = make_toy_loss("rosenbrock");
    const ParamVector w = {-0.4, 0.6};
    const double rho = 0.5;

    AscentConfig c1;
    c1.rho = rho;
    c1.steps = 1;
    AscentConfig c10 = c1;
    c10.steps = 10;
    const AscentTrajectory t1 = ascent_multi(*obj, w, c1);
    const AscentTrajectory t10 = ascent_multi(*obj, w, c10);
    const double l1 = obj->value(t1.final_perturbed);
    const double l10 = obj->value(t10.final_perturbed);
    const InnerMaxResult oracle = bruteforce_inner_max(*obj, w, rho, 3600);

    double lip = 0.0;
    for (int i = 0; i < 720; ++i) {
        const double theta = 2.0 * std::numbers::pi * i / 720.0;
        lip = std::max(lip, norm(obj->gradient(add_scaled(w, rho, Vec{std::cos(theta), std::sin(theta)}))));
    }
    const double tol = 1.5 * lip * rho * oracle.grid_spacing / 2.0;

    CHECK(l10 >= l1);
    CHECK(l1 <= oracle.max_loss + tol);
    CHECK(l10 <= oracle.max_loss + tol);
}
