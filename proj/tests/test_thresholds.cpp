#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "nshoot/shooting.hpp"
#include "nshoot/thresholds.hpp"

using namespace nshoot;

namespace {

WeightSpec example_weight() {
    return WeightSpec::constant_pieces({0.0, 0.5, 1.0, 2.0}, {1.75, -1.0, 1.0});
}

// mirror of the example weight under t -> 2 - t
WeightSpec mirrored_weight() {
    return WeightSpec::constant_pieces({0.0, 1.0, 1.5, 2.0}, {1.0, -1.0, 1.75});
}

} // namespace

TEST_CASE("lambda threshold for the first hump") {
    const WeightSpec w = example_weight();
    const Nonlinearity g = Nonlinearity::logistic2();

    // analytic oracle: inner integral 1.75 t1^2/2, g_*(0.4, 0.8) = g(0.4) = 0.096
    const double inner = 1.75 * 0.25 * 0.25 / 2.0;
    const double oracle = (0.8 - 0.4) / (0.096 * inner);
    CHECK_THAT(oracle, Catch::Matchers::WithinRel(76.19047619047619, 1e-12));
    CHECK_THAT(lambda_star_left(w, g, 0.8, 0.4, 0.25), Catch::Matchers::WithinRel(oracle, 1e-12));

    // numerator vanishes while the denominator stays bounded away from zero
    CHECK(lambda_star_left(w, g, 0.4001, 0.4, 0.25) < 0.1);

    // weight identically zero up to t1: infeasible
    const WeightSpec shifted =
        WeightSpec::constant_pieces({0.0, 0.2, 0.7, 1.2, 2.2}, {0.0, 1.75, -1.0, 1.0});
    CHECK_THROWS_AS(lambda_star_left(shifted, g, 0.8, 0.4, 0.1), infeasible_error);

    CHECK_THROWS_AS(lambda_star_left(w, g, 0.4, 0.8, 0.25), domain_error);
    CHECK_THROWS_AS(lambda_star_left(w, g, 0.8, 0.4, 0.6), domain_error);
}

TEST_CASE("lambda threshold for the last hump") {
    const WeightSpec w = example_weight();
    const Nonlinearity g = Nonlinearity::logistic2();

    // analytic oracle: A+(xi, 2) = 2 - xi on the third hump, integral 0.03125
    const double oracle = 0.4 / (0.096 * 0.03125);
    CHECK_THAT(oracle, Catch::Matchers::WithinRel(400.0 / 3.0, 1e-12));
    CHECK_THAT(lambda_star_right(w, g, 0.4, 0.8, 1.75), Catch::Matchers::WithinRel(oracle, 1e-12));

    // mirrored weight and mirrored parameters reproduce the left threshold
    CHECK_THAT(lambda_star_right(mirrored_weight(), g, 0.4, 0.8, 2.0 - 0.25),
               Catch::Matchers::WithinRel(lambda_star_left(w, g, 0.8, 0.4, 0.25), 1e-12));

    const WeightSpec tail_zero =
        WeightSpec::constant_pieces({0.0, 0.5, 1.0, 1.8, 2.0}, {1.75, -1.0, 1.0, 0.0});
    CHECK_THROWS_AS(lambda_star_right(tail_zero, g, 0.4, 0.8, 1.9), infeasible_error);
}

TEST_CASE("threshold monotonicity ladders") {
    const WeightSpec w = example_weight();
    const Nonlinearity g = Nonlinearity::logistic2();
    double prev = std::numeric_limits<double>::infinity();
    for (double t1 : {0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45}) {
        const double v = lambda_star_left(w, g, 0.8, 0.4, t1);
        CHECK(v < prev);
        prev = v;
    }
    // halving g doubles the threshold (g_* enters the denominator)
    const Nonlinearity half =
        Nonlinearity::custom([](double s) { return 0.5 * s * s * (1.0 - s); }, 0.5, "half");
    CHECK_THAT(lambda_star_left(w, half, 0.8, 0.4, 0.25),
               Catch::Matchers::WithinRel(2.0 * lambda_star_left(w, g, 0.8, 0.4, 0.25), 1e-9));
}

TEST_CASE("omega_sigma formula") {
    const WeightSpec w = example_weight();
    const Nonlinearity g = Nonlinearity::logistic2();
    const double ls = 400.0 / 3.0;
    // A+(0, sigma) = 0.875, max g = 4/27
    CHECK_THAT(omega_sigma(w, g, ls), Catch::Matchers::WithinRel(11200.0 / 648.0, 1e-9));
    CHECK_THAT(omega_sigma(w, g, 2.0 * ls),
               Catch::Matchers::WithinRel(2.0 * omega_sigma(w, g, ls), 1e-12));
    const Nonlinearity zero = Nonlinearity::custom([](double) { return 0.0; }, 0.0, "zero");
    CHECK(omega_sigma(w, zero, ls) == 0.0);
    CHECK_THROWS_AS(omega_sigma(w, g, 0.0), domain_error);
}

TEST_CASE("mu threshold for the middle hump") {
    const WeightSpec w = example_weight();
    const Nonlinearity g = Nonlinearity::logistic2();

    // pinned analytic oracle at kappa_sigma = 0.2, kappa2 = 0.6,
    // omega_sigma = 1400/81 (from lambda* = 400/3):
    // t2 - sigma = kappa_sigma/(2 omega_sigma) = 81/14000, numerator = 0.5 exactly,
    // g_*(0.1, 0.6) = 0.009, inner integral (81/14000)^2/2
    const double os = 1400.0 / 81.0;
    const double dt = 81.0 / 14000.0;
    const double t2 = 0.5 + dt;
    const double oracle = (0.6 - 0.2 + dt * os) / (0.009 * dt * dt / 2.0);
    CHECK_THAT(oracle, Catch::Matchers::WithinRel(3319277.2104523364, 1e-9));
    CHECK_THAT(mu_star(w, g, 0.6, 0.2, t2, os), Catch::Matchers::WithinRel(oracle, 1e-12));

    // vanishing omega_sigma leaves the pure crossing cost
    const double tame = mu_star(w, g, 0.6, 0.2, 0.6, 1e-12);
    CHECK_THAT(tame, Catch::Matchers::WithinRel(0.4 / (0.009 * 0.1 * 0.1 / 2.0), 1e-6));

    CHECK_THROWS_AS(mu_star(w, g, 0.6, 0.2, 0.5, os), infeasible_error);       // t2 = sigma
    CHECK_THROWS_AS(mu_star(w, g, 0.6, 0.2, 0.9, os), infeasible_error);       // beyond the window
    CHECK_THROWS_AS(mu_star(w, g, 0.2, 0.6, t2, os), domain_error);            // kappa order
}

TEST_CASE("largest admissible epsilon for the angle bound") {
    // lambda |a+| = 43.75, sigma = 0.5, nu = 0.5: the equation
    // q tan(q/2) = tan(1/2) is solved exactly by q = 1, so eps_hat = 1/43.75
    const double e = epsilon_hat(25.0, 0.5, 1.75, 0.5);
    CHECK_THAT(e, Catch::Matchers::WithinRel(1.0 / 43.75, 1e-9));

    // nu near pi/2: eps_hat approaches the tangent-domain cap pi^2/(4 sigma^2 c)
    const double cap = std::numbers::pi * std::numbers::pi / (4.0 * 0.25 * 43.75);
    CHECK_THAT(epsilon_hat(25.0, std::numbers::pi / 2.0 - 1e-6, 1.75, 0.5),
               Catch::Matchers::WithinRel(cap, 1e-2));

    // dependence is through lambda * eps only
    CHECK_THAT(epsilon_hat(50.0, 0.5, 1.75, 0.5), Catch::Matchers::WithinRel(0.5 * e, 1e-9));

    CHECK_THROWS_AS(epsilon_hat(25.0, 2.0, 1.75, 0.5), domain_error);
    CHECK_THROWS_AS(epsilon_hat(-1.0, 0.5, 1.75, 0.5), domain_error);
}

TEST_CASE("threshold conclusions hold under direct integration") {
    const WeightSpec w = example_weight();
    const Nonlinearity g = Nonlinearity::logistic2();

    // first hump: from (kappa0, 0), x(t1) < kappa1 and y(t1) < -gamma1
    {
        const double ls = lambda_star_left(w, g, 0.8, 0.4, 0.25);
        const double gamma1 = (0.8 - 0.4) / 0.25;
        const ProblemDef p = example_problem(1.01 * ls, 500.0);
        const PlanarState s = poincare(p, 0.0, 0.25, {0.8, 0.0});
        CHECK(s.x < 0.4);
        CHECK(s.y < -gamma1);
    }
    // last hump: from (kappaT, 0) at T backward, x(t3) < kappa3 and y(t3) > gamma3
    {
        const double ls = lambda_star_right(w, g, 0.4, 0.8, 1.75);
        const double gamma3 = (0.8 - 0.4) / 0.25;
        const ProblemDef p = example_problem(1.01 * ls, 500.0);
        const PlanarState s = poincare(p, 2.0, 1.75, {0.8, 0.0});
        CHECK(s.x < 0.4);
        CHECK(s.y > gamma3);
    }
    // middle hump: from (kappa_sigma, y0 >= -omega_sigma), x(t2) > kappa2, y(t2) > omega
    {
        const double os = 1400.0 / 81.0;
        const double dt = 81.0 / 14000.0;
        const double t2 = 0.5 + dt;
        const double ms = mu_star(w, g, 0.6, 0.2, t2, os);
        const double omega = (0.6 - 0.2) / dt;
        const ProblemDef p = example_problem(25.0, 1.01 * ms);
        for (double y0 : {-os, -0.5 * os, 0.0}) {
            const PlanarState s = poincare(p, 0.5, t2, {0.2, y0});
            CHECK(s.x > 0.6);
            CHECK(s.y > omega);
        }
    }
}

TEST_CASE("automatic certificate on the example") {
    const WeightSpec w = example_weight();
    const Nonlinearity g = Nonlinearity::logistic2();
    const ThresholdReport rep = certify(w, g);

    REQUIRE(rep.feasible);
    CHECK(rep.auto_mode);
    CHECK(rep.sigma == 0.5);
    CHECK(rep.tau == 1.0);
    // the empirical multiplicity point sits far below the certificate
    CHECK(rep.lambda_star > 25.0);
    CHECK(rep.lambda_star_left > rep.lambda_star_right);
    CHECK(rep.lambda_star > 60.0);
    CHECK(rep.lambda_star < 90.0);
    CHECK(rep.lambda_eval > rep.lambda_star);
    CHECK(rep.mu_star > 500.0);
    CHECK(rep.mu_star < 1e8);
    CHECK(rep.omega_sigma > 0.0);
    CHECK(rep.r1 > 0.0);
    CHECK(rep.r1 < rep.params.kappa0);
    CHECK(rep.l1 > rep.params.kappa0);
    CHECK(rep.l1 < 1.0);
    CHECK(rep.params.p1 < rep.r1);
    CHECK(rep.params.p2 > rep.l1);
    for (int i = 0; i < 2; ++i) {
        CHECK(rep.kappa_sigma[i] > 0.0);
        CHECK(rep.kappa_sigma[i] < 1.0);
        CHECK(rep.t2[i] > rep.sigma);
        CHECK(rep.t2[i] < rep.tau);
        CHECK(rep.mu_components[i] > 0.0);
        // the bound actually used dominates the computed arrival velocity
        CHECK(rep.omega_cap[i] >= -rep.y_sigma[i]);
    }
    CHECK(rep.mu_star == std::max(rep.mu_components[0], rep.mu_components[1]));
    CHECK(rep.epsilon_hat > 0.0);
    CHECK(rep.delta_eps > 0.0);
    CHECK_FALSE(rep.delta_eps_heuristic);

    // reproducibility: bit-identical report on a second run
    const ThresholdReport rep2 = certify(w, g);
    CHECK(rep2.lambda_star == rep.lambda_star);
    CHECK(rep2.lambda_eval == rep.lambda_eval);
    CHECK(rep2.mu_star == rep.mu_star);
    CHECK(rep2.omega_sigma == rep.omega_sigma);
    CHECK(rep2.r1 == rep.r1);
    CHECK(rep2.l1 == rep.l1);
    for (int i = 0; i < 2; ++i) {
        CHECK(rep2.kappa_sigma[i] == rep.kappa_sigma[i]);
        CHECK(rep2.t2[i] == rep.t2[i]);
        CHECK(rep2.mu_components[i] == rep.mu_components[i]);
    }
}

TEST_CASE("manual certificate parameters are validated") {
    const WeightSpec w = example_weight();
    const Nonlinearity g = Nonlinearity::logistic2();
    CertifyOptions opts;
    ThresholdParams prm;
    prm.kappa0 = 0.4;
    prm.kappa1 = 0.8;  // out of order
    opts.params = prm;
    CHECK_THROWS_AS(certify(w, g, opts), domain_error);

    prm = ThresholdParams{};
    prm.nu = 3.0;
    opts.params = prm;
    CHECK_THROWS_AS(certify(w, g, opts), domain_error);

    // defaults fill t1/t3/p/kappa2 and produce a finite certificate; the left
    // threshold with t1 = 0.9 * 0.25 pins the whole certificate analytically
    opts.params = ThresholdParams{};
    const ThresholdReport rep = certify(w, g, opts);
    CHECK(rep.feasible);
    CHECK_FALSE(rep.auto_mode);
    const double left = 0.4 / (0.096 * (1.75 * 0.225 * 0.225 / 2.0));
    CHECK_THAT(rep.lambda_star, Catch::Matchers::WithinRel(left, 1e-12));
}

TEST_CASE("certificate consumed end-to-end yields at least three solutions") {
    const WeightSpec w = example_weight();
    const Nonlinearity g = Nonlinearity::logistic2();
    const ThresholdReport rep = certify(w, g);
    REQUIRE(rep.feasible);

    const ProblemDef p = example_problem(rep.lambda_eval, 1.01 * rep.mu_star);
    const FindReport fr = find_solutions(p);
    CHECK(fr.solutions.size() >= 3);
    for (const auto& s : fr.solutions) {
        CHECK(s.min_u > 0.0);
        CHECK(s.max_u < 1.0);
        CHECK(s.residual_left <= 1e-8);
        CHECK(s.residual_right <= 1e-8);
    }

    // the three wall-to-wall sub-continua of the certified regime
    ContinuumOptions co;
    co.focus = PhaseBox{-0.6, 1.6, -(rep.omega_sigma + 2.0), 1e30};
    co.xi_budget = 60000;
    const Continuum fwd = build_continuum(p, ShootDirection::ForwardFromStart, co);
    CHECK(wall_traversals(fwd) >= 3);
}

TEST_CASE("certificate respects an initial dead interval") {
    // weight vanishing on [0, 0.2]: thresholds must place t1 beyond it
    const WeightSpec w =
        WeightSpec::constant_pieces({0.0, 0.2, 0.7, 1.2, 2.2}, {0.0, 1.75, -1.0, 1.0});
    const Nonlinearity g = Nonlinearity::logistic2();
    const ThresholdReport rep = certify(w, g);
    CHECK(rep.feasible);
    CHECK(rep.t0 == 0.2);
    CHECK(rep.params.t1 > 0.2);
    CHECK(rep.params.t1 < rep.sigma);
}
