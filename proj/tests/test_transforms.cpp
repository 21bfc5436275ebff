#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "nshoot/numeric.hpp"
#include "nshoot/shooting.hpp"
#include "nshoot/transforms.hpp"

using namespace nshoot;

namespace {

// Radial spec on [1, e] whose reduction has the familiar 0.25 / 0.5 / 1 markers.
RadialSpec unit_annulus() {
    RadialSpec rs;
    rs.dimension = 2;
    rs.r_inner = 1.0;
    rs.r_outer = std::exp(1.0);
    rs.weight = WeightSpec::constant_pieces(
        {1.0, std::exp(0.25), std::exp(0.5), std::exp(1.0)}, {1.75, -1.0, 1.0});
    return rs;
}

// Radial spec whose reduced problem is exactly the bundled example: W(r) =
// a(ln(r/R_i))/r^2 on [R_i, R_i e^2], given here as a dense sample table.
RadialSpec example_annulus(double r_inner = 100.0, std::size_t samples = 8192) {
    const WeightSpec base = WeightSpec::constant_pieces({0.0, 0.5, 1.0, 2.0}, {1.75, -1.0, 1.0});
    RadialSpec rs;
    rs.dimension = 2;
    rs.r_inner = r_inner;
    rs.r_outer = r_inner * std::exp(2.0);
    WeightPiece p;
    p.from = rs.r_inner;
    p.to = rs.r_outer;
    p.kind = PieceKind::Samples;
    for (std::size_t k = 0; k <= samples; ++k) {
        const double r =
            rs.r_inner + (rs.r_outer - rs.r_inner) * static_cast<double>(k) / samples;
        p.ts.push_back(r);
        p.vs.push_back(base.eval(std::log(r / rs.r_inner)) / (r * r));
    }
    rs.weight = WeightSpec({p}, rs.r_outer, rs.r_inner);
    return rs;
}

} // namespace

TEST_CASE("radial reduction closed forms") {
    const RadialReduction red = radial_reduce(unit_annulus());
    CHECK_THAT(red.maps.T, Catch::Matchers::WithinAbs(1.0, 1e-14));
    for (double r : linspace(1.0, std::exp(1.0), 17))
        CHECK_THAT(red.maps.h(r), Catch::Matchers::WithinAbs(std::log(r), 1e-13));

    RadialSpec rs3;
    rs3.dimension = 3;
    rs3.r_inner = 1.0;
    rs3.r_outer = 2.0;
    rs3.weight = WeightSpec::constant_pieces({1.0, 1.3, 1.6, 2.0}, {1.0, -1.0, 1.0});
    const RadialReduction red3 = radial_reduce(rs3);
    CHECK_THAT(red3.maps.T, Catch::Matchers::WithinAbs(0.5, 1e-14));

    RadialSpec bad = unit_annulus();
    bad.dimension = 1;
    CHECK_THROWS_AS(radial_reduce(bad), domain_error);
    bad = unit_annulus();
    bad.r_inner = -1.0;
    CHECK_THROWS_AS(radial_reduce(bad), domain_error);
}

TEST_CASE("radius map round trip") {
    for (int N : {2, 3, 5}) {
        RadialMaps maps;
        maps.N = N;
        maps.r_inner = 1.0;
        maps.r_outer = std::exp(1.0);
        maps.T = maps.h(maps.r_outer);
        for (double r : linspace(1.0, maps.r_outer, 100))
            CHECK_THAT(maps.h_inv(maps.h(r)), Catch::Matchers::WithinAbs(r, 1e-10));
    }
}

TEST_CASE("reduction preserves the sign structure") {
    const RadialSpec rs = unit_annulus();
    const RadialReduction red = radial_reduce(rs);
    CHECK_THAT(red.marks.sigma, Catch::Matchers::WithinAbs(0.25, 1e-3));
    CHECK_THAT(red.marks.tau, Catch::Matchers::WithinAbs(0.5, 1e-3));
    for (double t : linspace(1e-3, red.maps.T - 1e-3, 257)) {
        const double a = red.reduced.eval(t);
        const double wv = rs.weight.eval(red.maps.h_inv(t));
        if (std::abs(wv) > 0.2)  // away from the jump smears
            CHECK(a * wv > 0.0);
    }
}

TEST_CASE("trivial solutions lift exactly") {
    RadialSpec rs3;
    rs3.dimension = 3;
    rs3.r_inner = 1.0;
    rs3.r_outer = 2.0;
    rs3.weight = WeightSpec::constant_pieces({1.0, 1.3, 1.6, 2.0}, {1.0, -1.0, 1.0});
    for (const RadialSpec& rs : {unit_annulus(), rs3}) {
        const RadialReduction red = radial_reduce(rs);
        const ProblemDef p = make_problem(red.reduced, Nonlinearity::logistic2(), 25.0, 500.0);
        for (double x0 : {0.0, 1.0}) {
            const Trajectory tr = integrate(p, 0.0, red.maps.T, {x0, 0.0});
            const RadialLift lift = radial_lift(tr, p, rs, red.maps, 400);
            CHECK(lift.max_interior_residual == 0.0);
            CHECK(lift.boundary_residual_inner == 0.0);
            CHECK(lift.boundary_residual_outer == 0.0);
            for (double u : lift.u) CHECK(u == x0);
        }
    }
}

TEST_CASE("a solved reduced instance lifts with small residual") {
    const RadialSpec rs = example_annulus();
    const RadialReduction red = radial_reduce(rs);
    CHECK_THAT(red.maps.T, Catch::Matchers::WithinAbs(2.0, 1e-12));
    CHECK_THAT(red.marks.sigma, Catch::Matchers::WithinAbs(0.5, 5e-3));
    CHECK_THAT(red.marks.tau, Catch::Matchers::WithinAbs(1.0, 5e-3));

    const ProblemDef p = make_problem(red.reduced, Nonlinearity::logistic2(), 25.0, 500.0);
    const FindReport fr = find_solutions(p);
    REQUIRE(fr.solutions.size() >= 3);

    const RadialLift lift = radial_lift(fr.solutions[1].trajectory, p, rs, red.maps, 1000);
    CAPTURE(lift.max_interior_residual, lift.excluded_stencils);
    CHECK(lift.max_interior_residual <= 1e-6);
    CHECK(lift.excluded_stencils <= 8);
    CHECK(lift.boundary_residual_inner <= 1e-5);
    CHECK(lift.boundary_residual_outer <= 1e-5);
    // lifted profile stays inside the unit band
    for (double u : lift.u) {
        CHECK(u > 0.0);
        CHECK(u < 1.0);
    }
}

TEST_CASE("periodic extension of a solved trajectory") {
    const ProblemDef p = example_problem();
    IntersectionPoint seed;
    seed.xi_forward = 0.076608610399;
    seed.xi_backward = 0.9798;
    const RefineResult rr = refine(p, seed);
    REQUIRE(rr.status == RefineStatus::Converged);
    const Trajectory& u = rr.solution->trajectory;

    const PeriodicExtension ext = periodic_extend(u, 3);
    CHECK(ext.period() == 4.0);
    REQUIRE(ext.sample_times().size() == ext.sample_values().size());

    // exact evenness and periodicity on the sample grid
    const auto& sv = ext.sample_values();
    const std::size_t m = (sv.size() - 1) / (2 * ext.periods());  // nodes per half period
    for (std::size_t j = 0; j <= m; ++j) CHECK(sv[m + j] == sv[m - j]);
    for (std::size_t k = 0; k + 2 * m < sv.size(); ++k) CHECK(sv[k] == sv[k + 2 * m]);

    // the gluing is C1 up to the boundary residual
    CHECK(gluing_defect(ext) <= 1e-8);
    // the extension solves the equation with the reflected weight over a period
    CHECK(periodic_ode_residual(p, ext) <= 1e-6);

    // evenness and periodicity through the evaluator (up to fold roundoff)
    for (double s : linspace(0.01, 1.99, 23)) {
        CHECK_THAT(ext.eval(-s), Catch::Matchers::WithinAbs(ext.eval(s), 1e-12));
        CHECK_THAT(ext.eval(s + 4.0), Catch::Matchers::WithinAbs(ext.eval(s), 1e-12));
    }

    // a non-Neumann base is rejected
    const Trajectory bad = integrate(p, 0.0, 2.0, {0.3, 0.5});
    CHECK_THROWS_AS(periodic_extend(bad, 2), domain_error);
}
