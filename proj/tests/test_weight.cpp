#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "nshoot/numeric.hpp"
#include "nshoot/weight.hpp"

using namespace nshoot;

namespace {

WeightSpec example_weight() {
    return WeightSpec::constant_pieces({0.0, 0.5, 1.0, 2.0}, {1.75, -1.0, 1.0});
}

// Independent quadrature oracle: composite Simpson on a fine grid.
template <class F>
double simpson(F&& f, double a, double b, int n = 20000) {
    if (n % 2) ++n;
    const double h = (b - a) / n;
    double acc = f(a) + f(b);
    for (int i = 1; i < n; ++i) acc += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return acc * h / 3.0;
}

WeightSpec poly_weight() {
    // a(t) = (t - 0.5)(t - 1.5) * -1 on [0, 2]: positive on ]0.5, 1.5[ ... we want
    // pos/neg/pos, so flip: a(t) = (t - 0.5)(t - 1.5) = t^2 - 2t + 0.75 (local s = t)
    WeightPiece p;
    p.from = 0.0;
    p.to = 2.0;
    p.kind = PieceKind::Polynomial;
    p.poly.c = {0.75, -2.0, 1.0};
    return WeightSpec({p}, 2.0);
}

WeightSpec sampled_weight() {
    // piecewise-linear hat/valley pattern via samples
    WeightPiece p;
    p.from = 0.0;
    p.to = 3.0;
    p.kind = PieceKind::Samples;
    p.ts = {0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0};
    p.vs = {1.0, 2.0, -1.0, -2.0, -0.5, 1.5, 0.5};
    return WeightSpec({p}, 3.0);
}

} // namespace

TEST_CASE("weight evaluation on the bundled example") {
    const WeightSpec w = example_weight();
    CHECK(w.eval(0.25) == 1.75);
    CHECK(w.eval(0.75) == -1.0);
    CHECK(w.eval(1.5) == 1.0);
    // right-continuity at breakpoints, left limit at the end
    CHECK(w.eval(0.5) == -1.0);
    CHECK(w.eval(1.0) == 1.0);
    CHECK(w.eval(2.0) == 1.0);
    CHECK(w.eval(0.0) == 1.75);
    CHECK_THROWS_AS(w.eval(-0.1), domain_error);
    CHECK_THROWS_AS(w.eval(2.1), domain_error);

    const WeightSpec zero = WeightSpec::constant_pieces({0.0, 2.0}, {0.0});
    CHECK(zero.eval(0.3) == 0.0);
    CHECK(zero.eval(1.9) == 0.0);
}

TEST_CASE("weight eval is constant within each example piece") {
    const WeightSpec w = example_weight();
    for (double t : linspace(0.01, 0.49, 20)) CHECK(w.eval(t) == 1.75);
    for (double t : linspace(0.51, 0.99, 20)) CHECK(w.eval(t) == -1.0);
    for (double t : linspace(1.01, 1.99, 20)) CHECK(w.eval(t) == 1.0);
}

TEST_CASE("cumulative positive and negative parts") {
    const WeightSpec w = example_weight();
    CHECK_THAT(w.cum_pos(0.0, 0.3), Catch::Matchers::WithinAbs(0.525, 1e-14));
    CHECK_THAT(w.cum_neg(0.5, 1.0), Catch::Matchers::WithinAbs(0.5, 1e-14));
    CHECK(w.cum_pos(0.7, 0.7) == 0.0);
    CHECK(w.cum_neg(1.3, 1.3) == 0.0);
    CHECK_THROWS_AS(w.cum_pos(0.5, 0.2), domain_error);

    // spanning a sign change
    CHECK_THAT(w.cum_pos(0.25, 1.25), Catch::Matchers::WithinAbs(1.75 * 0.25 + 0.25, 1e-14));
    CHECK_THAT(w.cum_neg(0.25, 1.25), Catch::Matchers::WithinAbs(0.5, 1e-14));
}

TEST_CASE("cumulative integrals match a Simpson oracle on poly and sampled weights") {
    for (const WeightSpec& w : {poly_weight(), sampled_weight()}) {
        const double t_end = w.horizon();
        const auto pos = [&](double t) { return std::max(w.eval(t), 0.0); };
        const auto neg = [&](double t) { return std::max(-w.eval(t), 0.0); };
        for (auto [a, b] : std::vector<std::pair<double, double>>{
                 {0.0, t_end}, {0.1, 0.9}, {0.3, 0.9 * t_end}, {0.45, 0.55}}) {
            CHECK_THAT(w.cum_pos(a, b), Catch::Matchers::WithinAbs(simpson(pos, a, b), 2e-8));
            CHECK_THAT(w.cum_neg(a, b), Catch::Matchers::WithinAbs(simpson(neg, a, b), 2e-8));
        }
    }
}

TEST_CASE("cum_pos additivity and monotonicity") {
    Rng rng(42);
    for (const WeightSpec& w : {example_weight(), poly_weight(), sampled_weight()}) {
        const double t_end = w.horizon();
        for (int i = 0; i < 50; ++i) {
            double a = rng.uniform(0.0, t_end), b = rng.uniform(0.0, t_end),
                   c = rng.uniform(0.0, t_end);
            if (a > b) std::swap(a, b);
            if (b > c) std::swap(b, c);
            if (a > b) std::swap(a, b);
            const double lhs = w.cum_pos(a, b) + w.cum_pos(b, c);
            const double rhs = w.cum_pos(a, c);
            CHECK_THAT(lhs, Catch::Matchers::WithinRel(rhs, 1e-12) ||
                                Catch::Matchers::WithinAbs(rhs, 1e-14));
        }
        double prev = 0.0;
        for (double t : linspace(0.0, t_end, 200)) {
            const double v = w.cum_pos(0.0, t);
            CHECK(v >= prev - 1e-14);
            prev = v;
        }
    }
}

TEST_CASE("scaled weight evaluates lambda a+ minus mu a-") {
    Rng rng(7);
    for (const WeightSpec& w : {example_weight(), poly_weight(), sampled_weight()}) {
        const ScaledWeight sw(w, 25.0, 500.0);
        for (int i = 0; i < 100; ++i) {
            const double t = rng.uniform(0.0, w.horizon());
            const double base = w.eval(t);
            const double want = 25.0 * std::max(base, 0.0) - 500.0 * std::max(-base, 0.0);
            CHECK_THAT(sw.eval(t), Catch::Matchers::WithinAbs(want, 1e-12));
        }
    }
    CHECK_THROWS_AS(ScaledWeight(example_weight(), 0.0, 1.0), domain_error);
    CHECK_THROWS_AS(ScaledWeight(example_weight(), 1.0, -2.0), domain_error);
}

TEST_CASE("sign structure of the example weight") {
    const SignStructure s = example_weight().validate_sign_structure();
    CHECK(s.sigma == 0.5);
    CHECK(s.tau == 1.0);
    CHECK(s.t0 == 0.0);
    CHECK(s.tT == 2.0);
}

TEST_CASE("sign structure rejects fixed-sign weights") {
    const WeightSpec pos = WeightSpec::constant_pieces({0.0, 2.0}, {1.0});
    CHECK_THROWS_AS(pos.validate_sign_structure(), sign_structure_error);
    const WeightSpec neg = WeightSpec::constant_pieces({0.0, 1.0, 2.0}, {-1.0, -0.5});
    CHECK_THROWS_AS(neg.validate_sign_structure(), sign_structure_error);
    const WeightSpec flipped = WeightSpec::constant_pieces({0.0, 0.5, 1.0, 2.0}, {-1.75, 1.0, -1.0});
    CHECK_THROWS_AS(flipped.validate_sign_structure(), sign_structure_error);
}

TEST_CASE("sign structure rejects two negative humps") {
    const WeightSpec w = WeightSpec::constant_pieces({0.0, 0.4, 0.8, 1.2, 1.6, 2.0},
                                                     {1.0, -1.0, 1.0, -1.0, 1.0});
    CHECK_THROWS_AS(w.validate_sign_structure(), unsupported_structure_error);
}

TEST_CASE("initial zero interval is reported as effective left endpoint") {
    const WeightSpec w = WeightSpec::constant_pieces({0.0, 0.2, 0.7, 1.2, 2.2},
                                                     {0.0, 1.75, -1.0, 1.0});
    const SignStructure s = w.validate_sign_structure();
    CHECK(s.t0 == 0.2);
    CHECK(s.sigma == 0.7);
    CHECK(s.tau == 1.2);

    // oracle: integral positivity on a fine grid
    for (double t : linspace(0.0, s.t0, 64)) CHECK(w.cum_pos(0.0, t) + w.cum_neg(0.0, t) == 0.0);
    for (double t : linspace(s.t0 + 1e-6, s.sigma, 64)) CHECK(w.cum_pos(s.t0, t) > 0.0);
    for (double t : linspace(s.sigma + 1e-6, s.tau, 64)) CHECK(w.cum_neg(s.sigma, t) > 0.0);
}

TEST_CASE("poly weight sign structure is found from polynomial roots") {
    // (t - 0.5)(t - 1.5): positive, negative, positive on [0, 2]
    WeightPiece p;
    p.from = 0.0;
    p.to = 2.0;
    p.kind = PieceKind::Polynomial;
    p.poly.c = {0.75, -2.0, 1.0};
    const WeightSpec w({p}, 2.0);
    const SignStructure s = w.validate_sign_structure();
    CHECK_THAT(s.sigma, Catch::Matchers::WithinAbs(0.5, 1e-9));
    CHECK_THAT(s.tau, Catch::Matchers::WithinAbs(1.5, 1e-9));
}

TEST_CASE("iterated weight integrals have exact closed forms") {
    const WeightSpec w = example_weight();
    // integral over [0, t1] of A+(0, xi) = 1.75 xi: 1.75 t1^2 / 2
    CHECK_THAT(w.iter_pos_from(0.0, 0.0, 0.25), Catch::Matchers::WithinRel(0.0546875, 1e-13));
    // integral over [t3, T] of A+(xi, T) = (2 - xi) on the third hump
    CHECK_THAT(w.iter_pos_to(2.0, 1.75, 2.0), Catch::Matchers::WithinRel(0.03125, 1e-13));
    // integral over [sigma, t2] of A-(sigma, xi) = (xi - sigma)
    const double t2 = 0.6;
    CHECK_THAT(w.iter_neg_from(0.5, 0.5, t2), Catch::Matchers::WithinRel(0.005, 1e-13));

    // Simpson oracle on the poly weight
    const WeightSpec pw = poly_weight();
    const auto apos = [&](double xi) { return pw.cum_pos(0.0, xi); };
    CHECK_THAT(pw.iter_pos_from(0.0, 0.0, 1.2),
               Catch::Matchers::WithinAbs(simpson(apos, 0.0, 1.2), 1e-9));
    const auto aneg = [&](double xi) { return pw.cum_neg(0.5, xi); };
    CHECK_THAT(pw.iter_neg_from(0.5, 0.5, 1.4),
               Catch::Matchers::WithinAbs(simpson(aneg, 0.5, 1.4), 1e-9));
    const auto apos_to = [&](double xi) { return pw.cum_pos(xi, 2.0); };
    CHECK_THAT(pw.iter_pos_to(2.0, 1.6, 2.0),
               Catch::Matchers::WithinAbs(simpson(apos_to, 1.6, 2.0), 1e-9));
}

TEST_CASE("sup of the positive part") {
    CHECK(example_weight().sup_pos() == 1.75);
    CHECK_THAT(sampled_weight().sup_pos(), Catch::Matchers::WithinAbs(2.0, 1e-12));
    // poly weight: max of (t-0.5)(t-1.5) on [0,2] is at the ends: 0.75
    CHECK_THAT(poly_weight().sup_pos(), Catch::Matchers::WithinAbs(0.75, 1e-9));
}

TEST_CASE("malformed piece lists are rejected") {
    CHECK_THROWS_AS(WeightSpec::constant_pieces({0.0, 0.5, 0.4}, {1.0, -1.0}), domain_error);
    std::vector<WeightPiece> gap(2);
    gap[0].from = 0.0;
    gap[0].to = 0.5;
    gap[0].poly.c = {1.0};
    gap[1].from = 0.6;
    gap[1].to = 2.0;
    gap[1].poly.c = {-1.0};
    CHECK_THROWS_AS(WeightSpec(gap, 2.0), domain_error);
}
