#pragma once

#include "nshoot/nonlinearity.hpp"
#include "nshoot/weight.hpp"

namespace nshoot {

// A full instance of the Neumann problem u'' + (lambda a+ - mu a-) g(u) = 0.
// Built through make_problem (sign structure validated) or make_problem_any_sign
// (no structure requirement, for studies of arbitrary weights).
struct ProblemDef {
    WeightSpec weight;
    Nonlinearity g;
    double lambda = 1.0;
    double mu = 1.0;
    ScaledWeight scaled;
    SignStructure marks;
    bool validated = false;

    double t_begin() const { return weight.start(); }
    double t_end() const { return weight.horizon(); }
    double sigma() const { return marks.sigma; }
    double tau() const { return marks.tau; }

    ProblemDef with_parameters(double new_lambda, double new_mu) const {
        ProblemDef p = *this;
        p.lambda = new_lambda;
        p.mu = new_mu;
        p.scaled = ScaledWeight(p.weight, new_lambda, new_mu);
        return p;
    }
};

inline ProblemDef make_problem(WeightSpec w, Nonlinearity g, double lambda, double mu) {
    ProblemDef p;
    p.marks = w.validate_sign_structure();
    p.weight = std::move(w);
    p.g = std::move(g);
    p.lambda = lambda;
    p.mu = mu;
    p.scaled = ScaledWeight(p.weight, lambda, mu);
    p.validated = true;
    return p;
}

// No sign-structure validation; tau must be supplied by the caller (it anchors
// the matching time of the two continua). Used for fixed-sign studies.
inline ProblemDef make_problem_any_sign(WeightSpec w, Nonlinearity g, double lambda, double mu,
                                        double tau) {
    ProblemDef p;
    if (!(tau > w.start() && tau < w.horizon()))
        throw domain_error("make_problem_any_sign: tau must be interior to the domain");
    p.marks.sigma = 0.5 * (w.start() + tau);
    p.marks.tau = tau;
    p.marks.t0 = w.start();
    p.marks.tT = w.horizon();
    p.weight = std::move(w);
    p.g = std::move(g);
    p.lambda = lambda;
    p.mu = mu;
    p.scaled = ScaledWeight(p.weight, lambda, mu);
    p.validated = false;
    return p;
}

// The weight (1.75, -1, 1) on [0, 0.5] / [0.5, 1] / [1, 2] with g(s) = s^2 (1-s):
// the bundled demonstration instance. Three positive solutions appear at
// lambda = 25, mu = 500.
inline ProblemDef example_problem(double lambda = 25.0, double mu = 500.0) {
    WeightSpec w = WeightSpec::constant_pieces({0.0, 0.5, 1.0, 2.0}, {1.75, -1.0, 1.0});
    return make_problem(std::move(w), Nonlinearity::logistic2(), lambda, mu);
}

} // namespace nshoot
