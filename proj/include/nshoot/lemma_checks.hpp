#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "nshoot/integrate.hpp"
#include "nshoot/thresholds.hpp"

namespace nshoot {

// Parameters feeding the per-lemma hypothesis sets. Usually taken from a
// threshold certificate via lemma_params_from().
struct LemmaParams {
    // first hump (2.1 / 2.2)
    double kappa0 = 0.8, kappa1 = 0.4, t1 = 0.0, gamma1 = 0.0;
    double lambda_left = 0.0;   // threshold the 2.2 draws must exceed
    // last hump (2.4 / 2.5)
    double kappa3 = 0.4, kappaT = 0.8, t3 = 0.0, gamma3 = 0.0;
    double lambda_right = 0.0;  // threshold the 2.5 draws must exceed
    // middle hump (2.6 / 2.7)
    double kappa2 = 0.0, kappa_sigma = 0.0, t2 = 0.0, omega = 0.0, omega_sigma = 0.0;
    double mu_threshold = 0.0;  // threshold the 2.7 draws must exceed
    // small-amplitude angle (ang)
    double nu = 0.5;
    double lambda = 25.0;       // scale in force for 2.1 / ang / 2.4 / 2.6
    double mu = 500.0;
};

struct LemmaCase {
    std::string lemma;
    std::uint64_t trial = 0;
    std::vector<std::pair<std::string, double>> draws;
    bool pass = false;
    double margin = 0.0;   // smallest slack across the asserted inequalities
    PlanarState witness;   // state at which the conclusion was evaluated
};

inline LemmaParams lemma_params_from(const ThresholdReport& rep) {
    LemmaParams lp;
    lp.kappa0 = rep.params.kappa0;
    lp.kappa1 = rep.params.kappa1;
    lp.t1 = rep.params.t1;
    lp.gamma1 = rep.gamma1;
    lp.lambda_left = rep.lambda_star_left;
    lp.kappa3 = rep.params.kappa3;
    lp.kappaT = rep.params.kappaT;
    lp.t3 = rep.params.t3;
    lp.gamma3 = rep.gamma3;
    lp.lambda_right = rep.lambda_star_right;
    lp.kappa2 = rep.kappa2[0];
    lp.kappa_sigma = rep.kappa_sigma[0];
    lp.t2 = rep.t2[0];
    lp.omega = rep.omega[0];
    lp.omega_sigma = rep.omega_cap[0];
    lp.mu_threshold = rep.mu_components[0];
    lp.nu = rep.params.nu;
    lp.lambda = rep.lambda_eval;
    lp.mu = 1.01 * rep.mu_star;
    return lp;
}

namespace detail {

inline void require(bool ok, const std::string& inequality) {
    if (!ok) throw domain_error("lemma precondition violated: " + inequality);
}

} // namespace detail

// Numerically check one lemma's conclusion on `trials` random admissible inputs.
// Slack tolerance 1e-9 on every asserted inequality. Draw values are recorded
// so any case can be replayed from (seed, trial index).
inline std::vector<LemmaCase> check_lemma(const std::string& lemma_id, const ProblemDef& base,
                                          const LemmaParams& lp, std::size_t trials,
                                          std::uint64_t seed, const SolveOptions& solve = {}) {
    const double tol = 1e-9;
    const double sigma = base.sigma(), tau = base.tau(), T = base.t_end(), t0 = base.t_begin();
    std::vector<LemmaCase> out(trials);

    // preconditions, named after the inequality that fails
    if (lemma_id == "2.1") {
        detail::require(lp.kappa1 > 0.0 && lp.kappa1 < 1.0, "0 < kappa1 < 1");
        detail::require(lp.t1 > t0 && lp.t1 < sigma, "t0 < t1 < sigma");
        detail::require(lp.gamma1 >= lp.kappa1 / (sigma - lp.t1), "gamma1 >= kappa1/(sigma - t1)");
    } else if (lemma_id == "2.2") {
        detail::require(0.0 < lp.kappa1 && lp.kappa1 < lp.kappa0 && lp.kappa0 < 1.0,
                        "0 < kappa1 < kappa0 < 1");
        detail::require(lp.t1 > t0 && lp.t1 < sigma, "t0 < t1 < sigma");
        detail::require(lp.gamma1 > 0.0 && lp.gamma1 <= (lp.kappa0 - lp.kappa1) / (lp.t1 - t0) + 1e-12,
                        "0 < gamma1 <= (kappa0 - kappa1)/t1");
        detail::require(lp.lambda_left > 0.0, "lambda threshold > 0");
    } else if (lemma_id == "ang") {
        detail::require(lp.nu > 0.0 && lp.nu < std::numbers::pi / 2.0, "nu in ]0, pi/2[");
        detail::require(lp.kappa1 > 0.0 && lp.kappa1 < 1.0, "0 < kappa1 < 1");
        detail::require(lp.lambda > 0.0, "lambda > 0");
    } else if (lemma_id == "2.4") {
        detail::require(lp.kappa3 > 0.0 && lp.kappa3 < 1.0, "0 < kappa3 < 1");
        detail::require(lp.t3 > tau && lp.t3 < T, "tau < t3 < T");
        detail::require(lp.gamma3 >= lp.kappa3 / (lp.t3 - tau), "gamma3 >= kappa3/(t3 - tau)");
    } else if (lemma_id == "2.5") {
        detail::require(0.0 < lp.kappa3 && lp.kappa3 < lp.kappaT && lp.kappaT < 1.0,
                        "0 < kappa3 < kappaT < 1");
        detail::require(lp.t3 > tau && lp.t3 < T, "tau < t3 < T");
        detail::require(lp.gamma3 > 0.0 && lp.gamma3 <= (lp.kappaT - lp.kappa3) / (T - lp.t3) + 1e-12,
                        "0 < gamma3 <= (kappaT - kappa3)/(T - t3)");
        detail::require(lp.lambda_right > 0.0, "lambda threshold > 0");
    } else if (lemma_id == "2.6") {
        detail::require(lp.kappa2 > 0.0 && lp.kappa2 < 1.0, "0 < kappa2 < 1");
        detail::require(lp.t2 > sigma && lp.t2 < tau, "sigma < t2 < tau");
        detail::require(lp.omega >= (1.0 - lp.kappa2) / (tau - lp.t2) - 1e-12,
                        "omega >= (1 - kappa2)/(tau - t2)");
    } else if (lemma_id == "2.7") {
        detail::require(0.0 < lp.kappa_sigma && lp.kappa_sigma < lp.kappa2 && lp.kappa2 < 1.0,
                        "0 < kappa_sigma < kappa2 < 1");
        detail::require(lp.omega_sigma > 0.0, "omega_sigma > 0");
        detail::require(lp.t2 > sigma &&
                            lp.t2 <= std::min(sigma + lp.kappa_sigma / (2.0 * lp.omega_sigma), tau) + 1e-12,
                        "sigma < t2 <= min(sigma + kappa_sigma/(2 omega_sigma), tau)");
        detail::require(lp.omega > 0.0 && lp.omega <= (lp.kappa2 - lp.kappa_sigma) / (lp.t2 - sigma) + 1e-12,
                        "0 < omega <= (kappa2 - kappa_sigma)/(t2 - sigma)");
        detail::require(lp.mu_threshold > 0.0, "mu threshold > 0");
    } else {
        throw domain_error("unknown lemma id: " + lemma_id);
    }

    for (std::size_t k = 0; k < trials; ++k) {
        Rng rng = Rng(seed).fork(k);
        LemmaCase c;
        c.lemma = lemma_id;
        c.trial = k;
        const auto draw = [&](const std::string& name, double lo, double hi) {
            const double v = rng.uniform(lo, hi);
            c.draws.emplace_back(name, v);
            return v;
        };
        const auto conclude = [&](std::initializer_list<double> slacks, const PlanarState& s) {
            double m = std::numeric_limits<double>::infinity();
            for (double v : slacks) m = std::min(m, v);
            c.margin = m;
            c.witness = s;
            c.pass = m >= -tol;
        };

        if (lemma_id == "2.1") {
            const double x1 = draw("x(t1)", lp.kappa1 - 1.0, lp.kappa1);
            const double y1 = draw("y(t1)", -lp.gamma1 - 2.0, -lp.gamma1);
            const PlanarState end = poincare(base, lp.t1, sigma, {x1, y1}, solve);
            conclude({0.0 - end.x, -lp.gamma1 - end.y}, end);
        } else if (lemma_id == "2.2") {
            const double lambda = lp.lambda_left * (1.0 + draw("lambda/threshold - 1", 0.001, 3.0));
            const ProblemDef p = base.with_parameters(lambda, base.mu);
            const PlanarState end = poincare(p, t0, lp.t1, {lp.kappa0, 0.0}, solve);
            conclude({lp.kappa1 - end.x, -lp.gamma1 - end.y}, end);
        } else if (lemma_id == "ang") {
            const double eps_hi = epsilon_hat(lp.lambda, lp.nu, base.weight.sup_pos(), sigma - t0);
            const double eps = eps_hi * draw("eps/eps_hat", 0.02, 0.98);
            const double delta = base.g.small_slope_radius(eps, lp.kappa1 * (1.0 - 1e-9));
            if (!(delta > 0.0)) {
                c.pass = false;
                c.margin = -1.0;
                out[k] = std::move(c);
                continue;
            }
            const double kappa = rng.log_uniform(1e-6 * delta, delta);
            c.draws.emplace_back("kappa", kappa);
            const ProblemDef p = base.with_parameters(lp.lambda, base.mu);
            const Trajectory tr = integrate(p, t0, sigma, {kappa, 0.0}, solve);
            double worst = std::numeric_limits<double>::infinity();
            PlanarState at{kappa, 0.0};
            for (int j = 0; j <= 1000; ++j) {
                const double t = t0 + (sigma - t0) * static_cast<double>(j) / 1000.0;
                const PlanarState s = tr.eval(t);
                const double ang = std::atan2(s.y, s.x);
                const double slack = std::min(ang - (-lp.nu), 0.0 - ang);
                if (slack < worst) {
                    worst = slack;
                    at = s;
                }
            }
            conclude({worst}, at);
        } else if (lemma_id == "2.4") {
            const double x3 = draw("x(t3)", lp.kappa3 - 1.0, lp.kappa3);
            const double y3 = draw("y(t3)", lp.gamma3, lp.gamma3 + 2.0);
            const PlanarState end = poincare(base, lp.t3, tau, {x3, y3}, solve);
            conclude({0.0 - end.x, end.y - lp.gamma3}, end);
        } else if (lemma_id == "2.5") {
            const double lambda = lp.lambda_right * (1.0 + draw("lambda/threshold - 1", 0.001, 3.0));
            const ProblemDef p = base.with_parameters(lambda, base.mu);
            const PlanarState end = poincare(p, T, lp.t3, {lp.kappaT, 0.0}, solve);
            conclude({lp.kappa3 - end.x, end.y - lp.gamma3}, end);
        } else if (lemma_id == "2.6") {
            const double mu = lp.mu * draw("mu scale", 0.5, 2.0);
            const double x2 = draw("x(t2)", lp.kappa2, lp.kappa2 + 0.5);
            const double y2 = draw("y(t2)", lp.omega, lp.omega + 2.0);
            const ProblemDef p = base.with_parameters(base.lambda, mu);
            const PlanarState end = poincare(p, lp.t2, tau, {x2, y2}, solve);
            conclude({end.x - 1.0, end.y - lp.omega}, end);
        } else {  // "2.7"
            const double mu = lp.mu_threshold * (1.0 + draw("mu/threshold - 1", 0.001, 3.0));
            const double ys = draw("y(sigma)", -lp.omega_sigma, lp.omega_sigma);
            const ProblemDef p = base.with_parameters(base.lambda, mu);
            const PlanarState end = poincare(p, sigma, lp.t2, {lp.kappa_sigma, ys}, solve);
            conclude({end.x - lp.kappa2, end.y - lp.omega}, end);
        }
        out[k] = std::move(c);
    }
    return out;
}

struct LemmaSuiteResult {
    std::map<std::string, std::vector<LemmaCase>> cases;
    std::size_t failures = 0;
    std::size_t total = 0;
};

inline const std::vector<std::string>& all_lemma_ids() {
    static const std::vector<std::string> ids = {"2.1", "2.2", "ang", "2.4", "2.5", "2.6", "2.7"};
    return ids;
}

// The default randomized verification battery: every lemma against parameters
// supplied by a threshold certificate.
inline LemmaSuiteResult run_lemma_suite(const ProblemDef& base, const LemmaParams& lp,
                                        std::size_t trials, std::uint64_t seed,
                                        const SolveOptions& solve = {}, unsigned jobs = 1) {
    LemmaSuiteResult res;
    const auto& ids = all_lemma_ids();
    std::vector<std::vector<LemmaCase>> buckets(ids.size());
    parallel_for(ids.size(), jobs, [&](std::size_t i) {
        buckets[i] = check_lemma(ids[i], base, lp, trials, seed + i, solve);
    });
    for (std::size_t i = 0; i < ids.size(); ++i) {
        for (const auto& c : buckets[i]) {
            ++res.total;
            if (!c.pass) ++res.failures;
        }
        res.cases.emplace(ids[i], std::move(buckets[i]));
    }
    return res;
}

} // namespace nshoot
