#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "nshoot/integrate.hpp"
#include "nshoot/roots.hpp"

namespace nshoot {

// lambda threshold for the first hump: (k0 - k1) / ( g_*(k1,k0) * int_0^t1 A+(0,xi) dxi ).
// Above it, the trajectory from (k0, 0) satisfies x(t1) < k1 and y(t1) < -gamma1.
inline double lambda_star_left(const WeightSpec& w, const Nonlinearity& g, double kappa0,
                               double kappa1, double t1) {
    const SignStructure m = w.validate_sign_structure();
    if (!(0.0 < kappa1 && kappa1 < kappa0 && kappa0 < 1.0))
        throw domain_error("lambda_star_left: need 0 < kappa1 < kappa0 < 1");
    if (!(t1 > w.start() && t1 < m.sigma))
        throw domain_error("lambda_star_left: need t1 strictly inside the first hump span");
    const double iter = w.iter_pos_from(w.start(), w.start(), t1);
    const double gmin = g.g_min(kappa1, kappa0);
    if (!(iter > 0.0) || !(gmin > 0.0))
        throw infeasible_error("lambda_star_left: zero denominator (weight vanishes up to t1 or g_* = 0)");
    return (kappa0 - kappa1) / (gmin * iter);
}

// Mirror threshold for the last hump, with int_t3^T A+(xi, T) dxi.
inline double lambda_star_right(const WeightSpec& w, const Nonlinearity& g, double kappa3,
                                double kappaT, double t3) {
    const SignStructure m = w.validate_sign_structure();
    const double T = w.horizon();
    if (!(0.0 < kappa3 && kappa3 < kappaT && kappaT < 1.0))
        throw domain_error("lambda_star_right: need 0 < kappa3 < kappaT < 1");
    if (!(t3 > m.tau && t3 < T))
        throw domain_error("lambda_star_right: need tau < t3 < T");
    const double iter = w.iter_pos_to(T, t3, T);
    const double gmin = g.g_min(kappa3, kappaT);
    if (!(iter > 0.0) || !(gmin > 0.0))
        throw infeasible_error("lambda_star_right: zero denominator (weight vanishes after t3 or g_* = 0)");
    return (kappaT - kappa3) / (gmin * iter);
}

// omega_sigma(scale) = scale * A+(0, sigma) * max g. The bound y(sigma) >= -omega
// holds for trajectories of the system at that scale parameter, so callers pass
// the lambda actually in force.
inline double omega_sigma(const WeightSpec& w, const Nonlinearity& g, double lambda_scale) {
    if (!(lambda_scale > 0.0)) throw domain_error("omega_sigma: scale must be positive");
    const SignStructure m = w.validate_sign_structure();
    return lambda_scale * w.cum_pos(w.start(), m.sigma) * g.g_max();
}

// Step-3 upper bound on t2 given kappa_sigma, kappa2 and omega_sigma; the value
// that makes the two velocity bounds of the middle hump compatible.
inline double t2_window_cap(double sigma, double tau, double kappa_sigma, double kappa2,
                            double omega_sigma_val) {
    const double cap1 = sigma + kappa_sigma / (2.0 * omega_sigma_val);
    const double cap2 =
        (sigma * (1.0 - kappa2) + tau * (kappa2 - kappa_sigma)) / (1.0 - kappa_sigma);
    return std::min(cap1, cap2);
}

// mu threshold for the middle hump (eq for the crossing from kappa_sigma up
// through kappa2 with velocity omega).
inline double mu_star(const WeightSpec& w, const Nonlinearity& g, double kappa2,
                      double kappa_sigma, double t2, double omega_sigma_val) {
    const SignStructure m = w.validate_sign_structure();
    if (!(0.0 < kappa_sigma && kappa_sigma < kappa2 && kappa2 < 1.0))
        throw domain_error("mu_star: need 0 < kappa_sigma < kappa2 < 1");
    if (!(omega_sigma_val > 0.0)) throw domain_error("mu_star: omega_sigma must be positive");
    const double cap = t2_window_cap(m.sigma, m.tau, kappa_sigma, kappa2, omega_sigma_val);
    if (!(t2 > m.sigma) || t2 > cap + 1e-15)
        throw infeasible_error("mu_star: t2 outside the admissible window ]sigma, cap]");
    const double iter = w.iter_neg_from(m.sigma, m.sigma, t2);
    const double gmin = g.g_min(0.5 * kappa_sigma, kappa2);
    if (!(iter > 0.0) || !(gmin > 0.0))
        throw infeasible_error("mu_star: zero denominator");
    return (kappa2 - kappa_sigma + (t2 - m.sigma) * omega_sigma_val) / (gmin * iter);
}

// Largest eps such that arctan( q tan(sigma q) ) < nu holds with
// q = sqrt(lambda a_sup eps) for all smaller eps, subject to sigma q < pi/2.
inline double epsilon_hat(double lambda, double nu, double a_sup, double sigma) {
    if (!(nu > 0.0 && nu < std::numbers::pi / 2.0))
        throw domain_error("epsilon_hat: nu must lie in ]0, pi/2[");
    if (!(lambda > 0.0 && a_sup > 0.0 && sigma > 0.0))
        throw domain_error("epsilon_hat: lambda, a_sup, sigma must be positive");
    const double c = lambda * a_sup;
    const double q_cap = std::numbers::pi / (2.0 * sigma);
    // f(q) = arctan(q tan(sigma q)) increases from 0 to pi/2 on [0, q_cap[
    double lo = 0.0, hi = q_cap;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double f = std::atan(mid * std::tan(sigma * mid));
        if (f < nu) lo = mid;
        else hi = mid;
        if (hi - lo <= 1e-12 * q_cap) break;
    }
    const double q_star = lo;
    return q_star * q_star / c;
}

struct ThresholdParams {
    double kappa0 = 0.8, kappa1 = 0.4;
    double t1 = 0.0;  // 0: derive from the compatibility cap
    double kappa3 = 0.4, kappaT = 0.8;
    double t3 = 0.0;  // 0: derive from the compatibility cap
    double nu = 0.5;
    double p1 = 0.0, p2 = 0.0;          // 0: locate from the wall-hit abscissae
    double kappa2_1 = 0.0, kappa2_2 = 0.0;  // 0: midpoint of ]kappa_sigma, 1[
};

struct ThresholdReport {
    // geometry
    double sigma = 0.0, tau = 0.0, t0 = 0.0, tT = 0.0, T = 0.0;
    // parameters actually used
    ThresholdParams params;
    bool auto_mode = false;
    // lambda side
    double lambda_star_left = 0.0, lambda_star_right = 0.0, lambda_star = 0.0;
    double gamma1 = 0.0, gamma3 = 0.0;
    // mu side, evaluated at lambda_eval > lambda_star
    double lambda_eval = 0.0;
    double omega_sigma = 0.0;  // universal bound lambda A+(0,sigma) max g
    double r1 = 0.0, l1 = 0.0;
    double kappa_sigma[2] = {0.0, 0.0};
    double y_sigma[2] = {0.0, 0.0};     // computed y(sigma; p_i)
    double omega_cap[2] = {0.0, 0.0};   // bound on -y(sigma) fed to the mu formula
    double kappa2[2] = {0.0, 0.0};
    double t2[2] = {0.0, 0.0};
    double omega[2] = {0.0, 0.0};
    double mu_components[2] = {0.0, 0.0};
    double mu_star = 0.0;
    // small-amplitude angle control
    double epsilon_hat = 0.0;
    double delta_eps = 0.0;
    bool delta_eps_heuristic = false;
    // outcome
    bool feasible = false;
    std::vector<std::string> flags;
};

struct CertifyOptions {
    std::optional<ThresholdParams> params;  // absent: auto mode
    double lambda_margin = 1.01;            // lambda_eval = margin * lambda_star
    SolveOptions solve;
};

namespace detail {

// State at t = sigma of the trajectory from (xi, 0); only the first hump acts,
// so the result does not depend on mu.
inline PlanarState sigma_state(const WeightSpec& w, const Nonlinearity& g, double lambda,
                               double sigma, double xi, const SolveOptions& solve) {
    const ProblemDef p = make_problem_any_sign(w, g, lambda, 1.0, sigma);
    return integrate(p, w.start(), sigma, {xi, 0.0}, solve).back();
}

} // namespace detail

// Assemble the full sufficiency certificate: lambda_star from the two outer
// humps, then (at lambda_eval) the wall-hit abscissae r1 < l1, the Step-3
// parameters and mu_star. In auto mode the free constants are grid-searched to
// (locally) minimize the thresholds; the search is deterministic.
inline ThresholdReport certify(const WeightSpec& w, const Nonlinearity& g,
                               const CertifyOptions& opts = {}) {
    ThresholdReport rep;
    const SignStructure m = w.validate_sign_structure();
    rep.sigma = m.sigma;
    rep.tau = m.tau;
    rep.t0 = m.t0;
    rep.tT = m.tT;
    rep.T = w.horizon();
    rep.auto_mode = !opts.params.has_value();

    const auto flag = [&](const std::string& s) { rep.flags.push_back(s); };

    ThresholdParams prm = opts.params.value_or(ThresholdParams{});
    if (opts.params) {
        if (!(0.0 < prm.kappa1 && prm.kappa1 < prm.kappa0 && prm.kappa0 < 1.0))
            throw domain_error("certify: need 0 < kappa1 < kappa0 < 1");
        if (!(0.0 < prm.kappa3 && prm.kappa3 < prm.kappaT && prm.kappaT < 1.0))
            throw domain_error("certify: need 0 < kappa3 < kappaT < 1");
        if (!(prm.nu > 0.0 && prm.nu < std::numbers::pi / 2.0))
            throw domain_error("certify: need nu in ]0, pi/2[");
    }

    // --- Step 1 + Step 2 compatibility caps (t1 early, t3 late) ---
    const double s_begin = w.start();
    const auto t1_cap = [&](double k0, double k1) {
        return s_begin + (m.sigma - s_begin) * (1.0 - k1 / k0);
    };
    const auto t3_floor = [&](double k3, double kT) {
        return m.tau + (rep.T - m.tau) * k3 / kT;
    };

    if (rep.auto_mode) {
        // deterministic grid search over (kappa_outer, kappa_inner, t-fraction)
        double best_left = std::numeric_limits<double>::infinity();
        double best_right = std::numeric_limits<double>::infinity();
        const std::vector<double> outer = {0.5, 0.55, 0.6, 0.65, 0.7, 0.75, 0.8, 0.85, 0.9, 0.95};
        const std::vector<double> frac = {0.3, 0.5, 0.7, 0.9, 0.99};
        for (double k0 : outer) {
            for (int ik = 1; 0.05 * ik < k0 - 0.025; ++ik) {
                const double k1 = 0.05 * ik;
                for (double eta : frac) {
                    const double cap = t1_cap(k0, k1);
                    if (!(cap > m.t0)) continue;
                    const double t1 = m.t0 + eta * (cap - m.t0);
                    if (!(t1 > m.t0)) continue;
                    try {
                        const double v = lambda_star_left(w, g, k0, k1, t1);
                        if (v < best_left) {
                            best_left = v;
                            prm.kappa0 = k0;
                            prm.kappa1 = k1;
                            prm.t1 = t1;
                        }
                    } catch (const error&) {
                    }
                }
            }
        }
        for (double kT : outer) {
            for (int ik = 1; 0.05 * ik < kT - 0.025; ++ik) {
                const double k3 = 0.05 * ik;
                for (double eta : frac) {
                    const double floor3 = t3_floor(k3, kT);
                    if (!(floor3 < m.tT)) continue;
                    const double t3 = m.tT - eta * (m.tT - floor3);
                    try {
                        const double v = lambda_star_right(w, g, k3, kT, t3);
                        if (v < best_right) {
                            best_right = v;
                            prm.kappa3 = k3;
                            prm.kappaT = kT;
                            prm.t3 = t3;
                        }
                    } catch (const error&) {
                    }
                }
            }
        }
        if (!std::isfinite(best_left) || !std::isfinite(best_right)) {
            flag("no feasible (kappa, t) choice for the outer humps");
            rep.feasible = false;
            return rep;
        }
        rep.lambda_star_left = best_left;
        rep.lambda_star_right = best_right;
    } else {
        if (prm.t1 == 0.0) prm.t1 = m.t0 + 0.9 * (t1_cap(prm.kappa0, prm.kappa1) - m.t0);
        if (prm.t3 == 0.0) prm.t3 = m.tT - 0.9 * (m.tT - t3_floor(prm.kappa3, prm.kappaT));
        if (!(prm.t1 <= t1_cap(prm.kappa0, prm.kappa1) + 1e-15))
            flag("t1 above the compatibility cap sigma (1 - kappa1/kappa0)");
        if (!(prm.t3 >= t3_floor(prm.kappa3, prm.kappaT) - 1e-15))
            flag("t3 below the compatibility floor tau + (T - tau) kappa3/kappaT");
        rep.lambda_star_left = lambda_star_left(w, g, prm.kappa0, prm.kappa1, prm.t1);
        rep.lambda_star_right = lambda_star_right(w, g, prm.kappa3, prm.kappaT, prm.t3);
    }

    rep.lambda_star = std::max(rep.lambda_star_left, rep.lambda_star_right);
    rep.gamma1 = (prm.kappa0 - prm.kappa1) / (prm.t1 - s_begin);
    rep.gamma3 = (prm.kappaT - prm.kappa3) / (rep.T - prm.t3);
    rep.lambda_eval = opts.lambda_margin * rep.lambda_star;
    rep.omega_sigma = omega_sigma(w, g, rep.lambda_eval);

    // --- wall-hit abscissae at lambda_eval ---
    const auto state_sigma = [&](double xi) {
        return detail::sigma_state(w, g, rep.lambda_eval, m.sigma, xi, opts.solve);
    };
    const auto x_sigma = [&](double xi) { return state_sigma(xi).x; };
    {
        // r1: first abscissa whose image hits the left wall at t = sigma
        double lo = prm.kappa0;
        double hi = prm.kappa0;
        if (!(x_sigma(prm.kappa0) <= 0.0)) {
            flag("x(sigma; kappa0) > 0 at lambda_eval: first-hump crash absent");
            rep.feasible = false;
            return rep;
        }
        double probe = prm.kappa0;
        bool found = false;
        for (int k = 0; k < 60; ++k) {
            probe *= 0.5;
            if (x_sigma(probe) > 0.0) {
                lo = probe;
                found = true;
                break;
            }
            hi = probe;
        }
        if (!found) {
            flag("no small abscissa with x(sigma) > 0 found");
            rep.feasible = false;
            return rep;
        }
        // bisect the sign change between lo (positive) and hi (nonpositive)
        for (int it = 0; it < 100 && hi - lo > 1e-13; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (x_sigma(mid) > 0.0) lo = mid;
            else hi = mid;
        }
        rep.r1 = lo;

        // l1: last abscissa with x(sigma) = 0, between kappa0 and 1
        double llo = prm.kappa0, lhi = 1.0 - 1e-12;
        for (int it = 0; it < 100 && lhi - llo > 1e-13; ++it) {
            const double mid = 0.5 * (llo + lhi);
            if (x_sigma(mid) <= 0.0) llo = mid;
            else lhi = mid;
        }
        rep.l1 = lhi;
    }

    // --- Step 3 abscissae and mu components ---
    // The chain only needs y(sigma) >= -omega for the two trajectories actually
    // shot from p_1 and p_2, so each component uses a bound on its own computed
    // y(sigma; p) instead of the universal omega_sigma. That sharpens the t2
    // window and brings mu_star down by orders of magnitude while staying
    // inside the hypotheses of the middle-hump lemmas. Given p, the remaining
    // freedom is kappa2, scanned in closed form.
    const double omega_floor = 1e-8 * (1.0 + rep.omega_sigma);
    const auto omega_cap_of = [&](const PlanarState& s) {
        return std::max(1.05 * std::max(0.0, -s.y), omega_floor);
    };
    const auto best_mu_for = [&](double ks, double ocap, double k2_manual) {
        struct Pick {
            double mu = std::numeric_limits<double>::infinity();
            double k2 = 0.0, t2 = 0.0;
        } pick;
        const auto try_k2 = [&](double k2) {
            if (!(k2 > ks && k2 < 1.0)) return;
            const double t2 = t2_window_cap(m.sigma, m.tau, ks, k2, ocap);
            if (!(t2 > m.sigma)) return;
            try {
                const double mu = mu_star(w, g, k2, ks, t2, ocap);
                if (mu < pick.mu) pick = {mu, k2, t2};
            } catch (const error&) {
            }
        };
        if (k2_manual > 0.0) {
            try_k2(k2_manual);
        } else {
            for (int ik = 0;; ++ik) {
                const double k2 = ks + (0.01 + 0.02 * ik) * (1.0 - ks);
                if (!(k2 < 1.0 - 1e-9)) break;
                try_k2(k2);
            }
        }
        return pick;
    };

    const double pi_eps = 1e-6;
    const double p_seed[2] = {0.5 * rep.r1, 0.5 * (rep.l1 + 1.0)};
    for (int i = 0; i < 2; ++i) {
        const double p_manual = i == 0 ? prm.p1 : prm.p2;
        const double k2_manual = i == 0 ? prm.kappa2_1 : prm.kappa2_2;

        double best_p = (opts.params && p_manual > 0.0) ? p_manual : p_seed[i];
        PlanarState best_s = state_sigma(best_p);
        auto best = best_mu_for(best_s.x, omega_cap_of(best_s), k2_manual);

        if (rep.auto_mode) {
            const double a = i == 0 ? rep.r1 * 1e-3 : rep.l1 + pi_eps * (1.0 - rep.l1);
            const double b = i == 0 ? rep.r1 * (1.0 - 1e-6) : 1.0 - pi_eps;
            const auto consider = [&](double q) {
                const PlanarState s = state_sigma(q);
                if (!(s.x > 0.0 && s.x < 1.0)) return;
                const auto cand = best_mu_for(s.x, omega_cap_of(s), 0.0);
                if (cand.mu < best.mu) {
                    best = cand;
                    best_p = q;
                    best_s = s;
                }
            };
            const std::size_t coarse = 96;
            if (a < b) {
                for (std::size_t k = 0; k <= coarse; ++k)
                    consider(a + (b - a) * static_cast<double>(k) / coarse);
                // one finer local pass around the best cell
                const double cell = (b - a) / coarse;
                const double la = std::max(a, best_p - cell), lb = std::min(b, best_p + cell);
                for (std::size_t k = 0; k <= 16; ++k)
                    consider(la + (lb - la) * static_cast<double>(k) / 16.0);
            }
        }

        if (!(best_s.x > 0.0 && best_s.x < 1.0)) {
            flag("kappa_sigma_" + std::to_string(i + 1) + " outside ]0,1[");
            continue;
        }
        if (!std::isfinite(best.mu)) {
            flag("no feasible (kappa2, t2) for component " + std::to_string(i + 1));
            continue;
        }
        (i == 0 ? prm.p1 : prm.p2) = best_p;
        (i == 0 ? prm.kappa2_1 : prm.kappa2_2) = best.k2;
        rep.kappa_sigma[i] = best_s.x;
        rep.y_sigma[i] = best_s.y;
        rep.omega_cap[i] = omega_cap_of(best_s);
        rep.kappa2[i] = best.k2;
        rep.t2[i] = best.t2;
        rep.omega[i] = (best.k2 - best_s.x) / (best.t2 - m.sigma);
        rep.mu_components[i] = best.mu;
    }

    if (rep.mu_components[0] > 0.0 && rep.mu_components[1] > 0.0)
        rep.mu_star = std::max(rep.mu_components[0], rep.mu_components[1]);

    // --- small-amplitude angle bound ---
    rep.epsilon_hat = epsilon_hat(rep.lambda_eval, prm.nu, w.sup_pos(), m.sigma - s_begin);
    rep.delta_eps = g.small_slope_radius(0.5 * rep.epsilon_hat, prm.kappa1 * 0.999);
    rep.delta_eps_heuristic = g.kind() == NonlinKind::Samples || g.kind() == NonlinKind::Custom;
    if (!(rep.delta_eps > 0.0)) flag("no small-slope radius found: (g0) likely fails");

    rep.params = prm;
    rep.feasible = rep.flags.empty() && rep.mu_star > 0.0;
    return rep;
}

} // namespace nshoot
