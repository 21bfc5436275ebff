#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <vector>

#include "nshoot/integrate.hpp"
#include "nshoot/roots.hpp"

namespace nshoot {

enum class ShootDirection { ForwardFromStart, BackwardFromEnd };

struct ContinuumNode {
    double xi;          // initial abscissa in [0, 1]
    PlanarState image;  // state at t = tau
};

struct PhaseBox {
    double x_lo = 0.0, x_hi = 0.0, y_lo = 0.0, y_hi = 0.0;

    PhaseBox inflated(double m) const { return {x_lo - m, x_hi + m, y_lo - m, y_hi + m}; }

    bool touches_segment(const PlanarState& a, const PlanarState& b) const {
        const double sx_lo = std::min(a.x, b.x), sx_hi = std::max(a.x, b.x);
        const double sy_lo = std::min(a.y, b.y), sy_hi = std::max(a.y, b.y);
        return sx_hi >= x_lo && sx_lo <= x_hi && sy_hi >= y_lo && sy_lo <= y_hi;
    }
};

inline PhaseBox bounding_box(const std::vector<ContinuumNode>& nodes) {
    PhaseBox b;
    if (nodes.empty()) return b;
    b.x_lo = b.x_hi = nodes.front().image.x;
    b.y_lo = b.y_hi = nodes.front().image.y;
    for (const auto& n : nodes) {
        b.x_lo = std::min(b.x_lo, n.image.x);
        b.x_hi = std::max(b.x_hi, n.image.x);
        b.y_lo = std::min(b.y_lo, n.image.y);
        b.y_hi = std::max(b.y_hi, n.image.y);
    }
    return b;
}

// Phase-plane image of [0,1]x{0} under the Poincare map to t = tau.
struct Continuum {
    ShootDirection direction = ShootDirection::ForwardFromStart;
    std::vector<ContinuumNode> nodes;  // xi strictly increasing, endpoints 0 and 1 present
    double gap_max = 0.0;              // requested gap contract
    double max_gap = 0.0;              // largest gap among contract-relevant segments
    bool conforming = false;           // contract met before the budget ran out
    std::size_t shots = 0;             // integrations spent
};

struct ContinuumOptions {
    double gap_max = 0.05;
    std::size_t xi_budget = 40000;   // max shots
    std::size_t seeds = 65;          // initial uniform xi grid (including endpoints)
    double xi_min = 1e-12;           // do not bisect below this xi spacing
    std::optional<PhaseBox> focus;   // enforce the gap only where it can matter
    SolveOptions solve;
};

inline Continuum build_continuum(const ProblemDef& p, ShootDirection dir,
                                 const ContinuumOptions& opts = {}) {
    if (!(opts.gap_max > 0.0)) throw domain_error("build_continuum: gap_max must be positive");
    const double tau = p.tau();
    const double t_anchor = dir == ShootDirection::ForwardFromStart ? p.t_begin() : p.t_end();

    Continuum c;
    c.direction = dir;
    c.gap_max = opts.gap_max;

    std::map<double, PlanarState> nodes;
    const auto shoot = [&](double xi) {
        ++c.shots;
        return poincare(p, t_anchor, tau, {xi, 0.0}, opts.solve);
    };

    const std::size_t seeds = std::max<std::size_t>(2, opts.seeds);
    for (std::size_t i = 0; i < seeds; ++i) {
        const double xi = static_cast<double>(i) / static_cast<double>(seeds - 1);
        nodes.emplace(xi, shoot(xi));
    }

    struct Seg {
        double a, b;
    };
    std::vector<Seg> stack;
    const auto push_all = [&]() {
        stack.clear();
        auto it = nodes.begin();
        auto prev = it++;
        for (; it != nodes.end(); ++it, ++prev) stack.push_back({prev->first, it->first});
    };
    push_all();

    const auto relevant = [&](const PlanarState& ia, const PlanarState& ib) {
        if (!opts.focus) return true;
        return opts.focus->touches_segment(ia, ib);
    };

    bool budget_hit = false;
    while (!stack.empty()) {
        const Seg s = stack.back();
        stack.pop_back();
        const PlanarState& ia = nodes.at(s.a);
        const PlanarState& ib = nodes.at(s.b);
        if (phase_dist(ia, ib) <= opts.gap_max) continue;
        if (!relevant(ia, ib)) continue;
        if (s.b - s.a <= opts.xi_min) continue;
        if (c.shots >= opts.xi_budget) {
            budget_hit = true;
            break;
        }
        const double mid = 0.5 * (s.a + s.b);
        nodes.emplace(mid, shoot(mid));
        stack.push_back({s.a, mid});
        stack.push_back({mid, s.b});
    }

    c.nodes.reserve(nodes.size());
    for (const auto& [xi, img] : nodes) c.nodes.push_back({xi, img});

    c.max_gap = 0.0;
    bool met = true;
    for (std::size_t i = 0; i + 1 < c.nodes.size(); ++i) {
        const auto& a = c.nodes[i].image;
        const auto& b = c.nodes[i + 1].image;
        if (!relevant(a, b)) continue;
        const double gap = phase_dist(a, b);
        c.max_gap = std::max(c.max_gap, gap);
        if (gap > opts.gap_max && (c.nodes[i + 1].xi - c.nodes[i].xi) > opts.xi_min) met = false;
    }
    c.conforming = met && !budget_hit;
    return c;
}

// Number of wall-to-wall pieces of a continuum polyline: visits to the left
// wall {0} x ]-inf,0] and the right wall {1} x ]0,+inf[ are collected in xi
// order, and every change of wall marks one connecting sub-continuum (the
// pieces alternate orientation along xi). Above the certified thresholds the
// forward continuum contains at least three.
inline int wall_traversals(const Continuum& c) {
    const auto& ns = c.nodes;
    int count = 0;
    int last = 0;  // 0: none yet, 1: left wall, 2: right wall
    if (!ns.empty() && ns.front().image.x <= 0.0 && ns.front().image.y <= 0.0) last = 1;
    for (std::size_t i = 0; i + 1 < ns.size(); ++i) {
        const PlanarState& a = ns[i].image;
        const PlanarState& b = ns[i + 1].image;
        if ((a.x - 0.0) * (b.x - 0.0) < 0.0) {
            const double yc = a.y + (b.y - a.y) * (0.0 - a.x) / (b.x - a.x);
            if (yc <= 0.0) {
                if (last == 2) ++count;
                last = 1;
            }
        }
        if ((a.x - 1.0) * (b.x - 1.0) < 0.0) {
            const double yc = a.y + (b.y - a.y) * (1.0 - a.x) / (b.x - a.x);
            if (yc > 0.0) {
                if (last == 1) ++count;
                last = 2;
            }
        }
    }
    return count;
}

struct IntersectionPoint {
    double xi_forward = 0.0;
    double xi_backward = 0.0;
    PlanarState point;       // crossing location at t = tau
    double residual = 0.0;   // phase distance between the two shot images
    // forward-abscissa bracket of the polished crossing segment; its endpoints
    // straddle the backward curve, so the scalar shooting map changes sign on it
    double xi_f_lo = 0.0;
    double xi_f_hi = 0.0;
};

struct IntersectOptions {
    double polish_tol = 1e-7;    // shrink crossing segments to this image size
    double dedup_radius = 1e-4;  // in (xi_f, xi_b)
    SolveOptions solve;
};

namespace detail {

struct SegCross {
    bool hit = false;
    double s = 0.0;  // parameter on segment a
    double t = 0.0;  // parameter on segment b
};

inline double cross2(double ax, double ay, double bx, double by) { return ax * by - ay * bx; }

// Proper or touching crossing of segments p1p2 and q1q2.
inline SegCross segment_intersection(const PlanarState& p1, const PlanarState& p2,
                                     const PlanarState& q1, const PlanarState& q2) {
    SegCross out;
    const double rx = p2.x - p1.x, ry = p2.y - p1.y;
    const double sx = q2.x - q1.x, sy = q2.y - q1.y;
    const double denom = cross2(rx, ry, sx, sy);
    const double qpx = q1.x - p1.x, qpy = q1.y - p1.y;
    if (denom == 0.0) return out;  // parallel or collinear: handled by refinement elsewhere
    const double s = cross2(qpx, qpy, sx, sy) / denom;
    const double t = cross2(qpx, qpy, rx, ry) / denom;
    if (s < 0.0 || s > 1.0 || t < 0.0 || t > 1.0) return out;
    out.hit = true;
    out.s = s;
    out.t = t;
    return out;
}

} // namespace detail

// All transversal crossings between the forward and the backward continuum,
// localized by shrinking the crossing segments until both images are within
// polish_tol, then deduplicated in (xi_f, xi_b).
inline std::vector<IntersectionPoint> intersect(const ProblemDef& p, const Continuum& fwd,
                                                const Continuum& bwd,
                                                const IntersectOptions& opts = {}) {
    if (fwd.direction != ShootDirection::ForwardFromStart ||
        bwd.direction != ShootDirection::BackwardFromEnd)
        throw domain_error("intersect: needs one forward and one backward continuum");

    const double tau = p.tau();
    const auto shoot_f = [&](double xi) {
        return poincare(p, p.t_begin(), tau, {xi, 0.0}, opts.solve);
    };
    const auto shoot_b = [&](double xi) {
        return poincare(p, p.t_end(), tau, {xi, 0.0}, opts.solve);
    };

    std::vector<IntersectionPoint> found;
    for (std::size_t i = 0; i + 1 < fwd.nodes.size(); ++i) {
        for (std::size_t j = 0; j + 1 < bwd.nodes.size(); ++j) {
            auto fa = fwd.nodes[i], fb = fwd.nodes[i + 1];
            auto ba = bwd.nodes[j], bb = bwd.nodes[j + 1];
            auto hit = detail::segment_intersection(fa.image, fb.image, ba.image, bb.image);
            if (!hit.hit) continue;

            // shrink both segments about the crossing until the chords are tiny
            for (int iter = 0; iter < 90; ++iter) {
                const double fgap = phase_dist(fa.image, fb.image);
                const double bgap = phase_dist(ba.image, bb.image);
                if (fgap <= opts.polish_tol && bgap <= opts.polish_tol) break;
                bool changed = false;
                if (fgap > opts.polish_tol && fb.xi - fa.xi > 1e-15) {
                    const double mid = 0.5 * (fa.xi + fb.xi);
                    const ContinuumNode mn{mid, shoot_f(mid)};
                    auto left = detail::segment_intersection(fa.image, mn.image, ba.image, bb.image);
                    if (left.hit) {
                        fb = mn;
                        hit = left;
                        changed = true;
                    } else {
                        auto right = detail::segment_intersection(mn.image, fb.image, ba.image, bb.image);
                        if (right.hit) {
                            fa = mn;
                            hit = right;
                            changed = true;
                        }
                    }
                }
                if (bgap > opts.polish_tol && bb.xi - ba.xi > 1e-15) {
                    const double mid = 0.5 * (ba.xi + bb.xi);
                    const ContinuumNode mn{mid, shoot_b(mid)};
                    auto low = detail::segment_intersection(fa.image, fb.image, ba.image, mn.image);
                    if (low.hit) {
                        bb = mn;
                        hit = low;
                        changed = true;
                    } else {
                        auto high = detail::segment_intersection(fa.image, fb.image, mn.image, bb.image);
                        if (high.hit) {
                            ba = mn;
                            hit = high;
                            changed = true;
                        }
                    }
                }
                if (!changed) break;  // tangential contact: leave at current resolution
            }

            IntersectionPoint ip;
            ip.xi_forward = fa.xi + hit.s * (fb.xi - fa.xi);
            ip.xi_backward = ba.xi + hit.t * (bb.xi - ba.xi);
            ip.xi_f_lo = fa.xi;
            ip.xi_f_hi = fb.xi;
            // touches at the shared equilibria (0,0) and (1,0) are the trivial
            // solutions, not transversal crossings
            if ((ip.xi_forward < 1e-9 && ip.xi_backward < 1e-9) ||
                (ip.xi_forward > 1.0 - 1e-9 && ip.xi_backward > 1.0 - 1e-9))
                continue;
            const PlanarState fi = shoot_f(ip.xi_forward);
            const PlanarState bi = shoot_b(ip.xi_backward);
            ip.point = {0.5 * (fi.x + bi.x), 0.5 * (fi.y + bi.y)};
            ip.residual = phase_dist(fi, bi);
            found.push_back(ip);
        }
    }

    std::sort(found.begin(), found.end(), [](const IntersectionPoint& a, const IntersectionPoint& b) {
        return a.xi_forward < b.xi_forward;
    });
    std::vector<IntersectionPoint> unique;
    for (const auto& ip : found) {
        bool dup = false;
        for (const auto& kept : unique) {
            if (std::abs(ip.xi_forward - kept.xi_forward) < opts.dedup_radius &&
                std::abs(ip.xi_backward - kept.xi_backward) < opts.dedup_radius) {
                dup = true;
                break;
            }
        }
        if (!dup) unique.push_back(ip);
    }
    return unique;
}

// A validated positive solution of the Neumann problem.
struct Solution {
    double xi = 0.0;               // initial abscissa u(0)
    double xi_backward = 0.0;      // matching backward abscissa u(T), when known
    Trajectory trajectory;         // dense over [0, T], validation-grade
    double residual_left = 0.0;    // |u'(0)|
    double residual_right = 0.0;   // |u'(T)|
    double min_u = 0.0;
    double max_u = 0.0;
    double ode_residual = 0.0;     // collocation residual
    // sign-change certificate: h(bracket_lo) and h(bracket_hi) differ in sign
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
    bool increasing = false;       // direction of the crossing: h(hi) > h(lo)
};

enum class RefineStatus { Converged, TrivialZero, TrivialOne, OutOfRange, BracketLost };

struct RefineResult {
    RefineStatus status = RefineStatus::BracketLost;
    std::optional<Solution> solution;
};

struct RefineOptions {
    double boundary_tol = 1e-8;   // |u'(T)| acceptance
    double h_tol = 1e-9;          // root polish target on h(xi)
    double trivial_tol = 1e-9;    // max deviation from 0 or 1 that still counts as trivial
    std::size_t range_grid = 10000;
    SolveOptions solve;            // used for h evaluations
};

// h(xi) = y(T; 0, xi, 0): the scalar shooting map whose zeros are the Neumann
// solutions.
inline double shooting_map(const ProblemDef& p, double xi, const SolveOptions& opts = {}) {
    return integrate(p, p.t_begin(), p.t_end(), {xi, 0.0}, opts).back().y;
}

inline RefineResult refine(const ProblemDef& p, const IntersectionPoint& seed,
                           const RefineOptions& opts = {}) {
    RefineResult out;
    const auto h = [&](double xi) { return shooting_map(p, xi, opts.solve); };

    // classify seeds that already sit on a trivial equilibrium
    if (seed.xi_forward <= opts.trivial_tol) {
        out.status = RefineStatus::TrivialZero;
        return out;
    }
    if (seed.xi_forward >= 1.0 - opts.trivial_tol) {
        out.status = RefineStatus::TrivialOne;
        return out;
    }

    // Establish a sign-change bracket. The crossing segment carried by the seed
    // already straddles the backward curve; a bare seed point falls back to a
    // capped expansion (the trivial roots at 0 and 1 stay excluded: a seed this
    // far off is a failure, not a hit).
    double lo = seed.xi_forward, hi = seed.xi_forward;
    double flo = 0.0, fhi = 0.0;
    bool bracketed = false;
    if (seed.xi_f_hi > seed.xi_f_lo) {
        lo = std::max(1e-12, seed.xi_f_lo);
        hi = std::min(1.0 - 1e-12, seed.xi_f_hi);
        flo = h(lo);
        fhi = h(hi);
        bracketed = flo == 0.0 || fhi == 0.0 || (flo < 0.0) != (fhi < 0.0);
    }
    double delta = 1e-6;
    for (int attempt = 0; attempt < 8 && !bracketed; ++attempt) {
        lo = std::max(1e-12, seed.xi_forward - delta);
        hi = std::min(1.0 - 1e-12, seed.xi_forward + delta);
        flo = h(lo);
        fhi = h(hi);
        if (flo == 0.0 || fhi == 0.0 || (flo < 0.0) != (fhi < 0.0)) bracketed = true;
        delta *= 4.0;
    }
    if (!bracketed) {
        out.status = RefineStatus::BracketLost;
        return out;
    }

    double root = solve_bracketed(h, lo, hi, flo, fhi, opts.h_tol, 1e-16);
    bool increasing = fhi > flo;
    double cert_lo = lo, cert_hi = hi;

    // Re-polish against the validation-grade map. Steep roots move between
    // integrator settings by (map discrepancy)/|h'|, which for violently
    // sheared problems is many bracket-widths; the expansion ladder therefore
    // grows to an absolute cap rather than a multiple of the incoming bracket.
    {
        const auto hv = [&](double xi) { return shooting_map(p, xi, validation_options()); };
        double d = std::max(1e-13, 0.25 * std::abs(hi - lo));
        for (int attempt = 0; attempt < 24 && d <= 1e-7; ++attempt) {
            const double a = std::max(1e-12, root - d), b = std::min(1.0 - 1e-12, root + d);
            const double fa = hv(a), fb = hv(b);
            if (fa == 0.0 || fb == 0.0 || (fa < 0.0) != (fb < 0.0)) {
                root = solve_bracketed(hv, a, b, fa, fb, opts.h_tol, 1e-16);
                increasing = fb > fa;
                cert_lo = a;
                cert_hi = b;
                break;
            }
            d *= 4.0;
        }
    }

    // full validation-grade re-integration
    const Trajectory tr = integrate(p, p.t_begin(), p.t_end(), {root, 0.0}, validation_options());
    double mn = tr.min_x(), mx = tr.max_x();
    for (std::size_t i = 0; i <= opts.range_grid; ++i) {
        const double t = p.t_begin() + (p.t_end() - p.t_begin()) * static_cast<double>(i) /
                                           static_cast<double>(opts.range_grid);
        const double x = tr.eval(t).x;
        mn = std::min(mn, x);
        mx = std::max(mx, x);
    }

    if (mx <= opts.trivial_tol) {
        out.status = RefineStatus::TrivialZero;
        return out;
    }
    if (mn >= 1.0 - opts.trivial_tol && mx <= 1.0 + opts.trivial_tol) {
        out.status = RefineStatus::TrivialOne;
        return out;
    }
    if (!(mn > 0.0) || !(mx < 1.0)) {
        out.status = RefineStatus::OutOfRange;
        return out;
    }
    if (std::abs(tr.back().y) > opts.boundary_tol) {
        out.status = RefineStatus::BracketLost;
        return out;
    }

    Solution sol;
    sol.xi = root;
    // the matching backward abscissa is where the validated trajectory lands
    sol.xi_backward = tr.back().x;
    sol.residual_left = std::abs(tr.front().y);
    sol.residual_right = std::abs(tr.back().y);
    sol.min_u = mn;
    sol.max_u = mx;
    sol.ode_residual = collocation_residual(p, tr, 100);
    sol.bracket_lo = cert_lo;
    sol.bracket_hi = cert_hi;
    sol.increasing = increasing;
    sol.trajectory = tr;
    out.status = RefineStatus::Converged;
    out.solution = std::move(sol);
    return out;
}

struct FindOptions {
    ContinuumOptions continuum;
    IntersectOptions intersect;
    RefineOptions refine;
    double solution_dedup = 1e-6;  // in xi
    bool auto_focus = true;        // restrict forward refinement to the backward window
    // Both continua leave the equilibria (0,0) and (1,0) along chords sharing
    // those endpoints, so polyline crossings at scales below the first chord
    // are invisible. A log-spaced scan of the scalar map over the two corner
    // regions restores detection of small-amplitude solutions.
    bool corner_scan = true;
    std::size_t corner_probes = 48;
    double corner_floor = 1e-9;
};

struct FindReport {
    Continuum forward;
    Continuum backward;
    std::vector<IntersectionPoint> intersections;
    std::vector<Solution> solutions;
};

// Full pipeline: build both continua, intersect them, refine every crossing,
// drop trivial/escaping ones, deduplicate and sort by xi.
inline FindReport find_solutions(const ProblemDef& p, const FindOptions& opts = {}) {
    FindReport rep;
    rep.backward = build_continuum(p, ShootDirection::BackwardFromEnd, opts.continuum);

    ContinuumOptions fopts = opts.continuum;
    if (opts.auto_focus && !fopts.focus) {
        PhaseBox box = bounding_box(rep.backward.nodes);
        fopts.focus = box.inflated(std::max(1.0, 8.0 * fopts.gap_max));
    }
    rep.forward = build_continuum(p, ShootDirection::ForwardFromStart, fopts);

    rep.intersections = intersect(p, rep.forward, rep.backward, opts.intersect);

    std::vector<IntersectionPoint> seeds = rep.intersections;
    if (opts.corner_scan && opts.corner_probes >= 2) {
        // bracket sign changes of the scalar map near both equilibria
        const double span = 1.0 / static_cast<double>(std::max<std::size_t>(2, opts.continuum.seeds) - 1);
        const auto scan_corner = [&](bool left) {
            std::vector<double> xs;
            const double lo = opts.corner_floor, hi = std::max(span, 4.0 * opts.corner_floor);
            for (std::size_t i = 0; i < opts.corner_probes; ++i) {
                const double f = std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) *
                                                             static_cast<double>(i) /
                                                             static_cast<double>(opts.corner_probes - 1));
                xs.push_back(left ? f : 1.0 - f);
            }
            if (!left) std::reverse(xs.begin(), xs.end());
            double prev_x = xs.front();
            double prev_h = shooting_map(p, prev_x, opts.refine.solve);
            for (std::size_t i = 1; i < xs.size(); ++i) {
                const double x = xs[i];
                const double hx = shooting_map(p, x, opts.refine.solve);
                if (prev_h != 0.0 && (prev_h < 0.0) != (hx < 0.0)) {
                    IntersectionPoint ip;
                    ip.xi_forward = 0.5 * (prev_x + x);
                    ip.xi_f_lo = prev_x;
                    ip.xi_f_hi = x;
                    seeds.push_back(ip);
                }
                prev_x = x;
                prev_h = hx;
            }
        };
        scan_corner(true);
        scan_corner(false);
    }

    for (const auto& ip : seeds) {
        RefineResult rr = refine(p, ip, opts.refine);
        if (rr.status != RefineStatus::Converged) continue;
        // nearby roots with opposite crossing directions are distinct solutions
        bool dup = false;
        for (const auto& s : rep.solutions) {
            if (std::abs(s.xi - rr.solution->xi) < opts.solution_dedup &&
                s.increasing == rr.solution->increasing) {
                dup = true;
                break;
            }
        }
        if (!dup) rep.solutions.push_back(std::move(*rr.solution));
    }
    std::sort(rep.solutions.begin(), rep.solutions.end(),
              [](const Solution& a, const Solution& b) { return a.xi < b.xi; });
    return rep;
}

// Brute-force scan of the scalar shooting map on a uniform grid: interior
// sign-change roots, polished. The independent cross-check for the intersection
// pipeline.
inline std::vector<double> scan_shooting_roots(const ProblemDef& p, std::size_t grid_n = 10000,
                                               const SolveOptions& solve = {}) {
    std::vector<double> roots;
    if (grid_n < 2) throw domain_error("scan_shooting_roots: grid too small");
    std::vector<double> xs = linspace(0.0, 1.0, grid_n + 1);
    std::vector<double> hs(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i)
        hs[i] = (i == 0 || i + 1 == xs.size()) ? 0.0 : shooting_map(p, xs[i], solve);
    const auto h = [&](double xi) { return shooting_map(p, xi, solve); };
    for (std::size_t i = 1; i + 2 < xs.size(); ++i) {
        const double fa = hs[i], fb = hs[i + 1];
        if (fa == 0.0) {
            roots.push_back(xs[i]);
            continue;
        }
        if ((fa < 0.0) != (fb < 0.0)) {
            roots.push_back(solve_bracketed(h, xs[i], xs[i + 1], fa, fb, 1e-9, 1e-16));
        }
    }
    return roots;
}

struct SweepCell {
    double lambda = 0.0;
    double mu = 0.0;
    int count = -1;          // -1 when the cell failed
    std::string status;      // "ok" or the error message
};

struct SweepResult {
    std::vector<double> lambdas;
    std::vector<double> mus;
    std::vector<SweepCell> cells;  // row-major: lambda index major, mu index minor

    const SweepCell& at(std::size_t il, std::size_t im) const {
        return cells[il * mus.size() + im];
    }
};

// Solution count per (lambda, mu) cell. Cells are independent; failures are
// recorded in the cell, not thrown.
inline SweepResult sweep(const ProblemDef& p_template, const std::vector<double>& lambdas,
                         const std::vector<double>& mus, const FindOptions& opts = {},
                         unsigned jobs = 1) {
    if (lambdas.empty() || mus.empty()) throw domain_error("sweep: empty parameter grid");
    SweepResult res;
    res.lambdas = lambdas;
    res.mus = mus;
    res.cells.resize(lambdas.size() * mus.size());
    parallel_for(res.cells.size(), jobs, [&](std::size_t k) {
        const std::size_t il = k / mus.size(), im = k % mus.size();
        SweepCell& cell = res.cells[k];
        cell.lambda = lambdas[il];
        cell.mu = mus[im];
        try {
            const ProblemDef p = p_template.with_parameters(cell.lambda, cell.mu);
            cell.count = static_cast<int>(find_solutions(p, opts).solutions.size());
            cell.status = "ok";
        } catch (const std::exception& e) {
            cell.count = -1;
            cell.status = e.what();
        }
    });
    return res;
}

} // namespace nshoot
