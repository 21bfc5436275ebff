#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "nshoot/problem.hpp"

namespace nshoot {

struct PlanarState {
    double x = 0.0;  // solution value u
    double y = 0.0;  // derivative u'
};

inline double phase_dist(const PlanarState& a, const PlanarState& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

struct SolveOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double max_step = 0.1;  // upper bound on the step size
    double init_step = 1e-3;
    std::size_t max_steps = 2000000;
};

// Validation-grade options: small step cap so the cubic Hermite interpolant
// tracks derivatives to ~1e-7, enough for collocation residual checks.
inline SolveOptions validation_options() {
    SolveOptions o;
    o.max_step = 1e-3;
    return o;
}

// Dense trajectory of the planar system. Knots are stored in integration order
// (times decreasing for backward runs). The interpolant is cubic Hermite on knot
// values and knot derivatives; y' jumps at weight breakpoints, so each knot
// keeps the derivative seen by the interval before it and after it separately.
class Trajectory {
  public:
    Trajectory() = default;
    Trajectory(std::vector<double> ts, std::vector<PlanarState> ys, std::vector<PlanarState> f_in,
               std::vector<PlanarState> f_out, SolveOptions opts)
        : t_(std::move(ts)), y_(std::move(ys)), fin_(std::move(f_in)), fout_(std::move(f_out)),
          opts_(opts) {}

    const std::vector<double>& times() const { return t_; }
    const std::vector<PlanarState>& states() const { return y_; }
    const SolveOptions& options() const { return opts_; }
    bool forward() const { return t_.size() < 2 || t_.back() >= t_.front(); }
    double t_front() const { return t_.front(); }
    double t_back() const { return t_.back(); }
    const PlanarState& front() const { return y_.front(); }
    const PlanarState& back() const { return y_.back(); }

    PlanarState eval(double t) const {
        const auto [k, th] = locate(t);
        return hermite(k, th);
    }

    // Derivative of the interpolant (not a fresh right-hand-side evaluation).
    PlanarState eval_derivative(double t) const {
        const auto [k, th] = locate(t);
        return hermite_derivative(k, th);
    }

    double min_x() const {
        double m = y_.empty() ? 0.0 : y_.front().x;
        for (const auto& s : y_) m = std::min(m, s.x);
        return m;
    }
    double max_x() const {
        double m = y_.empty() ? 0.0 : y_.front().x;
        for (const auto& s : y_) m = std::max(m, s.x);
        return m;
    }

  private:
    std::pair<std::size_t, double> locate(double t) const {
        if (t_.size() < 2) return {0, 0.0};
        const bool fwd = forward();
        const double lo = fwd ? t_.front() : t_.back();
        const double hi = fwd ? t_.back() : t_.front();
        const double scale = std::max({1.0, std::abs(lo), std::abs(hi)});
        if (t < lo - 1e-9 * scale || t > hi + 1e-9 * scale)
            throw domain_error("Trajectory::eval outside the spanned interval");
        t = std::clamp(t, lo, hi);
        std::size_t k;
        if (fwd) {
            auto it = std::upper_bound(t_.begin(), t_.end(), t);
            k = static_cast<std::size_t>(it - t_.begin());
        } else {
            auto it = std::upper_bound(t_.begin(), t_.end(), t, std::greater<double>());
            k = static_cast<std::size_t>(it - t_.begin());
        }
        if (k == 0) k = 1;
        if (k >= t_.size()) k = t_.size() - 1;
        k -= 1;
        const double h = t_[k + 1] - t_[k];
        return {k, h == 0.0 ? 0.0 : (t - t_[k]) / h};
    }

    PlanarState hermite(std::size_t k, double th) const {
        const double h = t_[k + 1] - t_[k];
        const double t2 = th * th, t3 = t2 * th;
        const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + th;
        const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
        const PlanarState& fa = fout_[k];
        const PlanarState& fb = fin_[k + 1];
        PlanarState out;
        out.x = h00 * y_[k].x + h10 * h * fa.x + h01 * y_[k + 1].x + h11 * h * fb.x;
        out.y = h00 * y_[k].y + h10 * h * fa.y + h01 * y_[k + 1].y + h11 * h * fb.y;
        return out;
    }

    PlanarState hermite_derivative(std::size_t k, double th) const {
        const double h = t_[k + 1] - t_[k];
        const double t2 = th * th;
        const double d00 = (6 * t2 - 6 * th) / h, d10 = 3 * t2 - 4 * th + 1;
        const double d01 = (-6 * t2 + 6 * th) / h, d11 = 3 * t2 - 2 * th;
        const PlanarState& fa = fout_[k];
        const PlanarState& fb = fin_[k + 1];
        PlanarState out;
        out.x = d00 * y_[k].x + d10 * fa.x + d01 * y_[k + 1].x + d11 * fb.x;
        out.y = d00 * y_[k].y + d10 * fa.y + d01 * y_[k + 1].y + d11 * fb.y;
        return out;
    }

    std::vector<double> t_;
    std::vector<PlanarState> y_;
    std::vector<PlanarState> fin_;   // derivative for the interval ending at the knot
    std::vector<PlanarState> fout_;  // derivative for the interval starting at the knot
    SolveOptions opts_;
};

namespace detail {

// Dormand-Prince 5(4) coefficients.
struct Dopri5 {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    // embedded 4th-order weights
    static constexpr double e1 = 5179.0 / 57600, e3 = 7571.0 / 16695, e4 = 393.0 / 640,
                            e5 = -92097.0 / 339200, e6 = 187.0 / 2100, e7 = 1.0 / 40;
};

struct RhsEval {
    double dx, dy;
};

} // namespace detail

// Integrate the planar system x' = y, y' = -a_{lambda,mu}(t) g(x) from t_from to
// t_to (either direction; backward runs use the time-reversed system internally).
// Steps never straddle a weight breakpoint, so the right-hand side is smooth
// within every accepted step. The zero extension of g keeps the field bounded on
// bounded x-slabs, so blow-up indicates a malformed custom nonlinearity.
inline Trajectory integrate(const ProblemDef& p, double t_from, double t_to, PlanarState s0,
                            const SolveOptions& opts = {}) {
    const double lo = std::min(t_from, t_to), hi = std::max(t_from, t_to);
    const double scale = std::max(1.0, std::abs(p.t_end()) + std::abs(p.t_begin()));
    if (lo < p.t_begin() - 1e-9 * scale || hi > p.t_end() + 1e-9 * scale)
        throw domain_error("integrate: time span outside the weight domain");
    if (t_from == t_to) throw domain_error("integrate: empty time span");
    const bool fwd = t_to > t_from;
    const double dir = fwd ? 1.0 : -1.0;

    const auto rhs = [&p](double t, const PlanarState& s) {
        return detail::RhsEval{s.y, -p.scaled.eval(t) * p.g.eval_ext(s.x)};
    };

    // segment boundaries: weight breakpoints inside the span, ordered along the run
    std::vector<double> stops;
    stops.push_back(t_from);
    {
        const auto& bps = p.weight.breakpoints();
        if (fwd) {
            for (double b : bps)
                if (b > t_from + 1e-14 * scale && b < t_to - 1e-14 * scale) stops.push_back(b);
        } else {
            for (auto it = bps.rbegin(); it != bps.rend(); ++it)
                if (*it < t_from - 1e-14 * scale && *it > t_to + 1e-14 * scale) stops.push_back(*it);
        }
    }
    stops.push_back(t_to);

    std::vector<double> ts;
    std::vector<PlanarState> ys, f_in, f_out;
    ts.push_back(t_from);
    ys.push_back(s0);

    PlanarState s = s0;
    std::size_t steps_used = 0;
    using K = detail::Dopri5;

    for (std::size_t seg = 0; seg + 1 < stops.size(); ++seg) {
        const double seg_from = stops[seg], seg_to = stops[seg + 1];
        const double seg_len = std::abs(seg_to - seg_from);
        // Evaluate the weight strictly inside the segment so the breakpoint
        // value convention cannot leak the neighbouring piece into this one.
        const auto clamp_inside = [&](double t) {
            const double eps = std::min(1e-9, 1e-6 * seg_len);
            const double a = std::min(seg_from, seg_to) + eps;
            const double b = std::max(seg_from, seg_to) - eps;
            return a < b ? std::clamp(t, a, b) : 0.5 * (seg_from + seg_to);
        };
        const auto f = [&](double t, const PlanarState& st) { return rhs(clamp_inside(t), st); };

        double t = seg_from;
        double h = std::min({opts.init_step, opts.max_step, std::max(seg_len, 1e-12)});
        detail::RhsEval k1 = f(t, s);
        if (seg == 0) {
            f_in.push_back({k1.dx, k1.dy});
            f_out.push_back({k1.dx, k1.dy});
        } else {
            // entering a new piece: refresh the outgoing derivative at the knot
            f_out.back() = {k1.dx, k1.dy};
        }

        while (dir * (seg_to - t) > 1e-14 * scale) {
            if (++steps_used > opts.max_steps)
                throw numerical_error("integrate: step budget exhausted");
            h = std::min(h, opts.max_step);
            const bool clipped = h >= std::abs(seg_to - t);
            if (clipped) h = std::abs(seg_to - t);
            const double hd = dir * h;

            const auto stage_at = [&](double ct, double ax, double ay) {
                PlanarState q{s.x + hd * ax, s.y + hd * ay};
                return f(t + hd * ct, q);
            };
            const detail::RhsEval k2 = stage_at(K::c2, K::a21 * k1.dx, K::a21 * k1.dy);
            const detail::RhsEval k3 =
                stage_at(K::c3, K::a31 * k1.dx + K::a32 * k2.dx, K::a31 * k1.dy + K::a32 * k2.dy);
            const detail::RhsEval k4 =
                stage_at(K::c4, K::a41 * k1.dx + K::a42 * k2.dx + K::a43 * k3.dx,
                         K::a41 * k1.dy + K::a42 * k2.dy + K::a43 * k3.dy);
            const detail::RhsEval k5 =
                stage_at(K::c5, K::a51 * k1.dx + K::a52 * k2.dx + K::a53 * k3.dx + K::a54 * k4.dx,
                         K::a51 * k1.dy + K::a52 * k2.dy + K::a53 * k3.dy + K::a54 * k4.dy);
            const detail::RhsEval k6 = stage_at(
                1.0, K::a61 * k1.dx + K::a62 * k2.dx + K::a63 * k3.dx + K::a64 * k4.dx + K::a65 * k5.dx,
                K::a61 * k1.dy + K::a62 * k2.dy + K::a63 * k3.dy + K::a64 * k4.dy + K::a65 * k5.dy);
            PlanarState y5;
            y5.x = s.x +
                   hd * (K::b1 * k1.dx + K::b3 * k3.dx + K::b4 * k4.dx + K::b5 * k5.dx + K::b6 * k6.dx);
            y5.y = s.y +
                   hd * (K::b1 * k1.dy + K::b3 * k3.dy + K::b4 * k4.dy + K::b5 * k5.dy + K::b6 * k6.dy);
            const detail::RhsEval k7 = f(t + hd, y5);
            PlanarState y4;
            y4.x = s.x + hd * (K::e1 * k1.dx + K::e3 * k3.dx + K::e4 * k4.dx + K::e5 * k5.dx +
                               K::e6 * k6.dx + K::e7 * k7.dx);
            y4.y = s.y + hd * (K::e1 * k1.dy + K::e3 * k3.dy + K::e4 * k4.dy + K::e5 * k5.dy +
                               K::e6 * k6.dy + K::e7 * k7.dy);

            if (!std::isfinite(y5.x) || !std::isfinite(y5.y))
                throw numerical_error("integrate: state became nonfinite (malformed nonlinearity?)");

            const double sx = opts.abs_tol + opts.rel_tol * std::max(std::abs(s.x), std::abs(y5.x));
            const double sy = opts.abs_tol + opts.rel_tol * std::max(std::abs(s.y), std::abs(y5.y));
            const double ex = (y5.x - y4.x) / sx, ey = (y5.y - y4.y) / sy;
            const double err = std::sqrt(0.5 * (ex * ex + ey * ey));

            if (err <= 1.0) {
                t = clipped ? seg_to : t + hd;
                s = y5;
                k1 = k7;  // FSAL
                ts.push_back(t);
                ys.push_back(s);
                f_in.push_back({k7.dx, k7.dy});
                f_out.push_back({k7.dx, k7.dy});
            }
            const double grow = err == 0.0 ? 5.0 : 0.9 * std::pow(err, -0.2);
            h *= std::clamp(grow, 0.2, 5.0);
            h = std::max(h, 1e-14 * scale);
        }
    }
    return Trajectory(std::move(ts), std::move(ys), std::move(f_in), std::move(f_out), opts);
}

// Poincare map Phi_alpha^beta: the state at time alpha mapped to the state at
// time beta along the flow. Phi_alpha^alpha is the identity.
inline PlanarState poincare(const ProblemDef& p, double alpha, double beta, PlanarState s,
                            const SolveOptions& opts = {}) {
    if (alpha == beta) return s;
    return integrate(p, alpha, beta, s, opts).back();
}

// Max collocation residual of a trajectory at the midpoints of up to `samples`
// knot intervals: the Hermite interpolant's derivative is compared against the
// ODE right-hand side. Intervals never straddle weight breakpoints, so the
// comparison happens where the field is smooth.
inline double collocation_residual(const ProblemDef& p, const Trajectory& tr,
                                   std::size_t samples = 100) {
    const auto& ts = tr.times();
    if (ts.size() < 2) return 0.0;
    const std::size_t n = ts.size() - 1;
    double worst = 0.0;
    const std::size_t m = std::min(samples, n);
    for (std::size_t j = 0; j < m; ++j) {
        const std::size_t k = (j * n) / m;
        const double tm = 0.5 * (ts[k] + ts[k + 1]);
        const PlanarState u = tr.eval(tm);
        const PlanarState du = tr.eval_derivative(tm);
        const double rx = du.x - u.y;
        const double ry = du.y + p.scaled.eval(tm) * p.g.eval_ext(u.x);
        worst = std::max({worst, std::abs(rx), std::abs(ry)});
    }
    return worst;
}

} // namespace nshoot
