#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "nshoot/errors.hpp"
#include "nshoot/numeric.hpp"
#include "nshoot/roots.hpp"

namespace nshoot {

enum class PieceKind { Constant, Polynomial, Samples };

// One piece of a piecewise weight on [from, to]. Polynomials are in the local
// variable s = t - from. Samples are linearly interpolated.
struct WeightPiece {
    double from = 0.0;
    double to = 0.0;
    PieceKind kind = PieceKind::Constant;
    Poly poly;               // Constant / Polynomial
    std::vector<double> ts;  // Samples
    std::vector<double> vs;  // Samples
};

// Sign pattern markers of a validated weight: a > 0 on [t0, sigma], a < 0 on
// [sigma, tau], a > 0 on [tau, tT], with a == 0 outside [t0, tT].
struct SignStructure {
    double sigma = 0.0;
    double tau = 0.0;
    double t0 = 0.0;  // effective left endpoint (start of the support of a)
    double tT = 0.0;  // effective right endpoint (end of the support of a)
};

// Piecewise weight a(t) on [start, horizon]. Evaluation is right-continuous at
// interior breakpoints; the domain end takes the left limit. Immutable after
// construction.
class WeightSpec {
  public:
    WeightSpec() = default;

    WeightSpec(std::vector<WeightPiece> pieces, double horizon, double start = 0.0)
        : start_(start), end_(horizon), pieces_(std::move(pieces)) {
        build_cells();
    }

    static WeightSpec constant_pieces(const std::vector<double>& breakpoints,
                                      const std::vector<double>& values) {
        if (breakpoints.size() < 2 || values.size() + 1 != breakpoints.size())
            throw domain_error("constant_pieces: need n+1 breakpoints for n values");
        std::vector<WeightPiece> ps;
        for (std::size_t i = 0; i < values.size(); ++i) {
            WeightPiece p;
            p.from = breakpoints[i];
            p.to = breakpoints[i + 1];
            p.kind = PieceKind::Constant;
            p.poly.c = {values[i]};
            ps.push_back(std::move(p));
        }
        return WeightSpec(std::move(ps), breakpoints.back(), breakpoints.front());
    }

    double start() const { return start_; }
    double horizon() const { return end_; }
    double span() const { return end_ - start_; }
    const std::vector<WeightPiece>& pieces() const { return pieces_; }

    // Cell boundaries (piece edges plus sample nodes): integration must not step
    // across any of these.
    const std::vector<double>& breakpoints() const { return bounds_; }

    // Interior points where the weight value jumps (left limit != right limit).
    // Used to exclude finite-difference stencils that straddle a discontinuity.
    std::vector<double> jump_points(double tol = 1e-12) const {
        std::vector<double> out;
        for (std::size_t i = 1; i + 1 < bounds_.size(); ++i) {
            const Cell& l = cells_[i - 1];
            const Cell& r = cells_[i];
            const double lv = l.p.eval(l.t1 - l.t0);
            const double rv = r.p.eval(0.0);
            if (std::abs(lv - rv) > tol * (1.0 + std::abs(lv) + std::abs(rv)))
                out.push_back(bounds_[i]);
        }
        return out;
    }

    double eval(double t) const {
        const Cell& c = cell_at(t);
        return c.p.eval(t - c.t0);
    }

    // A+(t1, t2), the integral of the positive part.
    double cum_pos(double t1, double t2) const { return cum_part(t1, t2, +1); }
    // A-(t1, t2), the integral of the negative part.
    double cum_neg(double t1, double t2) const { return cum_part(t1, t2, -1); }

    // Integral over [a, b] of A+(c, xi) d xi (exact per cell).
    double iter_pos_from(double c, double a, double b) const {
        return iter_from(c, a, b, +1);
    }
    double iter_neg_from(double c, double a, double b) const {
        return iter_from(c, a, b, -1);
    }
    // Integral over [a, b] of A+(xi, c) d xi, for xi <= c.
    double iter_pos_to(double c, double a, double b) const {
        check_order(a, b);
        check_order(b, c);
        // A+(xi, c) = A+(start, c) - A+(start, xi)
        const double head = cum_pos(start_, c);
        return (b - a) * head - iter_from(start_, a, b, +1);
    }

    // Essential supremum of the positive part. For sampled pieces this is the
    // maximum over the sample nodes (linear interpolation attains it there).
    double sup_pos() const {
        double m = 0.0;
        for (const auto& sc : signed_cells_) {
            if (sc.sign <= 0) continue;
            if (sc.p.c.size() <= 1) {
                m = std::max(m, sc.p.c.empty() ? 0.0 : sc.p.c[0]);
            } else if (sc.p.c.size() == 2) {
                m = std::max({m, sc.p.eval(0.0), sc.p.eval(sc.t1 - sc.t0)});
            } else {
                m = std::max(m, maximize_grid_golden([&](double s) { return sc.p.eval(s); }, 0.0,
                                                     sc.t1 - sc.t0, 512, 1e-12));
            }
        }
        return m;
    }

    // Check the positive/negative/positive hump pattern and return its markers.
    SignStructure validate_sign_structure() const {
        struct Run {
            int sign;
            double t0, t1;
        };
        std::vector<Run> runs;
        for (const auto& sc : signed_cells_) {
            if (sc.sign == 0) continue;
            if (!runs.empty() && runs.back().sign == sc.sign) {
                runs.back().t1 = sc.t1;
            } else {
                runs.push_back({sc.sign, sc.t0, sc.t1});
            }
        }
        const bool has_pos = std::any_of(runs.begin(), runs.end(), [](const Run& r) { return r.sign > 0; });
        const bool has_neg = std::any_of(runs.begin(), runs.end(), [](const Run& r) { return r.sign < 0; });
        if (!has_pos || !has_neg)
            throw sign_structure_error("weight must change sign: it is " +
                                       std::string(has_pos ? "nonnegative" : (has_neg ? "nonpositive" : "zero")) +
                                       " on the whole interval");
        if (runs.front().sign < 0 || runs.back().sign < 0)
            throw sign_structure_error(
                "weight sign pattern is not positive/negative/positive: it starts or ends negative");
        const std::size_t negs =
            static_cast<std::size_t>(std::count_if(runs.begin(), runs.end(), [](const Run& r) { return r.sign < 0; }));
        if (negs > 1)
            throw unsupported_structure_error("weight has " + std::to_string(negs) +
                                              " negative humps; only one is supported");
        if (runs.size() != 3 || runs[1].sign >= 0)
            throw sign_structure_error("weight sign pattern is not positive/negative/positive");
        SignStructure s;
        s.t0 = runs[0].t0;
        s.sigma = runs[1].t0;
        s.tau = runs[1].t1;
        s.tT = runs[2].t1;
        return s;
    }

  private:
    struct Cell {
        double t0, t1;
        Poly p;  // local variable s = t - t0
    };
    struct SignedCell {
        double t0, t1;
        Poly p;
        int sign;  // -1, 0, +1 on the open cell
    };

    static void check_order(double a, double b) {
        if (!(a <= b)) throw domain_error("integral bounds out of order");
    }

    void build_cells() {
        if (pieces_.empty()) throw domain_error("WeightSpec: no pieces");
        if (!(start_ < end_)) throw domain_error("WeightSpec: empty domain");
        std::stable_sort(pieces_.begin(), pieces_.end(),
                         [](const WeightPiece& a, const WeightPiece& b) { return a.from < b.from; });
        const double scale = std::max(1.0, std::abs(end_));
        if (std::abs(pieces_.front().from - start_) > 1e-12 * scale ||
            std::abs(pieces_.back().to - end_) > 1e-12 * scale)
            throw domain_error("WeightSpec: pieces do not span the domain");
        double cursor = start_;
        for (auto& piece : pieces_) {
            if (std::abs(piece.from - cursor) > 1e-12 * scale)
                throw domain_error("WeightSpec: pieces have a gap or overlap");
            if (!(piece.to > piece.from)) throw domain_error("WeightSpec: empty piece");
            cursor = piece.to;
            if (piece.kind == PieceKind::Samples) {
                if (piece.ts.size() != piece.vs.size() || piece.ts.size() < 2)
                    throw domain_error("WeightSpec: sampled piece needs >= 2 nodes");
                if (std::abs(piece.ts.front() - piece.from) > 1e-12 * scale ||
                    std::abs(piece.ts.back() - piece.to) > 1e-12 * scale)
                    throw domain_error("WeightSpec: sample nodes must span the piece");
                for (std::size_t i = 0; i + 1 < piece.ts.size(); ++i) {
                    if (!(piece.ts[i] < piece.ts[i + 1]))
                        throw domain_error("WeightSpec: sample times must increase");
                    Cell c;
                    c.t0 = piece.ts[i];
                    c.t1 = piece.ts[i + 1];
                    const double slope = (piece.vs[i + 1] - piece.vs[i]) / (c.t1 - c.t0);
                    c.p.c = {piece.vs[i], slope};
                    cells_.push_back(std::move(c));
                }
            } else {
                Cell c;
                c.t0 = piece.from;
                c.t1 = piece.to;
                c.p = piece.poly;
                if (c.p.c.empty()) c.p.c = {0.0};
                cells_.push_back(std::move(c));
            }
        }
        bounds_.reserve(cells_.size() + 1);
        bounds_.push_back(cells_.front().t0);
        for (const auto& c : cells_) bounds_.push_back(c.t1);

        // Split cells at interior sign changes so each signed cell has one sign.
        for (const auto& c : cells_) {
            std::vector<double> cuts = {c.t0};
            if (c.p.c.size() > 1) {
                for (double r : c.p.roots_in(0.0, c.t1 - c.t0))
                    if (r > 1e-14 && r < (c.t1 - c.t0) - 1e-14) cuts.push_back(c.t0 + r);
            }
            cuts.push_back(c.t1);
            std::sort(cuts.begin(), cuts.end());
            for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
                if (!(cuts[i + 1] > cuts[i])) continue;
                SignedCell sc;
                sc.t0 = cuts[i];
                sc.t1 = cuts[i + 1];
                // shift the polynomial's local variable to sc.t0
                sc.p = shift_poly(c.p, sc.t0 - c.t0);
                const double mid = sc.p.eval(0.5 * (sc.t1 - sc.t0));
                sc.sign = mid > 0.0 ? 1 : (mid < 0.0 ? -1 : 0);
                signed_cells_.push_back(std::move(sc));
            }
        }
    }

    static Poly shift_poly(const Poly& p, double d) {
        // q(s) = p(s + d) via repeated synthetic division
        Poly q = p;
        if (d == 0.0 || q.c.size() <= 1) return q;
        const std::size_t n = q.c.size();
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = n - 1; j + 1 > i + 1; --j) q.c[j - 1] += d * q.c[j];
        return q;
    }

    const Cell& cell_at(double t) const {
        const double scale = std::max(1.0, std::abs(end_));
        if (t < start_ - 1e-12 * scale || t > end_ + 1e-12 * scale)
            throw domain_error("weight evaluated outside its domain");
        t = std::clamp(t, start_, end_);
        auto it = std::upper_bound(bounds_.begin(), bounds_.end(), t);
        std::size_t idx = static_cast<std::size_t>(it - bounds_.begin());
        if (idx == 0) idx = 1;
        if (idx > cells_.size()) idx = cells_.size();
        return cells_[idx - 1];
    }

    // Integral of the positive (part=+1) or negative (part=-1) part over [t1, t2].
    double cum_part(double t1, double t2, int part) const {
        check_order(t1, t2);
        const double scale = std::max(1.0, std::abs(end_));
        if (t1 < start_ - 1e-12 * scale || t2 > end_ + 1e-12 * scale)
            throw domain_error("integral bounds outside the weight domain");
        t1 = std::clamp(t1, start_, end_);
        t2 = std::clamp(t2, start_, end_);
        double acc = 0.0;
        for (std::size_t i = 0; i < signed_cells_.size(); ++i) {
            const auto& sc = signed_cells_[i];
            if (sc.t1 <= t1 || sc.t0 >= t2) continue;
            if (sc.sign != part) continue;
            const double lo = std::max(t1, sc.t0), hi = std::min(t2, sc.t1);
            acc += static_cast<double>(part) * sc.p.integrate(lo - sc.t0, hi - sc.t0);
        }
        return acc;
    }

    // Integral over [a, b] of A_part(c, xi) d xi, where A_part(c, xi) is the
    // cumulative positive/negative part from c (c <= a). Exact per signed cell.
    double iter_from(double c, double a, double b, int part) const {
        check_order(c, a);
        check_order(a, b);
        if (a == b) return 0.0;
        double acc = 0.0;
        for (const auto& sc : signed_cells_) {
            if (sc.t1 <= a || sc.t0 >= b) continue;
            const double lo = std::max(a, sc.t0), hi = std::min(b, sc.t1);
            // within the cell: A(c, xi) = A(c, ref) + [P(xi) - P(ref)], ref = max(c, sc.t0)
            const double ref = std::max(c, sc.t0);
            const double head = (part > 0) ? cum_pos(c, ref) : cum_neg(c, ref);
            acc += head * (hi - lo);
            if (sc.sign == part) {
                Poly prim = sc.p.antiderivative();  // local antiderivative, prim(0) = 0
                Poly dbl = prim.antiderivative();
                acc += static_cast<double>(part) *
                       (dbl.eval(hi - sc.t0) - dbl.eval(lo - sc.t0) - prim.eval(ref - sc.t0) * (hi - lo));
            }
        }
        return acc;
    }

    double start_ = 0.0;
    double end_ = 0.0;
    std::vector<WeightPiece> pieces_;
    std::vector<Cell> cells_;
    std::vector<double> bounds_;
    std::vector<SignedCell> signed_cells_;
};

// lambda * a+(t) - mu * a-(t): the weight actually seen by the differential
// equation once the two dispersal parameters are fixed.
class ScaledWeight {
  public:
    ScaledWeight() = default;
    ScaledWeight(WeightSpec base, double lambda, double mu)
        : base_(std::move(base)), lambda_(lambda), mu_(mu) {
        if (!(lambda > 0.0) || !(mu > 0.0))
            throw domain_error("ScaledWeight: lambda and mu must be positive");
    }

    const WeightSpec& base() const { return base_; }
    double lambda() const { return lambda_; }
    double mu() const { return mu_; }

    double eval(double t) const {
        const double v = base_.eval(t);
        return v >= 0.0 ? lambda_ * v : mu_ * v;
    }

    double cum_pos(double t1, double t2) const { return lambda_ * base_.cum_pos(t1, t2); }
    double cum_neg(double t1, double t2) const { return mu_ * base_.cum_neg(t1, t2); }
    const std::vector<double>& breakpoints() const { return base_.breakpoints(); }

  private:
    WeightSpec base_;
    double lambda_ = 1.0;
    double mu_ = 1.0;
};

} // namespace nshoot
