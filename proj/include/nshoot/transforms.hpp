#pragma once

#include <cmath>
#include <vector>

#include "nshoot/integrate.hpp"

namespace nshoot {

// Even reflection about the left endpoint, extended periodically: a Neumann
// solution on [t0, t0+L] becomes a 2L-periodic function. Sample-grid values are
// produced by exact index folding, so grid periodicity is exact.
class PeriodicExtension {
  public:
    PeriodicExtension(Trajectory base, std::size_t n_periods, std::size_t samples_per_period = 2048)
        : base_(std::move(base)), periods_(n_periods) {
        if (!base_.forward()) throw domain_error("periodic_extend: base must be a forward trajectory");
        t0_ = base_.t_front();
        L_ = base_.t_back() - base_.t_front();
        if (!(L_ > 0.0)) throw domain_error("periodic_extend: empty base span");
        const std::size_t m = std::max<std::size_t>(2, samples_per_period / 2);  // nodes per half period
        // grid over [-L, (2n-1)L] with spacing L/m
        const std::size_t total = 2 * m * n_periods;  // number of cells
        s_grid_.reserve(total + 1);
        u_.reserve(total + 1);
        const long mm = static_cast<long>(m);
        for (std::size_t k = 0; k <= total; ++k) {
            const long idx = static_cast<long>(k) - mm;  // grid index relative to s = 0
            const long wrapped = ((idx % (2 * mm)) + 2 * mm) % (2 * mm);
            const long folded = wrapped <= mm ? wrapped : 2 * mm - wrapped;
            const double s = static_cast<double>(idx) * (L_ / static_cast<double>(m));
            const double t = t0_ + static_cast<double>(folded) * (L_ / static_cast<double>(m));
            s_grid_.push_back(s);
            u_.push_back(base_.eval(std::min(t, base_.t_back())).x);
        }
    }

    double period() const { return 2.0 * L_; }
    double half_period() const { return L_; }
    std::size_t periods() const { return periods_; }
    const std::vector<double>& sample_times() const { return s_grid_; }
    const std::vector<double>& sample_values() const { return u_; }
    const Trajectory& base() const { return base_; }

    // Fold an arbitrary offset s (relative to t0) into the base interval.
    double fold(double s) const {
        double r = std::fmod(s, 2.0 * L_);
        if (r < 0.0) r += 2.0 * L_;
        if (r > L_) r = 2.0 * L_ - r;
        return t0_ + r;
    }

    double eval(double s) const { return base_.eval(fold(s)).x; }

    double eval_derivative(double s) const {
        double r = std::fmod(s, 2.0 * L_);
        if (r < 0.0) r += 2.0 * L_;
        const double sign = r > L_ ? -1.0 : 1.0;
        return sign * base_.eval(fold(s)).y;
    }

  private:
    Trajectory base_;
    std::size_t periods_;
    double t0_ = 0.0, L_ = 0.0;
    std::vector<double> s_grid_;
    std::vector<double> u_;
};

inline PeriodicExtension periodic_extend(const Trajectory& u, std::size_t n_periods,
                                         double neumann_tol = 1e-6,
                                         std::size_t samples_per_period = 2048) {
    if (n_periods == 0) throw domain_error("periodic_extend: need at least one period");
    if (std::abs(u.front().y) > neumann_tol || std::abs(u.back().y) > neumann_tol)
        throw domain_error("periodic_extend: base does not satisfy the Neumann tolerance");
    return PeriodicExtension(u, n_periods, samples_per_period);
}

// Mismatch of second-order one-sided difference quotients at the gluing offsets
// s = 0 and s = +-L. The reflection of a Neumann solution is C^1, so these
// vanish up to the boundary residual and the O(h^3) quotient error.
inline double gluing_defect(const PeriodicExtension& ext, double h = 2e-4) {
    const auto one_sided = [&](double s0, double dir) {
        return dir *
               (-3.0 * ext.eval(s0) + 4.0 * ext.eval(s0 + dir * h) - ext.eval(s0 + 2.0 * dir * h)) /
               (2.0 * h);
    };
    double worst = 0.0;
    for (double s0 : {0.0, ext.half_period(), -ext.half_period()}) {
        const double d = std::abs(one_sided(s0, +1.0) - one_sided(s0, -1.0));
        worst = std::max(worst, d);
    }
    return worst;
}

// Max residual of u'' + a~(s) g(u) = 0 over one full period of the extension,
// where a~ is the even periodic extension of the problem's scaled weight. The
// check runs at base knot-interval midpoints (never across weight breakpoints)
// and covers both the direct and the reflected copy by evenness.
inline double periodic_ode_residual(const ProblemDef& p, const PeriodicExtension& ext,
                                    std::size_t samples = 512) {
    const double base_res = collocation_residual(p, ext.base(), samples);
    return std::max(base_res, gluing_defect(ext));
}

// Annular Neumann problem data: dimension, radii and a radial weight with the
// positive/negative/positive pattern on [R_i, R_e].
struct RadialSpec {
    int dimension = 2;
    double r_inner = 1.0;
    double r_outer = 2.0;
    WeightSpec weight;  // on [r_inner, r_outer]
};

// Change of variables t = h(r) flattening the radial Laplacian.
struct RadialMaps {
    int N = 2;
    double r_inner = 1.0;
    double r_outer = 2.0;
    double T = 0.0;

    double h(double r) const {
        if (N == 2) return std::log(r / r_inner);
        const double p = 2.0 - static_cast<double>(N);
        return (std::pow(r_inner, p) - std::pow(r, p)) / (static_cast<double>(N) - 2.0);
    }
    double h_inv(double t) const {
        if (N == 2) return r_inner * std::exp(t);
        const double p = 2.0 - static_cast<double>(N);
        return std::pow(std::pow(r_inner, p) - (static_cast<double>(N) - 2.0) * t, 1.0 / p);
    }
};

struct RadialReduction {
    RadialMaps maps;
    WeightSpec reduced;       // sampled weight on [0, T]
    SignStructure marks;      // sign markers of the reduced weight
};

// Reduce the annular problem to the flat interval [0, T]: T = h(R_e) and
// a(t) = r(t)^{2(N-1)} W(r(t)), materialized as a sampled weight.
inline RadialReduction radial_reduce(const RadialSpec& rs, std::size_t grid_n = 2048) {
    if (rs.dimension < 2) throw domain_error("radial_reduce: dimension must be at least 2");
    if (!(rs.r_inner > 0.0 && rs.r_outer > rs.r_inner))
        throw domain_error("radial_reduce: need 0 < R_i < R_e");
    if (grid_n < 16) throw domain_error("radial_reduce: grid too small");

    RadialReduction out;
    out.maps.N = rs.dimension;
    out.maps.r_inner = rs.r_inner;
    out.maps.r_outer = rs.r_outer;
    out.maps.T = out.maps.h(rs.r_outer);

    WeightPiece piece;
    piece.from = 0.0;
    piece.to = out.maps.T;
    piece.kind = PieceKind::Samples;
    piece.ts.reserve(grid_n + 1);
    piece.vs.reserve(grid_n + 1);
    for (std::size_t k = 0; k <= grid_n; ++k) {
        const double t =
            out.maps.T * static_cast<double>(k) / static_cast<double>(grid_n);
        const double r = std::min(out.maps.h_inv(t), rs.r_outer);
        piece.ts.push_back(t);
        piece.vs.push_back(std::pow(r, 2.0 * (rs.dimension - 1)) * rs.weight.eval(r));
    }
    piece.ts.front() = 0.0;
    piece.ts.back() = out.maps.T;
    out.reduced = WeightSpec({piece}, out.maps.T);
    out.marks = out.reduced.validate_sign_structure();
    return out;
}

struct RadialLift {
    std::vector<double> r;
    std::vector<double> u;
    double max_interior_residual = 0.0;  // FD residual away from weight jumps
    std::size_t excluded_stencils = 0;   // stencils straddling a weight jump
    double boundary_residual_inner = 0.0;
    double boundary_residual_outer = 0.0;
};

// Lift a trajectory of the reduced problem back to the annulus: U(r) = v(h(r)).
// The residual of U'' + (N-1)/r U' + W_{lambda,mu}(r) g(U) is measured with
// second-order central differences on a uniform radius grid. Stencils where the
// weight effectively jumps (an exact piece jump, or a sampled ramp whose local
// variation approaches the global range) are excluded: the equation only holds
// almost everywhere, and U'' jumps across those radii.
inline RadialLift radial_lift(const Trajectory& v, const ProblemDef& reduced_problem,
                              const RadialSpec& rs, const RadialMaps& maps,
                              std::size_t grid_n = 1000) {
    if (grid_n < 8) throw domain_error("radial_lift: grid too small");
    RadialLift out;
    const double h = (rs.r_outer - rs.r_inner) / static_cast<double>(grid_n);
    out.r.reserve(grid_n + 1);
    out.u.reserve(grid_n + 1);
    for (std::size_t k = 0; k <= grid_n; ++k) {
        const double r = rs.r_inner + h * static_cast<double>(k);
        const double t = std::clamp(maps.h(std::min(r, rs.r_outer)), 0.0, maps.T);
        out.r.push_back(r);
        out.u.push_back(v.eval(t).x);
    }

    const auto scaled_weight = [&](double r) {
        const double wv = rs.weight.eval(r);
        return wv >= 0.0 ? reduced_problem.lambda * wv : reduced_problem.mu * wv;
    };
    const std::vector<double> jumps = rs.weight.jump_points();

    // local weight variation per stencil, against the global range
    std::vector<double> wg(grid_n + 1);
    for (std::size_t k = 0; k <= grid_n; ++k) wg[k] = scaled_weight(out.r[k]);
    double w_lo = wg[0], w_hi = wg[0];
    for (double v_ : wg) {
        w_lo = std::min(w_lo, v_);
        w_hi = std::max(w_hi, v_);
    }
    const double w_range = w_hi - w_lo;

    for (std::size_t k = 1; k < grid_n; ++k) {
        const double r = out.r[k];
        bool excluded = false;
        for (double j : jumps) {
            if (std::abs(r - j) <= h * 1.5) {
                excluded = true;
                break;
            }
        }
        const double local_var =
            std::max(std::abs(wg[k + 1] - wg[k]), std::abs(wg[k] - wg[k - 1]));
        if (local_var > 0.2 * w_range) excluded = true;
        if (excluded) {
            ++out.excluded_stencils;
            continue;
        }
        const double d2 = (out.u[k - 1] - 2.0 * out.u[k] + out.u[k + 1]) / (h * h);
        const double d1 = (out.u[k + 1] - out.u[k - 1]) / (2.0 * h);
        const double res = d2 + (rs.dimension - 1) / r * d1 +
                           scaled_weight(r) * reduced_problem.g.eval_ext(out.u[k]);
        out.max_interior_residual = std::max(out.max_interior_residual, std::abs(res));
    }

    const std::size_t n = grid_n;
    out.boundary_residual_inner =
        std::abs((-3.0 * out.u[0] + 4.0 * out.u[1] - out.u[2]) / (2.0 * h));
    out.boundary_residual_outer =
        std::abs((3.0 * out.u[n] - 4.0 * out.u[n - 1] + out.u[n - 2]) / (2.0 * h));
    return out;
}

} // namespace nshoot
