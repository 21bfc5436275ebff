#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "nshoot/errors.hpp"
#include "nshoot/roots.hpp"

namespace nshoot {

enum class NonlinKind { Logistic2, Logistic, Samples, Custom };

struct ConditionReport {
    double positivity_margin = 0.0;           // min g over the interior grid
    std::vector<double> g0_deltas;            // probe radii
    std::vector<double> g0_estimates;         // max g(s)/s over (0, delta]
    bool g0_trend_decreasing = false;
    bool g0_pass = false;                     // estimate at delta = 1e-3 below 1e-2 and trend ok
    bool positivity_pass = false;
    double lipschitz_estimate = 0.0;          // max grid slope
};

// g on [0, 1], extended by zero to the whole real line. g(0) = g(1) = 0 and
// g > 0 inside. Immutable; shareable across threads.
class Nonlinearity {
    struct raw_tag {};
    explicit Nonlinearity(raw_tag) {}

  public:
    Nonlinearity() { *this = logistic2(); }

    static Nonlinearity logistic2() {
        Nonlinearity g{raw_tag{}};
        g.kind_ = NonlinKind::Logistic2;
        g.name_ = "logistic2";
        g.core_ = [](double s) { return s * s * (1.0 - s); };
        g.lipschitz_ = 1.0;  // max |g'| on [0,1] attained at s = 1
        g.peak_ = 2.0 / 3.0;
        return g;
    }

    static Nonlinearity logistic() {
        Nonlinearity g{raw_tag{}};
        g.kind_ = NonlinKind::Logistic;
        g.name_ = "logistic";
        g.core_ = [](double s) { return s * (1.0 - s); };
        g.lipschitz_ = 1.0;
        g.peak_ = 0.5;
        return g;
    }

    // Sampled profile with monotone-cubic (Fritsch-Carlson) interpolation.
    // Endpoint values are forced to zero.
    static Nonlinearity from_samples(std::vector<double> s, std::vector<double> v,
                                     double lipschitz_hint = 0.0, std::string name = "samples") {
        if (s.size() != v.size() || s.size() < 3)
            throw domain_error("Nonlinearity samples: need >= 3 nodes");
        if (std::abs(s.front()) > 1e-12 || std::abs(s.back() - 1.0) > 1e-12)
            throw domain_error("Nonlinearity samples: nodes must span [0, 1]");
        for (std::size_t i = 0; i + 1 < s.size(); ++i)
            if (!(s[i] < s[i + 1])) throw domain_error("Nonlinearity samples: nodes must increase");
        s.front() = 0.0;
        s.back() = 1.0;
        v.front() = 0.0;
        v.back() = 0.0;
        for (std::size_t i = 1; i + 1 < v.size(); ++i)
            if (!(v[i] > 0.0)) throw domain_error("Nonlinearity samples: interior values must be positive");
        Nonlinearity g{raw_tag{}};
        g.kind_ = NonlinKind::Samples;
        g.name_ = std::move(name);
        g.samples_s_ = std::move(s);
        g.samples_v_ = std::move(v);
        g.build_pchip();
        auto ss = g.samples_s_;
        auto vv = g.samples_v_;
        auto d = g.pchip_d_;
        g.core_ = [ss, vv, d](double x) {
            auto it = std::upper_bound(ss.begin(), ss.end(), x);
            std::size_t i = static_cast<std::size_t>(it - ss.begin());
            if (i == 0) i = 1;
            if (i >= ss.size()) i = ss.size() - 1;
            const std::size_t k = i - 1;
            const double h = ss[k + 1] - ss[k];
            const double t = (x - ss[k]) / h;
            const double t2 = t * t, t3 = t2 * t;
            const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
            const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
            const double y = h00 * vv[k] + h10 * h * d[k] + h01 * vv[k + 1] + h11 * h * d[k + 1];
            return std::max(0.0, y);
        };
        if (lipschitz_hint > 0.0) {
            g.lipschitz_ = lipschitz_hint;
        } else {
            double m = 0.0;
            const int n = 4096;
            double prev = 0.0;
            for (int i = 1; i <= n; ++i) {
                const double x = static_cast<double>(i) / n;
                const double y = g.core_(x);
                m = std::max(m, std::abs(y - prev) * n);
                prev = y;
            }
            g.lipschitz_ = m;
        }
        g.peak_ = -1.0;  // unknown monotonicity structure
        return g;
    }

    static Nonlinearity custom(std::function<double(double)> core, double lipschitz,
                               std::string name = "custom") {
        if (!core) throw domain_error("Nonlinearity custom: empty function");
        Nonlinearity g{raw_tag{}};
        g.kind_ = NonlinKind::Custom;
        g.name_ = std::move(name);
        g.core_ = std::move(core);
        g.lipschitz_ = lipschitz;
        g.peak_ = -1.0;
        return g;
    }

    NonlinKind kind() const { return kind_; }
    const std::string& name() const { return name_; }
    double lipschitz_bound() const { return lipschitz_; }
    const std::vector<double>& sample_nodes() const { return samples_s_; }
    const std::vector<double>& sample_values() const { return samples_v_; }

    // Zero extension: g(s) for s in [0,1], 0 outside.
    double eval_ext(double s) const {
        if (s < 0.0 || s > 1.0) return 0.0;
        return core_(s);
    }

    double eval_core(double s) const {
        if (s < 0.0 || s > 1.0) throw domain_error("eval_core: s outside [0, 1]");
        return core_(s);
    }

    // g_*(k1, k2): minimum of g over [k1, k2]. Exact for the built-in profiles
    // (single interior maximum, so the minimum sits at an endpoint).
    double g_min(double k1, double k2) const {
        if (!(k1 < k2)) throw domain_error("g_min: need k1 < k2");
        if (k1 < 0.0 || k2 > 1.0) throw domain_error("g_min: interval outside [0, 1]");
        if (peak_ > 0.0) return std::min(core_(k1), core_(k2));
        return minimize_grid_golden([this](double s) { return core_(s); }, k1, k2, 4096, 1e-12);
    }

    // Maximum of g over [0, 1] (grid plus golden refinement; exact for built-ins).
    double g_max() const {
        if (peak_ > 0.0) return core_(peak_);
        return maximize_grid_golden([this](double s) { return core_(s); }, 0.0, 1.0, 4096, 1e-12);
    }

    // Largest delta <= cap such that g(s) <= eps * s on [0, delta], estimated on a
    // grid. Returns 0 when even the smallest probe fails. Heuristic for sampled
    // and custom profiles: values between grid points are not certified.
    double small_slope_radius(double eps, double cap) const {
        if (kind_ == NonlinKind::Logistic2) {
            // g(s)/s = s(1-s) <= delta on [0, delta] for delta <= 1/2
            const double exact = eps >= 0.25 ? 0.5 : 0.5 * (1.0 - std::sqrt(1.0 - 4.0 * eps));
            return std::min(exact, cap);
        }
        const int n = 20000;
        double best = 0.0;
        double running_max = 0.0;
        for (int i = 1; i <= n; ++i) {
            const double s = cap * static_cast<double>(i) / n;
            running_max = std::max(running_max, eval_ext(s) / s);
            if (running_max <= eps) best = s;
            else break;
        }
        return best;
    }

    ConditionReport check_conditions(std::size_t grid_n = 1000) const {
        if (grid_n < 100) throw domain_error("check_conditions: grid_n must be >= 100");
        ConditionReport r;
        r.positivity_margin = std::numeric_limits<double>::infinity();
        double lip = 0.0;
        double prev = eval_ext(0.0);
        for (std::size_t i = 1; i <= grid_n; ++i) {
            const double s = static_cast<double>(i) / static_cast<double>(grid_n);
            const double y = eval_ext(s);
            lip = std::max(lip, std::abs(y - prev) * static_cast<double>(grid_n));
            if (i < grid_n) r.positivity_margin = std::min(r.positivity_margin, y);
            prev = y;
        }
        r.lipschitz_estimate = lip;
        r.positivity_pass = r.positivity_margin > 0.0;
        r.g0_deltas = {1e-1, 1e-2, 1e-3, 1e-4, 1e-5};
        for (double d : r.g0_deltas) {
            double m = 0.0;
            for (std::size_t i = 1; i <= 400; ++i) {
                const double s = d * static_cast<double>(i) / 400.0;
                m = std::max(m, eval_ext(s) / s);
            }
            r.g0_estimates.push_back(m);
        }
        r.g0_trend_decreasing = true;
        for (std::size_t i = 1; i < r.g0_estimates.size(); ++i)
            if (r.g0_estimates[i] > r.g0_estimates[i - 1] * (1.0 + 1e-9)) r.g0_trend_decreasing = false;
        r.g0_pass = r.g0_trend_decreasing && r.g0_estimates[2] <= 1e-2;
        return r;
    }

  private:
    void build_pchip() {
        // Fritsch-Carlson monotone cubic slopes
        const std::size_t n = samples_s_.size();
        std::vector<double> h(n - 1), delta(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            h[i] = samples_s_[i + 1] - samples_s_[i];
            delta[i] = (samples_v_[i + 1] - samples_v_[i]) / h[i];
        }
        pchip_d_.assign(n, 0.0);
        pchip_d_[0] = delta[0];
        pchip_d_[n - 1] = delta[n - 2];
        for (std::size_t i = 1; i + 1 < n; ++i) {
            if (delta[i - 1] * delta[i] <= 0.0) {
                pchip_d_[i] = 0.0;
            } else {
                const double w1 = 2.0 * h[i] + h[i - 1];
                const double w2 = h[i] + 2.0 * h[i - 1];
                pchip_d_[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
            }
        }
    }

    NonlinKind kind_ = NonlinKind::Logistic2;
    std::string name_;
    std::function<double(double)> core_;
    double lipschitz_ = 1.0;
    double peak_ = -1.0;  // location of the single interior maximum, if known
    std::vector<double> samples_s_, samples_v_, pchip_d_;
};

} // namespace nshoot
