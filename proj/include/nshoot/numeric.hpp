#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

#include "nshoot/errors.hpp"

namespace nshoot {

inline std::vector<double> linspace(double a, double b, std::size_t n) {
    if (n == 0) return {};
    if (n == 1) return {a};
    std::vector<double> out(n);
    const double h = (b - a) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) out[i] = a + h * static_cast<double>(i);
    out.back() = b;
    return out;
}

// Polynomial in a local variable s, value = sum c[k] * s^k.
struct Poly {
    std::vector<double> c;

    double eval(double s) const {
        double v = 0.0;
        for (std::size_t k = c.size(); k-- > 0;) v = v * s + c[k];
        return v;
    }

    Poly antiderivative() const {
        Poly p;
        p.c.resize(c.size() + 1, 0.0);
        for (std::size_t k = 0; k < c.size(); ++k) p.c[k + 1] = c[k] / static_cast<double>(k + 1);
        return p;
    }

    // Definite integral over the local interval [s0, s1].
    double integrate(double s0, double s1) const {
        const Poly p = antiderivative();
        return p.eval(s1) - p.eval(s0);
    }

    // Roots in [s0, s1], located by sign changes on a fine grid plus bisection.
    std::vector<double> roots_in(double s0, double s1, std::size_t grid = 512) const {
        std::vector<double> out;
        if (!(s0 < s1)) return out;
        double prev_s = s0, prev_v = eval(s0);
        for (std::size_t i = 1; i <= grid; ++i) {
            const double s = s0 + (s1 - s0) * static_cast<double>(i) / static_cast<double>(grid);
            const double v = eval(s);
            if (prev_v == 0.0) {
                out.push_back(prev_s);
            } else if ((prev_v < 0.0) != (v < 0.0)) {
                double lo = prev_s, hi = s, flo = prev_v;
                for (int it = 0; it < 80; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    const double fm = eval(mid);
                    if ((fm < 0.0) == (flo < 0.0)) {
                        lo = mid;
                        flo = fm;
                    } else {
                        hi = mid;
                    }
                }
                out.push_back(0.5 * (lo + hi));
            }
            prev_s = s;
            prev_v = v;
        }
        if (prev_v == 0.0) out.push_back(prev_s);
        return out;
    }
};

// Deterministic, implementation-independent uniform draws. std::uniform_real_distribution
// is not bit-portable across standard libraries, so the mapping from raw 64-bit draws
// to doubles is done by hand.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}

    // splitmix64
    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1).
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform01(); }

    // Log-uniform in [a, b], a > 0.
    double log_uniform(double a, double b) {
        return std::exp(uniform(std::log(a), std::log(b)));
    }

    // Derive an independent stream, e.g. one per trial index.
    Rng fork(std::uint64_t stream) const {
        Rng r(state_ ^ (0xd1342543de82ef95ull * (stream + 1)));
        r.next_u64();
        return r;
    }

  private:
    std::uint64_t state_;
};

// Run fn(i) for i in [0, n) on up to `jobs` threads. Results must be written to
// index-addressed storage by the caller; completion order carries no information.
inline void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& fn) {
    if (n == 0) return;
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const unsigned k = std::max(1u, std::min({jobs == 0 ? hw : jobs, hw, static_cast<unsigned>(n)}));
    if (k == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(k);
    for (unsigned w = 0; w < k; ++w) {
        pool.emplace_back([&, w]() {
            for (std::size_t i = w; i < n; i += k) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

} // namespace nshoot
