// oracles.hpp — independent test oracles: erf-based closed forms for the
// Gaussian-weight integrals, an all-pairs separation scan, and a least
// squares slope. These deliberately avoid the library's own evaluation
// paths.

#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "fockcis/geometry.hpp"
#include "fockcis/numerics.hpp"

namespace oracles {

// log of integral from a to inf of e^{-b u^2} du = log( sqrt(pi/(4b)) erfc(a sqrt(b)) ).
// Valid while erfc does not underflow (a sqrt(b) <= ~26).
inline double gauss_tail_log(double a, double b) {
    return 0.5 * std::log(fockcis::kPi / (4.0 * b)) +
           std::log(std::erfc(a * std::sqrt(b)));
}

// log ||z^n||^2 for phi_2(r) = (log+ r)^2, p = 2:
//   ||z^n||^2 = 2 pi [ 1/(2n+2) + e^{(n+1)^2/2} * integral_{-(n+1)/2}^inf e^{-2u^2} du ].
inline double monomial_sq_norm_log_phi2_p2(int n) {
    double a = 2.0 * n + 2.0;
    double peak = (n + 1.0) * (n + 1.0) / 2.0;
    double tail_log = gauss_tail_log(-(n + 1.0) / 2.0, 2.0);
    // log( 1/a + e^{peak + tail_log} ) done in the log domain
    double big = peak + tail_log;
    double small = -std::log(a);
    double m = std::max(big, small);
    double sum = m + std::log(std::exp(big - m) + std::exp(small - m));
    return std::log(2.0 * fockcis::kPi) + sum;
}

// All-pairs minimum of d_log (brute force).
inline double separation_brute_force(const fockcis::PointSequence& g) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < g.size(); ++i)
        for (std::size_t j = i + 1; j < g.size(); ++j)
            best = std::min(best, fockcis::log_distance(g[i], g[j]));
    return best;
}

// Ordinary least squares slope of y against x.
inline double ols_slope(const std::vector<double>& x,
                        const std::vector<double>& y) {
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= x.size();
    my /= y.size();
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        num += (x[i] - mx) * (y[i] - my);
        den += (x[i] - mx) * (x[i] - mx);
    }
    return num / den;
}

// Deterministic xorshift generator for property tests.
struct Rng {
    unsigned long long s;
    explicit Rng(unsigned long long seed) : s(seed ? seed : 1) {}
    double uniform(double lo, double hi) {
        s ^= s << 13;
        s ^= s >> 7;
        s ^= s << 17;
        double u = static_cast<double>(s % (1ull << 53)) / (1ull << 53);
        return lo + (hi - lo) * u;
    }
};

}  // namespace oracles
