// numerics.hpp — scale-safe scalar primitives.
//
// Everything of size e^{phi(z)} in this library is carried on the natural-log
// scale: a signed magnitude (LogReal) or a magnitude+phase pair (LogComplex).
// No intermediate result is exponentiated above log-magnitude ~700, so values
// that would overflow an IEEE double by thousands of orders of magnitude stay
// exact-as-floating throughout.
//
// The quadrature here is Laplace-style: integrals of e^{g(t)} with a single
// dominant peak, evaluated by fixed-order panels expanding outward from the
// peak until the tail falls 34 log-units below the running total.

#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace fockcis {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kPi = 3.14159265358979323846;

// Largest log-magnitude that LogReal::value() will materialize.
inline constexpr double kOverflowLogMag = 700.0;

// Relative threshold below which a signed log-domain sum is declared a
// cancellation (sign 0, cancelled flag set) rather than a tiny value.
inline constexpr double kCancelRel = 1e-13;

// Normalize an angle to (-pi, pi].
double normalize_angle(double a);

// A signed real carried as (log-magnitude, sign). sign==0 iff log_mag==-inf.
struct LogReal {
    double log_mag = kNegInf;
    int sign = 0;
    bool cancelled = false;  // set when a log_sum_exp collapsed below kCancelRel

    static LogReal zero() { return {}; }
    static LogReal from_log(double lm, int s = +1) {
        if (lm == kNegInf || s == 0) return {};
        return {lm, s < 0 ? -1 : +1, false};
    }
    static LogReal from_value(double x) {
        if (x == 0.0) return {};
        return {std::log(std::fabs(x)), x < 0 ? -1 : +1, false};
    }

    bool is_zero() const { return sign == 0; }

    // Materialize. Throws if the magnitude exceeds the overflow threshold.
    double value() const;

    LogReal operator*(const LogReal& o) const {
        if (sign == 0 || o.sign == 0) return {};
        return {log_mag + o.log_mag, sign * o.sign, cancelled || o.cancelled};
    }
    LogReal operator/(const LogReal& o) const;
    LogReal negate() const { return {log_mag, -sign, cancelled}; }

    // Raise |x|^e keeping the sign (only meaningful for sign >= 0 or integer-like use).
    LogReal pow_mag(double e) const {
        if (sign == 0) return {};
        return {log_mag * e, sign, cancelled};
    }
};

// A complex value carried as (log-magnitude, phase), phase in (-pi, pi].
// log_mag == -inf represents zero (phase 0).
struct LogComplex {
    double log_mag = kNegInf;
    double phase = 0.0;

    static LogComplex zero() { return {}; }
    static LogComplex from_log(double lm, double ph) {
        if (lm == kNegInf) return {};
        return {lm, normalize_angle(ph)};
    }
    static LogComplex from_value(double re, double im);

    bool is_zero() const { return log_mag == kNegInf; }

    LogComplex operator*(const LogComplex& o) const {
        if (is_zero() || o.is_zero()) return {};
        return {log_mag + o.log_mag, normalize_angle(phase + o.phase)};
    }
    LogComplex operator/(const LogComplex& o) const;

    LogReal abs() const { return LogReal::from_log(log_mag); }

    // Materialize as (re, im); throws above the overflow threshold.
    std::pair<double, double> value() const;
};

// Signed log-domain sum relative to the running maximum magnitude.
// Empty input yields zero. A result below kCancelRel of the max term
// collapses to zero with the cancelled flag set.
LogReal log_sum_exp(const std::vector<LogReal>& terms);

// Complex log-domain sum; result phase normalized to (-pi, pi].
LogComplex complex_log_sum(const std::vector<LogComplex>& terms);

// Incremental accumulator with the same semantics as log_sum_exp, for loops
// that would rather not build a vector. Rescales on the fly.
class LogSumAccumulator {
  public:
    void add(const LogReal& t);
    LogReal total() const;
    double max_log_mag() const { return max_lm_; }

  private:
    double max_lm_ = kNegInf;
    double acc_ = 0.0;  // sum of sign * e^{lm - max_lm_}
    double abs_acc_ = 0.0;
    bool any_ = false;
};

class ComplexLogSumAccumulator {
  public:
    void add(const LogComplex& t);
    LogComplex total() const;
    double max_log_mag() const { return max_lm_; }

  private:
    double max_lm_ = kNegInf;
    double re_ = 0.0, im_ = 0.0;
    bool any_ = false;
};

// Thrown when the panel expansion of laplace_quadrature fails to converge;
// carries the partial log-integral accumulated so far.
struct QuadratureError : std::runtime_error {
    LogReal partial;
    QuadratureError(const std::string& msg, LogReal p)
        : std::runtime_error(msg), partial(p) {}
};

// log of integral e^{g(t)} dt for a unimodal-dominated exponent g.
//
// Panels of width `width_hint` expand outward from `peak_hint`; each panel is
// a 15-point Gauss-Legendre rule with dyadic refinement. Expansion on a side
// stops once that panel's contribution falls 34 log-units below the running
// total. g may return -inf to cut the domain. The integration is performed
// relative to g(peak_hint), so a constant shift of g shifts the result
// exactly.
LogReal laplace_quadrature(const std::function<double(double)>& g,
                           double peak_hint, double width_hint);

// Solve f(t) == target for strictly increasing f on [lo, hi] by bisection
// with secant acceleration; |f(t)-target| <= 1e-12 * max(1, |target|).
// Throws std::invalid_argument naming the failing endpoint if the bracket
// does not straddle the target.
double monotone_root(const std::function<double(double)>& f, double target,
                     double lo, double hi);

}  // namespace fockcis
