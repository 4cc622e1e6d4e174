#include "fockcis/numerics.hpp"

#include <algorithm>
#include <complex>
#include <sstream>

namespace fockcis {

double normalize_angle(double a) {
    if (!std::isfinite(a)) return 0.0;
    a = std::fmod(a, 2.0 * kPi);
    if (a <= -kPi) a += 2.0 * kPi;
    if (a > kPi) a -= 2.0 * kPi;
    return a;
}

double LogReal::value() const {
    if (sign == 0) return 0.0;
    if (log_mag > kOverflowLogMag) {
        std::ostringstream os;
        os << "LogReal::value: log-magnitude " << log_mag
           << " exceeds overflow threshold " << kOverflowLogMag;
        throw std::overflow_error(os.str());
    }
    return sign * std::exp(log_mag);
}

LogReal LogReal::operator/(const LogReal& o) const {
    if (o.sign == 0) throw std::domain_error("LogReal: division by zero");
    if (sign == 0) return {};
    return {log_mag - o.log_mag, sign * o.sign, cancelled || o.cancelled};
}

LogComplex LogComplex::from_value(double re, double im) {
    if (re == 0.0 && im == 0.0) return {};
    return {std::log(std::hypot(re, im)), std::atan2(im, re)};
}

LogComplex LogComplex::operator/(const LogComplex& o) const {
    if (o.is_zero()) throw std::domain_error("LogComplex: division by zero");
    if (is_zero()) return {};
    return {log_mag - o.log_mag, normalize_angle(phase - o.phase)};
}

std::pair<double, double> LogComplex::value() const {
    if (is_zero()) return {0.0, 0.0};
    if (log_mag > kOverflowLogMag) {
        std::ostringstream os;
        os << "LogComplex::value: log-magnitude " << log_mag
           << " exceeds overflow threshold " << kOverflowLogMag;
        throw std::overflow_error(os.str());
    }
    double m = std::exp(log_mag);
    return {m * std::cos(phase), m * std::sin(phase)};
}

void LogSumAccumulator::add(const LogReal& t) {
    if (t.sign == 0) return;
    any_ = true;
    if (t.log_mag > max_lm_) {
        double scale = (max_lm_ == kNegInf) ? 0.0 : std::exp(max_lm_ - t.log_mag);
        acc_ = acc_ * scale + t.sign;
        abs_acc_ = abs_acc_ * scale + 1.0;
        max_lm_ = t.log_mag;
    } else {
        double e = std::exp(t.log_mag - max_lm_);
        acc_ += t.sign * e;
        abs_acc_ += e;
    }
}

LogReal LogSumAccumulator::total() const {
    if (!any_) return {};
    if (std::fabs(acc_) < kCancelRel) {
        LogReal r{};
        r.cancelled = true;
        return r;
    }
    return {max_lm_ + std::log(std::fabs(acc_)), acc_ < 0 ? -1 : +1, false};
}

void ComplexLogSumAccumulator::add(const LogComplex& t) {
    if (t.is_zero()) return;
    any_ = true;
    if (t.log_mag > max_lm_) {
        double scale = (max_lm_ == kNegInf) ? 0.0 : std::exp(max_lm_ - t.log_mag);
        re_ = re_ * scale + std::cos(t.phase);
        im_ = im_ * scale + std::sin(t.phase);
        max_lm_ = t.log_mag;
    } else {
        double e = std::exp(t.log_mag - max_lm_);
        re_ += e * std::cos(t.phase);
        im_ += e * std::sin(t.phase);
    }
}

LogComplex ComplexLogSumAccumulator::total() const {
    if (!any_) return {};
    double mag = std::hypot(re_, im_);
    if (mag < kCancelRel) return {};
    return {max_lm_ + std::log(mag), std::atan2(im_, re_)};
}

LogReal log_sum_exp(const std::vector<LogReal>& terms) {
    LogSumAccumulator acc;
    for (const auto& t : terms) acc.add(t);
    return acc.total();
}

LogComplex complex_log_sum(const std::vector<LogComplex>& terms) {
    ComplexLogSumAccumulator acc;
    for (const auto& t : terms) acc.add(t);
    return acc.total();
}

namespace {

// 15-point Gauss-Legendre abscissas/weights on [-1, 1].
constexpr int kGLOrder = 15;
constexpr double kGLNode[kGLOrder] = {
    -0.9879925180204854, -0.9372733924007059, -0.8482065834104272,
    -0.7244177313601700, -0.5709721726085388, -0.3941513470775634,
    -0.2011940939974345, 0.0,
    0.2011940939974345,  0.3941513470775634,  0.5709721726085388,
    0.7244177313601700,  0.8482065834104272,  0.9372733924007059,
    0.9879925180204854};
constexpr double kGLWeight[kGLOrder] = {
    0.0307532419961173, 0.0703660474881081, 0.1071592204671719,
    0.1395706779261543, 0.1662692058169939, 0.1861610000155622,
    0.1984314853271116, 0.2025782419255613, 0.1984314853271116,
    0.1861610000155622, 0.1662692058169939, 0.1395706779261543,
    0.1071592204671719, 0.0703660474881081, 0.0307532419961173};

// log of integral over [a, b] of e^{g(t) - g_ref} dt by a single GL-15 rule.
double panel_once(const std::function<double(double)>& g, double a, double b,
                  double g_ref) {
    double half = 0.5 * (b - a);
    double mid = 0.5 * (a + b);
    LogSumAccumulator acc;
    for (int i = 0; i < kGLOrder; ++i) {
        double gv = g(mid + half * kGLNode[i]);
        if (gv == kNegInf) continue;
        acc.add(LogReal::from_log(gv - g_ref + std::log(kGLWeight[i] * half)));
    }
    LogReal t = acc.total();
    return t.sign == 0 ? kNegInf : t.log_mag;
}

// Adaptive dyadic refinement of one panel. `floor_lm` is a noise floor:
// contributions below it need no further accuracy.
double panel_adaptive(const std::function<double(double)>& g, double a,
                      double b, double g_ref, double floor_lm, int depth) {
    double coarse = panel_once(g, a, b, g_ref);
    if (depth >= 26) return coarse;
    double mid = 0.5 * (a + b);
    double l = panel_once(g, a, mid, g_ref);
    double r = panel_once(g, mid, b, g_ref);
    LogSumAccumulator acc;
    acc.add(LogReal::from_log(l));
    acc.add(LogReal::from_log(r));
    LogReal fine = acc.total();
    double fine_lm = fine.sign == 0 ? kNegInf : fine.log_mag;
    if (fine_lm == kNegInf && coarse == kNegInf) return kNegInf;
    if (fine_lm < floor_lm && coarse < floor_lm) return fine_lm;
    if (fine_lm != kNegInf && coarse != kNegInf &&
        std::fabs(fine_lm - coarse) < 1e-11)
        return fine_lm;
    double lr = panel_adaptive(g, a, mid, g_ref, floor_lm, depth + 1);
    double rr = panel_adaptive(g, mid, b, g_ref, floor_lm, depth + 1);
    LogSumAccumulator acc2;
    acc2.add(LogReal::from_log(lr));
    acc2.add(LogReal::from_log(rr));
    LogReal t = acc2.total();
    return t.sign == 0 ? kNegInf : t.log_mag;
}

constexpr double kTailDrop = 34.0;   // e^-34 relative tail cutoff
constexpr int kMaxPanels = 4096;     // per side

}  // namespace

LogReal laplace_quadrature(const std::function<double(double)>& g,
                           double peak_hint, double width_hint) {
    if (!(width_hint > 0.0) || !std::isfinite(peak_hint))
        throw std::invalid_argument("laplace_quadrature: bad hints");

    // Reference level; keeps the computation shift-invariant. If the hint
    // lands on a cut part of the domain, probe nearby.
    double g_ref = g(peak_hint);
    if (g_ref == kNegInf) {
        for (double s : {0.5, -0.5, 1.0, -1.0, 2.0, -2.0}) {
            g_ref = g(peak_hint + s * width_hint);
            if (g_ref != kNegInf) break;
        }
        if (g_ref == kNegInf)
            throw std::invalid_argument(
                "laplace_quadrature: integrand is -inf near peak_hint");
    }

    LogSumAccumulator total;  // relative to g_ref
    auto running_lm = [&]() {
        LogReal t = total.total();
        return t.sign == 0 ? kNegInf : t.log_mag;
    };

    for (int side = 0; side < 2; ++side) {
        int converged = 0;
        for (int k = 0; k < kMaxPanels; ++k) {
            double a, b;
            if (side == 0) {
                a = peak_hint + k * width_hint;
                b = a + width_hint;
            } else {
                b = peak_hint - k * width_hint;
                a = b - width_hint;
            }
            double floor_lm =
                running_lm() == kNegInf ? kNegInf : running_lm() - kTailDrop - 12.0;
            double contrib = panel_adaptive(g, a, b, g_ref, floor_lm, 0);
            total.add(LogReal::from_log(contrib));
            double tot = running_lm();
            if (tot != kNegInf &&
                (contrib == kNegInf || contrib < tot - kTailDrop)) {
                // require two consecutive quiet panels before stopping the side
                if (++converged >= 2) break;
            } else {
                converged = 0;
            }
            if (k == kMaxPanels - 1) {
                LogReal partial = total.total();
                if (partial.sign != 0) partial.log_mag += g_ref;
                std::ostringstream os;
                os << "laplace_quadrature: no convergence after " << kMaxPanels
                   << " panels on " << (side == 0 ? "right" : "left")
                   << " side (peak_hint=" << peak_hint
                   << ", width_hint=" << width_hint << ")";
                throw QuadratureError(os.str(), partial);
            }
        }
    }

    LogReal res = total.total();
    if (res.sign == 0)
        throw std::invalid_argument("laplace_quadrature: integral vanished");
    res.log_mag += g_ref;
    return res;
}

double monotone_root(const std::function<double(double)>& f, double target,
                     double lo, double hi) {
    if (!(lo <= hi))
        throw std::invalid_argument("monotone_root: bracket.lo > bracket.hi");
    const double tol = 1e-12 * std::max(1.0, std::fabs(target));
    double flo = f(lo) - target;
    if (std::fabs(flo) <= tol) return lo;
    double fhi = f(hi) - target;
    if (std::fabs(fhi) <= tol) return hi;
    if (flo > 0.0) {
        std::ostringstream os;
        os << "monotone_root: lower endpoint " << lo << " has f above target "
           << target;
        throw std::invalid_argument(os.str());
    }
    if (fhi < 0.0) {
        std::ostringstream os;
        os << "monotone_root: upper endpoint " << hi << " has f below target "
           << target;
        throw std::invalid_argument(os.str());
    }

    double x = lo;
    for (int it = 0; it < 300; ++it) {
        // Secant candidate, clamped into the bracket interior; fall back to
        // bisection when degenerate or out of range.
        double xs = (fhi != flo) ? lo - flo * (hi - lo) / (fhi - flo)
                                 : 0.5 * (lo + hi);
        double xm = 0.5 * (lo + hi);
        x = (xs > lo && xs < hi) ? xs : xm;
        // Alternate with plain bisection to guarantee bracket shrinkage.
        if (it % 2 == 1) x = xm;
        double fx = f(x) - target;
        if (std::fabs(fx) <= tol) return x;
        if (fx < 0.0) {
            lo = x;
            flo = fx;
        } else {
            hi = x;
            fhi = fx;
        }
        if (hi - lo < 1e-300) break;
    }
    return 0.5 * (lo + hi);
}

}  // namespace fockcis
