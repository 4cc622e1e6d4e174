#include "fockcis/product.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace fockcis {

LogComplex log_point_diff(const LogPoint& a, const LogPoint& b) {
    if (a.is_origin() && b.is_origin()) return LogComplex::zero();
    if (b.is_origin()) return LogComplex::from_log(a.t, a.theta);
    if (a.is_origin()) return LogComplex::from_log(b.t, b.theta + kPi);

    // a - b = e^{t_b + i th_b} (e^{u + i v} - 1), u = t_a - t_b. Computed with
    // the larger point factored out when it dominates.
    double u = a.t - b.t;
    double v = normalize_angle(a.theta - b.theta);
    if (u < 0.0) {
        LogComplex d = log_point_diff(b, a);
        if (d.is_zero()) return d;
        return LogComplex::from_log(d.log_mag, d.phase + kPi);
    }
    if (u > 36.0) return LogComplex::from_log(a.t, a.theta);
    // e^{u} cos v - 1 = cos v * expm1(u) - 2 sin^2(v/2), cancellation-free.
    double re = std::cos(v) * std::expm1(u) - 2.0 * std::sin(0.5 * v) * std::sin(0.5 * v);
    double im = std::exp(u) * std::sin(v);
    if (re == 0.0 && im == 0.0) return LogComplex::zero();
    return LogComplex::from_log(b.t + std::log(std::hypot(re, im)),
                                b.theta + std::atan2(im, re));
}

namespace {

// log(1 - z/gamma) as LogComplex, for z = e^{t_z + i th_z}, gamma a node.
LogComplex log_one_minus_ratio(const LogPoint& z, const LogPoint& gamma) {
    if (z.is_origin()) return LogComplex::from_log(0.0, 0.0);  // value 1
    double u = z.t - gamma.t;
    double v = normalize_angle(z.theta - gamma.theta);
    if (u > 36.0) return LogComplex::from_log(u, v + kPi);  // ratio dominates
    // 1 - e^u cos v = -expm1(u) cos v + 2 sin^2(v/2), cancellation-free.
    double re = -std::expm1(u) * std::cos(v) +
                2.0 * std::sin(0.5 * v) * std::sin(0.5 * v);
    double im = -std::exp(u) * std::sin(v);
    if (re == 0.0 && im == 0.0) return LogComplex::zero();
    return LogComplex::from_log(std::log(std::hypot(re, im)),
                                std::atan2(im, re));
}

constexpr double kTailMargin = 10.0;

}  // namespace

CanonicalProduct::CanonicalProduct(PointSequence nodes)
    : nodes_(std::move(nodes)) {
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (nodes_[i].is_origin())
            throw std::invalid_argument(
                "CanonicalProduct: the origin cannot be a node");
        if (i + 1 == nodes_.size()) continue;
        const auto& a = nodes_[i];
        const auto& b = nodes_[i + 1];
        if (a.t == b.t && normalize_angle(a.theta - b.theta) == 0.0) {
            std::ostringstream os;
            os << "CanonicalProduct: duplicate node at t=" << a.t;
            throw std::invalid_argument(os.str());
        }
    }
    deriv_cached_.assign(nodes_.size(), 0);
    deriv_cache_.assign(nodes_.size(), LogComplex::zero());
}

std::size_t CanonicalProduct::find_node(const LogPoint& z) const {
    const auto& pts = nodes_.points;
    auto lo = std::lower_bound(
        pts.begin(), pts.end(), z.t,
        [](const LogPoint& q, double t) { return q.t < t; });
    for (auto it = lo; it != pts.end() && it->t == z.t; ++it)
        if (normalize_angle(it->theta - z.theta) == 0.0)
            return static_cast<std::size_t>(it - pts.begin());
    return npos;
}

LogComplex CanonicalProduct::log_G(const LogPoint& z) const {
    if (nodes_.empty())
        return LogComplex::from_log(0.0, 0.0);  // empty product = 1
    if (!z.is_origin()) {
        double t_last = nodes_.points.back().t;
        if (t_last < z.t + kTailMargin) {
            std::ostringstream os;
            os << "log_G: horizon insufficient, need nodes up to t >= "
               << z.t + kTailMargin << " but last node has t=" << t_last;
            throw std::out_of_range(os.str());
        }
        if (find_node(z) != npos) return LogComplex::zero();
    }

    double log_mag = 0.0;
    double phase = 0.0;
    for (std::size_t n = 0; n < nodes_.size(); ++n) {
        const LogPoint& gamma = nodes_[n];
        if (!z.is_origin() && gamma.t >= z.t + kTailMargin) {
            // |log(1 - z/gamma)| <= 2 e^{t - t_n}; remaining nodes are
            // t-sorted, so the total tail is geometrically bounded.
            double bound = 2.0 * std::exp(z.t - gamma.t) *
                           static_cast<double>(nodes_.size() - n);
            if (bound < 1e-12) break;
        }
        LogComplex f = log_one_minus_ratio(z, gamma);
        if (f.is_zero()) return LogComplex::zero();
        log_mag += f.log_mag;
        phase += f.phase;
    }
    return LogComplex::from_log(log_mag, phase);
}

LogComplex CanonicalProduct::log_G_derivative(std::size_t k) const {
    if (k >= nodes_.size())
        throw std::out_of_range("log_G_derivative: node index out of range");
    if (deriv_cached_[k]) return deriv_cache_[k];

    const LogPoint& gk = nodes_[k];
    // G'(gamma_k) = (-1/gamma_k) prod_{n != k} (1 - gamma_k/gamma_n).
    double log_mag = -gk.t;
    double phase = kPi - gk.theta;
    for (std::size_t n = 0; n < nodes_.size(); ++n) {
        if (n == k) continue;
        const LogPoint& gamma = nodes_[n];
        if (gamma.t >= gk.t + kTailMargin) {
            double bound = 2.0 * std::exp(gk.t - gamma.t) *
                           static_cast<double>(nodes_.size() - n);
            if (bound < 1e-12) break;
        }
        LogComplex f = log_one_minus_ratio(gk, gamma);
        if (f.is_zero()) {
            std::ostringstream os;
            os << "log_G_derivative: coincident nodes " << k << " and " << n;
            throw std::invalid_argument(os.str());
        }
        log_mag += f.log_mag;
        phase += f.phase;
    }
    LogComplex res = LogComplex::from_log(log_mag, phase);
    deriv_cache_[k] = res;
    deriv_cached_[k] = 1;
    return res;
}

namespace {

double log1p_exp(double t) {  // log(1 + e^t)
    if (t == kNegInf) return 0.0;
    if (t > 36.0) return t;
    return std::log1p(std::exp(t));
}

double log_dist_to_nodes(const CanonicalProduct& cp, const LogPoint& z) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t n = 0; n < cp.size(); ++n) {
        LogComplex d = log_point_diff(z, cp.nodes()[n]);
        double lm = d.is_zero() ? kNegInf : d.log_mag;
        best = std::min(best, lm);
    }
    return best;
}

}  // namespace

EnvelopeCheck envelope_ratio(const CanonicalProduct& cp, const RadialWeight& w,
                             const SpaceParams& sp, const LogPoint& z, int N,
                             double eps, double slack_C) {
    if (sp.is_infinite())
        throw std::invalid_argument("envelope_ratio: requires finite p");
    double p = sp.p;

    ReferenceSequence ref =
        build_reference(w, sp, static_cast<int>(cp.size()) - 1);
    Decomposition dec = decompose(cp.nodes(), ref);
    EnvelopeCheck out;
    out.delta_N = delta_N_estimate(dec, ref, N).value;

    double lhs = p * cp.log_abs_G(z).log_mag - psi_calculus(w, sp, z.t).psi;
    double log_dist = log_dist_to_nodes(cp, z);
    double log_1z = log1p_exp(z.t);
    double high =
        p * log_dist - (2.0 + 0.5 * p - p * out.delta_N - eps) * log_1z;
    double low =
        p * log_dist - (2.0 + 0.5 * p + p * out.delta_N + eps) * log_1z;

    if (lhs == kNegInf && log_dist == kNegInf) {
        // z sits on a node: zero matches zero on both sides.
        out.low_ok = out.high_ok = true;
        out.ratio = 1.0;
        out.log_gap_low = out.log_gap_high = 0.0;
        return out;
    }
    double logC = std::log(slack_C);
    out.log_gap_low = lhs - low;
    out.log_gap_high = high - lhs;
    out.low_ok = out.log_gap_low >= -logC;
    out.high_ok = out.log_gap_high >= -logC;
    double centered = lhs - 0.5 * (low + high);
    out.ratio = centered > 700.0 ? std::numeric_limits<double>::infinity()
                                 : std::exp(centered);
    return out;
}

double CoefficientVector::norm_p() const {
    double acc = 0.0;
    for (const auto& v : values) acc += std::pow(std::abs(v), p);
    return std::pow(acc, 1.0 / p);
}

Interpolant::Interpolant(const CanonicalProduct& cp, const RadialWeight& w,
                         const SpaceParams& sp, const CoefficientVector& v)
    : cp_(cp) {
    if (v.values.size() > cp.size())
        throw std::invalid_argument(
            "Interpolant: more coefficients than nodes");
    node_weight_.assign(cp.size(), LogComplex::zero());
    node_value_.assign(cp.size(), LogComplex::zero());
    for (std::size_t n = 0; n < v.values.size(); ++n) {
        if (v.values[n] == std::complex<double>(0.0, 0.0)) continue;
        LogComplex vn =
            LogComplex::from_value(v.values[n].real(), v.values[n].imag());
        LogReal norm = log_evaluation_norm(w, sp, cp.nodes()[n],
                                           EvalNormMethod::theorem);
        LogComplex vn_norm = vn * LogComplex::from_log(norm.log_mag, 0.0);
        node_value_[n] = vn_norm;
        node_weight_[n] = vn_norm / cp.log_G_derivative(n);
    }
}

LogComplex Interpolant::eval(const LogPoint& z) const {
    std::size_t k = cp_.find_node(z);
    if (k != CanonicalProduct::npos) {
        // Defining limit at a node: every other term carries G(gamma_k) = 0.
        return node_value_[k];
    }
    LogComplex G = cp_.log_G(z);
    if (G.is_zero()) return LogComplex::zero();
    ComplexLogSumAccumulator acc;
    for (std::size_t n = 0; n < node_weight_.size(); ++n) {
        if (node_weight_[n].is_zero()) continue;
        acc.add(node_weight_[n] / log_point_diff(z, cp_.nodes()[n]));
    }
    LogComplex s = acc.total();
    if (s.is_zero()) return LogComplex::zero();
    return G * s;
}

LogComplex interpolate(const CanonicalProduct& cp, const RadialWeight& w,
                       const SpaceParams& sp, const CoefficientVector& v,
                       const LogPoint& z) {
    return Interpolant(cp, w, sp, v).eval(z);
}

LogReal log_norm_2d(const RadialWeight& w, const SpaceParams& sp,
                    const std::function<LogComplex(const LogPoint&)>& f,
                    double peak_hint) {
    if (sp.is_infinite())
        throw std::invalid_argument("log_norm_2d: requires finite p");
    double p = sp.p;
    const int n_theta = 64;

    LogSumAccumulator acc;
    for (int i = 0; i < n_theta; ++i) {
        double theta = -kPi + 2.0 * kPi * i / n_theta;
        auto g = [&](double t) {
            LogComplex fv = f(LogPoint{t, theta});
            if (fv.is_zero()) return kNegInf;
            return p * fv.log_mag - psi_calculus(w, sp, t).psi + 2.0 * t;
        };
        double width = 0.5;
        double psi2 = psi_calculus(w, sp, std::max(peak_hint, 0.5)).psi2;
        if (psi2 > 0.0) width = std::min(2.0, 1.0 / std::sqrt(psi2));
        LogReal radial = laplace_quadrature(g, peak_hint, width);
        acc.add(LogReal::from_log(radial.log_mag +
                                  std::log(2.0 * kPi / n_theta)));
    }
    LogReal total = acc.total();
    return LogReal::from_log(total.log_mag / p, +1);
}

}  // namespace fockcis
