#include "fockcis/reference.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace fockcis {

namespace {

double norm_p(const SpaceParams& sp) {
    if (sp.is_infinite())
        throw std::invalid_argument(
            "reference: p = inf routes through the p = 2 reduction");
    return sp.p;
}

}  // namespace

ReferenceSequence build_reference(const RadialWeight& w, const SpaceParams& sp,
                                  int n_max) {
    double p = norm_p(sp);
    if (n_max < 0)
        throw std::invalid_argument("build_reference: n_max must be >= 0");

    ReferenceSequence ref;
    ref.p = p;
    ref.weight_tag = w.description();

    // Index origin: smallest n with p n + 2 >= psi'(0+).
    double s0 = psi_calculus(w, sp, 0.0).psi1;
    int offset = 0;
    if (s0 > 2.0) offset = static_cast<int>(std::ceil((s0 - 2.0) / p - 1e-12));
    ref.index_offset = offset;

    ref.y.reserve(n_max + 1);
    for (int n = 0; n <= n_max; ++n) {
        double target = p * (n + offset) + 2.0;
        double yn = eta(w, sp, target);
        double check = psi_calculus(w, sp, yn).psi1;
        if (std::fabs(check - target) > 1e-12 * std::max(1.0, target)) {
            std::ostringstream os;
            os << "build_reference: psi'(y_" << n << ") = " << check
               << " misses target " << target;
            throw std::runtime_error(os.str());
        }
        if (!ref.y.empty() && !(yn > ref.y.back())) {
            std::ostringstream os;
            os << "build_reference: y_" << n << " not increasing";
            throw std::runtime_error(os.str());
        }
        ref.y.push_back(yn);
    }
    ref.prefix_sum.resize(ref.y.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < ref.y.size(); ++i) {
        acc += ref.y[i];
        ref.prefix_sum[i] = acc;
    }
    return ref;
}

std::size_t bracket_index(const ReferenceSequence& ref, double t) {
    if (ref.y.size() < 2)
        throw std::invalid_argument("bracket_index: need at least two knots");
    if (!(t >= ref.y.front()) || !(t < ref.y.back())) {
        std::ostringstream os;
        os << "bracket_index: t=" << t << " outside [" << ref.y.front() << ", "
           << ref.y.back() << ")";
        throw std::out_of_range(os.str());
    }
    auto it = std::upper_bound(ref.y.begin(), ref.y.end(), t);
    return static_cast<std::size_t>(it - ref.y.begin()) - 1;
}

double ell(const ReferenceSequence& ref, double t) {
    std::size_t m = bracket_index(ref, t);
    return ref.slope(m) * t - ref.p * ref.prefix_sum[m];
}

namespace {

// Width hint for the Laplace peak at y_n.
double peak_width(const RadialWeight& w, const SpaceParams& sp, double yn) {
    double psi2 = psi_calculus(w, sp, yn).psi2;
    if (!(psi2 > 0.0)) return 1.0;
    return std::min(4.0, 1.0 / std::sqrt(psi2));
}

LogReal monomial_norm_quadrature(const RadialWeight& w, const SpaceParams& sp,
                                 int n) {
    double p = sp.p;
    double a = p * n + 2.0;
    double yn = eta(w, sp, a);
    double width = peak_width(w, sp, yn);

    LogSumAccumulator acc;
    if (w.is_alpha_model()) {
        // psi vanishes on t < 0; the flat left tail integrates to 1/(pn+2).
        auto g = [&](double t) {
            if (t < 0.0) return kNegInf;
            return a * t - psi_calculus(w, sp, t).psi;
        };
        acc.add(laplace_quadrature(g, std::max(yn, 0.5 * width), width));
        acc.add(LogReal::from_log(-std::log(a)));
    } else {
        auto g = [&](double t) { return a * t - psi_calculus(w, sp, t).psi; };
        acc.add(laplace_quadrature(g, yn, width));
    }
    LogReal integral = acc.total();
    return LogReal::from_log(
        (std::log(2.0 * kPi) + integral.log_mag) / p, +1);
}

LogReal monomial_norm_asymptotic(const RadialWeight& w, const SpaceParams& sp,
                                 int n) {
    double p = sp.p;
    double a = p * n + 2.0;
    double yn = eta(w, sp, a);
    PsiDerivatives d = psi_calculus(w, sp, yn);
    double lm = (-0.5 * std::log(d.psi2) + a * yn - d.psi) / p;
    return LogReal::from_log(lm, +1);
}

}  // namespace

LogReal log_monomial_norm(const RadialWeight& w, const SpaceParams& sp, int n,
                          NormMethod method) {
    norm_p(sp);
    if (n < 0) throw std::invalid_argument("log_monomial_norm: n must be >= 0");
    return method == NormMethod::quadrature
               ? monomial_norm_quadrature(w, sp, n)
               : monomial_norm_asymptotic(w, sp, n);
}

NormTable build_norm_table(const RadialWeight& w, const SpaceParams& sp,
                           int n_max, NormMethod method) {
    NormTable t;
    t.method = method;
    t.log_monomial_norm.reserve(n_max + 1);
    for (int n = 0; n <= n_max; ++n)
        t.log_monomial_norm.push_back(log_monomial_norm(w, sp, n, method).log_mag);
    return t;
}

namespace {

// Paper index n_z with sigma_{n_z} <= |z| < sigma_{n_z+1}, from psi'(t).
long eval_bracket_index(const RadialWeight& w, const SpaceParams& sp,
                        double t) {
    double s = psi_calculus(w, sp, t).psi1;
    return static_cast<long>(std::floor((s - 2.0) / sp.p + 1e-9));
}

LogReal eval_norm_theorem(const RadialWeight& w, const SpaceParams& sp,
                          LogPoint z) {
    if (z.is_origin())
        throw std::invalid_argument(
            "log_evaluation_norm(theorem): undefined at z = 0");
    double p = sp.p;
    double t = z.t;
    long n = eval_bracket_index(w, sp, t);
    if (n < 0) {
        std::ostringstream os;
        os << "log_evaluation_norm(theorem): t=" << t << " below y_0";
        throw std::out_of_range(os.str());
    }
    double y_lo = eta(w, sp, p * n + 2.0);
    double y_hi = eta(w, sp, p * (n + 1) + 2.0);
    PsiDerivatives dt = psi_calculus(w, sp, t);
    PsiDerivatives dl = psi_calculus(w, sp, y_lo);
    PsiDerivatives dh = psi_calculus(w, sp, y_hi);
    double a_lo = (p * n + 2.0) * (t - y_lo) + dl.psi;
    double a_hi = (p * (n + 1) + 2.0) * (t - y_hi) + dh.psi;
    LogSumAccumulator acc;
    acc.add(LogReal::from_log(a_lo));
    acc.add(LogReal::from_log(a_hi));
    double lm =
        (0.5 * std::log(dt.psi2) - 2.0 * t + acc.total().log_mag) / p;
    return LogReal::from_log(lm, +1);
}

LogReal eval_norm_series(const RadialWeight& w, const SpaceParams& sp,
                         LogPoint z) {
    if (sp.p != 2.0)
        throw std::invalid_argument(
            "log_evaluation_norm(series): requires p = 2");
    double t = z.t;
    if (z.is_origin()) {
        double lm0 = log_monomial_norm(w, sp, 0, NormMethod::quadrature).log_mag;
        return LogReal::from_log(-lm0, +1);
    }
    long peak = std::max(0L, eval_bracket_index(w, sp, t));
    LogSumAccumulator acc;
    double running_max = kNegInf;
    const double drop = 40.0;
    for (long m = 0;; ++m) {
        double lmn = log_monomial_norm(w, sp, static_cast<int>(m),
                                       NormMethod::quadrature)
                         .log_mag;
        double term = 2.0 * m * t - 2.0 * lmn;
        acc.add(LogReal::from_log(term));
        running_max = std::max(running_max, term);
        if (m > peak + 2 && term < running_max - drop) break;
        if (m > peak + 100000)
            throw std::runtime_error(
                "log_evaluation_norm(series): series did not truncate");
    }
    return LogReal::from_log(0.5 * acc.total().log_mag, +1);
}

LogReal eval_norm_monomial_lower(const RadialWeight& w, const SpaceParams& sp,
                                 LogPoint z) {
    double t = z.t;
    long peak = z.is_origin() ? 0 : std::max(0L, eval_bracket_index(w, sp, t));
    double best = kNegInf;
    for (long m = 0; m <= peak + 64; ++m) {
        double lmn = log_monomial_norm(w, sp, static_cast<int>(m),
                                       NormMethod::quadrature)
                         .log_mag;
        double v = (z.is_origin() && m > 0) ? kNegInf : m * t - lmn;
        best = std::max(best, v);
        if (z.is_origin()) break;
    }
    return LogReal::from_log(best, +1);
}

}  // namespace

LogReal log_evaluation_norm(const RadialWeight& w, const SpaceParams& sp,
                            LogPoint z, EvalNormMethod method) {
    norm_p(sp);
    switch (method) {
        case EvalNormMethod::theorem:
            return eval_norm_theorem(w, sp, z);
        case EvalNormMethod::series:
            return eval_norm_series(w, sp, z);
        case EvalNormMethod::monomial_lower:
            return eval_norm_monomial_lower(w, sp, z);
    }
    throw std::logic_error("log_evaluation_norm: unknown method");
}

std::pair<double, double> partial_sum_y(const RadialWeight& w,
                                        const SpaceParams& sp,
                                        const ReferenceSequence& ref,
                                        std::size_t m) {
    if (m >= ref.size())
        throw std::out_of_range("partial_sum_y: m beyond horizon");
    double exact = ref.prefix_sum[m] - ref.y[0];
    double ym = ref.y[m];
    PsiDerivatives d = psi_calculus(w, sp, ym);
    double p = ref.p;
    double asym = (ref.slope(m) * ym - d.psi + 0.5 * p * ym) / p;
    return {exact, asym};
}

}  // namespace fockcis
