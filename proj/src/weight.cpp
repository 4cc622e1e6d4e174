#include "fockcis/weight.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "fockcis/numerics.hpp"

namespace fockcis {

RadialWeight RadialWeight::alpha_model(double alpha) {
    if (!(alpha > 1.0 && alpha <= 2.0)) {
        std::ostringstream os;
        os << "alpha_model: alpha must lie in (1, 2], got " << alpha;
        throw std::invalid_argument(os.str());
    }
    RadialWeight w;
    w.is_alpha_ = true;
    w.alpha_ = alpha;
    std::ostringstream os;
    os << "alpha:" << alpha;
    w.description_ = os.str();
    return w;
}

RadialWeight RadialWeight::custom(ScalarMap phi, ScalarMap dphi,
                                  ScalarMap d2phi, std::string description) {
    if (!phi || !dphi || !d2phi)
        throw std::invalid_argument("custom weight: all three maps required");
    RadialWeight w;
    w.is_alpha_ = false;
    w.phi_ = std::move(phi);
    w.dphi_ = std::move(dphi);
    w.d2phi_ = std::move(d2phi);
    w.description_ = std::move(description);
    return w;
}

namespace {

double checked(double v, double r, const char* what) {
    if (!std::isfinite(v)) {
        std::ostringstream os;
        os << "custom weight: " << what << " returned non-finite value at r="
           << r;
        throw std::domain_error(os.str());
    }
    return v;
}

}  // namespace

double RadialWeight::phi(double r) const {
    if (!(r > 0.0)) throw std::invalid_argument("phi: radius must be positive");
    if (is_alpha_) {
        double l = std::log(r);
        return l <= 0.0 ? 0.0 : std::pow(l, alpha_);
    }
    return checked(phi_(r), r, "phi");
}

double RadialWeight::dphi(double r) const {
    if (!(r > 0.0)) throw std::invalid_argument("dphi: radius must be positive");
    if (is_alpha_) {
        double l = std::log(r);
        return l <= 0.0 ? 0.0 : alpha_ * std::pow(l, alpha_ - 1.0) / r;
    }
    return checked(dphi_(r), r, "phi'");
}

double RadialWeight::d2phi(double r) const {
    if (!(r > 0.0))
        throw std::invalid_argument("d2phi: radius must be positive");
    if (is_alpha_) {
        double l = std::log(r);
        if (l <= 0.0) return 0.0;
        return alpha_ * ((alpha_ - 1.0) * std::pow(l, alpha_ - 2.0) -
                         std::pow(l, alpha_ - 1.0)) /
               (r * r);
    }
    return checked(d2phi_(r), r, "phi''");
}

SpaceParams SpaceParams::finite(double p) {
    if (!(p > 0.0) || std::isinf(p))
        throw std::invalid_argument("SpaceParams: p must be finite positive");
    return {p};
}

SpaceParams SpaceParams::infinite() {
    return {std::numeric_limits<double>::infinity()};
}

bool SpaceParams::is_infinite() const { return std::isinf(p); }

namespace {

// p used for the psi-calculus; the p = inf space reduces to p = 2.
double calc_p(const SpaceParams& sp) { return sp.is_infinite() ? 2.0 : sp.p; }

PsiDerivatives psi_custom(const RadialWeight& w, double p, double t) {
    double r = std::exp(t);
    if (!std::isfinite(r) || r == 0.0) {
        std::ostringstream os;
        os << "psi_calculus: e^t out of range at t=" << t;
        throw std::domain_error(os.str());
    }
    PsiDerivatives d;
    double f = w.phi(r), f1 = w.dphi(r), f2 = w.d2phi(r);
    d.psi = p * f;
    d.psi1 = p * r * f1;
    d.psi2 = p * (r * f1 + r * r * f2);
    // psi''' by central difference of psi''.
    double h = std::max(1e-4, 1e-4 * std::fabs(t));
    auto psi2_at = [&](double tt) {
        double rr = std::exp(tt);
        return p * (rr * w.dphi(rr) + rr * rr * w.d2phi(rr));
    };
    d.psi3 = (psi2_at(t + h) - psi2_at(t - h)) / (2.0 * h);
    return d;
}

}  // namespace

PsiDerivatives psi_calculus(const RadialWeight& w, const SpaceParams& sp,
                            double t) {
    double p = calc_p(sp);
    if (w.is_alpha_model()) {
        if (t <= 0.0) return {};
        double a = w.alpha();
        PsiDerivatives d;
        d.psi = p * std::pow(t, a);
        d.psi1 = p * a * std::pow(t, a - 1.0);
        d.psi2 = p * a * (a - 1.0) * std::pow(t, a - 2.0);
        d.psi3 = p * a * (a - 1.0) * (a - 2.0) * std::pow(t, a - 3.0);
        return d;
    }
    return psi_custom(w, p, t);
}

double eta(const RadialWeight& w, const SpaceParams& sp, double s) {
    auto psi1 = [&](double t) { return psi_calculus(w, sp, t).psi1; };

    double lo = 0.0;
    if (psi1(lo) > s) {
        // Probe below t=0 for weights whose psi' does not vanish there.
        bool found = false;
        for (double probe = -1.0; probe >= -64.0; probe *= 2.0) {
            if (psi1(probe) <= s) {
                lo = probe;
                found = true;
                break;
            }
        }
        if (!found) {
            std::ostringstream os;
            os << "eta: target " << s << " below range of psi' (psi'(0+)="
               << psi1(0.0) << ")";
            throw std::invalid_argument(os.str());
        }
    }
    double hi = std::max(1.0, lo + 1.0);
    int guard = 0;
    while (psi1(hi) < s) {
        hi *= 2.0;
        if (++guard > 200)
            throw std::runtime_error("eta: psi' never reaches target");
    }
    return monotone_root(psi1, s, lo, hi);
}

double laplacian(const RadialWeight& w, const SpaceParams& sp, double r) {
    if (!(r > 0.0))
        throw std::invalid_argument("laplacian: radius must be positive");
    double t = std::log(r);
    double p = calc_p(sp);
    return psi_calculus(w, sp, t).psi2 * std::exp(-2.0 * t) / p;
}

RegularityReport audit_regularity(const RadialWeight& w, const SpaceParams& sp,
                                  std::pair<double, double> t_range,
                                  int samples) {
    if (!(t_range.first > 0.0) || !(t_range.second > t_range.first))
        throw std::invalid_argument("audit_regularity: need 0 < lo < hi");
    if (samples < 16)
        throw std::invalid_argument("audit_regularity: need >= 16 samples");

    RegularityReport rep;
    rep.description =
        "sampled verdict on a finite grid; the regularity conditions are "
        "asymptotic and this audit is not a proof";
    // Custom weights evaluate phi at r = e^t; keep radii representable.
    if (!w.is_alpha_model())
        t_range.second = std::min(t_range.second, 600.0);
    double llo = std::log(t_range.first), lhi = std::log(t_range.second);
    rep.grid.resize(samples);
    for (int i = 0; i < samples; ++i)
        rep.grid[i] = std::exp(llo + (lhi - llo) * i / (samples - 1));

    std::vector<PsiDerivatives> d(samples);
    for (int i = 0; i < samples; ++i) d[i] = psi_calculus(w, sp, rep.grid[i]);

    rep.psi_prime_increasing_to_inf = true;
    for (int i = 0; i + 1 < samples; ++i)
        if (!(d[i + 1].psi1 > d[i].psi1)) rep.psi_prime_increasing_to_inf = false;

    rep.psi_double_positive_nonincreasing = true;
    for (int i = 0; i < samples; ++i)
        if (!(d[i].psi2 > 0.0)) rep.psi_double_positive_nonincreasing = false;
    for (int i = 0; i + 1 < samples; ++i)
        if (d[i + 1].psi2 > d[i].psi2 * (1.0 + 1e-9))
            rep.psi_double_positive_nonincreasing = false;

    rep.third_derivative_ratio.resize(samples);
    for (int i = 0; i < samples; ++i) {
        double denom = std::pow(d[i].psi2, 5.0 / 3.0);
        rep.third_derivative_ratio[i] =
            denom > 0.0 ? std::fabs(d[i].psi3) / denom
                        : std::numeric_limits<double>::infinity();
    }

    // Trend proxy for the O((psi'')^{5/3}) condition: compare the two top
    // deciles of the grid.
    auto decile_mean = [&](int lo_pct, int hi_pct) {
        int lo = samples * lo_pct / 100, hi = samples * hi_pct / 100;
        hi = std::min(hi, samples);
        double s = 0.0;
        int n = 0;
        for (int i = lo; i < hi; ++i, ++n) s += rep.third_derivative_ratio[i];
        return n > 0 ? s / n : 0.0;
    };
    double second_decile = decile_mean(80, 90);
    double top_decile = decile_mean(90, 100);
    bool ratio_ok =
        !(top_decile > second_decile * 1.10 && top_decile > 1e-300);

    if (!rep.psi_double_positive_nonincreasing)
        rep.verdict = "fail(psi_double_positive_nonincreasing)";
    else if (!rep.psi_prime_increasing_to_inf)
        rep.verdict = "fail(psi_prime_increasing_to_inf)";
    else if (!ratio_ok)
        rep.verdict = "fail(third_derivative_ratio_growing)";
    else
        rep.verdict = "pass";
    return rep;
}

namespace {

// Shape-preserving cubic Hermite interpolation (Fritsch-Carlson tangents).
class Pchip {
  public:
    Pchip() = default;
    Pchip(std::vector<double> x, std::vector<double> y)
        : x_(std::move(x)), y_(std::move(y)) {
        size_t n = x_.size();
        m_.assign(n, 0.0);
        if (n == 1) return;
        std::vector<double> h(n - 1), del(n - 1);
        for (size_t i = 0; i + 1 < n; ++i) {
            h[i] = x_[i + 1] - x_[i];
            del[i] = (y_[i + 1] - y_[i]) / h[i];
        }
        if (n == 2) {
            m_[0] = m_[1] = del[0];
            return;
        }
        for (size_t i = 1; i + 1 < n; ++i) {
            if (del[i - 1] * del[i] <= 0.0) {
                m_[i] = 0.0;
            } else {
                double w1 = 2.0 * h[i] + h[i - 1];
                double w2 = h[i] + 2.0 * h[i - 1];
                m_[i] = (w1 + w2) / (w1 / del[i - 1] + w2 / del[i]);
            }
        }
        m_[0] = edge_tangent(h[0], h[1], del[0], del[1]);
        m_[n - 1] = edge_tangent(h[n - 2], h[n - 3], del[n - 2], del[n - 3]);
    }

    double operator()(double xq) const {
        size_t n = x_.size();
        if (xq <= x_.front()) return y_.front();  // flat below first knot
        if (xq > x_.back()) {
            std::ostringstream os;
            os << "weight table: query r=" << xq << " above last knot "
               << x_.back();
            throw std::out_of_range(os.str());
        }
        size_t i =
            std::upper_bound(x_.begin(), x_.end(), xq) - x_.begin() - 1;
        i = std::min(i, n - 2);
        double h = x_[i + 1] - x_[i];
        double s = (xq - x_[i]) / h;
        double s2 = s * s, s3 = s2 * s;
        return y_[i] * (2 * s3 - 3 * s2 + 1) + h * m_[i] * (s3 - 2 * s2 + s) +
               y_[i + 1] * (-2 * s3 + 3 * s2) + h * m_[i + 1] * (s3 - s2);
    }

  private:
    static double edge_tangent(double h0, double h1, double d0, double d1) {
        double m = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if (m * d0 <= 0.0) return 0.0;
        if (d0 * d1 < 0.0 && std::fabs(m) > 3.0 * std::fabs(d0))
            return 3.0 * d0;
        return m;
    }

    std::vector<double> x_, y_, m_;
};

}  // namespace

RadialWeight weight_from_table(std::vector<WeightTableRow> rows,
                               std::string name) {
    if (rows.size() < 4)
        throw std::invalid_argument("weight table: need at least 4 rows");
    std::sort(rows.begin(), rows.end(),
              [](const WeightTableRow& a, const WeightTableRow& b) {
                  return a.r < b.r;
              });
    std::vector<double> r, f, f1, f2;
    for (const auto& row : rows) {
        if (!(row.r > 0.0))
            throw std::invalid_argument("weight table: radii must be positive");
        if (!r.empty() && row.r <= r.back())
            throw std::invalid_argument("weight table: duplicate radius");
        r.push_back(row.r);
        f.push_back(row.phi);
        f1.push_back(row.dphi);
        f2.push_back(row.d2phi);
    }
    auto pphi = std::make_shared<Pchip>(r, f);
    auto pdphi = std::make_shared<Pchip>(r, f1);
    auto pd2phi = std::make_shared<Pchip>(r, f2);
    return RadialWeight::custom(
        [pphi](double rr) { return (*pphi)(rr); },
        [pdphi](double rr) { return (*pdphi)(rr); },
        [pd2phi](double rr) { return (*pd2phi)(rr); }, std::move(name));
}

}  // namespace fockcis
