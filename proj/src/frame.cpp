#include "fockcis/frame.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace fockcis {

KernelTable build_kernel_table(const RadialWeight& w, int n_max) {
    KernelTable kt;
    kt.weight_tag = w.description();
    SpaceParams sp2 = SpaceParams::finite(2.0);
    kt.log_sq_monomial_norms.reserve(n_max + 1);
    for (int n = 0; n <= n_max; ++n)
        kt.log_sq_monomial_norms.push_back(
            2.0 * log_monomial_norm(w, sp2, n, NormMethod::quadrature).log_mag);
    return kt;
}

LogComplex kernel(const KernelTable& kt, const LogPoint& w_pt,
                  const LogPoint& z_pt) {
    if (kt.log_sq_monomial_norms.empty())
        throw std::invalid_argument("kernel: empty table");
    if (w_pt.is_origin() || z_pt.is_origin()) {
        return LogComplex::from_log(-kt.log_sq_monomial_norms[0], 0.0);
    }
    double ts = w_pt.t + z_pt.t;
    double dth = w_pt.theta - z_pt.theta;

    ComplexLogSumAccumulator acc;
    double run_max = kNegInf;
    std::size_t arg_max = 0;
    const auto& lsq = kt.log_sq_monomial_norms;
    for (std::size_t n = 0; n < lsq.size(); ++n) {
        double lm = n * ts - lsq[n];
        acc.add(LogComplex::from_log(lm, n * dth));
        if (lm > run_max) {
            run_max = lm;
            arg_max = n;
        }
        if (n > arg_max + 2 && lm < run_max - kt.truncation_drop)
            return acc.total();
    }
    std::ostringstream os;
    os << "kernel: table horizon " << lsq.size() - 1
       << " too small; terms have not dropped " << kt.truncation_drop
       << " log-units below the peak at n=" << arg_max
       << " (need n beyond " << lsq.size() - 1 << ")";
    throw std::out_of_range(os.str());
}

GramMatrix gram(const KernelTable& kt, const PointSequence& g, int M) {
    if (M < 1 || static_cast<std::size_t>(M) > g.size())
        throw std::invalid_argument("gram: M out of range");
    for (int j = 0; j + 1 < M; ++j) {
        if (g[j].t == g[j + 1].t &&
            normalize_angle(g[j].theta - g[j + 1].theta) == 0.0)
            throw std::invalid_argument("gram: duplicate nodes");
    }
    std::vector<double> diag(M);
    for (int j = 0; j < M; ++j) diag[j] = kernel(kt, g[j], g[j]).log_mag;

    GramMatrix gm;
    gm.size = M;
    gm.entries.assign(static_cast<std::size_t>(M) * M, {0.0, 0.0});
    for (int j = 0; j < M; ++j) {
        gm.at(j, j) = {1.0, 0.0};
        for (int k = j + 1; k < M; ++k) {
            LogComplex kv = kernel(kt, g[j], g[k]);
            std::complex<double> e{0.0, 0.0};
            if (!kv.is_zero()) {
                double lm = kv.log_mag - 0.5 * (diag[j] + diag[k]);
                e = std::polar(std::exp(lm), kv.phase);
            }
            gm.at(j, k) = e;
            gm.at(k, j) = std::conj(e);
        }
    }
    return gm;
}

RieszReport riesz_bounds(const std::vector<GramMatrix>& grams) {
    if (grams.empty()) throw std::invalid_argument("riesz_bounds: no matrices");
    RieszReport rep;
    std::vector<double> cond;
    for (const auto& gm : grams) {
        int M = gm.size;
        Eigen::MatrixXcd A(M, M);
        for (int j = 0; j < M; ++j)
            for (int k = 0; k < M; ++k) A(j, k) = gm.at(j, k);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(A);
        if (es.info() != Eigen::Success)
            throw std::runtime_error("riesz_bounds: eigensolver failed");
        double lo = es.eigenvalues().minCoeff();
        double hi = es.eigenvalues().maxCoeff();
        // Residual check on the extreme eigenpairs.
        for (int which : {0, M - 1}) {
            Eigen::VectorXcd x = es.eigenvectors().col(which);
            double resid =
                (A * x - es.eigenvalues()(which) * x).norm() / x.norm();
            if (resid > 1e-8) {
                std::ostringstream os;
                os << "riesz_bounds: eigen-residual " << resid
                   << " exceeds 1e-8 at size " << M;
                throw std::runtime_error(os.str());
            }
        }
        if (lo < -1e-10) {
            std::ostringstream os;
            os << "riesz_bounds: Gram not PSD (min eigenvalue " << lo
               << "); kernel truncation too aggressive";
            throw std::runtime_error(os.str());
        }
        lo = std::max(lo, 0.0);
        rep.sizes.push_back(M);
        rep.lower_bounds.push_back(lo);
        rep.upper_bounds.push_back(hi);
        cond.push_back(lo > 0.0 ? hi / lo
                                : std::numeric_limits<double>::infinity());
    }
    bool monotone = true;
    for (std::size_t i = 0; i + 1 < cond.size(); ++i)
        if (cond[i + 1] < cond[i] * 0.98) monotone = false;
    double growth = cond.back() / cond.front();
    if (growth > 2.0 && monotone) {
        double slope = (std::log(cond.back()) - std::log(cond.front())) /
                       (rep.sizes.back() - rep.sizes.front());
        char buf[64];
        std::snprintf(buf, sizeof buf, "growing(slope=%.4g)", slope);
        rep.condition_trend = buf;
    } else {
        rep.condition_trend = "bounded";
    }
    return rep;
}

namespace {

double log_phi_at(const RadialWeight& w, const SpaceParams& sp, double t) {
    SpaceParams eff = sp.is_infinite() ? SpaceParams::finite(2.0) : sp;
    return psi_calculus(w, eff, t).psi / eff.p;
}

}  // namespace

TransferMatrix transfer_matrix(const PointSequence& g, const RadialWeight& w,
                               const SpaceParams& sp, int horizon,
                               TransferMode mode) {
    if (horizon < 1)
        throw std::invalid_argument("transfer_matrix: horizon must be >= 1");
    SpaceParams eff = sp.is_infinite() ? SpaceParams::finite(2.0) : sp;
    if (static_cast<std::size_t>(horizon) > g.size())
        throw std::invalid_argument(
            "transfer_matrix: horizon exceeds candidate length");

    ReferenceSequence ref = build_reference(w, eff, horizon - 1);
    CanonicalProduct cp(g);

    // Reference grid points, perturbed off near-coincident nodes.
    std::vector<LogPoint> sigma(horizon);
    std::vector<std::size_t> exact_node(horizon, CanonicalProduct::npos);
    for (int m = 0; m < horizon; ++m) {
        LogPoint s{ref.y[m], 0.0};
        std::size_t idx = cp.find_node(s);
        if (idx != CanonicalProduct::npos) {
            exact_node[m] = idx;
        } else {
            double dmin = std::numeric_limits<double>::infinity();
            for (std::size_t k = 0; k < cp.size(); ++k)
                dmin = std::min(dmin, log_distance(s, cp.nodes()[k]));
            if (dmin < 1e-12) {
                s.t += 1e-9;
                dmin = std::numeric_limits<double>::infinity();
                for (std::size_t k = 0; k < cp.size(); ++k)
                    dmin = std::min(dmin, log_distance(s, cp.nodes()[k]));
                if (dmin < 1e-12) {
                    std::ostringstream os;
                    os << "transfer_matrix: grid point m=" << m
                       << " still collides with a node after perturbation";
                    throw std::runtime_error(os.str());
                }
            }
        }
        sigma[m] = s;
    }

    TransferMatrix tm;
    tm.mode = mode;
    tm.p = eff.p;
    tm.rows = horizon;
    tm.cols = horizon;
    tm.abs_entries.assign(static_cast<std::size_t>(horizon) * horizon,
                          LogReal::zero());

    std::vector<double> logL_row(horizon), logL_col(horizon);
    for (int n = 0; n < horizon; ++n) {
        if (mode == TransferMode::A_p)
            logL_row[n] =
                log_evaluation_norm(w, eff, g[n], EvalNormMethod::theorem)
                    .log_mag;
        else
            logL_row[n] = log_phi_at(w, eff, g[n].t);
    }
    for (int m = 0; m < horizon; ++m) {
        if (mode == TransferMode::A_p)
            logL_col[m] =
                log_evaluation_norm(w, eff, sigma[m], EvalNormMethod::theorem)
                    .log_mag;
        else
            logL_col[m] = log_phi_at(w, eff, sigma[m].t);
    }

    std::vector<double> logdG(horizon);
    for (int n = 0; n < horizon; ++n)
        logdG[n] = cp.log_abs_G_derivative(n).log_mag;

    for (int m = 0; m < horizon; ++m) {
        if (exact_node[m] != CanonicalProduct::npos) {
            // G(sigma_m) = 0 off the coincident node; the diagonal limit
            // G(z)/(z - gamma_n) -> G'(gamma_n) gives exactly 1 there.
            std::size_t idx = exact_node[m];
            if (idx < static_cast<std::size_t>(horizon))
                tm.abs_entries[idx * horizon + m] = LogReal::from_log(0.0, +1);
            continue;
        }
        double logG = cp.log_abs_G(sigma[m]).log_mag;
        for (int n = 0; n < horizon; ++n) {
            LogComplex diff = log_point_diff(sigma[m], cp.nodes()[n]);
            double lm;
            if (mode == TransferMode::A_p) {
                lm = logL_row[n] - logL_col[m] + logG - logdG[n] -
                     diff.log_mag;
            } else {
                lm = logL_row[n] - logL_col[m] + sigma[m].t - g[n].t + logG -
                     logdG[n] - diff.log_mag;
            }
            tm.abs_entries[static_cast<std::size_t>(n) * horizon + m] =
                LogReal::from_log(lm, +1);
        }
    }
    return tm;
}

double schur_norm_bound(const TransferMatrix& tm, double p) {
    (void)p;  // the row/column-sum bound is p-free; see header caveat
    double best = 0.0;
    for (int n = 0; n < tm.rows; ++n) {
        LogSumAccumulator acc;
        for (int m = 0; m < tm.cols; ++m) acc.add(tm.at(n, m));
        LogReal s = acc.total();
        double v = s.sign == 0
                       ? 0.0
                       : (s.log_mag > 700.0
                              ? std::numeric_limits<double>::infinity()
                              : std::exp(s.log_mag));
        best = std::max(best, v);
    }
    for (int m = 0; m < tm.cols; ++m) {
        LogSumAccumulator acc;
        for (int n = 0; n < tm.rows; ++n) acc.add(tm.at(n, m));
        LogReal s = acc.total();
        double v = s.sign == 0
                       ? 0.0
                       : (s.log_mag > 700.0
                              ? std::numeric_limits<double>::infinity()
                              : std::exp(s.log_mag));
        best = std::max(best, v);
    }
    return best;
}

double bessel_ratio(const PointSequence& g, const RadialWeight& w,
                    const SpaceParams& sp, int trials) {
    if (g.empty()) return 0.0;
    if (sp.is_infinite())
        throw std::invalid_argument("bessel_ratio: requires finite p");
    if (trials < 2) throw std::invalid_argument("bessel_ratio: trials >= 2");
    double p = sp.p;

    double t_max = g.points.back().t;
    long n_top = std::max(
        2L, static_cast<long>(
                std::floor((psi_calculus(w, sp, t_max).psi1 - 2.0) / p)) +
                2L);

    NormTable norms =
        build_norm_table(w, sp, static_cast<int>(n_top), NormMethod::quadrature);
    std::vector<double> logL(g.size());
    for (std::size_t i = 0; i < g.size(); ++i)
        logL[i] =
            log_evaluation_norm(w, sp, g[i], EvalNormMethod::theorem).log_mag;

    double best = 0.0;
    int half = std::max(1, trials / 2);

    // Normalized monomials e_n = z^n / ||z^n||.
    for (int i = 0; i < half; ++i) {
        long n = half == 1 ? 0 : std::lround(double(i) * n_top / (half - 1));
        double lmn = norms.log_monomial_norm[n];
        LogSumAccumulator acc;
        for (std::size_t j = 0; j < g.size(); ++j) {
            double lf = g[j].is_origin() ? (n == 0 ? 0.0 : kNegInf)
                                         : n * g[j].t - lmn;
            acc.add(LogReal::from_log(p * (lf - logL[j])));
        }
        LogReal s = acc.total();
        if (s.sign != 0 && s.log_mag < 700.0)
            best = std::max(best, std::exp(s.log_mag));
        else if (s.sign != 0)
            best = std::numeric_limits<double>::infinity();
    }

    // Reference interpolation atoms g_sigma.
    long n_ref = static_cast<long>(std::ceil(
                     (psi_calculus(w, sp, t_max + 12.0).psi1 - 2.0) / p)) +
                 1;
    ReferenceSequence ref = build_reference(w, sp, static_cast<int>(n_ref));
    std::vector<LogPoint> sig_pts;
    for (double y : ref.y) sig_pts.push_back({y, 0.0});
    CanonicalProduct cp(PointSequence::from_points(sig_pts));

    long k_top = std::max(0L, n_top - 2);
    for (int i = 0; i < trials - half; ++i) {
        long k = (trials - half) == 1
                     ? 0
                     : std::lround(double(i) * k_top / (trials - half - 1));
        CoefficientVector v;
        v.p = p;
        v.values.assign(k + 1, {0.0, 0.0});
        v.values[k] = {1.0, 0.0};
        Interpolant atom(cp, w, sp, v);
        LogSumAccumulator acc;
        for (std::size_t j = 0; j < g.size(); ++j) {
            LogComplex fv = atom.eval(g[j]);
            if (fv.is_zero()) continue;
            acc.add(LogReal::from_log(p * (fv.log_mag - logL[j])));
        }
        LogReal s = acc.total();
        if (s.sign != 0 && s.log_mag < 700.0)
            best = std::max(best, std::exp(s.log_mag));
        else if (s.sign != 0)
            best = std::numeric_limits<double>::infinity();
    }
    return best;
}

double bernstein_ratio(const CanonicalProduct& cp_ref, const RadialWeight& w,
                       const SpaceParams& sp, const CoefficientVector& f,
                       const LogPoint& z, const LogPoint& w_pt) {
    if (sp.is_infinite())
        throw std::invalid_argument("bernstein_ratio: requires finite p");
    if (cp_ref.find_node(z) != CanonicalProduct::npos ||
        cp_ref.find_node(w_pt) != CanonicalProduct::npos)
        throw std::invalid_argument("bernstein_ratio: z or w lies on a node");
    if (z.t == w_pt.t && normalize_angle(z.theta - w_pt.theta) == 0.0)
        return 0.0;
    LogComplex sep = log_point_diff(z, w_pt);
    if (!sep.is_zero() && sep.log_mag > z.t + std::log(0.2)) {
        std::ostringstream os;
        os << "bernstein_ratio: w outside D(z, 0.2|z|)";
        throw std::invalid_argument(os.str());
    }

    Interpolant fi(cp_ref, w, sp, f);
    LogComplex rz = fi.eval(z) / cp_ref.log_G(z);
    LogComplex rw = fi.eval(w_pt) / cp_ref.log_G(w_pt);
    LogComplex num = complex_log_sum(
        {rz, LogComplex::from_log(rw.log_mag, rw.phase + kPi)});
    if (num.is_zero()) return 0.0;

    double dlog = log_distance(z, w_pt);
    double logL =
        log_evaluation_norm(w, sp, z, EvalNormMethod::theorem).log_mag;
    double logG = cp_ref.log_abs_G(z).log_mag;
    double den_log =
        std::log(dlog) + logL - logG + std::log(f.norm_p());
    double r = num.log_mag - den_log;
    return r > 700.0 ? std::numeric_limits<double>::infinity() : std::exp(r);
}

ClassificationReport classify_infty(const PointSequence& g,
                                    const LogPoint& star,
                                    const RadialWeight& w,
                                    const ClassifyOptions& opts) {
    for (const auto& q : g.points)
        if (q.t == star.t && normalize_angle(q.theta - star.theta) == 0.0)
            throw std::invalid_argument("classify_infty: star collides with g");

    SpaceParams sp2 = SpaceParams::finite(2.0);
    ClassificationReport rep = classify(g, w, sp2, opts);

    std::ostringstream note;
    note << "p=inf reduction: verdict is the p=2 classification of Gamma; "
            "Gamma u {gamma*} (star at t="
         << star.t << ") is complete interpolating for the sup-norm space "
            "iff the normalized kernels over Gamma form a Riesz basis";

    // Gram condition trend as corroboration, when the horizon allows it.
    std::vector<int> sizes;
    for (int M : {10, 20, 40})
        if (static_cast<std::size_t>(M) <= g.size()) sizes.push_back(M);
    if (!sizes.empty()) {
        try {
            double t_max = g[static_cast<std::size_t>(sizes.back()) - 1].t;
            int n_need = static_cast<int>(std::ceil(
                             psi_calculus(w, sp2, t_max).psi1)) +
                         64;
            KernelTable kt = build_kernel_table(w, n_need);
            std::vector<GramMatrix> gs;
            for (int M : sizes) gs.push_back(gram(kt, g, M));
            RieszReport rr = riesz_bounds(gs);
            note << "; gram_condition_trend=" << rr.condition_trend;
        } catch (const std::exception& e) {
            note << "; gram_condition_trend=unavailable(" << e.what() << ")";
        }
    }
    rep.annotation = note.str();
    return rep;
}

}  // namespace fockcis
