#include "fockcis/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace fockcis {

PointSequence PointSequence::from_points(std::vector<LogPoint> pts) {
    PointSequence s;
    s.points = std::move(pts);
    std::stable_sort(
        s.points.begin(), s.points.end(),
        [](const LogPoint& a, const LogPoint& b) { return a.t < b.t; });
    return s;
}

double log_distance(const LogPoint& a, const LogPoint& b) {
    if (a.is_origin() && b.is_origin()) return 0.0;
    double t1 = std::min(a.t, b.t);
    double t2 = std::max(a.t, b.t);
    double dtheta = normalize_angle(a.theta - b.theta);

    // |z - w| = e^{t1} |e^{(t2-t1) + i dtheta} - 1|, in logs.
    double u = t2 - t1;
    double log_num;
    if (t1 == kNegInf) {
        log_num = t2;  // one point is the origin
    } else if (u > 36.0) {
        log_num = t1 + u;  // the -1 is invisible at this scale
    } else {
        double em = std::expm1(u);
        double s = 2.0 * std::exp(0.5 * u) * std::sin(0.5 * dtheta);
        double mag2 = em * em + s * s;  // |e^{u+iv} - 1|^2, cancellation-free
        if (mag2 == 0.0) return 0.0;
        log_num = t1 + 0.5 * std::log(mag2);
    }

    double log_den;  // log(1 + e^{t1})
    if (t1 == kNegInf)
        log_den = 0.0;
    else if (t1 > 36.0)
        log_den = t1;
    else
        log_den = std::log1p(std::exp(t1));

    double ld = log_num - log_den;
    if (ld > 700.0) return std::numeric_limits<double>::infinity();
    return std::exp(ld);
}

double separation_constant(const PointSequence& g) {
    if (g.size() < 2)
        throw std::invalid_argument("separation_constant: need >= 2 points");
    const double gap_cut = std::log(3.0);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < g.size(); ++i) {
        for (std::size_t j = i + 1; j < g.size(); ++j) {
            if (j > i + 1 && g[j].t - g[i].t >= gap_cut) break;
            best = std::min(best, log_distance(g[i], g[j]));
            if (best == 0.0) return 0.0;
        }
    }
    return best;
}

Decomposition decompose(const PointSequence& g, const ReferenceSequence& ref) {
    Decomposition d;
    std::size_t n = std::min(g.size(), ref.size());
    d.delta.reserve(n);
    d.theta.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        d.delta.push_back(g[i].t - ref.y[i]);
        d.theta.push_back(g[i].theta);
    }
    return d;
}

namespace {

Trend trend_over_thirds(const std::vector<double>& vals) {
    if (vals.size() < 3) return Trend::flat;
    std::size_t third = vals.size() / 3;
    auto mean = [&](std::size_t lo, std::size_t hi) {
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += vals[i];
        return s / std::max<std::size_t>(1, hi - lo);
    };
    double m1 = mean(0, third);
    double m3 = mean(vals.size() - third, vals.size());
    double tol = 0.01 + 0.05 * std::fabs(m1);
    if (m3 > m1 + tol) return Trend::increasing;
    if (m3 < m1 - tol) return Trend::decreasing;
    return Trend::flat;
}

}  // namespace

DeltaEstimate delta_N_estimate(const Decomposition& d,
                               const ReferenceSequence& ref, int N) {
    if (N < 1) throw std::invalid_argument("delta_N_estimate: N must be >= 1");
    std::size_t horizon = std::min(d.delta.size(), ref.size());
    if (horizon < static_cast<std::size_t>(4 * N)) {
        std::ostringstream os;
        os << "delta_N_estimate: horizon " << horizon << " < 4N = " << 4 * N;
        throw std::invalid_argument(os.str());
    }
    std::size_t n_min = horizon / 4;
    std::size_t n_hi = horizon - 1 - N;  // need y_{n+N}

    std::vector<double> window_vals;
    double win_max = 0.0;
    std::vector<double> prefix(horizon + 1, 0.0);
    for (std::size_t i = 0; i < horizon; ++i)
        prefix[i + 1] = prefix[i] + d.delta[i];
    for (std::size_t n = n_min; n <= n_hi; ++n) {
        double s = prefix[n + N + 1] - prefix[n + 1];  // delta_{n+1}..delta_{n+N}
        double denom = ref.y[n + N] - ref.y[n];
        double v = std::fabs(s) / denom;
        window_vals.push_back(v);
        win_max = std::max(win_max, v);
    }
    return {win_max, trend_over_thirds(window_vals)};
}

ClassificationReport classify(const PointSequence& g, const RadialWeight& w,
                              const SpaceParams& sp,
                              const ClassifyOptions& opts) {
    if (sp.is_infinite())
        throw std::invalid_argument(
            "classify: p = inf routes through classify_infty");
    if (g.size() < 8)
        throw std::invalid_argument("classify: need at least 8 points");

    ClassificationReport rep;
    rep.horizon = g.size();

    rep.separation = separation_constant(g);
    if (rep.separation < opts.sep_min) {
        rep.verdict = "not_cis(separation)";
        return rep;
    }

    ReferenceSequence ref =
        build_reference(w, sp, static_cast<int>(g.size()) - 1);
    Decomposition dec = decompose(g, ref);

    std::vector<double> psi2_delta(dec.delta.size());
    for (std::size_t n = 0; n < dec.delta.size(); ++n) {
        double psi2 = psi_calculus(w, sp, ref.y[n]).psi2;
        psi2_delta[n] = std::fabs(psi2 * dec.delta[n]);
    }
    rep.sup_psi2_delta =
        *std::max_element(psi2_delta.begin(), psi2_delta.end());
    Trend bound_trend = trend_over_thirds(psi2_delta);
    if (rep.sup_psi2_delta > opts.bound_cap ||
        bound_trend == Trend::increasing) {
        rep.verdict = "not_cis(psi2_delta)";
        return rep;
    }

    int n_cap = std::min<int>(opts.N_max, static_cast<int>(g.size()) / 4);
    double best = std::numeric_limits<double>::infinity();
    Trend best_trend = Trend::flat;
    for (int N = 1; N <= n_cap; ++N) {
        DeltaEstimate est = delta_N_estimate(dec, ref, N);
        rep.delta_N_table[N] = est.value;
        if (est.value < best) {
            best = est.value;
            best_trend = est.trend;
        }
    }

    const double critical = 0.5;
    if (best < critical - opts.margin) {
        if (best_trend == Trend::increasing)
            rep.verdict = "inconclusive(delta_N_trend)";
        else
            rep.verdict = "cis";
    } else if (best <= critical + opts.margin) {
        rep.verdict = "inconclusive(delta_N_margin)";
    } else {
        rep.verdict = "not_cis(delta_N)";
    }
    return rep;
}

DensityReport phi_density(const PointSequence& g, const RadialWeight& w,
                          const SpaceParams& sp, double R, int r_samples) {
    if (!(R > 0.0)) throw std::invalid_argument("phi_density: R must be > 0");
    if (r_samples < 1)
        throw std::invalid_argument("phi_density: need >= 1 sample");

    DensityReport rep;
    rep.R_used = R;
    if (g.size() < 2) return rep;  // degenerate: zero densities, empty grid

    std::vector<double> s(g.size());
    for (std::size_t i = 0; i < g.size(); ++i)
        s[i] = psi_calculus(w, sp, g[i].t).psi1;
    std::sort(s.begin(), s.end());

    double span = s.back() - s.front();
    if (R > span) {
        std::ostringstream os;
        os << "phi_density: R=" << R << " exceeds the data span " << span;
        throw std::invalid_argument(os.str());
    }

    double lo = s.front(), hi = s.back() - R;
    rep.lower = std::numeric_limits<double>::infinity();
    rep.upper = 0.0;
    for (int i = 0; i < r_samples; ++i) {
        double r = r_samples == 1
                       ? lo
                       : lo + (hi - lo) * i / (r_samples - 1);
        rep.r_grid.push_back(r);
        auto b = std::lower_bound(s.begin(), s.end(), r);
        auto e = std::lower_bound(s.begin(), s.end(), r + R);
        double count = static_cast<double>(e - b);
        rep.lower = std::min(rep.lower, count / R);
        rep.upper = std::max(rep.upper, count / R);
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Completion / extraction constructions (Theorem 3 (a), (b)).
// ---------------------------------------------------------------------------

namespace {

// psi'-window of annulus m: (a_m, a_m + pM), a_m = p (mM + offset) + 2 - p/2.
// Annulus m holds exactly the reference slots mM .. (m+1)M - 1.
struct AnnulusGrid {
    double p = 2.0;
    int M = 1;
    int offset = 0;

    double lo_target(int m) const {
        return std::max(1e-9, p * (static_cast<double>(m) * M + offset) + 2.0 -
                                  0.5 * p);
    }
    double hi_target(int m) const { return lo_target(m) + p * M; }
};

int annulus_of(const AnnulusGrid& grid, double s) {
    // smallest m with s < hi_target(m)
    double raw = (s - 2.0 + 0.5 * grid.p) / grid.p - grid.offset;
    int m = static_cast<int>(std::floor(raw / grid.M));
    while (m > 0 && s <= grid.lo_target(m)) --m;
    while (s >= grid.hi_target(m)) ++m;
    return std::max(0, m);
}

double default_low_threshold(double p) { return 1.0 / p - 0.02; }
double default_high_threshold(double p) { return 1.0 / p + 0.02; }

// Candidate t-positions for d added points inside [lo, hi) avoiding the
// occupied positions; bias u in [0,1] slides the chosen run from the earliest
// free slots to the latest.
std::vector<double> choose_positions(const std::vector<double>& occupied,
                                     double lo, double hi, int d, double u,
                                     double pitch) {
    std::vector<double> slots;
    for (int refine = 0; refine < 8 && static_cast<int>(slots.size()) < d;
         ++refine) {
        slots.clear();
        double h = pitch / (1 << refine);
        std::vector<double> bounds;
        bounds.push_back(lo);
        for (double t : occupied)
            if (t > lo && t < hi) bounds.push_back(t);
        bounds.push_back(hi);
        for (std::size_t i = 0; i + 1 < bounds.size(); ++i) {
            double a = bounds[i], b = bounds[i + 1];
            int nsub = static_cast<int>(std::floor((b - a) / h));
            for (int j = 0; j < nsub; ++j)
                slots.push_back(a + (b - a) * (j + 0.5) / nsub);
        }
        std::sort(slots.begin(), slots.end());
    }
    if (static_cast<int>(slots.size()) < d)
        throw std::logic_error(
            "complete_to_cis: no empty gap annulus available (cannot occur "
            "under the density precondition)");
    int start = static_cast<int>(
        std::lround(u * (static_cast<double>(slots.size()) - d)));
    start = std::clamp(start, 0, static_cast<int>(slots.size()) - d);
    return {slots.begin() + start, slots.begin() + start + d};
}

// Sum of (t - y) over the sorted union of existing and added points in one
// annulus, paired with reference slots mM .. (m+1)M-1.
double annulus_delta_sum(std::vector<double> ts,
                         const ReferenceSequence& ref, std::size_t slot0) {
    std::sort(ts.begin(), ts.end());
    double s = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i)
        s += ts[i] - ref.y[slot0 + i];
    return s;
}

double phase_away_from_neighbors(const std::vector<LogPoint>& pts, double t) {
    if (pts.empty()) return 0.0;
    double best_dt = std::numeric_limits<double>::infinity();
    double theta = 0.0;
    for (const auto& q : pts) {
        double dt = std::fabs(q.t - t);
        if (dt < best_dt) {
            best_dt = dt;
            theta = q.theta;
        }
    }
    return normalize_angle(theta + kPi);
}

}  // namespace

PointSequence complete_to_cis(const PointSequence& g, const RadialWeight& w,
                              const SpaceParams& sp,
                              const ConstructionOptions& opts) {
    if (sp.is_infinite())
        throw std::invalid_argument("complete_to_cis: requires finite p");
    double p = sp.p;
    double threshold = opts.density_threshold >= 0.0
                           ? opts.density_threshold
                           : default_low_threshold(p);
    if (g.size() >= 2) {
        DensityReport dens = phi_density(g, w, sp, opts.density_R);
        if (!(dens.upper < threshold)) {
            std::ostringstream os;
            os << "complete_to_cis: upper density " << dens.upper
               << " violates precondition < " << threshold;
            throw std::invalid_argument(os.str());
        }
    }

    // psi'-coordinates of the input (kept aligned with g's sorted order).
    std::vector<double> s(g.size());
    for (std::size_t i = 0; i < g.size(); ++i)
        s[i] = psi_calculus(w, sp, g[i].t).psi1;

    // Horizon in reference slots: cover the data plus the floor.
    ReferenceSequence probe = build_reference(w, sp, 0);
    int offset = probe.index_offset;
    double s_last = g.empty() ? 0.0 : s.back();
    int slot_cap = std::max(
        opts.min_slots,
        static_cast<int>(std::ceil((s_last - 2.0) / p)) - offset + 2);

    // Smallest M whose partition annuli all hold at most M points.
    AnnulusGrid grid{p, 1, offset};
    int M = 0;
    int m_hi = 0;
    std::vector<int> counts;
    for (int cand = 1; cand <= 64; ++cand) {
        grid.M = cand;
        m_hi = (slot_cap + cand - 1) / cand - 1;
        counts.assign(m_hi + 1, 0);
        bool ok = true;
        for (double sv : s) {
            int m = annulus_of(grid, sv);
            if (m > m_hi) continue;
            if (++counts[m] > cand) {
                ok = false;
                break;
            }
        }
        if (ok) {
            M = cand;
            break;
        }
    }
    if (M == 0)
        throw std::runtime_error("complete_to_cis: no annulus size M <= 64 fits");

    int total_deficit = 0;
    for (int m = 0; m <= m_hi; ++m) total_deficit += M - counts[m];
    if (total_deficit == 0) return g;  // every annulus already full

    ReferenceSequence ref = build_reference(w, sp, (m_hi + 1) * M);

    // Existing points per annulus.
    std::vector<std::vector<std::size_t>> members(m_hi + 1);
    for (std::size_t i = 0; i < g.size(); ++i) {
        int m = annulus_of(grid, s[i]);
        if (m <= m_hi) members[m].push_back(i);
    }

    const int block = std::max(1, opts.block_multiplier * M);
    std::vector<LogPoint> added;
    double block_sum = 0.0;
    for (int m = 0; m <= m_hi; ++m) {
        if (m % block == 0) block_sum = 0.0;
        double t_lo = eta(w, sp, grid.lo_target(m));
        double t_hi = eta(w, sp, grid.hi_target(m));
        std::vector<double> occupied;
        std::vector<LogPoint> local_pts;
        for (std::size_t idx : members[m]) {
            occupied.push_back(g[idx].t);
            local_pts.push_back(g[idx]);
        }
        int d = M - static_cast<int>(occupied.size());
        std::size_t slot0 = static_cast<std::size_t>(m) * M;
        if (d == 0) {
            block_sum += annulus_delta_sum(occupied, ref, slot0);
            continue;
        }
        double pitch = (t_hi - t_lo) / (2.0 * M);
        double best_u = 0.0;
        double best_score = std::numeric_limits<double>::infinity();
        std::vector<double> best_pos;
        for (int ui = 0; ui <= 8; ++ui) {
            double u = ui / 8.0;
            std::vector<double> pos =
                choose_positions(occupied, t_lo, t_hi, d, u, pitch);
            std::vector<double> ts = occupied;
            ts.insert(ts.end(), pos.begin(), pos.end());
            double sum = annulus_delta_sum(ts, ref, slot0);
            double score = std::fabs(block_sum + sum);
            if (score < best_score - 1e-15) {
                best_score = score;
                best_u = u;
                best_pos = pos;
            }
        }
        (void)best_u;
        for (double t : best_pos) {
            LogPoint np{t, phase_away_from_neighbors(local_pts, t)};
            local_pts.push_back(np);
            added.push_back(np);
        }
        std::vector<double> ts = occupied;
        ts.insert(ts.end(), best_pos.begin(), best_pos.end());
        block_sum += annulus_delta_sum(ts, ref, slot0);
    }

    std::vector<LogPoint> all = g.points;
    all.insert(all.end(), added.begin(), added.end());
    return PointSequence::from_points(std::move(all));
}

PointSequence extract_cis(const PointSequence& g, const RadialWeight& w,
                          const SpaceParams& sp,
                          const ConstructionOptions& opts) {
    if (sp.is_infinite())
        throw std::invalid_argument("extract_cis: requires finite p");
    if (g.size() < 2)
        throw std::invalid_argument("extract_cis: need at least 2 points");
    double p = sp.p;
    double threshold = opts.density_threshold >= 0.0
                           ? opts.density_threshold
                           : default_high_threshold(p);
    DensityReport dens = phi_density(g, w, sp, opts.density_R);
    if (!(dens.lower > threshold)) {
        std::ostringstream os;
        os << "extract_cis: lower density " << dens.lower
           << " violates precondition > " << threshold;
        throw std::invalid_argument(os.str());
    }

    std::vector<double> s(g.size());
    for (std::size_t i = 0; i < g.size(); ++i)
        s[i] = psi_calculus(w, sp, g[i].t).psi1;

    ReferenceSequence probe = build_reference(w, sp, 0);
    int offset = probe.index_offset;

    // Smallest M with every sliding width-pM window holding >= M+1 points.
    auto min_window_count = [&](double width) {
        std::size_t best = g.size();
        for (std::size_t j = 0; j < s.size(); ++j) {
            double r = s[j] + 1e-12;
            if (r + width > s.back() + 1e-9) break;
            auto b = std::lower_bound(s.begin(), s.end(), r);
            auto e = std::lower_bound(s.begin(), s.end(), r + width);
            best = std::min(best, static_cast<std::size_t>(e - b));
        }
        {
            auto e = std::lower_bound(s.begin(), s.end(), s.front() + width);
            best = std::min(best, static_cast<std::size_t>(e - s.begin()));
        }
        return best;
    };
    int M = 0;
    double span = s.back() - s.front();
    for (int cand = 1; cand <= 64 && p * cand <= span; ++cand) {
        if (min_window_count(p * cand) >= static_cast<std::size_t>(cand) + 1) {
            M = cand;
            break;
        }
    }
    if (M == 0)
        throw std::runtime_error(
            "extract_cis: no annulus size M <= 64 gives a point surplus");

    AnnulusGrid grid{p, M, offset};
    int m_hi = annulus_of(grid, s.back());
    // Trailing annulus kept only if it has its full M points.
    std::vector<std::vector<std::size_t>> members(m_hi + 1);
    for (std::size_t i = 0; i < g.size(); ++i) {
        int m = annulus_of(grid, s[i]);
        if (m <= m_hi) members[m].push_back(i);
    }
    while (m_hi >= 0 && static_cast<int>(members[m_hi].size()) < M) --m_hi;
    if (m_hi < 0)
        throw std::runtime_error("extract_cis: no annulus holds M points");

    ReferenceSequence ref = build_reference(w, sp, (m_hi + 1) * M);

    const int block = std::max(1, opts.block_multiplier * M);
    std::vector<LogPoint> kept;
    double block_sum = 0.0;
    for (int m = 0; m <= m_hi; ++m) {
        if (m % block == 0) block_sum = 0.0;
        const auto& mem = members[m];
        int c = static_cast<int>(mem.size());
        if (c < M) {
            std::ostringstream os;
            os << "extract_cis: annulus " << m << " holds only " << c << " < "
               << M << " points";
            throw std::runtime_error(os.str());
        }
        std::size_t slot0 = static_cast<std::size_t>(m) * M;
        int best_j = 0;
        double best_score = std::numeric_limits<double>::infinity();
        for (int j = 0; j + M <= c; ++j) {
            std::vector<double> ts;
            for (int i = 0; i < M; ++i) ts.push_back(g[mem[j + i]].t);
            double sum = annulus_delta_sum(ts, ref, slot0);
            double score = std::fabs(block_sum + sum);
            if (score < best_score - 1e-15) {
                best_score = score;
                best_j = j;
            }
        }
        std::vector<double> ts;
        for (int i = 0; i < M; ++i) {
            kept.push_back(g[mem[best_j + i]]);
            ts.push_back(g[mem[best_j + i]].t);
        }
        block_sum += annulus_delta_sum(ts, ref, slot0);
    }
    return PointSequence::from_points(std::move(kept));
}

}  // namespace fockcis
