// reference.hpp — the reference sequence Sigma_{phi,p} and evaluation norms.
//
// The log-radii y_n solve psi'(y_n) = p n + 2; sigma_n = e^{y_n} is the model
// geometry of the space. ell(t) is the piecewise-affine majorant built from
// prefix sums of the y_n; log-monomial norms and evaluation-functional norms
// come in independent flavors (quadrature vs asymptotic formula, two-term
// kernel formula vs kernel series) so each can serve as the other's oracle.

#pragma once

#include <string>
#include <vector>

#include "fockcis/numerics.hpp"
#include "fockcis/point.hpp"
#include "fockcis/weight.hpp"

namespace fockcis {

struct ReferenceSequence {
    double p = 2.0;
    std::vector<double> y;   // strictly increasing log-radii
    int index_offset = 0;    // first paper index (nonzero if psi'(0+) > 2)
    std::string weight_tag;
    std::vector<double> prefix_sum;  // prefix_sum[m] = y_0 + ... + y_m

    std::size_t size() const { return y.size(); }
    // psi'(y_m) for stored slot m.
    double slope(std::size_t m) const {
        return p * (static_cast<double>(m) + index_offset) + 2.0;
    }
};

// y_n = eta(p n + 2) for 0 <= n <= n_max (offset applied for weights with
// psi'(0+) > 2). Verifies psi'(y_n) against p n + 2 to 1e-12 relative.
ReferenceSequence build_reference(const RadialWeight& w, const SpaceParams& sp,
                                  int n_max);

// Index m with y_m <= t < y_{m+1} (left-closed at knots). Throws when t is
// outside [y_0, y_last).
std::size_t bracket_index(const ReferenceSequence& ref, double t);

// ell(t) = psi'(y_m) t - p (y_0 + ... + y_m) on [y_m, y_{m+1}).
double ell(const ReferenceSequence& ref, double t);

enum class NormMethod { quadrature, asymptotic };

// log ||z^n||_{phi,p}.
//   quadrature: (1/p) log[ 2 pi * integral over R of e^{(pn+2)t - psi(t)} dt ]
//   asymptotic: (1/p) [ -1/2 log psi''(y_n) + (pn+2) y_n - psi(y_n) ]
// The quadrature value carries the 2 pi angular factor; the asymptotic one
// carries no constants. Compare by differencing, never equality.
LogReal log_monomial_norm(const RadialWeight& w, const SpaceParams& sp, int n,
                          NormMethod method);

struct NormTable {
    std::vector<double> log_monomial_norm;  // index n -> log ||z^n||
    NormMethod method = NormMethod::quadrature;
};

NormTable build_norm_table(const RadialWeight& w, const SpaceParams& sp,
                           int n_max, NormMethod method);

enum class EvalNormMethod { theorem, series, monomial_lower };

// log ||L_z||, the norm of point evaluation at z.
//   theorem:       two-term formula (1/p) log[ (psi''(t))^{1/2} e^{-2t}
//                  ( e^{A(n_z+1)} + e^{A(n_z)} ) ], A(k) = psi'(y_k)(t-y_k)+psi(y_k)
//   series:        p=2 only; half the log of K(z,z) = sum e^{2mt}/||z^m||^2
//   monomial_lower: sup_m [ m t - log ||z^m|| ], a variational lower bound
LogReal log_evaluation_norm(const RadialWeight& w, const SpaceParams& sp,
                            LogPoint z, EvalNormMethod method);

// (exact, asymptotic) values of y_1 + ... + y_m; the asymptotic form is
// [ psi'(y_m) y_m - psi(y_m) + (p/2) y_m ] / p, whose gap to the exact sum
// stays O(1).
std::pair<double, double> partial_sum_y(const RadialWeight& w,
                                        const SpaceParams& sp,
                                        const ReferenceSequence& ref,
                                        std::size_t m);

}  // namespace fockcis
