// frame.hpp — p=2 reproducing kernels, Gram/Riesz diagnostics, and the
// transfer matrices behind the boundedness arguments.
//
// K(w, z) = sum_n (w zbar)^n / ||z^n||^2_{phi,2} is evaluated in the log
// domain from a cached table of squared monomial norms. Riesz-basis bounds
// are approached through finite sections: extreme eigenvalues of M x M
// normalized Gram matrices and the growth trend of their condition numbers.
// The transfer matrices A_{n,m} (ell^p) and B_{n,m} (ell^inf) connect a
// candidate sequence to the reference grid; a Schur row/column-sum bound
// serves as the bounded-operator certificate surrogate.

#pragma once

#include <complex>
#include <string>
#include <vector>

#include "fockcis/geometry.hpp"
#include "fockcis/numerics.hpp"
#include "fockcis/point.hpp"
#include "fockcis/product.hpp"
#include "fockcis/weight.hpp"

namespace fockcis {

struct KernelTable {
    std::string weight_tag;
    std::vector<double> log_sq_monomial_norms;  // log ||z^n||^2_{phi,2}
    double truncation_drop = 40.0;
};

// Squared monomial norms (quadrature method, p=2) up to n_max.
KernelTable build_kernel_table(const RadialWeight& w, int n_max);

// K(w_pt, z_pt); throws when the table is too short for the dominant index.
LogComplex kernel(const KernelTable& kt, const LogPoint& w_pt,
                  const LogPoint& z_pt);

// Hermitian M x M matrix of normalized kernel inner products
// K(g_j, g_k) / sqrt(K(g_j,g_j) K(g_k,g_k)); unit diagonal, O(1) entries.
struct GramMatrix {
    int size = 0;
    std::vector<std::complex<double>> entries;  // row-major

    std::complex<double>& at(int j, int k) { return entries[j * size + k]; }
    const std::complex<double>& at(int j, int k) const {
        return entries[j * size + k];
    }
};

GramMatrix gram(const KernelTable& kt, const PointSequence& g, int M);

struct RieszReport {
    std::vector<int> sizes;
    std::vector<double> lower_bounds;  // min eigenvalue per size
    std::vector<double> upper_bounds;  // max eigenvalue per size
    std::string condition_trend;       // "bounded" | "growing(slope=...)"
};

// Extreme eigenvalues per finite section; trend is "growing" when the
// condition number rises monotonically by a factor > 2 across the sizes.
// Eigen-residuals are checked to 1e-8; a min eigenvalue below -1e-10 throws
// (kernel truncation too aggressive).
RieszReport riesz_bounds(const std::vector<GramMatrix>& grams);

enum class TransferMode { A_p, B_infty };

struct TransferMatrix {
    TransferMode mode = TransferMode::A_p;
    double p = 2.0;
    int rows = 0, cols = 0;
    std::vector<LogReal> abs_entries;  // |entry|, row-major; rows = Gamma,
                                       // cols = reference grid

    const LogReal& at(int n, int m) const { return abs_entries[n * cols + m]; }
};

// A_{n,m} = (||L_{gamma_n}|| / ||L_{sigma_m}||) G(sigma_m) /
//           (G'(gamma_n)(sigma_m - gamma_n)), with exact zeros where sigma_m
// is a node and the analytic limit 1 on the diagonal. B_infty uses the
// e^{phi(gamma_n) - phi(sigma_m)} |sigma_m| / |gamma_n| weights instead of
// evaluation norms. The candidate must extend 10 log-units past the grid.
TransferMatrix transfer_matrix(const PointSequence& g, const RadialWeight& w,
                               const SpaceParams& sp, int horizon,
                               TransferMode mode);

// max(max row ell^1 sum, max column ell^1 sum): upper-bounds the ell^2 norm
// and certifies all p by Schur/interpolation only when both sums are
// uniformly bounded in the horizon.
double schur_norm_bound(const TransferMatrix& tm, double p);

// Numeric sup of sum_gamma |f(gamma)|^p / ||L_gamma||^p over a family of
// unit-norm test functions (normalized monomials and the reference
// interpolation atoms g_sigma). Finite and horizon-stable iff g is a finite
// union of logarithmically separated sequences.
double bessel_ratio(const PointSequence& g, const RadialWeight& w,
                    const SpaceParams& sp, int trials);

// Ratio |f/G(z) - f/G(w)| / (d_log(z,w) ||L_z||/|G(z)| ||f||_Sigma) for the
// Bernstein-type inequality; w_pt must lie in D(z, 0.1|z|).
double bernstein_ratio(const CanonicalProduct& cp_ref, const RadialWeight& w,
                       const SpaceParams& sp, const CoefficientVector& f,
                       const LogPoint& z, const LogPoint& w_pt);

// p = inf classification: Gamma ∪ {star} is complete interpolating for the
// sup-norm space iff the normalized kernels over Gamma form a Riesz basis of
// the p=2 space; implemented as the p=2 classifier plus a Gram-trend
// corroboration recorded in the annotation.
ClassificationReport classify_infty(const PointSequence& g,
                                    const LogPoint& star,
                                    const RadialWeight& w,
                                    const ClassifyOptions& opts = {});

}  // namespace fockcis
