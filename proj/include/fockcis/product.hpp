// product.hpp — canonical products G_Gamma and the Lagrange-type
// interpolation operator they generate.
//
// G_Gamma(z) = prod (1 - z/gamma) is evaluated term-wise in the log domain;
// nodes 10 log-units beyond |z| contribute through an analytic geometric
// tail bound instead of explicit factors. The interpolation operator
//   f_v(z) = sum_n v_n ||L_{gamma_n}|| G(z) / (G'(gamma_n)(z - gamma_n))
// reproduces v_n ||L_{gamma_n}|| exactly at the nodes (the defining limit is
// isolated analytically). Differences z - gamma are always computed in the
// factored form e^{t_min}(e^{dt + i dtheta} - 1).

#pragma once

#include <complex>
#include <vector>

#include "fockcis/geometry.hpp"
#include "fockcis/numerics.hpp"
#include "fockcis/point.hpp"
#include "fockcis/reference.hpp"
#include "fockcis/weight.hpp"

namespace fockcis {

// log(a - b) as a LogComplex, scale-safe for any magnitudes.
LogComplex log_point_diff(const LogPoint& a, const LogPoint& b);

class CanonicalProduct {
  public:
    // Nodes must be distinct (duplicates would put a zero on G').
    explicit CanonicalProduct(PointSequence nodes);

    const PointSequence& nodes() const { return nodes_; }
    std::size_t size() const { return nodes_.size(); }

    // Complex log of G(z); exact zero (log_mag = -inf) when z is a node.
    LogComplex log_G(const LogPoint& z) const;
    LogReal log_abs_G(const LogPoint& z) const {
        return log_G(z).abs();
    }

    // Complex log of G'(gamma_k); cached after first computation.
    LogComplex log_G_derivative(std::size_t k) const;
    LogReal log_abs_G_derivative(std::size_t k) const {
        return log_G_derivative(k).abs();
    }

    // Index of the node exactly equal to z, or npos.
    std::size_t find_node(const LogPoint& z) const;
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  private:
    PointSequence nodes_;
    mutable std::vector<char> deriv_cached_;
    mutable std::vector<LogComplex> deriv_cache_;
};

// Two-sided envelope check of |G(z)|^p e^{-p phi(z)} against
// dist(z,Gamma)^p (1+|z|)^{-(2 + p/2 +- (p Delta_N + eps))}, with slack C.
struct EnvelopeCheck {
    bool low_ok = false;
    bool high_ok = false;
    double ratio = 0.0;      // lhs over the geometric mean of the two sides
    double delta_N = 0.0;    // the finite-horizon estimate used
    double log_gap_low = 0.0;   // log(lhs) - log(lower side)
    double log_gap_high = 0.0;  // log(upper side) - log(lhs)
};

EnvelopeCheck envelope_ratio(const CanonicalProduct& cp, const RadialWeight& w,
                             const SpaceParams& sp, const LogPoint& z, int N,
                             double eps, double slack_C = 1e3);

struct CoefficientVector {
    std::vector<std::complex<double>> values;  // v_n, dense from n = 0
    double p = 2.0;

    double norm_p() const;  // ell^p norm of the values
};

// Prepared interpolant: per-node weights v_n ||L_{gamma_n}|| / G'(gamma_n)
// are computed once so repeated evaluations stay cheap.
class Interpolant {
  public:
    Interpolant(const CanonicalProduct& cp, const RadialWeight& w,
                const SpaceParams& sp, const CoefficientVector& v);

    // f_v(z); at a node gamma_k returns v_k ||L_{gamma_k}|| exactly.
    LogComplex eval(const LogPoint& z) const;

  private:
    const CanonicalProduct& cp_;
    std::vector<LogComplex> node_weight_;   // v_n ||L_n|| / G'(gamma_n)
    std::vector<LogComplex> node_value_;    // v_n ||L_n||
};

// One-shot evaluation of the interpolation operator.
LogComplex interpolate(const CanonicalProduct& cp, const RadialWeight& w,
                       const SpaceParams& sp, const CoefficientVector& v,
                       const LogPoint& z);

// (1/p) log of integral |f|^p e^{-p phi} dm, by 64 trapezoid angles times a
// radial Laplace quadrature per angle. Used as the norm oracle for
// finitely-supported interpolants.
LogReal log_norm_2d(const RadialWeight& w, const SpaceParams& sp,
                    const std::function<LogComplex(const LogPoint&)>& f,
                    double peak_hint);

}  // namespace fockcis
