// weight.hpp — the radial weight phi and its associated psi-calculus.
//
// psi(t) = psi_p(t) = p * phi(e^t) carries the whole geometry: psi' converts
// log-radii to counting coordinates, eta = (psi')^{-1} converts back, psi''
// is the local bandwidth, and the radial Laplacian satisfies
// psi''(t) = p e^{2t} (Delta phi)(e^t).
//
// The built-in family is phi_alpha(r) = (log+ r)^alpha with 1 < alpha <= 2
// (log+ vanishes on r < 1, so psi vanishes on t < 0). Custom weights supply
// phi, phi', phi''; psi''' is finite-differenced.

#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace fockcis {

using ScalarMap = std::function<double(double)>;

class RadialWeight {
  public:
    // phi(r) = (log+ r)^alpha, alpha in (1, 2].
    static RadialWeight alpha_model(double alpha);

    // Custom weight from phi and its first two radial derivatives, all
    // finite on (0, inf).
    static RadialWeight custom(ScalarMap phi, ScalarMap dphi, ScalarMap d2phi,
                               std::string description);

    bool is_alpha_model() const { return is_alpha_; }
    double alpha() const { return alpha_; }
    const std::string& description() const { return description_; }

    // Weight value at radius r (r > 0).
    double phi(double r) const;
    double dphi(double r) const;
    double d2phi(double r) const;

  private:
    RadialWeight() = default;
    bool is_alpha_ = true;
    double alpha_ = 2.0;
    ScalarMap phi_, dphi_, d2phi_;
    std::string description_;
};

// Integrability index p of the space; p = inf is the distinguished sup-norm
// case (routed through the p=2 reduction in the frame module).
struct SpaceParams {
    double p = 2.0;

    static SpaceParams finite(double p);
    static SpaceParams infinite();
    bool is_infinite() const;
};

struct PsiDerivatives {
    double psi = 0.0;
    double psi1 = 0.0;
    double psi2 = 0.0;
    double psi3 = 0.0;
};

// psi and its first three derivatives at t. Closed forms for the alpha
// family; chain rule plus a central difference for psi''' on custom weights.
PsiDerivatives psi_calculus(const RadialWeight& w, const SpaceParams& sp,
                            double t);

// eta(s) = (psi')^{-1}(s), via monotone_root on an auto-expanded bracket.
double eta(const RadialWeight& w, const SpaceParams& sp, double s);

// Radial Laplacian Delta phi at radius r, from psi'' via
// psi''(t) = p e^{2t} (Delta phi)(e^t).
double laplacian(const RadialWeight& w, const SpaceParams& sp, double r);

// Sampled audit of the regularity conditions: psi' increasing, psi'' > 0
// non-increasing, |psi'''| / (psi'')^{5/3} not growing. A sampled verdict,
// not a proof; the description field says so.
struct RegularityReport {
    std::vector<double> grid;
    bool psi_prime_increasing_to_inf = false;
    bool psi_double_positive_nonincreasing = false;
    std::vector<double> third_derivative_ratio;
    std::string verdict;  // "pass" or "fail(<reason>)"
    std::string description;

    bool passed() const { return verdict == "pass"; }
};

RegularityReport audit_regularity(const RadialWeight& w, const SpaceParams& sp,
                                  std::pair<double, double> t_range,
                                  int samples);

// One sampled row of a custom weight table.
struct WeightTableRow {
    double r = 0.0, phi = 0.0, dphi = 0.0, d2phi = 0.0;
};

// Build a custom weight from sampled rows, each column interpolated by a
// shape-preserving (Fritsch-Carlson) cubic in r. Below the first knot the
// weight is held flat; queries above the last knot throw.
RadialWeight weight_from_table(std::vector<WeightTableRow> rows,
                               std::string name);

}  // namespace fockcis
