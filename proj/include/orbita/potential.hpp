#ifndef ORBITA_POTENTIAL_HPP
#define ORBITA_POTENTIAL_HPP

#include <array>
#include <limits>
#include <string>
#include <vector>

namespace orbita {

enum class PotentialFamily { homogeneous, logarithmic, levi_civita, lennard_jones, custom };

/// How the effective potential behaves at the outer end of the well:
/// decays to zero (Kepler-like), grows without bound, or has an interior
/// local maximum that caps the admissible energies.
enum class EnergyCeiling { decays_to_zero, coercive, interior_maximum };

struct PowerTerm {
    double coefficient = 0.0;
    double exponent = 0.0;
};

/// A radial potential V(r) represented as a finite sum of power terms
/// plus an optional logarithmic term,
///
///     V(r) = sum_i c_i r^{p_i} + c_log log r,
///
/// on an open domain (r_lo, r_hi) in (0, inf). The representation is closed
/// under differentiation, so derivatives of any order are exact; black-box
/// callables are deliberately not accepted.
class RadialPotential {
public:
    RadialPotential(std::vector<PowerTerm> terms,
                    double log_coefficient = 0.0,
                    double r_lo = 0.0,
                    double r_hi = std::numeric_limits<double>::infinity(),
                    std::string label = "custom",
                    EnergyCeiling ceiling = EnergyCeiling::decays_to_zero);

    /// V(r) = kappa / (alpha r^alpha), kappa > 0, alpha < 2, alpha != 0.
    static RadialPotential homogeneous(double kappa, double alpha);

    /// V(r) = -kappa log r, kappa > 0.
    static RadialPotential logarithmic(double kappa);

    /// V(r) = kappa/r + lambda/r^2, kappa > 0 (lambda <= 0 allowed).
    static RadialPotential levi_civita(double kappa, double lambda);

    /// V(r) = 4 varsigma (sigma^6/r^6 - sigma^12/r^12), varsigma, sigma > 0.
    static RadialPotential lennard_jones(double varsigma, double sigma);

    double operator()(double r) const { return derivative(r, 0); }

    /// Exact n-th derivative of the term representation; any order >= 0.
    double derivative(double r, int order) const;

    /// [V(r), V'(r), ..., V^{(max_order)}(r)], max_order in 0..4.
    std::array<double, 5> derivatives(double r, int max_order = 4) const;

    /// Sum of absolute term values at r: the rounding scale of operator().
    double magnitude(double r) const;

    /// The Clairaut transform u -> V(1/u), again a power-sum + log potential.
    RadialPotential inverted() const;

    bool in_domain(double r) const { return r > r_lo_ && r < r_hi_; }
    void require_domain(double r) const;

    double domain_lo() const { return r_lo_; }
    double domain_hi() const { return r_hi_; }
    const std::vector<PowerTerm>& terms() const { return terms_; }
    double log_coefficient() const { return log_coefficient_; }
    const std::string& label() const { return label_; }
    EnergyCeiling ceiling() const { return ceiling_; }

    PotentialFamily family() const { return family_; }
    /// Family parameters; meaningful fields depend on family().
    double kappa() const { return kappa_; }
    double alpha() const { return alpha_; }
    double lambda() const { return lambda_; }
    double varsigma() const { return varsigma_; }
    double sigma() const { return sigma_; }

private:
    std::vector<PowerTerm> terms_;
    double log_coefficient_ = 0.0;
    double r_lo_ = 0.0;
    double r_hi_ = std::numeric_limits<double>::infinity();
    std::string label_;
    EnergyCeiling ceiling_ = EnergyCeiling::decays_to_zero;

    PotentialFamily family_ = PotentialFamily::custom;
    double kappa_ = 0.0, alpha_ = 0.0, lambda_ = 0.0, varsigma_ = 0.0, sigma_ = 0.0;
};

} // namespace orbita

#endif
