#include "orbita/potential.hpp"

#include "orbita/errors.hpp"

#include <cmath>
#include <sstream>

namespace orbita {

RadialPotential::RadialPotential(std::vector<PowerTerm> terms,
                                 double log_coefficient,
                                 double r_lo,
                                 double r_hi,
                                 std::string label,
                                 EnergyCeiling ceiling)
    : terms_(std::move(terms)),
      log_coefficient_(log_coefficient),
      r_lo_(r_lo),
      r_hi_(r_hi),
      label_(std::move(label)),
      ceiling_(ceiling) {
    if (!(r_lo_ >= 0.0) || !(r_lo_ < r_hi_)) {
        std::ostringstream msg;
        msg << "potential '" << label_ << "': domain must satisfy 0 <= r_lo < r_hi, got ("
            << r_lo_ << ", " << r_hi_ << ")";
        throw ParameterError(msg.str());
    }
    for (const auto& t : terms_) {
        if (!std::isfinite(t.exponent) || !std::isfinite(t.coefficient))
            throw ParameterError("potential '" + label_ + "': term coefficients and exponents must be finite");
    }
    if (!std::isfinite(log_coefficient_))
        throw ParameterError("potential '" + label_ + "': log coefficient must be finite");
}

RadialPotential RadialPotential::homogeneous(double kappa, double alpha) {
    if (!(kappa > 0.0))
        throw ParameterError("homogeneous potential requires kappa > 0, got kappa = " + std::to_string(kappa));
    if (!(alpha < 2.0))
        throw ParameterError("homogeneous potential requires alpha < 2, got alpha = " + std::to_string(alpha));
    if (alpha == 0.0)
        throw ParameterError("homogeneous potential requires alpha != 0 (use the logarithmic family)");
    RadialPotential p({{kappa / alpha, -alpha}}, 0.0, 0.0,
                      std::numeric_limits<double>::infinity(),
                      "homogeneous",
                      alpha > 0.0 ? EnergyCeiling::decays_to_zero : EnergyCeiling::coercive);
    p.family_ = PotentialFamily::homogeneous;
    p.kappa_ = kappa;
    p.alpha_ = alpha;
    return p;
}

RadialPotential RadialPotential::logarithmic(double kappa) {
    if (!(kappa > 0.0))
        throw ParameterError("logarithmic potential requires kappa > 0, got kappa = " + std::to_string(kappa));
    RadialPotential p({}, -kappa, 0.0, std::numeric_limits<double>::infinity(),
                      "logarithmic", EnergyCeiling::coercive);
    p.family_ = PotentialFamily::logarithmic;
    p.kappa_ = kappa;
    return p;
}

RadialPotential RadialPotential::levi_civita(double kappa, double lambda) {
    if (!(kappa > 0.0))
        throw ParameterError("levi_civita potential requires kappa > 0, got kappa = " + std::to_string(kappa));
    if (!std::isfinite(lambda))
        throw ParameterError("levi_civita potential requires finite lambda");
    RadialPotential p({{kappa, -1.0}, {lambda, -2.0}}, 0.0, 0.0,
                      std::numeric_limits<double>::infinity(),
                      "levi_civita", EnergyCeiling::decays_to_zero);
    p.family_ = PotentialFamily::levi_civita;
    p.kappa_ = kappa;
    p.lambda_ = lambda;
    return p;
}

RadialPotential RadialPotential::lennard_jones(double varsigma, double sigma) {
    if (!(varsigma > 0.0))
        throw ParameterError("lennard_jones potential requires varsigma > 0, got varsigma = " +
                             std::to_string(varsigma));
    if (!(sigma > 0.0))
        throw ParameterError("lennard_jones potential requires sigma > 0, got sigma = " + std::to_string(sigma));
    const double s6 = std::pow(sigma, 6.0);
    RadialPotential p({{4.0 * varsigma * s6, -6.0}, {-4.0 * varsigma * s6 * s6, -12.0}}, 0.0, 0.0,
                      std::numeric_limits<double>::infinity(),
                      "lennard_jones", EnergyCeiling::interior_maximum);
    p.family_ = PotentialFamily::lennard_jones;
    p.varsigma_ = varsigma;
    p.sigma_ = sigma;
    return p;
}

void RadialPotential::require_domain(double r) const {
    if (!in_domain(r)) {
        std::ostringstream msg;
        msg << "potential '" << label_ << "': r = " << r << " outside domain (" << r_lo_ << ", " << r_hi_ << ")";
        throw DomainError(msg.str());
    }
}

double RadialPotential::derivative(double r, int order) const {
    require_domain(r);
    if (order < 0)
        throw ParameterError("derivative order must be >= 0");
    double acc = 0.0;
    for (const auto& t : terms_) {
        double fac = t.coefficient;
        for (int j = 0; j < order; ++j)
            fac *= t.exponent - j;
        if (fac != 0.0)
            acc += fac * std::pow(r, t.exponent - order);
    }
    if (log_coefficient_ != 0.0) {
        if (order == 0) {
            acc += log_coefficient_ * std::log(r);
        } else {
            // d^n/dr^n log r = (-1)^{n-1} (n-1)! r^{-n}
            double fac = log_coefficient_;
            for (int j = 1; j < order; ++j)
                fac *= -j;
            acc += fac * std::pow(r, static_cast<double>(-order));
        }
    }
    return acc;
}

double RadialPotential::magnitude(double r) const {
    require_domain(r);
    double acc = 0.0;
    for (const auto& t : terms_)
        acc += std::fabs(t.coefficient) * std::pow(r, t.exponent);
    if (log_coefficient_ != 0.0)
        acc += std::fabs(log_coefficient_ * std::log(r));
    return acc;
}

std::array<double, 5> RadialPotential::derivatives(double r, int max_order) const {
    if (max_order < 0 || max_order > 4)
        throw ParameterError("derivatives: max_order must lie in 0..4");
    std::array<double, 5> out{};
    for (int n = 0; n <= max_order; ++n)
        out[n] = derivative(r, n);
    return out;
}

RadialPotential RadialPotential::inverted() const {
    std::vector<PowerTerm> inv;
    inv.reserve(terms_.size());
    for (const auto& t : terms_)
        inv.push_back({t.coefficient, -t.exponent});
    const double lo = std::isinf(r_hi_) ? 0.0 : 1.0 / r_hi_;
    const double hi = r_lo_ == 0.0 ? std::numeric_limits<double>::infinity() : 1.0 / r_lo_;
    RadialPotential p(std::move(inv), -log_coefficient_, lo, hi, label_ + "(1/u)", ceiling_);
    p.family_ = family_;
    p.kappa_ = kappa_;
    p.alpha_ = alpha_;
    p.lambda_ = lambda_;
    p.varsigma_ = varsigma_;
    p.sigma_ = sigma_;
    return p;
}

} // namespace orbita
