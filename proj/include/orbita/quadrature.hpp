#ifndef ORBITA_QUADRATURE_HPP
#define ORBITA_QUADRATURE_HPP

#include <vector>

namespace orbita {

/// Nodes and weights of an n-point Gauss-Legendre rule on [-1, 1].
struct GaussLegendreRule {
    int order = 0;
    std::vector<double> nodes;
    std::vector<double> weights;

    /// Integrate f over [a, b].
    template <typename F>
    double integrate(F&& f, double a, double b) const {
        const double mid = 0.5 * (a + b);
        const double half = 0.5 * (b - a);
        double acc = 0.0;
        for (int i = 0; i < order; ++i)
            acc += weights[i] * f(mid + half * nodes[i]);
        return half * acc;
    }
};

/// Shared, cached rule of the given order. Thread-safe.
const GaussLegendreRule& gauss_legendre(int order);

} // namespace orbita

#endif
