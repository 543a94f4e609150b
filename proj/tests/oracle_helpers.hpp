#ifndef ORBITA_TESTS_ORACLE_HELPERS_HPP
#define ORBITA_TESTS_ORACLE_HELPERS_HPP

#include <cmath>
#include <functional>
#include <vector>

namespace oracles {

inline double rel_err(double got, double want) {
    return std::fabs(got - want) / std::max(std::fabs(want), 1e-300);
}

/// Central finite difference of order `order` (1..4) with step h.
inline double central_diff(const std::function<double(double)>& f, double x, double h, int order) {
    switch (order) {
        case 1:
            return (f(x + h) - f(x - h)) / (2.0 * h);
        case 2:
            return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
        case 3:
            return (f(x + 2.0 * h) - 2.0 * f(x + h) + 2.0 * f(x - h) - f(x - 2.0 * h)) /
                   (2.0 * h * h * h);
        case 4:
            return (f(x + 2.0 * h) - 4.0 * f(x + h) + 6.0 * f(x) - 4.0 * f(x - h) + f(x - 2.0 * h)) /
                   (h * h * h * h);
        default:
            return std::nan("");
    }
}

/// Five-point fourth-order-accurate first derivative.
inline double central_diff5(const std::function<double(double)>& f, double x, double h) {
    return (-f(x + 2.0 * h) + 8.0 * f(x + h) - 8.0 * f(x - h) + f(x - 2.0 * h)) / (12.0 * h);
}

/// Neville extrapolation of samples (x_i, y_i) to x = 0.
inline double extrapolate_to_zero(std::vector<double> x, std::vector<double> y) {
    const std::size_t n = x.size();
    for (std::size_t m = 1; m < n; ++m)
        for (std::size_t i = 0; i + m < n; ++i)
            y[i] = ((0.0 - x[i + m]) * y[i] + (x[i] - 0.0) * y[i + m]) / (x[i] - x[i + m]);
    return y[0];
}

/// Composite Simpson quadrature (test-only oracle, independent of the
/// library's Gauss-Legendre path).
inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
    if (n % 2 == 1)
        ++n;
    const double h = (b - a) / n;
    double acc = f(a) + f(b);
    for (int i = 1; i < n; ++i)
        acc += f(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
    return acc * h / 3.0;
}

} // namespace oracles

#endif
