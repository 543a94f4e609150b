#include "orbita/quadrature.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>

namespace orbita {

namespace {

// Roots of the Legendre polynomial by Newton iteration on the
// three-term recurrence, symmetric halves filled in pairs.
GaussLegendreRule build_rule(int n) {
    GaussLegendreRule rule;
    rule.order = n;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0, dz;
        do {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 1; j <= n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2 * j - 1) * z * p2 - (j - 1) * p3) / j;
            }
            pp = n * (z * p1 - p2) / (z * z - 1.0);
            dz = -p1 / pp;
            z += dz;
        } while (std::fabs(dz) > 4.0 * std::numeric_limits<double>::epsilon());
        rule.nodes[i] = -z;
        rule.nodes[n - 1 - i] = z;
        rule.weights[i] = rule.weights[n - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
    }
    return rule;
}

} // namespace

const GaussLegendreRule& gauss_legendre(int order) {
    static std::mutex mutex;
    static std::map<int, std::unique_ptr<GaussLegendreRule>> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto& slot = cache[order];
    if (!slot)
        slot = std::make_unique<GaussLegendreRule>(build_rule(order));
    return *slot;
}

} // namespace orbita
