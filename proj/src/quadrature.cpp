#include "repen/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace repen {

GaussLegendre::GaussLegendre(int order) {
    if (order < 1) throw std::invalid_argument("quadrature order must be >= 1");
    nodes.resize(order);
    weights.resize(order);
    const int half = (order + 1) / 2;
    const double pi = 3.14159265358979323846;
    for (int i = 0; i < half; ++i) {
        double x = std::cos(pi * (i + 0.75) / (order + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            // Legendre P_n(x) and derivative by three-term recurrence.
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= order; ++k) {
                const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = order * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        nodes[i] = -x;
        nodes[order - 1 - i] = x;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[order - 1 - i] = w;
    }
}

double integrate_split(const GaussLegendre& rule, double a, double b,
                       const std::vector<double>& cuts, const std::function<double(double)>& f) {
    double acc = 0.0;
    double lo = a;
    for (double c : cuts) {
        if (c <= lo || c >= b) continue;
        acc += integrate(rule, lo, c, f);
        lo = c;
    }
    acc += integrate(rule, lo, b, f);
    return acc;
}

}  // namespace repen
