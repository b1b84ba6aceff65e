#pragma once

#include <functional>
#include <vector>

namespace repen {

/// Gauss-Legendre rule on [-1,1]; nodes computed by Newton iteration on the
/// Legendre recurrence, accurate to machine precision for any order.
struct GaussLegendre {
    std::vector<double> nodes;
    std::vector<double> weights;
    explicit GaussLegendre(int order);
};

/// Integral of f over [a,b] with one application of the rule.
template <class F>
double integrate(const GaussLegendre& rule, double a, double b, F&& f) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
        acc += rule.weights[i] * f(mid + half * rule.nodes[i]);
    return acc * half;
}

/// Integral over [a,b] split at the interior points of `cuts` (sorted);
/// used to keep integrands piecewise smooth across registered jumps.
double integrate_split(const GaussLegendre& rule, double a, double b,
                       const std::vector<double>& cuts, const std::function<double(double)>& f);

}  // namespace repen
