#include "repen/synthdata.hpp"

#include <cmath>
#include <stdexcept>

#include "repen/rng.hpp"

namespace repen {
namespace {

constexpr double kPi = 3.14159265358979323846;

double sgn(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

void check_unit_interval(double x, const char* who) {
    if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error(std::string(who) + ": x outside [0,1]");
}

}  // namespace

std::vector<double> RegressionFunction::discontinuities() const {
    if (kind == RegressionKind::HeaviSine) return {0.3, 0.72};
    return {};
}

std::string RegressionFunction::name() const {
    switch (kind) {
        case RegressionKind::SinPi: return "sin(pi x)";
        case RegressionKind::HeaviSine: return "HeaviSine";
        case RegressionKind::Constant: return "const(" + std::to_string(level) + ")";
    }
    return "?";
}

std::string NoiseProfile::name() const {
    if (kind == NoiseKind::LinearSigma) return "x";
    return std::to_string(level);
}

double eval_regression(const RegressionFunction& f, double x) {
    check_unit_interval(x, "eval_regression");
    switch (f.kind) {
        case RegressionKind::SinPi:
            return std::sin(kPi * x);
        case RegressionKind::HeaviSine:
            // Donoho-Johnstone HeaviSine, with sgn(0) = 0.
            return 4.0 * std::sin(4.0 * kPi * x) - sgn(x - 0.3) - sgn(0.72 - x);
        case RegressionKind::Constant:
            return f.level;
    }
    return 0.0;
}

double eval_noise(const NoiseProfile& p, double x) {
    check_unit_interval(x, "eval_noise");
    if (p.kind == NoiseKind::LinearSigma) return x;
    if (p.level < 0.0) throw std::domain_error("eval_noise: negative sigma level");
    return p.level;
}

DataSet generate(const RegressionSpec& spec, std::uint64_t seed) {
    if (spec.n < 2) throw std::invalid_argument("generate: n must be >= 2");
    RngStream rng(seed);
    DataSet out;
    out.x.resize(spec.n);
    out.y.resize(spec.n);
    for (int i = 0; i < spec.n; ++i) {
        const double xi = rng.uniform01();
        out.x[i] = xi;
        out.y[i] = eval_regression(spec.regression, xi) + eval_noise(spec.noise, xi) * rng.gaussian();
    }
    return out;
}

}  // namespace repen
