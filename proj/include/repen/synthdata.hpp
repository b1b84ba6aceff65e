#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace repen {

enum class RegressionKind { SinPi, HeaviSine, Constant };

/// True regression function s on [0,1].
struct RegressionFunction {
    RegressionKind kind = RegressionKind::SinPi;
    double level = 0.0;  // Constant only

    static RegressionFunction sin_pi() { return {RegressionKind::SinPi, 0.0}; }
    static RegressionFunction heavisine() { return {RegressionKind::HeaviSine, 0.0}; }
    static RegressionFunction constant(double c) { return {RegressionKind::Constant, c}; }

    /// Jump abscissas, exposed so integration can split cells there.
    std::vector<double> discontinuities() const;
    std::string name() const;
};

enum class NoiseKind { ConstantSigma, LinearSigma };

/// Noise level sigma(x) >= 0 on [0,1].
struct NoiseProfile {
    NoiseKind kind = NoiseKind::ConstantSigma;
    double level = 1.0;  // ConstantSigma only

    static NoiseProfile constant_sigma(double s) { return {NoiseKind::ConstantSigma, s}; }
    static NoiseProfile linear_sigma() { return {NoiseKind::LinearSigma, 0.0}; }
    std::string name() const;
};

/// A synthetic regression problem: Y = s(X) + sigma(X) eps, X uniform on [0,1].
struct RegressionSpec {
    RegressionFunction regression;
    NoiseProfile noise;
    int n = 0;
};

struct DataSet {
    std::vector<double> x;
    std::vector<double> y;
    int size() const { return static_cast<int>(x.size()); }
};

double eval_regression(const RegressionFunction& f, double x);
double eval_noise(const NoiseProfile& p, double x);

/// n i.i.d. pairs, fully determined by (spec, seed); X_i ~ U[0,1],
/// eps_i ~ N(0,1) independent of X.
DataSet generate(const RegressionSpec& spec, std::uint64_t seed);

}  // namespace repen
