#pragma once

#include <string>
#include <vector>

#include "repen/quadrature.hpp"
#include "repen/synthdata.hpp"

namespace repen {

/// Histogram model: cells [b_j, b_{j+1}) over [0,1], last cell closed.
struct Partition {
    std::vector<double> breakpoints;  // strictly increasing, front 0, back 1
    int model_id = 0;
    std::string label;

    int dimension() const { return static_cast<int>(breakpoints.size()) - 1; }

    /// Cell containing x in [0,1]; half-open cells make breakpoint ties deterministic.
    int cell_index(double x) const;
};

/// Per-cell least-squares fit of a partition to data. Empty cells are data,
/// not errors: their means carry a NaN marker and min_count drops to 0.
struct FittedHistogram {
    const Partition* partition = nullptr;
    std::vector<int> counts;      // n_lambda
    std::vector<double> means;    // NaN where empty
    std::vector<double> sumsq;    // centered within-cell sum of squares
    int n = 0;
    int min_count = 0;

    int dimension() const { return static_cast<int>(counts.size()); }
    bool has_empty_cell() const { return min_count == 0; }
};

FittedHistogram fit(const Partition& partition, const DataSet& data);

/// (1/n) sum of within-cell squared residuals; throws undefined_model_error on empty cells.
double empirical_risk(const FittedHistogram& f);

/// Exact per-cell population quantities for a known regression spec:
/// p = cell probability, beta = conditional mean of s, bias = integral of
/// (s - beta)^2, sigma2 = conditional mean of sigma^2.
struct TruthCellStats {
    std::vector<double> p;
    std::vector<double> beta;
    std::vector<double> bias;
    std::vector<double> sigma2;

    double total_bias() const;
    /// P gamma(s_m) = E[sigma^2(X)] + total approximation error.
    double risk_of_projection() const;
};

TruthCellStats truth_stats(const Partition& partition, const RegressionSpec& spec,
                           int quadrature_nodes = 32);

/// Exact excess loss of the fitted histogram against the truth; +infinity when
/// some cell is empty (the estimator is then not uniquely defined).
double excess_loss(const FittedHistogram& f, const TruthCellStats& truth);

/// Finite model families from the benchmark experiments.
struct ModelFamilySpec {
    enum class Kind { Regular, TwoBinSizes, DyadicRegular, DyadicTwoBin };
    Kind kind = Kind::Regular;
    int d_min = 1, d_max = 1;          // Regular
    int d1_max = 1, d2_max = 1;        // TwoBinSizes
    int k_max = 0;                     // dyadic families
    bool plus_constant = false;        // TwoBinSizes / DyadicTwoBin

    static ModelFamilySpec regular(int d_min, int d_max);
    /// D = 1 .. floor(n / ln n).
    static ModelFamilySpec regular_auto(int n);
    static ModelFamilySpec two_bin_sizes(int d1_max, int d2_max, bool plus_constant);
    /// D1, D2 = 1 .. floor(n / (2 ln n)), plus the constant model.
    static ModelFamilySpec two_bin_auto(int n);
    static ModelFamilySpec dyadic_regular(int k_max);
    /// D = 2^k, 0 <= k <= log2(n) - 1.
    static ModelFamilySpec dyadic_regular_auto(int n);
    static ModelFamilySpec dyadic_two_bin(int k_max, bool plus_constant);
    static ModelFamilySpec dyadic_two_bin_auto(int n);
};

std::vector<Partition> build_family(const ModelFamilySpec& spec, int n);

}  // namespace repen
