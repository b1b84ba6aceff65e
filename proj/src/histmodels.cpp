#include "repen/histmodels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "repen/errors.hpp"

namespace repen {
namespace {

void validate_breakpoints(const std::vector<double>& bp) {
    if (bp.size() < 2 || bp.front() != 0.0 || bp.back() != 1.0)
        throw std::invalid_argument("partition breakpoints must run from 0 to 1");
    for (std::size_t i = 1; i < bp.size(); ++i)
        if (!(bp[i] > bp[i - 1])) throw std::invalid_argument("breakpoints must be strictly increasing");
}

}  // namespace

int Partition::cell_index(double x) const {
    if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("cell_index: x outside [0,1]");
    const auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), x);
    int idx = static_cast<int>(it - breakpoints.begin()) - 1;
    if (idx == dimension()) --idx;  // x == 1 belongs to the last (closed) cell
    return idx;
}

FittedHistogram fit(const Partition& partition, const DataSet& data) {
    validate_breakpoints(partition.breakpoints);
    if (data.x.size() != data.y.size()) throw std::invalid_argument("fit: x/y length mismatch");
    const int d = partition.dimension();
    FittedHistogram out;
    out.partition = &partition;
    out.n = data.size();
    out.counts.assign(d, 0);
    out.means.assign(d, std::numeric_limits<double>::quiet_NaN());
    out.sumsq.assign(d, 0.0);
    // One pass, Welford per cell.
    for (int i = 0; i < out.n; ++i) {
        const int c = partition.cell_index(data.x[i]);
        if (out.counts[c] == 0) out.means[c] = 0.0;
        ++out.counts[c];
        const double delta = data.y[i] - out.means[c];
        out.means[c] += delta / out.counts[c];
        out.sumsq[c] += delta * (data.y[i] - out.means[c]);
    }
    for (int c = 0; c < d; ++c)
        if (out.counts[c] == 0) out.means[c] = std::numeric_limits<double>::quiet_NaN();
    out.min_count = d == 0 ? 0 : *std::min_element(out.counts.begin(), out.counts.end());
    return out;
}

double empirical_risk(const FittedHistogram& f) {
    if (f.has_empty_cell()) throw undefined_model_error("empirical_risk: model has an empty cell");
    double acc = 0.0;
    for (double s : f.sumsq) acc += s;
    return acc / f.n;
}

double TruthCellStats::total_bias() const {
    double acc = 0.0;
    for (double b : bias) acc += b;
    return acc;
}

double TruthCellStats::risk_of_projection() const {
    double acc = total_bias();
    for (std::size_t i = 0; i < p.size(); ++i) acc += p[i] * sigma2[i];
    return acc;
}

TruthCellStats truth_stats(const Partition& partition, const RegressionSpec& spec,
                           int quadrature_nodes) {
    validate_breakpoints(partition.breakpoints);
    const GaussLegendre rule(quadrature_nodes);
    const auto cuts = spec.regression.discontinuities();
    const int d = partition.dimension();
    TruthCellStats out;
    out.p.resize(d);
    out.beta.resize(d);
    out.bias.resize(d);
    out.sigma2.resize(d);
    const auto s = [&](double x) { return eval_regression(spec.regression, x); };
    for (int c = 0; c < d; ++c) {
        const double a = partition.breakpoints[c];
        const double b = partition.breakpoints[c + 1];
        const double p = b - a;
        const double int_s = integrate_split(rule, a, b, cuts, s);
        const double beta = int_s / p;
        // Second pass so bias is free of the cancellation in int(s^2) - p beta^2.
        const double bias = integrate_split(rule, a, b, cuts, [&](double x) {
            const double dlt = s(x) - beta;
            return dlt * dlt;
        });
        const double int_sig2 = integrate_split(rule, a, b, cuts, [&](double x) {
            const double sg = eval_noise(spec.noise, x);
            return sg * sg;
        });
        out.p[c] = p;
        out.beta[c] = beta;
        out.bias[c] = bias;
        out.sigma2[c] = int_sig2 / p;
    }
    return out;
}

double excess_loss(const FittedHistogram& f, const TruthCellStats& truth) {
    const int d = f.dimension();
    if (static_cast<int>(truth.p.size()) != d)
        throw std::invalid_argument("excess_loss: truth/fit dimension mismatch");
    if (f.has_empty_cell()) return std::numeric_limits<double>::infinity();
    double acc = 0.0;
    for (int c = 0; c < d; ++c) {
        const double dlt = f.means[c] - truth.beta[c];
        acc += truth.bias[c] + truth.p[c] * dlt * dlt;
    }
    return acc;
}

// ---------------------------------------------------------------------------
// Families
// ---------------------------------------------------------------------------

ModelFamilySpec ModelFamilySpec::regular(int d_min, int d_max) {
    ModelFamilySpec s;
    s.kind = Kind::Regular;
    s.d_min = d_min;
    s.d_max = d_max;
    return s;
}

ModelFamilySpec ModelFamilySpec::regular_auto(int n) {
    return regular(1, std::max(1, static_cast<int>(std::floor(n / std::log(static_cast<double>(n))))));
}

ModelFamilySpec ModelFamilySpec::two_bin_sizes(int d1_max, int d2_max, bool plus_constant) {
    ModelFamilySpec s;
    s.kind = Kind::TwoBinSizes;
    s.d1_max = d1_max;
    s.d2_max = d2_max;
    s.plus_constant = plus_constant;
    return s;
}

ModelFamilySpec ModelFamilySpec::two_bin_auto(int n) {
    const int cap = std::max(1, static_cast<int>(std::floor(n / (2.0 * std::log(static_cast<double>(n))))));
    return two_bin_sizes(cap, cap, true);
}

ModelFamilySpec ModelFamilySpec::dyadic_regular(int k_max) {
    ModelFamilySpec s;
    s.kind = Kind::DyadicRegular;
    s.k_max = k_max;
    return s;
}

ModelFamilySpec ModelFamilySpec::dyadic_regular_auto(int n) {
    const int k = static_cast<int>(std::floor(std::log2(static_cast<double>(n)) - 1.0 + 1e-9));
    return dyadic_regular(std::max(0, k));
}

ModelFamilySpec ModelFamilySpec::dyadic_two_bin(int k_max, bool plus_constant) {
    ModelFamilySpec s;
    s.kind = Kind::DyadicTwoBin;
    s.k_max = k_max;
    s.plus_constant = plus_constant;
    return s;
}

ModelFamilySpec ModelFamilySpec::dyadic_two_bin_auto(int n) {
    const int k = static_cast<int>(std::floor(std::log2(static_cast<double>(n)) - 1.0 + 1e-9));
    return dyadic_two_bin(std::max(0, k), true);
}

namespace {

Partition make_regular(int cells, int id, const std::string& label) {
    Partition p;
    p.model_id = id;
    p.label = label;
    p.breakpoints.resize(cells + 1);
    for (int j = 0; j <= cells; ++j) p.breakpoints[j] = static_cast<double>(j) / cells;
    p.breakpoints.front() = 0.0;
    p.breakpoints.back() = 1.0;
    return p;
}

// Two independently regular halves [0,1/2) and [1/2,1].
Partition make_two_half(int d1, int d2, int id, const std::string& label) {
    Partition p;
    p.model_id = id;
    p.label = label;
    p.breakpoints.reserve(d1 + d2 + 1);
    for (int j = 0; j < d1; ++j) p.breakpoints.push_back(0.5 * j / d1);
    for (int j = 0; j < d2; ++j) p.breakpoints.push_back(0.5 + 0.5 * j / d2);
    p.breakpoints.push_back(1.0);
    return p;
}

// Cells of width 2^-k tiling a half interval; one truncated cell when 2^-k > 1/2.
int half_cells_for_bin_exponent(int k) { return std::max(1, 1 << std::max(0, k - 1)); }

}  // namespace

std::vector<Partition> build_family(const ModelFamilySpec& spec, int n) {
    if (n < 2) throw std::invalid_argument("build_family: n must be >= 2");
    std::vector<Partition> out;
    int id = 0;
    switch (spec.kind) {
        case ModelFamilySpec::Kind::Regular: {
            if (spec.d_min < 1 || spec.d_max < spec.d_min)
                throw std::invalid_argument("build_family: bad regular bounds");
            for (int d = spec.d_min; d <= spec.d_max; ++d)
                out.push_back(make_regular(d, id++, "D=" + std::to_string(d)));
            break;
        }
        case ModelFamilySpec::Kind::TwoBinSizes: {
            if (spec.d1_max < 1 || spec.d2_max < 1)
                throw std::invalid_argument("build_family: bad two-bin bounds");
            for (int d1 = 1; d1 <= spec.d1_max; ++d1)
                for (int d2 = 1; d2 <= spec.d2_max; ++d2)
                    out.push_back(make_two_half(d1, d2, id++,
                                                "D1=" + std::to_string(d1) + "|D2=" + std::to_string(d2)));
            if (spec.plus_constant) out.push_back(make_regular(1, id++, "const"));
            break;
        }
        case ModelFamilySpec::Kind::DyadicRegular: {
            if (spec.k_max < 0) throw std::invalid_argument("build_family: bad dyadic bound");
            for (int k = 0; k <= spec.k_max; ++k)
                out.push_back(make_regular(1 << k, id++, "D=2^" + std::to_string(k)));
            break;
        }
        case ModelFamilySpec::Kind::DyadicTwoBin: {
            if (spec.k_max < 0) throw std::invalid_argument("build_family: bad dyadic bound");
            for (int k1 = 0; k1 <= spec.k_max; ++k1)
                for (int k2 = 0; k2 <= spec.k_max; ++k2)
                    out.push_back(make_two_half(half_cells_for_bin_exponent(k1),
                                                half_cells_for_bin_exponent(k2), id++,
                                                "h1=2^-" + std::to_string(k1) + "|h2=2^-" + std::to_string(k2)));
            if (spec.plus_constant) out.push_back(make_regular(1, id++, "const"));
            break;
        }
    }
    return out;
}

}  // namespace repen
