#include "repen/penalties.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "repen/errors.hpp"

namespace repen {
namespace {

void require_defined(const FittedHistogram& f, const char* who) {
    if (f.has_empty_cell()) throw undefined_model_error(std::string(who) + ": model has an empty cell");
}

void require_nonneg_constant(double C, const char* who) {
    if (C < 0.0) throw std::invalid_argument(std::string(who) + ": penalty constant must be >= 0");
}

std::vector<int> cell_ids(const Partition& p, const DataSet& data) {
    std::vector<int> ids(data.size());
    for (int i = 0; i < data.size(); ++i) ids[i] = p.cell_index(data.x[i]);
    return ids;
}

// Per-(cell, block) counts, sums and raw sums of squares in one pass.
struct CellBlockStats {
    int d = 0, V = 0;
    std::vector<int> count;
    std::vector<double> sum;
    std::vector<double> sumsq;

    int idx(int cell, int block) const { return cell * V + block; }
};

CellBlockStats accumulate(const std::vector<int>& ids, const DataSet& data, const FoldBlocks& blocks,
                          int d) {
    CellBlockStats s;
    s.d = d;
    s.V = blocks.V;
    s.count.assign(static_cast<std::size_t>(d) * blocks.V, 0);
    s.sum.assign(s.count.size(), 0.0);
    s.sumsq.assign(s.count.size(), 0.0);
    for (int i = 0; i < data.size(); ++i) {
        const int at = s.idx(ids[i], blocks.block_of[i]);
        ++s.count[at];
        s.sum[at] += data.y[i];
        s.sumsq[at] += data.y[i] * data.y[i];
    }
    return s;
}

}  // namespace

PenaltyEstimate resampling_penalty_closed(const FittedHistogram& f, const WeightScheme& scheme,
                                          double C) {
    require_defined(f, "resampling_penalty_closed");
    require_nonneg_constant(C, "resampling_penalty_closed");
    if (!scheme.exchangeable())
        throw unsupported_scheme_error("resampling_penalty_closed: VFold has no exchangeable closed form");
    double acc = 0.0;
    for (int c = 0; c < f.dimension(); ++c) {
        const int k = f.counts[c];
        if (k <= 1) continue;  // empty sum of squared deviations
        acc += penalty_factor(scheme, f.n, k) * f.sumsq[c] / (k - 1);
    }
    return {C * acc / f.n, PenaltyMethod::ClosedForm, C, 0, 0.0};
}

PenaltyEstimate resampling_penalty_closed(const FittedHistogram& f, const MomentTable& table,
                                          double C) {
    require_defined(f, "resampling_penalty_closed");
    require_nonneg_constant(C, "resampling_penalty_closed");
    if (table.n() != f.n) throw std::invalid_argument("resampling_penalty_closed: table built for another n");
    double acc = 0.0;
    for (int c = 0; c < f.dimension(); ++c) {
        const int k = f.counts[c];
        if (k <= 1) continue;
        acc += table.factor(k) * f.sumsq[c] / (k - 1);
    }
    return {C * acc / f.n, PenaltyMethod::ClosedForm, C, 0, 0.0};
}

PenaltyEstimate resampling_penalty_mc(const FittedHistogram& f, const DataSet& data,
                                      const WeightScheme& scheme, double C, int draws,
                                      RngStream& rng) {
    require_defined(f, "resampling_penalty_mc");
    require_nonneg_constant(C, "resampling_penalty_mc");
    if (draws < 1) throw std::invalid_argument("resampling_penalty_mc: draws must be >= 1");
    const int n = f.n;
    const int d = f.dimension();
    const auto ids = cell_ids(*f.partition, data);

    // Per-cell summands are stored per draw so the reported standard error
    // honors the per-cell exclusion reweighting; beyond the memory cap the
    // streaming path keeps only per-draw totals (the value stays exact, the
    // standard error ignores the rare-exclusion correction).
    const bool streaming = static_cast<double>(draws) * d > 2e7;
    std::vector<double> summand;
    if (!streaming) summand.assign(static_cast<std::size_t>(draws) * d, 0.0);
    std::vector<double> cell_acc(d, 0.0);
    std::vector<double> totals(draws, 0.0);
    std::vector<long> kept(d, 0);
    std::vector<double> wsum(d), wysum(d);
    for (int b = 0; b < draws; ++b) {
        const WeightVector wv = draw_weights(scheme, n, rng);
        std::fill(wsum.begin(), wsum.end(), 0.0);
        std::fill(wysum.begin(), wysum.end(), 0.0);
        for (int i = 0; i < n; ++i) {
            wsum[ids[i]] += wv.w[i];
            wysum[ids[i]] += wv.w[i] * data.y[i];
        }
        for (int c = 0; c < d; ++c) {
            double v = std::numeric_limits<double>::quiet_NaN();
            if (wsum[c] > 0.0) {
                const double wbar = wsum[c] / f.counts[c];
                const double beta_w = wysum[c] / wsum[c];
                const double dlt = beta_w - f.means[c];
                const double phat = static_cast<double>(f.counts[c]) / n;
                v = (phat + phat * wbar) * dlt * dlt;
                ++kept[c];
                cell_acc[c] += v;
                totals[b] += v;
            }
            if (!streaming) summand[static_cast<std::size_t>(b) * d + c] = v;
        }
    }
    for (int c = 0; c < d; ++c)
        if (kept[c] == 0)
            throw degenerate_conditioning_error("resampling_penalty_mc: a cell was emptied by every draw");

    double value = 0.0;
    for (int c = 0; c < d; ++c) value += cell_acc[c] / kept[c];

    if (!streaming) {
        // Recompute per-draw totals with cells reweighted by draws/kept so the
        // totals average to the estimate itself.
        for (int b = 0; b < draws; ++b) {
            double t = 0.0;
            for (int c = 0; c < d; ++c) {
                const double v = summand[static_cast<std::size_t>(b) * d + c];
                if (!std::isnan(v)) t += v * (static_cast<double>(draws) / kept[c]);
            }
            totals[b] = t;
        }
    }
    double mean_t = 0.0;
    for (double t : totals) mean_t += t;
    mean_t /= draws;
    double var = 0.0;
    for (double t : totals) var += (t - mean_t) * (t - mean_t);
    var /= draws;

    PenaltyEstimate out;
    out.value = C * value;
    out.method = PenaltyMethod::MonteCarlo;
    out.constant = C;
    out.mc_draws = draws;
    out.se = C * std::sqrt(var / draws);
    return out;
}

FoldBlocks make_blocks(int n, int V, RngStream& rng) {
    if (V < 2 || V > n) throw std::invalid_argument("make_blocks: need 2 <= V <= n");
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    rng.shuffle(idx.begin(), idx.end());
    FoldBlocks out;
    out.V = V;
    out.block_of.assign(n, 0);
    const int base = n / V, rem = n % V;
    int pos = 0;
    for (int j = 0; j < V; ++j) {
        const int len = base + (j < rem ? 1 : 0);
        for (int t = 0; t < len; ++t, ++pos) out.block_of[idx[pos]] = j;
    }
    return out;
}

FoldBlocks contiguous_blocks(int n, int V) {
    if (V < 2 || V > n) throw std::invalid_argument("contiguous_blocks: need 2 <= V <= n");
    FoldBlocks out;
    out.V = V;
    out.block_of.assign(n, 0);
    const int base = n / V, rem = n % V;
    int pos = 0;
    for (int j = 0; j < V; ++j) {
        const int len = base + (j < rem ? 1 : 0);
        for (int t = 0; t < len; ++t, ++pos) out.block_of[pos] = j;
    }
    return out;
}

PenaltyEstimate vfold_penalty(const FittedHistogram& f, const DataSet& data,
                              const FoldBlocks& blocks, double C) {
    require_defined(f, "vfold_penalty");
    require_nonneg_constant(C, "vfold_penalty");
    if (static_cast<int>(blocks.block_of.size()) != f.n)
        throw std::invalid_argument("vfold_penalty: blocks built for another n");
    const int V = blocks.V;
    const int d = f.dimension();
    const auto ids = cell_ids(*f.partition, data);
    const auto stats = accumulate(ids, data, blocks, d);
    const double keep = static_cast<double>(V) / (V - 1);

    double acc = 0.0;
    for (int c = 0; c < d; ++c) {
        const int k = f.counts[c];
        const double phat = static_cast<double>(k) / f.n;
        double cell_sum = 0.0;
        int folds = 0;
        for (int j = 0; j < V; ++j) {
            const int kj = stats.count[stats.idx(c, j)];
            if (kj == k) continue;  // fold empties the cell
            const int surv = k - kj;
            const double mean_surv = (f.means[c] * k - stats.sum[stats.idx(c, j)]) / surv;
            const double wbar = keep * surv / k;
            const double dlt = mean_surv - f.means[c];
            cell_sum += (phat + phat * wbar) * dlt * dlt;
            ++folds;
        }
        if (folds == 0)
            throw degenerate_conditioning_error("vfold_penalty: a cell is emptied by every fold");
        acc += cell_sum / folds;
    }
    return {C * acc, PenaltyMethod::ExactVFold, C, 0, 0.0};
}

double ideal_penalty(const FittedHistogram& f, const TruthCellStats& truth) {
    require_defined(f, "ideal_penalty");
    if (static_cast<int>(truth.p.size()) != f.dimension())
        throw std::invalid_argument("ideal_penalty: truth/fit dimension mismatch");
    double acc = 0.0;
    for (int c = 0; c < f.dimension(); ++c) {
        const double phat = static_cast<double>(f.counts[c]) / f.n;
        const double dlt = f.means[c] - truth.beta[c];
        acc += (truth.p[c] + phat) * dlt * dlt;
    }
    return acc;
}

double mallows_penalty(const FittedHistogram& f, double sigma2_hat, int n) {
    if (sigma2_hat < 0.0) throw std::invalid_argument("mallows_penalty: sigma2_hat must be >= 0");
    return 2.0 * sigma2_hat * f.dimension() / n;
}

double estimate_sigma2(const DataSet& data, const std::vector<FittedHistogram>& family) {
    if (family.empty()) throw std::invalid_argument("estimate_sigma2: empty family");
    const int n = data.size();
    const FittedHistogram* best = nullptr;
    for (const auto& f : family) {
        if (f.min_count < 2) continue;
        if (f.dimension() >= n) continue;
        if (best == nullptr || f.dimension() > best->dimension()) best = &f;
    }
    if (best == nullptr)
        throw undefined_model_error("estimate_sigma2: no model with all cell counts >= 2");
    return static_cast<double>(n) * empirical_risk(*best) / (n - best->dimension());
}

double vfcv_criterion(const Partition& partition, const DataSet& data, const FoldBlocks& blocks) {
    const int V = blocks.V;
    const int n = data.size();
    if (static_cast<int>(blocks.block_of.size()) != n)
        throw std::invalid_argument("vfcv_criterion: blocks built for another n");
    const int d = partition.dimension();
    const auto ids = cell_ids(partition, data);
    const auto stats = accumulate(ids, data, blocks, d);

    std::vector<int> cell_total(d, 0);
    std::vector<double> cell_sum(d, 0.0);
    std::vector<int> block_size(V, 0);
    for (int c = 0; c < d; ++c)
        for (int j = 0; j < V; ++j) {
            cell_total[c] += stats.count[stats.idx(c, j)];
            cell_sum[c] += stats.sum[stats.idx(c, j)];
        }
    for (int i = 0; i < n; ++i) ++block_size[blocks.block_of[i]];

    double crit = 0.0;
    for (int j = 0; j < V; ++j) {
        double sse = 0.0;
        for (int c = 0; c < d; ++c) {
            const int train = cell_total[c] - stats.count[stats.idx(c, j)];
            if (train == 0) return std::numeric_limits<double>::infinity();
            const double mean_train = (cell_sum[c] - stats.sum[stats.idx(c, j)]) / train;
            const int at = stats.idx(c, j);
            sse += stats.sumsq[at] - 2.0 * mean_train * stats.sum[at] +
                   static_cast<double>(stats.count[at]) * mean_train * mean_train;
        }
        crit += sse / block_size[j];
    }
    return crit / V;
}

}  // namespace repen
