#include "repen/resampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "repen/errors.hpp"

namespace repen {
namespace {

constexpr int kEnumerationCap = 10000;  // max weight-sum support states enumerated
constexpr int kMonteCarloDraws = 100000;

double log_choose(int n, int k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

// Per-state integrands of the conditional moments, as functions of the
// within-cell weight sum state. For 0/2-valued weights (Rademacher, hold-out)
// the state is the count m of nonzero weights among the k cell indices:
//   r1 state value: (k - m) / m
//   r2 state value: scale * (1 - m / k)
// For Efron the state is the multinomial cell total t:
//   r1 state value: (k - 1) / t,  r2 state value: (n/q)(1 - 1/k) (constant).

struct CondMoments {
    double r1 = 0.0;
    double r2 = 0.0;
};

CondMoments reduce_binary_states(const std::vector<double>& logw, const std::vector<int>& states,
                                 int k, double r2_scale) {
    double norm = 0.0, r1 = 0.0, r2 = 0.0;
    double shift = -std::numeric_limits<double>::infinity();
    for (double lw : logw) shift = std::max(shift, lw);
    for (std::size_t i = 0; i < logw.size(); ++i) {
        const int m = states[i];
        const double w = std::exp(logw[i] - shift);
        norm += w;
        r1 += w * (static_cast<double>(k - m) / m);
        r2 += w * r2_scale * (1.0 - static_cast<double>(m) / k);
    }
    return {r1 / norm, r2 / norm};
}

CondMoments rademacher_moments(int /*n*/, int k) {
    std::vector<double> logw;
    std::vector<int> states;
    logw.reserve(k);
    states.reserve(k);
    const double log_half = -std::log(2.0);
    for (int m = 1; m <= k; ++m) {
        logw.push_back(log_choose(k, m) + k * log_half);
        states.push_back(m);
    }
    return reduce_binary_states(logw, states, k, 2.0);
}

CondMoments holdout_moments(int n, int q, int k) {
    const int lo = std::max(1, q + k - n);
    const int hi = std::min(q, k);
    std::vector<double> logw;
    std::vector<int> states;
    for (int m = lo; m <= hi; ++m) {
        logw.push_back(log_choose(q, m) + log_choose(n - q, k - m) - log_choose(n, k));
        states.push_back(m);
    }
    return reduce_binary_states(logw, states, k, static_cast<double>(n) / q);
}

CondMoments efron_moments(int n, int q, int k) {
    const double r2 = (static_cast<double>(n) / q) * (1.0 - 1.0 / k);
    if (k == n) return {(k - 1.0) / q, r2};  // cell total is deterministically q
    const double logp = std::log(static_cast<double>(k) / n);
    const double logq = std::log1p(-static_cast<double>(k) / n);
    double norm = 0.0, inv = 0.0;
    double shift = -std::numeric_limits<double>::infinity();
    std::vector<double> logw(q);
    for (int t = 1; t <= q; ++t) {
        logw[t - 1] = log_choose(q, t) + t * logp + (q - t) * logq;
        shift = std::max(shift, logw[t - 1]);
    }
    for (int t = 1; t <= q; ++t) {
        const double w = std::exp(logw[t - 1] - shift);
        norm += w;
        inv += w / t;
    }
    return {(k - 1.0) * inv / norm, r2};
}

int support_size(const WeightScheme& s, int n, int k) {
    switch (s.kind) {
        case WeightScheme::Kind::Rademacher:
            return k + 1;
        case WeightScheme::Kind::Efron:
            return s.q + 1;
        case WeightScheme::Kind::RandomHoldOut:
        case WeightScheme::Kind::LeaveOneOut: {
            const int q = s.holdout_q(n);
            return std::min(q, k) - std::max(0, q + k - n) + 1;
        }
        case WeightScheme::Kind::VFold:
            return 2;
    }
    return 0;
}

int sample_bernoulli_sum(RngStream& rng, int t, double p) {
    int acc = 0;
    for (int i = 0; i < t; ++i) acc += rng.uniform01() < p ? 1 : 0;
    return acc;
}

int sample_hypergeometric(RngStream& rng, int n, int q, int k) {
    // k draws without replacement from n items of which q are marked.
    int marked = q, total = n, hits = 0;
    for (int i = 0; i < k; ++i) {
        if (rng.uniform01() < static_cast<double>(marked) / total) {
            ++hits;
            --marked;
        }
        --total;
    }
    return hits;
}

struct MonteCarloMoments {
    CondMoments moments;
    double se_r1 = 0.0;
    double se_factor = 0.0;
    double factor = 0.0;
};

MonteCarloMoments monte_carlo_moments(const WeightScheme& s, int n, int k, int draws) {
    RngStream rng(derive_seed(0x5EED0FACULL, {static_cast<std::uint64_t>(s.kind),
                                              static_cast<std::uint64_t>(s.q),
                                              static_cast<std::uint64_t>(s.V),
                                              static_cast<std::uint64_t>(n),
                                              static_cast<std::uint64_t>(k)}));
    double sum_r1 = 0.0, sumsq_r1 = 0.0, sum_r2 = 0.0, sum_f = 0.0, sumsq_f = 0.0;
    long kept = 0;
    for (int b = 0; b < draws; ++b) {
        double v1 = 0.0, v2 = 0.0;
        switch (s.kind) {
            case WeightScheme::Kind::Rademacher: {
                const int m = sample_bernoulli_sum(rng, k, 0.5);
                if (m == 0) continue;
                v1 = static_cast<double>(k - m) / m;
                v2 = 2.0 * (1.0 - static_cast<double>(m) / k);
                break;
            }
            case WeightScheme::Kind::RandomHoldOut:
            case WeightScheme::Kind::LeaveOneOut: {
                const int q = s.holdout_q(n);
                const int m = sample_hypergeometric(rng, n, q, k);
                if (m == 0) continue;
                v1 = static_cast<double>(k - m) / m;
                v2 = (static_cast<double>(n) / q) * (1.0 - static_cast<double>(m) / k);
                break;
            }
            case WeightScheme::Kind::Efron: {
                const int t = sample_bernoulli_sum(rng, s.q, static_cast<double>(k) / n);
                if (t == 0) continue;
                v1 = static_cast<double>(k - 1) / t;
                v2 = (static_cast<double>(n) / s.q) * (1.0 - 1.0 / k);
                break;
            }
            case WeightScheme::Kind::VFold:
                throw unsupported_scheme_error("monte_carlo_moments: VFold");
        }
        ++kept;
        sum_r1 += v1;
        sumsq_r1 += v1 * v1;
        sum_r2 += v2;
        const double f = v1 + v2;
        sum_f += f;
        sumsq_f += f * f;
    }
    if (kept == 0) throw degenerate_conditioning_error("monte_carlo_moments: no draw kept the cell");
    MonteCarloMoments out;
    out.moments.r1 = sum_r1 / kept;
    out.moments.r2 = sum_r2 / kept;
    out.factor = sum_f / kept;
    const double var_r1 = std::max(0.0, sumsq_r1 / kept - out.moments.r1 * out.moments.r1);
    const double var_f = std::max(0.0, sumsq_f / kept - out.factor * out.factor);
    out.se_r1 = std::sqrt(var_r1 / kept);
    out.se_factor = std::sqrt(var_f / kept);
    return out;
}

CondMoments exact_moments(const WeightScheme& s, int n, int k) {
    switch (s.kind) {
        case WeightScheme::Kind::Rademacher:
            return rademacher_moments(n, k);
        case WeightScheme::Kind::RandomHoldOut:
        case WeightScheme::Kind::LeaveOneOut:
            return holdout_moments(n, s.holdout_q(n), k);
        case WeightScheme::Kind::Efron:
            return efron_moments(n, s.q, k);
        case WeightScheme::Kind::VFold:
            return {0.0, 0.0};
    }
    return {};
}

double quoted_r2(const WeightScheme& s, int n, int k) {
    switch (s.kind) {
        case WeightScheme::Kind::Efron:
            return (static_cast<double>(n) / s.q) * (1.0 - 1.0 / k);
        case WeightScheme::Kind::Rademacher:
            return 1.0;
        case WeightScheme::Kind::RandomHoldOut:
            return static_cast<double>(n) / s.q - 1.0;
        case WeightScheme::Kind::LeaveOneOut:
            return 1.0 / (n - 1.0);
        case WeightScheme::Kind::VFold:
            return 0.0;
    }
    return 0.0;
}

}  // namespace

std::string WeightScheme::name() const {
    switch (kind) {
        case Kind::Efron: return "Efron(" + std::to_string(q) + ")";
        case Kind::Rademacher: return "Rademacher";
        case Kind::RandomHoldOut: return "RandomHoldOut(" + std::to_string(q) + ")";
        case Kind::LeaveOneOut: return "LeaveOneOut";
        case Kind::VFold: return "VFold(" + std::to_string(V) + ")";
    }
    return "?";
}

void WeightScheme::validate(int n) const {
    if (n < 2) throw std::invalid_argument("weight scheme: n must be >= 2");
    switch (kind) {
        case Kind::Efron:
            if (q < 1) throw std::invalid_argument("Efron: q must be >= 1");
            break;
        case Kind::RandomHoldOut:
            if (q < 1 || q > n - 1) throw std::invalid_argument("RandomHoldOut: need 1 <= q <= n-1");
            break;
        case Kind::VFold:
            if (V < 2 || V > n) throw std::invalid_argument("VFold: need 2 <= V <= n");
            break;
        case Kind::Rademacher:
        case Kind::LeaveOneOut:
            break;
    }
}

WeightVector draw_weights(const WeightScheme& scheme, int n, RngStream& rng) {
    scheme.validate(n);
    WeightVector out;
    out.w.assign(n, 0.0);
    switch (scheme.kind) {
        case WeightScheme::Kind::Efron: {
            // Multinomial(q; 1/n..1/n) as counts of q uniform throws, scaled by n/q.
            const double scale = static_cast<double>(n) / scheme.q;
            for (int j = 0; j < scheme.q; ++j) out.w[rng.uniform_below(n)] += 1.0;
            for (double& w : out.w) w *= scale;
            break;
        }
        case WeightScheme::Kind::Rademacher: {
            for (double& w : out.w) w = rng.uniform01() < 0.5 ? 0.0 : 2.0;
            break;
        }
        case WeightScheme::Kind::RandomHoldOut:
        case WeightScheme::Kind::LeaveOneOut: {
            const int q = scheme.holdout_q(n);
            std::vector<int> idx(n);
            std::iota(idx.begin(), idx.end(), 0);
            for (int j = 0; j < q; ++j) {
                const int pick = j + static_cast<int>(rng.uniform_below(n - j));
                std::swap(idx[j], idx[pick]);
                out.w[idx[j]] = static_cast<double>(n) / q;
            }
            break;
        }
        case WeightScheme::Kind::VFold: {
            const int V = scheme.V;
            const int base = n / V, rem = n % V;
            const int J = static_cast<int>(rng.uniform_below(V));
            const double keep = static_cast<double>(V) / (V - 1);
            int pos = 0;
            for (int j = 0; j < V; ++j) {
                const int len = base + (j < rem ? 1 : 0);
                for (int t = 0; t < len; ++t, ++pos) out.w[pos] = j == J ? 0.0 : keep;
            }
            break;
        }
    }
    return out;
}

WeightMoments weight_moments(const WeightScheme& scheme, int n, int cell_count) {
    scheme.validate(n);
    if (cell_count < 1 || cell_count > n)
        throw std::invalid_argument("weight_moments: cell_count must be in [1, n]");
    WeightMoments out;
    if (scheme.kind == WeightScheme::Kind::VFold) {
        // Only block-aligned cells: conditional on the block surviving, all cell
        // weights are equal, so both moments vanish.
        const int block = (n + scheme.V - 1) / scheme.V;
        if (cell_count > block)
            throw unsupported_scheme_error("weight_moments: VFold cell straddles blocks");
        out.method = MomentMethod::ClosedForm;
        return out;
    }
    out.r2 = quoted_r2(scheme, n, cell_count);
    if (support_size(scheme, n, cell_count) <= kEnumerationCap) {
        out.r1 = exact_moments(scheme, n, cell_count).r1;
        out.method = support_size(scheme, n, cell_count) <= 2 ? MomentMethod::ClosedForm
                                                              : MomentMethod::Enumeration;
    } else {
        const auto mc = monte_carlo_moments(scheme, n, cell_count, kMonteCarloDraws);
        out.r1 = mc.moments.r1;
        out.method = MomentMethod::MonteCarlo;
        out.se = mc.se_r1;
    }
    return out;
}

double penalty_factor(const WeightScheme& scheme, int n, int cell_count) {
    scheme.validate(n);
    if (cell_count < 1 || cell_count > n)
        throw std::invalid_argument("penalty_factor: cell_count must be in [1, n]");
    if (scheme.kind == WeightScheme::Kind::VFold)
        throw unsupported_scheme_error("penalty_factor: VFold penalties are computed fold-exactly");
    if (cell_count == 1) return 0.0;
    if (support_size(scheme, n, cell_count) <= kEnumerationCap) {
        const auto m = exact_moments(scheme, n, cell_count);
        return m.r1 + m.r2;
    }
    return monte_carlo_moments(scheme, n, cell_count, kMonteCarloDraws).factor;
}

MomentTable::MomentTable(const WeightScheme& scheme, int n) : scheme_(scheme) {
    scheme.validate(n);
    factor_.resize(n);
    for (int k = 1; k <= n; ++k) factor_[k - 1] = penalty_factor(scheme, n, k);
}

NormalizingConstants normalizing_constant(const WeightScheme& scheme, int n, int threshold) {
    scheme.validate(n);
    if (threshold < 1 || threshold > n)
        throw std::invalid_argument("normalizing_constant: threshold must be in [1, n]");
    if (scheme.kind == WeightScheme::Kind::VFold)
        throw unsupported_scheme_error("normalizing_constant: VFold (use default_constant)");
    NormalizingConstants out;
    out.c_w = 0.0;
    out.c_w_prime = std::numeric_limits<double>::infinity();
    for (int k = threshold; k <= n; ++k) {
        const double f = penalty_factor(scheme, n, k);
        const double v = f > 0.0 ? 2.0 / f : std::numeric_limits<double>::infinity();
        out.c_w = std::max(out.c_w, v);
        out.c_w_prime = std::min(out.c_w_prime, v);
    }
    return out;
}

double default_constant(const WeightScheme& scheme, int n) {
    scheme.validate(n);
    switch (scheme.kind) {
        case WeightScheme::Kind::Efron:
            return static_cast<double>(scheme.q) / n;
        case WeightScheme::Kind::Rademacher:
            return 1.0;
        case WeightScheme::Kind::RandomHoldOut:
            return static_cast<double>(scheme.q) / (n - scheme.q);
        case WeightScheme::Kind::LeaveOneOut:
            return n - 1.0;
        case WeightScheme::Kind::VFold:
            return scheme.V - 1.0;
    }
    return 1.0;
}

}  // namespace repen
