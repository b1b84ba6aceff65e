#pragma once

#include <string>
#include <vector>

#include "repen/rng.hpp"

namespace repen {

/// Resampling weight law on [0,inf)^n with E[W_i] = 1.
///   Efron(q)          : multinomial(q; 1/n..1/n) scaled by n/q
///   Rademacher        : i.i.d. 2 Bernoulli(1/2)
///   RandomHoldOut(q)  : (n/q) 1{i in I}, I a uniform q-subset
///   LeaveOneOut       : RandomHoldOut(n-1)
///   VFold(V)          : leave-one-block-out weights on V near-equal blocks
struct WeightScheme {
    enum class Kind { Efron, Rademacher, RandomHoldOut, LeaveOneOut, VFold };
    Kind kind = Kind::Rademacher;
    int q = 0;  // Efron / RandomHoldOut
    int V = 0;  // VFold

    static WeightScheme efron(int q) { return {Kind::Efron, q, 0}; }
    static WeightScheme rademacher() { return {Kind::Rademacher, 0, 0}; }
    static WeightScheme random_hold_out(int q) { return {Kind::RandomHoldOut, q, 0}; }
    static WeightScheme leave_one_out() { return {Kind::LeaveOneOut, 0, 0}; }
    static WeightScheme vfold(int V) { return {Kind::VFold, 0, V}; }

    bool exchangeable() const { return kind != Kind::VFold; }
    /// RandomHoldOut subset size, with LeaveOneOut resolved to n-1.
    int holdout_q(int n) const { return kind == Kind::LeaveOneOut ? n - 1 : q; }
    std::string name() const;
    void validate(int n) const;
};

struct WeightVector {
    std::vector<double> w;
};

/// One weight vector per the scheme's law; deterministic given the stream.
/// VFold uses in-order contiguous blocks of near-equal size.
WeightVector draw_weights(const WeightScheme& scheme, int n, RngStream& rng);

enum class MomentMethod { ClosedForm, Enumeration, MonteCarlo };

/// Conditional weight moments for a cell holding cell_count of the n indices.
/// r1 is the exact conditional moment E[(W_i - Wbar)^2 / Wbar^2 | Wbar > 0]
/// computed by enumeration over the within-cell weight-sum law; r2 carries the
/// closed forms quoted for each scheme (exact for Efron and leave-one-out,
/// asymptotic in the cell count for the others).
struct WeightMoments {
    double r1 = 0.0;
    double r2 = 0.0;
    MomentMethod method = MomentMethod::Enumeration;
    double se = 0.0;  // Monte Carlo only
};

WeightMoments weight_moments(const WeightScheme& scheme, int n, int cell_count);

/// Exact conditional factor E[(1 + Wbar)(W_i - Wbar)^2 / Wbar^2 | Wbar > 0],
/// i.e. R1 + R2 with both moments conditioned on the cell surviving. This is
/// the per-cell constant of the closed-form resampling penalty; enumeration
/// where the weight-sum support is small, Monte Carlo (B = 1e5) beyond.
double penalty_factor(const WeightScheme& scheme, int n, int cell_count);

/// Cached penalty factors for cell counts 1..n under one scheme.
class MomentTable {
public:
    MomentTable(const WeightScheme& scheme, int n);
    double factor(int cell_count) const { return factor_.at(cell_count - 1); }
    const WeightScheme& scheme() const { return scheme_; }
    int n() const { return static_cast<int>(factor_.size()); }

private:
    WeightScheme scheme_;
    std::vector<double> factor_;
};

struct NormalizingConstants {
    double c_w = 0.0;
    double c_w_prime = 0.0;
};

/// sup / inf over cell counts in [threshold, n] of 2 / (R1 + R2), both moments
/// exact-conditional. Rejects VFold, whose moments are degenerate on
/// block-aligned cells; use default_constant for its benchmark constant.
NormalizingConstants normalizing_constant(const WeightScheme& scheme, int n, int threshold);

/// The simulation constants: Efron(q) -> q/n, Rademacher -> 1,
/// RandomHoldOut(q) -> q/(n-q), LeaveOneOut -> n-1, VFold(V) -> V-1.
double default_constant(const WeightScheme& scheme, int n);

}  // namespace repen
