#pragma once

#include <string>
#include <vector>

#include "repen/penalties.hpp"

namespace repen {

/// One model-selection algorithm: a criterion family plus its constants.
/// The effective penalty constant is `constant * overpen`.
struct SelectionConfig {
    enum class Method { Mallows, ClassicalVFCV, Resampling, VFoldPenalty };
    Method method = Method::Resampling;
    WeightScheme scheme;   // Resampling
    int V = 0;             // ClassicalVFCV / VFoldPenalty
    double constant = 1.0; // C (ignored by Mallows/ClassicalVFCV)
    double overpen = 1.0;
    int threshold = 2;     // minimum cell count for the candidate set
    std::string name;
};

/// Indices of the models whose minimum cell count reaches the threshold.
/// Throws empty_family_error when none survives.
std::vector<int> filter_models(const std::vector<FittedHistogram>& fits, int threshold);

/// Index (into `criteria`) of the minimizer of the total criterion; ties go to
/// the smaller dimension, then the smaller model id. Throws when all entries
/// are undefined.
int select(const std::vector<CriterionValue>& criteria);

/// Model entering the constant-calibration path.
struct PathModel {
    int model_id = 0;
    int dimension = 0;
    double risk = 0.0;
    double pen0 = 0.0;  // penalty shape, >= 0
};

struct PathSegment {
    double c_low = 0.0;
    double c_high = 0.0;
    PathModel model;
};

/// The map C -> argmin(risk + C pen0), piecewise constant on (0, inf).
struct SelectionPath {
    std::vector<PathSegment> segments;  // contiguous, c_low increasing

    /// The segment model at a given C (ties at breakpoints resolved by the
    /// same dimension-then-id rule as `select`).
    const PathModel& at(double c) const;
};

/// Exact breakpoint structure via the lower convex envelope of (pen0, risk);
/// O(card log card).
SelectionPath selection_path(std::vector<PathModel> models);

struct SlopeResult {
    double c_hat = 0.0;   // breakpoint with the largest dimension drop
    PathModel selected;   // the path model at 2 * c_hat
};

/// Dimension-jump calibration: c_hat is the breakpoint with the largest drop
/// of the selected dimension (smallest such C on ties); returns the model at
/// 2 c_hat. Throws degenerate_path_error when the dimension never drops.
SlopeResult slope_select(const SelectionPath& path);

}  // namespace repen
