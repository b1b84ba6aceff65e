#include "repen/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "repen/errors.hpp"

namespace repen {
namespace {

// Tie order shared by select() and path queries: dimension, then model id.
bool tie_before(int dim_a, int id_a, int dim_b, int id_b) {
    if (dim_a != dim_b) return dim_a < dim_b;
    return id_a < id_b;
}

}  // namespace

std::vector<int> filter_models(const std::vector<FittedHistogram>& fits, int threshold) {
    if (threshold < 1) throw std::invalid_argument("filter_models: threshold must be >= 1");
    std::vector<int> kept;
    for (std::size_t i = 0; i < fits.size(); ++i)
        if (fits[i].min_count >= threshold) kept.push_back(static_cast<int>(i));
    if (kept.empty()) throw empty_family_error("filter_models: no model reaches the cell-count threshold");
    return kept;
}

int select(const std::vector<CriterionValue>& criteria) {
    int best = -1;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto& c = criteria[i];
        if (!c.defined || std::isinf(c.total)) continue;
        if (best < 0) {
            best = static_cast<int>(i);
            continue;
        }
        const auto& b = criteria[best];
        if (c.total < b.total ||
            (c.total == b.total && tie_before(c.dimension, c.model_id, b.dimension, b.model_id)))
            best = static_cast<int>(i);
    }
    if (best < 0) throw undefined_model_error("select: every criterion is undefined");
    return best;
}

const PathModel& SelectionPath::at(double c) const {
    if (segments.empty()) throw std::invalid_argument("SelectionPath::at: empty path");
    if (!(c > 0.0)) throw std::domain_error("SelectionPath::at: C must be positive");
    std::size_t lo = 0, hi = segments.size() - 1;
    while (lo < hi) {
        const std::size_t mid = (lo + hi) / 2;
        if (c > segments[mid].c_high)
            lo = mid + 1;
        else
            hi = mid;
    }
    // Exactly at a breakpoint both neighbors tie in total; apply the tie rule.
    if (c == segments[lo].c_high && lo + 1 < segments.size()) {
        const auto& a = segments[lo].model;
        const auto& b = segments[lo + 1].model;
        return tie_before(a.dimension, a.model_id, b.dimension, b.model_id) ? segments[lo].model
                                                                            : segments[lo + 1].model;
    }
    return segments[lo].model;
}

SelectionPath selection_path(std::vector<PathModel> models) {
    if (models.empty()) throw std::invalid_argument("selection_path: no models");
    for (const auto& m : models)
        if (m.pen0 < 0.0) throw std::invalid_argument("selection_path: pen0 must be >= 0");

    // One winner per distinct pen0 value; the duel is C-independent.
    std::sort(models.begin(), models.end(), [](const PathModel& a, const PathModel& b) {
        if (a.pen0 != b.pen0) return a.pen0 < b.pen0;
        if (a.risk != b.risk) return a.risk < b.risk;
        return tie_before(a.dimension, a.model_id, b.dimension, b.model_id);
    });
    std::vector<PathModel> pts;
    for (const auto& m : models)
        if (pts.empty() || m.pen0 != pts.back().pen0) pts.push_back(m);

    // Lower convex envelope of (pen0, risk): slopes strictly increasing.
    std::vector<PathModel> hull;
    for (const auto& p : pts) {
        while (hull.size() >= 2) {
            const auto& a = hull[hull.size() - 2];
            const auto& b = hull.back();
            const double turn =
                (b.risk - a.risk) * (p.pen0 - b.pen0) - (p.risk - b.risk) * (b.pen0 - a.pen0);
            if (turn >= 0.0)
                hull.pop_back();
            else
                break;
        }
        hull.push_back(p);
    }
    // Only the strictly risk-decreasing prefix is ever an argmin for C > 0.
    std::size_t keep = 1;
    while (keep < hull.size() && hull[keep].risk < hull[keep - 1].risk) ++keep;
    hull.resize(keep);

    // Walk from large pen0 (small C) to small pen0 (large C).
    SelectionPath path;
    double c_low = 0.0;
    for (std::size_t i = hull.size(); i-- > 0;) {
        PathSegment seg;
        seg.model = hull[i];
        seg.c_low = c_low;
        if (i == 0) {
            seg.c_high = std::numeric_limits<double>::infinity();
        } else {
            const auto& left = hull[i - 1];
            seg.c_high = (left.risk - hull[i].risk) / (hull[i].pen0 - left.pen0);
        }
        c_low = seg.c_high;
        path.segments.push_back(seg);
    }
    return path;
}

SlopeResult slope_select(const SelectionPath& path) {
    if (path.segments.empty()) throw std::invalid_argument("slope_select: empty path");
    int best_drop = 0;
    double c_hat = 0.0;
    for (std::size_t i = 0; i + 1 < path.segments.size(); ++i) {
        const int drop = path.segments[i].model.dimension - path.segments[i + 1].model.dimension;
        if (drop > best_drop) {
            best_drop = drop;
            c_hat = path.segments[i].c_high;
        }
    }
    if (best_drop <= 0)
        throw degenerate_path_error("slope_select: dimension never drops along the path");
    SlopeResult out;
    out.c_hat = c_hat;
    out.selected = path.at(2.0 * c_hat);
    return out;
}

}  // namespace repen
