#include "repen/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "repen/errors.hpp"
#include "repen/rng.hpp"

namespace repen {
namespace {

constexpr std::uint64_t kDataTag = 0xDA7A;
constexpr std::uint64_t kBlockTag = 0xB10C;

std::string scheme_key(const WeightScheme& s) { return s.name(); }

SelectionConfig resampling_alg(const std::string& name, WeightScheme scheme, double C, double overpen) {
    SelectionConfig a;
    a.method = SelectionConfig::Method::Resampling;
    a.scheme = scheme;
    a.constant = C;
    a.overpen = overpen;
    a.name = name;
    return a;
}

}  // namespace

std::vector<SelectionConfig> benchmark_algorithms(int n) {
    std::vector<SelectionConfig> algs;
    const std::vector<int> vs = {2, 5, 10, 20};

    for (double over : {1.0, 1.25}) {
        SelectionConfig mal;
        mal.method = SelectionConfig::Method::Mallows;
        mal.overpen = over;
        mal.name = over > 1.0 ? "Mal+" : "Mal";
        algs.push_back(mal);
    }
    for (int v : vs) {
        SelectionConfig cv;
        cv.method = SelectionConfig::Method::ClassicalVFCV;
        cv.V = v;
        cv.name = std::to_string(v) + "-FCV";
        algs.push_back(cv);
    }
    for (double over : {1.0, 1.25}) {
        const std::string suffix = over > 1.0 ? "+" : "";
        algs.push_back(resampling_alg("penEfr" + suffix, WeightScheme::efron(n), 1.0, over));
        algs.push_back(resampling_alg("penRad" + suffix, WeightScheme::rademacher(), 1.0, over));
        algs.push_back(resampling_alg("penRHO" + suffix, WeightScheme::random_hold_out(n / 2), 1.0, over));
        algs.push_back(resampling_alg("penLOO" + suffix, WeightScheme::leave_one_out(), n - 1.0, over));
        for (int v : vs) {
            SelectionConfig pv;
            pv.method = SelectionConfig::Method::VFoldPenalty;
            pv.V = v;
            pv.constant = v - 1.0;
            pv.overpen = over;
            pv.name = "pen" + std::to_string(v) + "-FCV" + suffix;
            algs.push_back(pv);
        }
    }
    return algs;
}

ExperimentConfig experiment_preset(const std::string& name, int n_reps, std::uint64_t master_seed) {
    ExperimentConfig cfg;
    cfg.name = name;
    cfg.n_reps = n_reps;
    cfg.master_seed = master_seed;
    if (name == "S1") {
        cfg.spec = {RegressionFunction::sin_pi(), NoiseProfile::constant_sigma(1.0), 200};
        cfg.family = ModelFamilySpec::regular_auto(200);
    } else if (name == "S2") {
        cfg.spec = {RegressionFunction::sin_pi(), NoiseProfile::linear_sigma(), 200};
        cfg.family = ModelFamilySpec::two_bin_auto(200);
    } else if (name == "HSd1") {
        cfg.spec = {RegressionFunction::heavisine(), NoiseProfile::constant_sigma(1.0), 2048};
        cfg.family = ModelFamilySpec::dyadic_regular_auto(2048);
    } else if (name == "HSd2") {
        cfg.spec = {RegressionFunction::heavisine(), NoiseProfile::linear_sigma(), 2048};
        cfg.family = ModelFamilySpec::dyadic_two_bin_auto(2048);
    } else {
        throw std::invalid_argument("experiment_preset: unknown experiment " + name);
    }
    cfg.algorithms = benchmark_algorithms(cfg.spec.n);
    return cfg;
}

ExperimentContext::ExperimentContext(ExperimentConfig cfg) : config(std::move(cfg)) {
    partitions = build_family(config.family, config.spec.n);
    truths.reserve(partitions.size());
    for (const auto& p : partitions) truths.push_back(truth_stats(p, config.spec));
    for (const auto& a : config.algorithms) {
        if (a.method == SelectionConfig::Method::Resampling) {
            const std::string key = scheme_key(a.scheme);
            if (!tables.count(key))
                tables[key] = std::make_shared<MomentTable>(a.scheme, config.spec.n);
        }
        if (a.method == SelectionConfig::Method::ClassicalVFCV ||
            a.method == SelectionConfig::Method::VFoldPenalty) {
            if (std::find(vfold_values.begin(), vfold_values.end(), a.V) == vfold_values.end())
                vfold_values.push_back(a.V);
        }
    }
    std::sort(vfold_values.begin(), vfold_values.end());
}

ReplicationRecord run_replication(const ExperimentContext& ctx, int r) {
    const auto& cfg = ctx.config;
    const int n = cfg.spec.n;
    const int n_models = static_cast<int>(ctx.partitions.size());
    ReplicationRecord rec;
    rec.loss.assign(cfg.algorithms.size(), std::numeric_limits<double>::quiet_NaN());

    const DataSet data = generate(cfg.spec, derive_seed(cfg.master_seed, {static_cast<std::uint64_t>(r), kDataTag}));

    std::vector<FittedHistogram> fits;
    fits.reserve(n_models);
    for (const auto& p : ctx.partitions) fits.push_back(fit(p, data));

    // Oracle over the whole family, infinite loss when a cell is empty.
    std::vector<double> losses(n_models);
    double oracle = std::numeric_limits<double>::infinity();
    for (int m = 0; m < n_models; ++m) {
        losses[m] = excess_loss(fits[m], ctx.truths[m]);
        oracle = std::min(oracle, losses[m]);
    }
    rec.oracle = oracle;

    std::vector<int> candidates;
    try {
        candidates = filter_models(fits, cfg.threshold);
    } catch (const empty_family_error&) {
        rec.skipped = true;
        return rec;
    }

    std::vector<double> risks(candidates.size());
    for (std::size_t i = 0; i < candidates.size(); ++i) risks[i] = empirical_risk(fits[candidates[i]]);

    // Shared statistics reused by several algorithms.
    double sigma2_hat = std::numeric_limits<double>::quiet_NaN();
    bool have_sigma2 = true;
    try {
        sigma2_hat = estimate_sigma2(data, fits);
    } catch (const std::exception&) {
        have_sigma2 = false;
    }

    std::map<std::string, std::vector<double>> base_pen;  // C = 1 closed-form penalties
    for (const auto& kv : ctx.tables) {
        std::vector<double> pens(candidates.size());
        for (std::size_t i = 0; i < candidates.size(); ++i)
            pens[i] = resampling_penalty_closed(fits[candidates[i]], *kv.second, 1.0).value;
        base_pen[kv.first] = std::move(pens);
    }

    std::map<int, FoldBlocks> blocks;
    std::map<int, std::vector<double>> vfold_pen;  // C = 1
    std::map<int, std::vector<double>> vfcv_crit;
    for (int v : ctx.vfold_values) {
        RngStream brng(derive_seed(cfg.master_seed, {static_cast<std::uint64_t>(r), kBlockTag,
                                                     static_cast<std::uint64_t>(v)}));
        blocks.emplace(v, make_blocks(n, v, brng));
        const FoldBlocks& blk = blocks.at(v);
        std::vector<double> pens(candidates.size()), crits(candidates.size());
        for (std::size_t i = 0; i < candidates.size(); ++i) {
            pens[i] = vfold_penalty(fits[candidates[i]], data, blk, 1.0).value;
            crits[i] = vfcv_criterion(*fits[candidates[i]].partition, data, blk);
        }
        vfold_pen[v] = std::move(pens);
        vfcv_crit[v] = std::move(crits);
    }

    for (std::size_t a = 0; a < cfg.algorithms.size(); ++a) {
        const auto& alg = cfg.algorithms[a];
        std::vector<CriterionValue> crit(candidates.size());
        for (std::size_t i = 0; i < candidates.size(); ++i) {
            const int m = candidates[i];
            CriterionValue& c = crit[i];
            c.model_id = ctx.partitions[m].model_id;
            c.dimension = ctx.partitions[m].dimension();
            c.empirical_risk = risks[i];
            c.defined = true;
            switch (alg.method) {
                case SelectionConfig::Method::Mallows:
                    if (!have_sigma2) {
                        c.defined = false;
                        break;
                    }
                    c.penalty = alg.overpen * mallows_penalty(fits[m], sigma2_hat, n);
                    c.total = c.empirical_risk + c.penalty;
                    break;
                case SelectionConfig::Method::ClassicalVFCV: {
                    const double v = vfcv_crit.at(alg.V)[i];
                    c.total = v;
                    c.penalty = 0.0;
                    c.defined = std::isfinite(v);
                    break;
                }
                case SelectionConfig::Method::Resampling:
                    c.penalty = alg.overpen * alg.constant * base_pen.at(scheme_key(alg.scheme))[i];
                    c.total = c.empirical_risk + c.penalty;
                    break;
                case SelectionConfig::Method::VFoldPenalty:
                    c.penalty = alg.overpen * alg.constant * vfold_pen.at(alg.V)[i];
                    c.total = c.empirical_risk + c.penalty;
                    break;
            }
        }
        try {
            const int pick = select(crit);
            rec.loss[a] = losses[candidates[pick]];
        } catch (const undefined_model_error&) {
            rec.loss[a] = std::numeric_limits<double>::quiet_NaN();
        }
    }
    return rec;
}

int resolve_workers(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("REPEN_WORKERS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

BenchReport run_experiment(const ExperimentConfig& config) {
    if (config.n_reps < 2) throw std::invalid_argument("run_experiment: n_reps must be >= 2");
    const ExperimentContext ctx(config);
    const int N = config.n_reps;
    std::vector<ReplicationRecord> records(N);

    const int workers = std::min(resolve_workers(config.workers), N);
    if (workers <= 1) {
        for (int r = 0; r < N; ++r) records[r] = run_replication(ctx, r);
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (;;) {
                    const int r = next.fetch_add(1);
                    if (r >= N) return;
                    records[r] = run_replication(ctx, r);
                }
            });
        for (auto& t : pool) t.join();
    }

    // Reduction in replication order: identical for every worker count.
    BenchReport report;
    report.experiment = config.name;
    report.n = config.spec.n;
    report.n_reps = N;
    report.master_seed = config.master_seed;
    report.threshold = config.threshold;
    const std::size_t A = config.algorithms.size();
    report.rows.resize(A);

    double oracle_sum = 0.0;
    int valid = 0;
    for (const auto& rec : records) {
        if (rec.skipped) {
            ++report.skipped;
        } else {
            oracle_sum += rec.oracle;
            ++valid;
        }
    }
    const double oracle_mean = valid > 0 ? oracle_sum / valid : 0.0;

    for (std::size_t a = 0; a < A; ++a) {
        AlgorithmResult& row = report.rows[a];
        row.name = config.algorithms[a].name;
        double loss_sum = 0.0, ratio_sum = 0.0;
        int n_ratio = 0;
        for (const auto& rec : records) {
            if (rec.skipped) continue;
            loss_sum += rec.loss[a];
            if (rec.oracle > 0.0) {
                ratio_sum += rec.loss[a] / rec.oracle;
                ++n_ratio;
            } else if (rec.loss[a] == 0.0) {
                ratio_sum += 1.0;  // 0/0 convention
                ++n_ratio;
            } else {
                ++row.flagged;
            }
        }
        row.n_valid = valid;
        const double loss_mean = valid > 0 ? loss_sum / valid : 0.0;
        if (oracle_mean > 0.0) {
            row.c_or = loss_mean / oracle_mean;
            // Delta method for the ratio of means.
            double acc = 0.0;
            for (const auto& rec : records) {
                if (rec.skipped) continue;
                const double z = rec.loss[a] - row.c_or * rec.oracle;
                acc += z * z;
            }
            row.c_or_se = valid > 1 ? std::sqrt(acc / valid / valid) / oracle_mean : 0.0;
        } else {
            row.c_or = loss_mean == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
            row.c_or_se = 0.0;
        }
        if (n_ratio > 0) {
            row.c_path_or = ratio_sum / n_ratio;
            double acc = 0.0;
            for (const auto& rec : records) {
                if (rec.skipped) continue;
                double ratio;
                if (rec.oracle > 0.0)
                    ratio = rec.loss[a] / rec.oracle;
                else if (rec.loss[a] == 0.0)
                    ratio = 1.0;
                else
                    continue;
                acc += (ratio - row.c_path_or) * (ratio - row.c_path_or);
            }
            row.c_path_or_se = n_ratio > 1 ? std::sqrt(acc / n_ratio / n_ratio) : 0.0;
        }
    }
    report.notes.push_back("mallows_sigma2=residual_largest_admissible(n*risk/(n-D))");
    report.notes.push_back("vfcv_blocks=redrawn_per_replication");
    return report;
}

std::string summarize(const std::vector<BenchReport>& reports) {
    if (reports.empty()) throw std::invalid_argument("summarize: no reports");
    const std::size_t A = reports.front().rows.size();
    for (const auto& rep : reports) {
        if (rep.rows.size() != A) throw std::invalid_argument("summarize: mismatched algorithm sets");
        for (std::size_t a = 0; a < A; ++a)
            if (rep.rows[a].name != reports.front().rows[a].name)
                throw std::invalid_argument("summarize: mismatched algorithm sets");
    }

    // Best-within-uncertainty per column: |a - best| <= se(a) + se(best).
    std::vector<std::vector<bool>> bold(reports.size(), std::vector<bool>(A, false));
    for (std::size_t e = 0; e < reports.size(); ++e) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_at = 0;
        for (std::size_t a = 0; a < A; ++a)
            if (reports[e].rows[a].c_or < best) {
                best = reports[e].rows[a].c_or;
                best_at = a;
            }
        for (std::size_t a = 0; a < A; ++a) {
            const auto& row = reports[e].rows[a];
            bold[e][a] = std::abs(row.c_or - best) <= row.c_or_se + reports[e].rows[best_at].c_or_se;
        }
    }

    std::ostringstream os;
    os.setf(std::ios::fixed);
    os << "Experiment       ";
    for (const auto& rep : reports) {
        os << " | ";
        os.width(16);
        os << rep.experiment;
    }
    os << "\n";
    for (std::size_t a = 0; a < A; ++a) {
        os.width(17);
        std::string nm = reports.front().rows[a].name;
        os << nm;
        for (std::size_t e = 0; e < reports.size(); ++e) {
            const auto& row = reports[e].rows[a];
            std::ostringstream cell;
            cell.setf(std::ios::fixed);
            cell.precision(3);
            cell << (bold[e][a] ? "*" : " ") << row.c_or << " +-" << row.c_or_se;
            os << " | ";
            os.width(16);
            os << cell.str();
        }
        os << "\n";
    }
    return os.str();
}

}  // namespace repen
