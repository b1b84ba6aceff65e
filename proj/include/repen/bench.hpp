#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "repen/selection.hpp"

namespace repen {

/// A full benchmark experiment: problem, model family, algorithm roster,
/// replication budget and seeding.
struct ExperimentConfig {
    std::string name = "custom";
    RegressionSpec spec;
    ModelFamilySpec family;
    int n_reps = 1000;
    std::uint64_t master_seed = 1;
    int threshold = 2;
    std::vector<SelectionConfig> algorithms;
    int mc_draws = 1000;  // Monte Carlo penalty draws, when an algorithm needs them
    int workers = 0;      // 0 = resolve from REPEN_WORKERS or hardware
};

/// The benchmark roster: Mallows, classical V-fold CV (V in {2,5,10,20}),
/// the four exchangeable resampling penalties, V-fold penalties, and the 5/4
/// overpenalized variant of every penalty.
std::vector<SelectionConfig> benchmark_algorithms(int n);

/// Named presets S1 / S2 / HSd1 / HSd2.
ExperimentConfig experiment_preset(const std::string& name, int n_reps, std::uint64_t master_seed);

struct ReplicationRecord {
    std::vector<double> loss;  // one excess loss per algorithm
    double oracle = 0.0;       // inf over the family of the fitted excess loss
    bool skipped = false;      // empty candidate set
};

struct AlgorithmResult {
    std::string name;
    double c_or = 0.0;
    double c_or_se = 0.0;
    double c_path_or = 0.0;
    double c_path_or_se = 0.0;
    int n_valid = 0;
    int flagged = 0;  // replications excluded from the pathwise ratio (oracle 0, loss > 0)
};

struct BenchReport {
    std::string experiment;
    int n = 0;
    int n_reps = 0;
    int skipped = 0;
    std::uint64_t master_seed = 0;
    int threshold = 2;
    std::vector<AlgorithmResult> rows;
    std::vector<std::string> notes;
};

/// Precomputed per-experiment state shared read-only across replications.
struct ExperimentContext {
    ExperimentConfig config;
    std::vector<Partition> partitions;
    std::vector<TruthCellStats> truths;
    std::vector<int> vfold_values;  // distinct V used by any algorithm
    std::map<std::string, std::shared_ptr<MomentTable>> tables;

    explicit ExperimentContext(ExperimentConfig cfg);
};

/// One replication, fully determined by (context, r).
ReplicationRecord run_replication(const ExperimentContext& ctx, int r);

/// N replications (parallel over workers, reduced in index order so the report
/// is identical for any worker count), aggregated into oracle ratios.
BenchReport run_experiment(const ExperimentConfig& config);

/// Text table, one row per algorithm and one column per report; the best
/// entries per column (within summed uncertainties of the minimum) are
/// marked with '*'. Throws when the reports carry different rosters.
std::string summarize(const std::vector<BenchReport>& reports);

int resolve_workers(int requested);

}  // namespace repen
