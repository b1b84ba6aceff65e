#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "repen/bench.hpp"
#include "repen/errors.hpp"
#include "repen/io.hpp"
#include "repen/version.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumerical = 4;

struct BenchOptions {
    std::string config_path;
    std::string experiment;
    bool all = false;
    int n_reps = 1000;
    std::uint64_t seed = 1;
    int mc_draws = 1000;
    int workers = 0;
    std::string out_dir = ".";
    double overpen = 1.0;
    int threshold = 2;
};

struct SelectOptions {
    std::string data_path;
    std::string family = "regular";
    int d_max = 0;
    int d1_max = 0;
    int d2_max = 0;
    int k_max = -1;
    std::string scheme = "rademacher";
    int q = 0;
    int V = 5;
    double constant = -1.0;  // < 0: scheme default
    double overpen = 1.0;
    int threshold = 2;
    std::uint64_t seed = 1;
    bool slope = false;
};

// Config-file values apply only where the command line stayed silent.
void apply_config_file(BenchOptions& opt, const CLI::App& cmd) {
    if (opt.config_path.empty()) return;
    const auto kv = repen::parse_config_file(opt.config_path);
    const auto get = [&](const char* key, const char* flag) -> const std::string* {
        if (cmd.count(flag) > 0) return nullptr;
        const auto it = kv.find(key);
        return it == kv.end() ? nullptr : &it->second;
    };
    if (const auto* v = get("experiment", "--experiment")) {
        if (*v == "all")
            opt.all = true;
        else
            opt.experiment = *v;
    }
    if (const auto* v = get("n_reps", "--n-reps")) opt.n_reps = std::stoi(*v);
    if (const auto* v = get("seed", "--seed")) opt.seed = std::stoull(*v);
    if (const auto* v = get("mc_draws", "--mc-draws")) opt.mc_draws = std::stoi(*v);
    if (const auto* v = get("workers", "--workers")) opt.workers = std::stoi(*v);
    if (const auto* v = get("out", "--out")) opt.out_dir = *v;
    if (const auto* v = get("overpen", "--overpen")) opt.overpen = std::stod(*v);
    if (const auto* v = get("threshold", "--threshold")) opt.threshold = std::stoi(*v);
}

int run_bench(const BenchOptions& opt) {
    std::vector<std::string> names;
    if (opt.all)
        names = {"S1", "S2", "HSd1", "HSd2"};
    else if (!opt.experiment.empty())
        names = {opt.experiment};
    else {
        std::cerr << "bench: pass --experiment NAME or --all (or set experiment in the config file)\n";
        return kExitConfig;
    }

    std::filesystem::create_directories(opt.out_dir);
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<repen::BenchReport> reports;
    repen::RunManifest manifest;
    manifest.version = repen::kVersion;
    manifest.master_seed = opt.seed;
    manifest.workers = repen::resolve_workers(opt.workers);

    for (const auto& name : names) {
        repen::ExperimentConfig cfg = repen::experiment_preset(name, opt.n_reps, opt.seed);
        cfg.threshold = opt.threshold;
        cfg.mc_draws = opt.mc_draws;
        cfg.workers = opt.workers;
        if (opt.overpen != 1.0)
            for (auto& alg : cfg.algorithms) alg.overpen *= opt.overpen;

        std::cerr << "running " << name << " (n=" << cfg.spec.n << ", N=" << cfg.n_reps << ") ...\n";
        repen::BenchReport report = repen::run_experiment(cfg);
        if (report.skipped > report.n_reps / 10) {
            std::cerr << "bench: " << name << ": " << report.skipped
                      << " replications skipped (candidate set empty); budget exceeded\n";
            return kExitNumerical;
        }
        const std::string csv = opt.out_dir + "/" + name + ".csv";
        repen::write_report_csv(report, csv);
        manifest.outputs.push_back(csv);
        manifest.config_echo.push_back("experiment=" + name + " n_reps=" + std::to_string(cfg.n_reps) +
                                       " threshold=" + std::to_string(cfg.threshold) +
                                       " overpen=" + std::to_string(opt.overpen));
        reports.push_back(std::move(report));
    }

    const std::string table = repen::summarize(reports);
    std::cout << table;
    {
        std::ofstream os(opt.out_dir + "/summary.txt");
        os << table;
        manifest.outputs.push_back(opt.out_dir + "/summary.txt");
    }
    manifest.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    repen::write_manifest(manifest, opt.out_dir + "/manifest.txt");
    return 0;
}

repen::WeightScheme make_scheme(const SelectOptions& opt, int n) {
    if (opt.scheme == "efron") return repen::WeightScheme::efron(opt.q > 0 ? opt.q : n);
    if (opt.scheme == "rademacher") return repen::WeightScheme::rademacher();
    if (opt.scheme == "rho") return repen::WeightScheme::random_hold_out(opt.q > 0 ? opt.q : n / 2);
    if (opt.scheme == "loo") return repen::WeightScheme::leave_one_out();
    if (opt.scheme == "vfold") return repen::WeightScheme::vfold(opt.V);
    throw std::invalid_argument("unknown scheme: " + opt.scheme);
}

repen::ModelFamilySpec make_family(const SelectOptions& opt, int n) {
    using FS = repen::ModelFamilySpec;
    if (opt.family == "regular")
        return opt.d_max > 0 ? FS::regular(1, opt.d_max) : FS::regular_auto(n);
    if (opt.family == "two-bin") {
        if (opt.d1_max > 0 || opt.d2_max > 0)
            return FS::two_bin_sizes(std::max(1, opt.d1_max), std::max(1, opt.d2_max), true);
        return FS::two_bin_auto(n);
    }
    if (opt.family == "dyadic")
        return opt.k_max >= 0 ? FS::dyadic_regular(opt.k_max) : FS::dyadic_regular_auto(n);
    if (opt.family == "dyadic-two-bin")
        return opt.k_max >= 0 ? FS::dyadic_two_bin(opt.k_max, true) : FS::dyadic_two_bin_auto(n);
    throw std::invalid_argument("unknown family: " + opt.family);
}

int run_select(const SelectOptions& opt) {
    const repen::DataSet data = repen::read_xy_file(opt.data_path);
    const int n = data.size();
    if (n < 2) throw std::invalid_argument("select: need at least 2 observations");

    const auto family_spec = make_family(opt, n);
    const auto partitions = repen::build_family(family_spec, n);
    std::vector<repen::FittedHistogram> fits;
    fits.reserve(partitions.size());
    for (const auto& p : partitions) fits.push_back(repen::fit(p, data));
    const auto candidates = repen::filter_models(fits, opt.threshold);

    const repen::WeightScheme scheme = make_scheme(opt, n);
    const double C = opt.constant > 0.0 ? opt.constant : repen::default_constant(scheme, n);

    repen::RngStream brng(repen::derive_seed(opt.seed, {0xB10C}));
    repen::FoldBlocks blocks;
    if (scheme.kind == repen::WeightScheme::Kind::VFold) blocks = repen::make_blocks(n, scheme.V, brng);

    std::vector<repen::CriterionValue> criteria(candidates.size());
    std::vector<double> pen0(candidates.size());
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const auto& f = fits[candidates[i]];
        pen0[i] = scheme.kind == repen::WeightScheme::Kind::VFold
                      ? repen::vfold_penalty(f, data, blocks, 1.0).value
                      : repen::resampling_penalty_closed(f, scheme, 1.0).value;
        auto& c = criteria[i];
        c.model_id = partitions[candidates[i]].model_id;
        c.dimension = partitions[candidates[i]].dimension();
        c.empirical_risk = repen::empirical_risk(f);
        c.penalty = C * opt.overpen * pen0[i];
        c.total = c.empirical_risk + c.penalty;
    }

    std::cout << "candidates (" << candidates.size() << " of " << partitions.size()
              << " models, threshold=" << opt.threshold << "), scheme=" << scheme.name()
              << ", C=" << C << ", overpen=" << opt.overpen << "\n";
    std::cout << "model,dimension,risk,penalty,total\n";
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const auto& c = criteria[i];
        std::cout << partitions[candidates[i]].label << ',' << c.dimension << ',' << c.empirical_risk
                  << ',' << c.penalty << ',' << c.total << "\n";
    }

    const int pick = repen::select(criteria);
    const auto& best = partitions[candidates[pick]];
    const auto& bestfit = fits[candidates[pick]];
    std::cout << "\nselected: " << best.label << " (dimension " << best.dimension() << ")\n";
    std::cout << "breakpoints:";
    for (double b : best.breakpoints) std::cout << ' ' << b;
    std::cout << "\ncell means:";
    for (double m : bestfit.means) std::cout << ' ' << m;
    std::cout << "\n";

    if (opt.slope) {
        std::vector<repen::PathModel> models(candidates.size());
        for (std::size_t i = 0; i < candidates.size(); ++i)
            models[i] = {criteria[i].model_id, criteria[i].dimension, criteria[i].empirical_risk,
                         pen0[i]};
        const auto path = repen::selection_path(models);
        std::cout << "\nselection path (" << path.segments.size() << " segments):\n";
        for (const auto& seg : path.segments) {
            const auto& p = partitions[seg.model.model_id];
            std::cout << "  C in (" << seg.c_low << ", " << seg.c_high << "] -> " << p.label
                      << " (D=" << seg.model.dimension << ")\n";
        }
        const auto slope = repen::slope_select(path);
        const auto& sp = partitions[slope.selected.model_id];
        std::cout << "dimension jump at C_hat=" << slope.c_hat << "; selected at 2*C_hat: " << sp.label
                  << " (D=" << slope.selected.dimension << ")\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"resampling-penalized model selection for histogram regression"};
    app.require_subcommand(1);

    BenchOptions bench;
    CLI::App* cb = app.add_subcommand("bench", "run benchmark experiments and emit CSV tables");
    cb->add_option("--config", bench.config_path, "key = value config file (flags override)");
    cb->add_option("--experiment", bench.experiment, "one of S1, S2, HSd1, HSd2");
    cb->add_flag("--all", bench.all, "run all four experiments");
    cb->add_option("--n-reps", bench.n_reps, "replication count (default 1000)");
    cb->add_option("--seed", bench.seed, "master seed (default 1)");
    cb->add_option("--mc-draws", bench.mc_draws, "Monte Carlo penalty draws");
    cb->add_option("--workers", bench.workers, "worker threads (0 = REPEN_WORKERS or hardware)");
    cb->add_option("--out", bench.out_dir, "output directory (default .)");
    cb->add_option("--overpen", bench.overpen, "extra overpenalization factor on all algorithms");
    cb->add_option("--threshold", bench.threshold, "minimum cell count for candidate models");

    SelectOptions sel;
    CLI::App* cs = app.add_subcommand("select", "select a histogram model for a data file");
    cs->add_option("--data", sel.data_path, "two-column x,y file; x in [0,1]")->required();
    cs->add_option("--family", sel.family, "regular | two-bin | dyadic | dyadic-two-bin");
    cs->add_option("--d-max", sel.d_max, "regular family: max cells (default n/ln n)");
    cs->add_option("--d1-max", sel.d1_max, "two-bin family: max cells on [0,1/2)");
    cs->add_option("--d2-max", sel.d2_max, "two-bin family: max cells on [1/2,1]");
    cs->add_option("--k-max", sel.k_max, "dyadic families: max bin-size exponent");
    cs->add_option("--scheme", sel.scheme, "efron | rademacher | rho | loo | vfold");
    cs->add_option("--q", sel.q, "Efron/hold-out resample size");
    cs->add_option("--V", sel.V, "fold count for vfold");
    cs->add_option("--constant", sel.constant, "penalty constant C (default: scheme default)");
    cs->add_option("--overpen", sel.overpen, "overpenalization factor");
    cs->add_option("--threshold", sel.threshold, "minimum cell count for candidate models");
    cs->add_option("--seed", sel.seed, "seed for fold blocks");
    cs->add_flag("--slope-heuristics", sel.slope, "calibrate C by the dimension jump and report the path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (cb->parsed()) {
            apply_config_file(bench, *cb);
            return run_bench(bench);
        }
        return run_select(sel);
    } catch (const repen::undefined_model_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const repen::empty_family_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const repen::degenerate_conditioning_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const repen::degenerate_path_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::runtime_error& e) {
        // file and data problems surface here
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
}
