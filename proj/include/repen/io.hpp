#pragma once

#include <map>
#include <string>
#include <vector>

#include "repen/bench.hpp"

namespace repen {

/// CSV with one row per algorithm, values at 17 significant digits so parsing
/// an emitted file reproduces the in-memory report exactly. Header comments
/// (#) echo the configuration.
void write_report_csv(const BenchReport& report, const std::string& path);
BenchReport read_report_csv(const std::string& path);

/// Two numeric columns, whitespace- or comma-separated, '#' comments.
DataSet read_xy_file(const std::string& path);

/// Flat `key = value` configuration; '#' comments, blank lines ignored.
std::map<std::string, std::string> parse_config_file(const std::string& path);

struct RunManifest {
    std::string version;
    std::uint64_t master_seed = 0;
    int workers = 0;
    std::vector<std::string> config_echo;
    std::vector<std::string> outputs;  // per-experiment CSV paths
    double wall_seconds = 0.0;
};

void write_manifest(const RunManifest& m, const std::string& path);

}  // namespace repen
