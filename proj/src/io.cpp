#include "repen/io.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace repen {
namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    out.push_back(trim(cur));
    return out;
}

}  // namespace

void write_report_csv(const BenchReport& report, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("write_report_csv: cannot open " + path);
    os << "# experiment=" << report.experiment << " n=" << report.n << " n_reps=" << report.n_reps
       << " seed=" << report.master_seed << " threshold=" << report.threshold
       << " skipped=" << report.skipped << "\n";
    for (const auto& note : report.notes) os << "# " << note << "\n";
    os << "algorithm,c_or,c_or_se,c_path_or,c_path_or_se,n_reps\n";
    for (const auto& row : report.rows) {
        os << row.name << ',' << fmt17(row.c_or) << ',' << fmt17(row.c_or_se) << ','
           << fmt17(row.c_path_or) << ',' << fmt17(row.c_path_or_se) << ',' << row.n_valid << "\n";
    }
    if (!os) throw std::runtime_error("write_report_csv: write failed for " + path);
}

BenchReport read_report_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("read_report_csv: cannot open " + path);
    BenchReport report;
    std::string line;
    bool header_seen = false;
    while (std::getline(is, line)) {
        line = trim(line);
        if (line.empty()) continue;
        if (line[0] == '#') {
            // First comment echoes the run configuration.
            std::istringstream ls(line.substr(1));
            std::string tok;
            while (ls >> tok) {
                const auto eq = tok.find('=');
                if (eq == std::string::npos) continue;
                const std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
                if (key == "experiment") report.experiment = val;
                else if (key == "n") report.n = std::stoi(val);
                else if (key == "n_reps") report.n_reps = std::stoi(val);
                else if (key == "seed") report.master_seed = std::stoull(val);
                else if (key == "threshold") report.threshold = std::stoi(val);
                else if (key == "skipped") report.skipped = std::stoi(val);
                else report.notes.push_back(tok);
            }
            continue;
        }
        if (!header_seen) {
            if (line.rfind("algorithm,", 0) != 0)
                throw std::runtime_error("read_report_csv: missing header in " + path);
            header_seen = true;
            continue;
        }
        const auto cells = split_csv(line);
        if (cells.size() != 6) throw std::runtime_error("read_report_csv: bad row: " + line);
        AlgorithmResult row;
        row.name = cells[0];
        row.c_or = std::stod(cells[1]);
        row.c_or_se = std::stod(cells[2]);
        row.c_path_or = std::stod(cells[3]);
        row.c_path_or_se = std::stod(cells[4]);
        row.n_valid = std::stoi(cells[5]);
        report.rows.push_back(row);
    }
    if (!header_seen) throw std::runtime_error("read_report_csv: empty report " + path);
    return report;
}

DataSet read_xy_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("read_xy_file: cannot open " + path);
    DataSet out;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        for (char& ch : line)
            if (ch == ',') ch = ' ';
        std::istringstream ls(line);
        double x, y;
        if (!(ls >> x)) continue;  // blank or comment-only line
        if (!(ls >> y))
            throw std::runtime_error("read_xy_file: line " + std::to_string(lineno) + ": expected two columns");
        std::string extra;
        if (ls >> extra)
            throw std::runtime_error("read_xy_file: line " + std::to_string(lineno) + ": trailing fields");
        if (!(x >= 0.0 && x <= 1.0))
            throw std::runtime_error("read_xy_file: line " + std::to_string(lineno) + ": x outside [0,1]");
        out.x.push_back(x);
        out.y.push_back(y);
    }
    if (out.x.empty()) throw std::runtime_error("read_xy_file: no data in " + path);
    return out;
}

std::map<std::string, std::string> parse_config_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("parse_config_file: cannot open " + path);
    std::map<std::string, std::string> out;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("parse_config_file: line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty()) throw std::runtime_error("parse_config_file: line " + std::to_string(lineno) + ": empty key");
        out[key] = val;
    }
    return out;
}

void write_manifest(const RunManifest& m, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("write_manifest: cannot open " + path);
    os << "version = " << m.version << "\n";
    os << "seed = " << m.master_seed << "\n";
    os << "workers = " << m.workers << "\n";
    for (const auto& c : m.config_echo) os << "config " << c << "\n";
    for (const auto& o : m.outputs) os << "output = " << o << "\n";
    os << "wall_seconds = " << fmt17(m.wall_seconds) << "\n";
}

}  // namespace repen
