#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "pimnet/errors.hpp"
#include "pimnet/execution.hpp"

namespace pimnet {

namespace io {

/// Shortest round-trippable decimal form; NaN renders as an empty CSV cell.
inline std::string num(double v) {
    if (std::isnan(v)) return "";
    if (v == 0.0) v = 0.0;  // normalize -0
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string num(long v) { return std::to_string(v); }
inline std::string num(int v) { return std::to_string(v); }

inline void write_text(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw config_error("cannot open for writing: " + path.string());
    out << content;
    if (!out) throw config_error("write failed: " + path.string());
}

inline std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw config_error("cannot open: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Tidy CSV from a header and row formatter; rows must already be in
/// deterministic order.
class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> columns) : columns_(std::move(columns)) {
        for (std::size_t i = 0; i < columns_.size(); ++i) {
            if (i) body_ += ',';
            body_ += columns_[i];
        }
        body_ += '\n';
    }

    void row(const std::vector<std::string>& cells) {
        if (cells.size() != columns_.size())
            throw usage_error("csv row width mismatch");
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) body_ += ',';
            body_ += cells[i];
        }
        body_ += '\n';
    }

    const std::string& str() const { return body_; }

private:
    std::vector<std::string> columns_;
    std::string body_;
};

}  // namespace io

/// EpochLogs stream, one row per recorded boundary, trials in index order.
inline std::string epoch_logs_csv(const EpochLogs& logs) {
    io::CsvWriter csv({"trial", "t", "epoch", "energy", "cut", "grad_err_sq", "ext_grad_l1",
                       "pair_grad_l1"});
    for (const auto& log : logs)
        for (const auto& rec : log.records)
            csv.row({io::num(log.trial), io::num(rec.t), io::num(rec.epoch),
                     io::num(rec.energy), io::num(rec.cut), io::num(rec.grad_err_sq),
                     io::num(rec.ext_grad_l1), io::num(rec.pair_grad_l1)});
    return csv.str();
}

/// Coupled-run state stream: everything needed to rebuild the empirical
/// distributions and bound inputs offline.
inline std::string coupled_states_csv(const CoupledRunResult& result) {
    io::CsvWriter csv({"process", "trial", "t", "config_hex", "energy", "ext_grad_l1",
                       "pair_grad_l1", "grad_err_integral"});
    for (std::size_t p = 0; p < result.checkpoints.size(); ++p) {
        for (std::size_t c = 0; c < result.times.size(); ++c) {
            const auto& cp = result.checkpoints[p][c];
            for (std::size_t trial = 0; trial < cp.configs.size(); ++trial) {
                char hex[20];
                std::snprintf(hex, sizeof(hex), "%llx",
                              static_cast<unsigned long long>(cp.configs[trial]));
                csv.row({result.process_names[p], io::num(static_cast<long>(trial)),
                         io::num(cp.t), hex, io::num(cp.energies[trial]),
                         io::num(cp.ext_grad_l1[trial]),
                         p == 0 ? "" : io::num(cp.pair_grad_l1[trial]),
                         io::num(cp.grad_err_integral[trial])});
            }
        }
    }
    return csv.str();
}

}  // namespace pimnet
