#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "msgl/error.hpp"

namespace msgl {

inline constexpr const char* kMetricsHeader =
    "step,d_gan_loss,g_gan_loss,ss_component,g_ss_component,modes_covered,mode_kl,wall_ms";

/// One evaluation-cadence row of the training log. Optional fields are
/// emitted as empty cells: mode columns when the dataset has no mode spec,
/// wall_ms when wall-clock logging is disabled (the bit-reproducible mode).
struct MetricsRow {
    std::size_t step = 0;
    double d_gan_loss = 0.0;
    double g_gan_loss = 0.0;
    double ss_component = 0.0;
    double g_ss_component = 0.0;
    std::optional<std::size_t> modes_covered;
    std::optional<double> mode_kl;
    std::optional<std::int64_t> wall_ms;

    friend bool operator==(const MetricsRow&, const MetricsRow&) = default;
};

namespace detail {

inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline void atomic_write(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open '" + tmp + "' for writing");
        out << content;
        if (!out.flush()) throw IoError("write failed for '" + tmp + "'");
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        throw IoError("cannot rename '" + tmp + "' to '" + path + "'");
    }
}

}  // namespace detail

inline std::string format_metrics_row(const MetricsRow& r) {
    std::ostringstream out;
    out << r.step << ',' << detail::format_double(r.d_gan_loss) << ','
        << detail::format_double(r.g_gan_loss) << ','
        << detail::format_double(r.ss_component) << ','
        << detail::format_double(r.g_ss_component) << ',';
    if (r.modes_covered) out << *r.modes_covered;
    out << ',';
    if (r.mode_kl) out << detail::format_double(*r.mode_kl);
    out << ',';
    if (r.wall_ms) out << *r.wall_ms;
    return out.str();
}

inline MetricsRow parse_metrics_row(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) cells.push_back(cell);
    while (cells.size() < 8) cells.emplace_back();
    if (cells.size() != 8) throw IoError("metrics row has " + std::to_string(cells.size()) +
                                         " cells: " + line);
    MetricsRow r;
    r.step = std::stoull(cells[0]);
    r.d_gan_loss = std::stod(cells[1]);
    r.g_gan_loss = std::stod(cells[2]);
    r.ss_component = std::stod(cells[3]);
    r.g_ss_component = std::stod(cells[4]);
    if (!cells[5].empty()) r.modes_covered = std::stoull(cells[5]);
    if (!cells[6].empty()) r.mode_kl = std::stod(cells[6]);
    if (!cells[7].empty()) r.wall_ms = std::stoll(cells[7]);
    return r;
}

/// One-shot write: header plus rows, strictly increasing in step, written
/// through a temp file and renamed into place.
inline void write_metrics(const std::vector<MetricsRow>& rows, const std::string& path) {
    std::ostringstream out;
    out << kMetricsHeader << '\n';
    std::size_t last = 0;
    bool first = true;
    for (const MetricsRow& r : rows) {
        if (!first && r.step <= last) {
            throw ContractError("write_metrics: steps must be strictly increasing");
        }
        first = false;
        last = r.step;
        out << format_metrics_row(r) << '\n';
    }
    detail::atomic_write(path, out.str());
}

inline std::vector<MetricsRow> read_metrics(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw IoError("empty metrics file '" + path + "'");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kMetricsHeader) throw IoError("unexpected metrics header: " + line);
    std::vector<MetricsRow> rows;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        rows.push_back(parse_metrics_row(line));
    }
    return rows;
}

/// Streaming writer used by the trainer so partial logs survive an abort.
/// Appends to an existing file (validating its header) or starts a new one.
class MetricsWriter {
public:
    explicit MetricsWriter(const std::string& path) : path_(path) {
        bool has_header = false;
        {
            std::ifstream probe(path, std::ios::binary);
            std::string line;
            if (probe && std::getline(probe, line)) {
                if (!line.empty() && line.back() == '\r') line.pop_back();
                if (line != kMetricsHeader) {
                    throw IoError("existing file '" + path + "' is not a metrics log");
                }
                has_header = true;
            }
        }
        out_.open(path, std::ios::binary | std::ios::app);
        if (!out_) throw IoError("cannot open '" + path + "' for appending");
        if (!has_header) out_ << kMetricsHeader << '\n';
        out_.flush();
    }

    void append(const MetricsRow& row) {
        out_ << format_metrics_row(row) << '\n';
        if (!out_.flush()) throw IoError("write failed for '" + path_ + "'");
    }

private:
    std::string path_;
    std::ofstream out_;
};

}  // namespace msgl
