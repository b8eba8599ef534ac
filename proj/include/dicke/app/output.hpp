#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "dicke/app/config.hpp"

namespace dicke::app {

/// Full round-trip representation of a double.
std::string fmt_real(double v);

class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header);

    void add_row(std::vector<std::string> cells);
    const std::vector<std::string>& header() const { return header_; }
    std::size_t rows() const { return rows_.size(); }
    std::string render() const;

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

/// Sidecar content written next to every CSV as `<name>.meta.json`.
struct RunMeta {
    std::string command;
    std::vector<std::pair<std::string, std::string>> notes;  // free-form diagnostics
};

/// Writes `<dir>/<name>.csv` and its sidecar atomically; returns the CSV path.
std::filesystem::path write_result(const std::filesystem::path& dir, const std::string& name, const CsvTable& table,
                                   const RunConfig& cfg, const RunMeta& meta);

const char* code_version();

}  // namespace dicke::app
