#include "dicke/app/output.hpp"

#include <chrono>

#include <fmt/chrono.h>
#include <fmt/format.h>
#include <json.hpp>

#include "dicke/app/cache.hpp"

#ifndef DICKE_VERSION
#define DICKE_VERSION "0.0.0"
#endif

namespace dicke::app {

std::string fmt_real(double v) { return fmt::format("{:.17g}", v); }

const char* code_version() { return DICKE_VERSION; }

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add_row(std::vector<std::string> cells) {
    if (cells.size() != header_.size())
        throw std::logic_error(fmt::format("CSV row has {} cells, header has {}", cells.size(), header_.size()));
    rows_.push_back(std::move(cells));
}

std::string CsvTable::render() const {
    std::string out = fmt::format("{}\n", fmt::join(header_, ","));
    for (const auto& r : rows_) out += fmt::format("{}\n", fmt::join(r, ","));
    return out;
}

std::filesystem::path write_result(const std::filesystem::path& dir, const std::string& name, const CsvTable& table,
                                   const RunConfig& cfg, const RunMeta& meta) {
    std::filesystem::create_directories(dir);
    const auto csv = dir / (name + ".csv");
    write_atomic(csv, table.render());

    nlohmann::ordered_json j;
    j["command"] = meta.command;
    j["config_hash"] = config_hash(cfg);
    j["code_version"] = code_version();
    j["written_utc"] = fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", fmt::gmtime(std::chrono::system_clock::to_time_t(
                                                                std::chrono::system_clock::now())));
    j["rows"] = table.rows();
    j["columns"] = table.header();
    j["config"] = emit_canonical(cfg);
    auto& notes = j["notes"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : meta.notes) notes[k] = v;
    auto side = csv;
    side += ".meta.json";
    write_atomic(side, j.dump(2) + "\n");
    return csv;
}

}  // namespace dicke::app
