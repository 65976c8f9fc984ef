#include "tdbem/report.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#ifndef TDBEM_VERSION
#define TDBEM_VERSION "0.1.0"
#endif

namespace tdbem {

void Table::add_row(std::vector<double> row) {
    if (row.size() != columns.size()) throw std::invalid_argument("table " + name + ": row width does not match");
    rows.push_back(std::move(row));
}

std::vector<double> Table::column(const std::string& c) const {
    for (std::size_t j = 0; j < columns.size(); ++j)
        if (columns[j] == c) {
            std::vector<double> v;
            v.reserve(rows.size());
            for (const auto& r : rows) v.push_back(r[j]);
            return v;
        }
    throw std::invalid_argument("table " + name + ": no column " + c);
}

void write_csv(const Table& table, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    for (std::size_t j = 0; j < table.columns.size(); ++j) out << (j ? "," : "") << table.columns[j];
    out << '\n' << std::setprecision(17);
    for (const auto& r : table.rows) {
        for (std::size_t j = 0; j < r.size(); ++j) out << (j ? "," : "") << r[j];
        out << '\n';
    }
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

Table read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    Table t;
    t.name = path.stem().string();
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path.string() + ": missing header");
    std::stringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) t.columns.push_back(cell);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ls(line);
        while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
        t.add_row(std::move(row));
    }
    return t;
}

std::string version_string() { return TDBEM_VERSION; }

std::vector<std::filesystem::path> emit_report(const std::vector<Table>& tables, const RunManifest& manifest,
                                               const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
    std::vector<std::filesystem::path> written;
    nlohmann::json files = nlohmann::json::array();
    for (const auto& t : tables) {
        const auto p = dir / (t.name + ".csv");
        write_csv(t, p);
        written.push_back(p);
        files.push_back(p.filename().string());
    }
    nlohmann::json j;
    j["version"] = version_string();
    j["config"] = manifest.config;
    j["timings_s"] = manifest.timings;
    j["metrics"] = manifest.metrics;
    j["tables"] = files;
    const auto mp = dir / "manifest.json";
    std::ofstream out(mp);
    if (!out) throw std::runtime_error("cannot write " + mp.string());
    out << j.dump(2) << '\n';
    written.push_back(mp);
    return written;
}

}  // namespace tdbem
