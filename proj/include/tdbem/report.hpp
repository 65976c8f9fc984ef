#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace tdbem {

/// Numeric table with named columns.
struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    void add_row(std::vector<double> row);
    /// Column by name; throws when absent.
    std::vector<double> column(const std::string& name) const;
};

void write_csv(const Table& table, const std::filesystem::path& path);
Table read_csv(const std::filesystem::path& path);

struct RunManifest {
    std::map<std::string, std::string> config;
    std::map<std::string, double> timings;  // seconds
    std::map<std::string, double> metrics;
};

/// `<dir>/<table>.csv` for every table and `<dir>/manifest.json` with the config echo,
/// the version string and the timings. Creates dir. Returns the written paths.
std::vector<std::filesystem::path> emit_report(const std::vector<Table>& tables, const RunManifest& manifest,
                                               const std::filesystem::path& dir);

/// Library version, `git describe` style when built from a checkout.
std::string version_string();

}  // namespace tdbem
