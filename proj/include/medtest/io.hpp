#pragma once

// Delimited-text input and run manifests for the command-line tool.

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "medtest/mediation.hpp"
#include "medtest/rp.hpp"

namespace medtest {

/// Numeric CSV with a header row naming the columns.
struct CsvTable {
    std::vector<std::string> names;
    std::vector<std::vector<double>> columns;

    const std::vector<double>& column(const std::string& name) const;
    std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }
};

/// Throws malformed_file with the offending line number on parse errors.
CsvTable parse_csv(const std::string& text);
CsvTable read_csv(const std::filesystem::path& path);

MediationData mediation_data(const CsvTable& table, const std::string& y, const std::string& m,
                             const std::string& x, const std::vector<std::string>& controls = {});

/// Reads what RPGrid::to_delimited writes.
RPGrid parse_rp_grid(const std::string& text);
RPGrid read_rp_grid(const std::filesystem::path& path);

struct RunManifest {
    std::string command;
    std::vector<std::pair<std::string, std::string>> parameters;
    std::vector<std::pair<std::string, std::uint64_t>> seeds;
    std::vector<std::pair<std::string, double>> tolerances;
    std::vector<std::string> outputs;
    std::string version;

    std::string to_json() const;
};

std::string library_version();

/// Writes `<output>.manifest.json` and returns its path.
std::filesystem::path write_manifest(const RunManifest& manifest, const std::filesystem::path& output);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace medtest
