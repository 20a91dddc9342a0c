#include "medtest/io.hpp"

#include <charconv>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "medtest/error.hpp"

namespace medtest {

namespace {

std::string trim(std::string_view s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string_view::npos) return {};
    const auto b = s.find_last_not_of(" \t\r");
    std::string out(s.substr(a, b - a + 1));
    if (out.size() >= 2 && out.front() == '"' && out.back() == '"') out = out.substr(1, out.size() - 2);
    return out;
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(trim(std::string_view(line).substr(start, comma == std::string::npos ? std::string::npos : comma - start)));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

double parse_number(const std::string& field, std::size_t line_no) {
    double v = 0.0;
    const char* first = field.data();
    const char* last = first + field.size();
    if (!field.empty() && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) {
        throw Error(ErrorCode::malformed_file, "line " + std::to_string(line_no) + ": not a number: '" + field + "'");
    }
    return v;
}

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::malformed_file, "cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

const std::vector<double>& CsvTable::column(const std::string& name) const {
    for (std::size_t c = 0; c < names.size(); ++c) {
        if (names[c] == name) return columns[c];
    }
    throw Error(ErrorCode::domain_error, "no column named '" + name + "'");
}

CsvTable parse_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    CsvTable table;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto fields = split(line);
        if (table.names.empty()) {
            for (const auto& f : fields) {
                if (f.empty()) throw Error(ErrorCode::malformed_file, "line " + std::to_string(line_no) + ": empty column name");
            }
            table.names = std::move(fields);
            table.columns.resize(table.names.size());
            continue;
        }
        if (fields.size() != table.names.size()) {
            throw Error(ErrorCode::malformed_file, "line " + std::to_string(line_no) + ": expected " +
                                                       std::to_string(table.names.size()) + " fields, found " +
                                                       std::to_string(fields.size()));
        }
        for (std::size_t c = 0; c < fields.size(); ++c) table.columns[c].push_back(parse_number(fields[c], line_no));
    }
    if (table.names.empty()) throw Error(ErrorCode::malformed_file, "no header row");
    return table;
}

CsvTable read_csv(const std::filesystem::path& path) { return parse_csv(slurp(path)); }

MediationData mediation_data(const CsvTable& table, const std::string& y, const std::string& m,
                             const std::string& x, const std::vector<std::string>& controls) {
    auto vec = [&](const std::string& name) {
        const auto& col = table.column(name);
        return Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(col.data(), static_cast<Eigen::Index>(col.size())));
    };
    MediationData data{vec(y), vec(m), vec(x), Eigen::MatrixXd(static_cast<Eigen::Index>(table.rows()),
                                                               static_cast<Eigen::Index>(controls.size()))};
    for (std::size_t c = 0; c < controls.size(); ++c) data.controls.col(static_cast<Eigen::Index>(c)) = vec(controls[c]);
    return data;
}

RPGrid parse_rp_grid(const std::string& text) {
    const CsvTable table = parse_csv(text);
    const std::size_t k = table.names.size() >= 2 ? table.names.size() - 2 : 0;
    if (k < 1 || table.names[k] != "value" || table.names[k + 1] != "error") {
        throw Error(ErrorCode::malformed_file, "expected columns mu1..muK,value,error");
    }
    RPGrid grid;
    for (std::size_t r = 0; r < table.rows(); ++r) {
        std::vector<double> mu;
        for (std::size_t j = 0; j < k; ++j) mu.push_back(table.columns[j][r]);
        grid.mu.emplace_back(std::move(mu));
        grid.values.push_back(table.columns[k][r]);
        grid.errors.push_back(table.columns[k + 1][r]);
    }
    return grid;
}

RPGrid read_rp_grid(const std::filesystem::path& path) { return parse_rp_grid(slurp(path)); }

std::string RunManifest::to_json() const {
    nlohmann::ordered_json j;
    j["command"] = command;
    j["parameters"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : parameters) j["parameters"][k] = v;
    j["seeds"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : seeds) j["seeds"][k] = v;
    j["tolerances"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : tolerances) j["tolerances"][k] = v;
    j["outputs"] = outputs;
    j["version"] = version;
    return j.dump(2) + "\n";
}

std::string library_version() { return MEDTEST_VERSION; }

std::filesystem::path write_manifest(const RunManifest& manifest, const std::filesystem::path& output) {
    std::filesystem::path path = output;
    path += ".manifest.json";
    write_text(path, manifest.to_json());
    return path;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::malformed_file, "cannot write " + path.string());
    out << text;
    if (!out) throw Error(ErrorCode::malformed_file, "failed writing " + path.string());
}

}  // namespace medtest
