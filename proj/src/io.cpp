#include "grushinlab/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "grushinlab/errors.hpp"

namespace grushinlab {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void atomic_write_file(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) {
        fs::create_directories(target.parent_path());
    }
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw DomainError("atomic_write_file: cannot open " + tmp.string());
        }
        out << content;
        if (!out.flush()) {
            throw DomainError("atomic_write_file: write failed for " + tmp.string());
        }
    }
    fs::rename(tmp, target);
}

double CsvTable::meta_number(const std::string& key) const {
    auto it = metadata.find(key);
    if (it == metadata.end()) {
        throw DomainError("CsvTable: missing metadata key '" + key + "'");
    }
    return std::stod(it->second);
}

std::string CsvTable::meta_string(const std::string& key) const {
    auto it = metadata.find(key);
    if (it == metadata.end()) {
        throw DomainError("CsvTable: missing metadata key '" + key + "'");
    }
    return it->second;
}

int CsvTable::column_index(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (columns[i] == name) return static_cast<int>(i);
    }
    throw DomainError("CsvTable: missing column '" + name + "'");
}

std::string render_csv(const CsvTable& table) {
    std::ostringstream out;
    for (const auto& [k, v] : table.metadata) {
        out << "# " << k << "=" << v << "\n";
    }
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
        if (i) out << ",";
        out << table.columns[i];
    }
    out << "\n";
    for (const auto& row : table.rows) {
        if (row.size() != table.columns.size()) {
            throw DomainError("render_csv: row width mismatch");
        }
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << ",";
            out << format_double(row[i]);
        }
        out << "\n";
    }
    return out.str();
}

CsvTable parse_csv(const std::string& content) {
    CsvTable table;
    std::istringstream in(content);
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::string body = line.substr(1);
            const std::size_t start = body.find_first_not_of(' ');
            if (start == std::string::npos) continue;
            body = body.substr(start);
            const std::size_t eq = body.find('=');
            if (eq != std::string::npos) {
                table.metadata[body.substr(0, eq)] = body.substr(eq + 1);
            }
            continue;
        }
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (!have_header) {
            table.columns = cells;
            have_header = true;
            continue;
        }
        std::vector<double> row;
        row.reserve(cells.size());
        for (const auto& c : cells) row.push_back(std::stod(c));
        if (row.size() != table.columns.size()) {
            throw DomainError("parse_csv: row width mismatch");
        }
        table.rows.push_back(std::move(row));
    }
    if (!have_header) {
        throw DomainError("parse_csv: no header row");
    }
    return table;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DomainError("read_file: cannot open " + path);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

CsvTable read_csv_file(const std::string& path) {
    return parse_csv(read_file(path));
}

} // namespace grushinlab
