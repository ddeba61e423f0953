#pragma once

#include <map>
#include <string>
#include <vector>

namespace grushinlab {

// Shortest round-trip-safe decimal form (17 significant digits).
std::string format_double(double v);

// Writes content to path atomically: temp file in the same directory, then rename.
void atomic_write_file(const std::string& path, const std::string& content);

// CSV table with '#'-prefixed "key=value" metadata lines before the header row.
struct CsvTable {
    std::map<std::string, std::string> metadata;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    double meta_number(const std::string& key) const;
    std::string meta_string(const std::string& key) const;
    int column_index(const std::string& name) const;
};

std::string render_csv(const CsvTable& table);
CsvTable parse_csv(const std::string& content);
CsvTable read_csv_file(const std::string& path);
std::string read_file(const std::string& path);

} // namespace grushinlab
