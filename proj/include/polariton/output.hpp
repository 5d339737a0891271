#pragma once

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace polariton {

std::string header_comment(const std::string& config_hash);

// Shortest round-trip text for a double.
std::string format_number(double x);

using CsvCell = std::variant<double, long long, std::string>;

class CsvWriter {
public:
    // Extra notes become further '#' lines between the header and the column names.
    CsvWriter(const std::filesystem::path& path, const std::string& config_hash, const std::string& columns,
              const std::vector<std::string>& notes = {});
    void row(std::initializer_list<CsvCell> cells);
    void close();

private:
    std::filesystem::path path_;
    std::ofstream out_;
};

// Pretty JSON with the provenance header stored under "_header".
void write_json(const std::filesystem::path& path, const std::string& config_hash, nlohmann::json body);

}  // namespace polariton
