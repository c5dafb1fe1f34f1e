/**
 * @file csv.hpp
 * @brief Byte-stable CSV output. Numbers use the shortest decimal string that
 * round-trips to the same double.
 */
#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace beamflutter {

/// Shortest round-trip representation; "nan", "inf" and "-inf" for non-finite values.
std::string format_number(double v);

class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header);

    void add_row(std::vector<std::string> cells);
    void add_row(const std::vector<double>& values);

    std::size_t rows() const noexcept { return rows_.size(); }
    std::string str() const;
    void write(const std::filesystem::path& path) const;

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

} // namespace beamflutter
