#include "beamflutter/csv.hpp"

#include "beamflutter/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

namespace beamflutter {

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add_row(std::vector<std::string> cells) {
    if (cells.size() != header_.size())
        throw DimensionMismatch("csv row has " + std::to_string(cells.size()) + " cells, header has " +
                                std::to_string(header_.size()));
    rows_.push_back(std::move(cells));
}

void CsvTable::add_row(const std::vector<double>& values) {
    std::vector<std::string> cells;
    cells.reserve(values.size());
    for (double v : values) cells.push_back(format_number(v));
    add_row(std::move(cells));
}

std::string CsvTable::str() const {
    std::string out;
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out += ',';
            out += cells[i];
        }
        out += '\n';
    };
    line(header_);
    for (const auto& r : rows_) line(r);
    return out;
}

void CsvTable::write(const std::filesystem::path& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open " + path.string() + " for writing");
    const std::string s = str();
    f.write(s.data(), static_cast<std::streamsize>(s.size()));
    if (!f) throw Error("write to " + path.string() + " failed");
}

} // namespace beamflutter
