#include "sqmod/csv.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace sqmod {

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::string& schema,
                     std::span<const std::string> columns)
    : n_columns_(columns.size()) {
    file_ = std::fopen(path.string().c_str(), "wb");
    if (!file_) throw CsvError("cannot open " + path.string() + " for writing");
    std::fprintf(file_, "# sqmod-csv v1 %s\n", schema.c_str());
    for (std::size_t i = 0; i < columns.size(); ++i)
        std::fprintf(file_, "%s%s", i ? "," : "", columns[i].c_str());
    std::fputc('\n', file_);
}

CsvWriter::~CsvWriter() {
    if (file_) std::fclose(file_);
}

void CsvWriter::write_row(std::span<const double> values) {
    if (values.size() != n_columns_) throw CsvError("row width does not match header");
    for (std::size_t i = 0; i < values.size(); ++i)
        std::fprintf(file_, "%s%s", i ? "," : "", format_double(values[i]).c_str());
    std::fputc('\n', file_);
}

void CsvWriter::write_raw_row(std::span<const std::string> cells) {
    if (cells.size() != n_columns_) throw CsvError("row width does not match header");
    for (std::size_t i = 0; i < cells.size(); ++i)
        std::fprintf(file_, "%s%s", i ? "," : "", cells[i].c_str());
    std::fputc('\n', file_);
}

void CsvWriter::write_comment(const std::string& text) {
    std::fprintf(file_, "# %s\n", text.c_str());
}

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, sep)) out.push_back(cell);
    return out;
}

} // namespace

std::size_t CsvTable::column_index(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == name) return i;
    throw CsvError("column not found: " + name);
}

double CsvTable::value(std::size_t row, std::size_t col) const {
    const std::string& cell = rows.at(row).at(col);
    double v = 0.0;
    const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (res.ec != std::errc{}) throw CsvError("non-numeric cell: " + cell);
    return v;
}

std::vector<double> CsvTable::column_as_double(const std::string& name) const {
    const std::size_t c = column_index(name);
    std::vector<double> out;
    out.reserve(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) out.push_back(value(r, c));
    return out;
}

CsvTable read_csv(const std::filesystem::path& path, const std::string& expected_schema) {
    std::ifstream in(path);
    if (!in) throw CsvError("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw CsvError("empty file: " + path.string());

    CsvTable table;
    int version = 0;
    char schema_buf[128] = {};
    if (std::sscanf(line.c_str(), "# sqmod-csv v%d %127s", &version, schema_buf) != 2)
        throw CsvError("missing sqmod-csv version header in " + path.string());
    table.version = version;
    table.schema = schema_buf;
    if (version != 1)
        throw CsvError("unsupported sqmod-csv version " + std::to_string(version) + " in "
                       + path.string());
    if (!expected_schema.empty() && table.schema != expected_schema)
        throw CsvError("expected schema '" + expected_schema + "' but found '" + table.schema
                       + "' in " + path.string());

    if (!std::getline(in, line)) throw CsvError("missing column header in " + path.string());
    table.columns = split(line, ',');

    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        auto cells = split(line, ',');
        if (cells.size() != table.columns.size())
            throw CsvError("ragged row in " + path.string());
        table.rows.push_back(std::move(cells));
    }
    return table;
}

} // namespace sqmod
