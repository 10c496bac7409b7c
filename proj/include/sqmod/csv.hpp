#ifndef SQMOD_CSV_HPP
#define SQMOD_CSV_HPP

#include <cstdio>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sqmod {

class CsvError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Shortest round-trip decimal form; output is locale-free and identical
/// across runs, which the byte-determinism contract relies on.
std::string format_double(double v);

/// Writer for the versioned CSV layout:
///   # sqmod-csv v1 <schema>
///   col_a,col_b,...
///   <rows>
/// Comment lines (leading '#') may appear after the data, e.g. appended fit
/// summaries.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::string& schema,
              std::span<const std::string> columns);
    ~CsvWriter();
    CsvWriter(const CsvWriter&) = delete;
    CsvWriter& operator=(const CsvWriter&) = delete;

    void write_row(std::span<const double> values);
    void write_raw_row(std::span<const std::string> cells);
    void write_comment(const std::string& text);

private:
    std::FILE* file_ = nullptr;
    std::size_t n_columns_ = 0;
};

struct CsvTable {
    std::string schema;
    int version = 0;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    std::size_t column_index(const std::string& name) const;
    double value(std::size_t row, std::size_t col) const;
    std::vector<double> column_as_double(const std::string& name) const;
};

/// Parses a versioned CSV. Rejects files whose version is not 1 or whose
/// schema does not match expected_schema (when non-empty).
CsvTable read_csv(const std::filesystem::path& path, const std::string& expected_schema = "");

} // namespace sqmod

#endif
