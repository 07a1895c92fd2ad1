#ifndef DFANO_OUTPUT_HPP
#define DFANO_OUTPUT_HPP

#include "dfano/config.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace dfano
{
std::string tool_version();

// Header of every data file. config_text is the complete resolved config.
struct OutputMetadata
{
    std::string method;                    // analytic | oracle | both | sweep:<methods>
    std::string config_text;
    std::optional<std::string> timestamp;  // omitted when suppressed
    std::vector<std::string> notes;        // resolved oracle settings, diagnostics, failed cells
};

// Rows with a fixed column set. Empty cells (a failed sweep cell) are NaN.
struct OutputTable
{
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

// CSV: "# key: value" header lines (the config embedded line by line under
// "# config:"), a column line, then rows with 17 significant digits.
void write_csv(std::ostream& out, const OutputMetadata& meta, const OutputTable& table);

// One JSON object per line: a header record, then one record per row.
void write_json_lines(std::ostream& out, const OutputMetadata& meta, const OutputTable& table);

void write_table(std::ostream& out, OutputFormat format, const OutputMetadata& meta,
                 const OutputTable& table);

// Inverse of write_csv for the numeric part; header lines are returned
// verbatim (without the leading "# ").
struct CsvContent
{
    std::vector<std::string> header;
    OutputTable table;
};
CsvContent read_csv(std::istream& in);

// Text of the config embedded in a CSV header, or empty when absent.
std::string embedded_config(const CsvContent& content);

std::string format_double(double v);

// gnuplot script rendering a data file written by write_csv: one curve per
// W column for single spectra, one curve per parameter value (plus a surface
// view) for sweep files. Throws ConfigError if the file is missing.
std::string plot_script(const std::string& data_path);

} // namespace dfano

#endif
