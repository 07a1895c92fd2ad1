#include "dfano/output.hpp"

#include "dfano/errors.hpp"

#include <json.hpp>

#include <charconv>
#include <cstdio>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

namespace dfano
{
std::string tool_version()
{
    return DFANO_VERSION;
}

std::string format_double(double v)
{
    if (std::isnan(v))
        return "nan";
    char buf[32];
    const int n = std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf, static_cast<std::size_t>(n));
}

namespace
{
void check_table(const OutputTable& table)
{
    for (const auto& row : table.rows)
        if (row.size() != table.columns.size())
            throw std::invalid_argument("output row width does not match the column count");
}

std::vector<std::string> split_lines(const std::string& text)
{
    std::vector<std::string> lines;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);)
        lines.push_back(line);
    return lines;
}
} // namespace

void write_csv(std::ostream& out, const OutputMetadata& meta, const OutputTable& table)
{
    check_table(table);
    out << "# tool: dfano " << tool_version() << '\n';
    out << "# method: " << meta.method << '\n';
    if (meta.timestamp)
        out << "# timestamp: " << *meta.timestamp << '\n';
    for (const auto& note : meta.notes)
        out << "# note: " << note << '\n';
    out << "# config:\n";
    for (const auto& line : split_lines(meta.config_text))
        out << "#   " << line << '\n';

    for (std::size_t c = 0; c < table.columns.size(); ++c)
        out << (c ? "," : "") << table.columns[c];
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c)
            out << (c ? "," : "") << format_double(row[c]);
        out << '\n';
    }
}

void write_json_lines(std::ostream& out, const OutputMetadata& meta, const OutputTable& table)
{
    check_table(table);
    nlohmann::ordered_json header;
    header["record"] = "header";
    header["tool"] = "dfano";
    header["version"] = tool_version();
    header["method"] = meta.method;
    if (meta.timestamp)
        header["timestamp"] = *meta.timestamp;
    header["notes"] = meta.notes;
    header["columns"] = table.columns;
    header["config"] = meta.config_text;
    out << header.dump() << '\n';

    for (const auto& row : table.rows) {
        nlohmann::ordered_json rec;
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (std::isnan(row[c]))
                rec[table.columns[c]] = nullptr;
            else
                rec[table.columns[c]] = row[c];
        }
        out << rec.dump() << '\n';
    }
}

void write_table(std::ostream& out, OutputFormat format, const OutputMetadata& meta,
                 const OutputTable& table)
{
    if (format == OutputFormat::Csv)
        write_csv(out, meta, table);
    else
        write_json_lines(out, meta, table);
}

CsvContent read_csv(std::istream& in)
{
    CsvContent content;
    bool have_columns = false;
    for (std::string line; std::getline(in, line);) {
        if (line.empty())
            continue;
        if (line[0] == '#') {
            content.header.push_back(line.size() > 2 ? line.substr(2) : std::string());
            continue;
        }
        std::vector<std::string> fields;
        std::istringstream ls(line);
        for (std::string f; std::getline(ls, f, ',');)
            fields.push_back(f);
        if (!have_columns) {
            content.table.columns = fields;
            have_columns = true;
            continue;
        }
        std::vector<double> row;
        for (const auto& f : fields) {
            if (f == "nan") {
                row.push_back(std::nan(""));
                continue;
            }
            double v = 0.0;
            const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
            if (ec != std::errc() || ptr != f.data() + f.size())
                throw std::invalid_argument("not a number in CSV row: '" + f + "'");
            row.push_back(v);
        }
        if (row.size() != content.table.columns.size())
            throw std::invalid_argument("CSV row width does not match the column line");
        content.table.rows.push_back(std::move(row));
    }
    if (!have_columns)
        throw std::invalid_argument("CSV has no column line");
    return content;
}

std::string embedded_config(const CsvContent& content)
{
    std::string text;
    bool inside = false;
    for (const auto& line : content.header) {
        if (!inside) {
            inside = line == "config:";
            continue;
        }
        if (line.rfind("  ", 0) != 0)
            break;
        text += line.substr(2) + '\n';
    }
    return text;
}

namespace
{
std::string quote(const std::string& s)
{
    std::string out = "'";
    for (char c : s)
        out += c == '\'' ? std::string("''") : std::string(1, c);
    return out + "'";
}
} // namespace

std::string plot_script(const std::string& data_path)
{
    std::ifstream in(data_path);
    if (!in)
        throw ConfigError("plotscript: cannot open data file '" + data_path + "'");
    CsvContent content;
    try {
        content = read_csv(in);
    } catch (const std::invalid_argument& e) {
        throw ConfigError("plotscript: " + std::string(e.what()));
    }
    const auto& cols = content.table.columns;
    const std::string stem = std::filesystem::path(data_path).replace_extension().string();

    std::ostringstream s;
    s << "# gnuplot script for " << data_path << "\n";
    s << "set datafile separator ','\n";
    s << "set datafile commentschars '#'\n";
    s << "set terminal pngcairo size 900,600\n";
    s << "set xlabel 'omega'\n";
    s << "set ylabel 'W(omega)'\n";
    s << "set key outside right\n";
    s << "data = " << quote(data_path) << "\n";

    const bool sweep = !cols.empty() && cols.front() == "param_value";
    if (!sweep) {
        s << "set output " << quote(stem + ".png") << "\n";
        s << "plot ";
        for (std::size_t c = 1; c < cols.size(); ++c)
            s << (c > 1 ? ", \\\n     " : "") << "data using 1:" << c + 1
              << " with lines lw 2 title columnheader(" << c + 1 << ")";
        s << "\n";
        return s.str();
    }

    // Sweep file: param_value, omega, then one W column per method.
    std::set<double> values;
    for (const auto& row : content.table.rows)
        values.insert(row.front());
    s << "values = \"";
    bool first = true;
    for (double v : values) {
        s << (first ? "" : " ") << format_double(v);
        first = false;
    }
    s << "\"\n";
    for (std::size_t c = 2; c < cols.size(); ++c) {
        const std::string col = std::to_string(c + 1);
        s << "set output " << quote(stem + "_" + cols[c] + ".png") << "\n";
        s << "set title " << quote(cols[c]) << "\n";
        s << "plot for [v in values] data every ::1 using 2:($1 == real(v) ? $" << col
          << " : 1/0) with lines title sprintf('" << cols[0] << " = %s', v)\n";
        s << "set output " << quote(stem + "_" + cols[c] + "_surface.png") << "\n";
        s << "set ylabel " << quote(cols[0]) << "\n";
        s << "set zlabel 'W'\n";
        s << "splot data every ::1 using 2:1:" << col << " with points pt 7 ps 0.3 lc palette notitle\n";
        s << "set ylabel 'W(omega)'\n";
    }
    return s.str();
}

} // namespace dfano
