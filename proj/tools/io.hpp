#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace fraccalc::cli {

using json = nlohmann::ordered_json;

/// Malformed command line, config or input file.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string trim(const std::string& s);
std::vector<std::string> split(const std::string& s, char sep);

/// Decimal number, or 2^k written as "2^-10".
double parse_number(const std::string& text, const std::string& what);
std::size_t parse_count(const std::string& text, const std::string& what);
std::uint64_t parse_seed(const std::string& text, const std::string& what);
std::vector<double> parse_numbers(const std::string& text, char sep, const std::string& what);
/// "1.5", "2i", "-1-0.5i", "3+i".
std::complex<double> parse_complex(const std::string& text, const std::string& what);

/// Comma-separated file with a mandatory header row; '#' lines and blank lines are skipped.
struct CsvData {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};
CsvData read_csv(const std::string& path);

std::string format_number(double x);

using Cell = std::variant<double, std::string>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

struct Output {
    json meta = json::object();  ///< command-specific metadata
    Table table;
    json report;                 ///< optional structured body; replaces the table in JSON output
    std::string default_format = "csv";
};

/// CSV: '# key=value' comment header (version, command, config, meta), column header, rows.
/// JSON: {"meta": {...}, "data": {column: [...]}} or {"meta": {...}, "report": {...}}.
void write_output(const Output& output, const json& config, const std::string& format, std::ostream& os);

}  // namespace fraccalc::cli
