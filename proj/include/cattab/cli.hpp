#ifndef CATTAB_CLI_HPP
#define CATTAB_CLI_HPP

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "cattab/table.hpp"

namespace cattab::cli {

inline constexpr std::string_view kToolVersion = "1.0.0";

enum ExitCode : int { kOk = 0, kInputError = 2, kDomainError = 3 };

struct CsvRow {
    std::size_t line = 0;  // 1-based physical line where the row starts
    std::vector<std::string> fields;
    std::vector<bool> quoted;
};

/// RFC 4180 parsing: quoted fields may contain commas, doubled quotes and
/// newlines. Blank lines are skipped. Throws InputError with line/column.
std::vector<CsvRow> parse_csv(std::string_view text);

/// Count-matrix CSV: header row of column labels (first cell is a corner
/// label, usually blank), then one row per category: label, counts...
/// Quoted counts may use thousands separators ("2,892").
ContingencyTable parse_counts_csv(std::string_view text);

/// Two labeled columns, one record per line; first column is the row variable.
RecordSet parse_records_csv(std::string_view text);

/// Inverse of parse_counts_csv (labels quoted when needed).
std::string format_counts_csv(const ContingencyTable& table);

/// Hex SHA-256 of a canonical serialization of labels and counts.
std::string table_digest(const ContingencyTable& table);

struct RunResult {
    int exit_code = kOk;
    std::string out;
    std::string err;
};

/// Runs one `cattab` invocation. `args` excludes the program name.
/// `styled` enables ANSI emphasis in text reports.
RunResult run(const std::vector<std::string>& args, bool styled = false);

}  // namespace cattab::cli

#endif  // CATTAB_CLI_HPP
