#include <algorithm>
#include <cctype>
#include <charconv>
#include <sstream>

#include <openssl/evp.h>

#include "cattab/cli.hpp"
#include "cattab/errors.hpp"

namespace cattab::cli {

namespace {

std::string location(std::size_t line, std::size_t column) {
    return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

std::string trim(std::string_view s) {
    auto begin = s.find_first_not_of(" \t");
    if (begin == std::string_view::npos) return {};
    auto end = s.find_last_not_of(" \t");
    return std::string(s.substr(begin, end - begin + 1));
}

// Plain digits, or comma-grouped digits ("2,892") when the field was quoted.
long long parse_count(const std::string& raw, bool quoted, std::size_t line, std::size_t column) {
    const std::string field = trim(raw);
    auto fail = [&](const std::string& why) {
        throw InputError("invalid count '" + raw + "' at " + location(line, column) + ": " + why);
    };
    if (field.empty()) fail("empty cell");
    if (field.front() == '-') fail("counts must be nonnegative");
    std::string digits;
    if (quoted && field.find(',') != std::string::npos) {
        std::size_t group = 0;
        bool first = true;
        for (char c : field) {
            if (c == ',') {
                if ((first && (group == 0 || group > 3)) || (!first && group != 3)) fail("malformed digit grouping");
                first = false;
                group = 0;
            } else if (std::isdigit(static_cast<unsigned char>(c))) {
                digits += c;
                ++group;
            } else {
                fail("not an integer");
            }
        }
        if (group != 3) fail("malformed digit grouping");
    } else {
        digits = field;
    }
    long long value = 0;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
    if (ec != std::errc() || ptr != digits.data() + digits.size()) fail("not an integer");
    return value;
}

std::string quote_if_needed(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos && trim(s) == s) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

}  // namespace

std::vector<CsvRow> parse_csv(std::string_view text) {
    if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);
    std::vector<CsvRow> rows;
    CsvRow row;
    std::string field;
    bool in_quotes = false;
    bool field_quoted = false;
    bool after_quote = false;
    std::size_t line = 1;
    std::size_t row_line = 1;

    auto end_field = [&] {
        row.fields.push_back(field);
        row.quoted.push_back(field_quoted);
        field.clear();
        field_quoted = false;
        after_quote = false;
    };
    auto end_row = [&] {
        end_field();
        const bool blank = row.fields.size() == 1 && !row.quoted[0] && trim(row.fields[0]).empty();
        if (!blank) {
            row.line = row_line;
            rows.push_back(std::move(row));
        }
        row = CsvRow{};
        row_line = line;
    };

    for (std::size_t k = 0; k < text.size(); ++k) {
        const char c = text[k];
        if (in_quotes) {
            if (c == '"') {
                if (k + 1 < text.size() && text[k + 1] == '"') {
                    field += '"';
                    ++k;
                } else {
                    in_quotes = false;
                    after_quote = true;
                }
            } else {
                if (c == '\n') ++line;
                field += c;
            }
            continue;
        }
        if (c == ',') {
            end_field();
        } else if (c == '\n' || c == '\r') {
            if (c == '\r' && k + 1 < text.size() && text[k + 1] == '\n') ++k;
            ++line;
            end_row();
        } else if (c == '"') {
            if (!trim(field).empty() || after_quote) {
                throw InputError("unexpected quote at " + location(line, row.fields.size() + 1));
            }
            field.clear();
            in_quotes = true;
            field_quoted = true;
        } else if (after_quote) {
            if (c != ' ' && c != '\t') {
                throw InputError("text after closing quote at " + location(line, row.fields.size() + 1));
            }
        } else {
            field += c;
        }
    }
    if (in_quotes) throw InputError("unterminated quoted field starting on line " + std::to_string(row_line));
    if (!field.empty() || !row.fields.empty() || field_quoted) end_row();
    return rows;
}

ContingencyTable parse_counts_csv(std::string_view text) {
    const auto rows = parse_csv(text);
    if (rows.empty()) throw InputError("empty counts file");
    const auto& header = rows.front();
    if (header.fields.size() < 3) {
        throw InputError("header on line " + std::to_string(header.line) +
                         " needs a corner cell and at least 2 column labels");
    }
    std::vector<std::string> col_labels;
    for (std::size_t k = 1; k < header.fields.size(); ++k) {
        std::string label = trim(header.fields[k]);
        if (label.empty()) throw InputError("empty column label at " + location(header.line, k + 1));
        col_labels.push_back(std::move(label));
    }
    if (rows.size() < 3) throw InputError("at least 2 rows required");

    const auto width = header.fields.size();
    CountMatrix counts(static_cast<Eigen::Index>(rows.size() - 1), static_cast<Eigen::Index>(width - 1));
    std::vector<std::string> row_labels;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.fields.size() != width) {
            throw InputError("ragged row on line " + std::to_string(row.line) + ": expected " +
                             std::to_string(width) + " fields, found " + std::to_string(row.fields.size()));
        }
        std::string label = trim(row.fields[0]);
        if (label.empty()) throw InputError("empty row label at " + location(row.line, 1));
        row_labels.push_back(std::move(label));
        for (std::size_t c = 1; c < width; ++c) {
            counts(Eigen::Index(r - 1), Eigen::Index(c - 1)) = parse_count(row.fields[c], row.quoted[c], row.line, c + 1);
        }
    }
    try {
        return ContingencyTable(std::move(counts), std::move(row_labels), std::move(col_labels));
    } catch (const DomainError& e) {
        throw InputError(e.what());
    }
}

RecordSet parse_records_csv(std::string_view text) {
    const auto rows = parse_csv(text);
    if (rows.empty()) throw InputError("empty records file");
    if (rows.front().fields.size() != 2) {
        throw InputError("records header on line " + std::to_string(rows.front().line) +
                         " must have exactly 2 column names");
    }
    RecordSet records;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.fields.size() != 2) {
            throw InputError("record on line " + std::to_string(row.line) + " has " +
                             std::to_string(row.fields.size()) + " fields, expected 2");
        }
        Record rec{trim(row.fields[0]), trim(row.fields[1])};
        if (rec.row.empty()) throw InputError("empty category at " + location(row.line, 1));
        if (rec.col.empty()) throw InputError("empty category at " + location(row.line, 2));
        records.push_back(std::move(rec));
    }
    if (records.empty()) throw InputError("records file has a header but no records");
    return records;
}

std::string format_counts_csv(const ContingencyTable& table) {
    std::ostringstream out;
    for (const auto& label : table.col_labels()) out << ',' << quote_if_needed(label);
    out << '\n';
    for (Eigen::Index i = 0; i < table.rows(); ++i) {
        out << quote_if_needed(table.row_labels()[std::size_t(i)]);
        for (Eigen::Index j = 0; j < table.cols(); ++j) out << ',' << table.count(i, j);
        out << '\n';
    }
    return out.str();
}

std::string table_digest(const ContingencyTable& table) {
    std::string canonical = format_counts_csv(table);
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(canonical.data(), canonical.size(), md, &len, EVP_sha256(), nullptr);
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int k = 0; k < len; ++k) {
        out += hex[md[k] >> 4];
        out += hex[md[k] & 0xF];
    }
    return "sha256:" + out;
}

}  // namespace cattab::cli
