#include "cattab/table.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <utility>

namespace cattab {

namespace {

std::vector<std::string> default_labels(char prefix, Eigen::Index count) {
    std::vector<std::string> labels;
    labels.reserve(static_cast<std::size_t>(count));
    for (Eigen::Index k = 0; k < count; ++k) labels.push_back(prefix + std::to_string(k + 1));
    return labels;
}

void check_labels(const std::vector<std::string>& labels, Eigen::Index expected, const char* axis) {
    if (static_cast<Eigen::Index>(labels.size()) != expected) {
        throw DomainError(std::string("ContingencyTable: ") + std::to_string(labels.size()) + " " +
                          axis + " labels for " + std::to_string(expected) + " " + axis);
    }
    std::set<std::string> seen;
    for (const auto& label : labels) {
        if (!seen.insert(label).second) {
            throw DomainError(std::string("ContingencyTable: duplicate ") + axis + " label '" + label +
                              "'");
        }
    }
}

Eigen::Index find_label(const std::vector<std::string>& labels, const std::string& label,
                        const char* axis) {
    auto it = std::find(labels.begin(), labels.end(), label);
    if (it == labels.end()) {
        throw DomainError(std::string("unknown ") + axis + " category '" + label + "'");
    }
    return static_cast<Eigen::Index>(it - labels.begin());
}

}  // namespace

ContingencyTable::ContingencyTable(CountMatrix counts, std::vector<std::string> row_labels,
                                   std::vector<std::string> col_labels, bool row_ordinal,
                                   bool col_ordinal)
    : counts_(std::move(counts)),
      row_labels_(std::move(row_labels)),
      col_labels_(std::move(col_labels)),
      row_ordinal_(row_ordinal),
      col_ordinal_(col_ordinal) {
    if (counts_.rows() < 2) throw DomainError("ContingencyTable: at least 2 rows required");
    if (counts_.cols() < 2) throw DomainError("ContingencyTable: at least 2 columns required");
    if ((counts_.array() < 0).any()) throw DomainError("ContingencyTable: negative count");
    if (row_labels_.empty()) row_labels_ = default_labels('R', counts_.rows());
    if (col_labels_.empty()) col_labels_ = default_labels('C', counts_.cols());
    check_labels(row_labels_, counts_.rows(), "row");
    check_labels(col_labels_, counts_.cols(), "column");
    row_totals_ = counts_.rowwise().sum();
    col_totals_ = counts_.colwise().sum().transpose();
    total_ = counts_.sum();
    if (total_ < 1) throw DomainError("ContingencyTable: total count must be >= 1");
}

ContingencyTable ContingencyTable::with_ordinal(bool rows_ordinal, bool cols_ordinal) const {
    ContingencyTable copy = *this;
    copy.row_ordinal_ = rows_ordinal;
    copy.col_ordinal_ = cols_ordinal;
    return copy;
}

Eigen::Index ContingencyTable::row_index(const std::string& label) const {
    return find_label(row_labels_, label, "row");
}

Eigen::Index ContingencyTable::col_index(const std::string& label) const {
    return find_label(col_labels_, label, "column");
}

bool operator==(const ContingencyTable& a, const ContingencyTable& b) {
    return a.counts_ == b.counts_ && a.row_labels_ == b.row_labels_ &&
           a.col_labels_ == b.col_labels_ && a.row_ordinal_ == b.row_ordinal_ &&
           a.col_ordinal_ == b.col_ordinal_;
}

ContingencyTable crosstab(const RecordSet& records, const CategoryOrder& order) {
    if (records.empty()) throw DomainError("crosstab: empty record set");

    auto axis_labels = [&](const std::optional<std::vector<std::string>>& explicit_order,
                           auto project) {
        if (explicit_order) return *explicit_order;
        std::set<std::string> distinct;
        for (const auto& r : records) distinct.insert(project(r));
        return std::vector<std::string>(distinct.begin(), distinct.end());
    };
    auto row_labels = axis_labels(order.rows, [](const Record& r) { return r.row; });
    auto col_labels = axis_labels(order.cols, [](const Record& r) { return r.col; });

    std::map<std::string, Eigen::Index> row_pos;
    std::map<std::string, Eigen::Index> col_pos;
    for (std::size_t k = 0; k < row_labels.size(); ++k) row_pos.emplace(row_labels[k], k);
    for (std::size_t k = 0; k < col_labels.size(); ++k) col_pos.emplace(col_labels[k], k);

    CountMatrix counts = CountMatrix::Zero(static_cast<Eigen::Index>(row_labels.size()),
                                           static_cast<Eigen::Index>(col_labels.size()));
    for (const auto& r : records) {
        auto ri = row_pos.find(r.row);
        if (ri == row_pos.end()) throw DomainError("crosstab: row category '" + r.row + "' not in order");
        auto ci = col_pos.find(r.col);
        if (ci == col_pos.end()) throw DomainError("crosstab: column category '" + r.col + "' not in order");
        ++counts(ri->second, ci->second);
    }
    return ContingencyTable(std::move(counts), std::move(row_labels), std::move(col_labels));
}

RecordSet expand_records(const ContingencyTable& table) {
    RecordSet records;
    records.reserve(static_cast<std::size_t>(table.total()));
    for (Eigen::Index i = 0; i < table.rows(); ++i) {
        for (Eigen::Index j = 0; j < table.cols(); ++j) {
            for (long long k = 0; k < table.count(i, j); ++k) {
                records.push_back({table.row_labels()[i], table.col_labels()[j]});
            }
        }
    }
    return records;
}

}  // namespace cattab
