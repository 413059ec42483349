#ifndef CATTAB_TABLE_HPP
#define CATTAB_TABLE_HPP

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "cattab/errors.hpp"

namespace cattab {

using CountMatrix = Eigen::Matrix<long long, Eigen::Dynamic, Eigen::Dynamic>;
using CountVector = Eigen::Matrix<long long, Eigen::Dynamic, 1>;

template <typename Scalar = double>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar = double>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

enum class Axis { rows, cols };

/// An I×J two-way table of nonnegative counts with category labels.
///
/// Requires I, J >= 2 and a positive grand total. Individual rows or columns
/// may be empty; operations that condition on a category reject them.
/// Immutable after construction.
class ContingencyTable {
public:
    /// Empty label vectors are filled with "R1".."RI" / "C1".."CJ".
    explicit ContingencyTable(CountMatrix counts, std::vector<std::string> row_labels = {},
                              std::vector<std::string> col_labels = {}, bool row_ordinal = false,
                              bool col_ordinal = false);

    const CountMatrix& counts() const { return counts_; }
    long long count(Eigen::Index i, Eigen::Index j) const { return counts_(i, j); }
    Eigen::Index rows() const { return counts_.rows(); }
    Eigen::Index cols() const { return counts_.cols(); }

    long long row_total(Eigen::Index i) const { return row_totals_(i); }
    long long col_total(Eigen::Index j) const { return col_totals_(j); }
    long long total() const { return total_; }
    const CountVector& row_totals() const { return row_totals_; }
    const CountVector& col_totals() const { return col_totals_; }

    const std::vector<std::string>& row_labels() const { return row_labels_; }
    const std::vector<std::string>& col_labels() const { return col_labels_; }
    bool row_ordinal() const { return row_ordinal_; }
    bool col_ordinal() const { return col_ordinal_; }

    ContingencyTable with_ordinal(bool rows_ordinal, bool cols_ordinal) const;

    /// Index of a category label; throws DomainError naming the label if absent.
    Eigen::Index row_index(const std::string& label) const;
    Eigen::Index col_index(const std::string& label) const;

    friend bool operator==(const ContingencyTable& a, const ContingencyTable& b);

private:
    CountMatrix counts_;
    CountVector row_totals_;
    CountVector col_totals_;
    long long total_ = 0;
    std::vector<std::string> row_labels_;
    std::vector<std::string> col_labels_;
    bool row_ordinal_ = false;
    bool col_ordinal_ = false;
};

struct Record {
    std::string row;
    std::string col;
};
using RecordSet = std::vector<Record>;

/// Explicit label orders for crosstab. Absent orders fall back to lexicographic.
struct CategoryOrder {
    std::optional<std::vector<std::string>> rows;
    std::optional<std::vector<std::string>> cols;
};

ContingencyTable crosstab(const RecordSet& records, const CategoryOrder& order = {});

/// One record per counted unit, in row-major cell order.
RecordSet expand_records(const ContingencyTable& table);

/// Maximum likelihood estimates p_ij = n_ij / n and their margins.
template <typename Scalar = double>
struct ProbabilityEstimates {
    Matrix<Scalar> joint;
    Vector<Scalar> row_marginal;
    Vector<Scalar> col_marginal;
    long long total = 0;
};

template <typename Scalar = double>
ProbabilityEstimates<Scalar> joint_probabilities(const ContingencyTable& table) {
    if (table.total() < 1) throw DomainError("joint_probabilities: table total is 0");
    ProbabilityEstimates<Scalar> est;
    const Scalar n = Scalar(table.total());
    est.joint = table.counts().cast<Scalar>() / n;
    est.row_marginal = table.row_totals().cast<Scalar>() / n;
    est.col_marginal = table.col_totals().cast<Scalar>() / n;
    est.total = table.total();
    return est;
}

/// π̂_{j|i} = n_ij / n_{i+} (given rows) or π̂_{i|j} = n_ij / n_{+j} (given cols).
template <typename Scalar = double>
Matrix<Scalar> conditional_probabilities(const ContingencyTable& table, Axis given) {
    Matrix<Scalar> out = table.counts().cast<Scalar>();
    if (given == Axis::rows) {
        for (Eigen::Index i = 0; i < table.rows(); ++i) {
            if (table.row_total(i) == 0) {
                throw DomainError("conditional_probabilities: row '" + table.row_labels()[i] +
                                  "' has zero total");
            }
            out.row(i) /= Scalar(table.row_total(i));
        }
    } else {
        for (Eigen::Index j = 0; j < table.cols(); ++j) {
            if (table.col_total(j) == 0) {
                throw DomainError("conditional_probabilities: column '" + table.col_labels()[j] +
                                  "' has zero total");
            }
            out.col(j) /= Scalar(table.col_total(j));
        }
    }
    return out;
}

}  // namespace cattab

#endif  // CATTAB_TABLE_HPP
