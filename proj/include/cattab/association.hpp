#ifndef CATTAB_ASSOCIATION_HPP
#define CATTAB_ASSOCIATION_HPP

#include <utility>

#include "cattab/table.hpp"

namespace cattab {

/// Numeric codes for the row (u) and column (v) categories.
/// Each vector needs at least two distinct values.
class ScoreAssignment {
public:
    ScoreAssignment(Vector<double> row_scores, Vector<double> col_scores);

    /// Consecutive integers 1..I and 1..J in table order.
    static ScoreAssignment equally_spaced(const ContingencyTable& table);

    const Vector<double>& row_scores() const { return row_scores_; }
    const Vector<double>& col_scores() const { return col_scores_; }

private:
    Vector<double> row_scores_;
    Vector<double> col_scores_;
};

struct OddsRatioResult {
    double estimate = 0;  // may be +infinity
    std::pair<Eigen::Index, Eigen::Index> rows;
    std::pair<Eigen::Index, Eigen::Index> cols;
    bool correction_applied = false;
    bool infinite() const;
};

/// Odds of `target_row` versus `other_row` within column `given_col`:
/// n_{target,col} / n_{other,col}. +infinity when only the denominator is 0.
double odds(const ContingencyTable& table, Eigen::Index target_row, Eigen::Index other_row,
            Eigen::Index given_col);

/// Cross-product ratio (n_ij n_i*j*) / (n_i*j n_ij*) of the 2×2 sub-table picked
/// by rows (i, i*) and cols (j, j*). With `zero_correction` 0.5 is added to each
/// of the four cells first. A zero denominator yields +infinity, not an error.
OddsRatioResult odds_ratio(const ContingencyTable& table,
                           std::pair<Eigen::Index, Eigen::Index> rows,
                           std::pair<Eigen::Index, Eigen::Index> cols, bool zero_correction = false);

/// Pearson correlation of the scored variables, computed from cell counts.
/// Equal to the record-level formula applied to the n expanded observations.
double pearson_correlation(const ContingencyTable& table, const ScoreAssignment& scores);

}  // namespace cattab

#endif  // CATTAB_ASSOCIATION_HPP
