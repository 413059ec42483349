#include "cattab/association.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace cattab {

namespace {

void check_distinct(const Vector<double>& scores, const char* axis) {
    if (scores.size() < 2 || scores.minCoeff() == scores.maxCoeff()) {
        throw DomainError(std::string("ScoreAssignment: ") + axis +
                          " scores need at least two distinct values");
    }
    if (!scores.allFinite()) throw DomainError(std::string("ScoreAssignment: non-finite ") + axis + " score");
}

void check_row(const ContingencyTable& table, Eigen::Index i) {
    if (i < 0 || i >= table.rows()) throw DomainError("row index " + std::to_string(i) + " out of range");
}

void check_col(const ContingencyTable& table, Eigen::Index j) {
    if (j < 0 || j >= table.cols()) throw DomainError("column index " + std::to_string(j) + " out of range");
}

}  // namespace

ScoreAssignment::ScoreAssignment(Vector<double> row_scores, Vector<double> col_scores)
    : row_scores_(std::move(row_scores)), col_scores_(std::move(col_scores)) {
    check_distinct(row_scores_, "row");
    check_distinct(col_scores_, "column");
}

ScoreAssignment ScoreAssignment::equally_spaced(const ContingencyTable& table) {
    return ScoreAssignment(Vector<double>::LinSpaced(table.rows(), 1.0, double(table.rows())),
                           Vector<double>::LinSpaced(table.cols(), 1.0, double(table.cols())));
}

bool OddsRatioResult::infinite() const { return std::isinf(estimate); }

double odds(const ContingencyTable& table, Eigen::Index target_row, Eigen::Index other_row,
            Eigen::Index given_col) {
    check_row(table, target_row);
    check_row(table, other_row);
    check_col(table, given_col);
    const long long num = table.count(target_row, given_col);
    const long long den = table.count(other_row, given_col);
    if (num == 0 && den == 0) {
        throw DomainError("odds: both cells are zero in column '" + table.col_labels()[given_col] + "'");
    }
    if (den == 0) return std::numeric_limits<double>::infinity();
    return double(num) / double(den);
}

OddsRatioResult odds_ratio(const ContingencyTable& table,
                           std::pair<Eigen::Index, Eigen::Index> rows,
                           std::pair<Eigen::Index, Eigen::Index> cols, bool zero_correction) {
    const auto [i, i_star] = rows;
    const auto [j, j_star] = cols;
    check_row(table, i);
    check_row(table, i_star);
    check_col(table, j);
    check_col(table, j_star);
    if (i == i_star || j == j_star) throw DomainError("odds_ratio: row and column index pairs must be distinct");

    double a = double(table.count(i, j));
    double d = double(table.count(i_star, j_star));
    double b = double(table.count(i_star, j));
    double c = double(table.count(i, j_star));
    if (a == 0 && b == 0 && c == 0 && d == 0) throw DomainError("odds_ratio: all four cells are zero");
    if (zero_correction) {
        a += 0.5;
        b += 0.5;
        c += 0.5;
        d += 0.5;
    }

    OddsRatioResult result;
    result.rows = rows;
    result.cols = cols;
    result.correction_applied = zero_correction;
    const double num = a * d;
    const double den = b * c;
    if (num == 0 && den == 0) throw DomainError("odds_ratio: 0/0 cross-product; use zero correction");
    result.estimate = den == 0 ? std::numeric_limits<double>::infinity() : num / den;
    return result;
}

double pearson_correlation(const ContingencyTable& table, const ScoreAssignment& scores) {
    const auto& u = scores.row_scores();
    const auto& v = scores.col_scores();
    if (u.size() != table.rows() || v.size() != table.cols()) {
        throw DomainError("pearson_correlation: score vectors do not match the table dimensions");
    }
    if (table.total() < 2) throw DomainError("pearson_correlation: needs at least 2 observations");

    const Matrix<double> counts = table.counts().cast<double>();
    const Vector<double> row_n = table.row_totals().cast<double>();
    const Vector<double> col_n = table.col_totals().cast<double>();
    const double n = double(table.total());

    const Vector<double> du = u.array() - row_n.dot(u) / n;
    const Vector<double> dv = v.array() - col_n.dot(v) / n;
    const double cov = du.transpose() * counts * dv;
    const double var_u = row_n.dot(du.cwiseAbs2());
    const double var_v = col_n.dot(dv.cwiseAbs2());
    if (!(var_u > 0) || !(var_v > 0)) {
        throw DomainError("pearson_correlation: zero variance in a scored margin");
    }
    return std::clamp(cov / std::sqrt(var_u * var_v), -1.0, 1.0);
}

}  // namespace cattab
