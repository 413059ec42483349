#ifndef CATTAB_TEST_FIXTURES_HPP
#define CATTAB_TEST_FIXTURES_HPP

#include <random>

#include "cattab/table.hpp"

namespace cattab::testing {

inline ContingencyTable table1() {
    CountMatrix m(2, 2);
    m << 98, 2892, 155, 2552;
    return ContingencyTable(m, {"Non-White", "White"}, {"Woman", "Man"});
}

inline ContingencyTable table2() {
    CountMatrix m(2, 2);
    m << 15025, 185, 15199, 11;
    return ContingencyTable(m, {"Placebo", "Vaccine"}, {"Asymptomatic", "Symptomatic"});
}

inline ContingencyTable table6() {
    CountMatrix m(5, 5);
    m << 221, 160, 66, 29, 2,
         120, 410, 328, 81, 11,
         29, 71, 341, 172, 27,
         7, 5, 40, 138, 34,
         1, 1, 2, 11, 22;
    const std::vector<std::string> labels{"Excellent", "Very good", "Good", "Fair", "Poor"};
    return ContingencyTable(m, labels, labels, true, true);
}

/// Random I×J table with counts in [lo, hi] and positive margins.
inline ContingencyTable random_table(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols, long long lo,
                                     long long hi) {
    std::uniform_int_distribution<long long> cell(lo, hi);
    for (;;) {
        CountMatrix m(rows, cols);
        for (Eigen::Index i = 0; i < rows; ++i)
            for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = cell(rng);
        if ((m.rowwise().sum().array() > 0).all() && (m.colwise().sum().array() > 0).all()) {
            return ContingencyTable(m);
        }
    }
}

}  // namespace cattab::testing

#endif  // CATTAB_TEST_FIXTURES_HPP
