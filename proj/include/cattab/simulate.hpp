#ifndef CATTAB_SIMULATE_HPP
#define CATTAB_SIMULATE_HPP

// Seeded Monte Carlo generation of contingency tables under the three
// sampling designs, and null calibration of the chi-square approximations.
//
// Every replicate r draws from its own std::mt19937_64 seeded with
// replicate_seed(master, r), so results do not depend on thread count.

#include <cstdint>
#include <optional>
#include <random>
#include <string_view>
#include <variant>
#include <vector>

#include "cattab/association.hpp"
#include "cattab/inference.hpp"
#include "cattab/table.hpp"

namespace cattab {

inline constexpr std::string_view kGeneratorName = "mt19937_64+splitmix64";

/// Every cell an independent Poisson(μ_ij); nothing fixed.
struct PoissonScheme {
    Matrix<double> rates;
};

/// Row totals fixed by design; each row an independent multinomial draw.
struct RowsFixedScheme {
    CountVector row_totals;
    Matrix<double> row_probs;  // each row sums to 1
};

/// Grand total fixed; one multinomial draw over all I×J cells.
struct TotalFixedScheme {
    long long total = 0;
    Matrix<double> cell_probs;  // sums to 1
};

using SamplingScheme = std::variant<PoissonScheme, RowsFixedScheme, TotalFixedScheme>;

enum class SchemeKind { poisson, binomial_rows_fixed, multinomial_total_fixed };
enum class NullTest { pearson, deviance, mantel_haenszel };

SchemeKind kind(const SamplingScheme& scheme);
std::string_view to_string(SchemeKind kind);
std::string_view to_string(NullTest test);

/// Throws DomainError describing the first violated parameter constraint.
void validate(const SamplingScheme& scheme);

/// True when the scheme's cell probabilities satisfy independence
/// (rank-1 joint, or identical row conditionals for the rows-fixed design).
bool satisfies_independence(const SamplingScheme& scheme, double tol = 1e-9);

/// Builds the independence null fitted to a table's margins under the given design.
SamplingScheme null_scheme_from_margins(const ContingencyTable& table, SchemeKind kind);

std::uint64_t replicate_seed(std::uint64_t master_seed, std::uint64_t replicate);

CountMatrix sample_counts(const SamplingScheme& scheme, std::mt19937_64& rng);

/// One table from the scheme. Identical (scheme, seed) give identical tables.
/// Throws DomainError if the draw is empty (possible only for tiny Poisson rates).
ContingencyTable sample_table(const SamplingScheme& scheme, std::uint64_t seed);

struct RejectionRate {
    double alpha = 0;
    double rate = 0;
};

struct CalibrationReport {
    long long replicates = 0;
    long long degenerate_replicates = 0;  // draws with an empty margin, skipped
    StatisticKind statistic_kind = StatisticKind::pearson_chisq;
    double empirical_mean = 0;
    std::vector<RejectionRate> rejection_rates;  // α = .10, .05, .01
    int reference_df = 1;
    std::uint64_t seed = 0;
    std::string_view generator = kGeneratorName;
};

struct CalibrationOptions {
    long long replicates = 10000;
    std::uint64_t seed = 0;
    unsigned threads = 1;
    std::optional<ScoreAssignment> scores;  // mantel_haenszel only; default 1..I, 1..J
};

/// Simulates the named test under a scheme that satisfies the null and
/// aggregates the statistic mean and rejection rates. Requires replicates >= 1000.
CalibrationReport calibrate_null(const SamplingScheme& scheme, NullTest test,
                                 const CalibrationOptions& options);

/// Fraction of replicates whose Wald interval contains `true_pi`.
double coverage_wald_ci(double true_pi, long long trials, double level, long long replicates,
                        std::uint64_t seed, unsigned threads = 1);

}  // namespace cattab

#endif  // CATTAB_SIMULATE_HPP
