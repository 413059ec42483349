#include "cattab/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <thread>
#include <utility>

namespace cattab {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

void check_probability_matrix(const Matrix<double>& probs, const char* what) {
    if (!probs.allFinite() || (probs.array() < 0).any() || (probs.array() > 1).any()) {
        throw DomainError(std::string(what) + ": probabilities must lie in [0, 1]");
    }
}

void check_dims(Eigen::Index rows, Eigen::Index cols, const char* what) {
    if (rows < 2 || cols < 2) throw DomainError(std::string(what) + ": table must be at least 2x2");
}

// Sequential conditional binomials: cell k gets Bin(remaining, p_k / remaining mass).
template <typename Row>
void draw_multinomial(long long trials, const Row& probs, std::mt19937_64& rng, auto&& out) {
    long long remaining = trials;
    double mass = probs.sum();
    const Eigen::Index last = probs.size() - 1;
    for (Eigen::Index k = 0; k < last; ++k) {
        long long draw = 0;
        if (remaining > 0 && mass > 0) {
            const double p = std::clamp(double(probs(k)) / mass, 0.0, 1.0);
            draw = std::binomial_distribution<long long>(remaining, p)(rng);
        }
        out(k) = draw;
        remaining -= draw;
        mass -= probs(k);
    }
    out(last) = remaining;
}

// Runs body(r) for r in [0, count) over `threads` workers; body writes only slot r.
template <typename Body>
void for_each_replicate(long long count, unsigned threads, Body body) {
    threads = std::max(1u, threads);
    if (threads == 1 || count < 2) {
        for (long long r = 0; r < count; ++r) body(r);
        return;
    }
    std::vector<std::jthread> pool;
    const long long chunk = (count + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
        const long long begin = t * chunk;
        const long long end = std::min(count, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([=] {
            for (long long r = begin; r < end; ++r) body(r);
        });
    }
}

bool rank_one(const Matrix<double>& m, double tol) {
    const double total = m.sum();
    if (!(total > 0)) return false;
    const Matrix<double> outer = m.rowwise().sum() * m.colwise().sum() / total;
    return ((m - outer).array().abs() <= tol * std::max(1.0, m.cwiseAbs().maxCoeff())).all();
}

std::pair<Eigen::Index, Eigen::Index> dims(const SamplingScheme& scheme) {
    return std::visit(overloaded{[](const PoissonScheme& s) { return std::pair{s.rates.rows(), s.rates.cols()}; },
                                 [](const RowsFixedScheme& s) { return std::pair{s.row_probs.rows(), s.row_probs.cols()}; },
                                 [](const TotalFixedScheme& s) { return std::pair{s.cell_probs.rows(), s.cell_probs.cols()}; }},
                      scheme);
}

}  // namespace

SchemeKind kind(const SamplingScheme& scheme) {
    return std::visit(overloaded{[](const PoissonScheme&) { return SchemeKind::poisson; },
                                 [](const RowsFixedScheme&) { return SchemeKind::binomial_rows_fixed; },
                                 [](const TotalFixedScheme&) { return SchemeKind::multinomial_total_fixed; }},
                      scheme);
}

std::string_view to_string(SchemeKind kind) {
    switch (kind) {
        case SchemeKind::poisson: return "poisson";
        case SchemeKind::binomial_rows_fixed: return "binomial_rows_fixed";
        case SchemeKind::multinomial_total_fixed: return "multinomial_total_fixed";
    }
    return "unknown";
}

std::string_view to_string(NullTest test) {
    switch (test) {
        case NullTest::pearson: return "pearson";
        case NullTest::deviance: return "deviance";
        case NullTest::mantel_haenszel: return "mantel_haenszel";
    }
    return "unknown";
}

void validate(const SamplingScheme& scheme) {
    std::visit(overloaded{
                   [](const PoissonScheme& s) {
                       check_dims(s.rates.rows(), s.rates.cols(), "poisson scheme");
                       if (!s.rates.allFinite() || (s.rates.array() <= 0).any()) {
                           throw DomainError("poisson scheme: every cell rate must be finite and > 0");
                       }
                   },
                   [](const RowsFixedScheme& s) {
                       check_dims(s.row_probs.rows(), s.row_probs.cols(), "binomial_rows_fixed scheme");
                       check_probability_matrix(s.row_probs, "binomial_rows_fixed scheme");
                       if (s.row_totals.size() != s.row_probs.rows()) {
                           throw DomainError("binomial_rows_fixed scheme: one total per row required");
                       }
                       if ((s.row_totals.array() < 1).any()) {
                           throw DomainError("binomial_rows_fixed scheme: row totals must be >= 1");
                       }
                       for (Eigen::Index i = 0; i < s.row_probs.rows(); ++i) {
                           if (std::abs(s.row_probs.row(i).sum() - 1.0) > 1e-12) {
                               throw DomainError("binomial_rows_fixed scheme: row " + std::to_string(i + 1) +
                                                 " probabilities do not sum to 1");
                           }
                       }
                   },
                   [](const TotalFixedScheme& s) {
                       check_dims(s.cell_probs.rows(), s.cell_probs.cols(), "multinomial_total_fixed scheme");
                       check_probability_matrix(s.cell_probs, "multinomial_total_fixed scheme");
                       if (s.total < 1) throw DomainError("multinomial_total_fixed scheme: total must be >= 1");
                       if (std::abs(s.cell_probs.sum() - 1.0) > 1e-12) {
                           throw DomainError("multinomial_total_fixed scheme: cell probabilities do not sum to 1");
                       }
                   }},
               scheme);
}

bool satisfies_independence(const SamplingScheme& scheme, double tol) {
    return std::visit(
        overloaded{[&](const PoissonScheme& s) { return rank_one(s.rates, tol); },
                   [&](const RowsFixedScheme& s) {
                       for (Eigen::Index i = 1; i < s.row_probs.rows(); ++i) {
                           if (((s.row_probs.row(i) - s.row_probs.row(0)).array().abs() > tol).any()) return false;
                       }
                       return true;
                   },
                   [&](const TotalFixedScheme& s) { return rank_one(s.cell_probs, tol); }},
        scheme);
}

SamplingScheme null_scheme_from_margins(const ContingencyTable& table, SchemeKind kind) {
    const auto est = joint_probabilities(table);
    const Matrix<double> independent = est.row_marginal * est.col_marginal.transpose();
    switch (kind) {
        case SchemeKind::poisson:
            return PoissonScheme{independent * double(table.total())};
        case SchemeKind::binomial_rows_fixed:
            return RowsFixedScheme{table.row_totals(),
                                   est.col_marginal.transpose().replicate(table.rows(), 1)};
        case SchemeKind::multinomial_total_fixed:
            return TotalFixedScheme{table.total(), independent};
    }
    throw DomainError("unknown sampling scheme");
}

std::uint64_t replicate_seed(std::uint64_t master_seed, std::uint64_t replicate) {
    // splitmix64 finalizer over the master seed advanced by the replicate index.
    std::uint64_t z = master_seed + (replicate + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

CountMatrix sample_counts(const SamplingScheme& scheme, std::mt19937_64& rng) {
    validate(scheme);
    return std::visit(
        overloaded{[&](const PoissonScheme& s) {
                       CountMatrix out(s.rates.rows(), s.rates.cols());
                       for (Eigen::Index i = 0; i < out.rows(); ++i) {
                           for (Eigen::Index j = 0; j < out.cols(); ++j) {
                               out(i, j) = std::poisson_distribution<long long>(s.rates(i, j))(rng);
                           }
                       }
                       return out;
                   },
                   [&](const RowsFixedScheme& s) {
                       CountMatrix out(s.row_probs.rows(), s.row_probs.cols());
                       for (Eigen::Index i = 0; i < out.rows(); ++i) {
                           auto row = out.row(i);
                           draw_multinomial(s.row_totals(i), s.row_probs.row(i), rng, row);
                       }
                       return out;
                   },
                   [&](const TotalFixedScheme& s) {
                       // Row-major flattening of the I×J cells.
                       const Eigen::Index cols = s.cell_probs.cols();
                       Eigen::Matrix<double, 1, Eigen::Dynamic> flat(s.cell_probs.size());
                       for (Eigen::Index k = 0; k < flat.size(); ++k) flat(k) = s.cell_probs(k / cols, k % cols);
                       Eigen::Matrix<long long, 1, Eigen::Dynamic> drawn(flat.size());
                       draw_multinomial(s.total, flat, rng, drawn);
                       CountMatrix out(s.cell_probs.rows(), cols);
                       for (Eigen::Index k = 0; k < flat.size(); ++k) out(k / cols, k % cols) = drawn(k);
                       return out;
                   }},
        scheme);
}

ContingencyTable sample_table(const SamplingScheme& scheme, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    return ContingencyTable(sample_counts(scheme, rng));
}

CalibrationReport calibrate_null(const SamplingScheme& scheme, NullTest test,
                                 const CalibrationOptions& options) {
    validate(scheme);
    if (options.replicates < 1000) {
        throw DomainError("calibrate_null: at least 1000 replicates required, got " +
                          std::to_string(options.replicates));
    }
    if (!satisfies_independence(scheme)) {
        throw DomainError("calibrate_null: scheme parameters violate the no-association null");
    }

    struct Outcome {
        double statistic = 0;
        double p_value = 1;
        bool valid = false;
        int df = 1;
    };
    std::vector<Outcome> outcomes(static_cast<std::size_t>(options.replicates));

    for_each_replicate(options.replicates, options.threads, [&](long long r) {
        std::mt19937_64 rng(replicate_seed(options.seed, std::uint64_t(r)));
        const CountMatrix counts = sample_counts(scheme, rng);
        if ((counts.rowwise().sum().array() == 0).any() || (counts.colwise().sum().array() == 0).any()) {
            return;
        }
        const ContingencyTable table(counts);
        TestResult result;
        try {
            switch (test) {
                case NullTest::pearson: result = independence_test(table).pearson; break;
                case NullTest::deviance: result = independence_test(table).deviance; break;
                case NullTest::mantel_haenszel:
                    result = mantel_haenszel_test(table, options.scores ? *options.scores
                                                                        : ScoreAssignment::equally_spaced(table));
                    break;
            }
        } catch (const DomainError&) {
            return;  // e.g. zero scored variance
        }
        outcomes[std::size_t(r)] = {result.statistic, result.p_value, true, result.df};
    });

    CalibrationReport report;
    report.replicates = options.replicates;
    report.seed = options.seed;
    report.statistic_kind = test == NullTest::pearson    ? StatisticKind::pearson_chisq
                            : test == NullTest::deviance ? StatisticKind::deviance_chisq
                                                         : StatisticKind::mantel_haenszel;
    const auto [rows, cols] = dims(scheme);
    report.reference_df = test == NullTest::mantel_haenszel ? 1 : int((rows - 1) * (cols - 1));

    const std::vector<double> alphas = {0.10, 0.05, 0.01};
    std::vector<long long> rejections(alphas.size(), 0);
    long long valid = 0;
    double sum = 0;
    // Sequential reduction in replicate order keeps the mean bitwise reproducible.
    for (const auto& o : outcomes) {
        if (!o.valid) continue;
        ++valid;
        sum += o.statistic;
        for (std::size_t a = 0; a < alphas.size(); ++a) {
            if (o.p_value < alphas[a]) ++rejections[a];
        }
    }
    report.degenerate_replicates = options.replicates - valid;
    if (valid == 0) throw DomainError("calibrate_null: every simulated table had an empty margin");
    report.empirical_mean = sum / double(valid);
    for (std::size_t a = 0; a < alphas.size(); ++a) {
        report.rejection_rates.push_back({alphas[a], double(rejections[a]) / double(valid)});
    }
    return report;
}

double coverage_wald_ci(double true_pi, long long trials, double level, long long replicates,
                        std::uint64_t seed, unsigned threads) {
    if (!(true_pi > 0 && true_pi < 1)) throw DomainError("coverage_wald_ci: true probability must lie in (0, 1)");
    if (trials < 1) throw DomainError("coverage_wald_ci: trials must be >= 1");
    if (!(level > 0 && level < 1)) throw DomainError("coverage_wald_ci: level must lie in (0, 1)");
    if (replicates < 1000) {
        throw DomainError("coverage_wald_ci: at least 1000 replicates required, got " + std::to_string(replicates));
    }
    std::vector<char> covered(static_cast<std::size_t>(replicates), 0);
    for_each_replicate(replicates, threads, [&](long long r) {
        std::mt19937_64 rng(replicate_seed(seed, std::uint64_t(r)));
        const long long y = std::binomial_distribution<long long>(trials, true_pi)(rng);
        covered[std::size_t(r)] = wald_ci(y, trials, level).contains(true_pi) ? 1 : 0;
    });
    long long hits = 0;
    for (char c : covered) hits += c;
    return double(hits) / double(replicates);
}

}  // namespace cattab
