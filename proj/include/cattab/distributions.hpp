#ifndef CATTAB_DISTRIBUTIONS_HPP
#define CATTAB_DISTRIBUTIONS_HPP

// Binomial, multinomial and Poisson probability mass functions. Every PMF is
// evaluated in log space and exposed both as log_*_pmf and *_pmf. The
// conventions 0^0 = 1 and 0·ln 0 = 0 make the boundary probabilities exact.

#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <utility>

#include <Eigen/Core>

#include "cattab/errors.hpp"
#include "cattab/special.hpp"

namespace cattab {

template <typename Scalar = double>
struct BinomialSpec {
    long long trials = 0;
    Scalar success_prob = 0;
};

template <typename Scalar = double>
struct MultinomialSpec {
    long long trials = 0;
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> category_probs;
};

/// Poisson mean; the same quantity is both E(Y) and VAR(Y).
template <typename Scalar = double>
struct PoissonSpec {
    Scalar rate = 1;
};

template <typename Scalar>
struct Moments {
    Scalar mean;
    Scalar variance;
};

namespace detail {

template <typename Scalar>
void check_probability(Scalar p, const char* where) {
    if (!(p >= 0 && p <= 1)) {
        throw DomainError(std::string(where) + ": probability must lie in [0, 1], got " +
                          std::to_string(p));
    }
}

// count · ln(p) with 0 · ln 0 = 0.
template <typename Scalar>
Scalar xlogy(long long count, Scalar p) {
    if (count == 0) return Scalar(0);
    if (p == 0) return -std::numeric_limits<Scalar>::infinity();
    return Scalar(count) * std::log(p);
}

template <typename Scalar>
void validate(const BinomialSpec<Scalar>& spec) {
    if (spec.trials < 0) throw DomainError("binomial: trials must be >= 0");
    check_probability(spec.success_prob, "binomial");
}

template <typename Scalar>
void validate(const MultinomialSpec<Scalar>& spec) {
    if (spec.trials < 0) throw DomainError("multinomial: trials must be >= 0");
    if (spec.category_probs.size() < 1) throw DomainError("multinomial: no categories");
    for (Eigen::Index j = 0; j < spec.category_probs.size(); ++j) {
        check_probability(spec.category_probs(j), "multinomial");
    }
    if (std::abs(spec.category_probs.sum() - Scalar(1)) > Scalar(1e-12)) {
        throw DomainError("multinomial: category probabilities must sum to 1");
    }
}

template <typename Scalar>
void validate(const PoissonSpec<Scalar>& spec) {
    if (!(spec.rate > 0) || std::isinf(spec.rate)) {
        throw DomainError("poisson: rate must be a finite value > 0");
    }
}

}  // namespace detail

template <typename Scalar>
Scalar log_binomial_pmf(const BinomialSpec<Scalar>& spec, long long y) {
    detail::validate(spec);
    if (y < 0 || y > spec.trials) {
        throw DomainError("binomial_pmf: outcome " + std::to_string(y) + " outside [0, " +
                          std::to_string(spec.trials) + "]");
    }
    const long long n = spec.trials;
    // Same summation order as log_multinomial_pmf so the J = 2 case agrees bitwise.
    Scalar log_p = ln_factorial<Scalar>(n);
    log_p += detail::xlogy(y, spec.success_prob) - ln_factorial<Scalar>(y);
    log_p += detail::xlogy(n - y, Scalar(1) - spec.success_prob) - ln_factorial<Scalar>(n - y);
    return log_p;
}

template <typename Scalar>
Scalar binomial_pmf(const BinomialSpec<Scalar>& spec, long long y) {
    return std::exp(log_binomial_pmf(spec, y));
}

template <typename Scalar>
Moments<Scalar> binomial_moments(const BinomialSpec<Scalar>& spec) {
    detail::validate(spec);
    const Scalar n = Scalar(spec.trials);
    const Scalar p = spec.success_prob;
    return {n * p, n * p * (1 - p)};
}

template <typename Scalar>
Scalar log_multinomial_pmf(const MultinomialSpec<Scalar>& spec, std::span<const long long> counts) {
    detail::validate(spec);
    if (static_cast<Eigen::Index>(counts.size()) != spec.category_probs.size()) {
        throw DomainError("multinomial_pmf: " + std::to_string(counts.size()) + " counts for " +
                          std::to_string(spec.category_probs.size()) + " categories");
    }
    long long total = 0;
    Scalar log_p = ln_factorial<Scalar>(spec.trials);
    for (std::size_t j = 0; j < counts.size(); ++j) {
        if (counts[j] < 0) throw DomainError("multinomial_pmf: negative count");
        total += counts[j];
        log_p += detail::xlogy(counts[j], spec.category_probs(static_cast<Eigen::Index>(j))) -
                 ln_factorial<Scalar>(counts[j]);
    }
    if (total != spec.trials) {
        throw DomainError("multinomial_pmf: counts sum to " + std::to_string(total) +
                          " but trials = " + std::to_string(spec.trials));
    }
    return log_p;
}

template <typename Scalar>
Scalar multinomial_pmf(const MultinomialSpec<Scalar>& spec, std::span<const long long> counts) {
    return std::exp(log_multinomial_pmf(spec, counts));
}

template <typename Scalar>
Scalar log_poisson_pmf(const PoissonSpec<Scalar>& spec, long long y) {
    detail::validate(spec);
    if (y < 0) throw DomainError("poisson_pmf: negative outcome " + std::to_string(y));
    return -spec.rate + detail::xlogy(y, spec.rate) - ln_factorial<Scalar>(y);
}

template <typename Scalar>
Scalar poisson_pmf(const PoissonSpec<Scalar>& spec, long long y) {
    return std::exp(log_poisson_pmf(spec, y));
}

template <typename Scalar>
Moments<Scalar> poisson_moments(const PoissonSpec<Scalar>& spec) {
    detail::validate(spec);
    return {spec.rate, spec.rate};
}

}  // namespace cattab

#endif  // CATTAB_DISTRIBUTIONS_HPP
