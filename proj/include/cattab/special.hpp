#ifndef CATTAB_SPECIAL_HPP
#define CATTAB_SPECIAL_HPP

// Special functions used by every test and distribution in the library:
// log-gamma, regularized incomplete gamma, chi-square tail, standard normal
// CDF and quantile. All are pure and templated on the floating scalar.

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "cattab/errors.hpp"

namespace cattab {

namespace detail {

// Lanczos approximation, g = 607/128, 15 terms (Godfrey's coefficients).
inline constexpr double kLanczosG = 607.0 / 128.0;
inline constexpr std::array<double, 15> kLanczosCoef = {
    0.99999999999999709182,     57.156235665862923517,     -59.597960355475491248,
    14.136097974741747174,      -0.49191381609762019978,   .33994649984811888699e-4,
    .46523628927048575665e-4,   -.98374475304879564677e-4, .15808870322491248884e-3,
    -.21026444172410488319e-3,  .21743961811521264320e-3,  -.16431810653676389022e-3,
    .84418223983852743293e-4,   -.26190838401581408670e-4, .36899182659531622704e-5};

template <typename Scalar>
constexpr Scalar eps() {
    return std::numeric_limits<Scalar>::epsilon();
}

// P(a, x) by its power series; converges quickly for x < a + 1.
template <typename Scalar>
Scalar lower_gamma_series(Scalar a, Scalar x, Scalar log_prefix) {
    Scalar term = Scalar(1) / a;
    Scalar sum = term;
    for (int k = 1; k < 10000; ++k) {
        term *= x / (a + k);
        sum += term;
        if (std::abs(term) < std::abs(sum) * eps<Scalar>()) break;
    }
    return sum * std::exp(log_prefix);
}

// Q(a, x) by Lentz's continued fraction; converges for x >= a + 1.
template <typename Scalar>
Scalar upper_gamma_fraction(Scalar a, Scalar x, Scalar log_prefix) {
    const Scalar tiny = std::numeric_limits<Scalar>::min() / eps<Scalar>();
    Scalar b = x + 1 - a;
    Scalar c = Scalar(1) / tiny;
    Scalar d = Scalar(1) / b;
    Scalar h = d;
    for (int i = 1; i < 10000; ++i) {
        const Scalar an = -i * (i - a);
        b += 2;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = Scalar(1) / d;
        const Scalar delta = d * c;
        h *= delta;
        if (std::abs(delta - 1) < eps<Scalar>()) break;
    }
    return std::exp(log_prefix) * h;
}

}  // namespace detail

/// ln Γ(x) for x > 0.
template <typename Scalar = double>
Scalar ln_gamma(Scalar x) {
    if (!(x > 0)) throw DomainError("ln_gamma: argument must be > 0, got " + std::to_string(x));
    if (std::isinf(x)) return x;
    // Below 0.5 the Lanczos sum loses accuracy; shift with Γ(x) = Γ(x+1)/x.
    if (x < Scalar(0.5)) return ln_gamma(x + 1) - std::log(x);
    const Scalar z = x - 1;
    Scalar sum = Scalar(detail::kLanczosCoef[0]);
    for (std::size_t k = 1; k < detail::kLanczosCoef.size(); ++k) {
        sum += Scalar(detail::kLanczosCoef[k]) / (z + Scalar(k));
    }
    const Scalar t = z + Scalar(detail::kLanczosG) + Scalar(0.5);
    const Scalar half_log_two_pi = Scalar(0.91893853320467274178);
    return half_log_two_pi + (z + Scalar(0.5)) * std::log(t) - t + std::log(sum);
}

/// ln(k!) for integer k >= 0.
template <typename Scalar = double>
Scalar ln_factorial(long long k) {
    if (k < 0) throw DomainError("ln_factorial: negative argument " + std::to_string(k));
    if (k < 2) return Scalar(0);
    return ln_gamma(Scalar(k) + 1);
}

/// Regularized lower incomplete gamma P(a, x) = γ(a, x)/Γ(a).
template <typename Scalar = double>
Scalar reg_gamma_lower(Scalar a, Scalar x) {
    if (!(a > 0)) throw DomainError("reg_gamma_lower: shape must be > 0");
    if (!(x >= 0)) throw DomainError("reg_gamma_lower: x must be >= 0");
    if (x == 0) return Scalar(0);
    if (std::isinf(x)) return Scalar(1);
    const Scalar log_prefix = a * std::log(x) - x - ln_gamma(a);
    if (x < a + 1) return detail::lower_gamma_series(a, x, log_prefix);
    return Scalar(1) - detail::upper_gamma_fraction(a, x, log_prefix);
}

/// Regularized upper incomplete gamma Q(a, x) = Γ(a, x)/Γ(a) = 1 - P(a, x).
template <typename Scalar = double>
Scalar reg_gamma_upper(Scalar a, Scalar x) {
    if (!(a > 0)) throw DomainError("reg_gamma_upper: shape must be > 0");
    if (!(x >= 0)) throw DomainError("reg_gamma_upper: x must be >= 0");
    if (x == 0) return Scalar(1);
    if (std::isinf(x)) return Scalar(0);
    const Scalar log_prefix = a * std::log(x) - x - ln_gamma(a);
    if (x < a + 1) return Scalar(1) - detail::lower_gamma_series(a, x, log_prefix);
    return detail::upper_gamma_fraction(a, x, log_prefix);
}

/// Right-tail probability of a chi-square variate with `df` degrees of freedom.
template <typename Scalar = double>
Scalar chi2_sf(Scalar df, Scalar statistic) {
    if (!(df > 0)) throw DomainError("chi2_sf: degrees of freedom must be > 0");
    if (!(statistic >= 0)) throw DomainError("chi2_sf: statistic must be >= 0");
    return reg_gamma_upper(df / 2, statistic / 2);
}

/// Standard normal CDF Φ(z).
template <typename Scalar = double>
Scalar normal_cdf(Scalar z) {
    if (std::isnan(z)) throw DomainError("normal_cdf: NaN argument");
    return Scalar(0.5) * std::erfc(-z / std::numbers::sqrt2_v<Scalar>);
}

/// Standard normal upper tail 1 - Φ(z), without cancellation for large z.
template <typename Scalar = double>
Scalar normal_sf(Scalar z) {
    return normal_cdf(-z);
}

/// Inverse of Φ. Acklam's rational approximation refined by one Halley step.
template <typename Scalar = double>
Scalar normal_quantile(Scalar p) {
    if (!(p > 0 && p < 1)) {
        throw DomainError("normal_quantile: probability must lie in (0, 1), got " + std::to_string(p));
    }
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                   -2.759285104469687e+02, 1.383577518672690e+02,
                                   -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                   -1.556989798598866e+02, 6.680131188771972e+01,
                                   -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549732539343734e+00,
                                   4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};
    constexpr Scalar p_low = Scalar(0.02425);

    Scalar x;
    if (p < p_low) {
        const Scalar q = std::sqrt(-2 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
    } else if (p <= 1 - p_low) {
        const Scalar q = p - Scalar(0.5);
        const Scalar r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
    } else {
        const Scalar q = std::sqrt(-2 * std::log1p(-p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
    }

    // Residual taken on the smaller tail to avoid cancellation near p = 1.
    const Scalar e = p < Scalar(0.5) ? normal_cdf(x) - p : (1 - p) - normal_sf(x);
    const Scalar u = e * std::sqrt(2 * std::numbers::pi_v<Scalar>) * std::exp(x * x / 2);
    return x - u / (1 + x * u / 2);
}

}  // namespace cattab

#endif  // CATTAB_SPECIAL_HPP
