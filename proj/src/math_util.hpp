#pragma once

#include <cmath>
#include <limits>

namespace nqdeg {

/// log(n!) from a precomputed table. Factorials overflow double beyond
/// n = 170 while Fock indices go up to 256, so magnitudes of the form
/// |beta|^n / sqrt(n!) are assembled in log space throughout.
double log_factorial(int n);

/// Scalar carried as sign * exp(logmag). Lets three-term recurrences
/// (associated Laguerre) run to high order where the raw values leave
/// the double range in both directions.
struct LogSigned {
    double logmag = -std::numeric_limits<double>::infinity();
    int sign = 0;  // -1, 0, +1

    static LogSigned zero() { return {}; }

    static LogSigned from(double v) {
        if (v == 0.0) return {};
        return {std::log(std::abs(v)), v > 0.0 ? 1 : -1};
    }

    double value() const { return sign == 0 ? 0.0 : sign * std::exp(logmag); }

    LogSigned times(double v) const {
        if (sign == 0 || v == 0.0) return {};
        return {logmag + std::log(std::abs(v)), v > 0.0 ? sign : -sign};
    }

    LogSigned plus(const LogSigned& o) const {
        if (sign == 0) return o;
        if (o.sign == 0) return *this;
        const LogSigned& big = logmag >= o.logmag ? *this : o;
        const LogSigned& small = logmag >= o.logmag ? o : *this;
        const double r = std::exp(small.logmag - big.logmag);  // in [0, 1]
        if (big.sign == small.sign) return {big.logmag + std::log1p(r), big.sign};
        if (r == 1.0) return {};  // exact cancellation
        return {big.logmag + std::log1p(-r), big.sign};
    }
};

/// Kahan compensated accumulator. Summation order is fixed by the caller,
/// which keeps grid quadratures bit-reproducible.
struct KahanSum {
    double sum = 0.0;
    double carry = 0.0;

    void add(double x) {
        const double y = x - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }

    double value() const { return sum; }
};

}  // namespace nqdeg
