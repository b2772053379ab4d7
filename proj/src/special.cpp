#include "mes/special.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace mes {

namespace {
constexpr double kInvSqrt2Pi = 0.3989422804014326779399461;
constexpr double kSqrt2 = 1.4142135623730950488016887;
}  // namespace

double normal_pdf(double x) noexcept {
    return kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

double normal_cdf(double x) noexcept {
    return 0.5 * std::erfc(-x / kSqrt2);
}

double normal_quantile(double u) {
    if (!(u >= 0.0 && u <= 1.0)) {
        throw std::domain_error("normal_quantile: u outside [0,1]");
    }
    if (u == 0.0) return -std::numeric_limits<double>::infinity();
    if (u == 1.0) return std::numeric_limits<double>::infinity();

    // Acklam's rational approximation, |relative error| < 1.15e-9.
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double u_low = 0.02425;

    double x;
    if (u < u_low) {
        const double q = std::sqrt(-2.0 * std::log(u));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (u <= 1.0 - u_low) {
        const double q = u - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log1p(-u));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }

    // One Halley step against the erfc-based CDF brings the result to full
    // double precision. Above the median the residual is formed from the
    // complementary CDF, which keeps full relative accuracy in the upper
    // tail (1 - u is exact for u >= 1/2).
    const double e = u <= 0.5 ? normal_cdf(x) - u
                              : (1.0 - u) - 0.5 * std::erfc(x / kSqrt2);
    const double f = e / normal_pdf(x);
    x -= f / (1.0 + 0.5 * x * f);
    return x;
}

namespace {

// Series expansion of P(a,x), converges quickly for x < a + 1.
double gamma_p_series(double a, double x) {
    const double lg = std::lgamma(a);
    double term = 1.0 / a;
    double sum = term;
    double ap = a;
    for (int i = 0; i < 500; ++i) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::fabs(term) < std::fabs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - lg);
}

// Continued fraction for Q(a,x) = 1 - P(a,x), for x >= a + 1 (Lentz).
double gamma_q_cf(double a, double x) {
    const double lg = std::lgamma(a);
    constexpr double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < 1e-16) break;
    }
    return std::exp(-x + a * std::log(x) - lg) * h;
}

}  // namespace

double gamma_p(double a, double x) {
    if (!(a > 0.0)) throw std::domain_error("gamma_p: shape must be positive");
    if (x <= 0.0) return 0.0;
    if (x < a + 1.0) return gamma_p_series(a, x);
    return 1.0 - gamma_q_cf(a, x);
}

double gamma_quantile(double shape, double u) {
    if (!(u > 0.0 && u < 1.0)) {
        throw std::domain_error("gamma_quantile: u outside (0,1)");
    }
    // Wilson-Hilferty starting point, then safeguarded Newton on the CDF.
    const double z = normal_quantile(u);
    const double t = 1.0 - 1.0 / (9.0 * shape) + z / (3.0 * std::sqrt(shape));
    double x = shape * t * t * t;
    if (!(x > 0.0)) x = shape * std::exp((std::log(u) + std::lgamma(shape + 1.0)) / shape);
    if (!(x > 0.0) || !std::isfinite(x)) x = shape;

    double lo = 0.0;
    double hi = std::numeric_limits<double>::infinity();
    const double lg = std::lgamma(shape);
    for (int it = 0; it < 200; ++it) {
        const double err = gamma_p(shape, x) - u;
        if (err > 0.0) {
            hi = x;
        } else {
            lo = x;
        }
        const double pdf = std::exp(-x + (shape - 1.0) * std::log(x) - lg);
        double next = x - err / pdf;
        if (!(next > lo && next < hi) || !std::isfinite(next)) {
            next = std::isfinite(hi) ? 0.5 * (lo + hi) : 2.0 * x;
        }
        if (std::fabs(next - x) <= 1e-14 * (std::fabs(x) + 1e-300)) {
            x = next;
            break;
        }
        x = next;
    }
    return x;
}

std::size_t ceil_index(double u, std::size_t n) noexcept {
    const double t = u * static_cast<double>(n);
    if (t <= 0.0) return 0;
    // Shave a relative guard so that products like 0.9*10 = 9.0000000000000002
    // land on the mathematically intended boundary.
    const double guarded = t * (1.0 - 1e-12);
    double k = std::ceil(guarded);
    if (k < 1.0) k = 1.0;
    const auto idx = static_cast<std::size_t>(k);
    return idx > n ? n : idx;
}

}  // namespace mes
