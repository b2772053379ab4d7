#ifndef MES_SPECIAL_HPP
#define MES_SPECIAL_HPP

#include <cstddef>

// Scalar special functions used by the distribution layer. All routines are
// deterministic and depend only on <cmath>, so results are reproducible
// across runs and platforms that implement IEEE-754 double precision.

namespace mes {

/// Standard normal density.
double normal_pdf(double x) noexcept;

/// Standard normal CDF, accurate in both tails (erfc based).
double normal_cdf(double x) noexcept;

/// Inverse standard normal CDF for u in (0,1); returns -/+infinity at 0 and 1.
/// Acklam's rational approximation polished with one Halley step.
double normal_quantile(double u);

/// Regularized lower incomplete gamma P(a, x), a > 0, x >= 0.
double gamma_p(double a, double x);

/// Quantile of the Gamma(shape, rate=1) law, inverted from gamma_p.
double gamma_quantile(double shape, double u);

/// Smallest 1-based index k with k >= u*n, guarded against 1-ulp noise in
/// the product (so u = k/n maps to k, not k+1). Returns 0 when u*n <= 0.
std::size_t ceil_index(double u, std::size_t n) noexcept;

}  // namespace mes

#endif
