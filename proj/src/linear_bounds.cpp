#include "mes/linear_bounds.hpp"

#include <cmath>
#include <stdexcept>

#include "mes/bounds_core.hpp"
#include "mes/coupling.hpp"
#include "mes/special.hpp"

namespace mes {

double wipm_mes(double mu_j, double beta, double es_s, double mean_s) {
    if (!std::isfinite(mu_j) || !std::isfinite(beta) || !std::isfinite(es_s) ||
        !std::isfinite(mean_s)) {
        throw std::invalid_argument("wipm_mes: inputs must be finite");
    }
    return mu_j + beta * (es_s - mean_s);
}

double bivariate_normal_mes(const BivariateNormalSpec& spec, double p) {
    if (!(spec.sigma_x > 0.0 && spec.sigma_s > 0.0)) {
        throw std::invalid_argument("bivariate_normal_mes: sigmas must be positive");
    }
    if (!(spec.rho >= -1.0 && spec.rho <= 1.0)) {
        throw std::invalid_argument("bivariate_normal_mes: |rho| must be <= 1");
    }
    if (!(p >= 0.0 && p < 1.0)) {
        throw std::domain_error("bivariate_normal_mes: p outside [0,1)");
    }
    const double es_s =
        spec.mu_s + (p == 0.0
                         ? 0.0
                         : spec.sigma_s * normal_pdf(normal_quantile(p)) / (1.0 - p));
    return spec.mu_x + spec.rho * (spec.sigma_x / spec.sigma_s) * (es_s - spec.mu_s);
}

IntervalBounds bivariate_normal_bounds(const BivariateNormalSpec& spec, double p) {
    BivariateNormalSpec lo = spec;
    lo.rho = -1.0;
    BivariateNormalSpec hi = spec;
    hi.rho = 1.0;
    return {bivariate_normal_mes(lo, p), bivariate_normal_mes(hi, p)};
}

IntervalBounds nonnegative_bounds(const std::vector<Distribution>& laws,
                                  std::size_t j, double p) {
    if (laws.empty() || j >= laws.size()) {
        throw std::invalid_argument("nonnegative_bounds: bad component index");
    }
    if (!(p >= 0.0 && p < 1.0)) {
        throw std::domain_error("nonnegative_bounds: p outside [0,1)");
    }

    // All supports must share one sign; probe through extreme quantiles.
    constexpr double eps = 1e-9;
    int sign = 0;
    for (const auto& law : laws) {
        const double lo = law.quantile(eps);
        const double hi = law.quantile(1.0 - eps);
        const int this_sign = lo >= -1e-12 ? +1 : (hi <= 1e-12 ? -1 : 0);
        if (this_sign == 0) {
            throw std::invalid_argument(
                "nonnegative_bounds: risks must all be non-negative or all "
                "non-positive");
        }
        if (sign == 0) sign = this_sign;
        if (sign != this_sign) {
            throw std::invalid_argument(
                "nonnegative_bounds: mixed-sign supports");
        }
    }

    double total_mean = 0.0;
    double total_es = 0.0;
    for (const auto& law : laws) {
        total_mean += law.mean();
        total_es += law.es(p);
    }
    if (total_mean == 0.0) {
        throw std::invalid_argument("nonnegative_bounds: zero total mean");
    }
    const double r_j = laws[j].mean() / total_mean;
    return {laws[j].mean(), r_j * total_es};
}

Uniform3Report uniform3_verify(std::size_t n) {
    if (n < 1000) throw std::invalid_argument("uniform3_verify: need n >= 1000");

    const std::vector<Distribution> uniforms(3, Distribution(Uniform{0.0, 1.0}));
    const auto mixing = mix_uniform3(n);
    const auto comonotone = couple(uniforms, Comonotone{}, n);

    const auto mix_x = mixing.column(0);
    const auto mix_s = mixing.row_sums();
    const auto com_x = comonotone.column(0);
    const auto com_s = comonotone.row_sums();

    Uniform3Report report;
    report.mixing_attains_lower = true;
    report.comonotone_attains_upper = true;

    for (double p : {0.55, 0.65, 0.75, 0.85, 0.95}) {
        Uniform3Row row;
        row.p = p;
        row.m = 0.5 * (1.0 - p);
        row.M = 0.5 * (1.0 + p);
        const auto linear = nonnegative_bounds(uniforms, 0, p);
        row.ml = linear.lower;
        row.Ml = linear.upper;
        row.delta = spread_delta(row.m, row.M, row.ml, row.Ml);
        row.mes_mixing = mes_from_samples(mix_x, mix_s, p);
        row.mes_comonotone = mes_from_samples(com_x, com_s, p);

        if (std::fabs(row.mes_mixing - 0.5) > 1e-12) {
            report.mixing_attains_lower = false;
        }
        if (std::fabs(row.mes_comonotone - row.M) >
            1.0 / static_cast<double>(n)) {
            report.comonotone_attains_upper = false;
        }
        report.rows.push_back(row);
    }
    return report;
}

}  // namespace mes
