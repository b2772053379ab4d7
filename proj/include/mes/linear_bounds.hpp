#ifndef MES_LINEAR_BOUNDS_HPP
#define MES_LINEAR_BOUNDS_HPP

#include <vector>

#include "mes/distributions.hpp"

// Constrained MES bounds under the linear conditional-expectation
// assumption E[X_i | S] = alpha + beta * S, the form shared by the CAPM and
// the weighted insurance pricing model. Under that assumption any
// nondecreasing-weight allocation of X_j reduces to an affine function of
// the aggregate's tail mean.

namespace mes {

struct LinearCondSpec {
    double alpha = 0.0;
    double beta = 0.0;
};

struct BivariateNormalSpec {
    double mu_x = 0.0;
    double mu_s = 0.0;
    double sigma_x = 1.0;
    double sigma_s = 1.0;
    double rho = 0.0;
};

/// MES under the linear condition: mu_j + beta * (ES_p(S) - E[S]).
double wipm_mes(double mu_j, double beta, double es_s, double mean_s);

/// Exact MES of a bivariate normal pair (X, S):
/// mu_x + rho * (sigma_x / sigma_s) * (ES_p(S) - mu_s).
double bivariate_normal_mes(const BivariateNormalSpec& spec, double p);

struct IntervalBounds {
    double lower = 0.0;
    double upper = 0.0;
};

/// Bounds over all admissible correlations: the rho = -1 and rho = +1
/// values of bivariate_normal_mes. spec.rho is ignored.
IntervalBounds bivariate_normal_bounds(const BivariateNormalSpec& spec, double p);

/// Bounds for d same-sign continuous risks with nonzero total mean:
/// lower mu_j, upper r_j * sum_i ES_p(X_i) with r_j = mu_j / sum_i mu_i.
/// Non-positive risks reuse the same formulas (beta >= 0 in both cases).
IntervalBounds nonnegative_bounds(const std::vector<Distribution>& laws,
                                  std::size_t j, double p);

struct Uniform3Row {
    double p = 0.0;
    double m = 0.0;        // (1-p)/2
    double M = 0.0;        // (1+p)/2
    double ml = 0.0;       // 1/2, attained by the mixing coupling
    double Ml = 0.0;       // (1+p)/2
    double delta = 0.0;    // 1/2 for every p
    double mes_mixing = 0.0;     // sample MES of the mixing coupling
    double mes_comonotone = 0.0; // sample MES of the comonotone coupling
};

struct Uniform3Report {
    std::vector<Uniform3Row> rows;
    bool mixing_attains_lower = false;     // mes_mixing == 1/2 at every p
    bool comonotone_attains_upper = false; // mes_comonotone == (1+p)/2 up to grid error
};

/// Reproduces the three-standard-uniform worked example on an n-row grid
/// for p in {0.55, 0.65, 0.75, 0.85, 0.95}.
Uniform3Report uniform3_verify(std::size_t n);

}  // namespace mes

#endif
