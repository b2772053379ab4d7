#ifndef MES_FACTOR_BOUNDS_HPP
#define MES_FACTOR_BOUNDS_HPP

#include <cstdint>
#include <variant>
#include <vector>

#include "mes/bounds_core.hpp"
#include "mes/distributions.hpp"

// Constrained MES bounds under three background-risk structures: additive
// (X_i = mu_i + b_i*Y + sigma_i*Z_i), multiplicative (X_i = sigma_i*Z_i/Y)
// and minimum-based (X_i = min(Y, Z_i)). The common factor Y carries the
// partial dependence information that tightens the unconstrained bounds.

namespace mes {

struct AbrmModel {
    std::vector<double> mu;  // abnormal shifts; empty means all zero
    std::vector<double> b;   // factor loadings
    std::vector<double> sigma;
    Distribution factor;
    std::vector<Distribution> idio;
};

struct MbrmModel {
    std::vector<double> sigma;
    Distribution factor;  // support must be strictly positive
    std::vector<Distribution> idio;
};

struct MinBrmModel {
    Distribution factor;
    std::vector<Distribution> idio;
};

using FactorModel = std::variant<AbrmModel, MbrmModel, MinBrmModel>;

/// Throws std::invalid_argument if the model is malformed (dimension
/// mismatches, d < 2, non-positive scales, factor support not positive for
/// the multiplicative structure).
void validate_model(const FactorModel& model);

std::size_t model_dimension(const FactorModel& model);

/// Conditional component value f_i(y, G_i^{-1}(u)).
double model_component(const FactorModel& model, std::size_t i, double y,
                       double u);

/// Coupling of the idiosyncratic terms used when building the conditional
/// aggregate law for certified lower bounds. The closed-form examples pin
/// AntimonotoneOthersToJ (component j driven by u, all others by 1-u),
/// which is the default everywhere.
struct IdioCoupling {
    enum class Kind { ComonotoneAll, AntimonotoneOthersToJ, Independent };
    Kind kind = Kind::AntimonotoneOthersToJ;
    std::uint64_t seed = 0;  // used by Independent only
};

/// Sharp constrained upper bound: conditionally comonotone idiosyncratic
/// terms on the midpoint grid, factor drawn through a seeded permutation of
/// the same grid. Deterministic given the seed.
McEstimate constrained_upper_mc(const FactorModel& model, std::size_t j,
                                double p, std::size_t n, std::uint64_t seed);

/// MES of the model itself, with mutually independent idiosyncratic terms.
McEstimate model_mes_mc(const FactorModel& model, std::size_t j, double p,
                        std::size_t n, std::uint64_t seed);

/// Marginal draws of component j (exact marginal law on the coupling grid);
/// feeds empirical unconstrained bounds when no closed form exists.
std::vector<double> model_marginal_sample(const FactorModel& model,
                                          std::size_t j, std::size_t n,
                                          std::uint64_t seed);

struct CandidateEstimate {
    McEstimate estimate;
    /// True when u -> S(u | y) is nonincreasing (constants included) for
    /// every probed factor stratum, i.e. the feasible coupling below is
    /// conditionally antimonotonic and the estimate is sharp.
    bool antimonotone_flag = false;
};

/// MES of the feasible coupling with component j driven by u and all other
/// idiosyncratic terms by 1-u. This is an upper estimate of the constrained
/// lower bound; the flag reports whether it is certified sharp.
CandidateEstimate constrained_lower_candidate_mc(const FactorModel& model,
                                                 std::size_t j, double p,
                                                 std::size_t n,
                                                 std::uint64_t seed);

/// Guaranteed lower bound: numerator conditionally comonotone in u, the
/// conditioning aggregate replaced by its conditional quantile at 1-u. The
/// conditional law of S given the factor is tabulated per stratum from
/// aux_draws auxiliary points under the requested idiosyncratic coupling,
/// with linear interpolation between tabulated ranks.
McEstimate constrained_lower_certified_mc(const FactorModel& model,
                                          std::size_t j, double p,
                                          std::size_t n, std::uint64_t seed,
                                          const IdioCoupling& coupling = {},
                                          std::size_t aux_draws = 1000);

struct AbrmNormalBounds {
    double M = 0.0;   // unconstrained upper (expected shortfall of N(0,1))
    double m = 0.0;   // unconstrained lower for the jointly mixable pair
    double Mf = 0.0;
    double mf = 0.0;
    double delta = 0.0;  // p-independent spread improvement
};

/// Closed-form constrained bounds for two standard normal risks
/// X_i = b_i*Y + sqrt(1-b_i^2)*Z_i; j is 0-based. Loadings of +/-1 resolve
/// through the degenerate (zero idiosyncratic) limit.
AbrmNormalBounds abrm_normal_closed(double b1, double b2, std::size_t j,
                                    double p);

struct LomaxBounds {
    double M = 0.0;
    double m = 0.0;
    double Mf = 0.0;
    double mf = 0.0;
    bool unconstrained_sharp = false;  // sum_{i!=j} sigma_i >= sigma_j*(1/p-1)^(1/alpha+1)
    bool constrained_sharp = false;    // sum_{i!=j} sigma_i >= sigma_j*(1/p-1)
};

/// Closed-form bounds for the multiplicative model with unit-mean
/// exponential idiosyncratic terms and a Gamma(alpha, 1) factor, under which
/// each X_i is Lomax(alpha, sigma_i). Requires alpha > 1. The constrained
/// and unconstrained bounds coincide; the flags report whether the stated
/// parameter conditions certify sharpness.
LomaxBounds mbrm_lomax_closed(double alpha, const std::vector<double>& sigmas,
                              std::size_t j, double p);

struct MinBrmExpoBounds {
    double M = 0.0;   // closed form, equals Mf
    double m = 0.0;   // numeric, antimonotone coupling
    double Mf = 0.0;  // (1 - ln(1-p)) / (lambda0 + lambda)
    double mf = 0.0;  // numeric, conditionally antimonotone coupling
    double delta = 0.0;
};

/// Minimum-based model with Y ~ Expo(lambda0) and Z_i ~ Expo(lambda), d = 2.
/// The numeric lower bounds use the equi-spaced grid U_k = k/(n+1) with the
/// factor driven by a seeded permutation of the grid; iid_factor switches to
/// independent factor draws instead.
MinBrmExpoBounds minbrm_expo_bounds(double lambda0, double lambda, double p,
                                    std::size_t n, std::uint64_t seed,
                                    bool iid_factor = false);

}  // namespace mes

#endif
