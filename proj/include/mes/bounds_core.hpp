#ifndef MES_BOUNDS_CORE_HPP
#define MES_BOUNDS_CORE_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <span>

#include "mes/distributions.hpp"
#include "mes/rng.hpp"

// Unconstrained bounds on the marginal expected shortfall
// MES_p(X_j, S) = E[X_j | S > VaR_p(S)], the generic sample and Monte Carlo
// MES estimators, tail-event conventions, and the spread measure delta.

namespace mes {

/// Tail-event convention. The default takes the strict tail {S > VaR_p(S)}
/// and falls back to the weak tail {S >= VaR_p(S)} when the strict one has
/// probability zero (degenerate or discrete aggregates). Both plain rules
/// are exposed because discrete marginals can shift the tail set under
/// quantile crossings.
enum class TailRule { StrictThenWeak, Strict, Weak };

/// Per prudence level p: unconstrained bounds [m, M], optional constrained
/// bounds [mf, Mf], optional point value and derived indices.
struct BoundsReport {
    double p = 0.0;
    double m = 0.0;
    double M = 0.0;
    std::optional<double> mf;
    std::optional<double> Mf;
    std::optional<double> mes;
    std::optional<double> delta;
    std::optional<double> srci;
    std::optional<double> srci_f;
};

/// Worst-case MES over all couplings with the given continuous (or
/// empirical proxy) marginal: the expected shortfall of the marginal itself.
double unconstrained_upper(const Distribution& law_j, double p);

/// The guaranteed lower envelope: the left expected shortfall at level 1-p.
double unconstrained_lower(const Distribution& law_j, double p);

/// Empirical MES from a joint sample. VaR is the order statistic
/// s_(ceil(p*n)); p = 0 conditions on the full sample.
double mes_from_samples(std::span<const double> xj, std::span<const double> s,
                        double p, TailRule rule = TailRule::StrictThenWeak);

struct McEstimate {
    double value = 0.0;
    double stderr_ = 0.0;
    std::size_t tail_count = 0;
};

/// Same tail mean as mes_from_samples, plus the standard error
/// (tail sample stdev / sqrt(tail size)).
McEstimate mes_estimate(std::span<const double> xj, std::span<const double> s,
                        double p, TailRule rule = TailRule::StrictThenWeak);

/// Fills xj/s with one chunk of joint draws; rng is freshly seeded per chunk
/// so results do not depend on chunk evaluation order.
using PairSampler =
    std::function<void(Rng& rng, std::span<double> xj, std::span<double> s)>;

/// Monte Carlo MES estimate with the reported standard error
/// (tail sample stdev / sqrt(tail size)). Deterministic given the seed:
/// chunk c of fixed size is generated from mix_seed(seed, c).
McEstimate mes_mc(const PairSampler& sampler, double p, std::size_t n,
                  std::uint64_t seed, TailRule rule = TailRule::StrictThenWeak);

/// Spread improvement delta = 1 - (Mf - mf)/(M - m), with delta = 1 by
/// convention when M = m. Estimated values may fall slightly below zero and
/// are reported unclamped.
double spread_delta(double m, double M, double mf, double Mf);

}  // namespace mes

#endif
