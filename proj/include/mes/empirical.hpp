#ifndef MES_EMPIRICAL_HPP
#define MES_EMPIRICAL_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "mes/bounds_core.hpp"

// End-to-end empirical pipeline: ingest daily loss and factor panels, fit
// the five-factor regression X_i = X_f + mu_i + b_i'Y + Z_i per asset,
// compute empirical MES with its unconstrained and factor-constrained
// bounds, and derive systemic risk criticality indices.

namespace mes {

inline constexpr std::size_t kFactorCount = 5;

// Date-aligned panel of daily losses (loss = negative return).
struct LossPanel {
    std::vector<std::string> dates;    // ISO-8601, strictly increasing
    std::vector<std::string> tickers;
    std::vector<double> losses;        // rows() x cols(), row-major
    std::size_t dropped_rows = 0;      // rows discarded while parsing

    std::size_t rows() const noexcept { return dates.size(); }
    std::size_t cols() const noexcept { return tickers.size(); }
    double loss(std::size_t t, std::size_t i) const {
        return losses[t * tickers.size() + i];
    }
};

// Factor values as published plus the risk-free rate stored as a loss
// (negated), so it can play the role of X_f directly.
struct FactorPanel {
    std::vector<std::string> dates;
    std::vector<double> factors;  // rows() x 5, row-major: MKT_RF,SMB,HML,RMW,CMA
    std::vector<double> rf_loss;  // X_f per day
    std::size_t dropped_rows = 0;

    std::size_t rows() const noexcept { return dates.size(); }
    double factor(std::size_t t, std::size_t k) const {
        return factors[t * kFactorCount + k];
    }
};

/// Parses `date,<ticker>,...` with ISO dates and decimal losses. Rows with
/// any missing or non-numeric cell are dropped and counted; duplicate dates
/// or fewer than 2 usable rows are errors.
LossPanel load_loss_csv(const std::string& path);

/// Parses `date,MKT_RF,SMB,HML,RMW,CMA,RF`. With percent=true all values
/// are divided by 100 (the public factor library publishes percents).
FactorPanel load_factor_csv(const std::string& path, bool percent);

/// Inner join of the two panels on dates; both outputs carry exactly the
/// common dates in order. Throws when fewer than 2 dates overlap.
void align_panels(LossPanel& losses, FactorPanel& factors);

// Per-asset ordinary least squares of (X_i - X_f) on [1, Y_1..Y_5].
struct AssetFit {
    double mu = 0.0;                  // intercept: abnormal loss
    std::vector<double> b;            // 5 factor exposures
    double mu_se = 0.0;               // classical standard errors
    std::vector<double> b_se;
    std::vector<double> residuals;    // one per aligned date
};

struct RegressionFit {
    std::vector<AssetFit> assets;     // one per ticker
};

/// Fits every asset by Householder QR; throws on a rank-deficient design
/// (for example a constant factor column) or too few rows.
RegressionFit ffm_fit(const LossPanel& losses, const FactorPanel& factors);

struct EmpiricalBoundsConfig {
    std::vector<double> p_grid;
    std::size_t n_syn = 0;       // 0 selects the default 10 * n rows
    std::uint64_t seed = 0;
};

// Conditionally coupled synthetic joint sample behind the constrained
// empirical bounds: common parts cycle over observed dates, residual
// quantiles are driven by one permuted midpoint grid shared by all assets.
struct SyntheticCoupling {
    std::vector<double> comonotone_xj;  // target column, all assets at u
    std::vector<double> comonotone_s;
    std::vector<double> antimonotone_xj;  // target at u, the rest at 1-u
    std::vector<double> antimonotone_s;
};

SyntheticCoupling build_synthetic_coupling(const LossPanel& losses,
                                           const FactorPanel& factors,
                                           const RegressionFit& fit,
                                           std::size_t target,
                                           std::size_t n_syn,
                                           std::uint64_t seed);

/// Per prudence level: M/m from the target's own empirical tails, mes from
/// the observed panel, and constrained bounds from a conditionally coupled
/// synthetic panel (common parts cycled over observed dates, residual
/// quantiles driven by a permuted midpoint grid; comonotone uniforms give
/// Mf, component j against 1-u gives the mf candidate). At p = 0 every
/// quantity equals the sample mean of the target column.
std::vector<BoundsReport> empirical_bounds(const LossPanel& losses,
                                           const FactorPanel& factors,
                                           const RegressionFit& fit,
                                           std::size_t target,
                                           const EmpiricalBoundsConfig& config);

struct SrciValues {
    double beta = 0.0;    // NaN when M == m
    double beta_f = 0.0;  // NaN when Mf/mf are absent or equal
};

/// Criticality indices beta = 1 - (M - mes)/(M - m) and the constrained
/// analogue. Raw values: estimates slightly outside [0,1] are reported
/// as-is, never truncated.
SrciValues srci(const BoundsReport& report);

/// Writes `p,m,M,mf,Mf,mes,delta,srci,srci_f` rows at 6 significant digits.
void write_bounds_csv(const std::string& path,
                      const std::vector<BoundsReport>& reports);

// --------------------------------------------------------------------------
// Synthetic data in the exact CSV schema above. The generator plants a known
// five-factor model, one crisis-style asset whose residual rides the
// aggregate residual (ticker CRISIS) and one hedging asset with the opposite
// exposure (ticker HEDGE), so index orderings can be tested without
// proprietary data.
// --------------------------------------------------------------------------

struct SynthSpec {
    std::size_t days = 2000;
    std::size_t standard_assets = 6;
    bool plant_crisis = true;
    bool plant_hedge = true;
    double residual_sigma = 0.01;
};

struct SynthPanels {
    LossPanel losses;
    FactorPanel factors;
    std::vector<double> true_mu;               // per asset
    std::vector<std::vector<double>> true_b;   // per asset, 5 loadings
};

SynthPanels generate_synthetic_panels(const SynthSpec& spec, std::uint64_t seed);

void write_loss_csv(const std::string& path, const LossPanel& panel);
void write_factor_csv(const std::string& path, const FactorPanel& panel);

}  // namespace mes

#endif
