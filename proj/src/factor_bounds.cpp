#include "mes/factor_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mes/special.hpp"

namespace mes {

namespace {

void require(bool cond, const char* msg) {
    if (!cond) throw std::invalid_argument(msg);
}

void check_scales(const std::vector<double>& sigma) {
    for (double s : sigma) require(s > 0.0, "factor model: scales must be positive");
}

}  // namespace

void validate_model(const FactorModel& model) {
    if (const auto* abrm = std::get_if<AbrmModel>(&model)) {
        const std::size_t d = abrm->idio.size();
        require(d >= 2, "AbrmModel: need d >= 2");
        require(abrm->b.size() == d && abrm->sigma.size() == d,
                "AbrmModel: loading/scale dimensions must match idio laws");
        require(abrm->mu.empty() || abrm->mu.size() == d,
                "AbrmModel: shift dimension must match idio laws");
        check_scales(abrm->sigma);
        return;
    }
    if (const auto* mbrm = std::get_if<MbrmModel>(&model)) {
        const std::size_t d = mbrm->idio.size();
        require(d >= 2, "MbrmModel: need d >= 2");
        require(mbrm->sigma.size() == d,
                "MbrmModel: scale dimension must match idio laws");
        check_scales(mbrm->sigma);
        require(mbrm->factor.cdf(0.0) == 0.0,
                "MbrmModel: factor support must be strictly positive");
        return;
    }
    const auto& minbrm = std::get<MinBrmModel>(model);
    require(minbrm.idio.size() >= 2, "MinBrmModel: need d >= 2");
}

std::size_t model_dimension(const FactorModel& model) {
    return std::visit([](const auto& m) { return m.idio.size(); }, model);
}

namespace {

const Distribution& model_factor(const FactorModel& model) {
    return std::visit(
        [](const auto& m) -> const Distribution& { return m.factor; }, model);
}

double component_from_z(const FactorModel& model, std::size_t i, double y,
                        double z) {
    if (const auto* abrm = std::get_if<AbrmModel>(&model)) {
        const double shift = abrm->mu.empty() ? 0.0 : abrm->mu[i];
        return shift + abrm->b[i] * y + abrm->sigma[i] * z;
    }
    if (const auto* mbrm = std::get_if<MbrmModel>(&model)) {
        return mbrm->sigma[i] * z / y;
    }
    return std::min(y, z);
}

}  // namespace

double model_component(const FactorModel& model, std::size_t i, double y,
                       double u) {
    const auto& idio = std::visit(
        [](const auto& m) -> const std::vector<Distribution>& { return m.idio; },
        model);
    return component_from_z(model, i, y, idio[i].quantile(u));
}

namespace {

struct JointArrays {
    std::vector<double> xj;
    std::vector<double> s;
};

// Cancelling sums (jointly mixable couplings) leave pure rounding noise in
// the aggregate. Its ordering carries no information, so collapse it to a
// constant and let the weak-tail fallback condition on the full sample.
// The threshold must absorb the intrinsic rounding of the 1-u reflection,
// which reaches ulp(1)/pdf at the deepest grid quantiles (about 1e-10 of
// the component magnitude for 10^6 normal draws).
void snap_degenerate(std::vector<double>& values, double magnitude) {
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    if (*hi - *lo <= 1e-8 * magnitude) {
        std::fill(values.begin(), values.end(), 0.5 * (*lo + *hi));
    }
}

// Common sampling frame of the constrained Monte Carlo estimators: the
// idiosyncratic driver walks the midpoint grid in order while the factor is
// fed a seeded permutation of the same grid, so both margins are exact and
// the run is reproducible bit for bit.
JointArrays simulate_coupled(const FactorModel& model, std::size_t j,
                             std::size_t n, std::uint64_t seed,
                             bool others_antimonotone) {
    const std::size_t d = model_dimension(model);
    require(j < d, "factor bounds: component index out of range");
    const auto u = midpoint_grid(n);
    const auto v = permuted_midpoint_grid(n, mix_seed(seed, 0x0fac));
    const auto& factor = model_factor(model);

    JointArrays out;
    out.xj.resize(n);
    out.s.assign(n, 0.0);
    double magnitude = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double y = factor.quantile(v[k]);
        double sum = 0.0;
        double abs_sum = 0.0;
        double numerator = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            const double ui =
                (others_antimonotone && i != j) ? 1.0 - u[k] : u[k];
            const double value = model_component(model, i, y, ui);
            sum += value;
            abs_sum += std::fabs(value);
            if (i == j) numerator = value;
        }
        out.xj[k] = numerator;
        out.s[k] = sum;
        magnitude = std::max(magnitude, abs_sum);
    }
    snap_degenerate(out.s, magnitude);
    return out;
}

}  // namespace

McEstimate constrained_upper_mc(const FactorModel& model, std::size_t j,
                                double p, std::size_t n, std::uint64_t seed) {
    validate_model(model);
    const auto joint = simulate_coupled(model, j, n, seed, false);
    return mes_estimate(joint.xj, joint.s, p);
}

McEstimate model_mes_mc(const FactorModel& model, std::size_t j, double p,
                        std::size_t n, std::uint64_t seed) {
    validate_model(model);
    const std::size_t d = model_dimension(model);
    require(j < d, "factor bounds: component index out of range");
    const auto& factor = model_factor(model);

    std::vector<double> xj(n);
    std::vector<double> s(n, 0.0);
    Rng rng(mix_seed(seed, 0x1a7));
    for (std::size_t k = 0; k < n; ++k) {
        const double y = factor.quantile(rng.next_open());
        double sum = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            const double value = model_component(model, i, y, rng.next_open());
            sum += value;
            if (i == j) xj[k] = value;
        }
        s[k] = sum;
    }
    return mes_estimate(xj, s, p);
}

std::vector<double> model_marginal_sample(const FactorModel& model,
                                          std::size_t j, std::size_t n,
                                          std::uint64_t seed) {
    validate_model(model);
    const auto joint = simulate_coupled(model, j, n, seed, false);
    return joint.xj;
}

namespace {

// Functional conditional-antimonotonicity probe: on a grid of factor values,
// checks that the candidate coupling's conditional aggregate u -> S(u | y)
// is nonincreasing. A conditionally constant aggregate (jointly mixable
// idiosyncratic pair) counts as antimonotonic.
bool candidate_is_conditionally_antimonotone(const FactorModel& model,
                                             std::size_t j) {
    const std::size_t d = model_dimension(model);
    const auto& factor = model_factor(model);
    constexpr int strata = 21;
    constexpr int probes = 201;
    const auto u = midpoint_grid(probes);

    for (int b = 0; b < strata; ++b) {
        const double level = 0.025 + 0.95 * static_cast<double>(b) / (strata - 1);
        const double y = factor.quantile(level);
        double prev = 0.0;
        double scale = 1.0;
        for (int k = 0; k < probes; ++k) {
            double sum = 0.0;
            for (std::size_t i = 0; i < d; ++i) {
                const double ui = i == j ? u[k] : 1.0 - u[k];
                sum += model_component(model, i, y, ui);
            }
            scale = std::max(scale, std::fabs(sum));
            if (k > 0 && sum - prev > 1e-9 * scale) return false;
            prev = sum;
        }
    }
    return true;
}

}  // namespace

CandidateEstimate constrained_lower_candidate_mc(const FactorModel& model,
                                                 std::size_t j, double p,
                                                 std::size_t n,
                                                 std::uint64_t seed) {
    validate_model(model);
    const auto joint = simulate_coupled(model, j, n, seed, true);
    CandidateEstimate out;
    out.estimate = mes_estimate(joint.xj, joint.s, p);
    out.antimonotone_flag = candidate_is_conditionally_antimonotone(model, j);
    return out;
}

namespace {

// Quantile with linear interpolation between tabulated ranks; the sorted
// table entries sit at the midpoint levels (l+0.5)/m.
double table_quantile(const std::vector<double>& sorted, double q) {
    const std::size_t m = sorted.size();
    const double pos = q * static_cast<double>(m) - 0.5;
    if (pos <= 0.0) return sorted.front();
    if (pos >= static_cast<double>(m - 1)) return sorted.back();
    const auto lo = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

// Idiosyncratic draws on the auxiliary grid under the requested coupling,
// evaluated once: z[i][l] is component i's raw idiosyncratic value at grid
// index l. Per-stratum tables then need only the f_i transform and a sort.
std::vector<std::vector<double>> aux_idio_grids(const FactorModel& model,
                                                std::size_t j,
                                                const IdioCoupling& coupling,
                                                std::size_t aux_draws) {
    const std::size_t d = model_dimension(model);
    const auto& idio = std::visit(
        [](const auto& m) -> const std::vector<Distribution>& { return m.idio; },
        model);

    std::vector<std::vector<double>> z(d, std::vector<double>(aux_draws, 0.0));
    if (coupling.kind == IdioCoupling::Kind::Independent) {
        Rng rng(mix_seed(coupling.seed, 0x71b1e));
        for (std::size_t l = 0; l < aux_draws; ++l) {
            for (std::size_t i = 0; i < d; ++i) {
                z[i][l] = idio[i].quantile(rng.next_open());
            }
        }
    } else {
        const auto v = midpoint_grid(aux_draws);
        const bool anti = coupling.kind == IdioCoupling::Kind::AntimonotoneOthersToJ;
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t l = 0; l < aux_draws; ++l) {
                const double ui = (anti && i != j) ? 1.0 - v[l] : v[l];
                z[i][l] = idio[i].quantile(ui);
            }
        }
    }
    return z;
}

// Conditional aggregate values on the auxiliary grid for one factor value.
// For the additive and multiplicative structures the idiosyncratic sum does
// not depend on y, which callers exploit by tabulating once.
std::vector<double> conditional_aggregate_table(
    const FactorModel& model, const std::vector<std::vector<double>>& z,
    double y) {
    const std::size_t d = z.size();
    const std::size_t aux_draws = z.front().size();
    std::vector<double> table(aux_draws, 0.0);
    double magnitude = 0.0;
    for (std::size_t l = 0; l < aux_draws; ++l) {
        double sum = 0.0;
        double abs_sum = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            const double value = component_from_z(model, i, y, z[i][l]);
            sum += value;
            abs_sum += std::fabs(value);
        }
        table[l] = sum;
        magnitude = std::max(magnitude, abs_sum);
    }
    snap_degenerate(table, magnitude);
    std::sort(table.begin(), table.end());
    return table;
}

}  // namespace

McEstimate constrained_lower_certified_mc(const FactorModel& model,
                                          std::size_t j, double p,
                                          std::size_t n, std::uint64_t seed,
                                          const IdioCoupling& coupling,
                                          std::size_t aux_draws) {
    validate_model(model);
    const std::size_t d = model_dimension(model);
    require(j < d, "factor bounds: component index out of range");
    require(aux_draws >= 2, "factor bounds: need aux_draws >= 2");

    const auto u = midpoint_grid(n);
    const auto v = permuted_midpoint_grid(n, mix_seed(seed, 0x0fac));
    const auto& factor = model_factor(model);
    const auto z = aux_idio_grids(model, j, coupling, aux_draws);

    std::vector<double> numerator(n);
    std::vector<double> conditioning(n);

    if (std::holds_alternative<MinBrmModel>(model)) {
        // The conditional law genuinely depends on y; tabulate per stratum.
        for (std::size_t k = 0; k < n; ++k) {
            const double y = factor.quantile(v[k]);
            numerator[k] = model_component(model, j, y, u[k]);
            const auto table = conditional_aggregate_table(model, z, y);
            conditioning[k] = table_quantile(table, 1.0 - u[k]);
        }
        return mes_estimate(numerator, conditioning, p);
    }

    // Additive: S | y = sum(b)*y + sum(mu) + T. Multiplicative: S | y = T/y.
    // T is tabulated once at a reference y and relocated per stratum.
    const auto table = conditional_aggregate_table(model, z, 1.0);
    if (const auto* abrm = std::get_if<AbrmModel>(&model)) {
        double b_total = 0.0;
        for (double bi : abrm->b) b_total += bi;
        // The reference table was built at y = 1; remove that offset.
        for (std::size_t k = 0; k < n; ++k) {
            const double y = factor.quantile(v[k]);
            numerator[k] = model_component(model, j, y, u[k]);
            conditioning[k] =
                table_quantile(table, 1.0 - u[k]) + b_total * (y - 1.0);
        }
    } else {
        for (std::size_t k = 0; k < n; ++k) {
            const double y = factor.quantile(v[k]);
            numerator[k] = model_component(model, j, y, u[k]);
            conditioning[k] = table_quantile(table, 1.0 - u[k]) / y;
        }
    }
    return mes_estimate(numerator, conditioning, p);
}

AbrmNormalBounds abrm_normal_closed(double b1, double b2, std::size_t j,
                                    double p) {
    require(b1 >= -1.0 && b1 <= 1.0 && b2 >= -1.0 && b2 <= 1.0,
            "abrm_normal_closed: loadings must lie in [-1,1]");
    require(j < 2, "abrm_normal_closed: j must be 0 or 1");
    if (!(p > 0.0 && p < 1.0)) {
        throw std::domain_error("abrm_normal_closed: p outside (0,1)");
    }

    const double bj = j == 0 ? b1 : b2;
    const double bi = j == 0 ? b2 : b1;
    const double sj = std::sqrt(std::max(0.0, 1.0 - bj * bj));
    const double si = std::sqrt(std::max(0.0, 1.0 - bi * bi));
    const double es_factor = normal_pdf(normal_quantile(p)) / (1.0 - p);

    // Coefficients on ES_p(N(0,1)); the p-dependence enters only through
    // that common factor, so delta is computed from the coefficients alone.
    const double num_upper = bj * (b1 + b2) + sj * (sj + si);
    const double den_upper_sq = 2.0 * (1.0 + b1 * b2 + sj * si);
    const double num_lower = bj * (b1 + b2) + sj * (sj - si);
    const double den_lower_sq = 2.0 * (1.0 + b1 * b2 - sj * si);

    const auto ratio = [](double num, double den_sq) {
        // A vanishing denominator means the conditioning aggregate is a.s.
        // constant; the weak-tail convention then yields the zero mean.
        if (den_sq <= 1e-14) return 0.0;
        return num / std::sqrt(den_sq);
    };

    AbrmNormalBounds out;
    out.M = es_factor;
    out.m = 0.0;
    const double c_upper = ratio(num_upper, den_upper_sq);
    const double c_lower = ratio(num_lower, den_lower_sq);
    out.Mf = c_upper * es_factor;
    out.mf = c_lower * es_factor;
    out.delta = 1.0 - (c_upper - c_lower);
    return out;
}

LomaxBounds mbrm_lomax_closed(double alpha, const std::vector<double>& sigmas,
                              std::size_t j, double p) {
    if (alpha <= 1.0) {
        throw std::domain_error("mbrm_lomax_closed: requires alpha > 1");
    }
    require(!sigmas.empty() && j < sigmas.size(),
            "mbrm_lomax_closed: bad component index");
    check_scales(sigmas);
    if (!(p > 0.0 && p < 1.0)) {
        throw std::domain_error("mbrm_lomax_closed: p outside (0,1)");
    }

    const Distribution marginal{Lomax{alpha, sigmas[j]}};
    LomaxBounds out;
    out.M = marginal.es(p);
    out.m = marginal.les(1.0 - p);
    out.Mf = out.M;
    out.mf = out.m;

    double sum_others = 0.0;
    for (std::size_t i = 0; i < sigmas.size(); ++i) {
        if (i != j) sum_others += sigmas[i];
    }
    const double odds = 1.0 / p - 1.0;
    out.unconstrained_sharp =
        sum_others >= sigmas[j] * std::pow(odds, 1.0 / alpha + 1.0);
    out.constrained_sharp = sum_others >= sigmas[j] * odds;
    return out;
}

MinBrmExpoBounds minbrm_expo_bounds(double lambda0, double lambda, double p,
                                    std::size_t n, std::uint64_t seed,
                                    bool iid_factor) {
    require(lambda0 > 0.0 && lambda > 0.0,
            "minbrm_expo_bounds: rates must be positive");
    require(n >= 2, "minbrm_expo_bounds: need n >= 2");
    if (!(p > 0.0 && p < 1.0)) {
        throw std::domain_error("minbrm_expo_bounds: p outside (0,1)");
    }
    const double rate_sum = lambda0 + lambda;

    MinBrmExpoBounds out;
    out.Mf = (1.0 - std::log1p(-p)) / rate_sum;
    out.M = out.Mf;

    // Equi-spaced grid U_k = k/(n+1), as in the reference construction.
    std::vector<double> u(n);
    for (std::size_t k = 0; k < n; ++k) {
        u[k] = static_cast<double>(k + 1) / static_cast<double>(n + 1);
    }

    // Unconstrained lower bound: the antimonotone coupling of the two
    // Expo(lambda0 + lambda) marginals.
    {
        std::vector<double> xj(n);
        std::vector<double> s(n);
        for (std::size_t k = 0; k < n; ++k) {
            xj[k] = -std::log1p(-u[k]) / rate_sum;
            s[k] = xj[k] - std::log(u[k]) / rate_sum;
        }
        out.m = mes_from_samples(xj, s, p);
    }

    // Constrained lower bound: factor uniforms u1 either a seeded shuffle of
    // the grid or iid draws; idiosyncratic pair antimonotone in u.
    {
        std::vector<double> u1(u);
        Rng rng(mix_seed(seed, 0x3e3));
        if (iid_factor) {
            for (auto& value : u1) value = rng.next_open();
        } else {
            rng.shuffle(std::span<double>(u1));
        }
        std::vector<double> xj(n);
        std::vector<double> s(n);
        for (std::size_t k = 0; k < n; ++k) {
            const double y = -std::log1p(-u1[k]) / lambda0;
            const double zj = -std::log1p(-u[k]) / lambda;
            const double zi = -std::log(u[k]) / lambda;
            xj[k] = std::min(y, zj);
            s[k] = xj[k] + std::min(y, zi);
        }
        out.mf = mes_from_samples(xj, s, p);
    }

    out.delta = spread_delta(out.m, out.M, out.mf, out.Mf);
    return out;
}

}  // namespace mes
