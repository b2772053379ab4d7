// Acceptance suite: one criterion per function, one pass/fail line each.
// Every tolerance is pinned here, next to the published value it guards.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "mes/bounds_core.hpp"
#include "mes/cli.hpp"
#include "mes/coupling.hpp"
#include "mes/distributions.hpp"
#include "mes/empirical.hpp"
#include "mes/factor_bounds.hpp"
#include "mes/linear_bounds.hpp"
#include "mes/rng.hpp"
#include "mes/special.hpp"

using namespace mes;

namespace {

struct Check {
    bool ok = true;
    std::string detail;

    void expect(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            if (!detail.empty()) detail += "; ";
            detail += what;
        }
    }
    void expect_near(double got, double want, double tol, const std::string& what) {
        if (!(std::fabs(got - want) <= tol)) {
            std::ostringstream os;
            os << what << " got " << got << " want " << want << " +/- " << tol;
            expect(false, os.str());
        }
    }
};

double elapsed_seconds(const std::chrono::steady_clock::time_point& start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
        .count();
}

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// ---------------------------------------------------------------------------
// Criterion 1: closed-form reproduction of the four published normal-risk
// panels, every cell within 0.001 (delta within 0.05 percentage points),
// in under one second.
// ---------------------------------------------------------------------------
Check criterion1() {
    Check check;
    const auto start = std::chrono::steady_clock::now();

    struct Row {
        double b;
        double mes, m, M, mf, Mf, delta_pct;
    };
    struct Panel {
        double p;
        bool opposite;
        std::vector<Row> rows;
    };
    const std::vector<Panel> panels = {
        {0.90, false, {{0.0, 1.241, 0.0, 1.755, 0.000, 1.755, 0.00},
                       {0.3, 1.296, 0.0, 1.755, 0.526, 1.755, 30.00},
                       {0.6, 1.447, 0.0, 1.755, 1.053, 1.755, 60.00},
                       {0.9, 1.670, 0.0, 1.755, 1.579, 1.755, 90.00},
                       {1.0, 1.755, 0.0, 1.755, 1.755, 1.755, 100.00}}},
        {0.95, false, {{0.0, 1.459, 0.0, 2.063, 0.000, 2.063, 0.00},
                       {0.3, 1.523, 0.0, 2.063, 0.619, 2.063, 30.00},
                       {0.6, 1.701, 0.0, 2.063, 1.238, 2.063, 60.00},
                       {0.9, 1.962, 0.0, 2.063, 1.856, 2.063, 90.00},
                       {1.0, 2.063, 0.0, 2.063, 2.063, 2.063, 100.00}}},
        {0.90, true, {{0.0, 1.241, 0.0, 1.755, 0.000, 1.755, 0.00},
                      {0.3, 1.296, 0.0, 1.755, 0.000, 1.674, 4.60},
                      {0.6, 1.447, 0.0, 1.755, 0.000, 1.404, 20.00},
                      {0.9, 1.670, 0.0, 1.755, 0.000, 0.765, 56.40},
                      {1.0, 1.755, 0.0, 1.755, 0.000, 0.000, 100.00}}},
        {0.95, true, {{0.0, 1.459, 0.0, 2.063, 0.000, 2.063, 0.00},
                      {0.3, 1.523, 0.0, 2.063, 0.000, 1.968, 4.60},
                      {0.6, 1.701, 0.0, 2.063, 0.000, 1.650, 20.00},
                      {0.9, 1.962, 0.0, 2.063, 0.000, 0.899, 56.40},
                      {1.0, 2.063, 0.0, 2.063, 0.000, 0.000, 100.00}}}};

    for (const auto& panel : panels) {
        for (const auto& row : panel.rows) {
            const double b2 = panel.opposite ? -row.b : row.b;
            const auto bounds = abrm_normal_closed(row.b, b2, 0, panel.p);
            const double sigma_s = std::sqrt(2.0 * (1.0 + row.b * row.b));
            const double mes = bivariate_normal_mes(
                {0.0, 0.0, 1.0, sigma_s, (1.0 + row.b * row.b) / sigma_s}, panel.p);

            std::ostringstream tag;
            tag << "p=" << panel.p << (panel.opposite ? " opp" : " eq") << " b="
                << row.b;
            check.expect_near(mes, row.mes, 1e-3, tag.str() + " mes");
            check.expect_near(bounds.m, row.m, 1e-3, tag.str() + " m");
            check.expect_near(bounds.M, row.M, 1e-3, tag.str() + " M");
            check.expect_near(bounds.mf, row.mf, 1e-3, tag.str() + " mf");
            check.expect_near(bounds.Mf, row.Mf, 1e-3, tag.str() + " Mf");
            check.expect_near(100.0 * bounds.delta, row.delta_pct, 0.05,
                              tag.str() + " delta%");
        }
    }
    check.expect(elapsed_seconds(start) < 1.0, "runtime >= 1 s");
    return check;
}

// ---------------------------------------------------------------------------
// Criterion 2: the Monte Carlo estimators at n = 10^6 with a fixed seed
// match the closed forms within 3 reported standard errors, under 30 s.
// ---------------------------------------------------------------------------
Check criterion2() {
    Check check;
    const auto start = std::chrono::steady_clock::now();
    const std::size_t n = 1000000;
    const std::uint64_t seed = 20240930;

    const auto model_for = [](double b1, double b2) {
        const double s1 = std::max(std::sqrt(std::max(0.0, 1.0 - b1 * b1)), 1e-12);
        const double s2 = std::max(std::sqrt(std::max(0.0, 1.0 - b2 * b2)), 1e-12);
        return AbrmModel{{},
                         {b1, b2},
                         {s1, s2},
                         Distribution(Normal{0.0, 1.0}),
                         {Distribution(Normal{0.0, 1.0}),
                          Distribution(Normal{0.0, 1.0})}};
    };

    for (double p : {0.90, 0.95}) {
        for (bool opposite : {false, true}) {
            for (double b : {0.0, 0.3, 0.6, 0.9, 1.0}) {
                const double b2 = opposite ? -b : b;
                const auto closed = abrm_normal_closed(b, b2, 0, p);
                const FactorModel model = model_for(b, b2);

                const auto upper = constrained_upper_mc(model, 0, p, n, seed);
                const auto lower =
                    constrained_lower_candidate_mc(model, 0, p, n, seed + 1);

                std::ostringstream tag;
                tag << "p=" << p << " b=(" << b << "," << b2 << ")";
                check.expect_near(upper.value, closed.Mf,
                                  3.0 * upper.stderr_ + 1e-6, tag.str() + " Mf");
                check.expect_near(lower.estimate.value, closed.mf,
                                  3.0 * lower.estimate.stderr_ + 1e-6,
                                  tag.str() + " mf");
            }
        }
    }
    const double took = elapsed_seconds(start);
    check.expect(took < 30.0, "runtime " + std::to_string(took) + " s >= 30 s");
    return check;
}

// ---------------------------------------------------------------------------
// Criterion 3: the three-uniform table is exact to 1e-12 on all five rows,
// including delta = 50% and the mixing-coupling attainment of 1/2.
// ---------------------------------------------------------------------------
Check criterion3() {
    Check check;
    const auto report = uniform3_verify(10000);
    check.expect(report.rows.size() == 5, "row count");
    const double expected[5][5] = {{0.55, 0.225, 0.775, 0.5, 0.775},
                                   {0.65, 0.175, 0.825, 0.5, 0.825},
                                   {0.75, 0.125, 0.875, 0.5, 0.875},
                                   {0.85, 0.075, 0.925, 0.5, 0.925},
                                   {0.95, 0.025, 0.975, 0.5, 0.975}};
    for (std::size_t r = 0; r < 5; ++r) {
        const auto& row = report.rows[r];
        std::ostringstream tag;
        tag << "p=" << expected[r][0];
        check.expect_near(row.m, expected[r][1], 1e-12, tag.str() + " m");
        check.expect_near(row.M, expected[r][2], 1e-12, tag.str() + " M");
        check.expect_near(row.ml, expected[r][3], 1e-12, tag.str() + " ml");
        check.expect_near(row.Ml, expected[r][4], 1e-12, tag.str() + " Ml");
        check.expect_near(row.delta, 0.5, 1e-12, tag.str() + " delta");
        check.expect_near(row.mes_mixing, 0.5, 1e-12, tag.str() + " mixing MES");
    }
    check.expect(report.mixing_attains_lower, "mixing coupling attainment");
    check.expect(report.comonotone_attains_upper, "comonotone attainment");
    return check;
}

// ---------------------------------------------------------------------------
// Criterion 4: the delta(b2) curve at b1 = 0.3, p = 0.95 on the 100-point
// grid (99 intervals) matches the published curve within 0.01 at the probed
// loadings and attains its minimum at the grid point nearest -0.3.
// ---------------------------------------------------------------------------
Check criterion4() {
    Check check;
    const int points = 100;
    std::vector<double> grid(points);
    std::vector<double> delta(points);
    for (int k = 0; k < points; ++k) {
        grid[k] = -1.0 + 2.0 * k / (points - 1.0);
        delta[k] = abrm_normal_closed(0.3, grid[k], 0, 0.95).delta;
    }
    const auto nearest = [&](double b2) {
        int best = 0;
        for (int k = 1; k < points; ++k) {
            if (std::fabs(grid[k] - b2) < std::fabs(grid[best] - b2)) best = k;
        }
        return best;
    };

    // Published curve values (the +/-0.98 pair brackets the 0.881 point).
    check.expect_near(delta[nearest(-0.98)], 0.8379425217318672, 0.01,
                      "delta(-0.98)");
    check.expect_near(delta[nearest(0.98)], 0.8810823219978878, 0.01,
                      "delta(+0.98)");
    check.expect_near(delta[nearest(0.31)], 0.3065967401229781, 0.01,
                      "delta(0.31)");
    check.expect_near(delta[nearest(1.0)], 1.0, 0.01, "delta(1.0)");

    const auto argmin =
        std::min_element(delta.begin(), delta.end()) - delta.begin();
    check.expect(argmin == nearest(-0.3), "minimum not at the grid point nearest -0.3");
    return check;
}

// ---------------------------------------------------------------------------
// Criterion 5: the minimum-based exponential model. Closed-form upper bound
// equals (1 - ln(1-p))/(lambda0 + lambda) to 1e-12; the numeric lower bound
// on the n = 10^5 grid reproduces delta = 0.855 at the first published
// point within 0.05.
// ---------------------------------------------------------------------------
Check criterion5() {
    Check check;
    for (double lambda0 : {0.5, 1.0, 2.0}) {
        for (double lambda : {0.1, 1.0, 2.1}) {
            for (double p : {0.9, 0.95}) {
                const auto bounds = minbrm_expo_bounds(lambda0, lambda, p, 1000, 1);
                const double expected =
                    (1.0 - std::log1p(-p)) / (lambda0 + lambda);
                std::ostringstream tag;
                tag << "Mf(" << lambda0 << "," << lambda << "," << p << ")";
                check.expect_near(bounds.Mf, expected, 1e-12, tag.str());
            }
        }
    }
    const auto first_point = minbrm_expo_bounds(1.0, 0.1, 0.95, 100000, 314);
    check.expect_near(first_point.delta, 0.855, 0.05, "delta at lambda = 0.1");
    return check;
}

// ---------------------------------------------------------------------------
// Criterion 6: Lomax multiplicative model at alpha = 3. Constrained bounds
// equal the unconstrained ones (delta = 0) when the parameter conditions
// hold, and both match a brute-force MES oracle under the attaining
// couplings within 3 standard errors.
// ---------------------------------------------------------------------------
Check criterion6() {
    Check check;
    const double alpha = 3.0;
    const std::vector<double> sigmas = {1.0, 10.0};

    for (double p : {0.90, 0.95}) {
        const auto closed = mbrm_lomax_closed(alpha, sigmas, 0, p);
        check.expect(closed.unconstrained_sharp && closed.constrained_sharp,
                     "parameter conditions should hold");
        check.expect_near(closed.Mf, closed.M, 1e-15, "Mf == M");
        check.expect_near(closed.mf, closed.m, 1e-15, "mf == m");
        check.expect_near(spread_delta(closed.m, closed.M, closed.mf, closed.Mf),
                          0.0, 1e-15, "delta == 0");

        // Brute-force oracle: Y ~ Gamma(3,1) sampled as a sum of three
        // exponentials (independent of the library's gamma machinery),
        // Z_i ~ Expo(1) through explicit logs. The upper bound is attained
        // by the comonotone coupling; the lower bound by the antimonotone
        // pairing of the component's quantiles against the flipped
        // aggregate. The conditionally antimonotone feasible coupling does
        // NOT attain it (the common 1/Y factor pollutes the tail event), so
        // it is held only to bound validity.
        const std::size_t n = 1000000;
        Rng rng(2718 + static_cast<std::uint64_t>(100.0 * p));
        std::vector<double> upper_xj(n), upper_s(n), anti_xj(n), anti_s(n);
        for (std::size_t k = 0; k < n; ++k) {
            const double y = -std::log(rng.next_open() * rng.next_open() *
                                       rng.next_open());
            const double u = rng.next_open();
            const double z_common = -std::log1p(-u);
            const double z_flipped = -std::log(u);
            upper_xj[k] = sigmas[0] * z_common / y;
            upper_s[k] = (sigmas[0] + sigmas[1]) * z_common / y;
            anti_xj[k] = sigmas[0] * z_common / y;
            anti_s[k] = (sigmas[0] * z_common + sigmas[1] * z_flipped) / y;
        }
        const auto upper = mes_estimate(upper_xj, upper_s, p);
        std::ostringstream tag;
        tag << "p=" << p;
        check.expect_near(upper.value, closed.M, 3.0 * upper.stderr_,
                          tag.str() + " oracle upper");

        std::vector<double> xj_sorted(upper_xj);
        std::sort(xj_sorted.begin(), xj_sorted.end());
        std::vector<double> s_desc(anti_s);
        std::sort(s_desc.begin(), s_desc.end(), std::greater<>());
        const auto lower = mes_estimate(xj_sorted, s_desc, p);
        check.expect_near(lower.value, closed.m, 3.0 * lower.stderr_,
                          tag.str() + " oracle lower");

        const auto feasible = mes_estimate(anti_xj, anti_s, p);
        check.expect(feasible.value >= closed.m - 3.0 * feasible.stderr_,
                     tag.str() + " feasible coupling undercuts the lower bound");
    }
    return check;
}

// ---------------------------------------------------------------------------
// Criterion 7: bound chain across 20 randomized factor models, d in
// {2,3,5}, p in {0.5, 0.9, 0.95, 0.99}: LES <= Frechet pairing <= certified
// <= candidate <= model MES <= constrained upper <= ES, within 3 pooled
// standard errors plus a one-percent-of-spread discretization allowance.
// ---------------------------------------------------------------------------
Check criterion7() {
    Check check;
    Rng gen(424242);

    const auto positive_law = [&]() -> Distribution {
        switch (gen.bounded(4)) {
            case 0: return Distribution(Lognormal{0.4 * gen.next_double() - 0.2,
                                                  0.3 + 0.4 * gen.next_double()});
            case 1: return Distribution(Uniform{0.5, 1.5 + gen.next_double()});
            case 2: return Distribution(Gamma{1.5 + 2.0 * gen.next_double(),
                                              0.5 + gen.next_double()});
            default: return Distribution(Exponential{0.5 + gen.next_double()});
        }
    };
    const auto any_law = [&]() -> Distribution {
        switch (gen.bounded(6)) {
            case 0: return Distribution(Normal{gen.next_double() - 0.5,
                                               0.5 + gen.next_double()});
            case 1: return Distribution(Lognormal{0.4 * gen.next_double() - 0.2,
                                                  0.3 + 0.4 * gen.next_double()});
            case 2: return Distribution(Uniform{-1.0 + gen.next_double(),
                                                1.0 + gen.next_double()});
            case 3: return Distribution(Exponential{0.5 + gen.next_double()});
            case 4: return Distribution(Gamma{1.0 + 3.0 * gen.next_double(),
                                              0.5 + gen.next_double()});
            default: return Distribution(Lomax{2.2 + 1.5 * gen.next_double(),
                                               0.5 + gen.next_double()});
        }
    };

    const std::size_t n = 20000;
    const std::size_t dims[3] = {2, 3, 5};
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t d = dims[trial % 3];
        std::vector<Distribution> idio;
        for (std::size_t i = 0; i < d; ++i) idio.push_back(any_law());
        std::vector<Distribution> positive_idio;
        for (std::size_t i = 0; i < d; ++i) positive_idio.push_back(positive_law());

        FactorModel model = [&]() -> FactorModel {
            switch (trial % 3) {
                case 0: {
                    std::vector<double> b(d), sigma(d);
                    for (std::size_t i = 0; i < d; ++i) {
                        b[i] = 0.1 + 0.8 * gen.next_double();
                        sigma[i] = 0.5 + 1.5 * gen.next_double();
                    }
                    return AbrmModel{{}, b, sigma, any_law(), idio};
                }
                case 1: {
                    std::vector<double> sigma(d);
                    for (std::size_t i = 0; i < d; ++i) {
                        sigma[i] = 0.5 + 1.5 * gen.next_double();
                    }
                    return MbrmModel{
                        sigma,
                        Distribution(Gamma{2.0 + 2.0 * gen.next_double(), 1.0}),
                        positive_idio};
                }
                default:
                    return MinBrmModel{positive_law(), positive_idio};
            }
        }();

        const std::uint64_t seed = 1000 + static_cast<std::uint64_t>(trial);
        const auto marginal_draws = model_marginal_sample(model, 0, n, seed);
        const auto marginal = Distribution::from_sample(marginal_draws);

        for (double p : {0.5, 0.9, 0.95, 0.99}) {
            const double les = unconstrained_lower(marginal, p);
            const double es = unconstrained_upper(marginal, p);
            const double slack_floor = 0.01 * (es - les);

            const auto mes_ind = model_mes_mc(model, 0, p, n, seed + 1);
            // Frechet pairing of the sorted marginal against the flipped
            // independent-model aggregate.
            std::vector<double> xj_sorted(marginal_draws);
            std::sort(xj_sorted.begin(), xj_sorted.end());
            std::vector<double> s_desc(n);
            {
                std::vector<double> s_tmp(n);
                std::vector<double> x_tmp(n);
                Rng rng(mix_seed(seed + 1, 0x1a7));
                const auto& factor = std::visit(
                    [](const auto& m) -> const Distribution& { return m.factor; },
                    model);
                for (std::size_t k = 0; k < n; ++k) {
                    const double y = factor.quantile(rng.next_open());
                    double sum = 0.0;
                    for (std::size_t i = 0; i < model_dimension(model); ++i) {
                        sum += model_component(model, i, y, rng.next_open());
                    }
                    s_tmp[k] = sum;
                }
                std::sort(s_tmp.begin(), s_tmp.end());
                for (std::size_t k = 0; k < n; ++k) s_desc[k] = s_tmp[n - 1 - k];
            }
            const auto frechet = mes_estimate(xj_sorted, s_desc, p);

            const auto upper = constrained_upper_mc(model, 0, p, n, seed + 2);
            const auto cand = constrained_lower_candidate_mc(model, 0, p, n, seed + 3);
            const auto cert = constrained_lower_certified_mc(model, 0, p, n, seed + 4);

            const auto leq = [&](double a, double b, double noise,
                                 const char* what) {
                if (!(a <= b + 3.0 * noise + slack_floor)) {
                    std::ostringstream os;
                    os << "trial " << trial << " p=" << p << " " << what << ": "
                       << a << " > " << b << " + slack";
                    check.expect(false, os.str());
                }
            };
            leq(les, frechet.value, frechet.stderr_, "LES <= frechet");
            leq(frechet.value, cert.value,
                std::hypot(frechet.stderr_, cert.stderr_), "frechet <= certified");
            leq(cert.value, cand.estimate.value,
                std::hypot(cert.stderr_, cand.estimate.stderr_),
                "certified <= candidate");
            leq(cand.estimate.value, mes_ind.value,
                std::hypot(cand.estimate.stderr_, mes_ind.stderr_),
                "candidate <= model MES");
            leq(mes_ind.value, upper.value,
                std::hypot(mes_ind.stderr_, upper.stderr_), "model MES <= upper");
            leq(upper.value, es, upper.stderr_, "upper <= ES");
        }
    }
    return check;
}

// ---------------------------------------------------------------------------
// Criterion 8: first-order dominance of the conditional tail laws across
// couplings at d = 2 with uniform marginals, n = 10^4, pointwise 3/sqrt(n).
// ---------------------------------------------------------------------------
Check criterion8() {
    Check check;
    const std::size_t n = 10000;
    const double tol = 3.0 / std::sqrt(static_cast<double>(n));
    const std::vector<Distribution> laws(2, Distribution(Uniform{0.0, 1.0}));

    const auto tail_of = [&](const CouplingKind& kind, double p) {
        const auto sample = couple(laws, kind, n);
        const auto x = sample.column(0);
        const auto s = sample.row_sums();
        std::vector<double> sorted(s);
        std::sort(sorted.begin(), sorted.end());
        const double var = sorted[ceil_index(p, n) - 1];
        std::vector<double> tail;
        for (std::size_t r = 0; r < n; ++r) {
            if (s[r] > var) tail.push_back(x[r]);
        }
        if (tail.empty()) {
            for (std::size_t r = 0; r < n; ++r) {
                if (s[r] >= var) tail.push_back(x[r]);
            }
        }
        return tail;
    };
    const auto ecdf = [](const std::vector<double>& values, double t) {
        double count = 0.0;
        for (double v : values) count += v <= t ? 1.0 : 0.0;
        return count / static_cast<double>(values.size());
    };

    for (double p : {0.5, 0.9}) {
        const auto como = tail_of(Comonotone{}, p);
        const auto indep = tail_of(Independent{2025}, p);
        const auto anti = tail_of(AntimonotoneAt{0}, p);
        for (double t = 0.01; t < 1.0; t += 0.01) {
            const double fc = ecdf(como, t);
            const double fi = ecdf(indep, t);
            const double fa = ecdf(anti, t);
            if (!(fc <= fi + tol) || !(fi <= fa + tol)) {
                std::ostringstream os;
                os << "ordering broken at p=" << p << " t=" << t;
                check.expect(false, os.str());
                break;
            }
        }
    }
    return check;
}

// ---------------------------------------------------------------------------
// Criterion 9: empirical pipeline round trip on a planted model. Coefficient
// recovery within 3 standard errors, the bound chain at every grid point,
// the exact p = 0 collapse, and the criticality ordering of the planted
// crisis and hedge assets.
// ---------------------------------------------------------------------------
Check criterion9() {
    Check check;
    SynthSpec spec;
    spec.days = 2000;
    spec.standard_assets = 6;
    const auto panels = generate_synthetic_panels(spec, 909090);
    const auto fit = ffm_fit(panels.losses, panels.factors);

    for (std::size_t i = 0; i < panels.losses.cols(); ++i) {
        const bool planted_standard = i < spec.standard_assets;
        if (!planted_standard) continue;  // planted specials carry structured residuals
        const auto& asset = fit.assets[i];
        if (std::fabs(asset.mu - panels.true_mu[i]) > 3.0 * asset.mu_se) {
            check.expect(false, "intercept recovery failed for asset " +
                                    panels.losses.tickers[i]);
        }
        for (std::size_t c = 0; c < kFactorCount; ++c) {
            if (std::fabs(asset.b[c] - panels.true_b[i][c]) > 3.0 * asset.b_se[c]) {
                check.expect(false, "loading recovery failed for asset " +
                                        panels.losses.tickers[i]);
            }
        }
    }

    EmpiricalBoundsConfig config;
    for (int k = 0; k <= 50; ++k) config.p_grid.push_back(0.99 * k / 50.0);
    config.seed = 31415;
    const auto reports =
        empirical_bounds(panels.losses, panels.factors, fit, 0, config);
    double mean = 0.0;
    for (std::size_t t = 0; t < panels.losses.rows(); ++t) {
        mean += panels.losses.loss(t, 0);
    }
    mean /= static_cast<double>(panels.losses.rows());
    check.expect(reports.front().p == 0.0 && reports.front().m == mean &&
                     reports.front().M == mean && *reports.front().mes == mean &&
                     *reports.front().mf == mean && *reports.front().Mf == mean,
                 "p = 0 does not collapse exactly to the sample mean");
    for (const auto& r : reports) {
        if (!(r.m <= *r.mes + 1e-12 && *r.mes <= r.M + 1e-12 &&
              *r.mf <= *r.Mf + 1e-12)) {
            std::ostringstream os;
            os << "chain broken at p=" << r.p;
            check.expect(false, os.str());
        }
    }

    EmpiricalBoundsConfig extreme;
    extreme.p_grid = {0.99};
    extreme.seed = 31415;
    const auto crisis = empirical_bounds(panels.losses, panels.factors, fit,
                                         spec.standard_assets, extreme);
    const auto hedge = empirical_bounds(panels.losses, panels.factors, fit,
                                        spec.standard_assets + 1, extreme);
    const double beta_crisis = *crisis.front().srci;
    const double beta_hedge = *hedge.front().srci;
    check.expect(beta_crisis >= 0.95,
                 "crisis asset beta " + std::to_string(beta_crisis) + " < 0.95");
    check.expect(beta_hedge <= 0.4,
                 "hedge asset beta " + std::to_string(beta_hedge) + " > 0.4");
    return check;
}

// ---------------------------------------------------------------------------
// Criterion 10: repeated seeded runs emit byte-identical CSV files.
// ---------------------------------------------------------------------------
Check criterion10() {
    Check check;
    const auto losses = temp_path("mes_acc_losses.csv");
    const auto factors = temp_path("mes_acc_factors.csv");
    check.expect(cli::run({"synth-gen", "--days", "500", "--assets", "4", "--seed",
                           "99", "--out-losses", losses, "--out-factors",
                           factors}) == 0,
                 "synth-gen failed");
    const auto losses2 = temp_path("mes_acc_losses2.csv");
    const auto factors2 = temp_path("mes_acc_factors2.csv");
    cli::run({"synth-gen", "--days", "500", "--assets", "4", "--seed", "99",
              "--out-losses", losses2, "--out-factors", factors2});
    check.expect(read_file(losses) == read_file(losses2) &&
                     read_file(factors) == read_file(factors2),
                 "synth-gen not reproducible");

    const auto emp1 = temp_path("mes_acc_emp1.csv");
    const auto emp2 = temp_path("mes_acc_emp2.csv");
    for (const auto& out : {emp1, emp2}) {
        check.expect(cli::run({"empirical", "--losses", losses, "--factors",
                               factors, "--target", "CRISIS", "--p-grid",
                               "0:0.99:25", "--seed", "12", "--out", out}) == 0,
                     "empirical run failed");
    }
    check.expect(read_file(emp1) == read_file(emp2) && !read_file(emp1).empty(),
                 "empirical output not byte-identical");

    const auto model_path = temp_path("mes_acc_model.txt");
    {
        std::ofstream model(model_path);
        model << "model = minbrm\nd = 2\nfactor = exponential 1\n"
              << "idio = exponential 1\n";
    }
    const auto bf1 = temp_path("mes_acc_bf1.csv");
    const auto bf2 = temp_path("mes_acc_bf2.csv");
    for (const auto& out : {bf1, bf2}) {
        check.expect(cli::run({"bounds-factor", "--model", model_path, "--j", "1",
                               "--p-grid", "0.5:0.95:3", "--n", "50000", "--seed",
                               "8", "--out", out}) == 0,
                     "bounds-factor run failed");
    }
    check.expect(read_file(bf1) == read_file(bf2) && !read_file(bf1).empty(),
                 "bounds-factor output not byte-identical");
    return check;
}

}  // namespace

int main() {
    const struct {
        int id;
        const char* name;
        std::function<Check()> run;
    } criteria[] = {
        {1, "closed-form normal-risk table (4 panels, +/-0.001, <1s)", criterion1},
        {2, "Monte Carlo matches closed forms (n=1e6, 3 stderr, <30s)", criterion2},
        {3, "three-uniform table exact to 1e-12 with attainments", criterion3},
        {4, "delta curve values and minimum location (b1=0.3)", criterion4},
        {5, "minimum-based exponential bounds and first delta point", criterion5},
        {6, "Lomax closed bounds vs brute-force oracle (delta=0)", criterion6},
        {7, "bound chain over 20 randomized models", criterion7},
        {8, "stochastic dominance of coupling tail laws", criterion8},
        {9, "empirical pipeline round trip and criticality ordering", criterion9},
        {10, "byte-identical seeded reruns", criterion10},
    };

    bool all_ok = true;
    for (const auto& criterion : criteria) {
        const auto result = criterion.run();
        all_ok = all_ok && result.ok;
        std::printf("[%s] criterion %d: %s%s%s\n", result.ok ? "PASS" : "FAIL",
                    criterion.id, criterion.name,
                    result.detail.empty() ? "" : " -- ",
                    result.detail.c_str());
        std::fflush(stdout);
    }
    return all_ok ? 0 : 1;
}
