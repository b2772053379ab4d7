#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "mes/bounds_core.hpp"
#include "mes/coupling.hpp"
#include "mes/distributions.hpp"

using namespace mes;

namespace {

std::vector<Distribution> uniforms(std::size_t d) {
    return std::vector<Distribution>(d, Distribution(Uniform{0.0, 1.0}));
}

double kolmogorov_distance_to_uniform(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    const double n = static_cast<double>(values.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double hi = (i + 1.0) / n - values[i];
        const double lo = values[i] - i / n;
        worst = std::max({worst, std::fabs(hi), std::fabs(lo)});
    }
    return worst;
}

}  // namespace

TEST_CASE("couple: comonotone uniforms on the midpoint grid") {
    const auto sample = couple(uniforms(2), Comonotone{}, 4);
    const double expected[4] = {0.125, 0.375, 0.625, 0.875};
    for (std::size_t r = 0; r < 4; ++r) {
        CHECK(sample(r, 0) == doctest::Approx(expected[r]));
        CHECK(sample(r, 1) == doctest::Approx(expected[r]));
    }
}

TEST_CASE("couple: antimonotone component flips its grid") {
    const auto sample = couple(uniforms(2), AntimonotoneAt{0}, 2);
    CHECK(sample(0, 0) == doctest::Approx(0.75));
    CHECK(sample(0, 1) == doctest::Approx(0.25));
    CHECK(sample(1, 0) == doctest::Approx(0.25));
    CHECK(sample(1, 1) == doctest::Approx(0.75));
}

TEST_CASE("couple: errors") {
    CHECK_THROWS_AS(couple({}, Comonotone{}, 8), std::invalid_argument);
    CHECK_THROWS_AS(couple(uniforms(2), Comonotone{}, 1), std::invalid_argument);
    CHECK_THROWS_AS(couple(uniforms(2), AntimonotoneAt{2}, 8), std::invalid_argument);
}

TEST_CASE("couple: three normals, aggregate antimonotone to the flipped column") {
    const std::vector<Distribution> normals(3, Distribution(Normal{0.0, 1.0}));
    const auto sample = couple(normals, AntimonotoneAt{0}, 1000);
    const auto x1 = sample.column(0);
    const auto s = sample.row_sums();
    CHECK(antimonotone_diagnostic(x1, s) == doctest::Approx(-1.0));
    for (std::size_t c = 1; c < 3; ++c) {
        CHECK(antimonotone_diagnostic(sample.column(c), x1) == doctest::Approx(-1.0));
    }
}

TEST_CASE("couple: comonotone pairwise rank correlations are +1") {
    const std::vector<Distribution> laws = {Distribution(Normal{0.0, 1.0}),
                                            Distribution(Exponential{2.0}),
                                            Distribution(Lomax{3.0, 1.0})};
    const auto sample = couple(laws, Comonotone{}, 500);
    for (std::size_t a = 0; a < 3; ++a) {
        for (std::size_t b = a + 1; b < 3; ++b) {
            CHECK(antimonotone_diagnostic(sample.column(a), sample.column(b)) ==
                  doctest::Approx(1.0));
        }
    }
}

TEST_CASE("couple: independent columns are deterministic given the seed") {
    const auto a = couple(uniforms(3), Independent{421}, 256);
    const auto b = couple(uniforms(3), Independent{421}, 256);
    const auto c = couple(uniforms(3), Independent{422}, 256);
    bool same = true;
    bool differs = false;
    for (std::size_t r = 0; r < 256; ++r) {
        for (std::size_t k = 0; k < 3; ++k) {
            same = same && a(r, k) == b(r, k);
            differs = differs || a(r, k) != c(r, k);
        }
    }
    CHECK(same);
    CHECK(differs);
    // Every column keeps the exact grid marginal.
    for (std::size_t k = 0; k < 3; ++k) {
        CHECK(kolmogorov_distance_to_uniform(a.column(k)) <= 1.0 / 256.0 + 1e-12);
    }
}

TEST_CASE("mix_uniform3: pinned map values and constant row sums") {
    const auto at_quarter = mix_uniform3_map(0.25);
    CHECK(at_quarter[0] == doctest::Approx(0.25));
    CHECK(at_quarter[1] == doctest::Approx(0.5));
    CHECK(at_quarter[2] == doctest::Approx(0.75));

    const auto at_three_quarters = mix_uniform3_map(0.75);
    CHECK(at_three_quarters[0] == doctest::Approx(0.75));
    CHECK(at_three_quarters[1] == doctest::Approx(0.5));
    CHECK(at_three_quarters[2] == doctest::Approx(0.25));

    const auto sample = mix_uniform3(10000);
    for (double s : sample.row_sums()) {
        CHECK(s == doctest::Approx(1.5).epsilon(1e-12));
    }
    for (std::size_t c = 0; c < 3; ++c) {
        CHECK(kolmogorov_distance_to_uniform(sample.column(c)) <=
              1.0 / 10000.0 + 1e-12);
    }
}

TEST_CASE("antimonotone_diagnostic: pinned values and errors") {
    const std::vector<double> x = {1.0, 2.0, 3.0};
    const std::vector<double> falling = {9.0, 5.0, 1.0};
    const std::vector<double> rising = {1.0, 5.0, 9.0};
    const std::vector<double> short_one = {1.0};
    CHECK(antimonotone_diagnostic(x, falling) == doctest::Approx(-1.0));
    CHECK(antimonotone_diagnostic(x, rising) == doctest::Approx(1.0));
    CHECK_THROWS_AS(antimonotone_diagnostic(x, short_one), std::invalid_argument);
}

TEST_CASE("antimonotone_diagnostic: dominant column defeats the flip") {
    // With sigma = (3,1,1), flipping column 0 leaves the aggregate
    // comonotone with it, so the lower Frechet bound is not attained.
    const std::vector<Distribution> laws = {Distribution(Normal{0.0, 3.0}),
                                            Distribution(Normal{0.0, 1.0}),
                                            Distribution(Normal{0.0, 1.0})};
    const auto sample = couple(laws, AntimonotoneAt{0}, 1000);
    CHECK(antimonotone_diagnostic(sample.column(0), sample.row_sums()) ==
          doctest::Approx(1.0));
}

TEST_CASE("discrete five-point example: tail conventions under ties") {
    // Mass points {-2,-1,0,1,2} and {-1,1,3,5,7} with equal weights.
    // Under the antimonotone coupling the aggregate is comonotone with the
    // second component, so its MES at p = 0.6 is the two-point tail mean 6,
    // while the Frechet pairing of the second component against the flipped
    // aggregate yields 0.
    const std::vector<double> x2 = {7.0, 5.0, 3.0, 1.0, -1.0};
    const std::vector<double> s = {5.0, 4.0, 3.0, 2.0, 1.0};
    CHECK(mes_from_samples(x2, s, 0.6) == doctest::Approx(6.0));

    const std::vector<double> x2_sorted = {-1.0, 1.0, 3.0, 5.0, 7.0};
    const std::vector<double> s_flipped = {5.0, 4.0, 3.0, 2.0, 1.0};
    CHECK(mes_from_samples(x2_sorted, s_flipped, 0.6) == doctest::Approx(0.0));
}

TEST_CASE("stochastic dominance of tail distributions across couplings") {
    // d = 2 uniforms: the comonotone tail law of X_1 dominates the
    // independent one, which dominates the antimonotone one.
    const std::size_t n = 10000;
    const double tol = 3.0 / std::sqrt(static_cast<double>(n));
    const auto laws = uniforms(2);
    const auto como = couple(laws, Comonotone{}, n);
    const auto indep = couple(laws, Independent{99}, n);
    const auto anti = couple(laws, AntimonotoneAt{0}, n);

    const auto tail_values = [&](const CoupledSample& sample, double p) {
        const auto x = sample.column(0);
        const auto s = sample.row_sums();
        std::vector<double> sorted(s);
        std::sort(sorted.begin(), sorted.end());
        const double var = sorted[static_cast<std::size_t>(std::ceil(p * n)) - 1];
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
        const auto tail_como = tail_values(como, p);
        const auto tail_indep = tail_values(indep, p);
        const auto tail_anti = tail_values(anti, p);
        for (double t = 0.025; t < 1.0; t += 0.025) {
            const double fc = ecdf(tail_como, t);
            const double fi = ecdf(tail_indep, t);
            const double fa = ecdf(tail_anti, t);
            CHECK(fc <= fi + tol);
            CHECK(fi <= fa + tol);
        }
    }
}

TEST_CASE("external matrix coupling can be certified") {
    // Caller-supplied mixability construction; the diagnostic certifies the
    // dependence while marginals stay the caller's responsibility.
    const auto sample = CoupledSample::from_matrix(
        4, 2, {0.1, 0.9, 0.4, 0.6, 0.6, 0.4, 0.9, 0.1});
    CHECK(antimonotone_diagnostic(sample.column(0), sample.column(1)) ==
          doctest::Approx(-1.0));
    CHECK_THROWS_AS(CoupledSample::from_matrix(3, 2, std::vector<double>{1.0}),
                    std::invalid_argument);
}
