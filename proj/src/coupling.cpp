#include "mes/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "mes/rng.hpp"

namespace mes {

CoupledSample::CoupledSample(std::size_t rows, std::size_t cols,
                             std::vector<double> grid)
    : rows_(rows), cols_(cols), values_(rows * cols, 0.0), grid_(std::move(grid)) {}

CoupledSample CoupledSample::from_matrix(std::size_t rows, std::size_t cols,
                                         std::vector<double> values) {
    if (rows * cols != values.size()) {
        throw std::invalid_argument("CoupledSample: matrix size mismatch");
    }
    CoupledSample sample(rows, cols, {});
    sample.values_ = std::move(values);
    return sample;
}

std::vector<double> CoupledSample::column(std::size_t c) const {
    std::vector<double> out(rows_);
    for (std::size_t r = 0; r < rows_; ++r) out[r] = values_[r * cols_ + c];
    return out;
}

std::vector<double> CoupledSample::row_sums() const {
    std::vector<double> out(rows_, 0.0);
    for (std::size_t r = 0; r < rows_; ++r) {
        double acc = 0.0;
        for (std::size_t c = 0; c < cols_; ++c) acc += values_[r * cols_ + c];
        out[r] = acc;
    }
    return out;
}

CoupledSample couple(const std::vector<Distribution>& marginals,
                     const CouplingKind& kind, std::size_t n) {
    if (marginals.empty()) throw std::invalid_argument("couple: no marginals");
    if (n < 2) throw std::invalid_argument("couple: need n >= 2");
    const std::size_t d = marginals.size();

    CoupledSample sample(n, d, midpoint_grid(n));
    const auto& u = sample.grid();

    if (std::holds_alternative<Comonotone>(kind)) {
        for (std::size_t c = 0; c < d; ++c) {
            for (std::size_t r = 0; r < n; ++r) {
                sample.at(r, c) = marginals[c].quantile(u[r]);
            }
        }
        return sample;
    }
    if (const auto* anti = std::get_if<AntimonotoneAt>(&kind)) {
        if (anti->index >= d) {
            throw std::invalid_argument("couple: antimonotone index out of range");
        }
        for (std::size_t c = 0; c < d; ++c) {
            for (std::size_t r = 0; r < n; ++r) {
                const double v = c == anti->index ? 1.0 - u[r] : u[r];
                sample.at(r, c) = marginals[c].quantile(v);
            }
        }
        return sample;
    }
    if (std::holds_alternative<Mix3Uniform>(kind)) {
        if (d != 3) throw std::invalid_argument("couple: Mix3Uniform needs d = 3");
        for (std::size_t r = 0; r < n; ++r) {
            const auto y = mix_uniform3_map(u[r]);
            for (std::size_t c = 0; c < 3; ++c) {
                sample.at(r, c) = marginals[c].quantile(y[c]);
            }
        }
        return sample;
    }
    const auto& indep = std::get<Independent>(kind);
    for (std::size_t c = 0; c < d; ++c) {
        auto perm = permuted_midpoint_grid(n, mix_seed(indep.seed, c));
        for (std::size_t r = 0; r < n; ++r) {
            sample.at(r, c) = marginals[c].quantile(perm[r]);
        }
    }
    return sample;
}

std::array<double, 3> mix_uniform3_map(double u) {
    if (!(u >= 0.0 && u <= 1.0)) {
        throw std::domain_error("mix_uniform3_map: u outside [0,1]");
    }
    const double y2 = u <= 0.5 ? -2.0 * u + 1.0 : -2.0 * u + 2.0;
    const double y3 = u <= 0.5 ? u + 0.5 : u - 0.5;
    return {u, y2, y3};
}

CoupledSample mix_uniform3(std::size_t n) {
    if (n < 2) throw std::invalid_argument("mix_uniform3: need n >= 2");
    CoupledSample sample(n, 3, midpoint_grid(n));
    const auto& u = sample.grid();
    for (std::size_t r = 0; r < n; ++r) {
        const auto y = mix_uniform3_map(u[r]);
        for (std::size_t c = 0; c < 3; ++c) sample.at(r, c) = y[c];
    }
    return sample;
}

namespace {

// Mid-rank vector: ties share the average of the ranks they occupy.
std::vector<double> mid_ranks(std::span<const double> values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        const double shared = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = shared;
        i = j + 1;
    }
    return ranks;
}

}  // namespace

double antimonotone_diagnostic(std::span<const double> x,
                               std::span<const double> s) {
    if (x.size() != s.size()) {
        throw std::invalid_argument("antimonotone_diagnostic: length mismatch");
    }
    if (x.size() < 2) {
        throw std::invalid_argument("antimonotone_diagnostic: need length >= 2");
    }
    const auto rx = mid_ranks(x);
    const auto rs = mid_ranks(s);
    const double n = static_cast<double>(x.size());
    const double mean_rank = 0.5 * (n + 1.0);

    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = rx[i] - mean_rank;
        const double ds = rs[i] - mean_rank;
        sxy += dx * ds;
        sxx += dx * dx;
        syy += ds * ds;
    }
    if (sxx == 0.0 || syy == 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace mes
