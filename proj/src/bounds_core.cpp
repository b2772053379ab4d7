#include "mes/bounds_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "mes/special.hpp"

namespace mes {

double unconstrained_upper(const Distribution& law_j, double p) {
    return law_j.es(p);
}

double unconstrained_lower(const Distribution& law_j, double p) {
    if (!(p >= 0.0 && p < 1.0)) {
        throw std::domain_error("unconstrained_lower: p outside [0,1)");
    }
    return law_j.les(1.0 - p);
}

namespace {

double sample_var(std::span<const double> s, double p) {
    const std::size_t k = ceil_index(p, s.size());
    if (k == 0) return -std::numeric_limits<double>::infinity();
    std::vector<double> sorted(s.begin(), s.end());
    std::nth_element(sorted.begin(), sorted.begin() + (k - 1), sorted.end());
    return sorted[k - 1];
}

McEstimate tail_moments(std::span<const double> xj, std::span<const double> s,
                        double var, bool strict) {
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t t = 0; t < s.size(); ++t) {
        const bool in_tail = strict ? s[t] > var : s[t] >= var;
        if (in_tail) {
            sum += xj[t];
            ++count;
        }
    }
    McEstimate est;
    est.tail_count = count;
    if (count == 0) return est;
    est.value = sum / static_cast<double>(count);

    double ss = 0.0;
    for (std::size_t t = 0; t < s.size(); ++t) {
        const bool in_tail = strict ? s[t] > var : s[t] >= var;
        if (in_tail) {
            const double d = xj[t] - est.value;
            ss += d * d;
        }
    }
    if (count > 1) {
        est.stderr_ = std::sqrt(ss / static_cast<double>(count - 1)) /
                      std::sqrt(static_cast<double>(count));
    }
    return est;
}

}  // namespace

McEstimate mes_estimate(std::span<const double> xj, std::span<const double> s,
                        double p, TailRule rule) {
    const std::size_t n = s.size();
    if (xj.size() != n) throw std::invalid_argument("mes_estimate: length mismatch");
    if (n < 1) throw std::invalid_argument("mes_estimate: empty sample");
    if (!(p >= 0.0 && p < 1.0)) {
        throw std::domain_error("mes_estimate: p outside [0,1)");
    }

    const double var = sample_var(s, p);
    switch (rule) {
        case TailRule::Strict: {
            const auto est = tail_moments(xj, s, var, true);
            if (est.tail_count == 0) {
                throw std::domain_error("mes_estimate: empty strict tail");
            }
            return est;
        }
        case TailRule::Weak:
            return tail_moments(xj, s, var, false);
        case TailRule::StrictThenWeak:
        default: {
            const auto est = tail_moments(xj, s, var, true);
            if (est.tail_count > 0) return est;
            return tail_moments(xj, s, var, false);
        }
    }
}

double mes_from_samples(std::span<const double> xj, std::span<const double> s,
                        double p, TailRule rule) {
    return mes_estimate(xj, s, p, rule).value;
}

McEstimate mes_mc(const PairSampler& sampler, double p, std::size_t n,
                  std::uint64_t seed, TailRule rule) {
    if (n < 2) throw std::invalid_argument("mes_mc: need n >= 2");
    constexpr std::size_t chunk_size = 1 << 16;

    std::vector<double> xj(n);
    std::vector<double> s(n);
    std::size_t done = 0;
    std::uint64_t chunk = 0;
    while (done < n) {
        const std::size_t len = std::min(chunk_size, n - done);
        Rng rng(mix_seed(seed, chunk));
        sampler(rng, std::span<double>(xj).subspan(done, len),
                std::span<double>(s).subspan(done, len));
        done += len;
        ++chunk;
    }
    return mes_estimate(xj, s, p, rule);
}

double spread_delta(double m, double M, double mf, double Mf) {
    if (m > M || mf > Mf) {
        throw std::invalid_argument("spread_delta: inverted bounds");
    }
    const double spread = M - m;
    if (spread == 0.0) return 1.0;
    return 1.0 - (Mf - mf) / spread;
}

}  // namespace mes
