#include "mes/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "mes/special.hpp"

namespace mes {

namespace {

void require(bool cond, const char* msg) {
    if (!cond) throw std::invalid_argument(msg);
}

void check_probability_open(double u, const char* what) {
    if (!(u > 0.0 && u < 1.0)) {
        throw std::domain_error(std::string(what) + ": probability outside (0,1)");
    }
}

double sum_of(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0);
}

struct QuantileVisitor {
    double u;

    double operator()(const Normal& d) const {
        return d.mu + d.sigma * normal_quantile(u);
    }
    double operator()(const Lognormal& d) const {
        return std::exp(d.mu + d.sigma * normal_quantile(u));
    }
    double operator()(const Uniform& d) const { return d.a + (d.b - d.a) * u; }
    double operator()(const Exponential& d) const {
        return -std::log1p(-u) / d.rate;
    }
    double operator()(const Gamma& d) const {
        return gamma_quantile(d.shape, u) / d.rate;
    }
    double operator()(const Lomax& d) const {
        return d.scale * std::expm1(-std::log1p(-u) / d.shape);
    }
    double operator()(const Empirical& d) const {
        const std::size_t k = ceil_index(u, d.values.size());
        return d.values[k == 0 ? 0 : k - 1];
    }
};

struct CdfVisitor {
    double x;

    double operator()(const Normal& d) const {
        return normal_cdf((x - d.mu) / d.sigma);
    }
    double operator()(const Lognormal& d) const {
        if (x <= 0.0) return 0.0;
        return normal_cdf((std::log(x) - d.mu) / d.sigma);
    }
    double operator()(const Uniform& d) const {
        if (x <= d.a) return 0.0;
        if (x >= d.b) return 1.0;
        return (x - d.a) / (d.b - d.a);
    }
    double operator()(const Exponential& d) const {
        return x <= 0.0 ? 0.0 : -std::expm1(-d.rate * x);
    }
    double operator()(const Gamma& d) const {
        return x <= 0.0 ? 0.0 : gamma_p(d.shape, d.rate * x);
    }
    double operator()(const Lomax& d) const {
        return x <= 0.0 ? 0.0 : -std::expm1(-d.shape * std::log1p(x / d.scale));
    }
    double operator()(const Empirical& d) const {
        const auto it = std::upper_bound(d.values.begin(), d.values.end(), x);
        return static_cast<double>(it - d.values.begin()) /
               static_cast<double>(d.values.size());
    }
};

struct MeanVisitor {
    double operator()(const Normal& d) const { return d.mu; }
    double operator()(const Lognormal& d) const {
        return std::exp(d.mu + 0.5 * d.sigma * d.sigma);
    }
    double operator()(const Uniform& d) const { return 0.5 * (d.a + d.b); }
    double operator()(const Exponential& d) const { return 1.0 / d.rate; }
    double operator()(const Gamma& d) const { return d.shape / d.rate; }
    double operator()(const Lomax& d) const {
        if (d.shape <= 1.0) {
            throw std::domain_error("Lomax: mean undefined for shape <= 1");
        }
        return d.scale / (d.shape - 1.0);
    }
    double operator()(const Empirical& d) const {
        return sum_of(d.values) / static_cast<double>(d.values.size());
    }
};

struct EsVisitor {
    double p;

    double operator()(const Normal& d) const {
        return d.mu + d.sigma * normal_pdf(normal_quantile(p)) / (1.0 - p);
    }
    double operator()(const Lognormal& d) const {
        const double m = std::exp(d.mu + 0.5 * d.sigma * d.sigma);
        return m * normal_cdf(d.sigma - normal_quantile(p)) / (1.0 - p);
    }
    double operator()(const Uniform& d) const {
        return d.a + (d.b - d.a) * 0.5 * (1.0 + p);
    }
    double operator()(const Exponential& d) const {
        return (1.0 - std::log1p(-p)) / d.rate;
    }
    double operator()(const Gamma& d) const {
        const double var = gamma_quantile(d.shape, p);
        return (d.shape / d.rate) * (1.0 - gamma_p(d.shape + 1.0, var)) / (1.0 - p);
    }
    double operator()(const Lomax& d) const {
        if (d.shape <= 1.0) {
            throw std::domain_error("Lomax: infinite mean, es undefined for shape <= 1");
        }
        return d.scale * d.shape * std::pow(1.0 - p, -1.0 / d.shape) / (d.shape - 1.0) -
               d.scale;
    }
    double operator()(const Empirical& d) const {
        const std::size_t n = d.values.size();
        const std::size_t k = ceil_index(p, n);
        const double var = d.values[k == 0 ? 0 : k - 1];
        auto first = std::upper_bound(d.values.begin(), d.values.end(), var);
        if (first == d.values.end()) {
            // Degenerate strict tail; fall back to the weak tail.
            first = std::lower_bound(d.values.begin(), d.values.end(), var);
        }
        const auto count = static_cast<double>(d.values.end() - first);
        return std::accumulate(first, d.values.end(), 0.0) / count;
    }
};

struct LesVisitor {
    double q;

    double operator()(const Normal& d) const {
        return d.mu - d.sigma * normal_pdf(normal_quantile(q)) / q;
    }
    double operator()(const Lognormal& d) const {
        const double m = std::exp(d.mu + 0.5 * d.sigma * d.sigma);
        return m * normal_cdf(normal_quantile(q) - d.sigma) / q;
    }
    double operator()(const Uniform& d) const { return d.a + (d.b - d.a) * 0.5 * q; }
    double operator()(const Exponential& d) const {
        return ((1.0 - q) * std::log1p(-q) + q) / (d.rate * q);
    }
    double operator()(const Gamma& d) const {
        const double var = gamma_quantile(d.shape, q);
        return (d.shape / d.rate) * gamma_p(d.shape + 1.0, var) / q;
    }
    double operator()(const Lomax& d) const {
        if (d.shape <= 1.0) {
            throw std::domain_error("Lomax: infinite mean, les undefined for shape <= 1");
        }
        const double inv = 1.0 / d.shape;
        const double head = -std::expm1((1.0 - inv) * std::log1p(-q));
        return (d.scale / q) * (head / (1.0 - inv) - q);
    }
    double operator()(const Empirical& d) const {
        const std::size_t n = d.values.size();
        const std::size_t k = ceil_index(q, n);
        const double var = d.values[k == 0 ? 0 : k - 1];
        auto last = std::lower_bound(d.values.begin(), d.values.end(), var);
        if (last == d.values.begin()) {
            last = std::upper_bound(d.values.begin(), d.values.end(), var);
        }
        const auto count = static_cast<double>(last - d.values.begin());
        return std::accumulate(d.values.begin(), last, 0.0) / count;
    }
};

struct DescribeVisitor {
    std::string operator()(const Normal& d) const {
        std::ostringstream os;
        os << "normal(" << d.mu << "," << d.sigma << ")";
        return os.str();
    }
    std::string operator()(const Lognormal& d) const {
        std::ostringstream os;
        os << "lognormal(" << d.mu << "," << d.sigma << ")";
        return os.str();
    }
    std::string operator()(const Uniform& d) const {
        std::ostringstream os;
        os << "uniform(" << d.a << "," << d.b << ")";
        return os.str();
    }
    std::string operator()(const Exponential& d) const {
        std::ostringstream os;
        os << "exponential(" << d.rate << ")";
        return os.str();
    }
    std::string operator()(const Gamma& d) const {
        std::ostringstream os;
        os << "gamma(" << d.shape << "," << d.rate << ")";
        return os.str();
    }
    std::string operator()(const Lomax& d) const {
        std::ostringstream os;
        os << "lomax(" << d.shape << "," << d.scale << ")";
        return os.str();
    }
    std::string operator()(const Empirical& d) const {
        std::ostringstream os;
        os << "empirical(n=" << d.values.size() << ")";
        return os.str();
    }
};

}  // namespace

Distribution::Distribution(Normal p) : law_(p) {
    require(std::isfinite(p.mu) && std::isfinite(p.sigma) && p.sigma > 0.0,
            "Normal: sigma must be positive and parameters finite");
}

Distribution::Distribution(Lognormal p) : law_(p) {
    require(std::isfinite(p.mu) && std::isfinite(p.sigma) && p.sigma > 0.0,
            "Lognormal: sigma must be positive and parameters finite");
}

Distribution::Distribution(Uniform p) : law_(p) {
    require(std::isfinite(p.a) && std::isfinite(p.b) && p.a < p.b,
            "Uniform: requires a < b");
}

Distribution::Distribution(Exponential p) : law_(p) {
    require(std::isfinite(p.rate) && p.rate > 0.0,
            "Exponential: rate must be positive");
}

Distribution::Distribution(Gamma p) : law_(p) {
    require(std::isfinite(p.shape) && std::isfinite(p.rate) && p.shape > 0.0 &&
                p.rate > 0.0,
            "Gamma: shape and rate must be positive");
}

Distribution::Distribution(Lomax p) : law_(p) {
    require(std::isfinite(p.shape) && std::isfinite(p.scale) && p.shape > 0.0 &&
                p.scale > 0.0,
            "Lomax: shape and scale must be positive");
}

Distribution::Distribution(Empirical p) : law_(std::move(p)) {
    const auto& values = std::get<Empirical>(law_).values;
    require(!values.empty(), "Empirical: sample must be non-empty");
    for (double v : values) {
        require(std::isfinite(v), "Empirical: sample contains a non-finite value");
    }
    require(std::is_sorted(values.begin(), values.end()),
            "Empirical: values must be sorted ascending");
}

Distribution Distribution::from_sample(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    return Distribution(Empirical{std::move(values)});
}

double Distribution::quantile(double u) const {
    check_probability_open(u, "quantile");
    return std::visit(QuantileVisitor{u}, law_);
}

double Distribution::cdf(double x) const { return std::visit(CdfVisitor{x}, law_); }

double Distribution::mean() const { return std::visit(MeanVisitor{}, law_); }

double Distribution::es(double p) const {
    if (!(p >= 0.0 && p < 1.0)) throw std::domain_error("es: p outside [0,1)");
    if (p == 0.0) return mean();
    return std::visit(EsVisitor{p}, law_);
}

double Distribution::les(double q) const {
    if (!(q > 0.0 && q <= 1.0)) throw std::domain_error("les: q outside (0,1]");
    if (q == 1.0) return mean();
    return std::visit(LesVisitor{q}, law_);
}

bool Distribution::has_finite_mean() const noexcept {
    if (const auto* lomax = std::get_if<Lomax>(&law_)) {
        return lomax->shape > 1.0;
    }
    return true;
}

bool Distribution::is_empirical() const noexcept {
    return std::holds_alternative<Empirical>(law_);
}

std::string Distribution::describe() const {
    return std::visit(DescribeVisitor{}, law_);
}

namespace {

// Composite Simpson of f over [a,b] with an even number of intervals.
template <typename F>
double simpson(F&& f, double a, double b, int intervals) {
    const double h = (b - a) / intervals;
    double sum = f(a) + f(b);
    for (int i = 1; i < intervals; ++i) {
        sum += f(a + h * i) * (i % 2 == 1 ? 4.0 : 2.0);
    }
    return sum * h / 3.0;
}

}  // namespace

double quantile_integral(const Distribution& law, double lo, double hi) {
    constexpr double clip = 1e-12;
    constexpr int intervals = 5000;
    lo = std::max(lo, clip);
    hi = std::min(hi, 1.0 - clip);
    if (!(lo < hi)) throw std::invalid_argument("quantile_integral: empty range");

    // Integrate on a cubic-compressed axis so endpoint singularities of the
    // quantile (heavy upper tails, unbounded lower support) stay resolvable
    // with uniformly spaced Simpson nodes.
    const auto lower_piece = [&](double from, double to) {
        // u = s^3 on [from, to], both <= 1/2.
        const double s0 = std::cbrt(from);
        const double s1 = std::cbrt(to);
        return simpson(
            [&](double s) { return law.quantile(s * s * s) * 3.0 * s * s; }, s0, s1,
            intervals);
    };
    const auto upper_piece = [&](double from, double to) {
        // u = 1 - s^3, s descending as u rises; flip to an ascending s-axis.
        const double s0 = std::cbrt(1.0 - to);
        const double s1 = std::cbrt(1.0 - from);
        return simpson(
            [&](double s) { return law.quantile(1.0 - s * s * s) * 3.0 * s * s; },
            s0, s1, intervals);
    };

    if (hi <= 0.5) return lower_piece(lo, hi);
    if (lo >= 0.5) return upper_piece(lo, hi);
    return lower_piece(lo, 0.5) + upper_piece(0.5, hi);
}

}  // namespace mes
