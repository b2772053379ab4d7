#include "mes/empirical.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include "mes/rng.hpp"
#include "mes/special.hpp"

namespace mes {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0;
    std::size_t b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) cells.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

bool parse_number(const std::string& text, double& out) {
    if (text.empty()) return false;
    char* end = nullptr;
    out = std::strtod(text.c_str(), &end);
    return end == text.c_str() + text.size() && std::isfinite(out);
}

bool looks_like_iso_date(const std::string& s) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
    for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u}) {
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    }
    return true;
}

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!trim(line).empty()) lines.push_back(line);
    }
    return lines;
}

}  // namespace

LossPanel load_loss_csv(const std::string& path) {
    const auto lines = read_lines(path);
    if (lines.empty()) throw std::runtime_error(path + ": empty file");

    const auto header = split_csv_line(lines[0]);
    if (header.size() < 2 || trim(header[0]) != "date") {
        throw std::runtime_error(path + ": unparseable header, expected date,<ticker>,...");
    }

    LossPanel panel;
    panel.tickers.assign(header.begin() + 1, header.end());
    for (const auto& t : panel.tickers) {
        if (t.empty()) throw std::runtime_error(path + ": empty ticker in header");
    }
    const std::size_t d = panel.tickers.size();

    std::set<std::string> seen;
    for (std::size_t r = 1; r < lines.size(); ++r) {
        const auto cells = split_csv_line(lines[r]);
        if (cells.size() != d + 1 || !looks_like_iso_date(cells[0])) {
            ++panel.dropped_rows;
            continue;
        }
        std::vector<double> row(d);
        bool ok = true;
        for (std::size_t i = 0; i < d; ++i) {
            if (!parse_number(cells[i + 1], row[i])) {
                ok = false;
                break;
            }
        }
        if (!ok) {
            ++panel.dropped_rows;
            continue;
        }
        if (!seen.insert(cells[0]).second) {
            throw std::runtime_error(path + ": duplicate date " + cells[0]);
        }
        panel.dates.push_back(cells[0]);
        panel.losses.insert(panel.losses.end(), row.begin(), row.end());
    }
    if (panel.dates.size() < 2) {
        throw std::runtime_error(path + ": fewer than 2 usable rows");
    }

    // Keep rows in date order regardless of file order.
    std::vector<std::size_t> order(panel.dates.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return panel.dates[a] < panel.dates[b];
    });
    LossPanel sorted;
    sorted.tickers = panel.tickers;
    sorted.dropped_rows = panel.dropped_rows;
    sorted.losses.reserve(panel.losses.size());
    for (std::size_t t : order) {
        sorted.dates.push_back(panel.dates[t]);
        for (std::size_t i = 0; i < d; ++i) {
            sorted.losses.push_back(panel.loss(t, i));
        }
    }
    return sorted;
}

FactorPanel load_factor_csv(const std::string& path, bool percent) {
    const auto lines = read_lines(path);
    if (lines.empty()) throw std::runtime_error(path + ": empty file");

    static const char* kColumns[] = {"date", "MKT_RF", "SMB", "HML",
                                     "RMW",  "CMA",    "RF"};
    const auto header = split_csv_line(lines[0]);
    for (std::size_t c = 0; c < 7; ++c) {
        if (c >= header.size() || header[c] != kColumns[c]) {
            throw std::runtime_error(path + ": missing required column " +
                                     kColumns[c]);
        }
    }

    const double scale = percent ? 0.01 : 1.0;
    FactorPanel panel;
    std::set<std::string> seen;
    for (std::size_t r = 1; r < lines.size(); ++r) {
        const auto cells = split_csv_line(lines[r]);
        if (cells.size() < 7 || !looks_like_iso_date(cells[0])) {
            ++panel.dropped_rows;
            continue;
        }
        double values[6];
        bool ok = true;
        for (std::size_t c = 0; c < 6; ++c) {
            if (!parse_number(cells[c + 1], values[c])) {
                ok = false;
                break;
            }
        }
        if (!ok) {
            ++panel.dropped_rows;
            continue;
        }
        if (!seen.insert(cells[0]).second) {
            throw std::runtime_error(path + ": duplicate date " + cells[0]);
        }
        panel.dates.push_back(cells[0]);
        for (std::size_t c = 0; c < kFactorCount; ++c) {
            panel.factors.push_back(values[c] * scale);
        }
        panel.rf_loss.push_back(-values[5] * scale);  // store as a loss
    }
    if (panel.dates.size() < 2) {
        throw std::runtime_error(path + ": fewer than 2 usable rows");
    }

    std::vector<std::size_t> order(panel.dates.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return panel.dates[a] < panel.dates[b];
    });
    FactorPanel sorted;
    sorted.dropped_rows = panel.dropped_rows;
    for (std::size_t t : order) {
        sorted.dates.push_back(panel.dates[t]);
        for (std::size_t c = 0; c < kFactorCount; ++c) {
            sorted.factors.push_back(panel.factor(t, c));
        }
        sorted.rf_loss.push_back(panel.rf_loss[t]);
    }
    return sorted;
}

void align_panels(LossPanel& losses, FactorPanel& factors) {
    std::set<std::string> loss_dates(losses.dates.begin(), losses.dates.end());
    std::set<std::string> common;
    for (const auto& date : factors.dates) {
        if (loss_dates.count(date)) common.insert(date);
    }
    if (common.size() < 2) {
        throw std::runtime_error("align_panels: fewer than 2 overlapping dates");
    }

    const std::size_t d = losses.cols();
    LossPanel new_losses;
    new_losses.tickers = losses.tickers;
    new_losses.dropped_rows = losses.dropped_rows;
    for (std::size_t t = 0; t < losses.rows(); ++t) {
        if (!common.count(losses.dates[t])) continue;
        new_losses.dates.push_back(losses.dates[t]);
        for (std::size_t i = 0; i < d; ++i) {
            new_losses.losses.push_back(losses.loss(t, i));
        }
    }

    FactorPanel new_factors;
    new_factors.dropped_rows = factors.dropped_rows;
    for (std::size_t t = 0; t < factors.rows(); ++t) {
        if (!common.count(factors.dates[t])) continue;
        new_factors.dates.push_back(factors.dates[t]);
        for (std::size_t c = 0; c < kFactorCount; ++c) {
            new_factors.factors.push_back(factors.factor(t, c));
        }
        new_factors.rf_loss.push_back(factors.rf_loss[t]);
    }

    losses = std::move(new_losses);
    factors = std::move(new_factors);
}

namespace {

// Householder QR of the n x k design (column-major), solving the least
// squares problem and exposing R for covariance computations. Returns false
// when a pivot collapses (rank-deficient design).
bool qr_least_squares(std::vector<double> a, std::size_t n, std::size_t k,
                      std::vector<double> y, std::vector<double>& beta,
                      std::vector<double>& r_upper) {
    auto at = [&](std::size_t row, std::size_t col) -> double& {
        return a[col * n + row];
    };

    double max_col_norm = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
        double ss = 0.0;
        for (std::size_t r = 0; r < n; ++r) ss += at(r, c) * at(r, c);
        max_col_norm = std::max(max_col_norm, std::sqrt(ss));
    }
    const double tol = std::max(max_col_norm, 1.0) * 1e-12;

    for (std::size_t c = 0; c < k; ++c) {
        double ss = 0.0;
        for (std::size_t r = c; r < n; ++r) ss += at(r, c) * at(r, c);
        const double norm = std::sqrt(ss);
        if (norm <= tol) return false;

        const double alpha = at(c, c) >= 0.0 ? -norm : norm;
        const double v0 = at(c, c) - alpha;
        std::vector<double> v(n - c);
        v[0] = v0;
        for (std::size_t r = c + 1; r < n; ++r) v[r - c] = at(r, c);
        const double vtv = alpha * alpha - 2.0 * alpha * at(c, c) + ss;
        if (vtv <= 0.0) return false;

        for (std::size_t j = c; j < k; ++j) {
            double dot = 0.0;
            for (std::size_t r = c; r < n; ++r) dot += v[r - c] * at(r, j);
            const double f = 2.0 * dot / vtv;
            for (std::size_t r = c; r < n; ++r) at(r, j) -= f * v[r - c];
        }
        double dot = 0.0;
        for (std::size_t r = c; r < n; ++r) dot += v[r - c] * y[r];
        const double f = 2.0 * dot / vtv;
        for (std::size_t r = c; r < n; ++r) y[r] -= f * v[r - c];
    }

    r_upper.assign(k * k, 0.0);
    for (std::size_t c = 0; c < k; ++c) {
        for (std::size_t r = 0; r <= c; ++r) r_upper[c * k + r] = at(r, c);
        if (std::fabs(r_upper[c * k + c]) <= tol) return false;
    }

    beta.assign(k, 0.0);
    for (std::size_t i = k; i-- > 0;) {
        double acc = y[i];
        for (std::size_t j = i + 1; j < k; ++j) acc -= r_upper[j * k + i] * beta[j];
        beta[i] = acc / r_upper[i * k + i];
    }
    return true;
}

// Diagonal of (X'X)^{-1} = R^{-1} R^{-T}: squared row norms of R^{-1}.
std::vector<double> xtx_inverse_diagonal(const std::vector<double>& r_upper,
                                         std::size_t k) {
    std::vector<double> inv(k * k, 0.0);
    for (std::size_t col = 0; col < k; ++col) {
        std::vector<double> e(k, 0.0);
        e[col] = 1.0;
        for (std::size_t i = k; i-- > 0;) {
            double acc = e[i];
            for (std::size_t j = i + 1; j < k; ++j) {
                acc -= r_upper[j * k + i] * inv[col * k + j];
            }
            inv[col * k + i] = acc / r_upper[i * k + i];
        }
    }
    std::vector<double> diag(k, 0.0);
    for (std::size_t row = 0; row < k; ++row) {
        double ss = 0.0;
        for (std::size_t col = 0; col < k; ++col) {
            const double v = inv[col * k + row];
            ss += v * v;
        }
        diag[row] = ss;
    }
    return diag;
}

}  // namespace

RegressionFit ffm_fit(const LossPanel& losses, const FactorPanel& factors) {
    if (losses.dates != factors.dates) {
        throw std::invalid_argument("ffm_fit: panels are not date-aligned");
    }
    const std::size_t n = losses.rows();
    const std::size_t d = losses.cols();
    constexpr std::size_t k = kFactorCount + 1;
    if (n < k + 7) {
        throw std::invalid_argument("ffm_fit: too few rows for identifiability");
    }

    // Shared design matrix [1, Y1..Y5], column-major.
    std::vector<double> design(n * k, 0.0);
    for (std::size_t t = 0; t < n; ++t) {
        design[t] = 1.0;
        for (std::size_t c = 0; c < kFactorCount; ++c) {
            design[(c + 1) * n + t] = factors.factor(t, c);
        }
    }

    RegressionFit fit;
    fit.assets.resize(d);
    for (std::size_t i = 0; i < d; ++i) {
        std::vector<double> response(n);
        for (std::size_t t = 0; t < n; ++t) {
            response[t] = losses.loss(t, i) - factors.rf_loss[t];
        }

        std::vector<double> beta;
        std::vector<double> r_upper;
        if (!qr_least_squares(design, n, k, response, beta, r_upper)) {
            throw std::runtime_error("ffm_fit: rank-deficient design for asset " +
                                     losses.tickers[i]);
        }

        AssetFit& asset = fit.assets[i];
        asset.mu = beta[0];
        asset.b.assign(beta.begin() + 1, beta.end());
        asset.residuals.resize(n);
        double rss = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
            double predicted = beta[0];
            for (std::size_t c = 0; c < kFactorCount; ++c) {
                predicted += beta[c + 1] * factors.factor(t, c);
            }
            asset.residuals[t] = response[t] - predicted;
            rss += asset.residuals[t] * asset.residuals[t];
        }
        const double s2 = rss / static_cast<double>(n - k);
        const auto diag = xtx_inverse_diagonal(r_upper, k);
        asset.mu_se = std::sqrt(s2 * diag[0]);
        asset.b_se.resize(kFactorCount);
        for (std::size_t c = 0; c < kFactorCount; ++c) {
            asset.b_se[c] = std::sqrt(s2 * diag[c + 1]);
        }
    }
    return fit;
}

namespace {

double mean_of(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sorted_quantile(const std::vector<double>& sorted, double u) {
    const std::size_t k = ceil_index(u, sorted.size());
    return sorted[k == 0 ? 0 : k - 1];
}

}  // namespace

SyntheticCoupling build_synthetic_coupling(const LossPanel& losses,
                                           const FactorPanel& factors,
                                           const RegressionFit& fit,
                                           std::size_t target,
                                           std::size_t n_syn,
                                           std::uint64_t seed) {
    const std::size_t n = losses.rows();
    const std::size_t d = losses.cols();
    if (target >= d) throw std::invalid_argument("synthetic coupling: bad target");
    if (fit.assets.size() != d) {
        throw std::invalid_argument("synthetic coupling: fit does not match panel");
    }

    // Common parts per date and sorted residuals per asset.
    std::vector<double> common(n * d, 0.0);
    std::vector<std::vector<double>> sorted_res(d);
    for (std::size_t i = 0; i < d; ++i) {
        const auto& asset = fit.assets[i];
        for (std::size_t t = 0; t < n; ++t) {
            double c = factors.rf_loss[t] + asset.mu;
            for (std::size_t f = 0; f < kFactorCount; ++f) {
                c += asset.b[f] * factors.factor(t, f);
            }
            common[t * d + i] = c;
        }
        sorted_res[i] = asset.residuals;
        std::sort(sorted_res[i].begin(), sorted_res[i].end());
    }

    const auto uniforms = permuted_midpoint_grid(n_syn, mix_seed(seed, 0x5e1));
    SyntheticCoupling out;
    out.comonotone_xj.resize(n_syn);
    out.comonotone_s.resize(n_syn);
    out.antimonotone_xj.resize(n_syn);
    out.antimonotone_s.resize(n_syn);
    for (std::size_t r = 0; r < n_syn; ++r) {
        const std::size_t t = r % n;
        const double u = uniforms[r];
        double sum_como = 0.0;
        double sum_anti = 0.0;
        double xj_syn = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            const double base = common[t * d + i];
            const double q_u = sorted_quantile(sorted_res[i], u);
            sum_como += base + q_u;
            if (i == target) {
                xj_syn = base + q_u;
                sum_anti += base + q_u;
            } else {
                sum_anti += base + sorted_quantile(sorted_res[i], 1.0 - u);
            }
        }
        out.comonotone_xj[r] = xj_syn;
        out.comonotone_s[r] = sum_como;
        out.antimonotone_xj[r] = xj_syn;
        out.antimonotone_s[r] = sum_anti;
    }
    return out;
}

std::vector<BoundsReport> empirical_bounds(const LossPanel& losses,
                                           const FactorPanel& factors,
                                           const RegressionFit& fit,
                                           std::size_t target,
                                           const EmpiricalBoundsConfig& config) {
    if (losses.dates != factors.dates) {
        throw std::invalid_argument("empirical_bounds: panels are not date-aligned");
    }
    const std::size_t n = losses.rows();
    const std::size_t d = losses.cols();
    if (target >= d) throw std::invalid_argument("empirical_bounds: target not found");
    if (fit.assets.size() != d) {
        throw std::invalid_argument("empirical_bounds: fit does not match panel");
    }
    for (double p : config.p_grid) {
        if (!(p >= 0.0 && p < 1.0)) {
            throw std::domain_error("empirical_bounds: p outside [0,1)");
        }
    }
    const std::size_t n_syn = config.n_syn == 0 ? 10 * n : config.n_syn;

    std::vector<double> xj(n);
    std::vector<double> s(n, 0.0);
    for (std::size_t t = 0; t < n; ++t) {
        xj[t] = losses.loss(t, target);
        double acc = 0.0;
        for (std::size_t i = 0; i < d; ++i) acc += losses.loss(t, i);
        s[t] = acc;
    }
    const double mean_xj = mean_of(xj);
    const auto law_j = Distribution::from_sample(xj);

    const auto synthetic = build_synthetic_coupling(losses, factors, fit, target,
                                                    n_syn, config.seed);
    const auto& como_xj = synthetic.comonotone_xj;
    const auto& como_s = synthetic.comonotone_s;
    const auto& anti_xj = synthetic.antimonotone_xj;
    const auto& anti_s = synthetic.antimonotone_s;

    std::vector<BoundsReport> reports;
    reports.reserve(config.p_grid.size());
    for (double p : config.p_grid) {
        BoundsReport report;
        report.p = p;
        if (p == 0.0) {
            // Conditioning on the full sample: every quantity is the mean.
            report.m = mean_xj;
            report.M = mean_xj;
            report.mf = mean_xj;
            report.Mf = mean_xj;
            report.mes = mean_xj;
            report.delta = 1.0;
        } else {
            report.m = law_j.les(1.0 - p);
            report.M = law_j.es(p);
            report.mes = mes_from_samples(xj, s, p);
            report.Mf = mes_from_samples(como_xj, como_s, p);
            report.mf = mes_from_samples(anti_xj, anti_s, p);
            if (*report.mf > *report.Mf) std::swap(*report.mf, *report.Mf);
            report.delta = spread_delta(report.m, report.M, *report.mf, *report.Mf);
        }
        const auto indices = srci(report);
        report.srci = indices.beta;
        report.srci_f = indices.beta_f;
        reports.push_back(report);
    }
    return reports;
}

SrciValues srci(const BoundsReport& report) {
    SrciValues out;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    out.beta = nan;
    out.beta_f = nan;
    if (!report.mes.has_value()) return out;
    const double mes_value = *report.mes;
    if (report.M > report.m) {
        out.beta = 1.0 - (report.M - mes_value) / (report.M - report.m);
    }
    if (report.Mf && report.mf && *report.Mf > *report.mf) {
        out.beta_f = 1.0 - (*report.Mf - mes_value) / (*report.Mf - *report.mf);
    }
    return out;
}

namespace {

std::string format_value(double v) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.6g", v);
    return buffer;
}

std::string format_optional(const std::optional<double>& v) {
    return v ? format_value(*v) : "nan";
}

}  // namespace

void write_bounds_csv(const std::string& path,
                      const std::vector<BoundsReport>& reports) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << "p,m,M,mf,Mf,mes,delta,srci,srci_f\n";
    for (const auto& r : reports) {
        out << format_value(r.p) << ',' << format_value(r.m) << ','
            << format_value(r.M) << ',' << format_optional(r.mf) << ','
            << format_optional(r.Mf) << ',' << format_optional(r.mes) << ','
            << format_optional(r.delta) << ',' << format_optional(r.srci) << ','
            << format_optional(r.srci_f) << '\n';
    }
}

namespace {

std::string format_date(std::chrono::sys_days day) {
    const std::chrono::year_month_day ymd(day);
    char buffer[16];
    std::snprintf(buffer, sizeof(buffer), "%04d-%02u-%02u",
                  static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()),
                  static_cast<unsigned>(ymd.day()));
    return buffer;
}

std::vector<std::string> business_dates(std::size_t count) {
    std::vector<std::string> dates;
    dates.reserve(count);
    std::chrono::sys_days day =
        std::chrono::sys_days(std::chrono::year{2005} / 1 / 3);
    while (dates.size() < count) {
        const std::chrono::weekday wd(day);
        if (wd != std::chrono::Saturday && wd != std::chrono::Sunday) {
            dates.push_back(format_date(day));
        }
        day += std::chrono::days{1};
    }
    return dates;
}

}  // namespace

SynthPanels generate_synthetic_panels(const SynthSpec& spec, std::uint64_t seed) {
    if (spec.days < 20 || spec.standard_assets < 2) {
        throw std::invalid_argument("generate_synthetic_panels: panel too small");
    }
    const std::size_t n = spec.days;
    const std::size_t n_std = spec.standard_assets;
    const std::size_t d =
        n_std + (spec.plant_crisis ? 1 : 0) + (spec.plant_hedge ? 1 : 0);

    SynthPanels out;
    out.factors.dates = business_dates(n);
    out.losses.dates = out.factors.dates;

    // Factor losses: market around 1% daily, style factors around 0.5%.
    static constexpr double kFactorSigma[kFactorCount] = {0.010, 0.005, 0.005,
                                                          0.005, 0.005};
    Rng factor_rng(mix_seed(seed, 0xfac));
    out.factors.factors.resize(n * kFactorCount);
    for (std::size_t t = 0; t < n; ++t) {
        for (std::size_t c = 0; c < kFactorCount; ++c) {
            out.factors.factors[t * kFactorCount + c] =
                kFactorSigma[c] * normal_quantile(factor_rng.next_open());
        }
    }
    out.factors.rf_loss.assign(n, -0.0001);  // constant risk-free return

    // Planted coefficients.
    Rng coef_rng(mix_seed(seed, 0xc0ef));
    std::vector<std::string> tickers;
    for (std::size_t i = 0; i < n_std; ++i) {
        std::string name;
        for (int c = 0; c < 3; ++c) name.push_back(static_cast<char>('A' + i));
        if (i >= 26) name = "T" + std::to_string(i);
        tickers.push_back(name);
        out.true_mu.push_back(4e-4 * (coef_rng.next_double() - 0.5));
        std::vector<double> b(kFactorCount);
        b[0] = 0.8 + 0.4 * coef_rng.next_double();
        for (std::size_t c = 1; c < kFactorCount; ++c) {
            b[c] = coef_rng.next_double() - 0.5;
        }
        out.true_b.push_back(b);
    }
    if (spec.plant_crisis) {
        tickers.emplace_back("CRISIS");
        out.true_mu.push_back(5e-4);
        out.true_b.push_back({1.3, 0.2, 0.2, 0.1, 0.1});
    }
    if (spec.plant_hedge) {
        tickers.emplace_back("HEDGE");
        out.true_mu.push_back(-2e-4);
        out.true_b.push_back({-0.8, -0.2, -0.1, -0.1, -0.1});
    }
    out.losses.tickers = tickers;

    // Standard residuals are iid; the planted assets ride (or fade) the
    // standardized market shock plus the aggregate standard residual, which
    // keeps them tail-dependent with the index in a way factors alone
    // cannot absorb.
    std::vector<std::vector<double>> residuals(d, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n_std; ++i) {
        Rng rng(mix_seed(seed, 0x2e5 + i));
        for (std::size_t t = 0; t < n; ++t) {
            residuals[i][t] = spec.residual_sigma * normal_quantile(rng.next_open());
        }
    }
    const double agg_scale = 1.5 / std::sqrt(static_cast<double>(n_std));
    std::size_t next = n_std;
    if (spec.plant_crisis) {
        for (std::size_t t = 0; t < n; ++t) {
            double agg = 0.0;
            for (std::size_t i = 0; i < n_std; ++i) agg += residuals[i][t];
            const double market = out.factors.factor(t, 0) / kFactorSigma[0];
            residuals[next][t] =
                agg_scale * agg + 1.5 * spec.residual_sigma * market;
        }
        ++next;
    }
    if (spec.plant_hedge) {
        for (std::size_t t = 0; t < n; ++t) {
            double agg = 0.0;
            for (std::size_t i = 0; i < n_std; ++i) agg += residuals[i][t];
            const double market = out.factors.factor(t, 0) / kFactorSigma[0];
            residuals[next][t] =
                -1.2 * agg_scale * agg - 1.2 * spec.residual_sigma * market;
        }
    }

    out.losses.losses.resize(n * d);
    for (std::size_t t = 0; t < n; ++t) {
        for (std::size_t i = 0; i < d; ++i) {
            double x = out.factors.rf_loss[t] + out.true_mu[i];
            for (std::size_t c = 0; c < kFactorCount; ++c) {
                x += out.true_b[i][c] * out.factors.factor(t, c);
            }
            out.losses.losses[t * d + i] = x + residuals[i][t];
        }
    }
    return out;
}

namespace {

std::string format_cell(double v) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.10g", v);
    return buffer;
}

}  // namespace

void write_loss_csv(const std::string& path, const LossPanel& panel) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << "date";
    for (const auto& t : panel.tickers) out << ',' << t;
    out << '\n';
    for (std::size_t t = 0; t < panel.rows(); ++t) {
        out << panel.dates[t];
        for (std::size_t i = 0; i < panel.cols(); ++i) {
            out << ',' << format_cell(panel.loss(t, i));
        }
        out << '\n';
    }
}

void write_factor_csv(const std::string& path, const FactorPanel& panel) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << "date,MKT_RF,SMB,HML,RMW,CMA,RF\n";
    for (std::size_t t = 0; t < panel.rows(); ++t) {
        out << panel.dates[t];
        for (std::size_t c = 0; c < kFactorCount; ++c) {
            out << ',' << format_cell(panel.factor(t, c));
        }
        out << ',' << format_cell(-panel.rf_loss[t]) << '\n';
    }
}

}  // namespace mes
