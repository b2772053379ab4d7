#include "mes/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "mes/coupling.hpp"
#include "mes/distributions.hpp"
#include "mes/empirical.hpp"
#include "mes/linear_bounds.hpp"
#include "mes/special.hpp"

namespace mes::cli {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0;
    std::size_t b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::vector<std::string> tokens_of(const std::string& text) {
    std::istringstream in(text);
    std::vector<std::string> out;
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

Distribution parse_family(const std::vector<std::string>& tokens) {
    if (tokens.empty()) throw std::runtime_error("model file: empty family spec");
    const std::string& family = tokens[0];
    std::vector<double> params;
    for (std::size_t i = 1; i < tokens.size(); ++i) {
        params.push_back(std::stod(tokens[i]));
    }
    const auto need = [&](std::size_t k) {
        if (params.size() != k) {
            throw std::runtime_error("model file: family " + family + " expects " +
                                     std::to_string(k) + " parameters");
        }
    };
    if (family == "normal") {
        need(2);
        return Distribution(Normal{params[0], params[1]});
    }
    if (family == "lognormal") {
        need(2);
        return Distribution(Lognormal{params[0], params[1]});
    }
    if (family == "uniform") {
        need(2);
        return Distribution(Uniform{params[0], params[1]});
    }
    if (family == "exponential") {
        need(1);
        return Distribution(Exponential{params[0]});
    }
    if (family == "gamma") {
        need(2);
        return Distribution(Gamma{params[0], params[1]});
    }
    if (family == "lomax") {
        need(2);
        return Distribution(Lomax{params[0], params[1]});
    }
    throw std::runtime_error("model file: unknown family " + family);
}

std::vector<double> parse_reals(const std::string& text) {
    std::vector<double> out;
    for (const auto& tok : tokens_of(text)) out.push_back(std::stod(tok));
    return out;
}

std::string format3(double v) {
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "%.3f", v);
    return buffer;
}

}  // namespace

std::vector<double> parse_p_grid(const std::string& text) {
    const auto bad = [&] {
        return std::runtime_error("bad --p-grid, expected a:b:k with 0 <= a <= b < 1");
    };
    std::istringstream in(text);
    std::string part;
    std::vector<std::string> parts;
    while (std::getline(in, part, ':')) parts.push_back(part);
    if (parts.size() != 3) throw bad();
    const double a = std::stod(parts[0]);
    const double b = std::stod(parts[1]);
    const long k = std::stol(parts[2]);
    if (!(a >= 0.0 && a <= b && b < 1.0) || k < 1) throw bad();
    std::vector<double> grid;
    for (long i = 0; i <= k; ++i) {
        grid.push_back(a + (b - a) * static_cast<double>(i) / static_cast<double>(k));
    }
    return grid;
}

FactorModel parse_model_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open model file: " + path);

    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::runtime_error("model file: expected key = value, got: " + line);
        }
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }

    const auto get = [&](const std::string& key) -> std::string {
        const auto it = kv.find(key);
        if (it == kv.end()) throw std::runtime_error("model file: missing key " + key);
        return it->second;
    };

    const std::string kind = get("model");
    const Distribution factor = parse_family(tokens_of(get("factor")));

    std::size_t d = 0;
    if (kv.count("d")) d = static_cast<std::size_t>(std::stoul(kv["d"]));
    std::vector<Distribution> idio;
    if (kv.count("idio")) {
        if (d == 0) throw std::runtime_error("model file: shared idio needs d");
        idio.assign(d, parse_family(tokens_of(kv["idio"])));
    }
    for (std::size_t i = 1;; ++i) {
        const std::string key = "idio" + std::to_string(i);
        if (!kv.count(key)) break;
        if (idio.size() < i) idio.resize(i, parse_family(tokens_of(kv[key])));
        idio[i - 1] = parse_family(tokens_of(kv[key]));
    }
    if (idio.empty()) throw std::runtime_error("model file: no idiosyncratic laws");
    if (d != 0 && idio.size() != d) {
        throw std::runtime_error("model file: d does not match idio entries");
    }

    FactorModel model = [&]() -> FactorModel {
        if (kind == "abrm") {
            AbrmModel m{kv.count("mu") ? parse_reals(kv["mu"]) : std::vector<double>{},
                        parse_reals(get("b")), parse_reals(get("sigma")), factor,
                        idio};
            return m;
        }
        if (kind == "mbrm") {
            return MbrmModel{parse_reals(get("sigma")), factor, idio};
        }
        if (kind == "minbrm") {
            return MinBrmModel{factor, idio};
        }
        throw std::runtime_error("model file: model must be abrm, mbrm or minbrm");
    }();
    validate_model(model);
    return model;
}

void validate_reports(const std::vector<BoundsReport>& reports, double slack) {
    for (const auto& r : reports) {
        const auto fail = [&](const char* what) {
            std::ostringstream os;
            os << "bound-chain violation at p=" << r.p << ": " << what;
            throw std::runtime_error(os.str());
        };
        if (r.m > r.M + slack) fail("m > M");
        if (r.mf && r.Mf) {
            if (*r.mf > *r.Mf + slack) fail("mf > Mf");
            if (r.m > *r.mf + slack) fail("m > mf");
            if (*r.Mf > r.M + slack) fail("Mf > M");
        }
        if (r.mes) {
            if (*r.mes < r.m - slack) fail("mes < m");
            if (*r.mes > r.M + slack) fail("mes > M");
        }
    }
}

namespace {

int cmd_table1(const std::string& out_path) {
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot write file: " + out_path);
    out << "panel,p,b1,b2,mes,m,M,mf,Mf,delta\n";

    const struct {
        char name;
        double p;
        bool opposite;
    } panels[] = {{'A', 0.90, false},
                  {'B', 0.95, false},
                  {'C', 0.90, true},
                  {'D', 0.95, true}};
    const double loadings[] = {0.0, 0.3, 0.6, 0.9, 1.0};

    for (const auto& panel : panels) {
        std::vector<BoundsReport> reports;
        std::vector<std::string> rows;
        for (double b1 : loadings) {
            const double b2 = panel.opposite ? -b1 : b1;
            const auto bounds = abrm_normal_closed(b1, b2, 0, panel.p);
            // Point value: MES of the bivariate Gaussian pair with
            // correlation b1^2 between the two risks.
            const double sigma_s = std::sqrt(2.0 * (1.0 + b1 * b1));
            const double mes = bivariate_normal_mes(
                {0.0, 0.0, 1.0, sigma_s, (1.0 + b1 * b1) / sigma_s}, panel.p);

            BoundsReport report;
            report.p = panel.p;
            report.m = bounds.m;
            report.M = bounds.M;
            report.mf = bounds.mf;
            report.Mf = bounds.Mf;
            report.mes = mes;
            report.delta = bounds.delta;
            reports.push_back(report);

            char delta_text[32];
            std::snprintf(delta_text, sizeof(delta_text), "%.2f%%",
                          100.0 * bounds.delta);
            std::ostringstream row;
            row << panel.name << ',' << panel.p << ',' << b1 << ',' << b2 << ','
                << format3(mes) << ',' << format3(bounds.m) << ','
                << format3(bounds.M) << ',' << format3(bounds.mf) << ','
                << format3(bounds.Mf) << ',' << delta_text;
            rows.push_back(row.str());
        }
        validate_reports(reports, 1e-9);
        for (const auto& row : rows) out << row << '\n';
    }
    return 0;
}

int cmd_table2(const std::string& out_path) {
    const auto report = uniform3_verify(10000);
    if (!report.mixing_attains_lower || !report.comonotone_attains_upper) {
        throw std::runtime_error("table2: attainment check failed");
    }
    std::vector<BoundsReport> reports;
    for (const auto& row : report.rows) {
        BoundsReport r;
        r.p = row.p;
        r.m = row.m;
        r.M = row.M;
        r.mf = row.ml;
        r.Mf = row.Ml;
        r.mes = row.mes_mixing;
        reports.push_back(r);
    }
    validate_reports(reports, 1e-9);

    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot write file: " + out_path);
    out << "p,m,M,ml,Ml,delta\n";
    for (const auto& row : report.rows) {
        char delta_text[32];
        std::snprintf(delta_text, sizeof(delta_text), "%.0f%%", 100.0 * row.delta);
        out << row.p << ',' << format3(row.m) << ',' << format3(row.M) << ','
            << format3(row.ml) << ',' << format3(row.Ml) << ',' << delta_text
            << '\n';
    }
    return 0;
}

int cmd_bounds_parametric(const std::string& family, const std::string& params,
                          const std::vector<double>& p_grid,
                          const std::string& out_path) {
    std::vector<std::string> spec_tokens{family};
    for (const auto& tok : tokens_of(params)) spec_tokens.push_back(tok);
    std::istringstream comma_in(params);
    if (params.find(',') != std::string::npos) {
        spec_tokens.assign({family});
        std::string piece;
        while (std::getline(comma_in, piece, ',')) spec_tokens.push_back(trim(piece));
    }
    const Distribution law = parse_family(spec_tokens);

    std::vector<BoundsReport> reports;
    for (double p : p_grid) {
        BoundsReport r;
        r.p = p;
        r.m = unconstrained_lower(law, p);
        r.M = unconstrained_upper(law, p);
        reports.push_back(r);
    }
    validate_reports(reports, 1e-9);
    write_bounds_csv(out_path, reports);
    return 0;
}

int cmd_bounds_factor(const std::string& model_path, std::size_t j_one_based,
                      const std::vector<double>& p_grid, std::size_t n,
                      std::uint64_t seed, const std::string& out_path) {
    const FactorModel model = parse_model_file(model_path);
    if (j_one_based == 0 || j_one_based > model_dimension(model)) {
        throw std::runtime_error("bounds-factor: --j out of range");
    }
    const std::size_t j = j_one_based - 1;

    const auto marginal =
        Distribution::from_sample(model_marginal_sample(model, j, n, seed));

    std::vector<BoundsReport> reports;
    for (double p : p_grid) {
        BoundsReport r;
        r.p = p;
        r.m = unconstrained_lower(marginal, p);
        r.M = unconstrained_upper(marginal, p);
        r.Mf = constrained_upper_mc(model, j, p, n, seed).value;
        r.mf = constrained_lower_candidate_mc(model, j, p, n, seed).estimate.value;
        r.mes = model_mes_mc(model, j, p, n, seed).value;
        if (*r.mf > *r.Mf) std::swap(*r.mf, *r.Mf);
        r.delta = spread_delta(std::min(r.m, *r.mf), std::max(r.M, *r.Mf), *r.mf,
                               *r.Mf);
        const auto indices = srci(r);
        r.srci = indices.beta;
        r.srci_f = indices.beta_f;
        reports.push_back(r);
    }
    // Monte Carlo slack: three pooled standard errors at the coarsest level.
    validate_reports(reports, 0.02 * (reports.front().M - reports.front().m) + 1e-9);
    write_bounds_csv(out_path, reports);
    return 0;
}

struct EmpiricalInputs {
    std::string losses_path;
    std::string factors_path;
    bool percent = false;
};

void load_aligned(const EmpiricalInputs& inputs, LossPanel& losses,
                  FactorPanel& factors) {
    losses = load_loss_csv(inputs.losses_path);
    factors = load_factor_csv(inputs.factors_path, inputs.percent);
    if (losses.dropped_rows > 0) {
        std::cerr << "warning: dropped " << losses.dropped_rows
                  << " unusable loss rows\n";
    }
    if (factors.dropped_rows > 0) {
        std::cerr << "warning: dropped " << factors.dropped_rows
                  << " unusable factor rows\n";
    }
    align_panels(losses, factors);
}

std::size_t ticker_index(const LossPanel& losses, const std::string& target) {
    for (std::size_t i = 0; i < losses.tickers.size(); ++i) {
        if (losses.tickers[i] == target) return i;
    }
    throw std::runtime_error("target not found: " + target);
}

int cmd_empirical(const EmpiricalInputs& inputs, const std::string& target,
                  const std::vector<double>& p_grid, std::size_t n_syn,
                  std::uint64_t seed, const std::string& out_path) {
    LossPanel losses;
    FactorPanel factors;
    load_aligned(inputs, losses, factors);
    const auto fit = ffm_fit(losses, factors);
    const auto reports = empirical_bounds(losses, factors, fit,
                                          ticker_index(losses, target),
                                          {p_grid, n_syn, seed});
    validate_reports(reports, 1e-9);
    write_bounds_csv(out_path, reports);
    return 0;
}

int cmd_srci(const EmpiricalInputs& inputs, const std::string& targets_text,
             const std::vector<double>& levels, std::size_t n_syn,
             std::uint64_t seed, const std::string& out_path) {
    LossPanel losses;
    FactorPanel factors;
    load_aligned(inputs, losses, factors);
    const auto fit = ffm_fit(losses, factors);

    std::vector<std::string> targets;
    if (targets_text == "all") {
        targets = losses.tickers;
    } else {
        std::istringstream in(targets_text);
        std::string piece;
        while (std::getline(in, piece, ',')) targets.push_back(trim(piece));
    }

    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot write file: " + out_path);
    out << "ticker";
    for (double p : levels) out << ",beta_" << p;
    for (double p : levels) out << ",beta_f_" << p;
    out << '\n';

    for (const auto& target : targets) {
        const auto reports = empirical_bounds(losses, factors, fit,
                                              ticker_index(losses, target),
                                              {levels, n_syn, seed});
        validate_reports(reports, 1e-9);
        out << target;
        char cell[32];
        for (const auto& r : reports) {
            std::snprintf(cell, sizeof(cell), ",%.3f", *r.srci);
            out << cell;
        }
        for (const auto& r : reports) {
            std::snprintf(cell, sizeof(cell), ",%.3f", *r.srci_f);
            out << cell;
        }
        out << '\n';
    }
    return 0;
}

int cmd_synth_gen(std::size_t days, std::size_t assets, std::uint64_t seed,
                  const std::string& losses_path, const std::string& factors_path) {
    SynthSpec spec;
    spec.days = days;
    spec.standard_assets = assets;
    const auto panels = generate_synthetic_panels(spec, seed);
    write_loss_csv(losses_path, panels.losses);
    write_factor_csv(factors_path, panels.factors);
    return 0;
}

}  // namespace

int run(const std::vector<std::string>& args) {
    CLI::App app{"Marginal expected shortfall bounds under dependence uncertainty"};
    app.require_subcommand(1);

    std::string out_path;
    std::string model_path;
    std::string family;
    std::string params;
    std::string p_grid_text = "0:0.99:100";
    double p_single = -1.0;
    std::size_t n = 100000;
    std::size_t n_syn = 0;
    std::uint64_t seed = 0;
    std::size_t j_one_based = 1;
    EmpiricalInputs inputs;
    std::string target;
    std::string targets_text;
    std::string levels_text = "0.99,0.993,0.995";
    std::size_t days = 2000;
    std::size_t assets = 6;
    std::string out_losses;
    std::string out_factors;

    auto* table1 = app.add_subcommand("table1", "Closed-form normal-risk bounds table");
    table1->add_option("--out", out_path, "output CSV")->required();

    auto* table2 = app.add_subcommand("table2", "Three-uniform linear-condition table");
    table2->add_option("--out", out_path, "output CSV")->required();

    auto* bp = app.add_subcommand("bounds-parametric",
                                  "Unconstrained bounds of a parametric law");
    bp->add_option("--family", family, "normal|lognormal|uniform|exponential|gamma|lomax")
        ->required();
    bp->add_option("--params", params, "comma or space separated parameters")->required();
    bp->add_option("--p-grid", p_grid_text, "a:b:k grid of prudence levels");
    bp->add_option("--p", p_single, "single prudence level");
    bp->add_option("--out", out_path, "output CSV")->required();

    auto* bf = app.add_subcommand("bounds-factor",
                                  "Constrained bounds under a background-risk model");
    bf->add_option("--model", model_path, "flat key=value model file")->required();
    bf->add_option("--j", j_one_based, "target component, 1-based");
    bf->add_option("--p-grid", p_grid_text, "a:b:k grid");
    bf->add_option("--p", p_single, "single prudence level");
    bf->add_option("--n", n, "Monte Carlo sample size");
    bf->add_option("--seed", seed, "RNG seed (required)")->required();
    bf->add_option("--out", out_path, "output CSV")->required();

    auto* emp = app.add_subcommand("empirical", "Loss/factor panel pipeline");
    emp->add_option("--losses", inputs.losses_path, "loss CSV")->required();
    emp->add_option("--factors", inputs.factors_path, "factor CSV")->required();
    emp->add_flag("--percent", inputs.percent, "factor file publishes percents");
    emp->add_option("--target", target, "target ticker")->required();
    emp->add_option("--p-grid", p_grid_text, "a:b:k grid");
    emp->add_option("--nsyn", n_syn, "synthetic rows (default 10*n)");
    emp->add_option("--seed", seed, "RNG seed (required)")->required();
    emp->add_option("--out", out_path, "output CSV")->required();

    auto* sr = app.add_subcommand("srci", "Systemic risk criticality indices");
    sr->add_option("--losses", inputs.losses_path, "loss CSV")->required();
    sr->add_option("--factors", inputs.factors_path, "factor CSV")->required();
    sr->add_flag("--percent", inputs.percent, "factor file publishes percents");
    sr->add_option("--targets", targets_text, "comma-separated tickers or 'all'")
        ->required();
    sr->add_option("--p-levels", levels_text, "comma-separated prudence levels");
    sr->add_option("--nsyn", n_syn, "synthetic rows (default 10*n)");
    sr->add_option("--seed", seed, "RNG seed (required)")->required();
    sr->add_option("--out", out_path, "output CSV")->required();

    auto* sg = app.add_subcommand("synth-gen", "Generate a synthetic loss/factor pair");
    sg->add_option("--days", days, "number of business days");
    sg->add_option("--assets", assets, "number of standard assets");
    sg->add_option("--seed", seed, "RNG seed (required)")->required();
    sg->add_option("--out-losses", out_losses, "loss CSV path")->required();
    sg->add_option("--out-factors", out_factors, "factor CSV path")->required();

    std::vector<std::string> argv(args.rbegin(), args.rend());
    try {
        app.parse(argv);
    } catch (const CLI::CallForHelp& e) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n" << app.help();
        return 2;
    }

    try {
        const auto grid = [&]() -> std::vector<double> {
            if (p_single >= 0.0) return {p_single};
            return parse_p_grid(p_grid_text);
        };
        if (table1->parsed()) return cmd_table1(out_path);
        if (table2->parsed()) return cmd_table2(out_path);
        if (bp->parsed()) return cmd_bounds_parametric(family, params, grid(), out_path);
        if (bf->parsed()) {
            return cmd_bounds_factor(model_path, j_one_based, grid(), n, seed, out_path);
        }
        if (emp->parsed()) {
            return cmd_empirical(inputs, target, grid(), n_syn, seed, out_path);
        }
        if (sr->parsed()) {
            std::vector<double> levels;
            std::istringstream in(levels_text);
            std::string piece;
            while (std::getline(in, piece, ',')) levels.push_back(std::stod(piece));
            return cmd_srci(inputs, targets_text, levels, n_syn, seed, out_path);
        }
        if (sg->parsed()) {
            return cmd_synth_gen(days, assets, seed, out_losses, out_factors);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}

}  // namespace mes::cli
