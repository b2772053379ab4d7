#ifndef MES_CLI_HPP
#define MES_CLI_HPP

#include <string>
#include <vector>

#include "mes/bounds_core.hpp"
#include "mes/factor_bounds.hpp"

// Command-line front end. Subcommands emit CSV files suitable for external
// plotting; every Monte Carlo subcommand requires an explicit --seed so runs
// are reproducible by construction. Exit codes: 0 success, 2 usage error,
// 1 data error.

namespace mes::cli {

/// Runs one subcommand. args excludes the program name.
int run(const std::vector<std::string>& args);

/// Parses "a:b:k" into k+1 evenly spaced prudence levels in [a, b].
std::vector<double> parse_p_grid(const std::string& text);

/// Flat key-value model file for `bounds-factor`:
///   model  = abrm | mbrm | minbrm
///   factor = <family> <params...>
///   idio   = <family> <params...>      (applies to every component)
///   idio1..idioD override per component
///   b      = <d loadings>              (abrm)
///   sigma  = <d scales>                (abrm, mbrm)
///   mu     = <d shifts>                (abrm, optional)
///   d      = <dimension>               (required with the shared idio key)
/// Families: normal(mu,sigma) lognormal(mu,sigma) uniform(a,b)
/// exponential(rate) gamma(shape,rate) lomax(shape,scale).
FactorModel parse_model_file(const std::string& path);

/// Bound-chain check applied to every table before it is written:
/// m <= mf <= Mf <= M and m <= mes <= M, each within slack.
void validate_reports(const std::vector<BoundsReport>& reports, double slack);

}  // namespace mes::cli

#endif
