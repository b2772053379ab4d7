#ifndef MES_COUPLING_HPP
#define MES_COUPLING_HPP

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "mes/distributions.hpp"

// Deterministic couplings with prescribed marginals. Dependence extremes are
// built on the midpoint grid u_k = (k-0.5)/n rather than random uniforms, so
// sharp-bound reproductions carry no Monte Carlo noise.

namespace mes {

struct Comonotone {};

struct AntimonotoneAt {
    std::size_t index = 0;  // 0-based column driven by 1-u
};

// Jointly mixable triple of Unif[0,1] marginals whose row sums are 3/2.
struct Mix3Uniform {};

struct Independent {
    std::uint64_t seed = 0;
};

using CouplingKind =
    std::variant<Comonotone, AntimonotoneAt, Mix3Uniform, Independent>;

class CoupledSample {
  public:
    CoupledSample(std::size_t rows, std::size_t cols, std::vector<double> grid);

    /// Wraps a caller-supplied coupling matrix (row-major, rows x cols);
    /// used to certify external mixability constructions.
    static CoupledSample from_matrix(std::size_t rows, std::size_t cols,
                                     std::vector<double> values);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    double operator()(std::size_t r, std::size_t c) const {
        return values_[r * cols_ + c];
    }
    double& at(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }

    std::vector<double> column(std::size_t c) const;
    std::vector<double> row_sums() const;

    /// Driving uniforms, one per row; empty for external matrices.
    const std::vector<double>& grid() const noexcept { return grid_; }

  private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<double> values_;
    std::vector<double> grid_;
};

/// Realizes the requested coupling of the given marginals on an n-row grid.
CoupledSample couple(const std::vector<Distribution>& marginals,
                     const CouplingKind& kind, std::size_t n);

/// The mixing map for one uniform draw: (Y1, Y2, Y3) with Y1+Y2+Y3 = 3/2.
std::array<double, 3> mix_uniform3_map(double u);

/// Mixing coupling of three standard uniforms on the midpoint grid.
CoupledSample mix_uniform3(std::size_t n);

/// Spearman rank correlation with mid-ranks for ties. -1 certifies that the
/// sample coupling is antimonotonic, +1 that it is comonotonic.
double antimonotone_diagnostic(std::span<const double> x,
                               std::span<const double> s);

}  // namespace mes

#endif
