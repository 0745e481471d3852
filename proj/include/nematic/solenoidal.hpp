#pragma once

#include <string>
#include <vector>

#include "nematic/fields.hpp"
#include "nematic/grid.hpp"
#include "nematic/material.hpp"

namespace nematic {

/// One real plane wave amp * e * cos(k.x + phase), phase 0 (cos) or -pi/2 (sin).
struct ModeTerm {
  IntVec wave{};
  std::array<double, 3> polarization{};
  double amplitude = 0.0;
};

/// A divergence-free basis field. Periodic modes are a single term; slip
/// channel modes add the mirror image so the field sits in the slip parity class.
struct BasisMode {
  IntVec wave{};  // representative integer wavevector
  bool sine = false;
  int polarization_index = 0;
  double k2 = 0.0;  // |k|^2 of the representative
  std::vector<ModeTerm> terms;
};

struct TruncationLevels {
  std::size_t n = 1;  // velocity modes
  std::size_t m = 1;  // modes kept in the convective projection, m <= n
  void validate() const;
};

/// First N solenoidal trigonometric modes, orthonormal in the grid inner
/// product, ordered by |k|, then cosine before sine, then lexicographically by
/// wavevector, then by polarization. The ordering makes the spaces nested.
class SolenoidalBasis {
 public:
  SolenoidalBasis(const Grid& grid, std::size_t n_modes);

  /// Number of modes the grid supports alias free.
  static std::size_t capacity(const Grid& grid);

  const Grid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return modes_.size(); }
  const BasisMode& mode(std::size_t i) const { return modes_.at(i); }
  const std::vector<BasisMode>& modes() const noexcept { return modes_; }

  /// <v, v_n> for every mode (transform path).
  std::vector<double> project(const VectorField& v) const;
  /// sum_n a_n v_n on the grid; only the first min(count, N) coefficients are used.
  VectorField synthesize(const std::vector<double>& coeffs, std::size_t count) const;
  VectorField synthesize(const std::vector<double>& coeffs) const { return synthesize(coeffs, coeffs.size()); }
  /// <F, grad v_n> for a dim x dim tensor field F, (i, j) pairing with d v_i / d x_j.
  std::vector<double> test_gradients(const GridTensor& f) const;
  /// Direct evaluation of mode n on the grid (no transforms).
  VectorField evaluate(std::size_t n) const;
  /// Direct evaluation of grad v_n, entry (i, j) = d v_i / d x_j.
  GridTensor evaluate_gradient(std::size_t n) const;

  /// CSV: index, wavevector components, phase, polarization components, |k|^2.
  void write_table(const std::string& path) const;

 private:
  Grid grid_;
  std::vector<BasisMode> modes_;
};

/// Divergence-free part of v: per wavevector removal of the component along k.
VectorField leray_project(const Grid& grid, const VectorField& v);

/// [v]_M: keeps the first m modal coefficients. Throws RangeError if m > N.
VectorField mode_truncate(const VectorField& v, std::size_t m, const SolenoidalBasis& basis);

/// Mean-zero pressure from the weak identity
///   int p lap(phi) = int (S - lambda grad d (.) grad d - u (x) [u]_M) : hess(phi).
Field pressure_solve(const Grid& grid, const FieldState& state, const MaterialLaws& laws,
                     const SolenoidalBasis& basis, const TruncationLevels& levels);

/// The tensor G = S - lambda grad d (.) grad d - u (x) [u]_M that drives the pressure.
GridTensor pressure_source(const Grid& grid, const FieldState& state, const MaterialLaws& laws,
                           const SolenoidalBasis& basis, const TruncationLevels& levels);

}  // namespace nematic
