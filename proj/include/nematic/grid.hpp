#pragma once

#include <array>
#include <complex>
#include <memory>
#include <string>
#include <vector>

namespace nematic {

enum class BoundaryMode { periodic, slip_channel };

std::string to_string(BoundaryMode mode);
BoundaryMode boundary_mode_from_string(const std::string& s);

/// Rectangular box, either fully periodic or with one wall pair (slip channel).
///
/// The slip channel is realised by mirror extension: the computational grid
/// doubles the wall axis and every field carries the parity of its boundary
/// condition (normal velocity odd, everything else even), so u.n = 0,
/// stress-free slip, Neumann director and no-flux temperature hold by symmetry.
struct DomainSpec {
  int dim = 2;
  std::array<double, 3> lengths{6.283185307179586, 6.283185307179586, 6.283185307179586};
  std::array<int, 3> resolution{32, 32, 1};
  BoundaryMode mode = BoundaryMode::periodic;
  int wall_axis = 1;

  /// Throws std::invalid_argument when a constraint is violated.
  void validate() const;
  double volume() const;
  bool operator==(const DomainSpec&) const = default;
};

using Field = std::vector<double>;
using VectorField = std::vector<Field>;
using Spectrum = std::vector<std::complex<double>>;
using IntVec = std::array<int, 3>;

/// Rank-2 tensor field, entry (r, c) stored as a scalar field.
struct GridTensor {
  int rows = 0;
  int cols = 0;
  std::vector<Field> entries;

  GridTensor() = default;
  GridTensor(int r, int c, std::size_t npts) : rows(r), cols(c), entries(r * c, Field(npts, 0.0)) {}
  Field& at(int r, int c) { return entries[r * cols + c]; }
  const Field& at(int r, int c) const { return entries[r * cols + c]; }
};

class FftEngine;

/// Collocated grid plus the spectral machinery on it.
///
/// Storage is x-fastest: idx = i0 + n0 * (i1 + n1 * i2). Unused axes in 2D have
/// extent 1. Spectra use the real-to-complex half layout along axis 0.
/// Quadrature weights are uniform and normalised to the physical volume, so
/// integrals over the mirror-extended grid equal integrals over the channel.
class Grid {
 public:
  explicit Grid(const DomainSpec& domain);

  const DomainSpec& domain() const noexcept { return domain_; }
  int dim() const noexcept { return domain_.dim; }
  const IntVec& extent() const noexcept { return extent_; }
  std::size_t size() const noexcept { return npts_; }
  std::size_t spectrum_size() const noexcept { return nspec_; }
  double weight() const noexcept { return weight_; }
  double spacing(int axis) const noexcept { return spacing_[axis]; }
  double period(int axis) const noexcept { return period_[axis]; }
  double min_spacing() const;
  double coordinate(int axis, std::size_t idx) const;
  std::size_t index(int i0, int i1, int i2) const noexcept {
    return static_cast<std::size_t>(i0) + extent_[0] * (static_cast<std::size_t>(i1) + extent_[1] * i2);
  }
  IntVec unravel(std::size_t idx) const noexcept;
  /// Physical wavenumber 2 pi m / period for signed integer index m.
  double wavenumber(int axis, int m) const noexcept { return kscale_[axis] * m; }
  /// Largest |m| per axis that keeps quadratic products alias free (2/3 rule).
  int dealias_limit(int axis) const noexcept;

  Spectrum forward(const Field& f) const;
  /// Inverse transform including the 1/npts normalisation.
  Field inverse(const Spectrum& s) const;
  /// Unnormalised synthesis: out(x) = sum_k s(k) e^{ikx} over the Hermitian-completed spectrum.
  Field synthesize(const Spectrum& s) const;
  /// Signed integer wavevector for a position in the half spectrum.
  IntVec spectral_index(std::size_t pos) const noexcept;
  /// Value of the full DFT sum_x f(x) e^{-ikx} at an arbitrary integer wavevector.
  std::complex<double> lookup(const Spectrum& s, const IntVec& m) const;
  /// Adds c e^{ikx} + conj(c) e^{-ikx} to a half spectrum used with synthesize().
  void add_real_wave(Spectrum& s, const IntVec& m, std::complex<double> c) const;
  /// Wavenumber used by differentiation; zero on the Nyquist index.
  double derivative_wavenumber(int axis, int m) const noexcept;

  Field derivative(const Field& f, int axis) const;
  VectorField grad(const Field& f) const;
  /// (c, a) entry = d v_c / d x_a.
  GridTensor grad(const VectorField& v) const;
  Field div(const VectorField& v) const;
  /// (div T)_r = sum_c d T_rc / d x_c.
  VectorField div(const GridTensor& t) const;
  Field laplacian(const Field& f) const;
  /// Zeroes every mode with |m_a| above the 2/3-rule limit on some axis.
  Field dealias(const Field& f) const;
  void dealias_spectrum(Spectrum& s) const;

  double integral(const Field& f) const;
  double inner(const Field& a, const Field& b) const;
  double inner(const VectorField& a, const VectorField& b) const;
  double inner(const GridTensor& a, const GridTensor& b) const;

  Field zeros() const { return Field(npts_, 0.0); }
  VectorField zeros(int ncomp) const { return VectorField(ncomp, Field(npts_, 0.0)); }
  void check_shape(const Field& f, const char* what) const;
  void check_shape(const VectorField& v, int ncomp, const char* what) const;

 private:
  DomainSpec domain_;
  IntVec extent_{1, 1, 1};
  std::array<double, 3> period_{1, 1, 1};
  std::array<double, 3> spacing_{1, 1, 1};
  std::array<double, 3> kscale_{0, 0, 0};
  std::size_t npts_ = 0;
  std::size_t nspec_ = 0;
  double weight_ = 0.0;
  std::shared_ptr<FftEngine> fft_;
};

}  // namespace nematic
