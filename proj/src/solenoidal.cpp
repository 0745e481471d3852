#include "nematic/solenoidal.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>

#include "nematic/errors.hpp"

namespace nematic {

void TruncationLevels::validate() const {
  if (m < 1 || m > n) {
    throw RangeError("truncation levels require 1 <= M <= N, got N = " + std::to_string(n) +
                     ", M = " + std::to_string(m));
  }
}

namespace {

using Vec = std::array<double, 3>;

Vec physical(const Grid& grid, const IntVec& m) {
  return {grid.wavenumber(0, m[0]), grid.wavenumber(1, m[1]), grid.wavenumber(2, m[2])};
}

double norm(const Vec& v) { return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]); }

Vec normalized(Vec v) {
  const double n = norm(v);
  for (auto& x : v) x /= n;
  return v;
}

Vec cross(const Vec& a, const Vec& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

/// Orthonormal vectors spanning the plane orthogonal to k (dim - 1 of them).
std::vector<Vec> perpendiculars(int dim, const Vec& k) {
  if (dim == 2) return {normalized(Vec{-k[1], k[0], 0.0})};
  int axis = 0;
  for (int a = 1; a < 3; ++a) {
    if (std::abs(k[a]) < std::abs(k[axis])) axis = a;
  }
  Vec unit{0.0, 0.0, 0.0};
  unit[axis] = 1.0;
  const Vec e1 = normalized(cross(k, unit));
  const Vec e2 = normalized(cross(normalized(k), e1));
  return {e1, e2};
}

bool positive_leading(const IntVec& m, int skip) {
  for (int a = 0; a < 3; ++a) {
    if (a == skip) continue;
    if (m[a] != 0) return m[a] > 0;
  }
  return false;
}

std::vector<BasisMode> enumerate_modes(const Grid& grid) {
  const int dim = grid.dim();
  const auto& dom = grid.domain();
  const bool slip = dom.mode == BoundaryMode::slip_channel;
  const int wall = slip ? dom.wall_axis : -1;
  const double volume = dom.volume();
  IntVec lim{0, 0, 0};
  for (int a = 0; a < dim; ++a) lim[a] = grid.dealias_limit(a);

  std::vector<BasisMode> modes;
  auto emit = [&](const IntVec& m, bool sine, int pol, const std::vector<ModeTerm>& terms) {
    BasisMode mode;
    mode.wave = m;
    mode.sine = sine;
    mode.polarization_index = pol;
    const Vec k = physical(grid, m);
    mode.k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
    mode.terms = terms;
    const double amp = std::sqrt(2.0 / (volume * static_cast<double>(terms.size())));
    for (auto& t : mode.terms) t.amplitude = amp;
    modes.push_back(std::move(mode));
  };

  for (int m2 = -lim[2]; m2 <= lim[2]; ++m2) {
    for (int m1 = -lim[1]; m1 <= lim[1]; ++m1) {
      for (int m0 = -lim[0]; m0 <= lim[0]; ++m0) {
        const IntVec m{m0, m1, m2};
        if (m0 == 0 && m1 == 0 && m2 == 0) continue;
        const Vec k = physical(grid, m);
        if (!slip) {
          if (!positive_leading(m, -1)) continue;
          const auto pols = perpendiculars(dim, k);
          for (int s = 0; s < 2; ++s) {
            for (int p = 0; p < static_cast<int>(pols.size()); ++p) {
              emit(m, s == 1, p, {ModeTerm{m, pols[p], 0.0}});
            }
          }
          continue;
        }
        // Slip channel: symmetrise under the reflection P of the wall axis.
        const int mw = m[wall];
        const bool others_zero = [&] {
          for (int a = 0; a < 3; ++a) {
            if (a != wall && m[a] != 0) return false;
          }
          return true;
        }();
        if (mw < 0) continue;
        if (!others_zero && !positive_leading(m, wall)) continue;
        if (mw > 0 && !others_zero) {
          IntVec pm = m;
          pm[wall] = -mw;
          const auto pols = perpendiculars(dim, k);
          for (int s = 0; s < 2; ++s) {
            for (int p = 0; p < static_cast<int>(pols.size()); ++p) {
              Vec pe = pols[p];
              pe[wall] = -pe[wall];
              emit(m, s == 1, p, {ModeTerm{m, pols[p], 0.0}, ModeTerm{pm, pe, 0.0}});
            }
          }
        } else if (mw > 0) {
          // Pure wall-normal wavevector: shear modes, cosine phase only.
          const auto pols = perpendiculars(dim, k);
          for (int p = 0; p < static_cast<int>(pols.size()); ++p) emit(m, false, p, {ModeTerm{m, pols[p], 0.0}});
        } else {
          // Wavevector parallel to the walls: polarization must also be parallel.
          if (dim == 2) continue;
          Vec unit{0.0, 0.0, 0.0};
          unit[wall] = 1.0;
          const Vec e = normalized(cross(unit, k));
          for (int s = 0; s < 2; ++s) emit(m, s == 1, 0, {ModeTerm{m, e, 0.0}});
        }
      }
    }
  }

  // Canonicalise |k|^2 so that equal shells compare equal despite rounding.
  std::vector<double> shells;
  for (const auto& md : modes) shells.push_back(md.k2);
  std::sort(shells.begin(), shells.end());
  std::vector<double> canon;
  for (double s : shells) {
    if (canon.empty() || s - canon.back() > 1e-12 * std::max(1.0, s)) canon.push_back(s);
  }
  auto shell_of = [&](double k2) {
    auto it = std::lower_bound(canon.begin(), canon.end(), k2 - 1e-12 * std::max(1.0, k2));
    return static_cast<std::size_t>(it - canon.begin());
  };
  std::stable_sort(modes.begin(), modes.end(), [&](const BasisMode& a, const BasisMode& b) {
    const auto sa = shell_of(a.k2), sb = shell_of(b.k2);
    if (sa != sb) return sa < sb;
    if (a.sine != b.sine) return !a.sine;
    if (a.wave != b.wave) return a.wave < b.wave;
    return a.polarization_index < b.polarization_index;
  });
  return modes;
}

/// sum_x f(x) cos(k.x + phase) given the spectrum of f.
double cos_sum(const Grid& grid, const Spectrum& s, const IntVec& m, bool sine) {
  const auto c = grid.lookup(s, m);
  return sine ? -c.imag() : c.real();
}

/// sum_x f(x) sin(k.x + phase) given the spectrum of f.
double sin_sum(const Grid& grid, const Spectrum& s, const IntVec& m, bool sine) {
  const auto c = grid.lookup(s, m);
  return sine ? -c.real() : -c.imag();
}

}  // namespace

SolenoidalBasis::SolenoidalBasis(const Grid& grid, std::size_t n_modes) : grid_(grid) {
  if (n_modes < 1) throw std::invalid_argument("solenoidal basis: need at least one mode");
  auto all = enumerate_modes(grid_);
  if (n_modes > all.size()) {
    std::ostringstream msg;
    msg << "solenoidal basis: requested " << n_modes << " modes but the grid supports at most " << all.size()
        << " alias-free modes";
    throw CapacityError(msg.str(), all.size());
  }
  all.resize(n_modes);
  modes_ = std::move(all);
}

std::size_t SolenoidalBasis::capacity(const Grid& grid) { return enumerate_modes(grid).size(); }

std::vector<double> SolenoidalBasis::project(const VectorField& v) const {
  grid_.check_shape(v, grid_.dim(), "basis projection");
  std::vector<Spectrum> spec;
  for (const auto& c : v) spec.push_back(grid_.forward(c));
  std::vector<double> out(modes_.size(), 0.0);
  for (std::size_t n = 0; n < modes_.size(); ++n) {
    const auto& md = modes_[n];
    double acc = 0.0;
    for (const auto& t : md.terms) {
      double s = 0.0;
      for (int c = 0; c < grid_.dim(); ++c) {
        if (t.polarization[c] != 0.0) s += t.polarization[c] * cos_sum(grid_, spec[c], t.wave, md.sine);
      }
      acc += t.amplitude * s;
    }
    out[n] = grid_.weight() * acc;
  }
  return out;
}

VectorField SolenoidalBasis::synthesize(const std::vector<double>& coeffs, std::size_t count) const {
  count = std::min({count, coeffs.size(), modes_.size()});
  VectorField out(grid_.dim());
  for (int c = 0; c < grid_.dim(); ++c) {
    Spectrum s(grid_.spectrum_size(), {0.0, 0.0});
    for (std::size_t n = 0; n < count; ++n) {
      const auto& md = modes_[n];
      const std::complex<double> phase = md.sine ? std::complex<double>(0.0, -1.0) : 1.0;
      for (const auto& t : md.terms) {
        if (t.polarization[c] == 0.0) continue;
        grid_.add_real_wave(s, t.wave, 0.5 * coeffs[n] * t.amplitude * t.polarization[c] * phase);
      }
    }
    out[c] = grid_.synthesize(s);
  }
  return out;
}

std::vector<double> SolenoidalBasis::test_gradients(const GridTensor& f) const {
  const int dim = grid_.dim();
  if (f.rows != dim || f.cols != dim) throw DimensionError("test_gradients: tensor must be dim x dim");
  std::vector<Spectrum> spec;
  for (const auto& e : f.entries) spec.push_back(grid_.forward(e));
  std::vector<double> out(modes_.size(), 0.0);
  for (std::size_t n = 0; n < modes_.size(); ++n) {
    const auto& md = modes_[n];
    double acc = 0.0;
    for (const auto& t : md.terms) {
      const Vec k = physical(grid_, t.wave);
      double s = 0.0;
      for (int i = 0; i < dim; ++i) {
        if (t.polarization[i] == 0.0) continue;
        for (int j = 0; j < dim; ++j) {
          if (k[j] == 0.0) continue;
          s -= t.polarization[i] * k[j] * sin_sum(grid_, spec[i * dim + j], t.wave, md.sine);
        }
      }
      acc += t.amplitude * s;
    }
    out[n] = grid_.weight() * acc;
  }
  return out;
}

VectorField SolenoidalBasis::evaluate(std::size_t n) const {
  const auto& md = modes_.at(n);
  VectorField out = grid_.zeros(grid_.dim());
  const double shift = md.sine ? -std::numbers::pi / 2 : 0.0;
  for (std::size_t x = 0; x < grid_.size(); ++x) {
    const IntVec i = grid_.unravel(x);
    for (const auto& t : md.terms) {
      const Vec k = physical(grid_, t.wave);
      double phase = shift;
      for (int a = 0; a < grid_.dim(); ++a) phase += k[a] * i[a] * grid_.spacing(a);
      const double c = t.amplitude * std::cos(phase);
      for (int a = 0; a < grid_.dim(); ++a) out[a][x] += c * t.polarization[a];
    }
  }
  return out;
}

GridTensor SolenoidalBasis::evaluate_gradient(std::size_t n) const {
  const auto& md = modes_.at(n);
  const int dim = grid_.dim();
  GridTensor out(dim, dim, grid_.size());
  const double shift = md.sine ? -std::numbers::pi / 2 : 0.0;
  for (std::size_t x = 0; x < grid_.size(); ++x) {
    const IntVec i = grid_.unravel(x);
    for (const auto& t : md.terms) {
      const Vec k = physical(grid_, t.wave);
      double phase = shift;
      for (int a = 0; a < dim; ++a) phase += k[a] * i[a] * grid_.spacing(a);
      const double s = -t.amplitude * std::sin(phase);
      for (int r = 0; r < dim; ++r) {
        for (int c = 0; c < dim; ++c) out.at(r, c)[x] += s * t.polarization[r] * k[c];
      }
    }
  }
  return out;
}

void SolenoidalBasis::write_table(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << "index,k_1,k_2,k_3,phase,e_1,e_2,e_3,k_squared\n" << std::setprecision(17);
  for (std::size_t n = 0; n < modes_.size(); ++n) {
    const auto& md = modes_[n];
    const auto& e = md.terms.front().polarization;
    out << n << ',' << md.wave[0] << ',' << md.wave[1] << ',' << md.wave[2] << ',' << (md.sine ? "sin" : "cos")
        << ',' << e[0] << ',' << e[1] << ',' << e[2] << ',' << md.k2 << '\n';
  }
  if (!out) throw IoError("failed writing '" + path + "'");
}

// ------------------------------------------------------------ projections

VectorField leray_project(const Grid& grid, const VectorField& v) {
  grid.check_shape(v, grid.dim(), "leray_project");
  const int dim = grid.dim();
  std::vector<Spectrum> spec;
  for (const auto& c : v) spec.push_back(grid.forward(c));
  for (std::size_t p = 0; p < grid.spectrum_size(); ++p) {
    const IntVec m = grid.spectral_index(p);
    double k[3] = {0, 0, 0};
    double k2 = 0.0;
    for (int a = 0; a < dim; ++a) {
      k[a] = grid.derivative_wavenumber(a, m[a]);
      k2 += k[a] * k[a];
    }
    if (k2 == 0.0) continue;
    std::complex<double> kv = 0.0;
    for (int a = 0; a < dim; ++a) kv += k[a] * spec[a][p];
    for (int a = 0; a < dim; ++a) spec[a][p] -= k[a] * kv / k2;
  }
  VectorField out(dim);
  for (int a = 0; a < dim; ++a) out[a] = grid.inverse(spec[a]);
  return out;
}

VectorField mode_truncate(const VectorField& v, std::size_t m, const SolenoidalBasis& basis) {
  if (m > basis.size()) {
    throw RangeError("mode_truncate: m = " + std::to_string(m) + " exceeds basis size N = " +
                     std::to_string(basis.size()));
  }
  return basis.synthesize(basis.project(v), m);
}

GridTensor pressure_source(const Grid& grid, const FieldState& state, const MaterialLaws& laws,
                           const SolenoidalBasis& basis, const TruncationLevels& levels) {
  check_state(grid, state);
  const int dim = grid.dim();
  GridTensor g = viscous_stress(grid.grad(state.u), state.theta, laws);
  const GridTensor tension = director_tension(grid.grad(state.d));
  const VectorField um = state.u_modes.empty() ? mode_truncate(state.u, levels.m, basis)
                                               : basis.synthesize(state.u_modes, levels.m);
  for (std::size_t x = 0; x < grid.size(); ++x) {
    const double lam = laws.dilatation(state.theta[x]);
    for (int i = 0; i < dim; ++i) {
      for (int j = 0; j < dim; ++j) g.at(i, j)[x] -= lam * tension.at(i, j)[x] + state.u[i][x] * um[j][x];
    }
  }
  return g;
}

Field pressure_solve(const Grid& grid, const FieldState& state, const MaterialLaws& laws,
                     const SolenoidalBasis& basis, const TruncationLevels& levels) {
  const int dim = grid.dim();
  const GridTensor g = pressure_source(grid, state, laws, basis, levels);
  std::vector<Spectrum> spec;
  for (const auto& e : g.entries) spec.push_back(grid.forward(e));
  Spectrum p(grid.spectrum_size(), {0.0, 0.0});
  const IntVec& n = grid.extent();
  for (std::size_t pos = 0; pos < grid.spectrum_size(); ++pos) {
    const IntVec m = grid.spectral_index(pos);
    bool nyquist = false;
    double k[3] = {0, 0, 0};
    double k2 = 0.0;
    for (int a = 0; a < dim; ++a) {
      if (n[a] % 2 == 0 && std::abs(m[a]) == n[a] / 2) nyquist = true;
      k[a] = grid.wavenumber(a, m[a]);
      k2 += k[a] * k[a];
    }
    if (nyquist || k2 == 0.0) continue;
    std::complex<double> acc = 0.0;
    for (int i = 0; i < dim; ++i) {
      for (int j = 0; j < dim; ++j) acc += k[i] * k[j] * spec[i * dim + j][pos];
    }
    p[pos] = acc / k2;
  }
  return grid.inverse(p);
}

}  // namespace nematic
