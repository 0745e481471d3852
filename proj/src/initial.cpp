#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "nematic/config.hpp"
#include "nematic/errors.hpp"
#include "nematic/solenoidal.hpp"

namespace nematic {

namespace {

constexpr int kRandomBand = 4;  // largest |m| per axis in random smooth fields

/// Random real field from low wavenumbers with Gaussian spectral decay.
Field random_smooth_field(const Grid& grid, std::mt19937_64& rng, double bandwidth) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Spectrum s(grid.spectrum_size(), {0.0, 0.0});
  int band[3];
  for (int a = 0; a < 3; ++a) band[a] = std::min(kRandomBand, grid.dealias_limit(a));
  for (std::size_t pos = 0; pos < s.size(); ++pos) {
    const IntVec m = grid.spectral_index(pos);
    bool inside = true;
    double r2 = 0.0;
    for (int a = 0; a < 3; ++a) {
      if (std::abs(m[a]) > band[a]) inside = false;
      r2 += static_cast<double>(m[a]) * m[a];
    }
    if (!inside || r2 == 0.0) continue;
    const double env = std::exp(-r2 / (2.0 * bandwidth * bandwidth));
    const double re = normal(rng);
    const double im = normal(rng);
    s[pos] = env * std::complex<double>(re, im);
  }
  return grid.synthesize(s);
}

/// Even or odd image under reflection of the wall coordinate (slip channel only).
void symmetrize(const Grid& grid, Field& f, bool odd) {
  const auto& dom = grid.domain();
  if (dom.mode != BoundaryMode::slip_channel) return;
  const int w = dom.wall_axis;
  const int n = grid.extent()[w];
  Field g(f.size());
  for (std::size_t x = 0; x < f.size(); ++x) {
    IntVec i = grid.unravel(x);
    i[w] = (n - i[w]) % n;
    const double mirror = f[grid.index(i[0], i[1], i[2])];
    g[x] = 0.5 * (f[x] + (odd ? -mirror : mirror));
  }
  f = std::move(g);
}

double max_abs(const VectorField& v) {
  double m = 0.0;
  for (std::size_t x = 0; x < v[0].size(); ++x) {
    double s = 0.0;
    for (const auto& c : v) s += c[x] * c[x];
    m = std::max(m, s);
  }
  return std::sqrt(m);
}

}  // namespace

FieldState make_initial(const InitialSpec& spec, const Grid& grid, const MaterialLaws& laws) {
  (void)laws;
  const int dim = grid.dim();
  const std::size_t n = grid.size();
  const auto& dom = grid.domain();

  if (spec.preset == InitialPreset::file) {
    Snapshot snap = read_snapshot(spec.file);
    if (snap.extent != grid.extent() || snap.domain.dim != dim || snap.domain.mode != dom.mode) {
      std::ostringstream os;
      os << "snapshot '" << spec.file << "' has shape " << snap.extent[0] << "x" << snap.extent[1] << "x"
         << snap.extent[2] << " (dim " << snap.domain.dim << ", " << to_string(snap.domain.mode)
         << "), the configured grid is " << grid.extent()[0] << "x" << grid.extent()[1] << "x" << grid.extent()[2]
         << " (dim " << dim << ", " << to_string(dom.mode) << ")";
      throw DimensionError(os.str());
    }
    FieldState s = std::move(snap.state);
    s.u = leray_project(grid, s.u);
    s.u_modes.clear();
    return s;
  }

  FieldState s = FieldState::zeros(grid);
  s.theta.assign(n, spec.theta0);
  for (std::size_t x = 0; x < n; ++x) s.d[0][x] = spec.director_amplitude;

  std::mt19937_64 rng(spec.seed);

  if (spec.preset == InitialPreset::taylor_green) {
    const double kx = 2.0 * std::numbers::pi / dom.lengths[0];
    const double ky = 2.0 * std::numbers::pi / dom.lengths[1];
    const double kbar = std::sqrt(0.5 * (kx * kx + ky * ky));
    for (std::size_t x = 0; x < n; ++x) {
      const double a = kx * grid.coordinate(0, x);
      const double b = ky * grid.coordinate(1, x);
      s.u[0][x] = spec.amplitude * ky / kbar * std::sin(a) * std::cos(b);
      s.u[1][x] = -spec.amplitude * kx / kbar * std::cos(a) * std::sin(b);
    }
  } else if (spec.preset == InitialPreset::random_smooth) {
    for (int c = 0; c < dim; ++c) {
      s.u[c] = random_smooth_field(grid, rng, spec.bandwidth);
      symmetrize(grid, s.u[c], dom.mode == BoundaryMode::slip_channel && c == dom.wall_axis);
    }
    s.u = leray_project(grid, s.u);
    const double umax = max_abs(s.u);
    if (umax > 0.0) {
      for (auto& c : s.u) {
        for (auto& v : c) v *= spec.amplitude / umax;
      }
    }
    Field t = random_smooth_field(grid, rng, spec.bandwidth);
    symmetrize(grid, t, false);
    double tmax = 0.0;
    for (double v : t) tmax = std::max(tmax, std::abs(v));
    for (std::size_t x = 0; x < n; ++x) s.theta[x] = spec.theta0 + (tmax > 0.0 ? spec.theta_amplitude * t[x] / tmax : 0.0);
  }

  if (spec.director != DirectorPreset::uniform) {
    VectorField r(3);
    for (int c = 0; c < 3; ++c) {
      r[c] = grid.dealias(random_smooth_field(grid, rng, spec.bandwidth));
      symmetrize(grid, r[c], false);
    }
    const double rmax = max_abs(r);
    for (auto& c : r) {
      for (auto& v : c) v = rmax > 0.0 ? v * spec.director_amplitude / rmax : 0.0;
    }
    if (spec.director == DirectorPreset::perturbed) {
      for (std::size_t x = 0; x < n; ++x) r[0][x] += 1.0;
    }
    s.d = std::move(r);
  }
  for (auto& c : s.d) c = grid.dealias(c);

  const double tmin = *std::min_element(s.theta.begin(), s.theta.end());
  if (!(tmin > 0.0)) throw RangeError("initial temperature is not positive (min " + std::to_string(tmin) + ")");
  return s;
}

}  // namespace nematic
