#pragma once

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "nematic/fields.hpp"
#include "nematic/grid.hpp"
#include "nematic/material.hpp"
#include "nematic/solenoidal.hpp"

namespace testing_util {

using namespace nematic;

inline constexpr double pi = std::numbers::pi;

inline DomainSpec periodic2d(int n, double length = 2.0 * pi) {
  DomainSpec d;
  d.dim = 2;
  d.lengths = {length, length, length};
  d.resolution = {n, n, 1};
  d.mode = BoundaryMode::periodic;
  return d;
}

inline DomainSpec periodic3d(int n, double length = 2.0 * pi) {
  DomainSpec d;
  d.dim = 3;
  d.lengths = {length, length, length};
  d.resolution = {n, n, n};
  return d;
}

inline DomainSpec channel2d(int n, double length = 2.0 * pi) {
  DomainSpec d = periodic2d(n, length);
  d.mode = BoundaryMode::slip_channel;
  d.wall_axis = 1;
  return d;
}

template <typename F>
Field sample(const Grid& g, F f) {
  Field out(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) out[i] = f(g.coordinate(0, i), g.coordinate(1, i), g.coordinate(2, i));
  return out;
}

/// Random field built from a handful of resolved Fourier modes.
inline Field resolved_random(const Grid& g, std::mt19937_64& rng, int band = 3) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Field f(g.size(), 0.0);
  const int b2 = g.dim() == 3 ? band : 0;
  for (int m0 = -band; m0 <= band; ++m0) {
    for (int m1 = -band; m1 <= band; ++m1) {
      for (int m2 = -b2; m2 <= b2; ++m2) {
        const double a = u(rng), c = u(rng);
        for (std::size_t i = 0; i < g.size(); ++i) {
          const double ph = g.wavenumber(0, m0) * g.coordinate(0, i) + g.wavenumber(1, m1) * g.coordinate(1, i) +
                            (g.dim() == 3 ? g.wavenumber(2, m2) * g.coordinate(2, i) : 0.0);
          f[i] += 0.1 * (a * std::cos(ph) + c * std::sin(ph));
        }
      }
    }
  }
  return f;
}

inline double max_abs_diff(const Field& a, const Field& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double max_abs(const Field& a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

// Mode n evaluated term by term from its description, d v_i/d x_j included.
struct Sampled {
  VectorField v;
  GridTensor grad;
};

inline Sampled sample_mode(const Grid& g, const BasisMode& md) {
  const int dim = g.dim();
  Sampled s{VectorField(dim, Field(g.size(), 0.0)), GridTensor(dim, dim, g.size())};
  const double phase = md.sine ? -pi / 2 : 0.0;
  for (const auto& t : md.terms) {
    double k[3];
    for (int a = 0; a < 3; ++a) k[a] = g.wavenumber(a, t.wave[a]);
    for (std::size_t x = 0; x < g.size(); ++x) {
      double arg = phase;
      for (int a = 0; a < dim; ++a) arg += k[a] * g.coordinate(a, x);
      const double c = std::cos(arg), sn = std::sin(arg);
      for (int i = 0; i < dim; ++i) {
        s.v[i][x] += t.amplitude * t.polarization[i] * c;
        for (int j = 0; j < dim; ++j) s.grad.at(i, j)[x] -= t.amplitude * t.polarization[i] * k[j] * sn;
      }
    }
  }
  return s;
}

// Closed-form director with its gradient, (k, j) = d d_k / d x_j, and a smooth theta.
inline GridTensor analytic_director(const Grid& g, FieldState& s) {
  GridTensor gd(3, g.dim(), g.size());
  for (std::size_t x = 0; x < g.size(); ++x) {
    const double X = g.coordinate(0, x), Y = g.coordinate(1, x);
    s.d[0][x] = 1.0 + 0.3 * std::cos(X + 2 * Y);
    s.d[1][x] = 0.2 * std::sin(2 * X - Y);
    s.d[2][x] = 0.1 * std::cos(Y);
    gd.at(0, 0)[x] = -0.3 * std::sin(X + 2 * Y);
    gd.at(0, 1)[x] = -0.6 * std::sin(X + 2 * Y);
    gd.at(1, 0)[x] = 0.4 * std::cos(2 * X - Y);
    gd.at(1, 1)[x] = -0.2 * std::cos(2 * X - Y);
    gd.at(2, 1)[x] = -0.1 * std::sin(Y);
    s.theta[x] = 1.2 + 0.3 * std::sin(X) * std::cos(Y);
  }
  return gd;
}

// Galerkin momentum right-hand side by direct summation over grid points and
// modes: no transforms, no library derivatives. Fills s.u and s.u_modes from a.
inline std::vector<double> direct_momentum_rhs(const Grid& g, const std::vector<Sampled>& modes,
                                               const std::vector<double>& a, std::size_t m, FieldState& s,
                                               const GridTensor& gd, const MaterialLaws& laws) {
  const int dim = g.dim();
  const std::size_t n = modes.size();
  VectorField um(dim, Field(g.size(), 0.0));
  GridTensor gu(dim, dim, g.size());
  for (auto& c : s.u) c.assign(g.size(), 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    for (int i = 0; i < dim; ++i) {
      for (std::size_t x = 0; x < g.size(); ++x) {
        s.u[i][x] += a[k] * modes[k].v[i][x];
        if (k < m) um[i][x] += a[k] * modes[k].v[i][x];
        for (int j = 0; j < dim; ++j) gu.at(i, j)[x] += a[k] * modes[k].grad.at(i, j)[x];
      }
    }
  }
  s.u_modes = a;
  const double w = g.domain().volume() / g.size();
  std::vector<double> out(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    double acc = 0.0;
    for (std::size_t x = 0; x < g.size(); ++x) {
      const double mu = laws.viscosity(s.theta[x]), lam = laws.dilatation(s.theta[x]);
      for (int i = 0; i < dim; ++i) {
        for (int j = 0; j < dim; ++j) {
          double t = 0.0;
          for (int c = 0; c < 3; ++c) t += gd.at(c, i)[x] * gd.at(c, j)[x];
          const double f = s.u[i][x] * um[j][x] - mu * (gu.at(i, j)[x] + gu.at(j, i)[x]) + lam * t;
          acc += f * modes[k].grad.at(i, j)[x];
        }
      }
    }
    out[k] = acc * w;
  }
  return out;
}

// Largest |int p lap(phi) - int G : hess(phi)| over random plane-wave test
// functions phi, relative to max(1, max |G|).
inline double pressure_weak_residual(const Grid& g, const Field& p, const GridTensor& src, std::mt19937_64& rng,
                                     int trials = 20) {
  const int dim = g.dim();
  double scale = 1.0;
  for (const auto& e : src.entries) scale = std::max(scale, max_abs(e));
  std::uniform_int_distribution<int> pick(-3, 3);
  std::uniform_real_distribution<double> phase(0.0, 2 * pi);
  const double w = g.domain().volume() / g.size();
  double worst = 0.0;
  for (int trial = 0; trial < trials; ++trial) {
    int m[3] = {pick(rng), pick(rng), dim == 3 ? pick(rng) : 0};
    if (m[0] == 0 && m[1] == 0 && m[2] == 0) m[0] = 1;
    double k[3], k2 = 0.0;
    for (int a = 0; a < 3; ++a) k[a] = g.wavenumber(a, m[a]);
    for (int a = 0; a < dim; ++a) k2 += k[a] * k[a];
    const double ph = phase(rng);
    double lhs = 0.0, rhs = 0.0;
    for (std::size_t x = 0; x < g.size(); ++x) {
      double arg = ph;
      for (int a = 0; a < dim; ++a) arg += k[a] * g.coordinate(a, x);
      const double phi = std::cos(arg);
      lhs += p[x] * (-k2 * phi);
      for (int i = 0; i < dim; ++i) {
        for (int j = 0; j < dim; ++j) rhs += src.at(i, j)[x] * (-k[i] * k[j] * phi);
      }
    }
    worst = std::max(worst, std::abs(lhs - rhs) * w / scale);
  }
  return worst;
}

}  // namespace testing_util
