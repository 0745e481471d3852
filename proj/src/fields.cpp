#include "nematic/fields.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>

#include "nematic/errors.hpp"

namespace nematic {

FieldState FieldState::zeros(const Grid& grid) {
  FieldState s;
  s.u = grid.zeros(grid.dim());
  s.d = grid.zeros(3);
  s.theta = grid.zeros();
  s.p = grid.zeros();
  return s;
}

GridTensor director_tension(const GridTensor& grad_d) {
  const int dim = grad_d.cols;
  const std::size_t npts = grad_d.entries.empty() ? 0 : grad_d.entries[0].size();
  GridTensor t(dim, dim, npts);
  for (int i = 0; i < dim; ++i) {
    for (int j = i; j < dim; ++j) {
      Field& out = t.at(i, j);
      for (int k = 0; k < grad_d.rows; ++k) {
        const Field& a = grad_d.at(k, i);
        const Field& b = grad_d.at(k, j);
        for (std::size_t x = 0; x < npts; ++x) out[x] += a[x] * b[x];
      }
      if (j != i) t.at(j, i) = out;
    }
  }
  return t;
}

GridTensor viscous_stress(const GridTensor& grad_u, const Field& theta, const MaterialLaws& laws) {
  const int dim = grad_u.rows;
  const std::size_t npts = theta.size();
  GridTensor s(dim, dim, npts);
  for (std::size_t x = 0; x < npts; ++x) {
    const double mu = laws.viscosity(theta[x]);
    for (int i = 0; i < dim; ++i) {
      for (int j = 0; j < dim; ++j) s.at(i, j)[x] = mu * (grad_u.at(i, j)[x] + grad_u.at(j, i)[x]);
    }
  }
  return s;
}

void check_state(const Grid& grid, const FieldState& state) {
  grid.check_shape(state.u, grid.dim(), "velocity");
  grid.check_shape(state.d, 3, "director");
  grid.check_shape(state.theta, "temperature");
  grid.check_shape(state.p, "pressure");
}

GridTensor stress(const Grid& grid, const FieldState& state, const MaterialLaws& laws) {
  check_state(grid, state);
  const GridTensor gu = grid.grad(state.u);
  GridTensor t = viscous_stress(gu, state.theta, laws);
  const GridTensor tension = director_tension(grid.grad(state.d));
  for (std::size_t x = 0; x < grid.size(); ++x) {
    const double lam = laws.dilatation(state.theta[x]);
    for (int i = 0; i < grid.dim(); ++i) {
      for (int j = 0; j < grid.dim(); ++j) t.at(i, j)[x] -= lam * tension.at(i, j)[x];
      t.at(i, i)[x] -= state.p[x];
    }
  }
  return t;
}

VectorField heat_flux(const VectorField& grad_theta, const VectorField& d, const Field& theta,
                      const MaterialLaws& laws) {
  const int dim = static_cast<int>(grad_theta.size());
  VectorField q(dim, Field(theta.size(), 0.0));
  for (std::size_t x = 0; x < theta.size(); ++x) {
    const auto c = laws.conductivity(theta[x]);
    double dg = 0.0;
    for (int a = 0; a < dim; ++a) dg += d[a][x] * grad_theta[a][x];
    for (int a = 0; a < dim; ++a) q[a][x] = -c.kappa * grad_theta[a][x] - c.kappa_aniso * d[a][x] * dg;
  }
  return q;
}

VectorField heat_flux(const Grid& grid, const FieldState& state, const MaterialLaws& laws) {
  check_state(grid, state);
  return heat_flux(grid.grad(state.theta), state.d, state.theta, laws);
}

Field stress_power(const Grid& grid, const VectorField& u, const VectorField& d, const Field& theta,
                   const MaterialLaws& laws) {
  const GridTensor gu = grid.grad(u);
  const GridTensor tension = director_tension(grid.grad(d));
  Field out(grid.size(), 0.0);
  const int dim = grid.dim();
  for (std::size_t x = 0; x < grid.size(); ++x) {
    const double mu = laws.viscosity(theta[x]);
    const double lam = laws.dilatation(theta[x]);
    double acc = 0.0;
    for (int i = 0; i < dim; ++i) {
      for (int j = 0; j < dim; ++j) {
        const double g = gu.at(i, j)[x];
        acc += (mu * (g + gu.at(j, i)[x]) - lam * tension.at(i, j)[x]) * g;
      }
    }
    out[x] = acc;
  }
  return out;
}

// ------------------------------------------------------------------ output

namespace {

constexpr char kMagic[8] = {'N', 'E', 'M', 'S', 'N', 'A', 'P', '1'};

template <typename T>
T to_little(T v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(b[i], b[sizeof(T) - 1 - i]);
    std::memcpy(&v, b, sizeof(T));
    return v;
  }
}

template <typename T>
void put(unsigned char* buf, std::size_t offset, T v) {
  v = to_little(v);
  std::memcpy(buf + offset, &v, sizeof(T));
}

template <typename T>
T get(const unsigned char* buf, std::size_t offset) {
  T v;
  std::memcpy(&v, buf + offset, sizeof(T));
  return to_little(v);
}

void write_block(std::ofstream& out, const Field& f) {
  std::vector<double> tmp(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) tmp[i] = to_little(f[i]);
  out.write(reinterpret_cast<const char*>(tmp.data()), static_cast<std::streamsize>(tmp.size() * sizeof(double)));
}

Field read_block(std::ifstream& in, std::size_t n, const std::string& path) {
  Field f(n);
  in.read(reinterpret_cast<char*>(f.data()), static_cast<std::streamsize>(n * sizeof(double)));
  if (!in) throw IoError("snapshot '" + path + "' is truncated");
  for (auto& v : f) v = to_little(v);
  return f;
}

}  // namespace

void write_snapshot(const std::string& path, const Grid& grid, const FieldState& state) {
  check_state(grid, state);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open snapshot '" + path + "' for writing");
  unsigned char header[64] = {};
  std::memcpy(header, kMagic, 8);
  const auto& dom = grid.domain();
  put<std::int32_t>(header, 8, dom.dim);
  for (int a = 0; a < 3; ++a) put<std::int32_t>(header, 12 + 4 * a, grid.extent()[a]);
  put<double>(header, 24, state.time);
  for (int a = 0; a < 3; ++a) put<double>(header, 32 + 8 * a, dom.lengths[a]);
  put<std::int32_t>(header, 56, dom.mode == BoundaryMode::periodic ? 0 : 1);
  put<std::int32_t>(header, 60, dom.wall_axis);
  out.write(reinterpret_cast<const char*>(header), 64);
  for (const auto& f : state.u) write_block(out, f);
  for (const auto& f : state.d) write_block(out, f);
  write_block(out, state.theta);
  write_block(out, state.p);
  if (!out) throw IoError("failed writing snapshot '" + path + "'");
}

Snapshot read_snapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open snapshot '" + path + "'");
  unsigned char header[64];
  in.read(reinterpret_cast<char*>(header), 64);
  if (!in || std::memcmp(header, kMagic, 8) != 0) throw IoError("'" + path + "' is not a snapshot file");
  Snapshot snap;
  auto& dom = snap.domain;
  dom.dim = get<std::int32_t>(header, 8);
  if (dom.dim != 2 && dom.dim != 3) throw IoError("snapshot '" + path + "' has invalid dimension");
  for (int a = 0; a < 3; ++a) snap.extent[a] = get<std::int32_t>(header, 12 + 4 * a);
  snap.state.time = get<double>(header, 24);
  for (int a = 0; a < 3; ++a) dom.lengths[a] = get<double>(header, 32 + 8 * a);
  dom.mode = get<std::int32_t>(header, 56) == 0 ? BoundaryMode::periodic : BoundaryMode::slip_channel;
  dom.wall_axis = get<std::int32_t>(header, 60);
  for (int a = 0; a < 3; ++a) {
    const bool wall = dom.mode == BoundaryMode::slip_channel && a == dom.wall_axis;
    dom.resolution[a] = a < dom.dim ? (wall ? snap.extent[a] / 2 : snap.extent[a]) : 1;
  }
  const std::size_t n = static_cast<std::size_t>(snap.extent[0]) * snap.extent[1] * snap.extent[2];
  for (int c = 0; c < dom.dim; ++c) snap.state.u.push_back(read_block(in, n, path));
  for (int c = 0; c < 3; ++c) snap.state.d.push_back(read_block(in, n, path));
  snap.state.theta = read_block(in, n, path);
  snap.state.p = read_block(in, n, path);
  return snap;
}

void write_csv(const std::string& path, const Grid& grid, const FieldState& state) {
  check_state(grid, state);
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  static const char* axes[3] = {"x", "y", "z"};
  out << "index";
  for (int a = 0; a < grid.dim(); ++a) out << ',' << axes[a];
  for (int a = 0; a < grid.dim(); ++a) out << ",u_" << axes[a];
  out << ",d_1,d_2,d_3,theta,p\n";
  out << std::setprecision(17);
  for (std::size_t x = 0; x < grid.size(); ++x) {
    out << x;
    for (int a = 0; a < grid.dim(); ++a) out << ',' << grid.coordinate(a, x);
    for (int a = 0; a < grid.dim(); ++a) out << ',' << state.u[a][x];
    for (int c = 0; c < 3; ++c) out << ',' << state.d[c][x];
    out << ',' << state.theta[x] << ',' << state.p[x] << '\n';
  }
  if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace nematic
