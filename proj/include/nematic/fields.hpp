#pragma once

#include <string>
#include <vector>

#include "nematic/grid.hpp"
#include "nematic/material.hpp"

namespace nematic {

/// Discrete unknowns. u has dim components, d always 3. u_modes holds the
/// coefficients of u in the solenoidal basis used by the run.
struct FieldState {
  VectorField u;
  std::vector<double> u_modes;
  VectorField d;
  Field theta;
  Field p;
  double time = 0.0;

  static FieldState zeros(const Grid& grid);
};

/// Entry (i, j) = sum_k d_i d_k * d_j d_k, with grad_d laid out as (k, i) = d d_k / d x_i.
GridTensor director_tension(const GridTensor& grad_d);

/// Pointwise Cauchy stress mu(theta)(grad u + grad u^T) - lambda(theta) grad d (.) grad d - p I.
GridTensor stress(const Grid& grid, const FieldState& state, const MaterialLaws& laws);

/// Viscous part mu(theta)(grad u + grad u^T) only.
GridTensor viscous_stress(const GridTensor& grad_u, const Field& theta, const MaterialLaws& laws);

/// q = -kappa(theta) grad theta - kappa_aniso(theta) d (d . grad theta).
VectorField heat_flux(const Grid& grid, const FieldState& state, const MaterialLaws& laws);
VectorField heat_flux(const VectorField& grad_theta, const VectorField& d, const Field& theta,
                      const MaterialLaws& laws);

/// Pointwise stress power (S - lambda grad d (.) grad d) : grad u.
Field stress_power(const Grid& grid, const VectorField& u, const VectorField& d, const Field& theta,
                   const MaterialLaws& laws);

/// Throws DimensionError unless every field matches the grid.
void check_state(const Grid& grid, const FieldState& state);

// ------------------------------------------------------------------ output

/// Flat binary snapshot: 64-byte header then little-endian doubles, x fastest,
/// one block per component in the order u, d, theta, p.
///
/// Header layout (little endian):
///   0  char[8]  magic "NEMSNAP1"
///   8  int32    dim
///  12  int32[3] computational resolution (mirror-doubled on a wall axis)
///  24  float64  time
///  32  float64[3] physical lengths
///  56  int32    domain mode (0 periodic, 1 slip channel)
///  60  int32    wall axis
void write_snapshot(const std::string& path, const Grid& grid, const FieldState& state);

struct Snapshot {
  DomainSpec domain;
  IntVec extent{};
  FieldState state;
};

Snapshot read_snapshot(const std::string& path);

/// CSV: index, coordinates, u components, d components, theta, p.
void write_csv(const std::string& path, const Grid& grid, const FieldState& state);

}  // namespace nematic
