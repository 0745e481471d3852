#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nematic/audit.hpp"
#include "nematic/fields.hpp"
#include "nematic/material.hpp"
#include "nematic/solenoidal.hpp"

namespace nematic {

struct GalerkinConfig {
  TruncationLevels levels;
  double dt = 1e-3;
  double t_end = 1.0;
  bool explicit_source = true;     // stress power for the heat source taken at the old state
  bool implicit_diffusion = true;  // div q implicit (otherwise forward Euler)
  double cfl_safety = 0.5;
  int max_dt_halvings = 8;
  /// Body force along the first basis mode, <f, v_n> = forcing * delta_n0. Zero in
  /// the model; nonzero only to inject energy in tests.
  double forcing = 0.0;

  void validate() const;
};

struct StepReport {
  double time = 0.0;
  double energy_drift = 0.0;  // (E_new - E_old) / |E_old|
  double production_dir = 0.0;
  double production_visc = 0.0;
  double production_heat = 0.0;
  double min_theta = 0.0;
  double max_d_sq = 0.0;
  double dt_used = 0.0;
  int halvings = 0;
};

enum class AbortReason { positivity, cfl, solver };
std::string to_string(AbortReason reason);

struct AbortReport {
  AbortReason reason = AbortReason::positivity;
  double time = 0.0;
  StepReport last;
  std::string detail;
};

class StepAborted : public std::runtime_error {
 public:
  explicit StepAborted(AbortReport report);
  const AbortReport& report() const noexcept { return report_; }

 private:
  AbortReport report_;
};

struct DirectorOptions {
  bool diffusion = true;
  bool penalty = true;
};

struct HeatOptions {
  bool implicit_diffusion = true;
  double tolerance = 1e-14;
  int max_iterations = 2000;
};

/// Receivers for a running simulation. Defaults do nothing.
struct RunSink {
  virtual ~RunSink() = default;
  virtual void on_step(const StepReport&, const EnergyLedger&) {}
  virtual void on_snapshot(const FieldState&, std::size_t /*step*/) {}
};

struct RunResult {
  FieldState final_state;
  std::vector<EnergyLedger> ledgers;  // row 0 is the initial state
  std::vector<StepReport> reports;
  std::optional<AbortReport> abort;
  double max_gn_ratio = 0.0;
};

/// Faedo-Galerkin system at fixed (N, M) with its IMEX time stepping.
///
/// One step: momentum (explicit convection and elasticity, the constant part
/// mu_lo of the viscosity implicit), director (Laplacian implicit), heat
/// (anisotropic diffusion implicit, advection explicit, source equal to the
/// discrete kinetic energy lost this step).
class GalerkinSystem {
 public:
  GalerkinSystem(const Grid& grid, MaterialLaws laws, GalerkinConfig config);

  const Grid& grid() const noexcept { return grid_; }
  const SolenoidalBasis& basis() const noexcept { return basis_; }
  const MaterialLaws& laws() const noexcept { return laws_; }
  const GalerkinConfig& config() const noexcept { return config_; }

  /// Builds a state whose u is the Galerkin projection of the given velocity.
  FieldState prepare(FieldState state) const;

  /// d/dt of u_modes.
  std::vector<double> momentum_rhs(const FieldState& state) const;
  /// Semi-implicit director update advected by [u]_M of the given state.
  VectorField director_step(const FieldState& state, double dt, DirectorOptions opts = {}) const;
  /// Same update with an explicit advecting velocity (dim components).
  VectorField director_update(const VectorField& d, const VectorField& velocity, double dt,
                              DirectorOptions opts = {}) const;
  /// Temperature update. `state` carries theta^n together with the new u and d;
  /// `source` is added to the right-hand side (its integral becomes heat).
  Field heat_step(const FieldState& state, const Field& source, double dt, HeatOptions opts = {}) const;
  /// Heat source distributing the kinetic decrement `decrement` with the
  /// pointwise stress power `power`.
  Field heat_source(const Field& power, double decrement, double dt) const;

  /// One accepted step with CFL control and halving on failure.
  std::pair<FieldState, StepReport> advance(const FieldState& state) const;
  std::pair<FieldState, StepReport> advance(const FieldState& state, double dt) const;

  /// Marches to t_end. Aborts are returned in the result, not thrown.
  RunResult run(const FieldState& initial, RunSink* sink = nullptr, std::size_t snapshot_stride = 0) const;

  double kinetic_energy(const VectorField& u) const;

 private:
  /// Single step of size dt without any control logic.
  FieldState step(const FieldState& state, double dt) const;

  Grid grid_;
  MaterialLaws laws_;
  GalerkinConfig config_;
  SolenoidalBasis basis_;
};

}  // namespace nematic
