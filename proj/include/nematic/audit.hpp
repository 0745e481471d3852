#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nematic/fields.hpp"
#include "nematic/grid.hpp"
#include "nematic/material.hpp"

namespace nematic {

/// Energy and entropy bookkeeping of one state. Entropy entries (and the
/// productions that divide by lambda) are left empty when min theta falls
/// below theta_floor.
struct EnergyLedger {
  double time = 0.0;
  double kinetic = 0.0;  // int |u|^2 / 2
  double thermal = 0.0;  // int theta
  double elastic = 0.0;  // int |grad d|^2 / 2
  double penalty = 0.0;  // int W(d)
  std::optional<double> entropy;  // int Lambda(theta) - |grad d|^2/2 - W(d)
  double production_dir = 0.0;    // int |lap d - dW(d)|^2
  std::optional<double> production_visc;  // int S : grad u / lambda
  std::optional<double> production_heat;  // -int q . grad theta lambda' / lambda^2
  double min_theta = 0.0;
  double max_theta = 0.0;
  double max_d_sq = 0.0;
  double energy_drift = 0.0;  // (E(t) - E(0)) / |E(0)|, filled in by the run

  double total_energy() const { return kinetic + thermal; }
  bool entropy_available() const { return entropy.has_value(); }
};

EnergyLedger energy_ledger(const Grid& grid, const FieldState& state, const MaterialLaws& laws);

/// Column order of the ledger CSV.
extern const std::vector<std::string> kLedgerColumns;
std::string ledger_csv_header();
std::string ledger_csv_row(const EnergyLedger& row);
void write_ledger_csv(const std::string& path, const std::vector<EnergyLedger>& rows);

/// Independent recomputation of kinetic/thermal/elastic/penalty by plain
/// Riemann sums with sixth-order finite differences (no transforms).
struct CrossCheck {
  double kinetic = 0.0, thermal = 0.0, elastic = 0.0, penalty = 0.0;
  double worst_relative_difference = 0.0;
  bool passed = true;
};
CrossCheck ledger_cross_check(const Grid& grid, const FieldState& state, const MaterialLaws& laws,
                              const EnergyLedger& ledger, double tolerance = 1e-4);

// ---------------------------------------------------------- trajectory checks

/// Sum over steps of dt * (production_dir + production_visc + production_heat),
/// trapezoidal in time. Empty when any row has flagged productions.
std::optional<double> cumulative_production(const std::vector<EnergyLedger>& rows);

struct DissipationReport {
  double k = 0.0;
  bool k_admissible = true;
  double min_k_theta_minus_lambda = 0.0;  // min of K theta - Lambda(theta) over the theta range
  double theta_at_min = 0.0;
  double bracket_initial = 0.0;
  double bracket_final = 0.0;
  double cumulative_production = 0.0;
  double excess = 0.0;  // bracket_final + production - bracket_initial
  double tolerance = 0.0;
  bool passed = false;
  std::string note;
};

/// K chosen as 2 max(1, sup 1/lambda) over the theta range seen in the rows.
double default_dissipation_constant(const std::vector<EnergyLedger>& rows, const MaterialLaws& laws);

/// [K E - S](tau) + sum dt productions <= [K E - S](0) + 1e-8 |[K E - S](0)|.
DissipationReport total_dissipation_check(const std::vector<EnergyLedger>& rows, double k,
                                          const MaterialLaws& laws, double rel_tolerance = 1e-8);

struct MaxPrincipleReport {
  double bound = 0.0;  // max(max |d0|^2, D0^2)
  double worst = 0.0;
  double worst_time = 0.0;
  double tolerance = 1e-8;
  bool passed = true;
};

MaxPrincipleReport max_principle_check(const std::vector<EnergyLedger>& rows, const MaterialLaws& laws,
                                       double tolerance = 1e-8);
MaxPrincipleReport max_principle_check(const Grid& grid, const std::vector<FieldState>& snapshots,
                                       const MaterialLaws& laws, double tolerance = 1e-8);

struct EntropyReport {
  double initial = 0.0;
  double final_value = 0.0;
  double cumulative_production = 0.0;
  /// entropy(tau) + sum dt productions - entropy(0); must be >= -tol |entropy(0)|.
  double slack = 0.0;
  /// entropy(tau) - entropy(0) - sum dt productions: the balance defect of the
  /// time discretisation (zero for the exact evolution). Reported only.
  double balance_defect = 0.0;
  double worst_production = 0.0;  // most negative single production term over all rows
  double tolerance = 1e-7;
  bool productions_nonnegative = true;
  bool passed = false;
  std::string note;
};

EntropyReport entropy_check(const std::vector<EnergyLedger>& rows, double production_tolerance = 1e-12,
                            double rel_tolerance = 1e-7);

struct EnergyReport {
  double initial = 0.0;
  double max_relative_drift = 0.0;
  double max_step_drift = 0.0;
  double tolerance = 1e-8;
  bool passed = false;
};

EnergyReport energy_conservation_check(const std::vector<EnergyLedger>& rows, double rel_tolerance = 1e-8);

// ----------------------------------------------------------------- monitors

struct GnReport {
  double grad_l4 = 0.0;
  double lap_l2 = 0.0;
  double linf = 0.0;
  double ratio = 0.0;
};

/// ||grad d||_4 / (||lap d||_2^{1/2} ||d||_inf^{1/2} + ||d||_inf); zero when d vanishes.
GnReport gn_monitor(const Grid& grid, const VectorField& d);

struct RenormReport {
  double residual_l1 = 0.0;
  double curvature_term = 0.0;  // int H''(theta)(kappa |grad theta|^2 + kappa_a |d . grad theta|^2), <= 0
};

/// Discrete residual of the renormalised heat balance with H = (1 + theta)^nu over one step.
RenormReport renorm_residual(const Grid& grid, const FieldState& before, const FieldState& after, double nu,
                             const MaterialLaws& laws, double dt);

struct NormExponents {
  std::vector<double> nu{0.25};
  std::vector<double> q{1.5};
  std::vector<double> p{1.2};
  void validate() const;
};

struct NormReport {
  double u_l2 = 0.0;
  double grad_u_l2 = 0.0;
  double grad_d_l2 = 0.0;
  double grad_d_l4 = 0.0;
  double lap_d_l2 = 0.0;
  double d_linf = 0.0;
  double theta_l1 = 0.0;
  double log_theta_l1 = 0.0;
  std::vector<std::pair<double, double>> grad_power_theta_l2;  // (nu, ||grad (1+theta)^nu||_2)
  std::vector<std::pair<double, double>> theta_lq;             // (q, ||theta||_q)
  std::vector<std::pair<double, double>> grad_theta_lp;        // (p, ||grad theta||_p)
  double pressure_l53 = 0.0;
};

NormReport apriori_norms(const Grid& grid, const FieldState& state, const NormExponents& exponents);

}  // namespace nematic
