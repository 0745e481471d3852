#include "nematic/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "nematic/errors.hpp"

namespace nematic {

void GalerkinConfig::validate() const {
  levels.validate();
  if (!(dt > 0.0)) throw RangeError("dt must be positive");
  if (!(t_end > 0.0)) throw RangeError("t_end must be positive");
  if (!(cfl_safety > 0.0 && cfl_safety <= 1.0)) throw RangeError("cfl_safety must lie in (0, 1]");
  if (max_dt_halvings < 0) throw RangeError("max_dt_halvings must be nonnegative");
}

std::string to_string(AbortReason reason) {
  switch (reason) {
    case AbortReason::positivity: return "positivity";
    case AbortReason::cfl: return "cfl";
    case AbortReason::solver: return "solver";
  }
  return "unknown";
}

StepAborted::StepAborted(AbortReport report)
    : std::runtime_error("run aborted (" + to_string(report.reason) + ") at t = " + std::to_string(report.time) +
                         (report.detail.empty() ? "" : ": " + report.detail)),
      report_(std::move(report)) {}

namespace {

struct StepFailure {
  AbortReason reason;
  std::string detail;
};

double max_speed(const VectorField& u) {
  double m = 0.0;
  for (std::size_t x = 0; x < u[0].size(); ++x) {
    double s = 0.0;
    for (const auto& c : u) s += c[x] * c[x];
    m = std::max(m, s);
  }
  return std::sqrt(m);
}

double dot(const Field& a, const Field& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

GalerkinSystem::GalerkinSystem(const Grid& grid, MaterialLaws laws, GalerkinConfig config)
    : grid_(grid), laws_(std::move(laws)), config_(config), basis_(grid, config.levels.n) {
  config_.validate();
}

double GalerkinSystem::kinetic_energy(const VectorField& u) const {
  Field e(grid_.size(), 0.0);
  for (const auto& c : u) {
    for (std::size_t x = 0; x < e.size(); ++x) e[x] += 0.5 * c[x] * c[x];
  }
  return grid_.integral(e);
}

FieldState GalerkinSystem::prepare(FieldState state) const {
  check_state(grid_, state);
  state.u_modes = basis_.project(state.u);
  state.u = basis_.synthesize(state.u_modes);
  state.p = pressure_solve(grid_, state, laws_, basis_, config_.levels);
  return state;
}

std::vector<double> GalerkinSystem::momentum_rhs(const FieldState& state) const {
  check_state(grid_, state);
  if (state.u_modes.size() != basis_.size()) {
    throw DimensionError("momentum_rhs: u_modes has " + std::to_string(state.u_modes.size()) +
                         " entries, basis has " + std::to_string(basis_.size()));
  }
  const int dim = grid_.dim();
  const VectorField um = basis_.synthesize(state.u_modes, config_.levels.m);
  GridTensor f = viscous_stress(grid_.grad(state.u), state.theta, laws_);
  const GridTensor tension = director_tension(grid_.grad(state.d));
  for (std::size_t x = 0; x < grid_.size(); ++x) {
    const double lam = laws_.dilatation(state.theta[x]);
    for (int i = 0; i < dim; ++i) {
      for (int j = 0; j < dim; ++j) {
        double& e = f.at(i, j)[x];
        e = state.u[i][x] * um[j][x] - e + lam * tension.at(i, j)[x];
      }
    }
  }
  return basis_.test_gradients(f);
}

VectorField GalerkinSystem::director_update(const VectorField& d, const VectorField& velocity, double dt,
                                            DirectorOptions opts) const {
  grid_.check_shape(d, 3, "director");
  grid_.check_shape(velocity, grid_.dim(), "velocity");
  if (!(dt > 0.0)) throw RangeError("dt must be positive");
  const int dim = grid_.dim();
  const std::size_t n = grid_.size();
  VectorField explicit_part(3, Field(n, 0.0));
  for (int c = 0; c < 3; ++c) {
    const VectorField g = grid_.grad(d[c]);
    for (std::size_t x = 0; x < n; ++x) {
      double adv = 0.0;
      for (int a = 0; a < dim; ++a) adv += velocity[a][x] * g[a][x];
      explicit_part[c][x] = -adv;
    }
  }
  if (opts.penalty) {
    for (std::size_t x = 0; x < n; ++x) {
      const PenaltyValue w = laws_.penalty({d[0][x], d[1][x], d[2][x]});
      for (int c = 0; c < 3; ++c) explicit_part[c][x] -= w.dw[c];
    }
  }
  VectorField out(3);
  for (int c = 0; c < 3; ++c) {
    Spectrum s = grid_.forward(d[c]);
    Spectrum e = grid_.forward(explicit_part[c]);
    grid_.dealias_spectrum(e);
    for (std::size_t pos = 0; pos < s.size(); ++pos) {
      double k2 = 0.0;
      if (opts.diffusion) {
        const IntVec m = grid_.spectral_index(pos);
        for (int a = 0; a < dim; ++a) {
          const double k = grid_.derivative_wavenumber(a, m[a]);
          k2 += k * k;
        }
      }
      s[pos] = (s[pos] + dt * e[pos]) / (1.0 + dt * k2);
    }
    out[c] = grid_.inverse(s);
  }
  return out;
}

VectorField GalerkinSystem::director_step(const FieldState& state, double dt, DirectorOptions opts) const {
  check_state(grid_, state);
  const VectorField um = state.u_modes.size() == basis_.size()
                             ? basis_.synthesize(state.u_modes, config_.levels.m)
                             : mode_truncate(state.u, config_.levels.m, basis_);
  return director_update(state.d, um, dt, opts);
}

Field GalerkinSystem::heat_source(const Field& power, double decrement, double dt) const {
  grid_.check_shape(power, "stress power");
  const double total = grid_.integral(power);
  const double shift = (decrement - dt * total) / grid_.domain().volume();
  Field s(power.size());
  for (std::size_t x = 0; x < s.size(); ++x) s[x] = dt * power[x] + shift;
  return s;
}

Field GalerkinSystem::heat_step(const FieldState& state, const Field& source, double dt, HeatOptions opts) const {
  check_state(grid_, state);
  grid_.check_shape(source, "heat source");
  if (!(dt > 0.0)) throw RangeError("dt must be positive");
  const int dim = grid_.dim();
  const std::size_t n = grid_.size();
  const Field& th = state.theta;

  VectorField flux(dim, Field(n));
  for (int a = 0; a < dim; ++a) {
    for (std::size_t x = 0; x < n; ++x) flux[a][x] = th[x] * state.u[a][x];
  }
  const Field adv = grid_.dealias(grid_.div(flux));
  const Field src = grid_.dealias(source);
  Field rhs(n);
  for (std::size_t x = 0; x < n; ++x) rhs[x] = th[x] - dt * adv[x] + src[x];

  std::vector<Conductivity> cond(n);
  for (std::size_t x = 0; x < n; ++x) cond[x] = laws_.conductivity(th[x]);
  // div(K grad f) with K = kappa I + kappa_aniso d d^T
  auto diffuse = [&](const Field& f) {
    VectorField g = grid_.grad(f);
    for (std::size_t x = 0; x < n; ++x) {
      double dg = 0.0;
      for (int a = 0; a < dim; ++a) dg += state.d[a][x] * g[a][x];
      for (int a = 0; a < dim; ++a) g[a][x] = cond[x].kappa * g[a][x] + cond[x].kappa_aniso * state.d[a][x] * dg;
    }
    return grid_.div(g);
  };

  Field out;
  if (!opts.implicit_diffusion) {
    const Field lap = diffuse(th);
    out = rhs;
    for (std::size_t x = 0; x < n; ++x) out[x] += dt * lap[x];
  } else {
    double kref = 0.0;
    for (std::size_t x = 0; x < n; ++x) {
      double d2 = 0.0;
      for (int a = 0; a < dim; ++a) d2 += state.d[a][x] * state.d[a][x];
      kref += cond[x].kappa + cond[x].kappa_aniso * d2 / dim;
    }
    kref /= static_cast<double>(n);
    std::vector<double> shift(grid_.spectrum_size());
    for (std::size_t pos = 0; pos < shift.size(); ++pos) {
      const IntVec m = grid_.spectral_index(pos);
      double k2 = 0.0;
      for (int a = 0; a < dim; ++a) {
        const double k = grid_.derivative_wavenumber(a, m[a]);
        k2 += k * k;
      }
      shift[pos] = 1.0 / (1.0 + dt * kref * k2);
    }
    auto apply = [&](const Field& f) {
      Field r = diffuse(f);
      for (std::size_t x = 0; x < n; ++x) r[x] = f[x] - dt * r[x];
      return r;
    };
    auto precondition = [&](const Field& r) {
      Spectrum s = grid_.forward(r);
      for (std::size_t pos = 0; pos < s.size(); ++pos) s[pos] *= shift[pos];
      return grid_.inverse(s);
    };
    // Preconditioned conjugate gradients from x0 = rhs; every correction has
    // zero mean, so the integral of theta is kept.
    Field x = rhs;
    Field r = apply(x);
    for (std::size_t i = 0; i < n; ++i) r[i] = rhs[i] - r[i];
    const double bnorm = std::sqrt(dot(rhs, rhs));
    Field z = precondition(r);
    Field p = z;
    double rz = dot(r, z);
    int it = 0;
    double rnorm = std::sqrt(dot(r, r));
    while (rnorm > opts.tolerance * bnorm && it < opts.max_iterations) {
      const Field ap = apply(p);
      const double alpha = rz / dot(p, ap);
      for (std::size_t i = 0; i < n; ++i) {
        x[i] += alpha * p[i];
        r[i] -= alpha * ap[i];
      }
      rnorm = std::sqrt(dot(r, r));
      z = precondition(r);
      const double rz_new = dot(r, z);
      const double beta = rz_new / rz;
      rz = rz_new;
      for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
      ++it;
    }
    if (rnorm > 1e3 * opts.tolerance * bnorm) {
      std::ostringstream os;
      os << "heat solve stalled at relative residual " << rnorm / bnorm << " after " << it << " iterations";
      throw StepAborted(AbortReport{AbortReason::solver, state.time, {}, os.str()});
    }
    out = std::move(x);
  }
  return grid_.dealias(out);
}

FieldState GalerkinSystem::step(const FieldState& state, double dt) const {
  const std::size_t nm = basis_.size();
  const double mu_lo = laws_.params().mu_lo;

  // momentum
  const std::vector<double> rhs = momentum_rhs(state);
  std::vector<double> a(nm);
  for (std::size_t i = 0; i < nm; ++i) {
    const double k2 = basis_.mode(i).k2;
    a[i] = (state.u_modes[i] + dt * (rhs[i] + mu_lo * k2 * state.u_modes[i])) / (1.0 + dt * mu_lo * k2);
  }
  VectorField u_new = basis_.synthesize(a);
  const double decrement = kinetic_energy(state.u) - kinetic_energy(u_new);
  if (config_.forcing != 0.0 && nm > 0) {
    a[0] += dt * config_.forcing / (1.0 + dt * mu_lo * basis_.mode(0).k2);
    u_new = basis_.synthesize(a);
  }

  FieldState next;
  next.u = std::move(u_new);
  next.u_modes = std::move(a);
  next.time = state.time + dt;

  // director
  const VectorField um = basis_.synthesize(next.u_modes, config_.levels.m);
  next.d = director_update(state.d, um, dt);

  // heat
  const Field power = config_.explicit_source ? stress_power(grid_, state.u, state.d, state.theta, laws_)
                                              : stress_power(grid_, next.u, next.d, state.theta, laws_);
  const Field source = heat_source(power, decrement, dt);
  FieldState heat_in;
  heat_in.u = next.u;
  heat_in.d = next.d;
  heat_in.theta = state.theta;
  heat_in.p = state.p;
  heat_in.time = state.time;
  HeatOptions hopts;
  hopts.implicit_diffusion = config_.implicit_diffusion;
  next.theta = heat_step(heat_in, source, dt, hopts);
  next.p = grid_.zeros();
  return next;
}

std::pair<FieldState, StepReport> GalerkinSystem::advance(const FieldState& state) const {
  return advance(state, config_.dt);
}

std::pair<FieldState, StepReport> GalerkinSystem::advance(const FieldState& state, double dt) const {
  check_state(grid_, state);
  if (!(dt > 0.0)) throw RangeError("dt must be positive");
  FieldState current = state;
  if (current.u_modes.size() != basis_.size()) current = prepare(std::move(current));

  const double h = grid_.min_spacing();
  const double speed = max_speed(current.u);
  double trial = dt;
  int halvings = 0;
  StepFailure failure{AbortReason::cfl, ""};
  while (true) {
    if (halvings > config_.max_dt_halvings) {
      throw StepAborted(AbortReport{failure.reason, state.time, {}, failure.detail});
    }
    if (speed * trial > config_.cfl_safety * h) {
      std::ostringstream os;
      os << "dt = " << trial << " violates the CFL bound " << config_.cfl_safety * h / speed;
      failure = {AbortReason::cfl, os.str()};
      trial *= 0.5;
      ++halvings;
      continue;
    }
    FieldState next = step(current, trial);
    const double min_theta = *std::min_element(next.theta.begin(), next.theta.end());
    if (!(min_theta > 0.0)) {
      std::ostringstream os;
      os << "min theta = " << min_theta << " with dt = " << trial;
      failure = {AbortReason::positivity, os.str()};
      trial *= 0.5;
      ++halvings;
      continue;
    }
    next.p = pressure_solve(grid_, next, laws_, basis_, config_.levels);
    const EnergyLedger after = energy_ledger(grid_, next, laws_);
    StepReport rep;
    rep.time = next.time;
    const double e0 = kinetic_energy(current.u) + grid_.integral(current.theta);
    rep.energy_drift = (after.total_energy() - e0) / (e0 != 0.0 ? std::abs(e0) : 1.0);
    rep.production_dir = after.production_dir;
    rep.production_visc = after.production_visc.value_or(std::numeric_limits<double>::quiet_NaN());
    rep.production_heat = after.production_heat.value_or(std::numeric_limits<double>::quiet_NaN());
    rep.min_theta = after.min_theta;
    rep.max_d_sq = after.max_d_sq;
    rep.dt_used = trial;
    rep.halvings = halvings;
    return {std::move(next), rep};
  }
}

RunResult GalerkinSystem::run(const FieldState& initial, RunSink* sink, std::size_t snapshot_stride) const {
  RunResult res;
  FieldState state = initial.u_modes.size() == basis_.size() ? initial : prepare(initial);
  EnergyLedger first = energy_ledger(grid_, state, laws_);
  const double e0 = first.total_energy();
  const double escale = e0 != 0.0 ? std::abs(e0) : 1.0;
  res.ledgers.push_back(first);
  res.max_gn_ratio = gn_monitor(grid_, state.d).ratio;
  if (sink && snapshot_stride > 0) sink->on_snapshot(state, 0);

  const double t_end = config_.t_end;
  std::size_t count = 0;
  while (state.time < t_end - 1e-6 * config_.dt) {
    const double dt = std::min(config_.dt, t_end - state.time);
    std::pair<FieldState, StepReport> out;
    try {
      out = advance(state, dt);
    } catch (const StepAborted& e) {
      AbortReport rep = e.report();
      rep.time = state.time;
      if (!res.reports.empty()) rep.last = res.reports.back();
      res.abort = rep;
      break;
    }
    state = std::move(out.first);
    ++count;
    EnergyLedger row = energy_ledger(grid_, state, laws_);
    row.energy_drift = (row.total_energy() - e0) / escale;
    res.max_gn_ratio = std::max(res.max_gn_ratio, gn_monitor(grid_, state.d).ratio);
    res.reports.push_back(out.second);
    res.ledgers.push_back(row);
    if (sink) {
      sink->on_step(out.second, row);
      if (snapshot_stride > 0 && count % snapshot_stride == 0) sink->on_snapshot(state, count);
    }
  }
  if (sink && snapshot_stride > 0 && count % snapshot_stride != 0) sink->on_snapshot(state, count);
  res.final_state = std::move(state);
  return res;
}

}  // namespace nematic
