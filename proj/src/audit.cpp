#include "nematic/audit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "nematic/errors.hpp"

namespace nematic {

namespace {

double frob_sq(const GridTensor& t, std::size_t x) {
  double s = 0.0;
  for (const auto& e : t.entries) s += e[x] * e[x];
  return s;
}

Vec3 director_at(const VectorField& d, std::size_t x) { return {d[0][x], d[1][x], d[2][x]}; }

double weighted_sum(const Grid& grid, const Field& f) { return grid.integral(f); }

}  // namespace

EnergyLedger energy_ledger(const Grid& grid, const FieldState& state, const MaterialLaws& laws) {
  check_state(grid, state);
  const std::size_t n = grid.size();
  const int dim = grid.dim();
  EnergyLedger L;
  L.time = state.time;

  const GridTensor gd = grid.grad(state.d);
  const GridTensor gu = grid.grad(state.u);
  const VectorField gt = grid.grad(state.theta);

  Field kin(n), el(n), pen(n), pdir(n);
  VectorField lap_d(3);
  for (int c = 0; c < 3; ++c) lap_d[c] = grid.laplacian(state.d[c]);

  L.min_theta = std::numeric_limits<double>::infinity();
  L.max_theta = -std::numeric_limits<double>::infinity();
  for (std::size_t x = 0; x < n; ++x) {
    double u2 = 0.0;
    for (int a = 0; a < dim; ++a) u2 += state.u[a][x] * state.u[a][x];
    kin[x] = 0.5 * u2;
    el[x] = 0.5 * frob_sq(gd, x);
    const Vec3 dv = director_at(state.d, x);
    const PenaltyValue w = laws.penalty(dv);
    pen[x] = w.w;
    double r = 0.0;
    for (int c = 0; c < 3; ++c) {
      const double rc = lap_d[c][x] - w.dw[c];
      r += rc * rc;
    }
    pdir[x] = r;
    L.min_theta = std::min(L.min_theta, state.theta[x]);
    L.max_theta = std::max(L.max_theta, state.theta[x]);
    L.max_d_sq = std::max(L.max_d_sq, dv[0] * dv[0] + dv[1] * dv[1] + dv[2] * dv[2]);
  }
  L.kinetic = weighted_sum(grid, kin);
  L.thermal = weighted_sum(grid, state.theta);
  L.elastic = weighted_sum(grid, el);
  L.penalty = weighted_sum(grid, pen);
  L.production_dir = weighted_sum(grid, pdir);

  if (L.min_theta < laws.params().theta_floor) return L;

  Field ent(n), pvisc(n), pheat(n);
  const VectorField q = heat_flux(gt, state.d, state.theta, laws);
  for (std::size_t x = 0; x < n; ++x) {
    const double th = state.theta[x];
    const double lam = laws.dilatation(th);
    if (!(lam > 0.0)) return L;
    const double mu = laws.viscosity(th);
    double sgu = 0.0;
    for (int i = 0; i < dim; ++i) {
      for (int j = 0; j < dim; ++j) {
        const double g = gu.at(i, j)[x];
        sgu += mu * (g + gu.at(j, i)[x]) * g;
      }
    }
    pvisc[x] = sgu / lam;
    double qg = 0.0;
    for (int a = 0; a < dim; ++a) qg += q[a][x] * gt[a][x];
    pheat[x] = -qg * laws.dilatation_slope(th) / (lam * lam);
    ent[x] = laws.dilatation_primitive(th) - el[x] - pen[x];
  }
  L.entropy = weighted_sum(grid, ent);
  L.production_visc = weighted_sum(grid, pvisc);
  L.production_heat = weighted_sum(grid, pheat);
  return L;
}

// --------------------------------------------------------------------- csv

const std::vector<std::string> kLedgerColumns = {
    "time",           "kinetic",         "thermal",   "elastic",  "penalty",      "entropy",
    "production_dir", "production_visc", "production_heat", "min_theta", "max_d_sq", "energy_drift"};

std::string ledger_csv_header() {
  std::string s;
  for (std::size_t i = 0; i < kLedgerColumns.size(); ++i) {
    if (i) s += ',';
    s += kLedgerColumns[i];
  }
  return s;
}

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : std::string("nan"); }

}  // namespace

std::string ledger_csv_row(const EnergyLedger& r) {
  std::string s;
  for (const std::string& v : {fmt(r.time), fmt(r.kinetic), fmt(r.thermal), fmt(r.elastic), fmt(r.penalty),
                               fmt(r.entropy), fmt(r.production_dir), fmt(r.production_visc),
                               fmt(r.production_heat), fmt(r.min_theta), fmt(r.max_d_sq), fmt(r.energy_drift)}) {
    if (!s.empty()) s += ',';
    s += v;
  }
  return s;
}

void write_ledger_csv(const std::string& path, const std::vector<EnergyLedger>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open ledger '" + path + "' for writing");
  out << ledger_csv_header() << '\n';
  for (const auto& r : rows) out << ledger_csv_row(r) << '\n';
  if (!out) throw IoError("failed writing ledger '" + path + "'");
}

// ------------------------------------------------------------ cross check

namespace {

// Sixth-order central difference on the periodic computational grid.
Field fd6(const Grid& grid, const Field& f, int axis) {
  static constexpr double c[3] = {45.0 / 60.0, -9.0 / 60.0, 1.0 / 60.0};
  const IntVec& ext = grid.extent();
  const double h = grid.spacing(axis);
  Field out(f.size(), 0.0);
  for (int i2 = 0; i2 < ext[2]; ++i2) {
    for (int i1 = 0; i1 < ext[1]; ++i1) {
      for (int i0 = 0; i0 < ext[0]; ++i0) {
        IntVec id{i0, i1, i2};
        double acc = 0.0;
        for (int s = 1; s <= 3; ++s) {
          IntVec p = id, m = id;
          p[axis] = (id[axis] + s) % ext[axis];
          m[axis] = (id[axis] - s + ext[axis] * 3) % ext[axis];
          acc += c[s - 1] * (f[grid.index(p[0], p[1], p[2])] - f[grid.index(m[0], m[1], m[2])]);
        }
        out[grid.index(i0, i1, i2)] = acc / h;
      }
    }
  }
  return out;
}

}  // namespace

CrossCheck ledger_cross_check(const Grid& grid, const FieldState& state, const MaterialLaws& laws,
                              const EnergyLedger& ledger, double tolerance) {
  check_state(grid, state);
  CrossCheck cc;
  const double w = grid.domain().volume() / static_cast<double>(grid.size());
  for (std::size_t x = 0; x < grid.size(); ++x) {
    double u2 = 0.0;
    for (const auto& uc : state.u) u2 += uc[x] * uc[x];
    cc.kinetic += 0.5 * u2 * w;
    cc.thermal += state.theta[x] * w;
    cc.penalty += laws.penalty(director_at(state.d, x)).w * w;
  }
  for (int c = 0; c < 3; ++c) {
    for (int a = 0; a < grid.dim(); ++a) {
      const Field g = fd6(grid, state.d[c], a);
      for (double v : g) cc.elastic += 0.5 * v * v * w;
    }
  }
  auto rel = [](double a, double b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale < 1e-14 ? 0.0 : std::abs(a - b) / scale;
  };
  cc.worst_relative_difference = std::max({rel(cc.kinetic, ledger.kinetic), rel(cc.thermal, ledger.thermal),
                                           rel(cc.elastic, ledger.elastic), rel(cc.penalty, ledger.penalty)});
  cc.passed = cc.worst_relative_difference <= tolerance;
  return cc;
}

// ------------------------------------------------------ trajectory checks

namespace {

std::optional<double> total_production(const EnergyLedger& r) {
  if (!r.production_visc || !r.production_heat) return std::nullopt;
  return r.production_dir + *r.production_visc + *r.production_heat;
}

}  // namespace

std::optional<double> cumulative_production(const std::vector<EnergyLedger>& rows) {
  double acc = 0.0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto a = total_production(rows[i - 1]);
    const auto b = total_production(rows[i]);
    if (!a || !b) return std::nullopt;
    acc += 0.5 * (rows[i].time - rows[i - 1].time) * (*a + *b);
  }
  return acc;
}

double default_dissipation_constant(const std::vector<EnergyLedger>& rows, const MaterialLaws& laws) {
  if (rows.empty()) throw std::invalid_argument("empty trajectory");
  double lo = rows.front().min_theta;
  double hi = rows.front().max_theta;
  for (const auto& r : rows) {
    lo = std::min(lo, r.min_theta);
    hi = std::max(hi, r.max_theta);
  }
  lo = std::max(lo, laws.params().theta_floor);
  hi = std::max(hi, lo);
  double sup = 1.0;
  constexpr int samples = 64;
  for (int i = 0; i <= samples; ++i) {
    const double th = lo + (hi - lo) * i / samples;
    const double lam = laws.dilatation(th);
    if (lam > 0.0) sup = std::max(sup, 1.0 / lam);
  }
  return 2.0 * sup;
}

DissipationReport total_dissipation_check(const std::vector<EnergyLedger>& rows, double k,
                                          const MaterialLaws& laws, double rel_tolerance) {
  DissipationReport rep;
  rep.k = k;
  if (rows.empty()) throw std::invalid_argument("empty trajectory");
  if (!(k > 0.0)) throw RangeError("dissipation constant K must be positive");

  double lo = rows.front().min_theta, hi = rows.front().max_theta;
  for (const auto& r : rows) {
    lo = std::min(lo, r.min_theta);
    hi = std::max(hi, r.max_theta);
  }
  if (lo < laws.params().theta_floor) {
    rep.note = "temperature below the floor; entropy entries unavailable";
    return rep;
  }
  rep.min_k_theta_minus_lambda = std::numeric_limits<double>::infinity();
  constexpr int samples = 256;
  for (int i = 0; i <= samples; ++i) {
    const double th = lo + (hi - lo) * i / samples;
    const double g = k * th - laws.dilatation_primitive(th);
    if (g < rep.min_k_theta_minus_lambda) {
      rep.min_k_theta_minus_lambda = g;
      rep.theta_at_min = th;
    }
  }
  if (rep.min_k_theta_minus_lambda < 0.0) {
    rep.k_admissible = false;
    std::ostringstream os;
    os << "K = " << k << " too small: K theta - Lambda(theta) = " << rep.min_k_theta_minus_lambda
       << " at theta = " << rep.theta_at_min;
    rep.note = os.str();
    return rep;
  }

  auto bracket = [k](const EnergyLedger& r) { return k * r.total_energy() - *r.entropy; };
  for (const auto& r : rows) {
    if (!r.entropy) {
      rep.note = "entropy entry flagged at t = " + fmt(r.time);
      return rep;
    }
  }
  const auto prod = cumulative_production(rows);
  if (!prod) {
    rep.note = "production entries flagged";
    return rep;
  }
  rep.bracket_initial = bracket(rows.front());
  rep.bracket_final = bracket(rows.back());
  rep.cumulative_production = *prod;
  rep.excess = rep.bracket_final + rep.cumulative_production - rep.bracket_initial;
  rep.tolerance = rel_tolerance * std::abs(rep.bracket_initial);
  rep.passed = rep.excess <= rep.tolerance;
  if (!rep.passed) rep.note = "dissipation balance exceeded by " + fmt(rep.excess);
  return rep;
}

MaxPrincipleReport max_principle_check(const std::vector<EnergyLedger>& rows, const MaterialLaws& laws,
                                       double tolerance) {
  MaxPrincipleReport rep;
  rep.tolerance = tolerance;
  if (rows.empty()) return rep;
  const double d0 = laws.params().d0;
  rep.bound = std::max(rows.front().max_d_sq, d0 * d0);
  rep.worst = rows.front().max_d_sq;
  rep.worst_time = rows.front().time;
  for (const auto& r : rows) {
    if (r.max_d_sq > rep.worst) {
      rep.worst = r.max_d_sq;
      rep.worst_time = r.time;
    }
  }
  rep.passed = rep.worst <= rep.bound + tolerance;
  return rep;
}

MaxPrincipleReport max_principle_check(const Grid& grid, const std::vector<FieldState>& snapshots,
                                       const MaterialLaws& laws, double tolerance) {
  std::vector<EnergyLedger> rows;
  rows.reserve(snapshots.size());
  for (const auto& s : snapshots) {
    grid.check_shape(s.d, 3, "director");
    EnergyLedger r;
    r.time = s.time;
    for (std::size_t x = 0; x < grid.size(); ++x) {
      const Vec3 d = director_at(s.d, x);
      r.max_d_sq = std::max(r.max_d_sq, d[0] * d[0] + d[1] * d[1] + d[2] * d[2]);
    }
    rows.push_back(r);
  }
  return max_principle_check(rows, laws, tolerance);
}

EntropyReport entropy_check(const std::vector<EnergyLedger>& rows, double production_tolerance,
                            double rel_tolerance) {
  EntropyReport rep;
  rep.tolerance = rel_tolerance;
  if (rows.empty()) throw std::invalid_argument("empty trajectory");
  for (const auto& r : rows) {
    const auto p = total_production(r);
    if (!r.entropy || !p) {
      rep.note = "entropy entries flagged at t = " + fmt(r.time);
      return rep;
    }
    rep.worst_production = std::min({rep.worst_production, r.production_dir, *r.production_visc, *r.production_heat});
  }
  rep.productions_nonnegative = rep.worst_production >= -production_tolerance;
  rep.initial = *rows.front().entropy;
  rep.final_value = *rows.back().entropy;
  rep.cumulative_production = *cumulative_production(rows);
  rep.slack = rep.final_value + rep.cumulative_production - rep.initial;
  rep.balance_defect = rep.final_value - rep.initial - rep.cumulative_production;
  rep.passed = rep.productions_nonnegative && rep.slack >= -rel_tolerance * std::abs(rep.initial);
  if (!rep.productions_nonnegative) rep.note = "negative production " + fmt(rep.worst_production);
  return rep;
}

EnergyReport energy_conservation_check(const std::vector<EnergyLedger>& rows, double rel_tolerance) {
  EnergyReport rep;
  rep.tolerance = rel_tolerance;
  if (rows.empty()) throw std::invalid_argument("empty trajectory");
  rep.initial = rows.front().total_energy();
  const double scale = std::abs(rep.initial) > 0.0 ? std::abs(rep.initial) : 1.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rep.max_relative_drift =
        std::max(rep.max_relative_drift, std::abs(rows[i].total_energy() - rep.initial) / scale);
    if (i > 0) {
      rep.max_step_drift =
          std::max(rep.max_step_drift, std::abs(rows[i].total_energy() - rows[i - 1].total_energy()) / scale);
    }
  }
  rep.passed = rep.max_relative_drift <= rel_tolerance;
  return rep;
}

// ---------------------------------------------------------------- monitors

GnReport gn_monitor(const Grid& grid, const VectorField& d) {
  grid.check_shape(d, 3, "director");
  GnReport rep;
  const GridTensor gd = grid.grad(d);
  Field g4(grid.size()), l2(grid.size(), 0.0);
  for (std::size_t x = 0; x < grid.size(); ++x) {
    const double s = frob_sq(gd, x);
    g4[x] = s * s;
    double m = 0.0;
    for (int c = 0; c < 3; ++c) m += d[c][x] * d[c][x];
    rep.linf = std::max(rep.linf, std::sqrt(m));
  }
  for (int c = 0; c < 3; ++c) {
    const Field lap = grid.laplacian(d[c]);
    for (std::size_t x = 0; x < grid.size(); ++x) l2[x] += lap[x] * lap[x];
  }
  rep.grad_l4 = std::pow(std::max(grid.integral(g4), 0.0), 0.25);
  rep.lap_l2 = std::sqrt(std::max(grid.integral(l2), 0.0));
  const double denom = std::sqrt(rep.lap_l2) * std::sqrt(rep.linf) + rep.linf;
  rep.ratio = denom > 0.0 ? rep.grad_l4 / denom : 0.0;
  return rep;
}

RenormReport renorm_residual(const Grid& grid, const FieldState& before, const FieldState& after, double nu,
                             const MaterialLaws& laws, double dt) {
  if (!(nu > 0.0 && nu < 0.5)) throw RangeError("renormalisation exponent must lie in (0, 1/2), got " + fmt(nu));
  if (!(dt > 0.0)) throw RangeError("time step must be positive");
  check_state(grid, before);
  check_state(grid, after);
  const std::size_t n = grid.size();
  const int dim = grid.dim();
  for (std::size_t x = 0; x < n; ++x) {
    if (!(before.theta[x] > 0.0) || !(after.theta[x] > 0.0)) throw DomainError("renormalised residual needs theta > 0");
  }
  auto H = [nu](double t) { return std::pow(1.0 + t, nu); };
  auto H1 = [nu](double t) { return nu * std::pow(1.0 + t, nu - 1.0); };
  auto H2 = [nu](double t) { return nu * (nu - 1.0) * std::pow(1.0 + t, nu - 2.0); };

  const Field& th = after.theta;
  const VectorField gt = grid.grad(th);
  const VectorField q = heat_flux(gt, after.d, th, laws);
  VectorField hu(dim, Field(n)), hq(dim, Field(n));
  Field curv(n);
  for (std::size_t x = 0; x < n; ++x) {
    const double h = H(th[x]), h1 = H1(th[x]);
    for (int a = 0; a < dim; ++a) {
      hu[a][x] = h * after.u[a][x];
      hq[a][x] = h1 * q[a][x];
    }
    const auto c = laws.conductivity(th[x]);
    double g2 = 0.0, dg = 0.0;
    for (int a = 0; a < dim; ++a) {
      g2 += gt[a][x] * gt[a][x];
      dg += after.d[a][x] * gt[a][x];
    }
    curv[x] = H2(th[x]) * (c.kappa * g2 + c.kappa_aniso * dg * dg);
  }
  const Field div_hu = grid.div(hu);
  const Field div_hq = grid.div(hq);
  const Field power = stress_power(grid, after.u, after.d, th, laws);
  Field res(n);
  for (std::size_t x = 0; x < n; ++x) {
    const double r = (H(th[x]) - H(before.theta[x])) / dt + div_hu[x] + div_hq[x] + curv[x] - H1(th[x]) * power[x];
    res[x] = std::abs(r);
  }
  RenormReport rep;
  rep.residual_l1 = grid.integral(res);
  rep.curvature_term = grid.integral(curv);
  return rep;
}

void NormExponents::validate() const {
  for (double v : nu) {
    if (!(v > 0.0 && v < 0.5)) throw RangeError("exponent nu must lie in (0, 1/2), got " + fmt(v));
  }
  for (double v : q) {
    if (!(v >= 1.0 && v < 5.0 / 3.0)) throw RangeError("exponent q must lie in [1, 5/3), got " + fmt(v));
  }
  for (double v : p) {
    if (!(v >= 1.0 && v < 1.25)) throw RangeError("exponent p must lie in [1, 5/4), got " + fmt(v));
  }
}

NormReport apriori_norms(const Grid& grid, const FieldState& state, const NormExponents& exponents) {
  check_state(grid, state);
  exponents.validate();
  const std::size_t n = grid.size();
  const int dim = grid.dim();
  NormReport rep;
  auto lp = [&](const Field& pointwise_abs, double p) {
    Field f(n);
    for (std::size_t x = 0; x < n; ++x) f[x] = std::pow(pointwise_abs[x], p);
    return std::pow(std::max(grid.integral(f), 0.0), 1.0 / p);
  };
  Field a(n);
  for (std::size_t x = 0; x < n; ++x) {
    double s = 0.0;
    for (int c = 0; c < dim; ++c) s += state.u[c][x] * state.u[c][x];
    a[x] = std::sqrt(s);
  }
  rep.u_l2 = lp(a, 2.0);
  const GridTensor gu = grid.grad(state.u);
  for (std::size_t x = 0; x < n; ++x) a[x] = std::sqrt(frob_sq(gu, x));
  rep.grad_u_l2 = lp(a, 2.0);
  const GridTensor gd = grid.grad(state.d);
  for (std::size_t x = 0; x < n; ++x) a[x] = std::sqrt(frob_sq(gd, x));
  rep.grad_d_l2 = lp(a, 2.0);
  rep.grad_d_l4 = lp(a, 4.0);
  Field lap2(n, 0.0);
  for (int c = 0; c < 3; ++c) {
    const Field l = grid.laplacian(state.d[c]);
    for (std::size_t x = 0; x < n; ++x) lap2[x] += l[x] * l[x];
  }
  for (std::size_t x = 0; x < n; ++x) {
    a[x] = std::sqrt(lap2[x]);
    double m = 0.0;
    for (int c = 0; c < 3; ++c) m += state.d[c][x] * state.d[c][x];
    rep.d_linf = std::max(rep.d_linf, std::sqrt(m));
  }
  rep.lap_d_l2 = lp(a, 2.0);

  Field th_abs(n), log_abs(n);
  for (std::size_t x = 0; x < n; ++x) {
    th_abs[x] = std::abs(state.theta[x]);
    log_abs[x] = state.theta[x] > 0.0 ? std::abs(std::log(state.theta[x])) : std::numeric_limits<double>::infinity();
  }
  rep.theta_l1 = grid.integral(th_abs);
  rep.log_theta_l1 = grid.integral(log_abs);
  const VectorField gt = grid.grad(state.theta);
  Field gtn(n);
  for (std::size_t x = 0; x < n; ++x) {
    double s = 0.0;
    for (int c = 0; c < dim; ++c) s += gt[c][x] * gt[c][x];
    gtn[x] = std::sqrt(s);
  }
  for (double nu : exponents.nu) {
    for (std::size_t x = 0; x < n; ++x) {
      const double base = 1.0 + state.theta[x];
      a[x] = base > 0.0 ? nu * std::pow(base, nu - 1.0) * gtn[x] : std::numeric_limits<double>::infinity();
    }
    rep.grad_power_theta_l2.emplace_back(nu, lp(a, 2.0));
  }
  for (double q : exponents.q) rep.theta_lq.emplace_back(q, lp(th_abs, q));
  for (double p : exponents.p) rep.grad_theta_lp.emplace_back(p, lp(gtn, p));
  for (std::size_t x = 0; x < n; ++x) a[x] = std::abs(state.p[x]);
  rep.pressure_l53 = lp(a, 5.0 / 3.0);
  return rep;
}

}  // namespace nematic
