#include "nematic/driver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "nematic/errors.hpp"

namespace nematic {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string snapshot_name(std::size_t step) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "snapshot_%06zu.bin", step);
  return buf;
}

class FileSink : public RunSink {
 public:
  FileSink(const Grid& grid, std::string dir) : grid_(grid), dir_(std::move(dir)) {}
  void on_snapshot(const FieldState& state, std::size_t step) override {
    write_snapshot((fs::path(dir_) / snapshot_name(step)).string(), grid_, state);
  }

 private:
  const Grid& grid_;
  std::string dir_;
};

json norms_json(const NormReport& n) {
  json j;
  j["u_l2"] = n.u_l2;
  j["grad_u_l2"] = n.grad_u_l2;
  j["grad_d_l2"] = n.grad_d_l2;
  j["grad_d_l4"] = n.grad_d_l4;
  j["lap_d_l2"] = n.lap_d_l2;
  j["d_linf"] = n.d_linf;
  j["theta_l1"] = n.theta_l1;
  j["log_theta_l1"] = n.log_theta_l1;
  j["pressure_l53"] = n.pressure_l53;
  for (const auto& [e, v] : n.grad_power_theta_l2) j["grad_power_theta_l2"].push_back({{"nu", e}, {"value", v}});
  for (const auto& [e, v] : n.theta_lq) j["theta_lq"].push_back({{"q", e}, {"value", v}});
  for (const auto& [e, v] : n.grad_theta_lp) j["grad_theta_lp"].push_back({{"p", e}, {"value", v}});
  return j;
}

json ledger_json(const EnergyLedger& l) {
  json j;
  j["time"] = l.time;
  j["kinetic"] = l.kinetic;
  j["thermal"] = l.thermal;
  j["elastic"] = l.elastic;
  j["penalty"] = l.penalty;
  j["entropy"] = l.entropy ? json(*l.entropy) : json();
  j["production_dir"] = l.production_dir;
  j["production_visc"] = l.production_visc ? json(*l.production_visc) : json();
  j["production_heat"] = l.production_heat ? json(*l.production_heat) : json();
  j["min_theta"] = l.min_theta;
  j["max_d_sq"] = l.max_d_sq;
  return j;
}

}  // namespace

std::vector<InvariantResult> evaluate_invariants(const Grid& grid, const RunResult& result, const MaterialLaws& laws,
                                                 double dissipation_k) {
  std::vector<InvariantResult> out;
  const auto& rows = result.ledgers;

  {
    InvariantResult r{"completed", !result.abort.has_value(), 0.0, 0.0, ""};
    if (result.abort) {
      r.note = to_string(result.abort->reason) + " at t = " + std::to_string(result.abort->time) + ": " +
               result.abort->detail;
    }
    out.push_back(r);
  }
  {
    const EnergyReport e = energy_conservation_check(rows);
    out.push_back({"energy_conservation", e.passed, e.max_relative_drift, e.tolerance, ""});
  }
  {
    double min_theta = std::numeric_limits<double>::infinity();
    for (const auto& l : rows) min_theta = std::min(min_theta, l.min_theta);
    out.push_back({"positivity", min_theta > 0.0, min_theta, 0.0, ""});
  }
  {
    const EntropyReport e = entropy_check(rows);
    out.push_back({"production_signs", e.productions_nonnegative && e.note.find("flagged") == std::string::npos,
                   e.worst_production, -1e-12, e.note});
    InvariantResult ineq{"entropy_inequality", e.passed, e.slack, -e.tolerance * std::abs(e.initial), e.note};
    if (ineq.note.empty()) ineq.note = "balance defect " + std::to_string(e.balance_defect);
    out.push_back(ineq);
  }
  {
    const MaxPrincipleReport m = max_principle_check(rows, laws);
    out.push_back({"max_principle", m.passed, m.worst, m.bound + m.tolerance,
                   "worst at t = " + std::to_string(m.worst_time)});
  }
  {
    const double k = dissipation_k > 0.0 ? dissipation_k : default_dissipation_constant(rows, laws);
    const DissipationReport d = total_dissipation_check(rows, k, laws);
    std::string note = d.note.empty() ? "K = " + std::to_string(k) : d.note;
    // first-order time stepping leaves an O(dt) defect here, so it is reported only
    out.push_back({"total_dissipation", d.passed, d.excess, d.tolerance, note, false});
  }
  {
    const EnergyLedger last = energy_ledger(grid, result.final_state, laws);
    const CrossCheck c = ledger_cross_check(grid, result.final_state, laws, last);
    out.push_back({"quadrature_cross_check", c.passed, c.worst_relative_difference, 1e-4, ""});
  }
  return out;
}

RunOutcome run_command(const RunConfig& cfg, const std::string& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory '" + out_dir + "': " + ec.message());

  const Grid grid(cfg.domain);
  const MaterialLaws laws = cfg.laws();
  const GalerkinSystem system(grid, laws, cfg.galerkin);
  const FieldState initial = system.prepare(make_initial(cfg.initial, grid, laws));

  FileSink sink(grid, out_dir);
  RunOutcome outcome;
  outcome.result = system.run(initial, &sink, cfg.snapshot_stride);
  const RunResult& res = outcome.result;

  write_ledger_csv((fs::path(out_dir) / "ledger.csv").string(), res.ledgers);
  outcome.norms = apriori_norms(grid, res.final_state, cfg.exponents);
  outcome.invariants = evaluate_invariants(grid, res, laws, cfg.dissipation_k);

  if (cfg.heatmaps) {
    emit_heatmap(grid, res.final_state.theta, (fs::path(out_dir) / "theta.pgm").string());
    for (int c = 0; c < grid.dim(); ++c) {
      emit_heatmap(grid, res.final_state.u[c], (fs::path(out_dir) / ("u" + std::to_string(c + 1) + ".pgm")).string());
    }
    emit_heatmap(grid, res.final_state.p, (fs::path(out_dir) / "p.pgm").string());
  }

  bool ok = true;
  json j;
  j["seed"] = cfg.initial.seed;
  j["preset"] = to_string(cfg.initial.preset);
  j["steps"] = res.reports.size();
  j["final_time"] = res.final_state.time;
  j["laws"] = laws.describe();
  for (const auto& inv : outcome.invariants) {
    if (inv.gating) ok = ok && inv.passed;
    j[inv.gating ? "invariants" : "checks"][inv.name] = {{"passed", inv.passed}, {"worst", inv.worst}, {"tolerance", inv.tolerance},
                                 {"note", inv.note}};
  }
  j["max_gn_ratio"] = res.max_gn_ratio;
  j["norms"] = norms_json(outcome.norms);
  if (!res.ledgers.empty()) j["final_ledger"] = ledger_json(res.ledgers.back());
  if (res.abort) {
    const auto& a = *res.abort;
    j["abort"] = {{"reason", to_string(a.reason)}, {"time", a.time},     {"detail", a.detail},
                  {"last_dt", a.last.dt_used},     {"last_time", a.last.time}, {"last_min_theta", a.last.min_theta}};
  }
  j["passed"] = ok;
  outcome.summary_json = j.dump(2);
  std::ofstream out(fs::path(out_dir) / "summary.json");
  if (!out) throw IoError("cannot write summary in '" + out_dir + "'");
  out << outcome.summary_json << '\n';
  outcome.exit_code = ok ? 0 : 1;
  return outcome;
}

StudyRow state_difference(const Grid& grid, const FieldState& a, const FieldState& b) {
  StudyRow r;
  const std::size_t n = grid.size();
  Field du(n, 0.0), dd(n, 0.0), dt(n);
  for (std::size_t c = 0; c < a.u.size(); ++c) {
    for (std::size_t x = 0; x < n; ++x) du[x] += (a.u[c][x] - b.u[c][x]) * (a.u[c][x] - b.u[c][x]);
  }
  for (int c = 0; c < 3; ++c) {
    Field diff(n);
    for (std::size_t x = 0; x < n; ++x) diff[x] = a.d[c][x] - b.d[c][x];
    const VectorField g = grid.grad(diff);
    for (std::size_t x = 0; x < n; ++x) {
      dd[x] += diff[x] * diff[x];
      for (const auto& ga : g) dd[x] += ga[x] * ga[x];
    }
  }
  for (std::size_t x = 0; x < n; ++x) dt[x] = std::abs(a.theta[x] - b.theta[x]);
  r.u_l2 = std::sqrt(grid.integral(du));
  r.d_w12 = std::sqrt(grid.integral(dd));
  r.theta_l1 = grid.integral(dt);
  return r;
}

StudyReport convergence_study(const RunConfig& base, const std::vector<std::size_t>& n_list,
                              const std::vector<std::size_t>& m_list, const std::string& out_dir) {
  if (n_list.empty()) throw std::invalid_argument("study: empty N list");
  if (!std::is_sorted(n_list.begin(), n_list.end()) || !std::is_sorted(m_list.begin(), m_list.end())) {
    throw std::invalid_argument("study: lists must be sorted ascending");
  }
  const Grid grid(base.domain);
  const MaterialLaws laws = base.laws();
  const FieldState raw = make_initial(base.initial, grid, laws);

  struct Member {
    std::size_t n, m;
    std::optional<FieldState> end;
  };
  auto run_member = [&](std::size_t n, std::size_t m) {
    GalerkinConfig g = base.galerkin;
    g.levels = {n, m};
    Member mem{n, m, std::nullopt};
    try {
      const GalerkinSystem sys(grid, laws, g);
      RunResult r = sys.run(sys.prepare(raw));
      if (!r.abort) mem.end = std::move(r.final_state);
    } catch (const StepAborted&) {
    }
    return mem;
  };
  auto compare = [&](const std::string& phase, const Member& a, const Member& b) {
    StudyRow row;
    if (a.end && b.end) {
      row = state_difference(grid, *a.end, *b.end);
    } else {
      row.aborted = true;
      row.u_l2 = row.d_w12 = row.theta_l1 = std::numeric_limits<double>::quiet_NaN();
    }
    row.phase = phase;
    row.n_a = a.n, row.m_a = a.m, row.n_b = b.n, row.m_b = b.m;
    return row;
  };

  StudyReport rep;
  const std::size_t m_fixed = base.galerkin.levels.m;
  std::vector<Member> members;
  for (std::size_t n : n_list) members.push_back(run_member(n, std::min(m_fixed, n)));
  for (std::size_t i = 1; i < members.size(); ++i) rep.rows.push_back(compare("N", members[i - 1], members[i]));

  const std::size_t n_max = n_list.back();
  members.clear();
  for (std::size_t m : m_list) {
    if (m > n_max) throw RangeError("study: M = " + std::to_string(m) + " exceeds N = " + std::to_string(n_max));
    members.push_back(run_member(n_max, m));
  }
  for (std::size_t i = 1; i < members.size(); ++i) rep.rows.push_back(compare("M", members[i - 1], members[i]));

  std::ostringstream csv;
  csv << "phase,n_a,m_a,n_b,m_b,u_l2,d_w12,theta_l1,status\n";
  csv.precision(17);
  for (const auto& r : rep.rows) {
    csv << r.phase << ',' << r.n_a << ',' << r.m_a << ',' << r.n_b << ',' << r.m_b << ',';
    if (r.aborted) {
      csv << "nan,nan,nan,aborted\n";
    } else {
      csv << r.u_l2 << ',' << r.d_w12 << ',' << r.theta_l1 << ",ok\n";
    }
  }
  rep.csv = csv.str();
  if (!out_dir.empty()) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    std::ofstream out(fs::path(out_dir) / "study.csv");
    if (!out) throw IoError("cannot write study table in '" + out_dir + "'");
    out << rep.csv;
  }
  return rep;
}

HeatmapInfo emit_heatmap(const Grid& grid, const Field& f, const std::string& path, int slice) {
  grid.check_shape(f, "heatmap field");
  const auto& dom = grid.domain();
  HeatmapInfo info;
  info.width = dom.resolution[0];
  info.height = dom.resolution[1];
  if (slice < 0 || slice >= grid.extent()[2]) throw RangeError("heatmap slice out of range");
  std::vector<double> v(static_cast<std::size_t>(info.width) * info.height);
  for (int j = 0; j < info.height; ++j) {
    for (int i = 0; i < info.width; ++i) v[static_cast<std::size_t>(j) * info.width + i] = f[grid.index(i, j, slice)];
  }
  info.min = *std::min_element(v.begin(), v.end());
  info.max = *std::max_element(v.begin(), v.end());
  info.constant = !(info.max > info.min);
  std::string pixels(v.size(), '\0');
  for (std::size_t k = 0; k < v.size(); ++k) {
    const double t = info.constant ? 0.5 : (v[k] - info.min) / (info.max - info.min);
    pixels[k] = static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * t)));
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open heatmap '" + path + "' for writing");
  out << "P5\n" << info.width << ' ' << info.height << "\n255\n";
  out.write(pixels.data(), static_cast<std::streamsize>(pixels.size()));
  if (!out) throw IoError("failed writing heatmap '" + path + "'");
  std::ofstream side(path + ".txt");
  if (!side) throw IoError("cannot open heatmap sidecar '" + path + ".txt'");
  side.precision(17);
  side << "min = " << info.min << "\nmax = " << info.max << '\n';
  if (info.constant) side << "note = constant field, rendered mid-gray\n";
  return info;
}

AuditOutcome audit_snapshot(const std::string& snapshot_path, const RunConfig& cfg) {
  Snapshot snap = read_snapshot(snapshot_path);
  const Grid grid(cfg.domain);
  if (snap.extent != grid.extent()) {
    std::ostringstream os;
    os << "snapshot grid " << snap.extent[0] << "x" << snap.extent[1] << "x" << snap.extent[2]
       << " does not match the configured grid " << grid.extent()[0] << "x" << grid.extent()[1] << "x"
       << grid.extent()[2];
    throw DimensionError(os.str());
  }
  const MaterialLaws laws = cfg.laws();
  const EnergyLedger l = energy_ledger(grid, snap.state, laws);
  const CrossCheck cc = ledger_cross_check(grid, snap.state, laws, l);
  const NormReport n = apriori_norms(grid, snap.state, cfg.exponents);
  const GnReport gn = gn_monitor(grid, snap.state.d);

  const bool signs = l.production_visc && l.production_heat && l.production_dir >= -1e-12 &&
                     *l.production_visc >= -1e-12 && *l.production_heat >= -1e-12;
  json j;
  j["snapshot"] = snapshot_path;
  j["ledger"] = ledger_json(l);
  j["cross_check"] = {{"passed", cc.passed}, {"worst_relative_difference", cc.worst_relative_difference}};
  j["production_signs"] = signs;
  j["gn_ratio"] = gn.ratio;
  j["norms"] = norms_json(n);
  AuditOutcome out;
  out.json = j.dump(2);
  out.exit_code = cc.passed && signs ? 0 : 1;
  return out;
}

}  // namespace nematic
