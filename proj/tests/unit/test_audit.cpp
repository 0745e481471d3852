#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "helpers.hpp"
#include "nematic/audit.hpp"
#include "nematic/errors.hpp"
#include "nematic/stepper.hpp"

using namespace nematic;
using namespace testing_util;

namespace {

// u = (sin y, 0), d = (cos x, sin x, 0), theta = 2 on the 2 pi box
FieldState circle_state(const Grid& g) {
  FieldState s = FieldState::zeros(g);
  s.u[0] = sample(g, [](double, double y, double) { return std::sin(y); });
  s.d[0] = sample(g, [](double x, double, double) { return std::cos(x); });
  s.d[1] = sample(g, [](double x, double, double) { return std::sin(x); });
  s.theta.assign(g.size(), 2.0);
  return s;
}

FieldState random_state(const Grid& g, std::mt19937_64& rng) {
  FieldState s = FieldState::zeros(g);
  for (auto& c : s.u) c = resolved_random(g, rng, 2);
  for (int c = 0; c < 3; ++c) s.d[c] = resolved_random(g, rng, 2);
  for (auto& v : s.d[0]) v += 0.7;
  s.theta = resolved_random(g, rng, 2);
  for (auto& t : s.theta) t += 2.0;
  return s;
}

EnergyLedger row(double t, double kin, double th, double ent, double prod) {
  EnergyLedger r;
  r.time = t;
  r.kinetic = kin;
  r.thermal = th;
  r.entropy = ent;
  r.production_dir = prod;
  r.production_visc = 0.0;
  r.production_heat = 0.0;
  r.min_theta = th;
  r.max_theta = th;
  return r;
}

GalerkinConfig config(std::size_t n, double dt, double t_end) {
  GalerkinConfig c;
  c.levels = {n, n};
  c.dt = dt;
  c.t_end = t_end;
  return c;
}

}  // namespace

TEST_CASE("ledger of a closed-form state") {
  const Grid g(periodic2d(32));
  const MaterialLaws laws;
  const EnergyLedger L = energy_ledger(g, circle_state(g), laws);
  const double pi2 = pi * pi;
  const double lam_hi = laws.params().lambda_hi;
  const double mu2 = laws.params().mu_lo + (laws.params().mu_hi - laws.params().mu_lo) * 2.0 / 3.0;
  const double lam2 = lam_hi * 2.0 / 3.0;
  CHECK(L.kinetic == doctest::Approx(pi2).epsilon(1e-13));
  CHECK(L.thermal == doctest::Approx(8 * pi2).epsilon(1e-13));
  CHECK(L.elastic == doctest::Approx(2 * pi2).epsilon(1e-13));
  CHECK(std::abs(L.penalty) < 1e-12);
  REQUIRE(L.entropy.has_value());
  CHECK(*L.entropy == doctest::Approx(4 * pi2 * (std::log(2.0) + 2.0) / lam_hi - 2 * pi2).epsilon(1e-12));
  CHECK(L.production_dir == doctest::Approx(4 * pi2).epsilon(1e-12));
  CHECK(*L.production_visc == doctest::Approx(mu2 * 2 * pi2 / lam2).epsilon(1e-12));
  CHECK(std::abs(*L.production_heat) < 1e-12);
  CHECK(L.min_theta == 2.0);
  CHECK(L.max_d_sq == doctest::Approx(1.0));
  CHECK(L.total_energy() == doctest::Approx(9 * pi2));

  const CrossCheck cc = ledger_cross_check(g, circle_state(g), laws, L);
  CHECK(cc.passed);
  CHECK(cc.worst_relative_difference < 1e-6);
}

TEST_CASE("heat production is nonnegative") {
  std::mt19937_64 rng(43);
  const Grid g(periodic2d(24));
  for (int trial = 0; trial < 5; ++trial) {
    const EnergyLedger L = energy_ledger(g, random_state(g, rng), MaterialLaws());
    REQUIRE(L.production_heat.has_value());
    CHECK(*L.production_heat >= 0.0);
    CHECK(*L.production_visc >= 0.0);
  }
}

TEST_CASE("entries are flagged below the temperature floor") {
  const Grid g(periodic2d(8));
  FieldState s = circle_state(g);
  s.theta[3] = 0.0;
  const EnergyLedger L = energy_ledger(g, s, MaterialLaws());
  CHECK_FALSE(L.entropy.has_value());
  CHECK_FALSE(L.production_visc.has_value());
  CHECK(L.kinetic > 0.0);
  const std::string line = ledger_csv_row(L);
  CHECK(line.find("nan") != std::string::npos);
  CHECK(std::count(line.begin(), line.end(), ',') == 11);
  CHECK(ledger_csv_header().rfind("time,kinetic,thermal", 0) == 0);

  const auto path = (std::filesystem::temp_directory_path() / "nematic_ledger.csv").string();
  write_ledger_csv(path, {L, L});
  std::ifstream in(path);
  int lines = 0;
  for (std::string l; std::getline(in, l);) ++lines;
  CHECK(lines == 3);
}

TEST_CASE("trajectory checks on synthetic rows") {
  const MaterialLaws laws;
  std::vector<EnergyLedger> rows{row(0.0, 1.0, 2.0, 5.0, 1.0), row(0.5, 1.0, 2.0, 5.0, 3.0),
                                 row(1.0, 1.0, 2.0, 5.0, 1.0)};
  CHECK(*cumulative_production(rows) == doctest::Approx(0.5 * 0.5 * 4 + 0.5 * 0.5 * 4));

  const EnergyReport er = energy_conservation_check(rows);
  CHECK(er.passed);
  CHECK(er.max_relative_drift == 0.0);
  rows[2].thermal = 2.1;
  CHECK_FALSE(energy_conservation_check(rows).passed);
  rows[2].thermal = 2.0;

  const EntropyReport en = entropy_check(rows);
  CHECK(en.passed);
  CHECK(en.slack == doctest::Approx(2.0));
  CHECK(en.balance_defect == doctest::Approx(-2.0));
  rows[1].production_heat = -1.0;
  CHECK_FALSE(entropy_check(rows).productions_nonnegative);
  rows[1].production_heat = 0.0;
  rows[1].entropy.reset();
  CHECK_FALSE(entropy_check(rows).passed);
  rows[1].entropy = 5.0;

  // K E - S is constant here, so the balance carries only the production
  const double k = default_dissipation_constant(rows, laws);
  CHECK(k >= 2.0);
  DissipationReport dr = total_dissipation_check(rows, k, laws);
  CHECK(dr.k_admissible);
  CHECK(dr.excess == doctest::Approx(2.0));
  CHECK_FALSE(dr.passed);
  for (auto& r : rows) r.production_dir = 0.0;
  dr = total_dissipation_check(rows, k, laws);
  CHECK(dr.passed);
  dr = total_dissipation_check(rows, 0.05, laws);
  CHECK_FALSE(dr.k_admissible);
  CHECK_FALSE(dr.passed);
  CHECK_THROWS_AS(total_dissipation_check(rows, -1.0, laws), RangeError);
}

TEST_CASE("Gagliardo-Nirenberg monitor in closed form") {
  const Grid g(periodic2d(32));
  const FieldState s = circle_state(g);
  const GnReport r = gn_monitor(g, s.d);
  CHECK(r.grad_l4 == doctest::Approx(std::pow(4 * pi * pi, 0.25)).epsilon(1e-12));
  CHECK(r.lap_l2 == doctest::Approx(2 * pi).epsilon(1e-12));
  CHECK(r.linf == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.ratio == doctest::Approx(std::pow(4 * pi * pi, 0.25) / (std::sqrt(2 * pi) + 1.0)).epsilon(1e-12));
  CHECK(gn_monitor(g, VectorField(3, Field(g.size(), 0.0))).ratio == 0.0);
}

TEST_CASE("a priori norms in closed form") {
  const Grid g(periodic2d(32));
  FieldState s = circle_state(g);
  NormExponents ex;
  ex.q = {1.0, 1.5};
  const NormReport r = apriori_norms(g, s, ex);
  const double area = 4 * pi * pi;
  CHECK(r.u_l2 == doctest::Approx(std::sqrt(2.0) * pi).epsilon(1e-12));
  CHECK(r.grad_u_l2 == doctest::Approx(std::sqrt(2.0) * pi).epsilon(1e-12));
  CHECK(r.grad_d_l2 == doctest::Approx(2 * pi).epsilon(1e-12));
  CHECK(r.grad_d_l4 == doctest::Approx(std::pow(area, 0.25)).epsilon(1e-12));
  CHECK(r.lap_d_l2 == doctest::Approx(2 * pi).epsilon(1e-12));
  CHECK(r.d_linf == doctest::Approx(1.0));
  CHECK(r.theta_l1 == doctest::Approx(2 * area));
  CHECK(r.log_theta_l1 == doctest::Approx(std::log(2.0) * area));
  REQUIRE(r.theta_lq.size() == 2);
  CHECK(r.theta_lq[0].second == doctest::Approx(2 * area));
  CHECK(r.theta_lq[1].second == doctest::Approx(2 * std::pow(area, 1 / 1.5)));
  CHECK(r.grad_theta_lp.at(0).second < 1e-10);
  CHECK(r.grad_power_theta_l2.at(0).second < 1e-10);

  for (auto& c : s.u) {
    for (auto& v : c) v *= 3.0;
  }
  CHECK(apriori_norms(g, s, ex).u_l2 == doctest::Approx(3 * r.u_l2));

  ex.nu = {0.5};
  CHECK_THROWS_AS(apriori_norms(g, s, ex), RangeError);
  ex = {};
  ex.p = {1.25};
  CHECK_THROWS_AS(ex.validate(), RangeError);
}

TEST_CASE("renormalised heat residual is first order in dt") {
  std::mt19937_64 rng(47);
  const Grid g(periodic2d(32));
  const MaterialLaws laws;
  const GalerkinSystem sys(g, laws, config(12, 0.01, 1.0));
  const FieldState s = sys.prepare(random_state(g, rng));
  for (double nu : {0.1, 0.49}) {
    const double dt = 0.01;
    const FieldState a = sys.advance(s, dt).first;
    const FieldState b = sys.advance(s, dt / 2).first;
    const RenormReport ra = renorm_residual(g, s, a, nu, laws, dt);
    const RenormReport rb = renorm_residual(g, s, b, nu, laws, dt / 2);
    CHECK(ra.curvature_term <= 0.0);
    const double factor = ra.residual_l1 / rb.residual_l1;
    CHECK(factor >= 1.7);
    CHECK(factor <= 2.3);
  }
  CHECK_THROWS_AS(renorm_residual(g, s, s, 0.5, laws, 0.01), RangeError);
  CHECK_THROWS_AS(renorm_residual(g, s, s, 0.0, laws, 0.01), RangeError);
}

TEST_CASE("director maximum principle") {
  const Grid g(periodic2d(16));
  const MaterialLaws laws;
  const GalerkinSystem sys(g, laws, config(4, 0.01, 0.2));
  FieldState s = FieldState::zeros(g);
  s.d[0].assign(g.size(), 2.0);
  s.theta.assign(g.size(), 1.0);
  const RunResult res = sys.run(s);
  REQUIRE_FALSE(res.abort.has_value());
  const MaxPrincipleReport rep = max_principle_check(res.ledgers, laws);
  CHECK(rep.passed);
  CHECK(rep.bound == doctest::Approx(4.0));
  CHECK(rep.worst_time == 0.0);
  CHECK(res.ledgers.back().max_d_sq < 4.0);

  std::vector<FieldState> snaps{s, s};
  snaps[1].d[0][5] = 2.5;
  const MaxPrincipleReport bad = max_principle_check(g, snaps, laws);
  CHECK_FALSE(bad.passed);
  CHECK(bad.worst == doctest::Approx(6.25));
}

TEST_CASE("dissipation balance defect shrinks with dt and flags forcing") {
  std::mt19937_64 rng(53);
  const Grid g(periodic2d(16));
  const MaterialLaws laws;
  const FieldState s0 = random_state(g, rng);
  auto excess = [&](double dt, double forcing) {
    GalerkinConfig c = config(12, dt, 0.1);
    c.forcing = forcing;
    const GalerkinSystem sys(g, laws, c);
    const RunResult res = sys.run(s0);
    REQUIRE_FALSE(res.abort.has_value());
    const double k = default_dissipation_constant(res.ledgers, laws);
    return total_dissipation_check(res.ledgers, k, laws);
  };
  const DissipationReport coarse = excess(0.01, 0.0), fine = excess(0.005, 0.0);
  CHECK(coarse.k_admissible);
  const double ratio = coarse.excess / fine.excess;
  CHECK(ratio >= 1.5);
  CHECK(ratio <= 2.5);
  const DissipationReport forced = excess(0.005, 20.0);
  CHECK_FALSE(forced.passed);
  CHECK(forced.excess > 10 * std::abs(fine.excess));
}
