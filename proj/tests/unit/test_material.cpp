#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>

#include "nematic/errors.hpp"
#include "nematic/material.hpp"

using namespace nematic;

namespace {

// Adaptive Simpson, kept separate from the library's quadrature.
double simpson(const std::function<double(double)>& f, double a, double b, double eps, int depth = 40) {
  auto s = [&](double l, double r) {
    const double m = 0.5 * (l + r);
    return (r - l) / 6.0 * (f(l) + 4.0 * f(m) + f(r));
  };
  std::function<double(double, double, double, double, int)> rec = [&](double l, double r, double whole, double e,
                                                                         int d) {
    const double m = 0.5 * (l + r);
    const double left = s(l, m), right = s(m, r);
    if (d <= 0 || std::abs(left + right - whole) <= 15.0 * e) return left + right + (left + right - whole) / 15.0;
    return rec(l, m, left, e / 2, d - 1) + rec(m, r, right, e / 2, d - 1);
  };
  return rec(a, b, s(a, b), eps, depth);
}

}  // namespace

TEST_CASE("viscosity default law") {
  const MaterialLaws laws;
  CHECK(laws.viscosity(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(laws.viscosity(1.0) == doctest::Approx(0.75).epsilon(1e-15));
  double prev = 0.0;
  for (double t = 1.0; t <= 1e12; t *= 10.0) {
    const double mu = laws.viscosity(t);
    CHECK(mu <= 1.0);
    CHECK(mu >= prev);
    prev = mu;
  }
  CHECK(prev == doctest::Approx(1.0).epsilon(1e-10));
  CHECK_THROWS_AS(laws.viscosity(-1.0), DomainError);
}

TEST_CASE("viscosity stays within bounds on a wide sweep") {
  const MaterialLaws laws;
  for (double t = 0.0; t <= 1e6; t = t * 1.7 + 0.01) {
    const double mu = laws.viscosity(t);
    REQUIRE(mu >= 0.5);
    REQUIRE(mu <= 1.0);
  }
}

TEST_CASE("dilatation default law") {
  const MaterialLaws laws;
  CHECK(laws.dilatation(0.0) == 0.0);
  CHECK(laws.dilatation(1.0) == doctest::Approx(0.5).epsilon(1e-15));
  for (double t : {0.1, 1.0, 10.0}) {
    const double h = 1e-6;
    const double fd = (laws.dilatation(t + h) - laws.dilatation(t - h)) / (2 * h);
    CHECK(fd > 0.0);
    CHECK(laws.dilatation_slope(t) == doctest::Approx(fd).epsilon(1e-7));
  }
  CHECK_THROWS_AS(laws.dilatation(-0.5), DomainError);
}

TEST_CASE("dilatation primitive") {
  const MaterialLaws laws;
  CHECK(laws.dilatation_primitive(1.0) == doctest::Approx(1.0).epsilon(1e-15));
  // derivative back to 1 / lambda
  const double h = 1e-5;
  const double fd = (laws.dilatation_primitive(2.0 + h) - laws.dilatation_primitive(2.0 - h)) / (2 * h);
  CHECK(fd == doctest::Approx(1.0 / laws.dilatation(2.0)).epsilon(1e-8));
  const double ref = simpson([&](double t) { return 1.0 / laws.dilatation(t); }, 0.5, 3.0, 1e-13);
  CHECK(std::abs(laws.dilatation_primitive(3.0) - laws.dilatation_primitive(0.5) - ref) < 1e-10);
  CHECK_THROWS_AS(laws.dilatation_primitive(0.0), RangeError);
  for (double t = 2e-8; t < 50.0; t *= 3.0) {
    const double hh = 1e-4 * t;
    const double d = (laws.dilatation_primitive(t + hh) - laws.dilatation_primitive(t - hh)) / (2 * hh);
    CHECK(d == doctest::Approx(1.0 / laws.dilatation(t)).epsilon(1e-7));
  }
}

TEST_CASE("dilatation primitive of a replaced law") {
  const auto lam = ScalarLaw::from_function([](double t) { return 2.0 * t / (3.0 + t); });
  const MaterialLaws laws = MaterialLaws().with_dilatation(lam);
  const double ref = simpson([](double t) { return (3.0 + t) / (2.0 * t); }, 1.0, 4.0, 1e-13);
  CHECK(laws.dilatation_primitive(4.0) == doctest::Approx(ref).epsilon(1e-10));
  CHECK(laws.dilatation_primitive(1.0) == doctest::Approx(0.0));
}

TEST_CASE("conductivity defaults") {
  const MaterialLaws laws;
  for (double t : {0.0, 7.0}) {
    const auto c = laws.conductivity(t);
    CHECK(c.kappa == 1.0);
    CHECK(c.kappa_aniso == 0.5);
  }
  std::vector<double> grid;
  for (int i = 0; i <= 1000; ++i) grid.push_back(0.1 * i);
  const auto rep = validate_hypotheses(laws, grid, default_director_samples());
  for (const auto& c : rep.checks) {
    if (c.name.rfind("conductivity", 0) == 0) CHECK(c.passed);
  }
}

TEST_CASE("penalty default law") {
  const MaterialLaws laws;
  auto p = laws.penalty({1, 0, 0});
  CHECK(p.w == 0.0);
  CHECK(p.dw == Vec3{0, 0, 0});
  p = laws.penalty({0, 0, 0});
  CHECK(p.w == 1.0);
  CHECK(p.dw == Vec3{0, 0, 0});
  p = laws.penalty({2, 0, 0});
  CHECK(p.dw[0] * 2.0 == doctest::Approx(48.0));
}

TEST_CASE("penalty gradient matches finite differences") {
  const MaterialLaws laws;
  for (const auto& d : default_director_samples(50, 3)) {
    const auto p = laws.penalty(d);
    CHECK(p.w >= 0.0);
    for (int c = 0; c < 3; ++c) {
      Vec3 a = d, b = d;
      const double h = 1e-6;
      a[c] += h;
      b[c] -= h;
      const double fd = (laws.penalty(a).w - laws.penalty(b).w) / (2 * h);
      CHECK(std::abs(fd - p.dw[c]) <= 1e-7 * std::max(1.0, std::abs(p.dw[c])));
    }
  }
}

TEST_CASE("hypothesis validator") {
  const MaterialLaws laws;
  SUBCASE("defaults pass") {
    const auto rep = validate_hypotheses(laws, default_theta_grid(), default_director_samples(100));
    CHECK(rep.all_passed());
  }
  SUBCASE("decreasing lambda is located") {
    const auto bad = laws.with_dilatation(ScalarLaw::from_function([](double t) { return 1.0 * (1.0 - t); }));
    const auto rep = validate_hypotheses(bad, default_theta_grid(), default_director_samples());
    bool found = false;
    for (const auto& c : rep.checks) {
      if (c.name == "dilatation: lambda nondecreasing") {
        found = true;
        CHECK_FALSE(c.passed);
        CHECK(c.counterexample.find("theta") != std::string::npos);
      }
    }
    CHECK(found);
    CHECK_FALSE(rep.all_passed());
  }
  SUBCASE("negative W is located") {
    const auto bad = laws.with_penalty([](const Vec3& d) {
      return PenaltyValue{-(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]), {-2 * d[0], -2 * d[1], -2 * d[2]}};
    });
    const auto rep = validate_hypotheses(bad, default_theta_grid(), default_director_samples());
    CHECK_FALSE(rep.checks.at(0).passed);
    CHECK(rep.checks.at(0).counterexample.find("W(") != std::string::npos);
  }
  SUBCASE("viscosity below the lower bound is located") {
    const auto bad = laws.with_viscosity(ScalarLaw::from_function([](double t) { return 0.4 + 0.01 * t; }));
    const auto rep = validate_hypotheses(bad, default_theta_grid(), default_director_samples());
    bool located = false;
    for (const auto& c : rep.checks) {
      if (c.name.rfind("viscosity", 0) == 0) {
        CHECK_FALSE(c.passed);
        located = c.counterexample.find("theta = 0.0") != std::string::npos;
      }
    }
    CHECK(located);
  }
  SUBCASE("zero lambda_hi fails the slope at zero") {
    MaterialParams p;
    p.lambda_hi = 0.0;
    const auto rep = validate_hypotheses(MaterialLaws(p), default_theta_grid(), default_director_samples());
    CHECK_FALSE(rep.all_passed());
  }
  SUBCASE("empty samples are rejected") {
    CHECK_THROWS_AS(validate_hypotheses(laws, {}, default_director_samples()), std::invalid_argument);
  }
}

TEST_CASE("parameter constraints") {
  MaterialParams p;
  p.mu_lo = 2.0;
  CHECK_THROWS_AS(MaterialLaws{p}, std::invalid_argument);
  p = {};
  p.kappa_lo = 0.0;
  CHECK_THROWS_AS(MaterialLaws{p}, std::invalid_argument);
  p = {};
  p.d0 = -1.0;
  CHECK_THROWS_AS(MaterialLaws{p}, std::invalid_argument);
}

TEST_CASE("tabulated laws") {
  const auto path = std::filesystem::temp_directory_path() / "nematic_mu_table.txt";
  {
    std::ofstream out(path);
    out << "# theta mu\n0 0.5\n1 0.6\n2 0.7\n4 0.8\n8 0.9\n";
  }
  const auto law = ScalarLaw::load_table(path.string());
  CHECK(law(1.0) == doctest::Approx(0.6));
  CHECK(law(100.0) == doctest::Approx(0.9));  // clamped
  CHECK(law(1.5) > 0.6);
  CHECK(law(1.5) < 0.7);
  const MaterialLaws laws = MaterialLaws().with_viscosity(law);
  CHECK(validate_hypotheses(laws, default_theta_grid(), default_director_samples()).all_passed());
  CHECK_THROWS(ScalarLaw::tabulated({0, 1}, {1, 2}));
  CHECK_THROWS(ScalarLaw::tabulated({0, 2, 1, 3}, {1, 2, 3, 4}));
  CHECK_THROWS_AS(ScalarLaw::load_table("/nonexistent/table"), IoError);
}
