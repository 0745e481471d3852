#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "helpers.hpp"
#include "nematic/errors.hpp"

using namespace nematic;
using namespace testing_util;

TEST_CASE("domain validation") {
  DomainSpec d = periodic2d(16);
  CHECK_NOTHROW(d.validate());
  d.resolution[0] = 15;
  CHECK_THROWS_AS(d.validate(), std::invalid_argument);
  d = periodic2d(16);
  d.lengths[1] = -1.0;
  CHECK_THROWS_AS(d.validate(), std::invalid_argument);
  d = channel2d(16);
  d.wall_axis = 2;
  CHECK_THROWS_AS(d.validate(), std::invalid_argument);
  CHECK(periodic3d(8, 2.0).volume() == doctest::Approx(8.0));
}

TEST_CASE("derivative of a single resolved mode") {
  const double L = 3.0;
  const Grid g(periodic2d(32, L));
  const double k = 2 * pi / L;
  const Field f = sample(g, [&](double x, double, double) { return std::sin(k * x); });
  const Field ref = sample(g, [&](double x, double, double) { return k * std::cos(k * x); });
  CHECK(max_abs_diff(g.derivative(f, 0), ref) < 1e-12);
  CHECK(max_abs(g.derivative(f, 1)) < 1e-12);
  const Field c(g.size(), 4.2);
  for (const auto& comp : g.grad(c)) CHECK(max_abs(comp) < 1e-13);
}

TEST_CASE("gradient against central differences at 128") {
  const double L = 2 * pi;
  const Grid g(periodic2d(128, L));
  const Field f = sample(g, [&](double x, double y, double) { return std::sin(2 * pi * x / L) * std::sin(2 * pi * y / L); });
  const VectorField gr = g.grad(f);
  const int n = 128;
  const double h = L / n;
  double worst = 0.0;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const double fx = (f[g.index((i + 1) % n, j, 0)] - f[g.index((i + n - 1) % n, j, 0)]) / (2 * h);
      const double fy = (f[g.index(i, (j + 1) % n, 0)] - f[g.index(i, (j + n - 1) % n, 0)]) / (2 * h);
      worst = std::max({worst, std::abs(fx - gr[0][g.index(i, j, 0)]), std::abs(fy - gr[1][g.index(i, j, 0)])});
    }
  }
  CHECK(worst <= 1e-3);
}

TEST_CASE("divergence") {
  std::mt19937_64 rng(5);
  const Grid g(periodic2d(24));
  const Field f = resolved_random(g, rng);
  const Field lap = g.laplacian(f);
  CHECK(max_abs_diff(g.div(g.grad(f)), lap) < 1e-12);
  VectorField cst(2, Field(g.size(), 1.5));
  CHECK(max_abs(g.div(cst)) < 1e-13);

  VectorField v{resolved_random(g, rng), resolved_random(g, rng)};
  const double lhs = g.inner(g.div(v), f) + g.inner(v, g.grad(f));
  const double scale = std::sqrt(g.inner(v, v) * g.inner(f, f));
  CHECK(std::abs(lhs) <= 1e-10 * scale);
}

TEST_CASE("adjointness in 3D") {
  std::mt19937_64 rng(9);
  const Grid g(periodic3d(12, 2.0));
  const Field f = resolved_random(g, rng, 2);
  VectorField v{resolved_random(g, rng, 2), resolved_random(g, rng, 2), resolved_random(g, rng, 2)};
  const double lhs = g.inner(g.div(v), f) + g.inner(v, g.grad(f));
  CHECK(std::abs(lhs) <= 1e-10 * std::sqrt(g.inner(v, v) * g.inner(f, f)));
}

TEST_CASE("tensor divergence matches componentwise") {
  std::mt19937_64 rng(2);
  const Grid g(periodic2d(16));
  GridTensor t(2, 2, g.size());
  for (auto& e : t.entries) e = resolved_random(g, rng, 2);
  const VectorField dv = g.div(t);
  for (int r = 0; r < 2; ++r) {
    const Field ref = g.div(VectorField{t.at(r, 0), t.at(r, 1)});
    CHECK(max_abs_diff(dv[r], ref) < 1e-12);
  }
}

TEST_CASE("transform round trip and integrals") {
  std::mt19937_64 rng(3);
  const Grid g(periodic2d(20, 2.5));
  const Field f = resolved_random(g, rng);
  CHECK(max_abs_diff(g.inverse(g.forward(f)), f) < 1e-13);
  const Field one(g.size(), 1.0);
  CHECK(g.integral(one) == doctest::Approx(2.5 * 2.5).epsilon(1e-14));
  const Field s2 = sample(g, [](double x, double, double) { return std::pow(std::sin(2 * pi * x / 2.5), 2); });
  CHECK(g.integral(s2) == doctest::Approx(0.5 * 2.5 * 2.5).epsilon(1e-13));
}

TEST_CASE("dealiasing") {
  const Grid g(periodic2d(12));
  CHECK(g.dealias_limit(0) == 3);
  const Field low = sample(g, [](double x, double y, double) { return std::cos(3 * x) + std::sin(2 * y); });
  CHECK(max_abs_diff(g.dealias(low), low) < 1e-13);
  const Field high = sample(g, [](double x, double, double) { return std::cos(4 * x); });
  CHECK(max_abs(g.dealias(high)) < 1e-13);
}

TEST_CASE("slip channel extends the wall axis by reflection") {
  const Grid g(channel2d(16, 2.0));
  CHECK(g.extent()[1] == 32);
  CHECK(g.period(1) == doctest::Approx(4.0));
  CHECK(g.weight() * g.size() == doctest::Approx(4.0));
  // even cosine in the wall coordinate: derivative vanishes at both walls
  const Field f = sample(g, [](double, double y, double) { return std::cos(pi * y / 2.0); });
  const Field fy = g.derivative(f, 1);
  CHECK(std::abs(fy[g.index(0, 0, 0)]) < 1e-12);
  CHECK(std::abs(fy[g.index(0, 16, 0)]) < 1e-12);
}

TEST_CASE("shape checks") {
  const Grid g(periodic2d(8));
  CHECK_THROWS_AS(g.forward(Field(5)), DimensionError);
  CHECK_THROWS_AS(g.grad(VectorField(2, Field(3))), DimensionError);
}
