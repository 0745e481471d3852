#include "nematic/material.hpp"

#include <algorithm>
#include <cmath>
// boost 1.74 pchip calls unqualified isnan
using std::isnan;
#include <boost/math/interpolators/pchip.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "nematic/errors.hpp"

namespace nematic {

namespace {

void require_nonnegative(double theta, const char* law) {
  if (!(theta >= 0.0)) {
    std::ostringstream msg;
    msg << law << ": temperature must be nonnegative, got theta = " << theta;
    throw DomainError(msg.str());
  }
}

}  // namespace

// ---------------------------------------------------------------- ScalarLaw

struct ScalarLaw::Impl {
  std::function<double(double)> fn;
  std::function<double(double)> slope;
};

ScalarLaw ScalarLaw::tabulated(std::vector<double> theta, std::vector<double> values) {
  if (theta.size() != values.size()) throw std::invalid_argument("tabulated law: column lengths differ");
  if (theta.size() < 4) throw std::invalid_argument("tabulated law: at least 4 rows are required");
  for (std::size_t i = 1; i < theta.size(); ++i) {
    if (!(theta[i] > theta[i - 1])) {
      throw std::invalid_argument("tabulated law: theta column must be strictly ascending (row " +
                                  std::to_string(i + 1) + ")");
    }
  }
  ScalarLaw law;
  law.knots_ = theta;
  law.label_ = "tabulated";
  const double lo = theta.front();
  const double hi = theta.back();
  auto spline = std::make_shared<boost::math::interpolators::pchip<std::vector<double>>>(std::move(theta),
                                                                                         std::move(values));
  auto impl = std::make_shared<Impl>();
  impl->fn = [spline, lo, hi](double t) { return (*spline)(std::clamp(t, lo, hi)); };
  impl->slope = [spline, lo, hi](double t) {
    if (t < lo || t > hi) return 0.0;
    return spline->prime(t);
  };
  law.impl_ = std::move(impl);
  return law;
}

ScalarLaw ScalarLaw::from_function(std::function<double(double)> f, std::string label) {
  ScalarLaw law;
  law.label_ = std::move(label);
  auto impl = std::make_shared<Impl>();
  impl->fn = f;
  impl->slope = [f](double t) {
    const double h = 1e-6 * std::max(1.0, std::abs(t));
    if (t >= h) return (f(t + h) - f(t - h)) / (2.0 * h);
    return (-3.0 * f(t) + 4.0 * f(t + h) - f(t + 2.0 * h)) / (2.0 * h);
  };
  law.impl_ = std::move(impl);
  return law;
}

ScalarLaw ScalarLaw::load_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open law table '" + path + "'");
  std::vector<double> theta, values;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream row(line);
    double t = 0.0, v = 0.0;
    if (!(row >> t)) continue;
    if (!(row >> v)) throw ConfigError("law table '" + path + "': expected two columns", lineno);
    std::string extra;
    if (row >> extra) throw ConfigError("law table '" + path + "': unexpected third column", lineno);
    theta.push_back(t);
    values.push_back(v);
  }
  auto law = tabulated(std::move(theta), std::move(values));
  law.label_ = "table:" + path;
  return law;
}

double ScalarLaw::operator()(double theta) const { return impl_->fn(theta); }

double ScalarLaw::derivative(double theta) const { return impl_->slope(theta); }

// ------------------------------------------------------------- MaterialLaws

MaterialLaws::MaterialLaws(MaterialParams params) : params_(params) {
  const auto& p = params_;
  auto finite = [](double v) { return std::isfinite(v); };
  if (!(finite(p.mu_lo) && finite(p.mu_hi) && finite(p.kappa_lo) && finite(p.kappa_hi) &&
        finite(p.lambda_hi) && finite(p.d0) && finite(p.theta_floor))) {
    throw std::invalid_argument("material parameters must be finite");
  }
  if (!(p.mu_lo > 0.0 && p.mu_lo <= p.mu_hi)) throw std::invalid_argument("require 0 < mu_lo <= mu_hi");
  if (!(p.kappa_lo > 0.0 && p.kappa_hi >= p.kappa_lo)) {
    throw std::invalid_argument("require 0 < kappa_lo <= kappa_hi");
  }
  if (!(p.lambda_hi >= 0.0)) throw std::invalid_argument("require lambda_hi >= 0");
  if (!(p.d0 > 0.0)) throw std::invalid_argument("require d0 > 0");
  if (!(p.theta_floor > 0.0)) throw std::invalid_argument("require theta_floor > 0");
}

MaterialLaws MaterialLaws::with_viscosity(ScalarLaw law) const {
  MaterialLaws out = *this;
  out.viscosity_ = std::move(law);
  return out;
}

MaterialLaws MaterialLaws::with_dilatation(ScalarLaw law) const {
  MaterialLaws out = *this;
  out.dilatation_ = std::move(law);
  return out;
}

MaterialLaws MaterialLaws::with_conductivity(ScalarLaw law) const {
  MaterialLaws out = *this;
  out.conductivity_ = std::move(law);
  return out;
}

MaterialLaws MaterialLaws::with_anisotropy(ScalarLaw law) const {
  MaterialLaws out = *this;
  out.anisotropy_ = std::move(law);
  return out;
}

MaterialLaws MaterialLaws::with_penalty(PenaltyLaw law, std::string label) const {
  MaterialLaws out = *this;
  out.penalty_ = std::move(law);
  out.penalty_label_ = std::move(label);
  return out;
}

double MaterialLaws::viscosity(double theta) const {
  require_nonnegative(theta, "viscosity");
  if (viscosity_) return (*viscosity_)(theta);
  return params_.mu_lo + (params_.mu_hi - params_.mu_lo) * theta / (1.0 + theta);
}

double MaterialLaws::dilatation(double theta) const {
  require_nonnegative(theta, "dilatation");
  if (dilatation_) return (*dilatation_)(theta);
  return params_.lambda_hi * theta / (1.0 + theta);
}

double MaterialLaws::dilatation_slope(double theta) const {
  require_nonnegative(theta, "dilatation slope");
  if (dilatation_) return dilatation_->derivative(theta);
  const double s = 1.0 + theta;
  return params_.lambda_hi / (s * s);
}

double MaterialLaws::dilatation_primitive(double theta) const {
  if (!(theta >= params_.theta_floor)) {
    std::ostringstream msg;
    msg << "dilatation primitive: theta = " << theta << " is below theta_floor = " << params_.theta_floor;
    throw RangeError(msg.str());
  }
  if (!dilatation_) return (std::log(theta) + theta) / params_.lambda_hi;
  auto inv = [this](double t) { return 1.0 / (*dilatation_)(t); };
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(inv, 1.0, theta, 15, 1e-13);
}

Conductivity MaterialLaws::conductivity(double theta) const {
  require_nonnegative(theta, "conductivity");
  Conductivity c;
  c.kappa = conductivity_ ? (*conductivity_)(theta) : params_.kappa_value;
  c.kappa_aniso = anisotropy_ ? (*anisotropy_)(theta) : params_.kappa_aniso_value;
  return c;
}

PenaltyValue MaterialLaws::penalty(const Vec3& d) const {
  if (!(std::isfinite(d[0]) && std::isfinite(d[1]) && std::isfinite(d[2]))) {
    throw DomainError("penalty: non-finite director component");
  }
  if (penalty_) return penalty_(d);
  const double s = d[0] * d[0] + d[1] * d[1] + d[2] * d[2] - 1.0;
  return {s * s, {4.0 * s * d[0], 4.0 * s * d[1], 4.0 * s * d[2]}};
}

std::string MaterialLaws::describe() const {
  std::ostringstream out;
  out << "viscosity=" << (viscosity_ ? viscosity_->label() : "default")
      << " dilatation=" << (dilatation_ ? dilatation_->label() : "default")
      << " conductivity=" << (conductivity_ ? conductivity_->label() : "constant")
      << " anisotropy=" << (anisotropy_ ? anisotropy_->label() : "constant") << " penalty=" << penalty_label_;
  return out.str();
}

// --------------------------------------------------------------- validation

bool HypothesisReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const HypothesisCheck& c) { return c.passed; });
}

std::string HypothesisReport::summary() const {
  std::ostringstream out;
  for (const auto& c : checks) {
    out << (c.passed ? "PASS " : "FAIL ") << c.name;
    if (!c.passed) out << "  (" << c.counterexample << ")";
    out << '\n';
  }
  return out.str();
}

namespace {

std::string fmt_vec(const Vec3& d) {
  std::ostringstream out;
  out << '(' << d[0] << ", " << d[1] << ", " << d[2] << ')';
  return out.str();
}

}  // namespace

HypothesisReport validate_hypotheses(const MaterialLaws& laws, const std::vector<double>& theta_grid,
                                     const std::vector<Vec3>& d_samples) {
  if (theta_grid.empty()) throw std::invalid_argument("validate_hypotheses: empty temperature grid");
  if (d_samples.empty()) throw std::invalid_argument("validate_hypotheses: empty director sample set");
  for (double t : theta_grid) {
    if (!(t >= 0.0)) throw std::invalid_argument("validate_hypotheses: temperature samples must be >= 0");
  }
  std::vector<double> grid = theta_grid;
  std::sort(grid.begin(), grid.end());
  const auto& p = laws.params();
  HypothesisReport report;

  auto fail = [](HypothesisCheck& c, std::string where, double value) {
    if (c.passed) {
      c.passed = false;
      c.counterexample = std::move(where);
      c.worst_value = value;
    }
  };

  {
    HypothesisCheck c{"penalty: W >= 0", true, {}, 0.0};
    double worst = std::numeric_limits<double>::infinity();
    Vec3 at{};
    for (const auto& d : d_samples) {
      const double w = laws.penalty(d).w;
      if (w < worst) worst = w, at = d;
    }
    if (worst < 0.0) fail(c, "W" + fmt_vec(at) + " = " + std::to_string(worst), worst);
    c.worst_value = worst;
    report.checks.push_back(c);
  }
  {
    HypothesisCheck c{"penalty: dW(d).d >= 0 for |d| >= D0", true, {}, 0.0};
    double worst = std::numeric_limits<double>::infinity();
    Vec3 at{};
    for (const auto& d : d_samples) {
      const double r = std::sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]);
      if (r < p.d0) continue;
      const auto pv = laws.penalty(d);
      const double s = pv.dw[0] * d[0] + pv.dw[1] * d[1] + pv.dw[2] * d[2];
      if (s < worst) worst = s, at = d;
    }
    if (worst < 0.0) fail(c, "dW.d at " + fmt_vec(at) + " = " + std::to_string(worst), worst);
    c.worst_value = std::isfinite(worst) ? worst : 0.0;
    report.checks.push_back(c);
  }
  {
    HypothesisCheck c{"viscosity: mu_lo <= mu(theta) <= mu_hi", true, {}, 0.0};
    double worst = 0.0;
    double at = 0.0, mu_at = 0.0;
    for (double t : grid) {
      const double mu = laws.viscosity(t);
      const double excess = std::max(p.mu_lo - mu, mu - p.mu_hi);
      if (excess > worst) worst = excess, at = t, mu_at = mu;
    }
    if (worst > 0.0) {
      fail(c,
           "theta = " + std::to_string(at) + ": mu = " + std::to_string(mu_at) + " outside [" +
               std::to_string(p.mu_lo) + ", " + std::to_string(p.mu_hi) + "]",
           mu_at);
    }
    report.checks.push_back(c);
  }
  {
    HypothesisCheck c{"conductivity: kappa(theta) >= kappa_lo > 0", true, {}, 0.0};
    double worst = std::numeric_limits<double>::infinity();
    double at = 0.0;
    for (double t : grid) {
      const double k = laws.conductivity(t).kappa - p.kappa_lo;
      if (k < worst) worst = k, at = t;
    }
    if (worst < 0.0) {
      fail(c, "theta = " + std::to_string(at) + ": kappa = " + std::to_string(worst + p.kappa_lo), worst);
    }
    report.checks.push_back(c);
  }
  {
    HypothesisCheck c{"anisotropy: 0 <= kappa_par - kappa_perp <= kappa_hi", true, {}, 0.0};
    for (double t : grid) {
      const double ka = laws.conductivity(t).kappa_aniso;
      if (ka < 0.0 || ka > p.kappa_hi) {
        fail(c, "theta = " + std::to_string(t) + ": kappa_aniso = " + std::to_string(ka), ka);
        break;
      }
    }
    report.checks.push_back(c);
  }
  {
    HypothesisCheck c{"dilatation: lambda(0) = 0", true, {}, 0.0};
    const double l0 = laws.dilatation(0.0);
    c.worst_value = l0;
    if (std::abs(l0) > 1e-14) fail(c, "lambda(0) = " + std::to_string(l0), l0);
    report.checks.push_back(c);
  }
  {
    HypothesisCheck c{"dilatation: lambda'(0) > 0", true, {}, 0.0};
    const double s0 = laws.dilatation_slope(0.0);
    c.worst_value = s0;
    if (!(s0 > 0.0) || !(p.lambda_hi > 0.0)) {
      fail(c, "lambda'(0) = " + std::to_string(s0) + ", lambda_hi = " + std::to_string(p.lambda_hi), s0);
    }
    report.checks.push_back(c);
  }
  {
    HypothesisCheck c{"dilatation: lambda nondecreasing", true, {}, 0.0};
    for (std::size_t i = 1; i < grid.size(); ++i) {
      const double a = laws.dilatation(grid[i - 1]);
      const double b = laws.dilatation(grid[i]);
      if (b < a) {
        fail(c,
             "theta = " + std::to_string(grid[i]) + ": lambda = " + std::to_string(b) + " < lambda(" +
                 std::to_string(grid[i - 1]) + ") = " + std::to_string(a),
             b - a);
        break;
      }
    }
    report.checks.push_back(c);
  }
  {
    HypothesisCheck c{"dilatation: lambda(theta) <= lambda_hi", true, {}, 0.0};
    for (double t : grid) {
      const double l = laws.dilatation(t);
      if (l > p.lambda_hi) {
        fail(c, "theta = " + std::to_string(t) + ": lambda = " + std::to_string(l), l);
        break;
      }
    }
    report.checks.push_back(c);
  }
  return report;
}

std::vector<double> default_theta_grid() {
  std::vector<double> grid;
  for (int i = 0; i <= 100; ++i) grid.push_back(0.1 * i);
  return grid;
}

std::vector<Vec3> default_director_samples(std::size_t count, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::vector<Vec3> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Vec3 v{normal(rng), normal(rng), normal(rng)};
    const double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    const double r = 3.0 * std::cbrt(uniform(rng));
    for (auto& x : v) x *= r / n;
    out.push_back(v);
  }
  return out;
}

}  // namespace nematic
