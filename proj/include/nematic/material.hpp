#pragma once

#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace nematic {

using Vec3 = std::array<double, 3>;

/// Scalar constitutive law theta -> value with its derivative.
///
/// Either a tabulated law (monotone cubic Hermite through the samples,
/// constant extrapolation outside the table) or an arbitrary callable. The
/// callable form exists for injecting laws in tests and validators; its
/// derivative is taken by central differences.
class ScalarLaw {
 public:
  static ScalarLaw tabulated(std::vector<double> theta, std::vector<double> values);
  static ScalarLaw from_function(std::function<double(double)> f, std::string label = "function");
  /// Two-column plain text: whitespace separated, ascending theta, '#' comments.
  static ScalarLaw load_table(const std::string& path);

  double operator()(double theta) const;
  double derivative(double theta) const;
  const std::string& label() const noexcept { return label_; }
  bool is_tabulated() const noexcept { return !knots_.empty(); }
  const std::vector<double>& knots() const noexcept { return knots_; }

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
  std::vector<double> knots_;
  std::string label_;
};

struct PenaltyValue {
  double w = 0.0;
  Vec3 dw{0.0, 0.0, 0.0};
};

using PenaltyLaw = std::function<PenaltyValue(const Vec3&)>;

struct Conductivity {
  double kappa = 0.0;
  double kappa_aniso = 0.0;  // kappa_parallel - kappa_perp
};

/// Hypothesis constants and the constant values of the default conductivity law.
struct MaterialParams {
  double mu_lo = 0.5;
  double mu_hi = 1.0;
  double kappa_lo = 0.5;
  double kappa_hi = 1.0;
  double lambda_hi = 1.0;
  double d0 = 1.0;
  double theta_floor = 1e-8;
  double kappa_value = 1.0;
  double kappa_aniso_value = 0.5;

  bool operator==(const MaterialParams&) const = default;
};

/// Immutable bundle of the constitutive functions mu, lambda, Lambda, kappa,
/// kappa_aniso and the penalty W.
///
/// Defaults: mu = mu_lo + (mu_hi - mu_lo) theta / (1 + theta),
/// lambda = lambda_hi theta / (1 + theta), constant conductivities and
/// W(d) = (|d|^2 - 1)^2. Each default can be replaced by a ScalarLaw (or a
/// PenaltyLaw) through the with_* builders, which return a new object.
class MaterialLaws {
 public:
  MaterialLaws() : MaterialLaws(MaterialParams{}) {}
  explicit MaterialLaws(MaterialParams params);

  MaterialLaws with_viscosity(ScalarLaw law) const;
  MaterialLaws with_dilatation(ScalarLaw law) const;
  MaterialLaws with_conductivity(ScalarLaw law) const;
  MaterialLaws with_anisotropy(ScalarLaw law) const;
  MaterialLaws with_penalty(PenaltyLaw law, std::string label = "custom") const;

  const MaterialParams& params() const noexcept { return params_; }

  double viscosity(double theta) const;
  double dilatation(double theta) const;
  double dilatation_slope(double theta) const;
  /// Primitive of 1/lambda. Default law: (ln theta + theta) / lambda_hi.
  /// Replaced laws: integral of 1/lambda from 1 to theta.
  double dilatation_primitive(double theta) const;
  Conductivity conductivity(double theta) const;
  PenaltyValue penalty(const Vec3& d) const;

  bool default_viscosity() const noexcept { return !viscosity_.has_value(); }
  bool default_dilatation() const noexcept { return !dilatation_.has_value(); }
  bool default_penalty() const noexcept { return !penalty_; }
  std::string describe() const;

 private:
  MaterialParams params_;
  std::optional<ScalarLaw> viscosity_;
  std::optional<ScalarLaw> dilatation_;
  std::optional<ScalarLaw> conductivity_;
  std::optional<ScalarLaw> anisotropy_;
  PenaltyLaw penalty_;
  std::string penalty_label_ = "default";
  std::shared_ptr<const std::vector<double>> primitive_at_knots_;
};

struct HypothesisCheck {
  std::string name;
  bool passed = true;
  std::string counterexample;  // empty when passed
  double worst_value = 0.0;
};

struct HypothesisReport {
  std::vector<HypothesisCheck> checks;
  bool all_passed() const;
  std::string summary() const;
};

/// Sweeps the constitutive laws over the samples and checks W >= 0,
/// dW.d >= 0 for |d| >= D0, mu_lo <= mu <= mu_hi, kappa >= kappa_lo,
/// 0 <= kappa_aniso <= kappa_hi, lambda(0) = 0, lambda'(0) > 0, lambda
/// nondecreasing and lambda <= lambda_hi. Throws std::invalid_argument on
/// empty sample sets.
HypothesisReport validate_hypotheses(const MaterialLaws& laws, const std::vector<double>& theta_grid,
                                     const std::vector<Vec3>& d_samples);

/// Default sample sets: theta in [0, 10] step 0.1, deterministic pseudo-random d with |d| <= 3.
std::vector<double> default_theta_grid();
std::vector<Vec3> default_director_samples(std::size_t count = 100, unsigned seed = 7);

}  // namespace nematic
