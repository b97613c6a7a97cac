#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace frontlab {

/// Reaction term f : [0,1] -> R of u_t = Δu + f(u).
///
/// Cubic and quintic families are stored as lead * prod (s - r) so that the
/// stencil kernels can evaluate them inline and every zero is exact.
/// Custom terms wrap arbitrary callables; their derivative falls back to a
/// centered difference when none is given.
class Nonlinearity {
 public:
  enum class Kind { cubic, quintic, custom };

  using Fn = std::function<double(double)>;

  static Nonlinearity cubic(double theta);
  static Nonlinearity quintic(double theta1, double theta2, double k);
  static Nonlinearity custom(Fn eval, Fn deriv = {}, std::string label = "custom");

  /// Parses "cubic(0.3)" or "quintic(0.2, 0.8, 8.0)".
  static Nonlinearity parse(const std::string& spec);

  double eval(double s) const;
  double deriv(double s) const;
  /// eval with s clamped to [0,1].
  double operator()(double s) const { return eval(s < 0.0 ? 0.0 : (s > 1.0 ? 1.0 : s)); }

  Kind kind() const { return kind_; }
  const std::vector<double>& params() const { return params_; }
  const std::vector<double>& poly() const { return poly_; }
  bool is_polynomial() const { return !poly_.empty(); }
  /// Factored form of the polynomial families (empty for custom).
  const std::vector<double>& roots() const { return roots_; }
  double leading() const { return lead_; }
  const std::string& label() const { return label_; }
  /// Round-trips through parse() for the polynomial families.
  std::string spec_string() const;

  const std::vector<double>& zeros() const { return zeros_; }
  double theta_minus() const { return theta_minus_; }
  double theta_plus() const { return theta_plus_; }
  double integral01() const { return integral01_; }
  double fprime0() const { return deriv(0.0); }
  double fprime1() const { return deriv(1.0); }
  /// max over [0,1] of |f'|, sampled on 1001 points.
  double max_abs_deriv() const { return max_abs_deriv_; }

 private:
  Nonlinearity() = default;
  void finalize();

  Kind kind_ = Kind::custom;
  std::vector<double> params_;
  std::vector<double> poly_;
  std::vector<double> roots_;
  double lead_ = 0.0;
  std::vector<double> dpoly_;
  Fn eval_;
  Fn deriv_;
  std::string label_;
  std::vector<double> zeros_;
  double theta_minus_ = 0.0;
  double theta_plus_ = 0.0;
  double integral01_ = 0.0;
  double max_abs_deriv_ = 0.0;
};

struct NonlinearityReport {
  std::vector<double> zeros;
  double theta_minus = 0.0;
  double theta_plus = 0.0;
  double integral01 = 0.0;
  double fprime0 = 0.0;
  double fprime1 = 0.0;
  bool is_hypothesis_f = false;
  bool is_bistable = false;
};

/// Zeros of f on [0,1]: sign changes on 10^4 uniform cells refined by
/// bisection to 1e-12. Exact zeros at cell nodes are kept as is.
std::vector<double> find_zeros(const Nonlinearity::Fn& f);

NonlinearityReport analyze(const Nonlinearity& f);

/// Composite Gauss-Legendre quadrature of f over [a,b].
double integrate(const Nonlinearity::Fn& f, double a, double b, int panels = 200);

/// Horner evaluation, ascending coefficients.
inline double horner(const std::vector<double>& c, double s) {
  double acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * s + *it;
  return acc;
}

}  // namespace frontlab
