#include "frontlab/nonlinearity.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <regex>
#include <sstream>

#include "frontlab/errors.hpp"

namespace frontlab {

namespace {

// Ascending coefficients of lead * prod (s - r).
std::vector<double> from_roots(double lead, const std::vector<double>& roots) {
  std::vector<double> c{lead};
  for (double r : roots) {
    std::vector<double> next(c.size() + 1, 0.0);
    for (std::size_t k = 0; k < c.size(); ++k) {
      next[k + 1] += c[k];
      next[k] -= r * c[k];
    }
    c = std::move(next);
  }
  return c;
}

std::vector<double> derivative(const std::vector<double>& c) {
  std::vector<double> d;
  for (std::size_t k = 1; k < c.size(); ++k) d.push_back(static_cast<double>(k) * c[k]);
  return d;
}

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

Nonlinearity Nonlinearity::cubic(double theta) {
  if (!(theta > 0.0 && theta < 1.0))
    throw DomainError("cubic: theta must lie in (0,1), got " + format_double(theta));
  Nonlinearity f;
  f.kind_ = Kind::cubic;
  f.params_ = {theta};
  // s(1-s)(s-theta) = -s(s-1)(s-theta)
  f.lead_ = -1.0;
  f.roots_ = {0.0, theta, 1.0};
  f.poly_ = from_roots(f.lead_, f.roots_);
  f.zeros_ = {0.0, theta, 1.0};
  f.label_ = "cubic(" + format_double(theta) + ")";
  f.finalize();
  return f;
}

Nonlinearity Nonlinearity::quintic(double theta1, double theta2, double k) {
  if (!(theta1 > 0.0 && theta1 < 0.5 && theta2 > 0.5 && theta2 < 1.0))
    throw DomainError("quintic: need 0 < theta1 < 1/2 < theta2 < 1");
  if (!(k > 0.0)) throw DomainError("quintic: k must be positive");
  Nonlinearity f;
  f.kind_ = Kind::quintic;
  f.params_ = {theta1, theta2, k};
  f.lead_ = -k;
  f.roots_ = {0.0, theta1, 0.5, theta2, 1.0};
  f.poly_ = from_roots(f.lead_, f.roots_);
  f.zeros_ = {0.0, theta1, 0.5, theta2, 1.0};
  f.label_ = "quintic(" + format_double(theta1) + ", " + format_double(theta2) + ", " +
             format_double(k) + ")";
  f.finalize();
  return f;
}

Nonlinearity Nonlinearity::custom(Fn eval, Fn deriv, std::string label) {
  if (!eval) throw DomainError("custom nonlinearity needs an evaluator");
  Nonlinearity f;
  f.kind_ = Kind::custom;
  f.eval_ = std::move(eval);
  f.deriv_ = std::move(deriv);
  f.label_ = std::move(label);
  f.zeros_ = find_zeros(f.eval_);
  f.finalize();
  return f;
}

Nonlinearity Nonlinearity::parse(const std::string& spec) {
  static const std::regex re(R"(^\s*(cubic|quintic)\s*\(([^()]*)\)\s*$)");
  std::smatch m;
  if (!std::regex_match(spec, m, re))
    throw ConfigError("cannot parse nonlinearity '" + spec + "' (expected cubic(θ) or quintic(θ1, θ2, k))");
  std::vector<double> args;
  std::stringstream ss(m[2].str());
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      double v = std::stod(item, &used);
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
      args.push_back(v);
    } catch (const std::exception&) {
      throw ConfigError("bad numeric argument '" + item + "' in '" + spec + "'");
    }
  }
  if (m[1] == "cubic") {
    if (args.size() != 1) throw ConfigError("cubic takes one argument");
    return cubic(args[0]);
  }
  if (args.size() != 3) throw ConfigError("quintic takes three arguments");
  return quintic(args[0], args[1], args[2]);
}

std::string Nonlinearity::spec_string() const { return label_; }

double Nonlinearity::eval(double s) const {
  if (!roots_.empty()) {
    // product form: exactly zero at every root
    double acc = lead_;
    for (double r : roots_) acc *= s - r;
    return acc;
  }
  return eval_(s);
}

double Nonlinearity::deriv(double s) const {
  if (!poly_.empty()) return horner(dpoly_, s);
  if (deriv_) return deriv_(s);
  const double d = 1e-6;
  return (eval_(s + d) - eval_(s - d)) / (2.0 * d);
}

void Nonlinearity::finalize() {
  if (!poly_.empty()) dpoly_ = derivative(poly_);
  std::vector<double> interior;
  for (double z : zeros_)
    if (z > 0.0 && z < 1.0) interior.push_back(z);
  if (interior.empty()) {
    theta_minus_ = theta_plus_ = std::numeric_limits<double>::quiet_NaN();
  } else {
    theta_minus_ = *std::min_element(interior.begin(), interior.end());
    theta_plus_ = *std::max_element(interior.begin(), interior.end());
  }
  if (!poly_.empty()) {
    integral01_ = 0.0;
    for (std::size_t k = 0; k < poly_.size(); ++k) integral01_ += poly_[k] / static_cast<double>(k + 1);
  } else {
    integral01_ = integrate(eval_, 0.0, 1.0);
  }
  max_abs_deriv_ = 0.0;
  for (int k = 0; k <= 1000; ++k) max_abs_deriv_ = std::max(max_abs_deriv_, std::abs(deriv(k / 1000.0)));
}

std::vector<double> find_zeros(const Nonlinearity::Fn& f) {
  constexpr int cells = 10000;
  std::vector<double> zeros;
  auto sign = [](double v) { return (v > 0.0) - (v < 0.0); };
  double a = 0.0;
  double fa = f(a);
  if (fa == 0.0) zeros.push_back(0.0);
  for (int k = 1; k <= cells; ++k) {
    const double b = static_cast<double>(k) / cells;
    const double fb = f(b);
    if (fb == 0.0) {
      zeros.push_back(b);
    } else if (fa != 0.0 && sign(fa) != sign(fb)) {
      double lo = a, hi = b, flo = fa;
      while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm == 0.0) {
          lo = hi = mid;
          break;
        }
        if (sign(fm) == sign(flo)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      zeros.push_back(0.5 * (lo + hi));
    }
    a = b;
    fa = fb;
  }
  return zeros;
}

NonlinearityReport analyze(const Nonlinearity& f) {
  NonlinearityReport r;
  r.zeros = find_zeros([&](double s) { return f.eval(s); });
  r.integral01 = integrate([&](double s) { return f.eval(s); }, 0.0, 1.0);
  r.fprime0 = f.deriv(0.0);
  r.fprime1 = f.deriv(1.0);
  std::vector<double> interior;
  for (double z : r.zeros)
    if (z > 0.0 && z < 1.0) interior.push_back(z);
  r.theta_minus = interior.empty() ? std::numeric_limits<double>::quiet_NaN() : interior.front();
  r.theta_plus = interior.empty() ? std::numeric_limits<double>::quiet_NaN() : interior.back();

  const bool ends_zero = std::abs(f.eval(0.0)) < 1e-14 && std::abs(f.eval(1.0)) < 1e-14;
  r.is_hypothesis_f = ends_zero && r.fprime0 < 0.0 && r.fprime1 < 0.0 && !interior.empty();

  r.is_bistable = false;
  if (r.is_hypothesis_f && interior.size() == 1) {
    const double theta = interior.front();
    bool ok = true;
    for (int k = 1; k < 1000 && ok; ++k) {
      const double s = k / 1000.0;
      const double v = f.eval(s);
      if (s < theta - 1e-9 && !(v < 0.0)) ok = false;
      if (s > theta + 1e-9 && !(v > 0.0)) ok = false;
    }
    r.is_bistable = ok;
  }
  return r;
}

double integrate(const Nonlinearity::Fn& f, double a, double b, int panels) {
  // 5-point Gauss-Legendre per panel.
  static constexpr std::array<double, 5> x{0.0, -0.5384693101056831, 0.5384693101056831,
                                           -0.9061798459386640, 0.9061798459386640};
  static constexpr std::array<double, 5> w{0.5688888888888889, 0.4786286704993665, 0.4786286704993665,
                                           0.2369268850561891, 0.2369268850561891};
  const double width = (b - a) / panels;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * width;
    double acc = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) acc += w[k] * f(mid + 0.5 * width * x[k]);
    total += 0.5 * width * acc;
  }
  return total;
}

}  // namespace frontlab
