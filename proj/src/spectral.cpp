#include "siflab/spectral.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>
#include <vector>

#include "siflab/error.hpp"

namespace siflab {

namespace {

constexpr double pi = std::numbers::pi;
constexpr int kScanSamples = 2048;

struct Scan {
  std::vector<double> crossings;  // left ends of sign-change cells
  std::string pattern;
  double step = 0.0;
};

Scan sign_scan(const std::function<double(double)>& f, double a, double b) {
  Scan s;
  s.step = (b - a) / kScanSamples;
  double prev = 0.0;
  for (int k = 0; k <= kScanSamples; ++k) {
    double x = k == kScanSamples ? b : a + k * s.step;
    double v = f(x);
    // exact zeros at bracket ends are the bracket-defining roots themselves
    if (v == 0.0) continue;
    char c = v > 0 ? '+' : '-';
    if (s.pattern.empty() || c != s.pattern.back()) s.pattern.push_back(c);
    if (prev != 0.0 && (prev < 0) != (v < 0)) s.crossings.push_back(x - s.step);
    prev = v;
  }
  return s;
}

double bisect(const std::function<double(double)>& f, double lo, double hi) {
  double flo = f(lo);
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    double mid = 0.5 * (lo + hi);
    double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double root_in(const std::function<double(double)>& f, double a, double b, const char* label) {
  Scan s = sign_scan(f, a, b);
  std::ostringstream os;
  os << label << " bracket (" << a << ", " << b << "), sign pattern " << s.pattern;
  if (s.crossings.empty()) throw Error(ErrorCode::NoRootInBracket, os.str());
  if (s.crossings.size() > 1) throw Error(ErrorCode::MultipleRootsInBracket, os.str());
  double lo = s.crossings.front();
  return bisect(f, lo, lo + s.step);
}

// sinc(x) = sin(x)/x
double sinc(double x) { return std::abs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x; }

// The Lame/Stokes equation factors as (C sin(lw) - l sin w)(C sin(lw) + l sin w).
// Sign-changing factor with unit root removed for C = 1.
double stokes_deflated(double k, double w) {
  double q = w * std::cos(0.5 * (k + 1.0) * w) * sinc(0.5 * (k - 1.0) * w) - std::sin(w);
  return (std::sin(k * w) + k * std::sin(w)) * q;
}

void check_omega(double omega) {
  if (!(omega > pi && omega < 2 * pi))
    throw Error(ErrorCode::InvalidArgument, "omega must lie in (pi, 2pi)");
}

}  // namespace

const char* family_name(Family f) { return f == Family::Lame ? "lame" : "stokes"; }

double MaterialParams::nu() const {
  if (!(eps > 0)) throw Error(ErrorCode::InvalidArgument, "nu is defined only for eps > 0");
  return 1.0 / eps - mu;
}

double lame_residual(double l, double w, double C) {
  double a = C * std::sin(l * w), b = l * std::sin(w);
  return (a - b) * (a + b);
}

double stokes_residual(double k, double w) { return lame_residual(k, w, 1.0); }

ExponentTable stokes_exponents(double omega) {
  check_omega(omega);
  ExponentTable t;
  t.family = Family::Stokes;
  t.omega = omega;
  t.C = 1.0;
  auto f = [omega](double k) { return stokes_deflated(k, omega); };
  t.brackets[0] = {0.5, pi / omega};
  t.exponents[0] = root_in(f, 0.5, pi / omega, "kappa1");
  if (omega <= critical_angle()) {
    t.mode_count = 1;
    t.exponents[1] = 1.0;
    t.brackets[1] = {1.0, 1.0};
    t.brackets[2] = {1.0, 2 * pi / omega};
    t.exponents[2] = root_in(f, 1.0, 2 * pi / omega, "kappa3");
    if (!(t.exponents[0] < pi / omega && 1.0 < t.exponents[2] && t.exponents[2] < 2 * pi / omega))
      throw Error(ErrorCode::NoRootInBracket, "Stokes case 1 ordering violated");
  } else {
    t.mode_count = 2;
    t.brackets[1] = {pi / omega, 1.0};
    t.exponents[1] = root_in(f, pi / omega, 1.0, "kappa2");
    t.exponents[2] = 1.0;
    t.brackets[2] = {1.0, 1.0};
    if (!(t.exponents[0] < pi / omega && pi / omega < t.exponents[1] && t.exponents[1] < 1.0))
      throw Error(ErrorCode::NoRootInBracket, "Stokes case 2 ordering violated");
  }
  for (int k = 0; k < 3; ++k) t.residuals[k] = stokes_residual(t.exponents[k], omega);
  return t;
}

ExponentTable lame_exponents(double omega, double C) {
  check_omega(omega);
  if (!(C >= 1.0)) throw Error(ErrorCode::InvalidArgument, "C must be >= 1");
  if (C == 1.0) {
    ExponentTable t = stokes_exponents(omega);
    t.family = Family::Lame;
    t.mode_count = 2;
    return t;
  }
  ExponentTable t;
  t.family = Family::Lame;
  t.omega = omega;
  t.C = C;
  t.mode_count = 2;
  auto f = [omega, C](double l) { return lame_residual(l, omega, C); };
  t.brackets = {{{0.5, pi / omega}, {pi / omega, 1.0}, {1.0, 2 * pi / omega}}};
  const char* labels[3] = {"lambda1", "lambda2", "lambda3"};
  for (int k = 0; k < 3; ++k) {
    t.exponents[k] = root_in(f, t.brackets[k].first, t.brackets[k].second, labels[k]);
    t.residuals[k] = f(t.exponents[k]);
  }
  const auto& e = t.exponents;
  if (!(0.5 < e[0] && e[0] < pi / omega && pi / omega < e[1] && e[1] < 1.0 && 1.0 < e[2] &&
        e[2] < 2 * pi / omega))
    throw Error(ErrorCode::NoRootInBracket, "Lame ordering violated");
  return t;
}

double critical_angle() {
  auto f = [](double w) { return std::sin(w) - w * std::cos(w); };
  // tan w - w changes sign once on (pi, 3pi/2); sin - w cos has the same root, no pole
  double lo = pi, hi = 1.5 * pi;
  double flo = f(lo);
  while (hi - lo > 1e-13) {
    double mid = 0.5 * (lo + hi);
    double fm = f(mid);
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace siflab
