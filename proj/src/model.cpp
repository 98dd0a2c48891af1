#include "rossler/model.hpp"

#include <algorithm>
#include <cmath>

namespace rossler {

Vec3 eval_field(const Params& p, const Vec3& s) {
  return {-s.y - s.z, s.x + p.a * s.y, p.b * s.x + s.z * (s.x - p.c)};
}

Mat3 jacobian(const Params& p, const Vec3& s) {
  Mat3 j;
  j[0] = {0.0, -1.0, -1.0};
  j[1] = {1.0, p.a, 0.0};
  j[2] = {p.b + s.z, 0.0, s.x - p.c};
  return j;
}

std::pair<FixedPointInfo, FixedPointInfo> fixed_points(const Params& p) {
  if (p.a == 0.0) throw DegenerateParams("fixed_points: a == 0");
  FixedPointInfo in{{0.0, 0.0, 0.0}, FixedPointKind::In};
  const double t = p.c - p.a * p.b;
  FixedPointInfo out{{t, -t / p.a, t / p.a}, FixedPointKind::Out};
  return {in, out};
}

namespace {

double cubic_eval(double a2, double a1, double a0, double x) {
  return ((x + a2) * x + a1) * x + a0;
}

double cubic_deriv(double a2, double a1, double x) {
  return (3.0 * x + 2.0 * a2) * x + a1;
}

double newton_polish(double a2, double a1, double a0, double x) {
  for (int i = 0; i < 3; ++i) {
    const double f = cubic_eval(a2, a1, a0, x);
    const double df = cubic_deriv(a2, a1, x);
    if (df == 0.0) break;
    const double step = f / df;
    x -= step;
    if (std::fabs(step) <= 1e-16 * std::max(1.0, std::fabs(x))) break;
  }
  return x;
}

}  // namespace

int solve_cubic(double a2, double a1, double a0, std::array<double, 3>& real_roots,
                std::complex<double>& complex_pair) {
  // Depressed form t^3 + p t + q with x = t - a2/3.
  const double shift = a2 / 3.0;
  const double p = a1 - a2 * a2 / 3.0;
  const double q = 2.0 * a2 * a2 * a2 / 27.0 - a2 * a1 / 3.0 + a0;
  const double disc = -4.0 * p * p * p - 27.0 * q * q;

  if (disc > 0.0) {
    // Three distinct real roots: trigonometric method.
    const double m = 2.0 * std::sqrt(-p / 3.0);
    const double arg = std::clamp(3.0 * q / (p * m), -1.0, 1.0);
    const double theta = std::acos(arg) / 3.0;
    for (int k = 0; k < 3; ++k) {
      const double t = m * std::cos(theta - 2.0 * M_PI * k / 3.0);
      real_roots[k] = newton_polish(a2, a1, a0, t - shift);
    }
    std::sort(real_roots.begin(), real_roots.end());
    return 3;
  }

  // One real root: Cardano with cancellation-safe branch.
  double t0;
  if (p == 0.0 && q == 0.0) {
    t0 = 0.0;
  } else {
    const double h = std::sqrt(std::max(0.0, q * q / 4.0 + p * p * p / 27.0));
    const double u = -q / 2.0 + (q <= 0.0 ? h : -h);
    const double cu = std::cbrt(u);
    t0 = (cu == 0.0) ? 0.0 : cu - p / (3.0 * cu);
  }
  const double r = newton_polish(a2, a1, a0, t0 - shift);
  real_roots[0] = r;

  // Deflate: remaining quadratic x^2 + (a2 + r) x + (a0 / -r ...) -- use
  // the symmetric-function form to avoid dividing by a near-zero root.
  const double sum_pair = -a2 - r;           // rho1 + rho2
  const double prod_pair = (r != 0.0) ? -a0 / r : a1 - r * sum_pair;
  const double half = sum_pair / 2.0;
  const double rad = prod_pair - half * half;
  if (rad <= 0.0) {
    // Numerically a double real root; report three reals.
    const double s = std::sqrt(std::max(0.0, -rad));
    real_roots[1] = newton_polish(a2, a1, a0, half - s);
    real_roots[2] = newton_polish(a2, a1, a0, half + s);
    std::sort(real_roots.begin(), real_roots.end());
    return 3;
  }
  complex_pair = {half, std::sqrt(rad)};
  return 1;
}

SpectralInfo classify_fixed_point(const Params& p, FixedPointKind which) {
  const auto [in, out] = fixed_points(p);
  const Vec3 loc = (which == FixedPointKind::In) ? in.location : out.location;
  const Mat3 j = jacobian(p, loc);

  // char(l) = l^3 - tr l^2 + M l - det
  const double a2 = -j.trace();
  const double a1 = j.minor_sum();
  const double a0 = -j.det();

  SpectralInfo s;
  std::array<double, 3> roots{};
  std::complex<double> pair;
  const int n_real = solve_cubic(a2, a1, a0, roots, pair);

  if (n_real == 3) {
    s.eigenvalues = {std::complex<double>(roots[0]), std::complex<double>(roots[1]),
                     std::complex<double>(roots[2])};
    s.saddle_focus = false;
    return s;
  }

  s.eigenvalues = {std::complex<double>(roots[0]), pair, std::conj(pair)};
  s.saddle_focus = true;
  s.gamma = roots[0];
  s.rho = pair.real();
  s.psi = std::fabs(pair.imag());
  s.nu = (s.gamma != 0.0) ? std::fabs(s.rho / s.gamma)
                          : std::numeric_limits<double>::infinity();
  // Shilnikov condition: genuine saddle-focus (real part of the pair opposes
  // the real eigenvalue) with saddle index below one.
  s.shilnikov = (s.rho * s.gamma < 0.0) && (s.nu < 1.0);
  return s;
}

AssumptionReport check_assumptions(const Params& p) {
  AssumptionReport r;
  r.a1_range = p.a > 0.0 && p.a < 1.0 && p.b > 0.0 && p.b < 1.0 && p.c > 1.0;
  if (p.a == 0.0) return r;

  const SpectralInfo si = classify_fixed_point(p, FixedPointKind::In);
  const SpectralInfo so = classify_fixed_point(p, FixedPointKind::Out);

  const bool in_ok = si.saddle_focus && si.gamma < 0.0 && si.rho > 0.0;
  const bool out_ok = so.saddle_focus && so.gamma > 0.0 && so.rho < 0.0;
  r.a2_opposing_saddle_foci = in_ok && out_ok;
  if (si.saddle_focus && so.saddle_focus)
    r.a3_shilnikov = std::min(si.nu, so.nu) < 1.0;
  return r;
}

}  // namespace rossler
