#pragma once

// The vector field (x' = -y-z, y' = x+ay, z' = bx+z(x-c)), its two fixed
// points, the linearization, and the parameter-space assumptions.

#include <array>
#include <complex>

#include "rossler/core.hpp"

namespace rossler {

enum class FixedPointKind { In, Out };

struct FixedPointInfo {
  Vec3 location;
  FixedPointKind kind = FixedPointKind::In;
};

// Spectrum of the Jacobian at a fixed point.  `saddle_focus` is true when
// the spectrum splits into one real eigenvalue plus a conjugate pair; in
// that case gamma/rho/psi/nu are populated.  A failed sign pattern or a
// three-real spectrum is a reported state, not an error, so parameter
// scans can traverse non-conforming regions.
struct SpectralInfo {
  std::array<std::complex<double>, 3> eigenvalues{};
  bool saddle_focus = false;
  double gamma = 0.0;  // real eigenvalue
  double rho = 0.0;    // real part of the complex pair
  double psi = 0.0;    // imaginary part, > 0
  double nu = 0.0;     // saddle index |rho/gamma|
  bool shilnikov = false;
};

struct AssumptionReport {
  bool a1_range = false;                // a,b in (0,1), c > 1
  bool a2_opposing_saddle_foci = false; // In: gamma<0, rho>0; Out mirrored
  bool a3_shilnikov = false;            // min(nu_In, nu_Out) < 1
};

Vec3 eval_field(const Params& p, const Vec3& s);

Mat3 jacobian(const Params& p, const Vec3& s);

// P_In = (0,0,0) and P_Out = (c-ab, (ab-c)/a, (c-ab)/a).
// Throws DegenerateParams when a == 0.
std::pair<FixedPointInfo, FixedPointInfo> fixed_points(const Params& p);

SpectralInfo classify_fixed_point(const Params& p, FixedPointKind which);

AssumptionReport check_assumptions(const Params& p);

// Real roots of x^3 + a2 x^2 + a1 x + a0.  Returns the number of real
// roots (1 or 3); when 1, `complex_pair` receives the conjugate pair.
// All roots are Newton-polished on the original coefficients.
int solve_cubic(double a2, double a1, double a0, std::array<double, 3>& real_roots,
                std::complex<double>& complex_pair);

}  // namespace rossler
