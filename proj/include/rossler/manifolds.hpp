#pragma once

// One-dimensional separatrices of the saddle-foci, the growing 2D
// stable-manifold front and its trace on S_b = {z = -b}, the attractor
// criterion, the repeller-region certificates, inward-flux trapping
// certification, the heteroclinic (trefoil) defect, and the flow
// kneading sequence K(v) read off the Delta_Out separatrix.
//
// Core routines are generic over the vector field so tests can run them
// on constructed fields with known geometry; Params wrappers assemble
// the Rossler-specific seeds from the spectral data.

#include <functional>
#include <optional>

#include "rossler/integrator.hpp"
#include "rossler/section.hpp"

namespace rossler {

// --- separatrices -----------------------------------------------------------

enum class SeparatrixBranch { DeltaOut, GammaOut, DeltaIn, GammaIn };

enum class TraceEnd { Escaped, TimeBudget, ConvergedToFixedPoint };

struct SeparatrixTrace {
  SeparatrixBranch branch = SeparatrixBranch::DeltaOut;
  Vec3 seed;
  int seed_sign = +1;              // sign of the eigenvector offset
  std::vector<Crossing> crossings; // U_v crossings in flow order
  TraceEnd end = TraceEnd::TimeBudget;
  double t_end = 0.0;
  Vec3 state_end;
};

struct BranchSpec {
  Vec3 fixed_point;
  Vec3 eigenvector;      // unit real eigenvector
  double time_dir = 1.0; // +1 along the flow (unstable), -1 backward (stable)
};

struct TraceConfig {
  double eps = 1e-5;        // seeding offset along the eigenvector
  double t_max = 500.0;
  Tolerances tol;
  double escape_radius = 0.0;  // 0: default from Params in wrappers
  std::optional<Vec3> other_fixed_point;
  double fp_converge_tol = 1e-6;
  EventSpec section;        // crossings to record along the way
  double arm_time = 1e-6;
};

// Integrates from fixed_point + sign*eps*eigenvector (time reversed for
// stable branches), recording section crossings, until escape, time
// budget, or convergence to `other_fixed_point`.
SeparatrixTrace trace_branch_core(const Field& f, const BranchSpec& b, int sign,
                                  const TraceConfig& cfg);

// Spec-facing wrapper: traces both eigenvector signs and assigns
// Delta/Gamma after the fact (the escaping branch is Gamma; if both
// escape, Delta is the one with the longer bounded prefix).
// Throws NotSaddleFocus when the relevant fixed point has no real
// eigendirection of the required stability.
SeparatrixTrace trace_separatrix(const Params& p, SeparatrixBranch branch,
                                 double eps = 0.0, double t_max = 500.0,
                                 Tolerances tol = {});

// Real eigenvector of J for eigenvalue lambda (unit norm).
Vec3 real_eigenvector(const Mat3& J, double lambda);

// Orthonormal basis (u, v) of the invariant plane of the complex pair
// rho +- i psi of J.
std::pair<Vec3, Vec3> complex_pair_plane(const Mat3& J, double rho, double psi);

// --- flow kneading ----------------------------------------------------------

struct FlowKneading {
  SymbolSequence word;
  bool truncated = false;  // trace ended before N symbols without P_In padding
  bool ambiguous = false;  // a crossing fell inside the fold ambiguity band
};

// Symbols of the crossing abscissas x_1, x_2, ...; when the trace
// converged to P_In the stream is padded with 1s (P_In lies in D_1).
FlowKneading kneading_from_trace(const std::vector<double>& xs, bool converged_to_pin,
                                 const Partition& part, int n);

// K(v) from the Delta_Out separatrix.  Throws EmptyTrace when Delta_Out
// escapes before its first crossing.
FlowKneading flow_kneading(const Params& p, const Partition& part, int n,
                           double eps = 0.0, double t_max = 500.0,
                           Tolerances tol = {});

// --- manifold fronts --------------------------------------------------------

struct FrontHit {
  Vec3 point;
  double t_back = 0.0;
};

struct RingPoint {
  double theta = 0.0;  // seed-circle parameter
  Vec3 pos;
  std::optional<FrontHit> hit;  // first intersection with the target plane
  bool escaped = false;
};

struct ManifoldFront {
  std::vector<RingPoint> ring;  // ordered by theta
  int generation = 0;
  double t = 0.0;  // common (signed) advection time of the ring
};

// FullPuncture: every ring point hit the target plane.  Stalled: no
// active points remain but some escaped without a hit.
enum class FrontStop { FullPuncture, TimeBudget, Stalled };

struct FrontResult {
  std::vector<ManifoldFront> history;  // one snapshot per generation
  FrontStop stop = FrontStop::TimeBudget;
};

struct FrontConfig {
  double r0 = 1e-3;
  double h_max = 0.1;
  double dt_generation = 0.2;
  double t_max = 1000.0;        // total |advection time| budget
  double r_max = 1e3;           // freeze points beyond this radius
  int max_points = 20000;       // refinement budget; FrontBlowup beyond
  double time_dir = -1.0;       // -1: backward (stable manifold)
  Tolerances tol;
  EventSpec target;             // plane whose hits are recorded
};

// Advects a ring seeded by `seed_fn(theta)` in synchronized generations,
// inserting points (by seeding at intermediate theta and re-advecting)
// wherever adjacent spacing exceeds h_max.  Throws FrontBlowup when the
// refinement exceeds max_points.
FrontResult grow_front_core(const Field& f, const std::function<Vec3(double)>& seed_fn,
                            const FrontConfig& cfg, int initial_points = 32);

struct StableSurfaceConfig {
  double r0 = 0.0;       // 0: 1e-3 * |P_Out - P_In|
  double h_max = 0.0;    // 0: 0.05 * |P_Out - P_In|
  double t_back_max = 1000.0;
  double r_max = 0.0;    // 0: 10 * |P_Out - P_In|
  double dt_generation = 0.2;
  int max_points = 20000;
  Tolerances tol;
};

// Grows W^s_Out backward from a seed ring in the stable eigenplane of
// P_Out, recording S_b = {z = -b} hits.  Throws NotSaddleFocus when
// P_Out has no complex stable pair.
FrontResult grow_stable_surface(const Params& p, const StableSurfaceConfig& cfg = {});

// --- attractor criterion ----------------------------------------------------

enum class CriterionStatus { SatisfiedBounded, EscapedFront, Inconclusive };

struct CriterionVerdict {
  CriterionStatus status = CriterionStatus::Inconclusive;
  std::vector<Vec3> delta_polyline;  // S_b hits ordered by ring parameter
  double gap_max = 0.0;
  double radius_max = 0.0;
};

struct CriterionConfig {
  StableSurfaceConfig surface;
  double gap_tol = 0.0;  // 0: 2 * h_max
};

// Orders the S_b hits of a grown front along the ring parameterization;
// SatisfiedBounded iff every ring point hit S_b and the polyline closes
// up within gap_tol inside radius r_max.
CriterionVerdict attractor_verdict(const FrontResult& front, double gap_tol,
                                   double r_max);

CriterionVerdict attractor_criterion(const Params& p, const CriterionConfig& cfg = {});

// --- repeller region --------------------------------------------------------

struct RepellerReport {
  bool in_region = false;               // ydot<0, xdot>0, y>b+1
  std::array<double, 3> face_fluxes{};  // F.r_i at the projections onto R1..R3
  std::array<Vec3, 3> face_points{};
};

RepellerReport repeller_membership(const Params& p, const Vec3& s);

// Closed forms for the face fluxes (used by tests and the acceptance
// suite as the algebraic route against the generic dot products):
//   R1 (subset of Y, normal (1,a,0)):  x/a - z
//   R2 ({y=-z},     normal (0,1,1)):   x(1+b) + z(x - a - c)
//   R3 ({y=b+1},    normal (0,-1,0)):  -(x + a(b+1))
double repeller_flux1_closed(const Params& p, double x, double z);
double repeller_flux2_closed(const Params& p, double x, double z);
double repeller_flux3_closed(const Params& p, double x);

// --- trapping certification -------------------------------------------------

struct Triangle {
  Vec3 a, b, c;
};

struct TrappingReport {
  bool certified = false;  // all sampled fluxes < -margin
  double min_flux = 0.0;
  double max_flux = 0.0;
  double inward_fraction = 0.0;  // share of samples with F.n < 0
  long samples = 0;
};

// Samples F.n (n from the triangle winding) at n_samples points per
// triangle plus the centroid.  Throws DegenerateTriangle.
TrappingReport certify_trapping_field(const Field& f, const std::vector<Triangle>& surface,
                                      int n_samples, double margin = 0.0,
                                      uint64_t rng_seed = 0);

TrappingReport certify_trapping(const Params& p, const std::vector<Triangle>& surface,
                                int n_samples, double margin = 0.0,
                                uint64_t rng_seed = 0);

// --- trefoil defect ---------------------------------------------------------

struct TrefoilDefect {
  double d_hetero = 0.0;    // min distance on U_v between Delta_Out and Delta_In
  double d_coincide = 0.0;  // Hausdorff distance of the 2D fronts' Y-traces
  bool coincide_computed = false;
  bool transverse_P0 = false;  // transversality at the nearest-approach crossing
};

struct TrefoilConfig {
  double eps = 0.0;  // 0: 1e-5 * scale
  double t_max = 500.0;
  Tolerances tol;
  bool compute_coincide = true;
  StableSurfaceConfig front;
};

// Min distance between two crossing sets and the transversality flag of
// the minimizing crossing from A.
std::pair<double, bool> crossing_set_distance(const std::vector<Crossing>& a,
                                              const std::vector<Crossing>& b,
                                              double tangency_threshold = 1e-8);

double hausdorff_distance(const std::vector<Vec3>& a, const std::vector<Vec3>& b);

TrefoilDefect trefoil_defect(const Params& p, const TrefoilConfig& cfg = {});

}  // namespace rossler
