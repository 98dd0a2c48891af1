#pragma once

// Adaptive Dormand-Prince 5(4) integration with dense output, affine
// surface-crossing events, and boundedness classification.  The core is
// generic over the vector field; Params overloads wire in the Rossler
// field.  Negative time spans integrate backward.

#include <functional>
#include <optional>
#include <vector>

#include "rossler/core.hpp"
#include "rossler/model.hpp"

namespace rossler {

using Field = std::function<Vec3(const Vec3&)>;

inline Field rossler_field(const Params& p) {
  return [p](const Vec3& s) { return eval_field(p, s); };
}

struct Tolerances {
  double abs = 1e-10;
  double rel = 1e-10;
};

enum class Termination { TimeBudget, Event, Escaped, FixedPointConverged };

enum class CrossDirection { Up, Down, Both };

// Affine event surface g(s) = dot(normal, s) + offset.
struct EventSpec {
  Vec3 normal;
  double offset = 0.0;
  CrossDirection direction = CrossDirection::Both;
  std::function<bool(const Vec3&)> constraint;  // optional half-space filter

  double g(const Vec3& s) const { return dot(normal, s) + offset; }
};

// A refined transverse intersection with an event surface.
struct EventCrossing {
  Vec3 point;
  double time = 0.0;
  int direction = 0;           // sign of d/dt g at the crossing
  double transversality = 0.0; // |F . n|
  bool tangential = false;     // |F . n| below the tangency threshold
};

struct Trajectory {
  struct Sample {
    double t;
    Vec3 state;
  };

  // Dense-output segment of one accepted step: quartic Hermite-type
  // interpolant in theta = (t - t0)/h.
  struct Segment {
    double t0, h;
    std::array<Vec3, 5> rcont;
    Vec3 eval(double t) const;
  };

  std::vector<Sample> samples;
  std::vector<Segment> segments;  // empty unless dense output was requested
  Tolerances tol;
  Termination termination = Termination::TimeBudget;
  std::optional<EventCrossing> event;
  double t_end = 0.0;   // time actually reached
  Vec3 state_end{};

  // Dense evaluation; valid for t within the integrated span.
  Vec3 eval(double t) const;
};

struct IntegrateOptions {
  Tolerances tol;
  bool store_dense = false;
  bool store_samples = true;
  double escape_radius = 0.0;           // 0: no escape check
  std::optional<EventSpec> event;       // stop at first matching crossing
  double fixed_point_tol = 0.0;         // 0: no fixed-point stop
  // Custom stop (checked at accepted steps); reported as
  // Termination::FixedPointConverged.
  std::function<bool(double, const Vec3&)> stop_predicate;
  double tangency_threshold = 1e-8;
  double event_refine_tol = 1e-10;      // target |g| at the crossing
  double arm_time = 0.0;                // ignore crossings before t0 + arm_time
  long max_steps = 50'000'000;
  double initial_step = 0.0;            // 0: automatic
};

// Core integrator.  Throws StepSizeUnderflow when the adaptive step falls
// below 1e-14 * |t1 - t0|.
Trajectory integrate_field(const Field& f, const Vec3& x0, double t0, double t1,
                           const IntegrateOptions& opts);

// Spec-facing wrappers on the Rossler field. ------------------------------

Trajectory integrate(const Params& p, const Vec3& x0, double t0, double t1,
                     Tolerances tol = {}, bool store_dense = true);

struct AdvanceResult {
  bool found = false;
  EventCrossing crossing;     // valid when found
  Termination termination = Termination::TimeBudget;
  double t_end = 0.0;
  Vec3 state_end{};
};

// First sign-change of the event function along the flow, refined on the
// dense output to |g| < 1e-10.  `found == false` means t_max was reached
// (or escape, when an escape radius is set).
AdvanceResult advance_to_event(const Params& p, const Vec3& x0, const EventSpec& ev,
                               double t_max, Tolerances tol = {},
                               double escape_radius = 0.0);

AdvanceResult advance_to_event_field(const Field& f, const Vec3& x0,
                                     const EventSpec& ev, double t_max,
                                     Tolerances tol = {}, double escape_radius = 0.0);

struct BoundednessVerdict {
  bool escaped = false;
  double t_escape = 0.0;  // valid when escaped
  double horizon = 0.0;   // T for which boundedness was checked
  double radius_used = 0.0;
};

// Escaped(t) at the first |state| > r_esc, else BoundedFor(T).
// `backward` integrates over [0, -T].
BoundednessVerdict classify_boundedness(const Params& p, const Vec3& x0, double T,
                                        double r_esc, Tolerances tol = {},
                                        bool backward = false);

// Default escape radius: 1e3 * max(1, |P_Out|); keeps scans comparable
// across parameters.
double default_escape_radius(const Params& p);

}  // namespace rossler
