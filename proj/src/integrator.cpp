#include "rossler/integrator.hpp"

#include <algorithm>
#include <cmath>

namespace rossler {

namespace {

// Dormand-Prince 5(4) coefficients (Hairer/Norsett/Wanner DOPRI5).
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                 a75 = -2187.0 / 6784, a76 = 11.0 / 84;
// b5 - b4 (error weights).
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
// Dense-output weights.
constexpr double d1 = -12715105075.0 / 11282082432.0;
constexpr double d3 = 87487479700.0 / 32700410799.0;
constexpr double d4 = -10690763975.0 / 1880347072.0;
constexpr double d5 = 701980252875.0 / 199316789632.0;
constexpr double d6 = -1453857185.0 / 822651844.0;
constexpr double d7 = 69997945.0 / 29380423.0;

struct StepResult {
  Vec3 y1;
  Vec3 k_last;  // FSAL derivative at y1
  double err;   // scaled error estimate
};

StepResult dopri5_step(const Field& f, double t, const Vec3& y, const Vec3& k1,
                       double h, const Tolerances& tol, std::array<Vec3, 7>& ks) {
  const Vec3 k2 = f(y + h * (a21 * k1));
  const Vec3 k3 = f(y + h * (a31 * k1 + a32 * k2));
  const Vec3 k4 = f(y + h * (a41 * k1 + a42 * k2 + a43 * k3));
  const Vec3 k5 = f(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
  const Vec3 k6 = f(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
  const Vec3 y1 = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
  const Vec3 k7 = f(y1);
  const Vec3 ee = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

  double err = 0.0;
  for (int i = 0; i < 3; ++i) {
    const double sk = tol.abs + tol.rel * std::max(std::fabs(y[i]), std::fabs(y1[i]));
    const double r = ee[i] / sk;
    err += r * r;
  }
  ks = {k1, k2, k3, k4, k5, k6, k7};
  (void)t;
  return {y1, k7, std::sqrt(err / 3.0)};
}

Trajectory::Segment make_segment(double t, double h, const Vec3& y, const Vec3& y1,
                                 const std::array<Vec3, 7>& ks) {
  Trajectory::Segment seg;
  seg.t0 = t;
  seg.h = h;
  const Vec3 dy = y1 - y;
  const Vec3 bspl = h * ks[0] - dy;
  seg.rcont[0] = y;
  seg.rcont[1] = dy;
  seg.rcont[2] = bspl;
  seg.rcont[3] = dy - h * ks[6] - bspl;
  seg.rcont[4] =
      h * (d1 * ks[0] + d3 * ks[2] + d4 * ks[3] + d5 * ks[4] + d6 * ks[5] + d7 * ks[6]);
  return seg;
}

double initial_step_guess(const Field& f, const Vec3& y0, const Vec3& k1, double span,
                          const Tolerances& tol, double posneg) {
  const double d0 = norm(y0), d1n = norm(k1);
  double h = (d0 < 1e-10 || d1n < 1e-10) ? 1e-6 : 0.01 * d0 / d1n;
  h = std::min(h, 0.1 * std::fabs(span));
  // One explicit Euler probe to bound the second derivative.
  const Vec3 y1 = y0 + (posneg * h) * k1;
  const Vec3 k2 = f(y1);
  const double d2 = norm(k2 - k1) / h;
  if (d2 > 1e-15) h = std::min(h, std::pow(0.01 / d2, 1.0 / 5.0));
  (void)tol;
  return std::max(h, 1e-12 * std::fabs(span)) * posneg;
}

bool direction_matches(CrossDirection want, double g_lo, double g_hi) {
  switch (want) {
    case CrossDirection::Up: return g_lo < 0.0 && g_hi > 0.0;
    case CrossDirection::Down: return g_lo > 0.0 && g_hi < 0.0;
    case CrossDirection::Both: return (g_lo < 0.0) != (g_hi < 0.0);
  }
  return false;
}

}  // namespace

Vec3 Trajectory::Segment::eval(double t) const {
  const double th = (t - t0) / h;
  const double th1 = 1.0 - th;
  return rcont[0] +
         th * (rcont[1] + th1 * (rcont[2] + th * (rcont[3] + th1 * rcont[4])));
}

Vec3 Trajectory::eval(double t) const {
  if (segments.empty()) throw DomainError("Trajectory::eval: no dense output stored");
  // Segments are ordered by time (monotone in posneg direction).
  const double posneg = segments.front().h > 0 ? 1.0 : -1.0;
  auto it = std::lower_bound(segments.begin(), segments.end(), t,
                             [posneg](const Segment& s, double tt) {
                               return posneg * (s.t0 + s.h) < posneg * tt;
                             });
  if (it == segments.end()) it = std::prev(segments.end());
  return it->eval(t);
}

Trajectory integrate_field(const Field& f, const Vec3& x0, double t0, double t1,
                           const IntegrateOptions& opts) {
  if (t0 == t1) throw DomainError("integrate: empty time span");
  if (opts.tol.abs <= 0.0 || opts.tol.rel <= 0.0)
    throw DomainError("integrate: tolerances must be positive");

  const double span = t1 - t0;
  const double posneg = span > 0 ? 1.0 : -1.0;
  const double h_min = 1e-14 * std::fabs(span);

  Trajectory traj;
  traj.tol = opts.tol;

  double t = t0;
  Vec3 y = x0;
  Vec3 k1 = f(y);
  if (!finite(k1)) throw NumericalError("integrate: field not finite at start");

  double h = opts.initial_step != 0.0
                 ? std::fabs(opts.initial_step) * posneg
                 : initial_step_guess(f, y, k1, span, opts.tol, posneg);

  if (opts.store_samples) traj.samples.push_back({t, y});

  double g_prev = opts.event ? opts.event->g(y) : 0.0;

  for (long step = 0; step < opts.max_steps; ++step) {
    // Termination checks on the current state.
    if (opts.escape_radius > 0.0 && norm(y) > opts.escape_radius) {
      traj.termination = Termination::Escaped;
      traj.t_end = t;
      traj.state_end = y;
      return traj;
    }
    if ((opts.fixed_point_tol > 0.0 && norm(k1) < opts.fixed_point_tol) ||
        (opts.stop_predicate && opts.stop_predicate(t, y))) {
      traj.termination = Termination::FixedPointConverged;
      traj.t_end = t;
      traj.state_end = y;
      return traj;
    }
    if (posneg * (t - t1) >= 0.0) break;

    if (posneg * (t + 1.01 * h - t1) > 0.0) h = t1 - t;
    if (std::fabs(h) < h_min)
      throw StepSizeUnderflow("integrate: step size underflow at t=" +
                              std::to_string(t));

    std::array<Vec3, 7> ks;
    const StepResult r = dopri5_step(f, t, y, k1, h, opts.tol, ks);

    if (!std::isfinite(r.err) || r.err > 1.0) {
      // Reject: shrink and retry.
      const double fac =
          std::isfinite(r.err) ? std::max(0.2, 0.9 * std::pow(r.err, -0.2)) : 0.2;
      h *= fac;
      continue;
    }

    // Accepted.
    const double t_new = t + h;
    const Vec3 y_new = r.y1;

    // Event localization inside this step.
    if (opts.event) {
      const double g_new = opts.event->g(y_new);
      if (direction_matches(opts.event->direction, g_prev, g_new)) {
        const Trajectory::Segment seg = make_segment(t, h, y, y_new, ks);
        double lo = t, hi = t_new, g_lo = g_prev;
        for (int it = 0; it < 200; ++it) {
          const double mid = 0.5 * (lo + hi);
          const double g_mid = opts.event->g(seg.eval(mid));
          if ((g_mid < 0.0) == (g_lo < 0.0)) {
            lo = mid;
            g_lo = g_mid;
          } else {
            hi = mid;
          }
          if (std::fabs(g_mid) < opts.event_refine_tol &&
              std::fabs(hi - lo) < 1e-13 * std::max(1.0, std::fabs(t_new)))
            break;
        }
        const double t_ev = 0.5 * (lo + hi);
        Vec3 y_ev = seg.eval(t_ev);
        const Vec3 f_ev = f(y_ev);
        const double gdot = dot(opts.event->normal, f_ev);
        const bool armed = std::fabs(t_ev - t0) >= opts.arm_time;
        const bool constraint_ok = !opts.event->constraint || opts.event->constraint(y_ev);
        if (armed && constraint_ok) {
          EventCrossing cr;
          cr.point = y_ev;
          cr.time = t_ev;
          cr.direction = gdot > 0 ? 1 : (gdot < 0 ? -1 : 0);
          cr.transversality = std::fabs(gdot);
          cr.tangential = cr.transversality < opts.tangency_threshold;
          traj.event = cr;
          traj.termination = Termination::Event;
          traj.t_end = t_ev;
          traj.state_end = y_ev;
          if (opts.store_samples) traj.samples.push_back({t_ev, y_ev});
          if (opts.store_dense) traj.segments.push_back(seg);
          return traj;
        }
      }
      g_prev = g_new;
    }

    if (opts.store_dense) traj.segments.push_back(make_segment(t, h, y, y_new, ks));
    t = t_new;
    y = y_new;
    k1 = r.k_last;
    if (opts.store_samples) traj.samples.push_back({t, y});

    const double fac = std::clamp(0.9 * std::pow(std::max(r.err, 1e-10), -0.2), 0.2, 10.0);
    h *= fac;
  }

  traj.termination = Termination::TimeBudget;
  traj.t_end = t;
  traj.state_end = y;
  return traj;
}

Trajectory integrate(const Params& p, const Vec3& x0, double t0, double t1,
                     Tolerances tol, bool store_dense) {
  IntegrateOptions opts;
  opts.tol = tol;
  opts.store_dense = store_dense;
  return integrate_field(rossler_field(p), x0, t0, t1, opts);
}

AdvanceResult advance_to_event_field(const Field& f, const Vec3& x0,
                                     const EventSpec& ev, double t_max,
                                     Tolerances tol, double escape_radius) {
  if (norm(ev.normal) <= 0.0) throw DomainError("advance_to_event: zero normal");
  IntegrateOptions opts;
  opts.tol = tol;
  opts.store_samples = false;
  opts.event = ev;
  opts.escape_radius = escape_radius;
  const Trajectory traj = integrate_field(f, x0, 0.0, t_max, opts);
  AdvanceResult r;
  r.termination = traj.termination;
  r.t_end = traj.t_end;
  r.state_end = traj.state_end;
  if (traj.termination == Termination::Event) {
    r.found = true;
    r.crossing = *traj.event;
  }
  return r;
}

AdvanceResult advance_to_event(const Params& p, const Vec3& x0, const EventSpec& ev,
                               double t_max, Tolerances tol, double escape_radius) {
  return advance_to_event_field(rossler_field(p), x0, ev, t_max, tol, escape_radius);
}

BoundednessVerdict classify_boundedness(const Params& p, const Vec3& x0, double T,
                                        double r_esc, Tolerances tol, bool backward) {
  if (T <= 0.0) throw DomainError("classify_boundedness: T must be positive");
  if (r_esc <= 0.0) throw DomainError("classify_boundedness: escape radius must be positive");
  IntegrateOptions opts;
  opts.tol = tol;
  opts.store_samples = false;
  opts.escape_radius = r_esc;
  const double t1 = backward ? -T : T;
  const Trajectory traj = integrate_field(rossler_field(p), x0, 0.0, t1, opts);
  BoundednessVerdict v;
  v.horizon = T;
  v.radius_used = r_esc;
  if (traj.termination == Termination::Escaped) {
    v.escaped = true;
    v.t_escape = traj.t_end;
  }
  return v;
}

double default_escape_radius(const Params& p) {
  const auto [in, out] = fixed_points(p);
  return 1e3 * std::max(1.0, norm(out.location));
}

}  // namespace rossler
