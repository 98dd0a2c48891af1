#include "rossler/manifolds.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace rossler {

// --- eigen helpers ----------------------------------------------------------

Vec3 real_eigenvector(const Mat3& J, double lambda) {
  Mat3 B = J;
  for (int i = 0; i < 3; ++i) B[i][i] -= lambda;
  // Any two rows of the singular matrix span the orthogonal complement of
  // the kernel; their cross product lies in the kernel.
  const Vec3 r0 = B.row(0), r1 = B.row(1), r2 = B.row(2);
  const Vec3 cands[3] = {cross(r0, r1), cross(r0, r2), cross(r1, r2)};
  Vec3 best = cands[0];
  for (const Vec3& c : cands)
    if (norm(c) > norm(best)) best = c;
  const double n = norm(best);
  if (n < 1e-300) throw NumericalError("real_eigenvector: defective matrix");
  return best / n;
}

std::pair<Vec3, Vec3> complex_pair_plane(const Mat3& J, double rho, double psi) {
  // The invariant plane of rho +- i psi is the kernel of
  // M = (J - rho I)^2 + psi^2 I, a rank-one matrix; its row direction is
  // normal to the plane.
  Mat3 B = J;
  for (int i = 0; i < 3; ++i) B[i][i] -= rho;
  Mat3 M;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k) s += B[i][k] * B[k][j];
      M[i][j] = s + (i == j ? psi * psi : 0.0);
    }
  Vec3 n = M.row(0);
  for (int i = 1; i < 3; ++i)
    if (norm(M.row(i)) > norm(n)) n = M.row(i);
  const double nn = norm(n);
  if (nn < 1e-300) throw NumericalError("complex_pair_plane: degenerate pair");
  n = n / nn;
  // Orthonormal basis of the plane normal to n.
  Vec3 aux = std::fabs(n.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
  Vec3 u = cross(n, aux);
  u = u / norm(u);
  Vec3 v = cross(n, u);
  return {u, v};
}

// --- separatrix tracing -----------------------------------------------------

SeparatrixTrace trace_branch_core(const Field& f, const BranchSpec& b, int sign,
                                  const TraceConfig& cfg) {
  if (cfg.eps <= 0.0) throw DomainError("trace_branch_core: eps must be positive");

  SeparatrixTrace tr;
  tr.seed = b.fixed_point + (sign * cfg.eps) * b.eigenvector;
  tr.seed_sign = sign;

  IntegrateOptions opts;
  opts.tol = cfg.tol;
  opts.store_samples = false;
  opts.escape_radius = cfg.escape_radius;
  opts.event = cfg.section;
  opts.arm_time = cfg.arm_time;
  if (cfg.other_fixed_point) {
    const Vec3 target = *cfg.other_fixed_point;
    const double tol = cfg.fp_converge_tol;
    opts.stop_predicate = [target, tol](double, const Vec3& y) {
      return norm(y - target) < tol;
    };
  }

  Vec3 cur = tr.seed;
  double t_used = 0.0;
  while (t_used < cfg.t_max) {
    const double leg = b.time_dir * (cfg.t_max - t_used);
    const Trajectory traj = integrate_field(f, cur, 0.0, leg, opts);
    t_used += std::fabs(traj.t_end);
    cur = traj.state_end;
    if (traj.termination == Termination::Event) {
      const EventCrossing& c = *traj.event;
      Crossing cr;
      cr.point = c.point;
      cr.time = t_used;
      cr.side = SectionSide::U;
      cr.transversality = c.transversality;
      cr.tangential = c.tangential;
      tr.crossings.push_back(cr);
      continue;
    }
    if (traj.termination == Termination::Escaped) {
      tr.end = TraceEnd::Escaped;
      tr.t_end = t_used;
      tr.state_end = cur;
      return tr;
    }
    if (traj.termination == Termination::FixedPointConverged) {
      tr.end = TraceEnd::ConvergedToFixedPoint;
      tr.t_end = t_used;
      tr.state_end = cur;
      return tr;
    }
    break;  // time budget
  }
  tr.end = TraceEnd::TimeBudget;
  tr.t_end = t_used;
  tr.state_end = cur;
  return tr;
}

namespace {

struct BranchSetup {
  BranchSpec spec;
  TraceConfig cfg;
};

BranchSetup rossler_branch_setup(const Params& p, bool out_point, double eps,
                                 double t_max, Tolerances tol) {
  const auto [in, out] = fixed_points(p);
  const FixedPointInfo& fp = out_point ? out : in;
  const FixedPointInfo& other = out_point ? in : out;
  const SpectralInfo si =
      classify_fixed_point(p, out_point ? FixedPointKind::Out : FixedPointKind::In);
  if (!si.saddle_focus)
    throw NotSaddleFocus("trace_separatrix: fixed point is not a saddle-focus");

  BranchSetup s;
  s.spec.fixed_point = fp.location;
  s.spec.eigenvector = real_eigenvector(jacobian(p, fp.location), si.gamma);
  // The 1D manifold of P_Out is unstable (gamma > 0): follow the flow.
  // The 1D manifold of P_In is stable (gamma < 0): go backward.
  s.spec.time_dir = out_point ? 1.0 : -1.0;

  const double scale = std::max(1.0, norm(out.location - in.location));
  s.cfg.eps = eps > 0.0 ? eps : 1e-5 * scale;
  s.cfg.t_max = t_max;
  s.cfg.tol = tol;
  s.cfg.escape_radius = default_escape_radius(p);
  s.cfg.other_fixed_point = other.location;
  s.cfg.fp_converge_tol = 1e-6;

  const SectionGeometry geom{p.a};
  EventSpec ev;
  ev.normal = geom.normal();
  ev.offset = 0.0;
  ev.direction = CrossDirection::Down;
  ev.constraint = [geom](const Vec3& v) { return geom.side_value(v) > 0.0; };
  s.cfg.section = ev;
  return s;
}

// Delta is the non-escaping branch; when both escape, the one that stays
// bounded longer.  When neither escapes, the more recurrent one.
bool first_is_delta(const SeparatrixTrace& a, const SeparatrixTrace& b) {
  const bool a_esc = a.end == TraceEnd::Escaped;
  const bool b_esc = b.end == TraceEnd::Escaped;
  if (a_esc != b_esc) return b_esc;
  if (a_esc && b_esc) return a.t_end >= b.t_end;
  if (a.crossings.size() != b.crossings.size())
    return a.crossings.size() > b.crossings.size();
  return a.t_end >= b.t_end;
}

}  // namespace

SeparatrixTrace trace_separatrix(const Params& p, SeparatrixBranch branch, double eps,
                                 double t_max, Tolerances tol) {
  const bool out_point =
      branch == SeparatrixBranch::DeltaOut || branch == SeparatrixBranch::GammaOut;
  const bool want_delta =
      branch == SeparatrixBranch::DeltaOut || branch == SeparatrixBranch::DeltaIn;

  const BranchSetup s = rossler_branch_setup(p, out_point, eps, t_max, tol);
  SeparatrixTrace plus = trace_branch_core(rossler_field(p), s.spec, +1, s.cfg);
  SeparatrixTrace minus = trace_branch_core(rossler_field(p), s.spec, -1, s.cfg);

  SeparatrixTrace& delta = first_is_delta(plus, minus) ? plus : minus;
  SeparatrixTrace& gamma = first_is_delta(plus, minus) ? minus : plus;
  SeparatrixTrace& chosen = want_delta ? delta : gamma;
  chosen.branch = branch;
  return chosen;
}

// --- flow kneading ----------------------------------------------------------

FlowKneading kneading_from_trace(const std::vector<double>& xs, bool converged_to_pin,
                                 const Partition& part, int n) {
  FlowKneading out;
  std::vector<uint8_t> w;
  for (double x : xs) {
    if (int(w.size()) >= n) break;
    const auto sym = part.symbol(x);
    if (!sym) {
      out.ambiguous = true;
      break;
    }
    w.push_back(*sym);
  }
  if (!out.ambiguous && int(w.size()) < n) {
    if (converged_to_pin) {
      // Terminating traces are padded by the P_In convention; P_In lies
      // in D_1, so the padding symbol is 1.
      while (int(w.size()) < n) w.push_back(1);
    } else {
      out.truncated = true;
    }
  }
  out.word = SymbolSequence(std::move(w));
  return out;
}

FlowKneading flow_kneading(const Params& p, const Partition& part, int n, double eps,
                           double t_max, Tolerances tol) {
  const SeparatrixTrace tr =
      trace_separatrix(p, SeparatrixBranch::DeltaOut, eps, t_max, tol);
  if (tr.crossings.empty())
    throw EmptyTrace("flow_kneading: Delta_Out produced no section crossing");
  std::vector<double> xs;
  xs.reserve(tr.crossings.size());
  for (const Crossing& c : tr.crossings) xs.push_back(c.point.x);

  const auto [in, out_fp] = fixed_points(p);
  const bool to_pin = tr.end == TraceEnd::ConvergedToFixedPoint &&
                      norm(tr.state_end - in.location) < 1e-3;
  return kneading_from_trace(xs, to_pin, part, n);
}

// --- manifold fronts --------------------------------------------------------

namespace {

// Advances one ring point to the common generation time, recording the
// first target-plane hit on the way.
void advect_point(const Field& f, RingPoint& pt, double t_from, double t_to,
                  const FrontConfig& cfg) {
  if (pt.escaped) return;
  double t = t_from;
  Vec3 cur = pt.pos;
  while (std::fabs(t_to - t) > 1e-12) {
    IntegrateOptions opts;
    opts.tol = cfg.tol;
    opts.store_samples = false;
    opts.escape_radius = cfg.r_max;
    if (!pt.hit) {
      opts.event = cfg.target;
      opts.arm_time = 0.0;
    }
    const Trajectory traj = integrate_field(f, cur, 0.0, t_to - t, opts);
    t += traj.t_end;
    cur = traj.state_end;
    if (traj.termination == Termination::Event) {
      pt.hit = FrontHit{traj.event->point, t};
      continue;  // resume the remainder of the leg
    }
    if (traj.termination == Termination::Escaped) {
      pt.escaped = true;
      break;
    }
    break;  // leg complete
  }
  pt.pos = cur;
}

// Spacing between ring neighbors, ignoring frozen escaped points.
double pair_spacing(const RingPoint& a, const RingPoint& b) {
  if (a.escaped || b.escaped) return 0.0;
  return norm(a.pos - b.pos);
}

}  // namespace

FrontResult grow_front_core(const Field& f, const std::function<Vec3(double)>& seed_fn,
                            const FrontConfig& cfg, int initial_points) {
  if (initial_points < 4) throw DomainError("grow_front_core: need >= 4 seed points");
  FrontResult result;

  ManifoldFront front;
  front.generation = 0;
  front.t = 0.0;
  front.ring.reserve(initial_points);
  for (int i = 0; i < initial_points; ++i) {
    RingPoint pt;
    pt.theta = 2.0 * M_PI * i / initial_points;
    pt.pos = seed_fn(pt.theta);
    front.ring.push_back(pt);
  }
  result.history.push_back(front);

  const double dt = cfg.dt_generation * cfg.time_dir;

  while (std::fabs(front.t) < cfg.t_max) {
    const double t_next = front.t + dt;
    for (RingPoint& pt : front.ring) advect_point(f, pt, front.t, t_next, cfg);

    // Refinement: insert fresh seeds at intermediate theta and advect
    // them to the current generation time.
    bool inserted = true;
    while (inserted) {
      inserted = false;
      std::vector<RingPoint> refined;
      refined.reserve(front.ring.size() + 8);
      const std::size_t n = front.ring.size();
      for (std::size_t i = 0; i < n; ++i) {
        const RingPoint& a = front.ring[i];
        const RingPoint& b = front.ring[(i + 1) % n];
        refined.push_back(a);
        const double dtheta =
            (i + 1 == n) ? (2.0 * M_PI - a.theta + b.theta) : (b.theta - a.theta);
        if (pair_spacing(a, b) > cfg.h_max && dtheta > 1e-9) {
          RingPoint mid;
          mid.theta = a.theta + dtheta / 2.0;
          mid.pos = seed_fn(mid.theta);
          advect_point(f, mid, 0.0, t_next, cfg);
          refined.push_back(mid);
          inserted = true;
        }
      }
      front.ring = std::move(refined);
      if (int(front.ring.size()) > cfg.max_points)
        throw FrontBlowup("grow_front_core: refinement exceeded the point budget");
    }

    front.t = t_next;
    ++front.generation;
    result.history.push_back(front);

    bool none_active = true, punctured = true;
    for (const RingPoint& pt : front.ring) {
      if (!pt.hit && !pt.escaped) none_active = false;
      if (!pt.hit) punctured = false;
    }
    if (none_active) {
      result.stop = punctured ? FrontStop::FullPuncture : FrontStop::Stalled;
      return result;
    }
  }
  result.stop = FrontStop::TimeBudget;
  return result;
}

FrontResult grow_stable_surface(const Params& p, const StableSurfaceConfig& cfg) {
  const SpectralInfo so = classify_fixed_point(p, FixedPointKind::Out);
  if (!so.saddle_focus || so.rho >= 0.0)
    throw NotSaddleFocus("grow_stable_surface: P_Out has no complex stable pair");

  const auto [in, out] = fixed_points(p);
  const double d = std::max(1e-6, norm(out.location - in.location));
  const double r0 = cfg.r0 > 0.0 ? cfg.r0 : 1e-3 * d;
  const double h_max = cfg.h_max > 0.0 ? cfg.h_max : 0.05 * d;
  const double r_max = cfg.r_max > 0.0 ? cfg.r_max : 10.0 * d;

  const auto [u, v] = complex_pair_plane(jacobian(p, out.location), so.rho, so.psi);
  const Vec3 center = out.location;
  const auto seed_fn = [center, u, v, r0](double theta) {
    return center + r0 * (std::cos(theta) * u + std::sin(theta) * v);
  };

  FrontConfig fc;
  fc.r0 = r0;
  fc.h_max = h_max;
  fc.dt_generation = cfg.dt_generation;
  fc.t_max = cfg.t_back_max;
  fc.r_max = r_max;
  fc.max_points = cfg.max_points;
  fc.time_dir = -1.0;
  fc.tol = cfg.tol;
  fc.target.normal = {0.0, 0.0, 1.0};
  fc.target.offset = p.b;  // z + b = 0
  fc.target.direction = CrossDirection::Both;

  return grow_front_core(rossler_field(p), seed_fn, fc);
}

CriterionVerdict attractor_verdict(const FrontResult& front, double gap_tol,
                                   double r_max) {
  CriterionVerdict v;
  if (front.history.empty()) return v;
  const ManifoldFront& last = front.history.back();

  bool any_escaped_without_hit = false;
  for (const RingPoint& pt : last.ring) {
    if (pt.hit) v.delta_polyline.push_back(pt.hit->point);
    if (pt.escaped && !pt.hit) any_escaped_without_hit = true;
  }
  for (const Vec3& q : v.delta_polyline)
    v.radius_max = std::max(v.radius_max, norm(q));

  if (any_escaped_without_hit) {
    v.status = CriterionStatus::EscapedFront;
    return v;
  }
  if (v.delta_polyline.size() < last.ring.size() || v.delta_polyline.size() < 3) {
    v.status = CriterionStatus::Inconclusive;  // time budget ran out
    return v;
  }
  const std::size_t n = v.delta_polyline.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double gap = norm(v.delta_polyline[(i + 1) % n] - v.delta_polyline[i]);
    v.gap_max = std::max(v.gap_max, gap);
  }
  v.status = (v.gap_max < gap_tol && v.radius_max < r_max)
                 ? CriterionStatus::SatisfiedBounded
                 : CriterionStatus::Inconclusive;
  return v;
}

CriterionVerdict attractor_criterion(const Params& p, const CriterionConfig& cfg) {
  const auto [in, out] = fixed_points(p);
  const double d = std::max(1e-6, norm(out.location - in.location));
  const double h_max = cfg.surface.h_max > 0.0 ? cfg.surface.h_max : 0.05 * d;
  const double gap_tol = cfg.gap_tol > 0.0 ? cfg.gap_tol : 2.0 * h_max;
  const double r_max = cfg.surface.r_max > 0.0 ? cfg.surface.r_max : 10.0 * d;
  const FrontResult front = grow_stable_surface(p, cfg.surface);
  return attractor_verdict(front, gap_tol, r_max);
}

// --- repeller region --------------------------------------------------------

double repeller_flux1_closed(const Params& p, double x, double z) {
  return x / p.a - z;
}

double repeller_flux2_closed(const Params& p, double x, double z) {
  return x * (1.0 + p.b) + z * (x - p.a - p.c);
}

double repeller_flux3_closed(const Params& p, double x) {
  return -(x + p.a * (p.b + 1.0));
}

RepellerReport repeller_membership(const Params& p, const Vec3& s) {
  RepellerReport rep;
  const Vec3 f = eval_field(p, s);
  rep.in_region = f.y < 0.0 && f.x > 0.0 && s.y > p.b + 1.0;

  rep.face_points[0] = {s.x, -s.x / p.a, s.z};  // onto Y
  rep.face_points[1] = {s.x, -s.z, s.z};        // onto {y = -z}
  rep.face_points[2] = {s.x, p.b + 1.0, s.z};   // onto {y = b+1}
  rep.face_fluxes[0] = dot(eval_field(p, rep.face_points[0]), Vec3{1.0, p.a, 0.0});
  rep.face_fluxes[1] = dot(eval_field(p, rep.face_points[1]), Vec3{0.0, 1.0, 1.0});
  rep.face_fluxes[2] = dot(eval_field(p, rep.face_points[2]), Vec3{0.0, -1.0, 0.0});
  return rep;
}

// --- trapping certification -------------------------------------------------

TrappingReport certify_trapping_field(const Field& f, const std::vector<Triangle>& surface,
                                      int n_samples, double margin, uint64_t rng_seed) {
  if (surface.empty()) throw DomainError("certify_trapping: empty surface");
  if (n_samples < 1) throw DomainError("certify_trapping: n_samples must be >= 1");

  std::mt19937_64 rng(rng_seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  TrappingReport rep;
  rep.min_flux = 1e300;
  rep.max_flux = -1e300;
  long inward = 0;

  for (const Triangle& tri : surface) {
    const Vec3 e1 = tri.b - tri.a, e2 = tri.c - tri.a;
    Vec3 n = cross(e1, e2);
    const double nn = norm(n);
    const double edge = std::max({norm(e1), norm(e2), norm(tri.c - tri.b)});
    if (nn < 1e-14 * std::max(1.0, edge * edge))
      throw DegenerateTriangle("certify_trapping: zero-area triangle");
    n = n / nn;

    for (int s = 0; s < n_samples; ++s) {
      double u, v;
      if (s == 0) {
        u = v = 1.0 / 3.0;  // centroid first
      } else {
        u = unit(rng);
        v = unit(rng);
        if (u + v > 1.0) {
          u = 1.0 - u;
          v = 1.0 - v;
        }
      }
      const Vec3 q = tri.a + u * e1 + v * e2;
      const double flux = dot(f(q), n);
      rep.min_flux = std::min(rep.min_flux, flux);
      rep.max_flux = std::max(rep.max_flux, flux);
      if (flux < 0.0) ++inward;
      ++rep.samples;
    }
  }
  rep.inward_fraction = double(inward) / double(rep.samples);
  rep.certified = rep.max_flux < -margin;
  return rep;
}

TrappingReport certify_trapping(const Params& p, const std::vector<Triangle>& surface,
                                int n_samples, double margin, uint64_t rng_seed) {
  return certify_trapping_field(rossler_field(p), surface, n_samples, margin, rng_seed);
}

// --- trefoil defect ---------------------------------------------------------

std::pair<double, bool> crossing_set_distance(const std::vector<Crossing>& a,
                                              const std::vector<Crossing>& b,
                                              double tangency_threshold) {
  if (a.empty() || b.empty())
    throw EmptyTrace("crossing_set_distance: empty crossing set");
  double best = 1e300;
  const Crossing* arg = nullptr;
  for (const Crossing& ca : a)
    for (const Crossing& cb : b) {
      const double d = norm(ca.point - cb.point);
      if (d < best) {
        best = d;
        arg = &ca;
      }
    }
  return {best, arg->transversality >= tangency_threshold};
}

double hausdorff_distance(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
  if (a.empty() || b.empty())
    throw EmptyTrace("hausdorff_distance: empty point set");
  const auto one_sided = [](const std::vector<Vec3>& from, const std::vector<Vec3>& to) {
    double worst = 0.0;
    for (const Vec3& p : from) {
      double best = 1e300;
      for (const Vec3& q : to) best = std::min(best, norm(p - q));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(one_sided(a, b), one_sided(b, a));
}

TrefoilDefect trefoil_defect(const Params& p, const TrefoilConfig& cfg) {
  const SpectralInfo si = classify_fixed_point(p, FixedPointKind::In);
  const SpectralInfo so = classify_fixed_point(p, FixedPointKind::Out);
  if (!si.saddle_focus || !so.saddle_focus)
    throw NotSaddleFocus("trefoil_defect: both fixed points must be saddle-foci");

  TrefoilDefect out;
  const SeparatrixTrace d_out =
      trace_separatrix(p, SeparatrixBranch::DeltaOut, cfg.eps, cfg.t_max, cfg.tol);
  const SeparatrixTrace d_in =
      trace_separatrix(p, SeparatrixBranch::DeltaIn, cfg.eps, cfg.t_max, cfg.tol);
  const auto [dist, transverse] = crossing_set_distance(d_out.crossings, d_in.crossings);
  out.d_hetero = dist;
  out.transverse_P0 = transverse;

  if (!cfg.compute_coincide) return out;

  // W^u_In (forward) and W^s_Out (backward) fronts, both traced on Y.
  const auto [in_fp, out_fp] = fixed_points(p);
  const double d = std::max(1e-6, norm(out_fp.location - in_fp.location));
  const SectionGeometry geom{p.a};

  FrontConfig fc;
  fc.r0 = cfg.front.r0 > 0.0 ? cfg.front.r0 : 1e-3 * d;
  fc.h_max = cfg.front.h_max > 0.0 ? cfg.front.h_max : 0.05 * d;
  fc.dt_generation = cfg.front.dt_generation;
  fc.t_max = cfg.front.t_back_max;
  fc.r_max = cfg.front.r_max > 0.0 ? cfg.front.r_max : 10.0 * d;
  fc.max_points = cfg.front.max_points;
  fc.tol = cfg.front.tol;
  fc.target.normal = geom.normal();
  fc.target.offset = 0.0;
  fc.target.direction = CrossDirection::Both;

  const auto collect_hits = [](const FrontResult& fr) {
    std::vector<Vec3> hits;
    for (const RingPoint& pt : fr.history.back().ring)
      if (pt.hit) hits.push_back(pt.hit->point);
    return hits;
  };

  // Unstable plane of P_In.
  {
    const auto [u, v] = complex_pair_plane(jacobian(p, in_fp.location), si.rho, si.psi);
    const Vec3 center = in_fp.location;
    const double r0 = fc.r0;
    fc.time_dir = +1.0;
    const FrontResult fr = grow_front_core(
        rossler_field(p),
        [center, u, v, r0](double th) {
          return center + r0 * (std::cos(th) * u + std::sin(th) * v);
        },
        fc);
    const auto hits_u = collect_hits(fr);

    fc.time_dir = -1.0;
    const auto [us, vs] = complex_pair_plane(jacobian(p, out_fp.location), so.rho, so.psi);
    const Vec3 center_s = out_fp.location;
    const FrontResult fs = grow_front_core(
        rossler_field(p),
        [center_s, us, vs, r0](double th) {
          return center_s + r0 * (std::cos(th) * us + std::sin(th) * vs);
        },
        fc);
    const auto hits_s = collect_hits(fs);
    if (!hits_u.empty() && !hits_s.empty()) {
      out.d_coincide = hausdorff_distance(hits_u, hits_s);
      out.coincide_computed = true;
    }
  }
  return out;
}

}  // namespace rossler
