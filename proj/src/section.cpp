#include "rossler/section.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace rossler {

RosslerSection::RosslerSection(const Params& p, Tolerances tol, double t_max,
                               double r_esc)
    : p_(p), geom_{p.a}, tol_(tol), t_max_(t_max),
      r_esc_(r_esc > 0.0 ? r_esc : default_escape_radius(p)) {
  if (p.a == 0.0) throw DegenerateParams("RosslerSection: a == 0");
}

ReturnResult RosslerSection::first_return(const Vec3& u) const {
  ReturnResult res;

  // P_In is a fixed point of the flow on the closure of U_v; its return
  // is itself (the (1,1,1,...) witness).
  if (norm(u) < fixed_point_snap) {
    res.status = ReturnStatus::Crossed;
    res.crossing = {Vec3{0, 0, 0}, 0.0, SectionSide::U, 0.0, true};
    return res;
  }

  if (std::fabs(geom_.section_eq(u)) > 1e-6 * std::max(1.0, norm(u)))
    throw DomainError("first_return: seed not on the section Y");

  EventSpec ev;
  ev.normal = geom_.normal();
  ev.offset = 0.0;
  ev.direction = CrossDirection::Down;  // U_v crossings have F.N < 0
  const SectionGeometry geom = geom_;
  ev.constraint = [geom](const Vec3& s) { return geom.side_value(s) > 0.0; };

  IntegrateOptions opts;
  opts.tol = tol_;
  opts.store_samples = false;
  opts.event = ev;
  opts.escape_radius = r_esc_;
  opts.arm_time = 1e-6;

  const Trajectory traj = integrate_field(rossler_field(p_), u, 0.0, t_max_, opts);
  res.t_end = traj.t_end;
  switch (traj.termination) {
    case Termination::Event: {
      const EventCrossing& c = *traj.event;
      res.status = ReturnStatus::Crossed;
      res.crossing = {c.point, c.time,
                      geom_.on_upper(c.point) ? SectionSide::U : SectionSide::L,
                      c.transversality, c.tangential};
      break;
    }
    case Termination::Escaped:
      res.status = ReturnStatus::Escaped;
      break;
    default:
      res.status = ReturnStatus::NoReturn;
      break;
  }
  return res;
}

std::array<double, 2> RosslerSection::chart(const Vec3& s) const {
  return {s.x, s.z};
}

Vec3 RosslerSection::unchart(const std::array<double, 2>& w) const {
  return {w[0], -w[0] / p_.a, w[1]};
}

double RosslerSection::scale() const {
  const auto [in, out] = fixed_points(p_);
  return std::max(1.0, norm(out.location));
}

SampleRun return_samples(const SectionSystem& sys, const Vec3& seed, int n, int burn) {
  if (n < 0) throw DomainError("return_samples: n must be >= 0");
  SampleRun run;
  Vec3 u = seed;
  for (int i = 0; i < n + burn; ++i) {
    const ReturnResult r = sys.first_return(u);
    if (r.status != ReturnStatus::Crossed) {
      run.complete = false;
      run.stop_reason = r.status;
      return run;
    }
    if (i >= burn) run.crossings.push_back(r.crossing);
    u = r.crossing.point;
  }
  return run;
}

std::optional<Partition> estimate_fold(const std::vector<Crossing>& samples,
                                       double d1_reference_x) {
  if (samples.size() < 50)
    throw DomainError("estimate_fold: need at least 50 samples");

  // Successor pairs (x_n, x_{n+1}) sorted by abscissa.
  std::vector<std::pair<double, double>> pairs;
  pairs.reserve(samples.size() - 1);
  for (std::size_t i = 0; i + 1 < samples.size(); ++i)
    pairs.emplace_back(samples[i].point.x, samples[i + 1].point.x);
  std::sort(pairs.begin(), pairs.end());

  const double x_lo = pairs.front().first, x_hi = pairs.back().first;
  const double span = x_hi - x_lo;
  if (span < 1e-12 * std::max(1.0, std::fabs(x_hi))) return std::nullopt;

  // Monotone successor relation means no fold in range.
  bool increasing = true, decreasing = true;
  for (std::size_t i = 0; i + 1 < pairs.size(); ++i) {
    if (pairs[i + 1].second < pairs[i].second) increasing = false;
    if (pairs[i + 1].second > pairs[i].second) decreasing = false;
  }
  if (increasing || decreasing) return std::nullopt;

  // Extremal successor values; the fold is the interior one.
  std::size_t i_max = 0, i_min = 0;
  for (std::size_t i = 1; i < pairs.size(); ++i) {
    if (pairs[i].second > pairs[i_max].second) i_max = i;
    if (pairs[i].second < pairs[i_min].second) i_min = i;
  }
  const auto interior = [&](std::size_t i) {
    const double margin = 0.02 * span;
    return pairs[i].first > x_lo + margin && pairs[i].first < x_hi - margin;
  };
  std::size_t i_ext;
  if (interior(i_max) && !interior(i_min))
    i_ext = i_max;
  else if (interior(i_min) && !interior(i_max))
    i_ext = i_min;
  else if (interior(i_max) && interior(i_min)) {
    // Both interior (noisy data): take the more prominent one.
    const double edge = 0.5 * (pairs.front().second + pairs.back().second);
    i_ext = std::fabs(pairs[i_max].second - edge) >= std::fabs(pairs[i_min].second - edge)
                ? i_max
                : i_min;
  } else {
    return std::nullopt;
  }

  // Local quadratic least-squares around the extremal abscissa, in
  // centered coordinates (keeps the fit affine-equivariant).
  const std::size_t window = std::max<std::size_t>(7, pairs.size() / 25);
  const std::size_t lo = i_ext >= window / 2 ? i_ext - window / 2 : 0;
  const std::size_t hi = std::min(pairs.size(), lo + window);
  const double x_center = pairs[i_ext].first;

  double s0 = 0, s1 = 0, s2 = 0, s3 = 0, s4 = 0, b0 = 0, b1 = 0, b2 = 0;
  for (std::size_t i = lo; i < hi; ++i) {
    const double u = pairs[i].first - x_center;
    const double y = pairs[i].second;
    const double u2 = u * u;
    s0 += 1;
    s1 += u;
    s2 += u2;
    s3 += u2 * u;
    s4 += u2 * u2;
    b0 += y;
    b1 += u * y;
    b2 += u2 * y;
  }
  // Solve the 3x3 normal equations for y = c0 + c1 u + c2 u^2.
  const double m[3][4] = {{s0, s1, s2, b0}, {s1, s2, s3, b1}, {s2, s3, s4, b2}};
  double a[3][4];
  std::copy(&m[0][0], &m[0][0] + 12, &a[0][0]);
  for (int col = 0; col < 3; ++col) {
    int piv = col;
    for (int r = col + 1; r < 3; ++r)
      if (std::fabs(a[r][col]) > std::fabs(a[piv][col])) piv = r;
    std::swap(a[col], a[piv]);
    if (std::fabs(a[col][col]) < 1e-300) return std::nullopt;
    for (int r = 0; r < 3; ++r) {
      if (r == col) continue;
      const double f = a[r][col] / a[col][col];
      for (int cc = col; cc < 4; ++cc) a[r][cc] -= f * a[col][cc];
    }
  }
  const double c1 = a[1][3] / a[1][1];
  const double c2 = a[2][3] / a[2][2];
  if (std::fabs(c2) * span * span < 1e-12 * std::max(1.0, std::fabs(b0 / s0)))
    return std::nullopt;

  const double vertex = x_center - c1 / (2.0 * c2);
  if (vertex < x_lo - 0.1 * span || vertex > x_hi + 0.1 * span) return std::nullopt;

  Partition part;
  part.fold_x = vertex;
  part.d1_reference_x = d1_reference_x;
  return part;
}

ItineraryResult itinerary(const SectionSystem& sys, const Vec3& u, int n,
                          const Partition& part) {
  ItineraryResult res;
  std::vector<uint8_t> word;
  Vec3 cur = u;
  for (int i = 0; i < n; ++i) {
    const auto sym = part.symbol(sys.partition_coordinate(cur));
    if (!sym) {
      res.stop = ItineraryStop::Ambiguous;
      break;
    }
    word.push_back(*sym);
    if (i + 1 == n) break;
    const ReturnResult r = sys.first_return(cur);
    if (r.status != ReturnStatus::Crossed) {
      res.stop = r.status == ReturnStatus::Escaped ? ItineraryStop::Escaped
                                                   : ItineraryStop::NoReturn;
      break;
    }
    cur = r.crossing.point;
  }
  res.word = SymbolSequence(std::move(word));
  return res;
}

namespace {

struct MapEval {
  std::array<double, 2> w;
  std::vector<Crossing> crossings;
  std::vector<double> times;
  bool ok = false;
};

MapEval eval_return_k(const SectionSystem& sys, const std::array<double, 2>& w, int k) {
  MapEval out;
  Vec3 cur = sys.unchart(w);
  for (int i = 0; i < k; ++i) {
    const ReturnResult r = sys.first_return(cur);
    if (r.status != ReturnStatus::Crossed) return out;
    out.crossings.push_back(r.crossing);
    out.times.push_back(r.crossing.time);
    cur = r.crossing.point;
  }
  out.w = sys.chart(cur);
  out.ok = true;
  return out;
}

double dist2(const std::array<double, 2>& a, const std::array<double, 2>& b) {
  return std::hypot(a[0] - b[0], a[1] - b[1]);
}

}  // namespace

PeriodicOrbit find_periodic_orbit(const SectionSystem& sys, const Vec3& guess, int k,
                                  const NewtonOptions& opts) {
  if (k < 1) throw DomainError("find_periodic_orbit: k must be >= 1");

  // The pin witness is a fixed point of the return map by convention.
  const Vec3 pin = sys.pin_witness();
  if (norm(guess - pin) < 1e-9) {
    PeriodicOrbit orbit;
    orbit.points = {{pin, 0.0, SectionSide::U, 0.0, true}};
    orbit.k = 1;
    orbit.return_times = {0.0};
    orbit.residual = 0.0;
    return orbit;
  }

  const double h = opts.fd_step_rel * sys.scale();
  std::array<double, 2> w = sys.chart(guess);

  MapEval cur = eval_return_k(sys, w, k);
  if (!cur.ok) throw NoConvergence("find_periodic_orbit: return map undefined at guess");
  double res_norm = dist2(cur.w, w);

  for (int iter = 0; iter < opts.max_iterations && res_norm >= opts.residual_tol;
       ++iter) {
    // Central-difference Jacobian of R(w) = f^k(w) - w.
    double J[2][2];
    for (int j = 0; j < 2; ++j) {
      std::array<double, 2> wp = w, wm = w;
      wp[j] += h;
      wm[j] -= h;
      const MapEval ep = eval_return_k(sys, wp, k);
      const MapEval em = eval_return_k(sys, wm, k);
      if (!ep.ok || !em.ok)
        throw NoConvergence("find_periodic_orbit: return map undefined near iterate");
      for (int i = 0; i < 2; ++i)
        J[i][j] = (ep.w[i] - em.w[i]) / (2.0 * h) - (i == j ? 1.0 : 0.0);
    }
    const double R0 = cur.w[0] - w[0], R1 = cur.w[1] - w[1];
    const double det = J[0][0] * J[1][1] - J[0][1] * J[1][0];
    if (std::fabs(det) < 1e-300)
      throw NoConvergence("find_periodic_orbit: singular Jacobian");
    double dw0 = -(J[1][1] * R0 - J[0][1] * R1) / det;
    double dw1 = -(-J[1][0] * R0 + J[0][0] * R1) / det;

    // Damped update: halve the step while the residual worsens.
    bool improved = false;
    for (int half = 0; half < 5; ++half) {
      const std::array<double, 2> w_try = {w[0] + dw0, w[1] + dw1};
      const MapEval e_try = eval_return_k(sys, w_try, k);
      if (e_try.ok) {
        const double res_try = dist2(e_try.w, w_try);
        if (res_try < res_norm || res_try < opts.residual_tol) {
          w = w_try;
          cur = e_try;
          res_norm = res_try;
          improved = true;
          break;
        }
      }
      dw0 *= 0.5;
      dw1 *= 0.5;
    }
    if (!improved) throw NoConvergence("find_periodic_orbit: Newton stalled");
  }
  if (res_norm >= opts.residual_tol)
    throw NoConvergence("find_periodic_orbit: no convergence in iteration budget");

  // Minimality: a proper divisor m of k with f^m(x) = x wins.
  for (int m = 1; m < k; ++m) {
    if (k % m != 0) continue;
    const MapEval em = eval_return_k(sys, w, m);
    if (em.ok && dist2(em.w, w) < opts.min_point_separation)
      return find_periodic_orbit(sys, sys.unchart(w), m, opts);
  }

  PeriodicOrbit orbit;
  orbit.k = k;
  orbit.residual = res_norm;
  orbit.return_times = cur.times;
  orbit.points.reserve(k);
  // Points in orbit order starting from the refined seed.
  {
    Vec3 s = sys.unchart(w);
    const double tv = 0.0;
    (void)tv;
    orbit.points.push_back({s, 0.0, SectionSide::U, 0.0, false});
    for (int i = 0; i + 1 < k; ++i) orbit.points.push_back(cur.crossings[i]);
    // Transversality of the seed point comes from the closing crossing.
    if (!cur.crossings.empty()) {
      orbit.points[0].transversality = cur.crossings.back().transversality;
      orbit.points[0].tangential = cur.crossings.back().tangential;
      orbit.points[0].side = cur.crossings.back().side;
    }
  }

  // Multipliers from the finite-difference Jacobian of f^k at the orbit.
  {
    double J[2][2];
    bool ok = true;
    for (int j = 0; j < 2 && ok; ++j) {
      std::array<double, 2> wp = w, wm = w;
      wp[j] += h;
      wm[j] -= h;
      const MapEval ep = eval_return_k(sys, wp, k);
      const MapEval em = eval_return_k(sys, wm, k);
      ok = ep.ok && em.ok;
      if (ok)
        for (int i = 0; i < 2; ++i) J[i][j] = (ep.w[i] - em.w[i]) / (2.0 * h);
    }
    if (ok) {
      const double tr = J[0][0] + J[1][1];
      const double det = J[0][0] * J[1][1] - J[0][1] * J[1][0];
      const double disc = tr * tr - 4.0 * det;
      if (disc >= 0.0) {
        const double sq = std::sqrt(disc);
        orbit.multipliers = {{(tr - sq) / 2.0, (tr + sq) / 2.0}};
      }
    }
  }
  return orbit;
}

namespace {

bool same_orbit(const PeriodicOrbit& a, const PeriodicOrbit& b, double tol) {
  if (a.k != b.k) return false;
  // Compare as point sets: every point of a has a close point in b.
  for (const Crossing& ca : a.points) {
    double best = 1e300;
    for (const Crossing& cb : b.points) best = std::min(best, norm(ca.point - cb.point));
    if (best > tol) return false;
  }
  return true;
}

std::optional<SymbolSequence> orbit_word(const SectionSystem& sys,
                                         const PeriodicOrbit& orbit,
                                         const Partition& part) {
  std::vector<uint8_t> w;
  for (const Crossing& c : orbit.points) {
    const auto sym = part.symbol(sys.partition_coordinate(c.point));
    if (!sym) return std::nullopt;
    w.push_back(*sym);
  }
  return SymbolSequence::periodic(std::move(w)).canonical_periodic();
}

}  // namespace

PerSet estimate_per_v(const SectionSystem& sys, const PerScanConfig& cfg) {
  PerSet out;

  // The (1,1,1,...) witness at the pin point is always present.
  {
    PerEntry pin_entry;
    pin_entry.word = SymbolSequence::periodic({1});
    pin_entry.orbit.points = {{sys.pin_witness(), 0.0, SectionSide::U, 0.0, true}};
    pin_entry.orbit.k = 1;
    pin_entry.orbit.return_times = {0.0};
    out.entries.push_back(std::move(pin_entry));
  }
  if (cfg.budget <= 0) return out;

  int evals_used = 0;
  const int n_samples = std::max(0, std::min(cfg.budget / 2, 4000));

  const SampleRun run = return_samples(sys, cfg.seed, n_samples, cfg.burn);
  evals_used += cfg.burn + int(run.crossings.size());
  const auto& xs = run.crossings;
  if (xs.size() < 2) return out;

  if (xs.size() >= 50) {
    const double ref_x = sys.partition_coordinate(sys.pin_witness());
    out.partition = estimate_fold(xs, ref_x);
  }
  // Without a fold the section shows no symbolic distinction; everything
  // codes on the P_In side.
  const Partition part =
      out.partition ? *out.partition
                    : Partition{-1e300, sys.partition_coordinate(sys.pin_witness())};

  // Close-return candidates (i, k): |x_i - x_{i+k}| below threshold.
  struct Candidate {
    double d;
    std::size_t i;
    int k;
  };
  std::vector<Candidate> cands;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    for (int k = 1; k <= cfg.k_max && i + std::size_t(k) < xs.size(); ++k) {
      const double d = norm(xs[i].point - xs[i + k].point);
      if (d < cfg.close_return_tol) cands.push_back({d, i, k});
    }
  }
  std::stable_sort(cands.begin(), cands.end(),
                   [](const Candidate& a, const Candidate& b) {
                     if (a.k != b.k) return a.k < b.k;
                     return a.d < b.d;
                   });

  for (const Candidate& c : cands) {
    // Rough Newton cost: 5 return-map evaluations of f^k per iteration.
    const int est_cost = 5 * c.k * cfg.newton.max_iterations / 4;
    if (evals_used + est_cost > cfg.budget) break;
    evals_used += est_cost;
    ++out.orbits_tried;
    PeriodicOrbit orbit;
    try {
      orbit = find_periodic_orbit(sys, xs[c.i].point, c.k, cfg.newton);
    } catch (const NumericalError&) {
      continue;
    }
    ++out.orbits_converged;
    bool dup = false;
    for (const PerEntry& e : out.entries)
      if (same_orbit(e.orbit, orbit, std::max(cfg.dedup_tol, 1e3 * orbit.residual)))
        dup = true;
    if (dup) continue;
    const auto word = orbit_word(sys, orbit, part);
    if (!word) continue;  // orbit touches the fold's ambiguity band
    out.entries.push_back({*word, std::move(orbit)});
  }
  return out;
}

ReturnResult first_return(const Params& p, const Vec3& u, double t_max) {
  RosslerSection sys(p, {}, t_max);
  return sys.first_return(u);
}

SampleRun return_samples(const Params& p, const Vec3& seed, int n, int burn) {
  RosslerSection sys(p);
  return return_samples(sys, seed, n, burn);
}

PerSet estimate_per_v(const Params& p, const PerScanConfig& cfg) {
  RosslerSection sys(p);
  return estimate_per_v(sys, cfg);
}

}  // namespace rossler
