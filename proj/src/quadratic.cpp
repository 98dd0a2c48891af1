#include "rossler/quadratic.hpp"

#include <algorithm>
#include <cmath>

namespace rossler::quad {

namespace {

constexpr double zero_tol = 1e-14;   // critical-point hit detection
constexpr double drift_tol = 1e-12;  // allowed excursion outside V_c

double step(double c, double x) { return x * x + c; }

void check_range(double c, const char* who) {
  if (!(c >= c_min && c <= c_max))
    throw OutOfRange(std::string(who) + ": c outside [-2, 1/4]");
}

}  // namespace

InvariantInterval invariant_interval(double c) {
  check_range(c, "invariant_interval");
  const double x1 = (1.0 + std::sqrt(1.0 - 4.0 * c)) / 2.0;
  return {-x1, x1};
}

CodingResult code_point(double c, double x, int n) {
  check_range(c, "code_point");
  const auto [x2, x1] = invariant_interval(c);
  if (x < x2 - drift_tol || x > x1 + drift_tol)
    throw OutOfRange("code_point: x outside the invariant interval");

  CodingResult res;
  std::vector<uint8_t> w;
  w.reserve(n);
  double z = x;
  for (int i = 0; i < n; ++i) {
    if (z < x2 - drift_tol || z > x1 + drift_tol)
      throw LeftInvariantInterval("code_point: iterate left the invariant interval");
    if (std::fabs(z) < zero_tol) {
      // Left-limit convention: points just below 0 carry symbol 2.
      res.zero_hits.push_back(std::size_t(i) + 1);
      w.push_back(2);
      z = step(c, 0.0);
      continue;
    }
    w.push_back(z > 0.0 ? 1 : 2);
    z = step(c, z);
  }
  res.word = SymbolSequence(std::move(w));
  return res;
}

KneadingReport kneading(double c, int n) {
  check_range(c, "kneading");
  KneadingReport rep;
  std::vector<uint8_t> w;
  w.reserve(n);
  double z = step(c, 0.0);  // critical value p_c(0) = c
  for (int i = 1; i <= n; ++i) {
    if (std::fabs(z) < zero_tol) {
      rep.hits_zero_at.push_back(std::size_t(i));
      w.push_back(2);  // i^+ at 0 is the left limit, symbol 2
      z = step(c, 0.0);
    } else {
      w.push_back(z > 0.0 ? 1 : 2);
      z = step(c, z);
    }
    // The critical orbit is trapped in [c, x1]; clamp tiny numerical
    // excursions so deep iterates do not drift outside.
    const double x1 = (1.0 + std::sqrt(1.0 - 4.0 * c)) / 2.0;
    z = std::clamp(z, c, x1);
  }
  rep.word = SymbolSequence(std::move(w));
  return rep;
}

bool admissible(const SymbolSequence& s, double c, int depth) {
  check_range(c, "admissible");
  if (!s.is_periodic()) throw DomainError("admissible: s must be periodic");

  const int n = std::max<int>(depth, 4 * int(s.tail_period()) + 8);
  const SymbolSequence K = kneading(c, n).word;

  for (const SymbolSequence& rot : s.canonical_periodic().rotations()) {
    // rot >= K fails when K is strictly greater.
    try {
      if (unimodal_compare(K, rot) == Ordering::Greater) return false;
    } catch (const IncomparableDepth&) {
      // Equal to the full kneading depth: treat as admissible (boundary
      // case, resolved within the bisection tolerance).
    }
  }
  return true;
}

double c_sup(const SymbolSequence& s, double tol) {
  if (tol <= 0.0) throw DomainError("c_sup: tol must be positive");
  double lo = c_min, hi = c_max;
  if (admissible(s, hi)) return c_max;
  if (!admissible(s, lo)) return c_min;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (admissible(s, mid) ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

PiResult pi_of_per(const std::vector<SymbolSequence>& per, double tol) {
  if (per.empty()) throw EmptyPerSet("pi_of_per: empty Per set");
  PiResult res;
  res.per_witnesses = per;
  res.d = c_max + 1.0;
  for (const SymbolSequence& s : per) {
    const double cs = c_sup(s, tol);
    if (cs < res.d) {
      res.d = cs;
      res.binding_symbol = s;
    }
  }
  res.d = std::clamp(res.d, c_min, c_max);
  return res;
}

namespace {

// Inverse branch with the radicand clamped at zero; transients of the
// pullback may legitimately leave the branch domain, so domain failures
// are diagnosed on the converged solution, not during iteration.
double pull_back_clamped(double c, double y, uint8_t branch) {
  const double r = std::sqrt(std::max(0.0, y - c));
  return branch == 1 ? r : -r;
}

// Checks that the converged point x realizes the word: the pullback
// chain stays in the branch domains and the coded symbols match, with
// iterates at the critical point acting as wildcards.
void verify_realization(double c, double x, const SymbolSequence& word,
                        std::size_t k) {
  double z = x;
  for (std::size_t i = 0; i < k; ++i) {
    const double znext = step(c, z);
    if (znext - c < -drift_tol)
      throw BranchDomainError(
          "find_orbit_with_itinerary: orbit leaves the branch domain");
    if (std::fabs(z) > 1e-10) {
      const uint8_t coded = z > 0.0 ? 1 : 2;
      if (coded != word.at(i))
        throw BranchDomainError(
            "find_orbit_with_itinerary: converged orbit codes differently");
    }
    z = znext;
  }
  if (std::fabs(z - x) > 1e-9)
    throw NoConvergence("find_orbit_with_itinerary: orbit does not close");
}

}  // namespace

std::vector<double> find_orbit_with_itinerary(double c, const SymbolSequence& s) {
  check_range(c, "find_orbit_with_itinerary");
  if (!s.is_periodic())
    throw DomainError("find_orbit_with_itinerary: s must be periodic");
  const SymbolSequence word = s.canonical_periodic();
  const std::size_t k = word.tail_period();
  const auto [x2, x1] = invariant_interval(c);

  const auto finish = [&](double x) {
    verify_realization(c, x, word, k);
    std::vector<double> orbit;
    orbit.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
      orbit.push_back(x);
      x = step(c, x);
    }
    return orbit;
  };

  // Fixed points in closed form.
  if (k == 1) {
    if (word.at(0) == 1) return finish(x1);
    const double alpha = (1.0 - std::sqrt(1.0 - 4.0 * c)) / 2.0;
    return finish(alpha);
  }

  // Pullback: the point with itinerary s is the fixed point of the
  // composite inverse-branch map T_{s_0} o ... o T_{s_{k-1}}, which is a
  // contraction around repelling orbits.
  double z = x1;
  double z_prev = z;
  bool converged = false;
  for (int iter = 0; iter < 50000; ++iter) {
    double y = z;
    for (std::size_t i = k; i-- > 0;) y = pull_back_clamped(c, y, word.at(i));
    z_prev = z;
    z = y;
    if (iter > 0 && std::fabs(z - z_prev) < 1e-13) {
      converged = true;
      break;
    }
  }
  bool domain_failure = false;
  if (converged) {
    try {
      return finish(z);
    } catch (const BranchDomainError&) {
      domain_failure = true;
    } catch (const NoConvergence&) {
    }
  }

  // Attracting orbits repel the pullback; forward iteration of p^k
  // converges there instead.
  for (double seed : {z, 0.0}) {
    double w = seed;
    bool fwd = false;
    for (int iter = 0; iter < 50000; ++iter) {
      double w_next = w;
      for (std::size_t i = 0; i < k; ++i) w_next = step(c, w_next);
      if (!std::isfinite(w_next) || w_next < x2 - 1.0 || w_next > x1 + 1.0) break;
      if (std::fabs(w_next - w) < 1e-13) {
        fwd = true;
        w = w_next;
        break;
      }
      w = w_next;
    }
    if (fwd) {
      try {
        return finish(w);
      } catch (const BranchDomainError&) {
        domain_failure = true;
      } catch (const NoConvergence&) {
      }
    }
  }
  if (domain_failure)
    throw BranchDomainError(
        "find_orbit_with_itinerary: word not realizable at this parameter");
  throw NoConvergence("find_orbit_with_itinerary: pullback did not converge");
}

StabilityClass classify_orbit(double c, const std::vector<double>& orbit, int k) {
  check_range(c, "classify_orbit");
  if (int(orbit.size()) != k || k < 1)
    throw DomainError("classify_orbit: orbit size must equal k");
  StabilityClass sc;
  double mult = 1.0;
  for (double x : orbit) mult *= 2.0 * x;
  sc.multiplier = mult;
  const double m = std::fabs(mult);
  constexpr double eq_tol = 1e-9;
  if (m < eq_tol)
    sc.kind = StabilityKind::SuperAttracting;
  else if (std::fabs(m - 1.0) < eq_tol)
    sc.kind = StabilityKind::Parabolic;
  else if (m < 1.0)
    sc.kind = StabilityKind::Attracting;
  else
    sc.kind = StabilityKind::Repelling;
  return sc;
}

MatchReport match_orbits(double d, const std::vector<PerEntry>& flow_orbits) {
  check_range(d, "match_orbits");
  MatchReport rep;
  for (const PerEntry& e : flow_orbits) {
    const SymbolSequence word = e.word.canonical_periodic();
    if (!admissible(word, d)) {
      rep.unmatched.push_back(e);
      continue;
    }
    std::vector<double> poly;
    try {
      poly = find_orbit_with_itinerary(d, word);
    } catch (const NumericalError&) {
      rep.unmatched.push_back(e);
      continue;
    }
    rep.matched.push_back({word, e.orbit, std::move(poly)});
  }
  return rep;
}

std::vector<ScannedOrbit> scan_periodic_orbits(double c, int k_max, int grid_points) {
  check_range(c, "scan_periodic_orbits");
  const auto [x2, x1] = invariant_interval(c);
  std::vector<ScannedOrbit> orbits;

  const auto iterate_k = [c](double x, int k) {
    for (int i = 0; i < k; ++i) x = x * x + c;
    return x;
  };

  for (int k = 1; k <= k_max; ++k) {
    // Roots of p^k(x) - x by sign-change scan + bisection.
    const double lo = x2, hi = x1;
    double prev_x = lo, prev_f = iterate_k(lo, k) - lo;
    for (int g = 1; g <= grid_points; ++g) {
      const double x = lo + (hi - lo) * g / grid_points;
      const double f = iterate_k(x, k) - x;
      if ((prev_f < 0.0) != (f < 0.0)) {
        double a = prev_x, b = x, fa = prev_f;
        for (int it = 0; it < 80; ++it) {
          const double m = 0.5 * (a + b);
          const double fm = iterate_k(m, k) - m;
          if ((fm < 0.0) == (fa < 0.0)) {
            a = m;
            fa = fm;
          } else {
            b = m;
          }
        }
        const double root = 0.5 * (a + b);

        // Minimal period of this root.
        int kmin = k;
        for (int m = 1; m < k; ++m) {
          if (k % m != 0) continue;
          if (std::fabs(iterate_k(root, m) - root) < 1e-9) {
            kmin = m;
            break;
          }
        }
        if (kmin == k) {
          // Collect orbit; deduplicate against existing ones.
          std::vector<double> pts;
          double xx = root;
          bool ambiguous = false;
          for (int i = 0; i < k; ++i) {
            pts.push_back(xx);
            if (std::fabs(xx) < 1e-10) ambiguous = true;
            xx = xx * xx + c;
          }
          bool dup = false;
          for (const ScannedOrbit& o : orbits) {
            if (o.k != k) continue;
            double best = 1e300;
            for (double q : o.points) best = std::min(best, std::fabs(q - pts[0]));
            if (best < 1e-7) dup = true;
          }
          if (!dup) {
            std::vector<uint8_t> w;
            for (double q : pts) w.push_back(q > 0.0 ? 1 : 2);
            ScannedOrbit so;
            so.points = std::move(pts);
            so.k = k;
            so.word = SymbolSequence::periodic(std::move(w)).canonical_periodic();
            so.ambiguous = ambiguous;
            orbits.push_back(std::move(so));
          }
        }
      }
      prev_x = x;
      prev_f = f;
    }
  }
  return orbits;
}

bool realized_by_scan(const SymbolSequence& s, double c, int grid_points) {
  const SymbolSequence word = s.canonical_periodic();
  const int k = int(word.tail_period());
  const auto orbits = scan_periodic_orbits(c, k, grid_points);
  for (const ScannedOrbit& o : orbits) {
    if (o.k != k || o.ambiguous) continue;
    for (const SymbolSequence& rot : o.word.rotations())
      if (rot.identical(word)) return true;
  }
  return false;
}

}  // namespace rossler::quad
