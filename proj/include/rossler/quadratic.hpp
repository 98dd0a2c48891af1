#pragma once

// Kneading-theory engine for p_c(x) = x^2 + c on c in [-2, 1/4]:
// invariant interval, itineraries, kneading invariant, unimodal order,
// admissibility, c_sup bisection, the Pi map, orbit realization by
// pullback, stability classification and flow/polynomial orbit matching.

#include <optional>
#include <vector>

#include "rossler/section.hpp"
#include "rossler/symbols.hpp"

namespace rossler::quad {

constexpr double c_min = -2.0;
constexpr double c_max = 0.25;

struct InvariantInterval {
  double x2;  // left endpoint, -x1
  double x1;  // right endpoint, the positive fixed point
};

// V_c = [x2, x1] with x1 = (1+sqrt(1-4c))/2.  Throws OutOfRange.
InvariantInterval invariant_interval(double c);

struct CodingResult {
  SymbolSequence word;
  std::vector<std::size_t> zero_hits;  // 1-based positions coded by the left limit
};

// Itinerary of x under p_c: symbol 1 on (0, x1], 2 on [x2, 0).  Iterates
// within 1e-14 of 0 are flagged and coded by the left-limit convention
// (symbol 2).  Throws LeftInvariantInterval if an iterate exits V_c by
// more than 1e-12.
CodingResult code_point(double c, double x, int n);

struct KneadingReport {
  SymbolSequence word;                  // first n symbols of K(c)
  std::vector<std::size_t> hits_zero_at;  // 1-based indices of exact zero hits
};

// K(c): itinerary of the critical orbit {p_c^n(0)}_{n>=1} with the
// one-sided limit convention at zero hits.
KneadingReport kneading(double c, int n);

// True iff s (periodic) is realized as the itinerary of an orbit of p_c:
// every rotation of s is >= K(c) in the unimodal order.  (The critical
// value is the minimum of the invariant region, so admissible sequences
// dominate the kneading invariant; the orientation convention is frozen
// by the realization oracle.)
bool admissible(const SymbolSequence& s, double c, int depth = 96);

// sup{c in [-2,1/4] : s in Per(c)} by bisection on admissible(s, .),
// monotone in c.  Returns the interval midpoint; -2 or 1/4 at saturation.
double c_sup(const SymbolSequence& s, double tol = 1e-8);

struct PiResult {
  double d = c_max;
  SymbolSequence binding_symbol;  // the symbol achieving the minimum
  std::vector<SymbolSequence> per_witnesses;
};

// d = min over s in per of c_sup(s), clamped to [-2, 1/4].
// Throws EmptyPerSet.
PiResult pi_of_per(const std::vector<SymbolSequence>& per, double tol = 1e-8);

// Realizes the periodic point with itinerary s by pullback through the
// inverse branches (+sqrt(x-c) for symbol 1, -sqrt(x-c) for symbol 2).
// Returns the full orbit (minimal-period many points, starting at the
// point whose itinerary is s).  Throws BranchDomainError when a radicand
// drops below -1e-12 (inadmissible word or tolerance failure).
std::vector<double> find_orbit_with_itinerary(double c, const SymbolSequence& s);

enum class StabilityKind { Attracting, SuperAttracting, Parabolic, Repelling };

struct StabilityClass {
  StabilityKind kind = StabilityKind::Repelling;
  double multiplier = 0.0;  // d/dx p_c^k along the orbit = prod 2 x_i
};

StabilityClass classify_orbit(double c, const std::vector<double>& orbit, int k);

struct MatchedPair {
  SymbolSequence word;
  PeriodicOrbit flow_orbit;
  std::vector<double> poly_orbit;
};

struct MatchReport {
  std::vector<MatchedPair> matched;
  std::vector<PerEntry> unmatched;  // symbols inadmissible at d
};

// Pairs each flow orbit whose symbol is admissible at d with the
// polynomial orbit realizing the same word; matched pairs have equal
// minimal period by construction.
MatchReport match_orbits(double d, const std::vector<PerEntry>& flow_orbits);

// Brute-force realization oracle (test support, but part of the public
// surface so the CLI and acceptance suite can cross-check): all periodic
// orbits of p_c with period <= k_max found by a dense root scan of
// p_c^k(x) - x, together with their itineraries.
struct ScannedOrbit {
  std::vector<double> points;   // one orbit, in dynamical order
  int k = 1;                    // minimal period
  SymbolSequence word;          // canonical periodic itinerary
  bool ambiguous = false;       // some point within 1e-10 of the critical point
};

std::vector<ScannedOrbit> scan_periodic_orbits(double c, int k_max,
                                               int grid_points = 40000);

// Realization test backed by scan_periodic_orbits.
bool realized_by_scan(const SymbolSequence& s, double c, int grid_points = 40000);

}  // namespace rossler::quad
