#pragma once

// The cross-section Y = {x + a y = 0}, its tangency line l_v and half
// planes U_v / L_v, the first-return map, the empirical fold partition,
// itineraries and periodic-orbit refinement.
//
// The return-map operations (sampling, Newton refinement, the Per(v)
// scan) are written against the SectionSystem interface so tests can
// substitute a planted return map; RosslerSection is the production
// implementation.

#include <memory>
#include <optional>
#include <vector>

#include "rossler/integrator.hpp"
#include "rossler/symbols.hpp"

namespace rossler {

// Geometry of Y for a given parameter value.  Points of l_v satisfy
// F.N = x/a - z = 0; U_v is the side z > x/a containing the section's
// transverse-down crossings.
struct SectionGeometry {
  double a = 0.2;

  Vec3 normal() const { return {1.0, a, 0.0}; }
  double section_eq(const Vec3& s) const { return s.x + a * s.y; }
  bool on_section(const Vec3& s, double tol = 1e-10) const {
    return std::fabs(section_eq(s)) < tol;
  }
  // Signed distance from l_v within Y: positive on U_v.
  double side_value(const Vec3& s) const { return s.z - s.x / a; }
  bool on_upper(const Vec3& s) const { return side_value(s) > 0.0; }
  // Point of l_v at coordinate x.
  Vec3 l_v(double x) const { return {x, -x / a, x / a}; }
};

enum class SectionSide { U, L };

struct Crossing {
  Vec3 point;
  double time = 0.0;
  SectionSide side = SectionSide::U;
  double transversality = 0.0;
  bool tangential = false;
};

enum class ReturnStatus { Crossed, Escaped, NoReturn };

struct ReturnResult {
  ReturnStatus status = ReturnStatus::NoReturn;
  Crossing crossing;   // valid when Crossed
  double t_end = 0.0;  // escape time / budget horizon otherwise
};

// Symbolic partition of U_v by the fold line {x = fold_x}; D1 is the side
// containing the reference point (P_In for the flow).
struct Partition {
  double fold_x = 0.0;
  double d1_reference_x = 0.0;
  double ambiguity_tol = 1e-9;

  // 1 on the D1 side, 2 otherwise; nullopt within ambiguity_tol of the fold.
  std::optional<uint8_t> symbol(double x) const {
    if (std::fabs(x - fold_x) < ambiguity_tol) return std::nullopt;
    const bool d1 = (x - fold_x) * (d1_reference_x - fold_x) > 0.0;
    return d1 ? uint8_t{1} : uint8_t{2};
  }
};

struct PeriodicOrbit {
  std::vector<Crossing> points;  // k crossings on U_v
  int k = 1;                     // minimal period
  std::vector<double> return_times;
  double residual = 0.0;                          // |f^k(x) - x| in section coords
  std::optional<std::array<double, 2>> multipliers;  // real eigenvalues of D f^k
};

// Abstract return-map system over a 2D section chart. -----------------------
class SectionSystem {
 public:
  virtual ~SectionSystem() = default;

  virtual ReturnResult first_return(const Vec3& u) const = 0;

  // Chart between section points and 2D coordinates.
  virtual std::array<double, 2> chart(const Vec3& s) const = 0;
  virtual Vec3 unchart(const std::array<double, 2>& w) const = 0;

  // Coordinate used for symbolic partitioning.
  virtual double partition_coordinate(const Vec3& s) const { return s.x; }

  // The section point carrying the (1,1,1,...) witness (P_In for the flow),
  // a fixed point of the return map by convention.
  virtual Vec3 pin_witness() const = 0;

  // Characteristic length for finite-difference steps.
  virtual double scale() const = 0;
};

// Production system: first return to U_v for the Rossler flow.
class RosslerSection : public SectionSystem {
 public:
  RosslerSection(const Params& p, Tolerances tol = {}, double t_max = 200.0,
                 double r_esc = 0.0);

  ReturnResult first_return(const Vec3& u) const override;
  std::array<double, 2> chart(const Vec3& s) const override;
  Vec3 unchart(const std::array<double, 2>& w) const override;
  Vec3 pin_witness() const override { return {0.0, 0.0, 0.0}; }
  double scale() const override;

  const SectionGeometry& geometry() const { return geom_; }
  const Params& params() const { return p_; }

  // Tolerance below which a seed is treated as the fixed point P_In,
  // whose return is itself (the flow is stationary there).
  double fixed_point_snap = 1e-9;

 private:
  Params p_;
  SectionGeometry geom_;
  Tolerances tol_;
  double t_max_;
  double r_esc_;
};

// Operations ----------------------------------------------------------------

struct SampleRun {
  std::vector<Crossing> crossings;
  bool complete = true;           // false when stopped early
  ReturnStatus stop_reason = ReturnStatus::Crossed;
};

// Iterates first_return n+burn times, discards burn, returns n crossings;
// stops early on Escaped/NoReturn with the partial list flagged.
SampleRun return_samples(const SectionSystem& sys, const Vec3& seed, int n, int burn);

// Locates the fold of the empirical successor relation x_{n+1} = g(x_n)
// by a local quadratic fit around the extremal sample.  nullopt when the
// successor relation is monotone over the sample range (NoFoldFound).
std::optional<Partition> estimate_fold(const std::vector<Crossing>& samples,
                                       double d1_reference_x = 0.0);

enum class ItineraryStop { Complete, Escaped, NoReturn, Ambiguous };

struct ItineraryResult {
  SymbolSequence word;
  ItineraryStop stop = ItineraryStop::Complete;
};

// Symbol per crossing starting with the seed itself; truncated with a
// flag when the orbit escapes or lands within the fold's ambiguity band.
ItineraryResult itinerary(const SectionSystem& sys, const Vec3& u, int n,
                          const Partition& part);

struct NewtonOptions {
  double residual_tol = 1e-8;
  int max_iterations = 50;
  double fd_step_rel = 1e-6;        // finite-difference step = rel * scale
  double min_point_separation = 1e-6;
};

// Newton iteration on the 2D section coordinates of f^k.  Throws
// NoConvergence.  If the converged orbit has a proper period m | k the
// orbit of period m is returned (NotMinimalPeriod is not an error).
PeriodicOrbit find_periodic_orbit(const SectionSystem& sys, const Vec3& guess, int k,
                                  const NewtonOptions& opts = {});

struct PerScanConfig {
  int budget = 2000;         // bound on total return-map evaluations
  int burn = 50;
  int k_max = 8;
  double close_return_tol = 1e-3;
  double dedup_tol = 1e-6;
  Vec3 seed{1.0, 1.0, 0.0};  // forward-integrated onto the attractor
  NewtonOptions newton;
};

struct PerEntry {
  SymbolSequence word;
  PeriodicOrbit orbit;
};

struct PerSet {
  std::vector<PerEntry> entries;
  std::optional<Partition> partition;
  int orbits_tried = 0;
  int orbits_converged = 0;
};

// Best-effort estimate of the periodic symbol set Per(v): recurrence scan
// over return samples seeding Newton refinement, deduplicated, with the
// (1,1,1,...) witness at the pin point always included.
PerSet estimate_per_v(const SectionSystem& sys, const PerScanConfig& cfg = {});

// Params conveniences mirroring the spec signatures. ------------------------

ReturnResult first_return(const Params& p, const Vec3& u, double t_max = 200.0);

SampleRun return_samples(const Params& p, const Vec3& seed, int n, int burn);

PerSet estimate_per_v(const Params& p, const PerScanConfig& cfg = {});

}  // namespace rossler
