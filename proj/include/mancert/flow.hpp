#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mancert/interval.hpp"
#include "mancert/taylor.hpp"

namespace mc {

/// ‖F‖ ≤ mu_bound, ‖DF‖ ≤ L and ‖DF(p₁) − DF(p₂)‖ ≤ M‖p₁ − p₂‖ on a box.
struct VectorFieldBounds {
  double mu_bound = 0.0;
  double L = 0.0;
  double M = 0.0;
};

struct GronwallBounds {
  double g1 = 0.0;
  double g2 = 0.0;
};

/// (e^{|t|L} − 1)·dist and (L(e^{L|t|} − 1) + |t|e^{L|t|}μM)·dist, rounded up.
GronwallBounds gronwall_bounds(const VectorFieldBounds& b, double t, double dist);

/// μ and L over `box` from the tape; M is not derived and stays +∞.
VectorFieldBounds field_bounds(const Tape& field, const Box& box);

/// {midpoint + C·r₀ + B·r : r₀ ∈ initial, r ∈ remainder} at the given time.
/// C carries the initial set through the linearised flow; B is orthogonal and
/// collects local errors.
struct FlowEnclosure {
  Point midpoint;
  /// Row-major n×n point matrices C and B.
  std::vector<double> coeff;
  Box initial;
  std::vector<double> basis;
  Box remainder;
  Interval time{0.0};

  std::size_t dim() const { return midpoint.size(); }
  IMatrix coeff_matrix() const;
  IMatrix basis_matrix() const;
  Box hull() const;

  static FlowEnclosure from_box(const Box& box, Interval time = Interval(0.0));
  /// {m + C·r₀ : r₀ ∈ r0} for a row-major point matrix C.
  static FlowEnclosure from_affine(const Point& m, std::vector<double> c, const Box& r0,
                                   Interval time = Interval(0.0));
};

struct IntegratorOptions {
  int order = 20;
  /// Target for the local remainder.
  double tolerance = 1e-14;
  double h_max = 0.25;
  double h_min = 1e-12;
};

/// One validated step: the rough enclosure covers the whole time slab.
struct StepRecord {
  Interval time;
  Box enclosure;
};

/// Box Z with X₀ + [0, h]·F(Z) ⊆ Z. Throws EnclosureFailure after 20 attempts.
Box a_priori_enclosure(const Tape& field, const Box& x0, double h);

/// Lohner step of length h with a Taylor expansion of the given order.
FlowEnclosure taylor_step(const Tape& field, const FlowEnclosure& e, double h, int order);

/// Step length from the decay of the point Taylor coefficients at x.
double suggest_step(const Tape& field, const Point& x, const IntegratorOptions& opt);

/// Validated integration from e.time to e.time + duration.
FlowEnclosure integrate(const Tape& field, const FlowEnclosure& e, double duration,
                        const IntegratorOptions& opt, std::vector<StepRecord>* trace = nullptr);

/// {x[index] = value}, crossed with sign(ẋ[index]) = direction.
struct Section {
  std::size_t index = 1;
  double value = 0.0;
  int direction = 1;
};

struct CrossingResult {
  /// Image on the section; the section coordinate is exactly `value`.
  Box image;
  /// Absolute crossing times.
  Interval time;
  /// Enclosure of ẋ[index] over the crossing slab.
  Interval section_speed;
  /// Set just before the section, from which the image was computed.
  FlowEnclosure before_section;
  std::size_t steps = 0;
};

/// First crossing of the section by every trajectory from e.
CrossingResult poincare_crossing(const Tape& field, const FlowEnclosure& e,
                                 const Section& section, const IntegratorOptions& opt,
                                 double max_time, std::vector<StepRecord>* trace = nullptr);

/// Floating-point trajectory samples (not validated).
struct PointTrajectory {
  std::vector<double> t;
  std::vector<Point> x;
};

PointTrajectory integrate_point(const Tape& field, const Point& x0, double duration,
                                const IntegratorOptions& opt);

struct PointCrossing {
  double time = 0.0;
  Point state;
  PointTrajectory path;
};

/// Floating-point first crossing, or nothing within max_time.
std::optional<PointCrossing> point_crossing(const Tape& field, const Point& x0,
                                            const Section& section,
                                            const IntegratorOptions& opt, double max_time);

/// Columns t_lo,t_hi then <name>_lo,<name>_hi per coordinate.
void write_enclosures_csv(std::ostream& os, const std::vector<StepRecord>& steps,
                          const std::vector<std::string>& names);

}  // namespace mc
