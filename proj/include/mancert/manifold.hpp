#pragma once

#include <functional>
#include <vector>

#include <json.hpp>

#include "mancert/cones.hpp"

namespace mc {

enum class ManifoldKind { MapUnstable, MapStable, FlowUnstable, FlowStable };

/// Existence statement for a strong (un)stable manifold backed by verified
/// cone conditions. Balls are recorded as closed in both the stable and the
/// unstable case.
struct ManifoldCertificate {
  ManifoldKind kind = ManifoldKind::MapUnstable;
  Box domain;
  std::size_t u_dim = 1;
  double alpha_h = 0.0;
  double alpha_v = 0.0;
  /// (m_h, m_v) for maps, (c_h, c_v) for flows.
  double rate_h = 0.0;
  double rate_v = 0.0;
  /// r^u = √(1 − α_v) or r^s = √(1 − α_h), rounded down.
  double radius = 0.0;
  /// √α_h (unstable) or √α_v (stable), rounded up.
  double lipschitz = 0.0;
  double contraction_constant = 0.0;
  /// B + B̄_u(0, r^u) × B̄_s (unstable) or B + B̄_u × B̄_s(0, r^s) (stable).
  Box graph_window;

  bool unstable() const {
    return kind == ManifoldKind::MapUnstable || kind == ManifoldKind::FlowUnstable;
  }
};

/// Map case: cone certificates for Q_h at m_h and Q_v at m_v, both verified on
/// the same domain N' = N + B.
ManifoldCertificate certify(ManifoldKind kind, const ConeCertificate& q_h,
                            const ConeCertificate& q_v, const Box& fixed_point);

/// Flow case: verified flow cone constants on `domain`.
ManifoldCertificate certify(ManifoldKind kind, const FlowConeConstants& constants,
                            const Box& domain, const Box& fixed_point,
                            std::size_t u_dim);

/// φ(u, s) straightening {Q ≤ c*} so that ‖u‖ = 1 lands on {Q = c*}.
Point phi_coords(const Point& u, const Point& s, const QuadForm& q, double c_star);
/// Inverse of phi_coords: (x, s) ↦ (u, s).
Point phi_inverse(const Point& x, const Point& s, const QuadForm& q, double c_star);

/// Point map R^n → R^n, floating point.
using PointMap = std::function<Point(const Point&)>;

/// Horizontal disc with a one-dimensional unstable direction, sampled at
/// abscissae in [−1, 1] and interpolated linearly in between.
struct HorizontalDisc1D {
  std::vector<double> abscissae;
  std::vector<Point> points;

  /// h₀(x) = (x·√(1 − α_v), 0, …, 0) sampled at Chebyshev abscissae.
  static HorizontalDisc1D initial(double alpha_v, std::size_t dim,
                                  std::size_t samples = 257);
  Point operator()(double x) const;
};

std::vector<double> chebyshev_abscissae(std::size_t samples);

/// Numerical graph transform h ↦ f∘h ∩ {Q_v ≤ c*}, re-parameterized by the
/// u-coordinate of φ⁻¹. Floating point only; used for cross-checks.
HorizontalDisc1D graph_transform_1d(const PointMap& f, const HorizontalDisc1D& disc,
                                    const QuadForm& q_v, double c_star,
                                    int iterations, double tolerance = 1e-13);

const char* to_string(ManifoldKind kind);
void to_json(nlohmann::json& j, const ManifoldCertificate& c);

}  // namespace mc
