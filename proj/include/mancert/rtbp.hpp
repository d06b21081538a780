#pragma once

#include <array>

#include <json.hpp>

#include "mancert/interval.hpp"
#include "mancert/taylor.hpp"

namespace mc::rtbp {

/// Mass parameter of the smaller primary. The sun sits at (μ, 0), the planet
/// at (μ − 1, 0). States are (X, Y, P_X, P_Y) with P_X = Ẋ − Y, P_Y = Ẏ + X.
struct RtbpParams {
  Interval mu;

  explicit RtbpParams(Interval mu);
  explicit RtbpParams(double mu) : RtbpParams(Interval(mu)) {}
};

Interval hamiltonian(const IVector& s, const RtbpParams& p);
/// C = 2Ω − (Ẋ² + Ẏ²).
Interval jacobi(const IVector& s, const RtbpParams& p);
IVector vector_field(const IVector& s, const RtbpParams& p);
IMatrix jacobian(const IVector& s, const RtbpParams& p);

double hamiltonian(const Point& s, double mu);
Point vector_field(const Point& s, double mu);
/// Row-major 4×4.
std::array<double, 16> jacobian(const Point& s, double mu);

/// Taylor tape of the field with μ fixed to an interval constant.
Tape field_tape(const Interval& mu);
/// Five-dimensional tape with μ appended as a state with μ' = 0.
Tape field_tape_with_mu();

/// (X, Y, P_X, P_Y) ↦ (X, −Y, −P_X, P_Y).
IVector symmetry_S(const IVector& s);
Point symmetry_S(const Point& s);

/// Ω_X(X, 0) on the segment between the primaries.
Interval collinear_equation(const Interval& x, const Interval& mu);

/// Enclosure of (x_L1, 0, 0, x_L1). Throws Inconclusive if Newton fails.
IVector libration_L1(const RtbpParams& p);

/// Coefficients of K₀..K₃ in powers of x (index = degree).
using Poly = std::array<double, 4>;
extern const std::array<Poly, 4> kK;

/// Jordan data at L1 for an interval of μ.
struct LocalChart {
  Interval mu;
  IVector l1;
  Interval gamma, c2, lambda, v, s1, s2;
  /// Columns ordered (unstable, stable, center, center).
  IMatrix c;
  /// Point data used by Φ: L̃ = mid(L1), C̃ = mid(C).
  Point l1_point;
  std::array<double, 16> c_point{};
};

LocalChart jordan_basis(const RtbpParams& p);

/// C⁻¹·DF(L1)·C evaluated with the interval C.
IMatrix jordan_residual(const LocalChart& chart);

/// ψ₀ = K₀(x) − Σ yᵢKᵢ′(x), ψᵢ = Kᵢ(x) + yᵢK₀′(x).
IVector psi(const IVector& q);
Point psi(const Point& q);
IMatrix dpsi(const IVector& q);
/// (D²ψ(q)·w)_{ij} = Σ_k ∂²ψᵢ/∂q_j∂q_k · w_k.
IMatrix d2psi_times(const IVector& q, const IVector& w);

/// Φ(q) = L̃ + C̃ψ(q).
IVector phi(const LocalChart& chart, const IVector& q);
Point phi(const LocalChart& chart, const Point& q);
IMatrix dphi(const LocalChart& chart, const IVector& q);
IMatrix d2phi_times(const LocalChart& chart, const IVector& q, const IVector& w);

/// F̂ from DΦ(q)·F̂ = F(Φ(q)).
IVector local_field(const IVector& q, const LocalChart& chart, const RtbpParams& p);
/// DF̂ = DΦ⁻¹(DF(Φ)·DΦ − D²Φ·F̂).
IMatrix local_jacobian(const IVector& q, const LocalChart& chart, const RtbpParams& p);

/// Floating-point F̂ for shooting and plots.
Point local_field(const Point& q, const LocalChart& chart, double mu);

void to_json(nlohmann::json& j, const LocalChart& chart);

}  // namespace mc::rtbp
