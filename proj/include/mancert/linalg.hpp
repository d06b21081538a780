#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "mancert/interval.hpp"

namespace mc {

enum class PDMethod { IntervalCholesky, Gershgorin };

/// Outcome of a positive-definiteness test. verified=false means
/// "could not certify", never "indefinite".
struct PDVerdict {
  bool verified = false;
  PDMethod method = PDMethod::IntervalCholesky;
  /// Smallest certified pivot (Cholesky) or disc lower bound (Gershgorin).
  double margin = 0.0;
};

/// Encloses {A⁻¹b : A ∈ a, b ∈ b} with a midpoint-preconditioned Krawczyk
/// iteration. Throws SingularEnclosure if regularity cannot be verified.
IVector solve_interval_linear(const IMatrix& a, const IVector& b);
/// Column-by-column solve of a·X = rhs.
IMatrix solve_interval_linear(const IMatrix& a, const IMatrix& rhs);
/// Encloses {A⁻¹ : A ∈ a}.
IMatrix inverse_enclosure(const IMatrix& a);

/// Certifies that every symmetric point matrix in (m + mᵀ)/2 is positive
/// definite. Interval Cholesky first, then Gershgorin discs after a
/// congruence with the eigenvectors of the midpoint.
PDVerdict is_positive_definite(const IMatrix& m);

enum class NewtonVerdict { UniqueRoot, NoRoot, Inconclusive };

struct NewtonResult {
  NewtonVerdict verdict = NewtonVerdict::Inconclusive;
  std::optional<Box> root_box;
  int iterations = 0;
  /// Boxes after each iteration; nested.
  std::vector<Box> history;
};

struct NewtonOptions {
  int max_iterations = 50;
  /// Stop once an iteration shrinks the box width by less than this fraction.
  double min_improvement = 0.01;
};

using BoxMap = std::function<IVector(const Box&)>;
using BoxJacobian = std::function<IMatrix(const Box&)>;

/// Interval Newton operator N(x₀, X) = x₀ − [Df(X)]⁻¹ f(x₀), re-applied on
/// N ∩ X until the width stagnates.
NewtonResult interval_newton(const BoxMap& f, const BoxJacobian& df,
                             const Box& x, const Point& x0,
                             const NewtonOptions& options = {});

const char* to_string(NewtonVerdict v);
const char* to_string(PDMethod m);

}  // namespace mc
