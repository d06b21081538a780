#include "mancert/linalg.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

namespace mc {

namespace {

using rounding::add_up;
using rounding::div_up;
using rounding::sub_down;

Eigen::MatrixXd to_eigen(const IMatrix& a) {
  Eigen::MatrixXd m(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = a(i, j).mid();
    }
  }
  return m;
}

IMatrix from_eigen(const Eigen::MatrixXd& m) {
  IMatrix a(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      a(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = Interval(m(i, j));
    }
  }
  return a;
}

Eigen::MatrixXd approximate_inverse(const IMatrix& a) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw SingularEnclosure("linear solve needs a non-empty square matrix");
  }
  const Eigen::MatrixXd m = to_eigen(a);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
  if (!lu.isInvertible()) throw SingularEnclosure("midpoint matrix is singular");
  Eigen::MatrixXd r = lu.inverse();
  if (!r.allFinite()) throw SingularEnclosure("midpoint inverse is not finite");
  return r;
}

// Upper bound for the ∞-norm of an interval matrix.
double norm_inf_upper(const IMatrix& c) {
  double best = 0.0;
  for (std::size_t i = 0; i < c.rows(); ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < c.cols(); ++j) row = add_up(row, c(i, j).mag());
    best = std::max(best, row);
  }
  return best;
}

struct Preconditioned {
  IMatrix r;
  IMatrix contraction;  // I − R·A
  double contraction_norm;
};

Preconditioned precondition(const IMatrix& a) {
  const Eigen::MatrixXd r = approximate_inverse(a);
  Preconditioned p{from_eigen(r), {}, 0.0};
  p.contraction = IMatrix::identity(a.rows()) - p.r * a;
  p.contraction_norm = norm_inf_upper(p.contraction);
  if (!(p.contraction_norm < 1.0)) {
    throw SingularEnclosure("could not verify regularity of interval matrix");
  }
  return p;
}

IVector krawczyk_solve(const IMatrix& a, const IVector& b, const Preconditioned& p) {
  const std::size_t n = a.rows();
  Point b_mid = mid(b);
  Eigen::VectorXd bm = Eigen::Map<Eigen::VectorXd>(b_mid.data(), static_cast<Eigen::Index>(n));
  const Eigen::MatrixXd am = to_eigen(a);
  const Eigen::MatrixXd rm = to_eigen(p.r);
  Eigen::VectorXd xt = rm * bm;
  xt += rm * (bm - am * xt);
  Point x_tilde(xt.data(), xt.data() + n);
  const IVector xt_box = IVector::from_point(x_tilde);

  // Every solution error e = x − x̃ satisfies e ∈ z + C·e.
  const IVector z = p.r * (b - a * xt_box);
  double z_norm = 0.0;
  for (const auto& zi : z) z_norm = std::max(z_norm, zi.mag());
  const double delta = div_up(z_norm, sub_down(1.0, p.contraction_norm));
  IVector e(n, Interval(-delta, delta));
  for (int iter = 0; iter < 20; ++iter) {
    const IVector next = z + p.contraction * e;
    auto narrowed = intersect(next, e);
    if (!narrowed) break;
    const double before = max_width(e);
    e = *narrowed;
    if (max_width(e) >= 0.999 * before) break;
  }
  return xt_box + e;
}

}  // namespace

IVector solve_interval_linear(const IMatrix& a, const IVector& b) {
  if (a.rows() != b.size()) throw DomainError("dimension mismatch in linear solve");
  return krawczyk_solve(a, b, precondition(a));
}

IMatrix solve_interval_linear(const IMatrix& a, const IMatrix& rhs) {
  if (a.rows() != rhs.rows()) throw DomainError("dimension mismatch in linear solve");
  const Preconditioned p = precondition(a);
  IMatrix x(a.cols(), rhs.cols());
  for (std::size_t j = 0; j < rhs.cols(); ++j) {
    x.set_column(j, krawczyk_solve(a, rhs.column(j), p));
  }
  return x;
}

IMatrix inverse_enclosure(const IMatrix& a) {
  return solve_interval_linear(a, IMatrix::identity(a.rows()));
}

namespace {

IMatrix symmetrize(const IMatrix& m) {
  const std::size_t n = m.rows();
  IMatrix s(n, n);
  const Interval half(0.5);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) s(i, j) = half * (m(i, j) + m(j, i));
  }
  return s;
}

std::optional<double> interval_cholesky(const IMatrix& s) {
  const std::size_t n = s.rows();
  IMatrix l(n, n);
  double margin = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < n; ++j) {
    Interval d = s(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= sqr(l(j, k));
    if (!(d.lo() > 0.0)) return std::nullopt;
    margin = std::min(margin, d.lo());
    l(j, j) = sqrt(d);
    for (std::size_t i = j + 1; i < n; ++i) {
      Interval v = s(i, j);
      for (std::size_t k = 0; k < j; ++k) v -= l(i, k) * l(j, k);
      l(i, j) = v / l(j, j);
    }
  }
  return margin;
}

std::optional<double> preconditioned_gershgorin(const IMatrix& s) {
  const std::size_t n = s.rows();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(to_eigen(s));
  if (eig.info() != Eigen::Success) return std::nullopt;
  const IMatrix x = from_eigen(eig.eigenvectors());
  const IMatrix xt = x.transpose();
  // Congruence preserves definiteness only for a regular x.
  if (!(norm_inf_upper(IMatrix::identity(n) - xt * x) < 1.0)) return std::nullopt;
  const IMatrix t = xt * s * x;
  double margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    Interval disc = t(i, i);
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) disc -= Interval(t(i, j).mag());
    }
    if (!(disc.lo() > 0.0)) return std::nullopt;
    margin = std::min(margin, disc.lo());
  }
  return margin;
}

}  // namespace

PDVerdict is_positive_definite(const IMatrix& m) {
  if (m.rows() != m.cols()) throw DomainError("definiteness test needs a square matrix");
  if (m.rows() == 0) return {true, PDMethod::IntervalCholesky, 0.0};
  const IMatrix s = symmetrize(m);
  if (auto margin = interval_cholesky(s)) {
    return {true, PDMethod::IntervalCholesky, *margin};
  }
  if (auto margin = preconditioned_gershgorin(s)) {
    return {true, PDMethod::Gershgorin, *margin};
  }
  return {false, PDMethod::Gershgorin, 0.0};
}

NewtonResult interval_newton(const BoxMap& f, const BoxJacobian& df,
                             const Box& x, const Point& x0,
                             const NewtonOptions& options) {
  if (x0.size() != x.size()) throw DomainError("Newton start point has wrong dimension");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!x[i].contains(x0[i])) throw DomainError("Newton start point outside box");
  }
  NewtonResult result;
  // Range test: a component of f bounded away from zero excludes roots.
  try {
    for (const auto& component : f(x)) {
      if (!component.contains_zero()) {
        result.verdict = NewtonVerdict::NoRoot;
        return result;
      }
    }
  } catch (const Error&) {
    // f not evaluable on the whole box; rely on the Newton operator.
  }
  Box current = x;
  Point centre = x0;
  bool unique = false;
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    result.iterations = iter + 1;
    IVector step;
    try {
      step = solve_interval_linear(df(current), f(IVector::from_point(centre)));
    } catch (const SingularEnclosure&) {
      if (unique) break;
      result.verdict = NewtonVerdict::Inconclusive;
      return result;
    }
    const Box image = IVector::from_point(centre) - step;
    auto narrowed = intersect(image, current);
    if (!unique) {
      if (!narrowed) {
        result.verdict = NewtonVerdict::NoRoot;
        return result;
      }
      unique = interior_of(image, current);
    }
    // All zeros in `current` lie in the image, so narrowing keeps them.
    const Box next = narrowed ? *narrowed : current;
    const double before = max_width(current);
    const double after = max_width(next);
    result.history.push_back(next);
    current = next;
    centre = mid(current);
    if (!(after < (1.0 - options.min_improvement) * before)) break;
  }
  if (unique) {
    result.verdict = NewtonVerdict::UniqueRoot;
    result.root_box = current;
  }
  return result;
}

const char* to_string(NewtonVerdict v) {
  switch (v) {
    case NewtonVerdict::UniqueRoot: return "UniqueRoot";
    case NewtonVerdict::NoRoot: return "NoRoot";
    case NewtonVerdict::Inconclusive: return "Inconclusive";
  }
  return "?";
}

const char* to_string(PDMethod m) {
  return m == PDMethod::IntervalCholesky ? "IntervalCholesky" : "Gershgorin";
}

}  // namespace mc
