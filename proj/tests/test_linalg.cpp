#include <doctest.h>

#include <cmath>
#include <random>

#include "mancert/linalg.hpp"
#include "support/mpfr_real.hpp"

using mc::Interval;
using mc::IMatrix;
using mc::IVector;

namespace {

Interval around(double x, double r) { return {x - r, x + r}; }

bool float_cholesky_succeeds(std::vector<double> a, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) {
    double d = a[j * n + j];
    for (std::size_t k = 0; k < j; ++k) d -= a[j * n + k] * a[j * n + k];
    if (!(d > 0.0)) return false;
    const double l = std::sqrt(d);
    a[j * n + j] = l;
    for (std::size_t i = j + 1; i < n; ++i) {
      double v = a[i * n + j];
      for (std::size_t k = 0; k < j; ++k) v -= a[i * n + k] * a[j * n + k];
      a[i * n + j] = v / l;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("linear solve with point data") {
  const IVector b{Interval(1), Interval(2)};
  CHECK(mc::solve_interval_linear(IMatrix::identity(2), b) == b);

  const IMatrix d{{Interval(2), Interval(0)}, {Interval(0), Interval(4)}};
  const IVector x = mc::solve_interval_linear(d, IVector{Interval(1), Interval(1)});
  CHECK(x[0].contains(0.5));
  CHECK(x[1].contains(0.25));
  CHECK(mc::max_width(x) < 1e-15);
}

TEST_CASE("linear solve encloses sampled point systems") {
  const IMatrix a{{around(2, 0.01), around(0, 0.01)}, {around(0, 0.01), around(4, 0.01)}};
  const IVector b{Interval(1), Interval(1)};
  const IVector x = mc::solve_interval_linear(a, b);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-0.01, 0.01);
  for (int i = 0; i < 1000; ++i) {
    const double a00 = 2 + u(rng), a01 = u(rng), a10 = u(rng), a11 = 4 + u(rng);
    const double det = a00 * a11 - a01 * a10;
    // Cramer's rule
    const double x0 = (a11 - a01) / det;
    const double x1 = (a00 - a10) / det;
    CHECK(x[0].contains(x0));
    CHECK(x[1].contains(x1));
  }
}

TEST_CASE("singular systems are reported") {
  const IMatrix s{{Interval(1), Interval(2)}, {Interval(2), Interval(4)}};
  CHECK_THROWS_AS(mc::solve_interval_linear(s, IVector{Interval(1), Interval(1)}),
                  mc::SingularEnclosure);
  const IMatrix wide{{Interval(-1, 1), Interval(0)}, {Interval(0), Interval(1)}};
  CHECK_THROWS_AS(mc::inverse_enclosure(wide), mc::SingularEnclosure);
}

TEST_CASE("inverse enclosure contains the inverse") {
  const IMatrix a{{Interval(4), Interval(1), Interval(0)},
                  {Interval(1), Interval(3), Interval(1)},
                  {Interval(0), Interval(1), Interval(2)}};
  const IMatrix inv = mc::inverse_enclosure(a);
  const IMatrix prod = a * inv;
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) CHECK(prod(i, j).contains(i == j ? 1.0 : 0.0));
  }
}

TEST_CASE("positive definiteness") {
  SUBCASE("positive diagonal") {
    const IMatrix m{{Interval(2, 3), Interval(0)}, {Interval(0), Interval(1, 2)}};
    const auto v = mc::is_positive_definite(m);
    CHECK(v.verified);
    CHECK(v.method == mc::PDMethod::IntervalCholesky);
    CHECK(v.margin == doctest::Approx(1.0));
  }
  SUBCASE("indefinite point matrix") {
    const IMatrix m{{Interval(1), Interval(2)}, {Interval(2), Interval(1)}};
    CHECK_FALSE(mc::is_positive_definite(m).verified);
  }
  SUBCASE("toy map cone matrix") {
    // f(x, y) = (2x, y/2) with Q = x² − y², m = 1: V = BᵀQB − Q.
    const double a = 2.0, b = 0.5;
    const IMatrix v{{Interval(a * a - 1), Interval(0)}, {Interval(0), Interval(1 - b * b)}};
    // Eigenvalues of a diagonal matrix are its entries.
    const double eig_min = std::min(a * a - 1, 1 - b * b);
    REQUIRE(eig_min == doctest::Approx(0.75));
    const auto verdict = mc::is_positive_definite(v);
    CHECK(verdict.verified);
    CHECK(verdict.margin == doctest::Approx(eig_min));
  }
  SUBCASE("non-symmetric input is symmetrized") {
    const IMatrix m{{Interval(1), Interval(3)}, {Interval(-3), Interval(1)}};
    CHECK(mc::is_positive_definite(m).verified);
  }
}

TEST_CASE("verified definiteness holds for sampled members") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(-1, 1);
  int verified_count = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 3;
    IMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i; j < n; ++j) {
        const double c = i == j ? 1.5 + u(rng) : u(rng) * 0.7;
        const double r = 0.05 * std::fabs(u(rng));
        m(i, j) = m(j, i) = around(c, r);
      }
    }
    if (!mc::is_positive_definite(m).verified) continue;
    ++verified_count;
    for (int s = 0; s < 1000 / 40; ++s) {
      std::vector<double> a(n * n);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
          std::uniform_real_distribution<double> pick(m(i, j).lo(), m(i, j).hi());
          a[i * n + j] = a[j * n + i] = pick(rng);
        }
      }
      CHECK(float_cholesky_succeeds(a, n));
    }
  }
  CHECK(verified_count > 40);
}

TEST_CASE("interval Newton on x^2 - 2") {
  const auto f = [](const mc::Box& x) { return IVector{mc::sqr(x[0]) - Interval(2)}; };
  const auto df = [](const mc::Box& x) { return IMatrix{{Interval(2) * x[0]}}; };
  const auto r = mc::interval_newton(f, df, mc::Box{Interval(1, 2)}, {1.5});
  REQUIRE(r.verdict == mc::NewtonVerdict::UniqueRoot);
  // Bisection oracle
  double lo = 1.0, hi = 2.0;
  for (int i = 0; i < 200 && hi - lo > 0; ++i) {
    const double m = 0.5 * (lo + hi);
    if (m == lo || m == hi) break;
    (m * m < 2.0 ? lo : hi) = m;
  }
  CHECK((*r.root_box)[0].contains(lo));
  CHECK((*r.root_box)[0].width() < 1e-15);
  for (std::size_t i = 1; i < r.history.size(); ++i) {
    CHECK(mc::subset_of(r.history[i], r.history[i - 1]));
  }
}

TEST_CASE("interval Newton proves absence of roots") {
  const auto f = [](const mc::Box& x) { return IVector{mc::sqr(x[0]) + Interval(1)}; };
  const auto df = [](const mc::Box& x) { return IMatrix{{Interval(2) * x[0]}}; };
  const auto r = mc::interval_newton(f, df, mc::Box{Interval(0, 1)}, {0.5});
  CHECK(r.verdict == mc::NewtonVerdict::NoRoot);
  CHECK_FALSE(r.root_box.has_value());
}

TEST_CASE("interval Newton start point must lie in the box") {
  const auto f = [](const mc::Box& x) { return IVector{x[0]}; };
  const auto df = [](const mc::Box&) { return IMatrix{{Interval(1)}}; };
  CHECK_THROWS_AS(mc::interval_newton(f, df, mc::Box{Interval(0, 1)}, {2.0}), mc::DomainError);
}

TEST_CASE("interval Newton on random cubics") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1, 1);
  int unique = 0;
  for (int t = 0; t < 100; ++t) {
    // (x - r)(x² + p x + q) with q > p²/4: a single simple real root r.
    const double r = u(rng), p = u(rng), q = p * p / 4 + 0.1 + std::fabs(u(rng));
    const double c2 = p - r, c1 = q - r * p, c0 = -r * q;
    const auto poly = [&](double x) { return ((x + c2) * x + c1) * x + c0; };
    const auto exact_sign = [&](double x) {
      using namespace oracle;
      const Real xr(x);
      const Real v = add(mul(add(mul(add(xr, Real(c2)), xr), Real(c1)), xr), Real(c0));
      return mpfr_sgn(v.get());
    };
    const auto f = [&](const mc::Box& x) {
      return IVector{((x[0] + Interval(c2)) * x[0] + Interval(c1)) * x[0] + Interval(c0)};
    };
    const auto df = [&](const mc::Box& x) {
      return IMatrix{{(Interval(3) * x[0] + Interval(2 * c2)) * x[0] + Interval(c1)}};
    };
    const double w = 0.05 + 0.2 * std::fabs(u(rng));
    const double shift = u(rng) * 0.3;
    const Interval box(r - w + shift, r + w + shift);
    const auto res = mc::interval_newton(f, df, mc::Box{box}, {box.mid()});
    // Bisection with exactly evaluated signs brackets the true root.
    double lo = r - 1.0, hi = r + 1.0;
    for (int i = 0; i < 200; ++i) {
      const double m = 0.5 * (lo + hi);
      if (m == lo || m == hi) break;
      (exact_sign(m) < 0 ? lo : hi) = m;
    }
    if (res.verdict == mc::NewtonVerdict::UniqueRoot) {
      ++unique;
      INFO("root box " << (*res.root_box)[0] << " oracle " << lo << " " << hi);
      CHECK(mc::intersect((*res.root_box)[0], Interval(lo, hi)).has_value());
    } else if (res.verdict == mc::NewtonVerdict::NoRoot) {
      for (int i = 0; i < 1000; ++i) {
        const double a = box.lo() + (box.hi() - box.lo()) * i / 1000.0;
        const double b = box.lo() + (box.hi() - box.lo()) * (i + 1) / 1000.0;
        CHECK(poly(a) * poly(b) > 0.0);
      }
    }
  }
  CHECK(unique > 30);
}
