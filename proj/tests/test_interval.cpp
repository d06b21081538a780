#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "mancert/interval.hpp"
#include "mancert/json_io.hpp"
#include "support/mpfr_real.hpp"

using mc::Interval;
using mc::IMatrix;
using mc::IVector;
using mc::rounding::next_down;
using mc::rounding::next_up;

namespace {

double random_double(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> mant(1.0, 2.0);
  std::uniform_int_distribution<int> expo(-40, 40);
  std::bernoulli_distribution neg(0.5);
  std::bernoulli_distribution special(0.05);
  if (special(rng)) return 0.0;
  const double v = std::ldexp(mant(rng), expo(rng));
  return neg(rng) ? -v : v;
}

Interval random_interval(std::mt19937_64& rng) {
  double a = random_double(rng);
  double b = random_double(rng);
  std::bernoulli_distribution thin(0.2);
  if (thin(rng)) b = a;
  return {std::min(a, b), std::max(a, b)};
}

double random_member(const Interval& a, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pick(0, 3);
  switch (pick(rng)) {
    case 0: return a.lo();
    case 1: return a.hi();
    default: {
      std::uniform_real_distribution<double> t(0.0, 1.0);
      const double x = a.lo() + t(rng) * (a.hi() - a.lo());
      return std::clamp(x, a.lo(), a.hi());
    }
  }
}

bool encloses(const Interval& r, const oracle::Real& exact) {
  return exact.at_least(r.lo()) && exact.at_most(r.hi());
}

double ulps_outside(double bound, double exact_rounded, bool lower) {
  int n = 0;
  double x = exact_rounded;
  while (lower ? bound < x : bound > x) {
    x = lower ? next_down(x) : next_up(x);
    ++n;
    if (n > 100) break;
  }
  return n;
}

}  // namespace

TEST_CASE("exact endpoint arithmetic stays exact") {
  CHECK(Interval(1, 2) + Interval(3, 4) == Interval(4, 6));
  CHECK(Interval(-1, 2) * Interval(3, 4) == Interval(-4, 8));
  CHECK(Interval(1, 2) - Interval(3, 4) == Interval(-3, -1));
  CHECK(Interval(1, 2) / Interval(4, 8) == Interval(0.125, 0.5));
}

TEST_CASE("division by an interval containing zero throws") {
  CHECK_THROWS_AS(Interval(1, 1) / Interval(0, 1), mc::DivisionByZeroInterval);
  CHECK_THROWS_AS(Interval(1, 1) / Interval(-1, 0), mc::DivisionByZeroInterval);
}

TEST_CASE("invalid intervals are rejected") {
  CHECK_THROWS_AS(Interval(2, 1), mc::DomainError);
  CHECK_THROWS_AS(Interval(NAN), mc::DomainError);
  CHECK_THROWS_AS(Interval(0, NAN), mc::DomainError);
}

TEST_CASE("inexact results are rounded outward by one ulp") {
  const Interval third = Interval(1) / Interval(3);
  oracle::Real exact_third = oracle::div(oracle::Real(1.0), oracle::Real(3.0));
  CHECK(encloses(third, exact_third));
  CHECK(next_up(third.lo()) == third.hi());
  const Interval tenth = Interval(0.1) + Interval(0.2);
  CHECK(tenth.lo() <= 0.30000000000000004);
  CHECK(tenth.contains(0.30000000000000004));
}

TEST_CASE("elementary functions") {
  SUBCASE("sqrt") {
    CHECK(mc::sqrt(Interval(4, 9)) == Interval(2, 3));
    CHECK_THROWS_AS(mc::sqrt(Interval(-1, 4)), mc::DomainError);
    const Interval r2 = mc::sqrt(Interval(2));
    CHECK(r2.contains(std::numbers::sqrt2));
    CHECK(r2.width() <= 2.3e-16);
  }
  SUBCASE("sin on a monotone branch") {
    const Interval s = mc::sin(Interval(0, std::numbers::pi / 2));
    CHECK(s.lo() <= 0.0);
    CHECK(s.hi() >= 1.0);
    CHECK(s.width() <= 1.0 + 8 * std::numeric_limits<double>::epsilon());
  }
  SUBCASE("sin and cos across extrema") {
    CHECK(mc::sin(Interval(1, 2)).hi() == 1.0);
    CHECK(mc::cos(Interval(3, 3.5)).lo() == -1.0);
    CHECK(mc::cos(Interval(-0.1, 0.1)).hi() == 1.0);
    CHECK(mc::sin(Interval(-10, 10)) == Interval(-1, 1));
  }
  SUBCASE("abs") {
    CHECK(mc::abs(Interval(-3, 2)) == Interval(0, 3));
    CHECK(mc::abs(Interval(-3, -2)) == Interval(2, 3));
  }
  SUBCASE("integer powers") {
    CHECK(mc::pow_int(Interval(-2, 3), 2) == Interval(0, 9));
    CHECK(mc::pow_int(Interval(-2, 3), 3) == Interval(-8, 27));
    CHECK(mc::pow_int(Interval(2, 4), -1) == Interval(0.25, 0.5));
    CHECK(mc::pow_int(Interval(-2, 3), 0) == Interval(1));
  }
  SUBCASE("half-integer powers") {
    const Interval p = mc::pow_half(Interval(4), -3);
    CHECK(p == Interval(0.125));
    CHECK_THROWS_AS(mc::pow_half(Interval(-1, 4), 1), mc::DomainError);
  }
  SUBCASE("exp and log") {
    const Interval e = mc::exp(Interval(1));
    CHECK(e.contains(std::numbers::e));
    CHECK(mc::log(e).contains(1.0));
    CHECK_THROWS_AS(mc::log(Interval(0, 1)), mc::DomainError);
  }
}

TEST_CASE("binary operations enclose exact results (1e5 random cases each)") {
  std::mt19937_64 rng(20240611);
  int failures = 0;
  for (int i = 0; i < 100000; ++i) {
    const Interval a = random_interval(rng);
    const Interval b = random_interval(rng);
    const oracle::Real x(random_member(a, rng));
    const oracle::Real y(random_member(b, rng));
    if (!encloses(a + b, oracle::add(x, y))) ++failures;
    if (!encloses(a - b, oracle::sub(x, y))) ++failures;
    if (!encloses(a * b, oracle::mul(x, y))) ++failures;
    if (!b.contains_zero() && !encloses(a / b, oracle::div(x, y))) ++failures;
  }
  CHECK(failures == 0);
}

TEST_CASE("elementary functions enclose high-precision values") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-20.0, 20.0);
  int failures = 0;
  for (int i = 0; i < 20000; ++i) {
    double p = u(rng), q = u(rng);
    const Interval a(std::min(p, q), std::max(p, q));
    const double x = random_member(a, rng);
    oracle::Real xr(x, 300), r(mpfr_prec_t{300});
    mpfr_sin(r.get(), xr.get(), MPFR_RNDN);
    if (!encloses(mc::sin(a), r)) ++failures;
    mpfr_cos(r.get(), xr.get(), MPFR_RNDN);
    if (!encloses(mc::cos(a), r)) ++failures;
    mpfr_exp(r.get(), xr.get(), MPFR_RNDN);
    if (!encloses(mc::exp(a), r)) ++failures;
    const Interval pos = mc::abs(a);
    oracle::Real xa(std::fabs(x), 300);
    mpfr_sqrt(r.get(), xa.get(), MPFR_RNDN);
    if (!encloses(mc::sqrt(pos), r)) ++failures;
  }
  CHECK(failures == 0);
}

TEST_CASE("outward rounding costs at most a few ulp") {
  std::mt19937_64 rng(99);
  int worst = 0;
  for (int i = 0; i < 20000; ++i) {
    const double x = random_double(rng);
    const double y = random_double(rng);
    const oracle::Real xr(x), yr(y);
    const auto check = [&](const Interval& r, const oracle::Real& exact) {
      worst = std::max(worst, static_cast<int>(ulps_outside(r.lo(), exact.down(), true)));
      worst = std::max(worst, static_cast<int>(ulps_outside(r.hi(), exact.up(), false)));
    };
    check(Interval(x) + Interval(y), oracle::add(xr, yr));
    check(Interval(x) * Interval(y), oracle::mul(xr, yr));
    if (y != 0.0) check(Interval(x) / Interval(y), oracle::div(xr, yr));
  }
  CHECK(worst <= 4);
}

TEST_CASE("inclusion monotonicity") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 20000; ++i) {
    const Interval a = random_interval(rng);
    const Interval b = random_interval(rng);
    const Interval a2(next_down(a.lo()) * (a.lo() > 0 ? 0.5 : 2.0), a.hi() * (a.hi() > 0 ? 2.0 : 0.5) + 1.0);
    const Interval b2 = mc::hull(b, Interval(b.hi() + 1.0));
    REQUIRE(a.subset_of(a2));
    CHECK((a + b).subset_of(a2 + b2));
    CHECK((a - b).subset_of(a2 - b2));
    CHECK((a * b).subset_of(a2 * b2));
    if (!b2.contains_zero()) CHECK((a / b).subset_of(a2 / b2));
  }
}

TEST_CASE("vector norm") {
  CHECK(mc::norm2(IVector{Interval(3), Interval(4)}) == Interval(5));
  CHECK(mc::norm2(IVector(3, Interval(0))) == Interval(0));

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-5, 5);
  IVector box(3);
  for (auto& c : box) {
    double a = u(rng), b = u(rng);
    c = Interval(std::min(a, b), std::max(a, b));
  }
  const Interval n = mc::norm2(box);
  for (int i = 0; i < 10000; ++i) {
    double s = 0;
    for (const auto& c : box) {
      const double x = random_member(c, rng);
      s += x * x;
    }
    CHECK(n.contains(std::sqrt(s)));
  }
}

namespace {

double power_iteration_norm(const std::array<double, 4>& m) {
  // Spectral norm of a 2x2 matrix via power iteration on MᵀM.
  const double a = m[0] * m[0] + m[2] * m[2];
  const double b = m[0] * m[1] + m[2] * m[3];
  const double d = m[1] * m[1] + m[3] * m[3];
  double v0 = 1.0, v1 = 0.3, lambda = 0.0;
  for (int i = 0; i < 500; ++i) {
    const double w0 = a * v0 + b * v1;
    const double w1 = b * v0 + d * v1;
    const double n = std::hypot(w0, w1);
    if (n == 0.0) return 0.0;
    lambda = n / std::hypot(v0, v1);
    v0 = w0 / n;
    v1 = w1 / n;
  }
  return std::sqrt(lambda);
}

}  // namespace

TEST_CASE("operator norm bound") {
  const IMatrix diag{{Interval(3), Interval(0)}, {Interval(0), Interval(4)}};
  const double n = mc::opnorm_upper(diag);
  CHECK(n >= 4.0);
  CHECK(n <= 4.0 * (1.0 + 1e-10));
  CHECK(mc::opnorm_upper(IMatrix(3, 3)) == 0.0);

  std::mt19937_64 rng(5);
  std::normal_distribution<double> g(0.0, 3.0);
  for (int i = 0; i < 1000; ++i) {
    std::array<double, 4> m{g(rng), g(rng), g(rng), g(rng)};
    const double bound = mc::opnorm_upper(IMatrix::from_point(2, 2, m));
    CHECK(bound >= power_iteration_norm(m) * (1.0 - 1e-12));
  }
}

TEST_CASE("box operations") {
  const mc::Box unit{Interval(0, 1)};
  const auto pieces = mc::subdivide(unit, 0, 2);
  REQUIRE(pieces.size() == 2);
  CHECK(pieces[0][0] == Interval(0, 0.5));
  CHECK(pieces[1][0] == Interval(0.5, 1));
  CHECK(mc::hull(Interval(0, 1), Interval(2, 3)) == Interval(0, 3));
  CHECK_FALSE(mc::intersect(Interval(0, 1), Interval(2, 3)).has_value());
  CHECK(mc::intersect(Interval(0, 2), Interval(1, 3)) == Interval(1, 2));
  CHECK_THROWS_AS(mc::subdivide(unit, 0, 0), mc::DomainError);

  const mc::Box box{Interval(-1, 2), Interval(0, 0.3)};
  const auto slabs = mc::subdivide(box, 1, 7);
  CHECK(slabs.front()[1].lo() == 0.0);
  CHECK(slabs.back()[1].hi() == 0.3);
  for (std::size_t i = 1; i < slabs.size(); ++i) {
    CHECK(slabs[i][1].lo() == slabs[i - 1][1].hi());
    CHECK(slabs[i][0] == box[0]);
  }
}

TEST_CASE("decimal literals are enclosed") {
  const Interval mu = mc::from_decimal("0.004253863522");
  oracle::Real exact("0.004253863522", 300);
  CHECK(encloses(mu, exact));
  CHECK(mu.width() < 1e-17);
  CHECK_THROWS_AS(mc::from_decimal("0.00x"), mc::DomainError);
}

TEST_CASE("JSON round trip is bit exact") {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 2000; ++i) {
    const Interval a = random_interval(rng);
    const nlohmann::json j = a;
    const Interval back = nlohmann::json::parse(j.dump()).get<Interval>();
    CHECK(back == a);
  }
  const IMatrix m{{Interval(0.1, 0.2), Interval(1.0 / 3)}, {Interval(-1e-300), Interval(5e-324, 1)}};
  const IMatrix back = nlohmann::json::parse(nlohmann::json(m).dump()).get<IMatrix>();
  CHECK(back == m);
  CHECK_THROWS(nlohmann::json::parse("[2, 1]").get<Interval>());
}
