#include <doctest.h>

#include <cmath>
#include <random>

#include "mancert/cones.hpp"
#include "support/mpfr_real.hpp"

using mc::Interval;
using mc::IMatrix;
using mc::IVector;
using mc::QuadForm;

namespace {

IMatrix diag2(Interval a, Interval b) { return {{a, Interval(0)}, {Interval(0), b}}; }

// Smallest eigenvalue of the symmetric 2×2 matrix [[p, q], [q, r]].
double min_eig(double p, double q, double r) {
  const double t = 0.5 * (p + r);
  const double d = std::hypot(0.5 * (p - r), q);
  return t - d;
}

// V = BᵀQB − mQ for a point 2×2 matrix B and Q = diag(alpha, −beta).
double v_min_eig(const double b[4], double alpha, double beta, double m) {
  const double q0 = alpha, q1 = -beta;
  const double v00 = q0 * b[0] * b[0] + q1 * b[2] * b[2] - m * q0;
  const double v01 = q0 * b[0] * b[1] + q1 * b[2] * b[3];
  const double v11 = q0 * b[1] * b[1] + q1 * b[3] * b[3] - m * q1;
  return min_eig(v00, v01, v11);
}

double q_value(const QuadForm& q, double x, double y) {
  return q.alpha * x * x - q.beta * y * y;
}

}  // namespace

TEST_CASE("eval_Q on points and boxes") {
  const QuadForm qh = QuadForm::horizontal(0.5, 1, 1);
  CHECK(mc::eval_Q(qh, IVector{Interval(1), Interval(0)}) == Interval(0.5));
  CHECK(mc::eval_Q(qh, IVector{Interval(0), Interval(0)}) == Interval(0));

  const QuadForm qv = QuadForm::vertical(1e-4, 1, 3);
  const IVector u{Interval(-1e-7, 1e-7), Interval(-1e-11, 1e-11),
                  Interval(-2e-11, 1e-11), Interval(0, 1e-11)};
  const Interval range = mc::eval_Q(qv, u);
  std::mt19937_64 rng(3);
  for (int k = 0; k < 10000; ++k) {
    double p[4];
    for (int i = 0; i < 4; ++i) {
      p[i] = std::uniform_real_distribution<double>(u[i].lo(), u[i].hi())(rng);
    }
    const double v = p[0] * p[0] - 1e-4 * (p[1] * p[1] + p[2] * p[2] + p[3] * p[3]);
    CHECK(range.contains(v));
  }
}

TEST_CASE("diagonal map cone range is (b², a²)") {
  const IMatrix df = diag2(Interval(2), Interval(0.5));
  for (double alpha : {1.0, 0.5, 1e-3}) {
    const QuadForm qh = QuadForm::horizontal(alpha, 1, 1);
    CHECK(mc::map_cone_check(df, qh, 1.0).verified());
    CHECK_FALSE(mc::map_cone_check(df, qh, 5.0).verified());
    CHECK(mc::map_cone_check(df, qh, 0.25 + 1e-6).verified());
    CHECK(mc::map_cone_check(df, qh, 4.0 - 1e-6).verified());
    CHECK_FALSE(mc::map_cone_check(df, qh, 0.25).verified());
    CHECK_FALSE(mc::map_cone_check(df, qh, 4.0).verified());
    CHECK_FALSE(mc::map_cone_check(df, qh, 0.25 - 1e-6).verified());
    CHECK_FALSE(mc::map_cone_check(df, qh, 4.0 + 1e-6).verified());
  }
}

TEST_CASE("toy cone matrix margin") {
  const auto cert = mc::map_cone_check(diag2(Interval(2), Interval(0.5)),
                                       QuadForm{1.0, 1.0, 1, 1}, 1.0);
  REQUIRE(cert.verified());
  // V = diag(3, 0.75): the certified margin cannot exceed the smaller eigenvalue.
  CHECK(cert.verdict.margin <= 0.75);
  CHECK(cert.verdict.margin > 0.7);
}

TEST_CASE("perturbed map against a sampled eigenvalue oracle") {
  const Interval e(-0.01, 0.01);
  const IMatrix df{{Interval(1.9, 2.1), e}, {e, Interval(0.45, 0.55)}};
  const QuadForm q{1.0, 1.0, 1, 1};
  const auto cert = mc::map_cone_check(df, q, 1.0);
  CHECK(cert.verified());

  double worst = 1e300;
  const int n = 6;
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j)
      for (int k = 0; k <= n; ++k)
        for (int l = 0; l <= n; ++l) {
          const double b[4] = {1.9 + 0.2 * i / n, -0.01 + 0.02 * j / n,
                               -0.01 + 0.02 * k / n, 0.45 + 0.1 * l / n};
          worst = std::min(worst, v_min_eig(b, 1.0, 1.0, 1.0));
        }
  CHECK(worst > 0.0);
  CHECK(cert.verdict.margin <= worst);
}

TEST_CASE("map cone soundness on a nonlinear map") {
  // f(x, y) = (2x + 0.01 sin y, 0.5y + 0.01 sin x); Df lies in the box below on N.
  const Interval e(-0.01, 0.01);
  const IMatrix df{{Interval(2), e}, {e, Interval(0.5)}};
  const auto f = [](double x, double y) {
    return std::pair{2 * x + 0.01 * std::sin(y), 0.5 * y + 0.01 * std::sin(x)};
  };
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> in_n(-1.0, 1.0);
  for (auto [alpha, beta, m] : {std::tuple{0.3, 1.0, 0.5}, std::tuple{1.0, 0.2, 3.0}}) {
    const QuadForm q{alpha, beta, 1, 1};
    REQUIRE(mc::map_cone_check(df, q, m).verified());
    for (int k = 0; k < 10000; ++k) {
      const double x1 = in_n(rng), y1 = in_n(rng), x2 = in_n(rng), y2 = in_n(rng);
      const auto [fx1, fy1] = f(x1, y1);
      const auto [fx2, fy2] = f(x2, y2);
      CHECK(q_value(q, fx1 - fx2, fy1 - fy2) > m * q_value(q, x1 - x2, y1 - y2));
    }
  }
}

TEST_CASE("flow cone check on a diagonal linear field") {
  const mc::FlowBlocks blocks{IMatrix{{Interval(2)}}, IMatrix{{Interval(-1)}},
                              IMatrix{{Interval(0)}}, IMatrix{{Interval(0)}}};
  const auto ok = mc::flow_cone_check(blocks, 0.5, 0.5, -0.9, 1.9);
  CHECK(ok.verified());
  CHECK(ok.eps1_norm == 0.0);
  CHECK_FALSE(mc::flow_cone_check(blocks, 0.5, 0.5, -0.9, 2.1).verified());

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int k = 0; k < 2000; ++k) {
    const double a = u(rng), b = u(rng), c_h = u(rng), c_v = u(rng);
    const mc::FlowBlocks s{IMatrix{{Interval(a)}}, IMatrix{{Interval(b)}},
                           IMatrix{{Interval(0)}}, IMatrix{{Interval(0)}}};
    const auto r = mc::flow_cone_check(s, 0.25, 0.25, c_h, c_v);
    const bool scalar = a > c_h && a > c_v && b < c_h && b < c_v;
    CHECK(r.verified() == scalar);
  }
}

TEST_CASE("flow cone check accounts for off-diagonal blocks") {
  const double eps = 1e-3;
  const mc::FlowBlocks blocks{IMatrix{{Interval(2)}}, IMatrix{{Interval(-1)}},
                              IMatrix{{Interval(-eps, eps)}}, IMatrix{{Interval(-eps, eps)}}};
  const auto r = mc::flow_cone_check(blocks, 0.5, 0.5, -0.9, 1.9);
  CHECK(r.verified());
  CHECK(r.eps1_norm >= eps);
  // With ‖ε₂‖/α_h large the Q_h expansion condition must fail.
  CHECK_FALSE(mc::flow_cone_check(blocks, 1e-5, 0.5, -0.9, 1.9).verified());
}

TEST_CASE("cone membership implies the unit balls") {
  CHECK(mc::cone_membership(IVector{Interval(0), Interval(0)}, 0.3, 0.3, 1));
  CHECK_FALSE(mc::cone_membership(IVector{Interval(2), Interval(0)}, 0.3, 0.3, 1));

  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  std::uniform_real_distribution<double> a(0.01, 0.99);
  int accepted = 0;
  for (int k = 0; k < 10000; ++k) {
    const double ah = a(rng), av = a(rng);
    const double x0 = u(rng), x1 = u(rng), y0 = u(rng);
    const IVector p{Interval(x0), Interval(x1), Interval(y0)};
    if (mc::cone_membership(p, ah, av, 2)) {
      ++accepted;
      CHECK(x0 * x0 + x1 * x1 <= 1.0);
      CHECK(std::fabs(y0) <= 1.0);
    }
  }
  CHECK(accepted > 100);
}

TEST_CASE("quadratic form bounds on balls") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::uniform_real_distribution<double> a(0.01, 0.99);
  for (int k = 0; k < 10000; ++k) {
    const double ah = a(rng), av = a(rng), r = std::fabs(u(rng));
    const double x = u(rng), y = u(rng);
    const QuadForm qh = QuadForm::horizontal(ah, 1, 1);
    const QuadForm qv = QuadForm::vertical(av, 1, 1);
    const Interval vh = mc::eval_Q(qh, IVector{Interval(x), Interval(y)});
    const Interval vv = mc::eval_Q(qv, IVector{Interval(x), Interval(y)});
    if (std::fabs(y) <= r) CHECK(vh.hi() >= -r * r);
    if (std::fabs(x) <= r) CHECK(vv.lo() <= r * r);
    if (vv.hi() <= 0.0) CHECK(vh.hi() <= 0.0);
    if (vh.lo() >= 0.0) CHECK(vv.lo() >= 0.0);
  }
}

TEST_CASE("contraction constant") {
  const double c0 = mc::contraction_constant(1e-300, 1e-300);
  CHECK(c0 >= std::sqrt(2.0));
  CHECK(c0 <= std::nextafter(std::nextafter(std::sqrt(2.0), 3.0), 3.0));
  const double c1 = mc::contraction_constant(0.5, 1.0 - 1e-16);
  CHECK(c1 == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(mc::contraction_constant(std::sqrt(0.5), std::sqrt(0.5)) >= 2.0);

  oracle::Real prod = oracle::mul(oracle::Real(1e-8), oracle::Real(1e-4));
  oracle::Real exact = oracle::div(oracle::Real(2.0), oracle::sub(oracle::Real(1.0), prod));
  mpfr_sqrt(exact.get(), exact.get(), MPFR_RNDN);
  const double c = mc::contraction_constant(1e-8, 1e-4);
  CHECK(exact.at_most(c));
  CHECK(c <= std::nextafter(std::nextafter(exact.up(), 3.0), 3.0));
  CHECK(c == doctest::Approx(1.41421357).epsilon(1e-8));
}

TEST_CASE("certificates serialize") {
  const auto cert = mc::map_cone_check(diag2(Interval(2), Interval(0.5)),
                                       QuadForm::horizontal(0.5, 1, 1), 1.0,
                                       IVector{Interval(-1, 1), Interval(-1, 1)});
  nlohmann::json j = cert;
  CHECK(j["verdict"]["verified"] == true);
  CHECK(j["form"]["alpha"] == 0.5);
  CHECK(j.contains("domain"));
}
