#include <doctest.h>

#include <cmath>
#include <random>

#include "mancert/manifold.hpp"

using mc::Interval;
using mc::IMatrix;
using mc::IVector;
using mc::Point;
using mc::QuadForm;

namespace {

const IVector kUnitSquare{Interval(-1, 1), Interval(-1, 1)};
const IVector kOrigin{Interval(0), Interval(0)};

IMatrix diag2(double a, double b) {
  return {{Interval(a), Interval(0)}, {Interval(0), Interval(b)}};
}

double norm(double x, double y) { return std::hypot(x, y); }

double q_of(const QuadForm& q, const Point& p) {
  double x2 = 0.0, y2 = 0.0;
  for (std::size_t i = 0; i < q.u_dim; ++i) x2 += p[i] * p[i];
  for (std::size_t i = q.u_dim; i < p.size(); ++i) y2 += p[i] * p[i];
  return q.alpha * x2 - q.beta * y2;
}

struct MapCerts {
  mc::ConeCertificate h, v;
};

MapCerts certs_for(const IMatrix& df, double ah, double av, double mh, double mv) {
  return {mc::map_cone_check(df, QuadForm::horizontal(ah, 1, 1), mh, kUnitSquare),
          mc::map_cone_check(df, QuadForm::vertical(av, 1, 1), mv, kUnitSquare)};
}

}  // namespace

TEST_CASE("map certificates for the diagonal map") {
  const IMatrix df = diag2(2.0, 0.5);
  const auto c = certs_for(df, 0.5, 0.5, 0.3, 3.0);
  REQUIRE(c.h.verified());
  REQUIRE(c.v.verified());
  const auto cert = mc::certify(mc::ManifoldKind::MapUnstable, c.h, c.v, kOrigin);
  CHECK(cert.rate_h == 0.3);
  CHECK(cert.rate_v == 3.0);
  CHECK(cert.radius <= std::sqrt(0.5));
  CHECK(cert.radius == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));
  CHECK(cert.lipschitz >= std::sqrt(0.5));
  CHECK(cert.contraction_constant >= 2.0 / std::sqrt(1.5));
  CHECK(cert.graph_window[0].subset_of(Interval(-0.71, 0.71)));
  CHECK(cert.graph_window[1] == Interval(-1, 1));

  const auto low = certs_for(df, 0.5, 0.5, 0.3, 0.9);
  REQUIRE(low.v.verified());
  CHECK_THROWS_AS(mc::certify(mc::ManifoldKind::MapUnstable, low.h, low.v, kOrigin),
                  mc::RateOrderViolation);

  const auto stable = mc::certify(mc::ManifoldKind::MapStable, c.h, c.v, kOrigin);
  CHECK(stable.lipschitz >= std::sqrt(0.5));
  CHECK(stable.graph_window[0] == Interval(-1, 1));

  const auto bad = certs_for(df, 0.5, 0.5, 0.3, 5.0);
  CHECK_THROWS_AS(mc::certify(mc::ManifoldKind::MapUnstable, bad.h, bad.v, kOrigin),
                  mc::UnverifiedCones);
  CHECK_THROWS_AS(mc::certify(mc::ManifoldKind::MapUnstable, c.v, c.h, kOrigin),
                  mc::UnverifiedCones);
}

TEST_CASE("flow certificates") {
  const mc::FlowBlocks blocks{IMatrix{{Interval(2)}}, IMatrix{{Interval(-1)}},
                              IMatrix{{Interval(0)}}, IMatrix{{Interval(0)}}};
  const auto k = mc::flow_cone_check(blocks, 1e-8, 1e-4, -0.9, 1.9);
  REQUIRE(k.verified());
  const auto cert =
      mc::certify(mc::ManifoldKind::FlowUnstable, k, kUnitSquare, kOrigin, 1);
  CHECK(cert.radius <= std::sqrt(1.0 - 1e-4));
  CHECK(cert.radius == doctest::Approx(std::sqrt(1.0 - 1e-4)).epsilon(1e-15));
  CHECK(cert.lipschitz >= 1e-4);
  CHECK(mc::certify(mc::ManifoldKind::FlowStable, k, kUnitSquare, kOrigin, 1).lipschitz >=
        1e-2);

  const auto positive = mc::flow_cone_check(blocks, 1e-8, 1e-4, 0.5, 1.9);
  REQUIRE(positive.verified());
  CHECK_THROWS_AS(mc::certify(mc::ManifoldKind::FlowStable, positive, kUnitSquare,
                              kOrigin, 1),
                  mc::RateOrderViolation);
  nlohmann::json j = cert;
  CHECK(j["kind"] == "FlowUnstable");
  CHECK(j["balls"] == "closed");
}

TEST_CASE("straightening map") {
  const QuadForm q = QuadForm::vertical(0.3, 2, 2);
  const double c = 0.7;
  const Point u{0.3, -0.4};
  const Point p = mc::phi_coords(u, {0.0, 0.0}, q, c);
  CHECK(p[0] == doctest::Approx(0.3 * std::sqrt(c)));
  CHECK(p[1] == doctest::Approx(-0.4 * std::sqrt(c)));
  CHECK(p[2] == 0.0);

  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> d(-2.0, 2.0);
  for (int k = 0; k < 1000; ++k) {
    const Point uu{d(rng), d(rng)}, s{d(rng), d(rng)};
    const Point x = mc::phi_coords(uu, s, q, c);
    const Point back = mc::phi_inverse({x[0], x[1]}, s, q, c);
    CHECK(back[0] == doctest::Approx(uu[0]).epsilon(1e-12));
    CHECK(back[1] == doctest::Approx(uu[1]).epsilon(1e-12));
    CHECK(back[2] == s[0]);

    const double n = std::hypot(uu[0], uu[1]);
    const Point edge = mc::phi_coords({uu[0] / n, uu[1] / n}, s, q, c);
    CHECK(q_of(q, edge) == doctest::Approx(c).epsilon(1e-12));
  }
  CHECK_THROWS_AS(mc::phi_coords(u, {0.0, 0.0}, q, 0.0), mc::DomainError);
}

TEST_CASE("straightening keeps vertical differences in the negative cone") {
  std::mt19937_64 rng(37);
  std::uniform_real_distribution<double> d(-1.5, 1.5);
  std::uniform_real_distribution<double> a(0.01, 2.0);
  for (int k = 0; k < 10000; ++k) {
    const QuadForm q{a(rng), a(rng), 1, 2};
    const double c = a(rng);
    const Point u{d(rng)}, s1{d(rng), d(rng)}, s2{d(rng), d(rng)};
    const Point p1 = mc::phi_coords(u, s1, q, c);
    const Point p2 = mc::phi_coords(u, s2, q, c);
    const Point diff{p1[0] - p2[0], p1[1] - p2[1], p1[2] - p2[2]};
    CHECK(q_of(q, diff) <= 1e-12);
  }
}

TEST_CASE("chebyshev abscissae") {
  const auto xs = mc::chebyshev_abscissae(257);
  CHECK(xs.front() == -1.0);
  CHECK(xs.back() == 1.0);
  CHECK(xs[128] == 0.0);
  CHECK(std::is_sorted(xs.begin(), xs.end()));
}

TEST_CASE("graph transform of the diagonal map keeps the axis") {
  const QuadForm qv = QuadForm::vertical(0.25, 1, 1);
  const auto f = [](const Point& p) { return Point{2 * p[0], 0.5 * p[1]}; };
  const auto disc = mc::graph_transform_1d(f, mc::HorizontalDisc1D::initial(0.25, 2), qv,
                                           0.75, 5);
  for (std::size_t i = 0; i < disc.points.size(); ++i) {
    CHECK(disc.points[i][1] == 0.0);
    CHECK(disc.points[i][0] == doctest::Approx(disc.abscissae[i] * std::sqrt(0.75)));
  }
}

TEST_CASE("graph transform recovers the shear eigendirection") {
  const double alpha_v = 0.25, c_star = 0.75, alpha_h = 0.25;
  const QuadForm qv = QuadForm::vertical(alpha_v, 1, 1);
  const auto f = [](const Point& p) { return Point{2 * p[0], 0.5 * p[1] + 0.1 * p[0]}; };
  auto disc = mc::HorizontalDisc1D::initial(alpha_v, 2);
  double sup = 1.0;
  for (int it = 0; it < 30; ++it) {
    disc = mc::graph_transform_1d(f, disc, qv, c_star, 1);
    for (double end : {-1.0, 1.0}) {
      CHECK(q_of(qv, disc(end)) == doctest::Approx(c_star).epsilon(1e-12));
    }
    double err = 0.0;
    for (const Point& p : disc.points) err = std::max(err, std::fabs(p[1] - p[0] / 15.0));
    CHECK(err <= sup + 1e-15);
    sup = err;
  }
  CHECK(sup <= 1e-10);

  const double lip = std::sqrt(alpha_h);
  for (std::size_t i = 0; i < disc.points.size(); ++i) {
    for (std::size_t j = i + 1; j < disc.points.size(); j += 7) {
      const auto& a = disc.points[i];
      const auto& b = disc.points[j];
      CHECK(std::fabs(a[1] - b[1]) <= lip * std::fabs(a[0] - b[0]) + 1e-13);
    }
  }
}

TEST_CASE("graph transform reports missing brackets") {
  const QuadForm qv = QuadForm::vertical(0.25, 1, 1);
  const auto shrink = [](const Point& p) { return Point{0.5 * p[0], p[1]}; };
  CHECK_THROWS_AS(mc::graph_transform_1d(shrink, mc::HorizontalDisc1D::initial(0.25, 2),
                                         qv, 0.75, 1),
                  mc::ResolutionError);
}

TEST_CASE("backward orbits on the unstable manifold contract at rate sqrt(m_v)") {
  // f(x, y) = (2x, 0.5y + 0.05x²) has w^u(x) = (0.05/3.5)x².
  const double ah = 0.25, av = 0.25, mh = 0.3, mv = 3.0;
  const IMatrix df{{Interval(2), Interval(0)}, {Interval(-0.1, 0.1), Interval(0.5)}};
  const auto c = certs_for(df, ah, av, mh, mv);
  REQUIRE(c.h.verified());
  REQUIRE(c.v.verified());
  const auto cert = mc::certify(mc::ManifoldKind::MapUnstable, c.h, c.v, kOrigin);
  const double cw = 0.05 / 3.5;
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  for (int s = 0; s < 200; ++s) {
    const double x0 = d(rng);
    for (int k = 0; k >= -60; --k) {
      const double x = std::ldexp(x0, k), y = cw * x * x;
      REQUIRE(ah * x * x >= y * y);
      CHECK(norm(x, y) <= cert.contraction_constant * std::pow(std::sqrt(mv), k));
      CHECK(std::fabs(y) <= cert.lipschitz * std::fabs(x));
    }
  }
}

TEST_CASE("forward orbits on the stable manifold contract at rate sqrt(m_h)") {
  // f(x, y) = (2x + 0.05y², 0.5y) has w^s(y) = −(0.05/1.75)y².
  const double ah = 0.25, av = 0.25, mh = 0.3, mv = 3.0;
  const IMatrix df{{Interval(2), Interval(-0.1, 0.1)}, {Interval(0), Interval(0.5)}};
  const auto c = certs_for(df, ah, av, mh, mv);
  REQUIRE(c.h.verified());
  REQUIRE(c.v.verified());
  const auto cert = mc::certify(mc::ManifoldKind::MapStable, c.h, c.v, kOrigin);
  const double cw = -0.05 / 1.75;
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  for (int s = 0; s < 200; ++s) {
    const double y0 = d(rng);
    double x = cw * y0 * y0, y = y0;
    for (int k = 0; k <= 60; ++k) {
      REQUIRE(x * x <= av * y * y + 1e-300);
      CHECK(norm(x, y) <= cert.contraction_constant * std::pow(std::sqrt(mh), k));
      CHECK(std::fabs(x) <= cert.lipschitz * std::fabs(y));
      y = 0.5 * y;
      x = cw * y * y;
    }
  }
}
