#include "mancert/rtbp.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "mancert/json_io.hpp"
#include "mancert/linalg.hpp"

namespace mc::rtbp {

const std::array<Poly, 4> kK = {{
    {0.0, 1.0, 0.0, 0.0},
    {0.0, 0.0, -0.4426997319120566, 0.2117307906593041},
    {0.0, 0.0, 0.7204702544171099, -0.2077414984788253},
    {0.0, 0.0, 0.6096754412253178, -1.6248371332133488},
}};

RtbpParams::RtbpParams(Interval m) : mu(m) {
  if (!(mu.lo() > 0.0 && mu.hi() < 1.0)) {
    throw DomainError("mass parameter must lie in (0, 1)");
  }
}

namespace {

struct Distances {
  Interval inv_r1, inv_r2, inv_r1_3, inv_r2_3, inv_r1_5, inv_r2_5;
  Interval dx1, dx2;
};

Distances distances(const Interval& x, const Interval& y, const Interval& mu,
                    bool second_order) {
  Distances d;
  d.dx1 = x - mu;
  d.dx2 = x - mu + Interval(1.0);
  const Interval y2 = sqr(y);
  const Interval r1sq = sqr(d.dx1) + y2;
  const Interval r2sq = sqr(d.dx2) + y2;
  if (!(r1sq.lo() > 0.0) || !(r2sq.lo() > 0.0)) {
    throw CollisionSingularity("state box touches a primary");
  }
  const Interval r1 = sqrt(r1sq), r2 = sqrt(r2sq);
  d.inv_r1 = Interval(1.0) / r1;
  d.inv_r2 = Interval(1.0) / r2;
  d.inv_r1_3 = pow_int(d.inv_r1, 3);
  d.inv_r2_3 = pow_int(d.inv_r2, 3);
  if (second_order) {
    d.inv_r1_5 = d.inv_r1_3 * sqr(d.inv_r1);
    d.inv_r2_5 = d.inv_r2_3 * sqr(d.inv_r2);
  }
  return d;
}

void check_state(std::size_t n) {
  if (n != 4) throw DomainError("PCR3BP states have four coordinates");
}

}  // namespace

Interval hamiltonian(const IVector& s, const RtbpParams& p) {
  check_state(s.size());
  const Distances d = distances(s[0], s[1], p.mu, false);
  return Interval(0.5) * (sqr(s[2]) + sqr(s[3])) + s[1] * s[2] - s[0] * s[3] -
         (Interval(1.0) - p.mu) * d.inv_r1 - p.mu * d.inv_r2;
}

Interval jacobi(const IVector& s, const RtbpParams& p) {
  check_state(s.size());
  const Distances d = distances(s[0], s[1], p.mu, false);
  const Interval omega = Interval(0.5) * (sqr(s[0]) + sqr(s[1])) +
                         (Interval(1.0) - p.mu) * d.inv_r1 + p.mu * d.inv_r2;
  const Interval xdot = s[2] + s[1];
  const Interval ydot = s[3] - s[0];
  return Interval(2.0) * omega - (sqr(xdot) + sqr(ydot));
}

IVector vector_field(const IVector& s, const RtbpParams& p) {
  check_state(s.size());
  const Distances d = distances(s[0], s[1], p.mu, false);
  const Interval m1 = Interval(1.0) - p.mu;
  const Interval k = m1 * d.inv_r1_3, l = p.mu * d.inv_r2_3;
  return {s[2] + s[1], s[3] - s[0], s[3] - k * d.dx1 - l * d.dx2,
          -s[2] - (k + l) * s[1]};
}

IMatrix jacobian(const IVector& s, const RtbpParams& p) {
  check_state(s.size());
  const Distances d = distances(s[0], s[1], p.mu, true);
  const Interval m1 = Interval(1.0) - p.mu;
  const Interval three(3.0);
  const Interval a5 = three * m1 * d.inv_r1_5, b5 = three * p.mu * d.inv_r2_5;
  const Interval k3 = m1 * d.inv_r1_3 + p.mu * d.inv_r2_3;
  const Interval uxx = a5 * sqr(d.dx1) + b5 * sqr(d.dx2) - k3;
  const Interval uxy = (a5 * d.dx1 + b5 * d.dx2) * s[1];
  const Interval uyy = (a5 + b5) * sqr(s[1]) - k3;
  const Interval o(0.0), i(1.0);
  return {{o, i, i, o}, {-i, o, o, i}, {uxx, uxy, o, i}, {uxy, uyy, -i, o}};
}

double hamiltonian(const Point& s, double mu) {
  check_state(s.size());
  const double r1 = std::hypot(s[0] - mu, s[1]);
  const double r2 = std::hypot(s[0] - mu + 1.0, s[1]);
  return 0.5 * (s[2] * s[2] + s[3] * s[3]) + s[1] * s[2] - s[0] * s[3] -
         (1.0 - mu) / r1 - mu / r2;
}

Point vector_field(const Point& s, double mu) {
  check_state(s.size());
  const double dx1 = s[0] - mu, dx2 = s[0] - mu + 1.0;
  const double r1 = std::hypot(dx1, s[1]), r2 = std::hypot(dx2, s[1]);
  const double k = (1.0 - mu) / (r1 * r1 * r1), l = mu / (r2 * r2 * r2);
  return {s[2] + s[1], s[3] - s[0], s[3] - k * dx1 - l * dx2, -s[2] - (k + l) * s[1]};
}

std::array<double, 16> jacobian(const Point& s, double mu) {
  check_state(s.size());
  const double dx1 = s[0] - mu, dx2 = s[0] - mu + 1.0, y = s[1];
  const double r1 = std::hypot(dx1, y), r2 = std::hypot(dx2, y);
  const double r13 = r1 * r1 * r1, r23 = r2 * r2 * r2;
  const double a5 = 3.0 * (1.0 - mu) / (r13 * r1 * r1), b5 = 3.0 * mu / (r23 * r2 * r2);
  const double k3 = (1.0 - mu) / r13 + mu / r23;
  const double uxx = a5 * dx1 * dx1 + b5 * dx2 * dx2 - k3;
  const double uxy = (a5 * dx1 + b5 * dx2) * y;
  const double uyy = (a5 + b5) * y * y - k3;
  return {0, 1, 1, 0, -1, 0, 0, 1, uxx, uxy, 0, 1, uxy, uyy, -1, 0};
}

namespace {

Tape build_tape(const Interval* mu) {
  Tape t(mu ? 4 : 5);
  const auto x = t.var(0), y = t.var(1), px = t.var(2), py = t.var(3);
  const auto m = mu ? t.constant(*mu) : t.var(4);
  const auto one = t.constant(Interval(1.0));
  const auto m1 = mu ? t.constant(Interval(1.0) - *mu) : t.sub(one, m);
  const auto dx1 = t.sub(x, m);
  const auto dx2 = t.add(dx1, one);
  const auto y2 = t.sqr(y);
  const auto i1 = t.pow_half(t.add(t.sqr(dx1), y2), -3);
  const auto i2 = t.pow_half(t.add(t.sqr(dx2), y2), -3);
  const auto k = t.mul(m1, i1);
  const auto l = t.mul(m, i2);
  std::vector<Tape::Node> f{t.add(px, y), t.sub(py, x),
                            t.sub(t.sub(py, t.mul(k, dx1)), t.mul(l, dx2)),
                            t.sub(t.neg(px), t.mul(t.add(k, l), y))};
  if (!mu) f.push_back(t.constant(Interval(0.0)));
  t.set_field(std::move(f));
  return t;
}

}  // namespace

Tape field_tape(const Interval& mu) {
  RtbpParams check(mu);
  return build_tape(&check.mu);
}

Tape field_tape_with_mu() { return build_tape(nullptr); }

IVector symmetry_S(const IVector& s) {
  check_state(s.size());
  return {s[0], -s[1], -s[2], s[3]};
}

Point symmetry_S(const Point& s) {
  check_state(s.size());
  return {s[0], -s[1], -s[2], s[3]};
}

Interval collinear_equation(const Interval& x, const Interval& mu) {
  // With X − μ < 0 < X − μ + 1 the distances are μ − X and X − μ + 1.
  return x + (Interval(1.0) - mu) / sqr(x - mu) - mu / sqr(x - mu + Interval(1.0));
}

namespace {

Interval collinear_derivative(const Interval& x, const Interval& mu) {
  return Interval(1.0) + Interval(2.0) * (Interval(1.0) - mu) / pow_int(mu - x, 3) +
         Interval(2.0) * mu / pow_int(x - mu + Interval(1.0), 3);
}

double collinear_guess(double mu) {
  double g = std::cbrt(mu / 3.0);
  for (int i = 0; i < 100; ++i) {
    const double x = mu - 1.0 + g;
    const double f = x + (1.0 - mu) / ((x - mu) * (x - mu)) -
                     mu / ((x - mu + 1.0) * (x - mu + 1.0));
    const double df = 1.0 + 2.0 * (1.0 - mu) / std::pow(mu - x, 3) +
                      2.0 * mu / std::pow(x - mu + 1.0, 3);
    const double step = f / df;
    g -= step;
    if (std::fabs(step) < 1e-17) break;
  }
  return mu - 1.0 + g;
}

Box newton_1d(const std::function<Interval(const Interval&)>& f,
              const std::function<Interval(const Interval&)>& df, double x0,
              double radius, const char* what) {
  const Box x{Interval(x0 - radius, x0 + radius)};
  const NewtonResult r = interval_newton(
      [&](const Box& b) { return IVector{f(b[0])}; },
      [&](const Box& b) { return IMatrix{{df(b[0])}}; }, x, Point{x0});
  if (r.verdict != NewtonVerdict::UniqueRoot) {
    throw Inconclusive(std::string("interval Newton failed for ") + what);
  }
  return *r.root_box;
}

}  // namespace

IVector libration_L1(const RtbpParams& p) {
  const Interval mu = p.mu;
  const double x0 = collinear_guess(mu.mid());
  const double radius = 1e-9 + 1e3 * mu.width();
  const Box root = newton_1d([&](const Interval& x) { return collinear_equation(x, mu); },
                             [&](const Interval& x) { return collinear_derivative(x, mu); },
                             x0, radius, "the L1 collinear equation");
  return {root[0], Interval(0.0), Interval(0.0), root[0]};
}

LocalChart jordan_basis(const RtbpParams& p) {
  LocalChart ch;
  ch.mu = p.mu;
  ch.l1 = libration_L1(p);
  const Interval mu = p.mu, one(1.0), two(2.0);
  ch.gamma = ch.l1[0] + one - mu;
  const Interval g3 = pow_int(ch.gamma, 3);
  ch.c2 = (mu + (one - mu) * g3 / pow_int(one - ch.gamma, 3)) / g3;
  const Interval c2 = ch.c2;

  // λ² and −v² are the roots of z² − (c₂ − 2)z + (1 + c₂ − 2c₂²).
  const Interval b = c2 - two, c0 = one + c2 - two * sqr(c2);
  const auto poly = [&](const Interval& z) { return sqr(z) - b * z + c0; };
  const auto dpoly = [&](const Interval& z) { return two * z - b; };
  const double cm = c2.mid();
  const double disc = std::sqrt(9.0 * cm * cm - 8.0 * cm);
  const double z_u = 0.5 * ((cm - 2.0) + disc), z_c = 0.5 * ((cm - 2.0) - disc);
  const double rad = 1e-9 + 1e3 * c2.width();
  const Interval lam2 = newton_1d(poly, dpoly, z_u, rad, "lambda squared")[0];
  const Interval v2 = -newton_1d(poly, dpoly, z_c, rad, "v squared")[0];
  ch.lambda = sqrt(lam2);
  ch.v = sqrt(v2);
  const Interval lam = ch.lambda, v = ch.v;
  const Interval three(3.0), four(4.0), five(5.0), six(6.0);
  ch.s1 = sqrt(two * lam * ((four + three * c2) * lam2 + four + five * c2 - six * sqr(c2)));
  ch.s2 = sqrt(v * ((four + three * c2) * v2 - four - five * c2 + six * sqr(c2)));
  const Interval s1 = ch.s1, s2 = ch.s2, o(0.0);
  const Interval l3 = lam2 * lam, v3 = v2 * v;
  const Interval a = one - two * c2;
  ch.c = IMatrix{
      {two * lam / s1, -two * lam / s1, o, two * v / s2},
      {(lam2 - two * c2 - one) / s1, (lam2 - two * c2 - one) / s1,
       (-v2 - two * c2 - one) / s2, o},
      {(lam2 + two * c2 + one) / s1, (lam2 + two * c2 + one) / s1,
       (-v2 + two * c2 + one) / s2, o},
      {(l3 + a * lam) / s1, (-l3 - a * lam) / s1, o, (-v3 + a * v) / s2}};
  ch.l1_point = mid(ch.l1);
  const std::vector<double> cm_point = mid(ch.c);
  std::copy(cm_point.begin(), cm_point.end(), ch.c_point.begin());
  return ch;
}

IMatrix jordan_residual(const LocalChart& chart) {
  const RtbpParams p(chart.mu);
  return inverse_enclosure(chart.c) * jacobian(chart.l1, p) * chart.c;
}

namespace {

template <class T>
T horner(const Poly& c, const T& x, int derivative) {
  std::array<double, 4> d = c;
  for (int k = 0; k < derivative; ++k) {
    for (std::size_t i = 0; i + 1 < d.size(); ++i) d[i] = d[i + 1] * static_cast<double>(i + 1);
    d.back() = 0.0;
  }
  T r = T(d[3]);
  for (int i = 2; i >= 0; --i) r = r * x + T(d[i]);
  return r;
}

template <class T, class V>
V psi_generic(const V& q) {
  if (q.size() != 4) throw DomainError("local coordinates have four components");
  const T x = q[0];
  V out(4);
  T first = horner(kK[0], x, 0);
  for (std::size_t i = 1; i < 4; ++i) first = first - q[i] * horner(kK[i], x, 1);
  out[0] = first;
  const T k0p = horner(kK[0], x, 1);
  for (std::size_t i = 1; i < 4; ++i) out[i] = horner(kK[i], x, 0) + q[i] * k0p;
  return out;
}

}  // namespace

IVector psi(const IVector& q) { return psi_generic<Interval>(q); }
Point psi(const Point& q) { return psi_generic<double>(q); }

IMatrix dpsi(const IVector& q) {
  if (q.size() != 4) throw DomainError("local coordinates have four components");
  const Interval x = q[0];
  IMatrix d(4, 4);
  Interval d00 = horner(kK[0], x, 1);
  for (std::size_t i = 1; i < 4; ++i) {
    d00 -= q[i] * horner(kK[i], x, 2);
    d(0, i) = -horner(kK[i], x, 1);
    d(i, 0) = horner(kK[i], x, 1) + q[i] * horner(kK[0], x, 2);
    for (std::size_t j = 1; j < 4; ++j) d(i, j) = Interval(i == j ? 1.0 : 0.0) * horner(kK[0], x, 1);
  }
  d(0, 0) = d00;
  return d;
}

IMatrix d2psi_times(const IVector& q, const IVector& w) {
  if (q.size() != 4 || w.size() != 4) {
    throw DomainError("local coordinates have four components");
  }
  const Interval x = q[0];
  IMatrix m(4, 4);
  Interval m00 = horner(kK[0], x, 2) * w[0];
  for (std::size_t i = 1; i < 4; ++i) {
    const Interval k2 = horner(kK[i], x, 2);
    m00 -= q[i] * horner(kK[i], x, 3) * w[0] + k2 * w[i];
    m(0, i) = -k2 * w[0];
    m(i, 0) = (k2 + q[i] * horner(kK[0], x, 3)) * w[0] + horner(kK[0], x, 2) * w[i];
    m(i, i) = horner(kK[0], x, 2) * w[0];
  }
  m(0, 0) = m00;
  return m;
}

namespace {

IMatrix chart_matrix(const LocalChart& chart) {
  return IMatrix::from_point(4, 4, chart.c_point);
}

}  // namespace

IVector phi(const LocalChart& chart, const IVector& q) {
  return IVector::from_point(chart.l1_point) + chart_matrix(chart) * psi(q);
}

Point phi(const LocalChart& chart, const Point& q) {
  const Point s = psi(q);
  Point x = chart.l1_point;
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) x[i] += chart.c_point[i * 4 + j] * s[j];
  }
  return x;
}

IMatrix dphi(const LocalChart& chart, const IVector& q) {
  return chart_matrix(chart) * dpsi(q);
}

IMatrix d2phi_times(const LocalChart& chart, const IVector& q, const IVector& w) {
  return chart_matrix(chart) * d2psi_times(q, w);
}

IVector local_field(const IVector& q, const LocalChart& chart, const RtbpParams& p) {
  return solve_interval_linear(dphi(chart, q), vector_field(phi(chart, q), p));
}

IMatrix local_jacobian(const IVector& q, const LocalChart& chart, const RtbpParams& p) {
  const IMatrix dp = dphi(chart, q);
  const IVector x = phi(chart, q);
  const IVector fhat = solve_interval_linear(dp, vector_field(x, p));
  return solve_interval_linear(dp, jacobian(x, p) * dp - d2phi_times(chart, q, fhat));
}

Point local_field(const Point& q, const LocalChart& chart, double mu) {
  const IMatrix dp = dphi(chart, IVector::from_point(q));
  Eigen::Matrix4d m;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m(i, j) = dp(i, j).mid();
  const Point f = vector_field(phi(chart, q), mu);
  const Eigen::Vector4d r = m.partialPivLu().solve(Eigen::Vector4d(f[0], f[1], f[2], f[3]));
  return {r[0], r[1], r[2], r[3]};
}

void to_json(nlohmann::json& j, const LocalChart& chart) {
  nlohmann::json k = nlohmann::json::array();
  for (const Poly& p : kK) k.push_back(p);
  j = {{"mu", chart.mu},         {"L1", chart.l1},     {"gamma", chart.gamma},
       {"c2", chart.c2},         {"lambda", chart.lambda}, {"v", chart.v},
       {"s1", chart.s1},         {"s2", chart.s2},     {"C", chart.c},
       {"L1_point", chart.l1_point},
       {"C_point", chart.c_point}, {"K", k}};
}

}  // namespace mc::rtbp
