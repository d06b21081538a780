#include "mancert/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mancert/json_io.hpp"

namespace mc {

namespace {

double rounded_sqrt_down(const Interval& x) { return sqrt(x).lo(); }
double rounded_sqrt_up(const Interval& x) { return sqrt(x).hi(); }

void check_rates(ManifoldKind kind, double rate_h, double rate_v) {
  switch (kind) {
    case ManifoldKind::MapUnstable:
      if (!(rate_v > rate_h && rate_h > 0.0 && rate_v > 1.0)) {
        throw RateOrderViolation("unstable map manifold needs m_v > m_h > 0 and m_v > 1");
      }
      break;
    case ManifoldKind::MapStable:
      if (!(rate_v > rate_h && rate_h > 0.0 && rate_h < 1.0)) {
        throw RateOrderViolation("stable map manifold needs m_v > m_h > 0 and m_h < 1");
      }
      break;
    case ManifoldKind::FlowUnstable:
      if (!(rate_v > rate_h && rate_v > 0.0)) {
        throw RateOrderViolation("unstable flow manifold needs c_v > c_h and c_v > 0");
      }
      break;
    case ManifoldKind::FlowStable:
      if (!(rate_h < rate_v && rate_h < 0.0)) {
        throw RateOrderViolation("stable flow manifold needs c_h < c_v and c_h < 0");
      }
      break;
  }
}

ManifoldCertificate assemble(ManifoldKind kind, Box domain, std::size_t u_dim,
                             double alpha_h, double alpha_v, double rate_h,
                             double rate_v, const Box& fixed_point) {
  if (fixed_point.size() != domain.size()) {
    throw DomainError("fixed point box has wrong dimension");
  }
  ManifoldCertificate c;
  c.kind = kind;
  c.domain = std::move(domain);
  c.u_dim = u_dim;
  c.alpha_h = alpha_h;
  c.alpha_v = alpha_v;
  c.rate_h = rate_h;
  c.rate_v = rate_v;
  const bool unstable = c.unstable();
  c.radius = rounded_sqrt_down(Interval(1.0) - Interval(unstable ? alpha_v : alpha_h));
  c.lipschitz = rounded_sqrt_up(Interval(unstable ? alpha_h : alpha_v));
  c.contraction_constant = contraction_constant(alpha_h, alpha_v);
  Box window(fixed_point.size());
  for (std::size_t i = 0; i < window.size(); ++i) {
    const bool shrunk = unstable ? i < u_dim : i >= u_dim;
    const double r = shrunk ? c.radius : 1.0;
    window[i] = fixed_point[i] + Interval(-r, r);
  }
  c.graph_window = std::move(window);
  return c;
}

}  // namespace

ManifoldCertificate certify(ManifoldKind kind, const ConeCertificate& q_h,
                            const ConeCertificate& q_v, const Box& fixed_point) {
  if (kind == ManifoldKind::FlowStable || kind == ManifoldKind::FlowUnstable) {
    throw DomainError("map certificates cannot back a flow manifold");
  }
  if (!q_h.verified() || !q_v.verified()) {
    throw UnverifiedCones("cone conditions are not verified for both forms");
  }
  if (q_h.form.beta != 1.0 || q_v.form.alpha != 1.0 ||
      q_h.form.u_dim != q_v.form.u_dim || q_h.form.s_dim != q_v.form.s_dim) {
    throw UnverifiedCones("certificates are not for the forms Q_h and Q_v");
  }
  if (!q_h.domain || !q_v.domain || !(*q_h.domain == *q_v.domain)) {
    throw UnverifiedCones("certificates must share a recorded domain");
  }
  check_rates(kind, q_h.m, q_v.m);
  return assemble(kind, *q_h.domain, q_h.form.u_dim, q_h.form.alpha, q_v.form.beta,
                  q_h.m, q_v.m, fixed_point);
}

ManifoldCertificate certify(ManifoldKind kind, const FlowConeConstants& constants,
                            const Box& domain, const Box& fixed_point,
                            std::size_t u_dim) {
  if (kind == ManifoldKind::MapStable || kind == ManifoldKind::MapUnstable) {
    throw DomainError("flow constants cannot back a map manifold");
  }
  if (!constants.verified()) {
    throw UnverifiedCones("flow cone conditions are not verified");
  }
  check_rates(kind, constants.c_h, constants.c_v);
  return assemble(kind, domain, u_dim, constants.alpha_h, constants.alpha_v,
                  constants.c_h, constants.c_v, fixed_point);
}

namespace {

double euclid(const Point& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double straightening_radius(const Point& s, const QuadForm& q, double c_star) {
  const double ns = euclid(s);
  return std::sqrt((c_star + q.beta * ns * ns) / q.alpha);
}

Point concat(Point a, const Point& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

}  // namespace

Point phi_coords(const Point& u, const Point& s, const QuadForm& q, double c_star) {
  if (!(c_star > 0.0)) throw DomainError("c* must be positive");
  const double rho = straightening_radius(s, q, c_star);
  const double nu = euclid(u);
  const double scale = nu <= 1.0 ? rho : (rho - 1.0) / nu + 1.0;
  Point x(u);
  for (double& c : x) c *= scale;
  return concat(std::move(x), s);
}

Point phi_inverse(const Point& x, const Point& s, const QuadForm& q, double c_star) {
  if (!(c_star > 0.0)) throw DomainError("c* must be positive");
  const double rho = straightening_radius(s, q, c_star);
  const double nx = euclid(x);
  const double scale = nx <= rho ? 1.0 / rho : (nx - rho + 1.0) / nx;
  Point u(x);
  for (double& c : u) c *= scale;
  return concat(std::move(u), s);
}

std::vector<double> chebyshev_abscissae(std::size_t samples) {
  if (samples < 2) throw DomainError("a disc needs at least two samples");
  std::vector<double> xs(samples);
  const double n = static_cast<double>(samples - 1);
  for (std::size_t i = 0; i < samples; ++i) {
    xs[i] = -std::cos(std::numbers::pi * static_cast<double>(i) / n);
  }
  xs.front() = -1.0;
  xs.back() = 1.0;
  if (samples % 2 == 1) xs[samples / 2] = 0.0;
  return xs;
}

HorizontalDisc1D HorizontalDisc1D::initial(double alpha_v, std::size_t dim,
                                           std::size_t samples) {
  HorizontalDisc1D d;
  d.abscissae = chebyshev_abscissae(samples);
  const double r = std::sqrt(1.0 - alpha_v);
  for (double x : d.abscissae) {
    Point p(dim, 0.0);
    p[0] = x * r;
    d.points.push_back(std::move(p));
  }
  return d;
}

Point HorizontalDisc1D::operator()(double x) const {
  if (x <= abscissae.front()) return points.front();
  if (x >= abscissae.back()) return points.back();
  const auto it = std::upper_bound(abscissae.begin(), abscissae.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - abscissae.begin()) - 1;
  const double t = (x - abscissae[i]) / (abscissae[i + 1] - abscissae[i]);
  Point p(points[i].size());
  for (std::size_t k = 0; k < p.size(); ++k) {
    p[k] = (1.0 - t) * points[i][k] + t * points[i + 1][k];
  }
  return p;
}

HorizontalDisc1D graph_transform_1d(const PointMap& f, const HorizontalDisc1D& disc,
                                    const QuadForm& q_v, double c_star,
                                    int iterations, double tolerance) {
  if (q_v.u_dim != 1) throw DomainError("graph transform supports u_dim = 1 only");
  HorizontalDisc1D current = disc;
  for (int it = 0; it < iterations; ++it) {
    const auto u_of = [&](const Point& p) {
      const Point s(p.begin() + 1, p.end());
      return phi_inverse(Point{p[0]}, s, q_v, c_star)[0];
    };
    const auto g = [&](double x) { return u_of(f(current(x))); };

    std::vector<double> g_samples(current.abscissae.size());
    for (std::size_t i = 0; i < g_samples.size(); ++i) {
      g_samples[i] = u_of(f(current.points[i]));
    }

    HorizontalDisc1D next;
    next.abscissae = current.abscissae;
    for (double target : next.abscissae) {
      std::size_t bracket = g_samples.size();
      for (std::size_t i = 0; i + 1 < g_samples.size(); ++i) {
        const double a = g_samples[i] - target;
        const double b = g_samples[i + 1] - target;
        if (a == 0.0 || (a < 0.0) != (b < 0.0)) {
          bracket = i;
          break;
        }
      }
      if (bracket == g_samples.size()) {
        throw ResolutionError("mapped disc does not bracket u = " + std::to_string(target));
      }
      double lo = current.abscissae[bracket];
      double hi = current.abscissae[bracket + 1];
      const bool increasing = g_samples[bracket + 1] >= g_samples[bracket];
      while (hi - lo > tolerance) {
        const double m = 0.5 * (lo + hi);
        if (m == lo || m == hi) break;
        ((g(m) < target) == increasing ? lo : hi) = m;
      }
      next.points.push_back(f(current(0.5 * (lo + hi))));
    }
    current = std::move(next);
  }
  return current;
}

const char* to_string(ManifoldKind kind) {
  switch (kind) {
    case ManifoldKind::MapUnstable: return "MapUnstable";
    case ManifoldKind::MapStable: return "MapStable";
    case ManifoldKind::FlowUnstable: return "FlowUnstable";
    case ManifoldKind::FlowStable: return "FlowStable";
  }
  return "?";
}

void to_json(nlohmann::json& j, const ManifoldCertificate& c) {
  const bool map = c.kind == ManifoldKind::MapStable || c.kind == ManifoldKind::MapUnstable;
  j = {{"kind", to_string(c.kind)},
       {"domain", c.domain},
       {"u_dim", c.u_dim},
       {"alpha_h", c.alpha_h},
       {"alpha_v", c.alpha_v},
       {map ? "m_h" : "c_h", c.rate_h},
       {map ? "m_v" : "c_v", c.rate_v},
       {c.unstable() ? "r_u" : "r_s", c.radius},
       {"lipschitz", c.lipschitz},
       {"contraction_constant", c.contraction_constant},
       {"balls", "closed"},
       {"graph_window", c.graph_window}};
}

}  // namespace mc
