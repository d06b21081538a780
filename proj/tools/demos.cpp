#include "demos.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

#include "mancert/flow.hpp"
#include "mancert/manifold.hpp"
#include "mancert/prover.hpp"

namespace mc::demos {

namespace {

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

// Time-τ map of the local PCR3BP field by RK4, in coordinates scaled by r.
Point local_time_map(const rtbp::LocalChart& chart, const Point& x, double r, double tau,
                     int steps) {
  const double mu = chart.mu.mid();
  const double h = tau / steps;
  Point q(x);
  for (double& v : q) v *= r;
  const auto shifted = [](const Point& a, double c, const Point& b) {
    Point out(a);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += c * b[i];
    return out;
  };
  for (int k = 0; k < steps; ++k) {
    const Point k1 = rtbp::local_field(q, chart, mu);
    const Point k2 = rtbp::local_field(shifted(q, h / 2, k1), chart, mu);
    const Point k3 = rtbp::local_field(shifted(q, h / 2, k2), chart, mu);
    const Point k4 = rtbp::local_field(shifted(q, h, k3), chart, mu);
    for (std::size_t i = 0; i < q.size(); ++i) {
      q[i] += h / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
    }
  }
  for (double& v : q) v /= r;
  return q;
}

}  // namespace

std::vector<Check> toymap() {
  std::vector<Check> out;
  const QuadForm q{1.0, 1.0, 1, 1};
  const IMatrix diag{{Interval(2.0), Interval(0.0)}, {Interval(0.0), Interval(0.5)}};
  const auto at1 = map_cone_check(diag, q, 1.0);
  out.push_back({"f(x,y)=(2x,0.5y), m=1 verified", at1.verified(), ""});
  const auto at5 = map_cone_check(diag, q, 5.0);
  out.push_back({"f(x,y)=(2x,0.5y), m=5 not verified", !at5.verified(), ""});
  const IMatrix pert{{Interval(1.9, 2.1), Interval(-0.01, 0.01)},
                     {Interval(-0.01, 0.01), Interval(0.45, 0.55)}};
  const auto p1 = map_cone_check(pert, q, 1.0);
  out.push_back({"perturbed Df, m=1 verified", p1.verified(), ""});
  return out;
}

std::vector<Check> graphtransform() {
  std::vector<Check> out;
  {
    const QuadForm qv = QuadForm::vertical(0.25, 1, 1);
    const PointMap f = [](const Point& p) { return Point{2 * p[0], 0.5 * p[1]}; };
    const auto disc = graph_transform_1d(f, HorizontalDisc1D::initial(0.25, 2), qv, 0.75, 5);
    bool axis = true;
    for (const Point& p : disc.points) axis = axis && p[1] == 0.0;
    out.push_back({"diagonal map keeps y=0", axis, ""});
  }
  {
    const QuadForm qv = QuadForm::vertical(0.25, 1, 1);
    const PointMap f = [](const Point& p) { return Point{2 * p[0], 0.5 * p[1] + 0.1 * p[0]}; };
    auto disc = HorizontalDisc1D::initial(0.25, 2);
    disc = graph_transform_1d(f, disc, qv, 0.75, 30);
    double err = 0.0;
    for (const Point& p : disc.points) err = std::max(err, std::fabs(p[1] - p[0] / 15.0));
    out.push_back({"shear map converges to y=x/15", err <= 1e-10, "sup error " + sci(err)});
  }
  {
    const prover::ProofConfig cfg;
    const auto s = prover::local_stage(cfg.mu_left, cfg, 8);
    const PointMap f = [&](const Point& x) {
      return local_time_map(s.chart, x, cfg.r_u, 0.25, 10);
    };
    const auto disc = graph_transform_1d(f, HorizontalDisc1D::initial(cfg.alpha_v, 4, 33),
                                         QuadForm::vertical(cfg.alpha_v, 1, 3),
                                         1.0 - cfg.alpha_v, 10, 1e-12);
    const Point end = disc.points.back();
    bool inside = s.certificate.has_value();
    for (std::size_t i = 0; i < 4; ++i) inside = inside && s.u_local[i].contains(cfg.r_u * end[i]);
    out.push_back({"PCR3BP local time-0.25 map lands in the certified U window", inside,
                   "endpoint offset from U centre " +
                       sci(std::fabs(cfg.r_u * end[0] - s.u_local[0].mid()))});
  }
  return out;
}

std::vector<Check> gronwall() {
  std::vector<Check> out;
  const VectorFieldBounds b{3.0, 1.0, 0.0};
  const auto zero = gronwall_bounds(b, 0.0, 0.5);
  out.push_back({"t=0 gives (0,0)", zero.g1 == 0.0 && zero.g2 == 0.0, ""});
  const auto one = gronwall_bounds(b, 1.0, 0.5);
  const double g1 = (std::numbers::e - 1.0) * 0.5;
  const double rel = std::fabs(one.g1 - g1) / g1;
  out.push_back({"x'=x: g1(1) = (e-1)·dist", one.g1 >= g1 && rel <= 1e-12,
                 "relative excess " + sci(rel)});
  const VectorFieldBounds flat{0.0, 2.0, 0.0};
  const auto two = gronwall_bounds(flat, 0.75, 0.25);
  const double g2 = 2.0 * (std::exp(1.5) - 1.0) * 0.25;
  out.push_back({"mu=M=0: g2 = L(e^{Lt}-1)·dist", std::fabs(two.g2 - g2) <= 1e-12 * g2,
                 "g2 " + sci(two.g2)});
  return out;
}

std::vector<Check> run(const std::string& name) {
  if (name == "toymap") return toymap();
  if (name == "graphtransform") return graphtransform();
  if (name == "gronwall") return gronwall();
  throw ConfigError("unknown demo " + name);
}

}  // namespace mc::demos
