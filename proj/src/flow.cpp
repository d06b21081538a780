#include "mancert/flow.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

#include <Eigen/Dense>

#include "mancert/linalg.hpp"

namespace mc {

GronwallBounds gronwall_bounds(const VectorFieldBounds& b, double t, double dist) {
  if (!(dist >= 0.0)) throw DomainError("distance must be non-negative");
  if (!(b.mu_bound >= 0.0 && b.L >= 0.0 && b.M >= 0.0)) {
    throw DomainError("vector field bounds must be non-negative");
  }
  if (t == 0.0 || dist == 0.0) return {};
  const Interval at(std::fabs(t)), l(b.L), d(dist);
  const Interval e = exp(at * l);
  const Interval g1 = (e - Interval(1.0)) * d;
  Interval g2 = l * (e - Interval(1.0));
  if (b.M > 0.0 && b.mu_bound > 0.0 && t != 0.0) {
    g2 += at * e * Interval(b.mu_bound) * Interval(b.M);
  }
  return {std::max(0.0, g1.hi()), std::max(0.0, (g2 * d).hi())};
}

VectorFieldBounds field_bounds(const Tape& field, const Box& box) {
  const auto f = field.eval<Interval>(box.span());
  std::vector<Dual> xd(box.size());
  for (std::size_t i = 0; i < box.size(); ++i) xd[i] = Dual::variable(box[i], i, box.size());
  const auto fd = field.eval<Dual>(std::span<const Dual>(xd));
  IMatrix df(box.size(), box.size());
  for (std::size_t i = 0; i < box.size(); ++i)
    for (std::size_t j = 0; j < box.size(); ++j) df(i, j) = fd[i].d[j];
  return {norm2(IVector(f)).hi(), opnorm_upper(df), std::numeric_limits<double>::infinity()};
}

IMatrix FlowEnclosure::coeff_matrix() const {
  return IMatrix::from_point(dim(), dim(), coeff);
}

IMatrix FlowEnclosure::basis_matrix() const {
  return IMatrix::from_point(dim(), dim(), basis);
}

Box FlowEnclosure::hull() const {
  return IVector::from_point(midpoint) + coeff_matrix() * initial +
         basis_matrix() * remainder;
}

FlowEnclosure FlowEnclosure::from_box(const Box& box, Interval time) {
  const std::size_t n = box.size();
  std::vector<double> id(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) id[i * n + i] = 1.0;
  const Point m = mid(box);
  return from_affine(m, std::move(id), box - IVector::from_point(m), time);
}

FlowEnclosure FlowEnclosure::from_affine(const Point& m, std::vector<double> c,
                                         const Box& r0, Interval time) {
  const std::size_t n = m.size();
  if (c.size() != n * n || r0.size() != n) throw DomainError("affine set has wrong shape");
  FlowEnclosure e;
  e.midpoint = m;
  e.coeff = std::move(c);
  e.initial = r0;
  e.basis.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) e.basis[i * n + i] = 1.0;
  e.remainder = Box(n, Interval(0.0));
  e.time = time;
  return e;
}

namespace {

template <class T>
T horner(const std::vector<T>& c, const T& h) {
  T s = c.back();
  for (std::size_t k = c.size() - 1; k-- > 0;) s = s * h + c[k];
  return s;
}

std::vector<Interval> eval_box(const Tape& field, const Box& x) {
  return field.eval<Interval>(x.span());
}

Box inflate(const Box& z) {
  Box w(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double e = 0.1 * z[i].width() + 1e-15 * (1.0 + z[i].mag());
    w[i] = z[i] + Interval(-e, e);
  }
  return w;
}

bool finite(const Box& b) {
  return std::all_of(b.begin(), b.end(), [](const Interval& x) {
    return std::isfinite(x.lo()) && std::isfinite(x.hi());
  });
}

bool finite(const IMatrix& m) {
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      if (!std::isfinite(m(i, j).lo()) || !std::isfinite(m(i, j).hi())) return false;
  return true;
}

IMatrix jacobian_over(const Tape& field, const Box& z) {
  const std::size_t n = z.size();
  std::vector<Dual> xd(n);
  for (std::size_t i = 0; i < n; ++i) xd[i] = Dual::variable(z[i], i, n);
  const auto fd = field.eval<Dual>(std::span<const Dual>(xd));
  IMatrix df(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) df(i, j) = fd[i].d[j];
  return df;
}

// W with I + [0, h]·DF(Z)·W ⊆ W, so W holds every Dφ(t, x) for t ∈ [0, h], x ∈ X.
IMatrix variational_enclosure(const Tape& field, const Box& z, double h) {
  const std::size_t n = z.size();
  const IMatrix a = Interval(0.0, h) * jacobian_over(field, z);
  const IMatrix id = IMatrix::identity(n);
  IMatrix w = id + a;
  for (int attempt = 0; attempt < 20; ++attempt) {
    IMatrix wide = w;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        const double e = 0.1 * w(i, j).width() + 1e-15 * (1.0 + w(i, j).mag());
        wide(i, j) = w(i, j) + Interval(-e, e);
      }
    const IMatrix next = id + a * wide;
    if (!finite(next)) break;
    bool inside = true;
    for (std::size_t i = 0; i < n && inside; ++i)
      for (std::size_t j = 0; j < n && inside; ++j) inside = next(i, j).subset_of(wide(i, j));
    if (inside) return next;
    w = next;
  }
  throw EnclosureFailure("variational enclosure did not stabilize");
}

// Rough enclosure plus the order p + 1 coefficients over it, whose derivative
// part is seeded with the variational enclosure.
struct StepData {
  double h = 0.0;
  Box z;
  std::vector<Dual> tail;
};

StepData prepare(const Tape& field, const Box& x, double h, int order) {
  StepData d;
  d.h = h;
  d.z = a_priori_enclosure(field, x, h);
  const IMatrix w = variational_enclosure(field, d.z, h);
  const std::size_t n = x.size();
  std::vector<Dual> zd(n);
  for (std::size_t i = 0; i < n; ++i) {
    zd[i] = Dual(d.z[i]);
    zd[i].n = n;
    for (std::size_t j = 0; j < n; ++j) zd[i].d[j] = w(i, j);
  }
  const auto c = field.taylor<Dual>(std::span<const Dual>(zd), order + 1);
  for (std::size_t i = 0; i < n; ++i) d.tail.push_back(c[i][static_cast<std::size_t>(order) + 1]);
  return d;
}

double tail_size(const StepData& d, int order) {
  const double hp = pow_int(Interval(d.h), order + 1).hi();
  double m = 0.0;
  for (const Dual& t : d.tail) m = std::max(m, t.v.mag() * hp);
  return m;
}

// Shrinks h until the rough enclosure exists and the local remainder meets the
// tolerance, or h reaches h_min.
StepData prepare_controlled(const Tape& field, const Box& x, double h,
                            const IntegratorOptions& opt) {
  double scale = 1.0;
  for (const Interval& v : x) scale = std::max(scale, v.mag());
  const double tol = opt.tolerance * scale;
  for (;;) {
    try {
      StepData d = prepare(field, x, h, opt.order);
      const double r = tail_size(d, opt.order);
      if (r <= tol || 0.5 * h < opt.h_min) return d;
      h *= std::clamp(0.9 * std::pow(tol / r, 1.0 / (opt.order + 1)), 0.1, 0.9);
    } catch (const EnclosureFailure&) {
      h *= 0.5;
      if (h < opt.h_min) throw;
    }
  }
}

FlowEnclosure lohner_step(const Tape& field, const FlowEnclosure& e, const Box& x,
                          const StepData& d, int order) {
  const std::size_t n = e.dim();
  const Interval hi(d.h);
  const IVector m = IVector::from_point(e.midpoint);
  const auto cm = field.taylor<Interval>(m.span(), order);
  std::vector<Dual> xd(n);
  for (std::size_t i = 0; i < n; ++i) xd[i] = Dual::variable(x[i], i, n);
  const auto cd = field.taylor<Dual>(std::span<const Dual>(xd), order);

  const Interval hp = pow_int(hi, order + 1);
  IVector y(n);
  IMatrix j(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = horner(cm[i], hi) + d.tail[i].v * hp;
    const Dual t = horner(cd[i], Dual(hi));
    for (std::size_t k = 0; k < n; ++k) j(i, k) = t.d[k] + d.tail[i].d[k] * hp;
  }
  const IMatrix jc = j * e.coeff_matrix();
  const IMatrix jb = j * e.basis_matrix();

  FlowEnclosure out;
  out.midpoint = mid(y);
  out.time = e.time + hi;
  out.coeff = mid(jc);
  out.initial = e.initial;

  const std::vector<double> bm = mid(jb);
  Eigen::MatrixXd b(n, n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) b(Eigen::Index(r), Eigen::Index(c)) = bm[r * n + c];
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<double> weight(n);
  for (std::size_t c = 0; c < n; ++c) {
    weight[c] = b.col(Eigen::Index(c)).norm() * e.remainder[c].mag();
  }
  std::stable_sort(perm.begin(), perm.end(),
                   [&](std::size_t a, std::size_t c) { return weight[a] > weight[c]; });
  Eigen::MatrixXd bp(n, n);
  for (std::size_t c = 0; c < n; ++c) bp.col(Eigen::Index(c)) = b.col(Eigen::Index(perm[c]));
  const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(bp).householderQ();
  out.basis.resize(n * n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) out.basis[r * n + c] = q(Eigen::Index(r), Eigen::Index(c));

  const IMatrix qinv = inverse_enclosure(out.basis_matrix());
  const IMatrix spill = jc - out.coeff_matrix();
  out.remainder = (qinv * jb) * e.remainder + qinv * (spill * e.initial) +
                  qinv * (y - IVector::from_point(out.midpoint));
  return out;
}

std::vector<std::vector<double>> point_coefficients(const Tape& field, const Point& x,
                                                     int order) {
  return field.taylor<double>(std::span<const double>(x), order);
}

Point evaluate_series(const std::vector<std::vector<double>>& c, double s) {
  Point p(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) p[i] = horner(c[i], s);
  return p;
}

bool before(const Section& s, double x) { return s.direction > 0 ? x < s.value : x > s.value; }

// Smallest s in (0, h] where the series of the section coordinate moves from
// the pre-side to the post-side of the section.
std::optional<double> series_crossing(const std::vector<std::vector<double>>& c,
                                      const Section& sec, double h) {
  const auto& p = c[sec.index];
  const auto g = [&](double s) { return horner(p, s); };
  if (!before(sec, g(0.0))) return std::nullopt;
  const int samples = 64;
  double a = 0.0;
  for (int k = 1; k <= samples; ++k) {
    double b = h * k / samples;
    if (!before(sec, g(b))) {
      for (int it = 0; it < 200 && b - a > 0.0; ++it) {
        const double m = 0.5 * (a + b);
        if (m == a || m == b) break;
        (before(sec, g(m)) ? a : b) = m;
      }
      return 0.5 * (a + b);
    }
    a = b;
  }
  return std::nullopt;
}

void record(std::vector<StepRecord>* trace, const Interval& t0, double h, const Box& z) {
  if (trace) trace->push_back({t0 + Interval(0.0, h), z});
}

}  // namespace

Box a_priori_enclosure(const Tape& field, const Box& x0, double h) {
  if (!(h > 0.0)) throw DomainError("step length must be positive");
  const Interval slab(0.0, h);
  try {
    const auto f0 = eval_box(field, x0);
    Box z = x0 + slab * IVector(f0);
    for (int attempt = 0; attempt < 20; ++attempt) {
      const Box w = inflate(z);
      const Box next = x0 + slab * IVector(eval_box(field, w));
      if (!finite(next)) break;
      if (subset_of(next, w)) return next;
      z = next;
    }
  } catch (const DomainError&) {
  } catch (const DivisionByZeroInterval&) {
  }
  throw EnclosureFailure("rough enclosure did not stabilize");
}

FlowEnclosure taylor_step(const Tape& field, const FlowEnclosure& e, double h, int order) {
  if (order < 1) throw DomainError("Taylor order must be positive");
  const Box x = e.hull();
  return lohner_step(field, e, x, prepare(field, x, h, order), order);
}

double suggest_step(const Tape& field, const Point& x, const IntegratorOptions& opt) {
  const auto c = point_coefficients(field, x, opt.order);
  double scale = 1.0;
  for (double v : x) scale = std::max(scale, std::fabs(v));
  const double tol = opt.tolerance * scale;
  double h = opt.h_max;
  for (int k : {opt.order - 1, opt.order}) {
    if (k < 1) continue;
    double nk = 0.0;
    for (const auto& ci : c) nk = std::max(nk, std::fabs(ci[static_cast<std::size_t>(k)]));
    if (nk > 0.0) h = std::min(h, std::pow(tol / nk, 1.0 / k));
  }
  return std::max(h, opt.h_min);
}

FlowEnclosure integrate(const Tape& field, const FlowEnclosure& e, double duration,
                        const IntegratorOptions& opt, std::vector<StepRecord>* trace) {
  if (!(duration >= 0.0)) throw DomainError("integration time must be non-negative");
  FlowEnclosure cur = e;
  double remaining = duration;
  while (remaining > 0.0) {
    const Box x = cur.hull();
    const StepData d = prepare_controlled(
        field, x, std::min(suggest_step(field, cur.midpoint, opt), remaining), opt);
    FlowEnclosure next = lohner_step(field, cur, x, d, opt.order);
    record(trace, cur.time, d.h, d.z);
    cur = std::move(next);
    remaining -= d.h;
  }
  return cur;
}

namespace {

Box section_image(const Tape& field, const FlowEnclosure& ea, const Box& xa, const Box& zs,
                  const std::vector<Interval>& fs, const Section& sec, const Interval& s) {
  const std::size_t n = ea.dim(), idx = sec.index;
  const Interval v(sec.value);
  const Interval speed = fs[idx];
  const auto c2 = field.taylor<Interval>(zs.span(), 2);

  const IVector m = IVector::from_point(ea.midpoint);
  const auto fm = field.eval<Interval>(m.span());
  std::vector<Dual> xd(n);
  for (std::size_t i = 0; i < n; ++i) xd[i] = Dual::variable(xa[i], i, n);
  const auto fd = field.eval<Dual>(std::span<const Dual>(xd));
  const Interval yv = xa[idx] - v;
  const Interval fy = fd[idx].v;

  IVector g(n), err(n);
  IMatrix dg(n, n);
  const Interval s2 = sqr(s);
  for (std::size_t i = 0; i < n; ++i) {
    g[i] = m[i] - fm[i] * (m[idx] - v) / fm[idx];
    err[i] = s2 * (c2[i][2] - fs[i] / speed * c2[idx][2]);
    for (std::size_t j = 0; j < n; ++j) {
      Interval t = fd[i].d[j] * yv / fy - fd[i].v * yv * fd[idx].d[j] / sqr(fy);
      if (j == idx) t += fd[i].v / fy;
      dg(i, j) = Interval(i == j ? 1.0 : 0.0) - t;
    }
  }
  Box p = g + (dg * ea.coeff_matrix()) * ea.initial + (dg * ea.basis_matrix()) * ea.remainder +
          err;
  p[idx] = v;
  return p;
}

CrossingResult finish_crossing(const Tape& field, const FlowEnclosure& e, const Section& sec,
                               double ts, const IntegratorOptions& opt,
                               std::vector<StepRecord>* trace, std::size_t steps) {
  const std::size_t idx = sec.index;
  const auto pre = [&](const Interval& y) {
    return sec.direction > 0 ? y.hi() < sec.value : y.lo() > sec.value;
  };
  const auto post = [&](const Interval& y) {
    return sec.direction > 0 ? y.lo() > sec.value : y.hi() < sec.value;
  };
  const auto toward = [&](const Interval& speed) {
    return sec.direction > 0 ? speed.lo() > 0.0 : speed.hi() < 0.0;
  };

  const Point at = evaluate_series(point_coefficients(field, e.midpoint, opt.order), ts);
  const double fy = std::fabs(field.eval<double>(std::span<const double>(at))[idx]);
  double w = e.hull()[idx].width();
  try {
    w = taylor_step(field, e, ts, opt.order).hull()[idx].width();
  } catch (const Error&) {
  }
  double delta = std::max(1.5 * w / fy, 1e-13 * (1.0 + ts));

  for (int attempt = 0; attempt < 8; ++attempt, delta *= 2.0) {
    const double ta = std::max(0.0, ts - delta);
    const double span = ts + delta - ta;
    std::vector<StepRecord> local;
    try {
      FlowEnclosure ea = e;
      if (ta > 0.0) {
        const Box x = e.hull();
        const StepData da = prepare(field, x, ta, opt.order);
        ea = lohner_step(field, e, x, da, opt.order);
        // Either the slab stays before the section, or the section coordinate
        // moves monotonically toward it and the endpoint is still before it.
        const bool monotone = toward(field.eval<Interval>(da.z.span())[idx]) &&
                              pre(ea.hull()[idx]) && pre(x[idx]);
        if (!pre(da.z[idx]) && !monotone) continue;
        record(&local, e.time, ta, da.z);
      }
      const Box xa = hull(ea.hull(), IVector::from_point(ea.midpoint));
      if (!pre(xa[idx])) continue;
      const StepData ds = prepare(field, xa, span, opt.order);
      const Box& zs = ds.z;
      const auto fs = field.eval<Interval>(zs.span());
      const Interval speed = fs[idx];
      if (!toward(speed)) continue;
      const FlowEnclosure eb = lohner_step(field, ea, xa, ds, opt.order);
      if (!post(eb.hull()[idx])) continue;
      record(&local, ea.time, span, zs);

      const Interval slab(0.0, span);
      const auto c2 = field.taylor<Interval>(zs.span(), 2);
      const Interval refined =
          -(xa[idx] - Interval(sec.value)) / speed - sqr(slab) * c2[idx][2] / speed;
      const Interval s = intersect(slab, refined).value_or(slab);

      CrossingResult r;
      r.image = section_image(field, ea, xa, zs, fs, sec, s);
      r.time = ea.time + s;
      r.section_speed = speed;
      r.before_section = ea;
      r.steps = steps + local.size();
      if (trace) trace->insert(trace->end(), local.begin(), local.end());
      return r;
    } catch (const EnclosureFailure&) {
    }
  }
  throw TransversalityFailure("could not certify a transversal crossing");
}

}  // namespace

CrossingResult poincare_crossing(const Tape& field, const FlowEnclosure& e,
                                 const Section& sec, const IntegratorOptions& opt,
                                 double max_time, std::vector<StepRecord>* trace) {
  if (sec.index >= e.dim() || (sec.direction != 1 && sec.direction != -1)) {
    throw DomainError("invalid section");
  }
  const auto pre = [&](const Interval& y) {
    return sec.direction > 0 ? y.hi() < sec.value : y.lo() > sec.value;
  };
  if (!pre(e.hull()[sec.index])) {
    throw DomainError("initial set must lie strictly before the section");
  }
  FlowEnclosure cur = e;
  double elapsed = 0.0;
  double cap = opt.h_max;
  std::size_t steps = 0;
  while (elapsed < max_time) {
    const Box x = cur.hull();
    const StepData d = prepare_controlled(
        field, x, std::min({suggest_step(field, cur.midpoint, opt), cap, max_time - elapsed}),
        opt);
    const double h = d.h;
    if (pre(d.z[sec.index])) {
      FlowEnclosure next = lohner_step(field, cur, x, d, opt.order);
      record(trace, cur.time, h, d.z);
      cur = std::move(next);
      elapsed += h;
      ++steps;
      cap = opt.h_max;
      continue;
    }
    const auto ts =
        series_crossing(point_coefficients(field, cur.midpoint, opt.order), sec, h);
    if (!ts) {
      cap = 0.5 * h;
      if (cap < opt.h_min) {
        throw TransversalityFailure("set reaches the section without a predicted crossing");
      }
      continue;
    }
    return finish_crossing(field, cur, sec, *ts, opt, trace, steps);
  }
  throw LostCrossing("no crossing certified within the time budget");
}

PointTrajectory integrate_point(const Tape& field, const Point& x0, double duration,
                                const IntegratorOptions& opt) {
  PointTrajectory out;
  out.t.push_back(0.0);
  out.x.push_back(x0);
  Point x = x0;
  double t = 0.0;
  while (t < duration) {
    const double h = std::min(suggest_step(field, x, opt), duration - t);
    x = evaluate_series(point_coefficients(field, x, opt.order), h);
    t += h;
    out.t.push_back(t);
    out.x.push_back(x);
  }
  return out;
}

std::optional<PointCrossing> point_crossing(const Tape& field, const Point& x0,
                                            const Section& sec, const IntegratorOptions& opt,
                                            double max_time) {
  PointCrossing out;
  out.path.t.push_back(0.0);
  out.path.x.push_back(x0);
  Point x = x0;
  double t = 0.0;
  while (t < max_time) {
    const double h = std::min(suggest_step(field, x, opt), max_time - t);
    const auto c = point_coefficients(field, x, opt.order);
    if (const auto s = series_crossing(c, sec, h)) {
      out.time = t + *s;
      out.state = evaluate_series(c, *s);
      out.path.t.push_back(out.time);
      out.path.x.push_back(out.state);
      return out;
    }
    x = evaluate_series(c, h);
    t += h;
    out.path.t.push_back(t);
    out.path.x.push_back(x);
  }
  return std::nullopt;
}

namespace {

std::string shortest(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

}  // namespace

void write_enclosures_csv(std::ostream& os, const std::vector<StepRecord>& steps,
                          const std::vector<std::string>& names) {
  os << "t_lo,t_hi";
  for (const auto& n : names) os << ',' << n << "_lo," << n << "_hi";
  os << '\n';
  for (const StepRecord& s : steps) {
    os << shortest(s.time.lo()) << ',' << shortest(s.time.hi());
    for (std::size_t i = 0; i < names.size() && i < s.enclosure.size(); ++i) {
      os << ',' << shortest(s.enclosure[i].lo()) << ',' << shortest(s.enclosure[i].hi());
    }
    os << '\n';
  }
}

}  // namespace mc
