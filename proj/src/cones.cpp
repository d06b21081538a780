#include "mancert/cones.hpp"

#include "mancert/json_io.hpp"

namespace mc {

QuadForm QuadForm::horizontal(double alpha_h, std::size_t u_dim, std::size_t s_dim) {
  if (!(alpha_h > 0.0)) throw DomainError("alpha_h must be positive");
  return {alpha_h, 1.0, u_dim, s_dim};
}

QuadForm QuadForm::vertical(double alpha_v, std::size_t u_dim, std::size_t s_dim) {
  if (!(alpha_v > 0.0)) throw DomainError("alpha_v must be positive");
  return {1.0, alpha_v, u_dim, s_dim};
}

IMatrix QuadForm::matrix() const {
  IMatrix q(dim(), dim());
  for (std::size_t i = 0; i < u_dim; ++i) q(i, i) = Interval(alpha);
  for (std::size_t i = u_dim; i < dim(); ++i) q(i, i) = Interval(-beta);
  return q;
}

FlowBlocks FlowBlocks::split(const IMatrix& df, std::size_t u_dim) {
  const std::size_t n = df.rows();
  if (df.cols() != n || u_dim == 0 || u_dim >= n) {
    throw DomainError("cannot split derivative into flow blocks");
  }
  const std::size_t s = n - u_dim;
  return {df.block(0, 0, u_dim, u_dim), df.block(u_dim, u_dim, s, s),
          df.block(0, u_dim, u_dim, s), df.block(u_dim, 0, s, u_dim)};
}

Interval eval_Q(const QuadForm& q, const IVector& p) {
  if (p.size() != q.dim()) throw DomainError("point dimension does not match form");
  Interval x2(0.0), y2(0.0);
  for (std::size_t i = 0; i < q.u_dim; ++i) x2 += sqr(p[i]);
  for (std::size_t i = q.u_dim; i < q.dim(); ++i) y2 += sqr(p[i]);
  return Interval(q.alpha) * x2 - Interval(q.beta) * y2;
}

ConeCertificate map_cone_check(const IMatrix& df, const QuadForm& q, double m,
                               std::optional<Box> domain) {
  if (df.rows() != q.dim() || df.cols() != q.dim()) {
    throw DomainError("derivative dimension does not match form");
  }
  const std::size_t n = q.dim();
  const IMatrix qm = q.matrix();
  // BᵀQB with Q diagonal.
  IMatrix btqb(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      Interval s(0.0);
      for (std::size_t k = 0; k < n; ++k) {
        s += qm(k, k) * (i == j ? sqr(df(k, i)) : df(k, i) * df(k, j));
      }
      btqb(i, j) = s;
    }
  }
  IMatrix v = Interval(0.5) * (btqb + btqb.transpose()) - Interval(m) * qm;
  return {q, m, std::move(domain), is_positive_definite(v), ConeKind::Map};
}

std::array<PDVerdict, 2> flow_cone_condition(const FlowBlocks& blocks,
                                             const QuadForm& q, double c) {
  const Interval n1(opnorm_upper(blocks.eps1));
  const Interval n2(opnorm_upper(blocks.eps2));
  const Interval alpha(q.alpha), beta(q.beta), half(0.5), rate(c);

  IMatrix expansion = blocks.a;
  const Interval shift_x = half * (n1 + beta / alpha * n2) + rate;
  for (std::size_t i = 0; i < expansion.rows(); ++i) expansion(i, i) -= shift_x;

  IMatrix contraction = Interval(-1.0) * blocks.b;
  const Interval shift_y = rate - half * (n2 + alpha / beta * n1);
  for (std::size_t i = 0; i < contraction.rows(); ++i) contraction(i, i) += shift_y;

  return {is_positive_definite(expansion), is_positive_definite(contraction)};
}

FlowConeConstants flow_cone_check(const FlowBlocks& blocks, double alpha_h,
                                  double alpha_v, double c_h, double c_v) {
  const std::size_t u = blocks.a.rows();
  const std::size_t s = blocks.b.rows();
  FlowConeConstants out;
  out.c_h = c_h;
  out.c_v = c_v;
  out.alpha_h = alpha_h;
  out.alpha_v = alpha_v;
  out.eps1_norm = opnorm_upper(blocks.eps1);
  out.eps2_norm = opnorm_upper(blocks.eps2);
  const auto h = flow_cone_condition(blocks, QuadForm::horizontal(alpha_h, u, s), c_h);
  const auto v = flow_cone_condition(blocks, QuadForm::vertical(alpha_v, u, s), c_v);
  out.h_expansion = h[0];
  out.h_contraction = h[1];
  out.v_expansion = v[0];
  out.v_contraction = v[1];
  return out;
}

bool cone_membership(const IVector& p, double alpha_h, double alpha_v,
                     std::size_t u_dim) {
  const std::size_t s_dim = p.size() - u_dim;
  const Interval qh = eval_Q(QuadForm::horizontal(alpha_h, u_dim, s_dim), p);
  const Interval qv = eval_Q(QuadForm::vertical(alpha_v, u_dim, s_dim), p);
  const Interval h_bound = Interval(alpha_h) - Interval(1.0);
  const Interval v_bound = Interval(1.0) - Interval(alpha_v);
  return qh.lo() >= h_bound.hi() && qv.hi() <= v_bound.lo();
}

double contraction_constant(double alpha_h, double alpha_v) {
  const Interval c =
      sqrt(Interval(2.0) / (Interval(1.0) - Interval(alpha_v) * Interval(alpha_h)));
  return c.hi();
}

void to_json(nlohmann::json& j, const QuadForm& q) {
  j = {{"alpha", q.alpha}, {"beta", q.beta}, {"u_dim", q.u_dim}, {"s_dim", q.s_dim}};
}

void to_json(nlohmann::json& j, const PDVerdict& v) {
  j = {{"verified", v.verified}, {"method", to_string(v.method)}, {"margin", v.margin}};
}

void to_json(nlohmann::json& j, const ConeCertificate& c) {
  j = {{"form", c.form},
       {"m", c.m},
       {"kind", c.kind == ConeKind::Map ? "Map" : "Flow"},
       {"verdict", c.verdict}};
  if (c.domain) j["domain"] = *c.domain;
}

void to_json(nlohmann::json& j, const FlowConeConstants& c) {
  j = {{"c_h", c.c_h},
       {"c_v", c.c_v},
       {"alpha_h", c.alpha_h},
       {"alpha_v", c.alpha_v},
       {"eps1_norm", c.eps1_norm},
       {"eps2_norm", c.eps2_norm},
       {"h_expansion", c.h_expansion},
       {"v_expansion", c.v_expansion},
       {"h_contraction", c.h_contraction},
       {"v_contraction", c.v_contraction},
       {"verified", c.verified()}};
}

}  // namespace mc
