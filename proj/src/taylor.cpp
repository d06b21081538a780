#include "mancert/taylor.hpp"

#include <algorithm>

namespace mc {

Dual Dual::variable(const Interval& x, std::size_t index, std::size_t count) {
  if (count > kMax || index >= count) throw DomainError("too many dual variables");
  Dual r(x);
  r.n = count;
  r.d[index] = Interval(1.0);
  return r;
}

Dual operator+(const Dual& a, const Dual& b) {
  Dual r(a.v + b.v);
  r.n = std::max(a.n, b.n);
  for (std::size_t i = 0; i < r.n; ++i) r.d[i] = a.d[i] + b.d[i];
  return r;
}

Dual operator-(const Dual& a, const Dual& b) {
  Dual r(a.v - b.v);
  r.n = std::max(a.n, b.n);
  for (std::size_t i = 0; i < r.n; ++i) r.d[i] = a.d[i] - b.d[i];
  return r;
}

Dual operator-(const Dual& a) {
  Dual r(-a.v);
  r.n = a.n;
  for (std::size_t i = 0; i < r.n; ++i) r.d[i] = -a.d[i];
  return r;
}

Dual operator*(const Dual& a, const Dual& b) {
  Dual r(a.v * b.v);
  r.n = std::max(a.n, b.n);
  for (std::size_t i = 0; i < r.n; ++i) r.d[i] = a.v * b.d[i] + b.v * a.d[i];
  return r;
}

Dual operator/(const Dual& a, const Dual& b) {
  Dual r(a.v / b.v);
  r.n = std::max(a.n, b.n);
  for (std::size_t i = 0; i < r.n; ++i) r.d[i] = (a.d[i] - r.v * b.d[i]) / b.v;
  return r;
}

Dual pow_half(const Dual& a, int k) {
  Dual r(pow_half(a.v, k));
  r.n = a.n;
  if (a.n == 0) return r;
  const Interval slope = Interval(0.5 * k) * pow_half(a.v, k - 2);
  for (std::size_t i = 0; i < r.n; ++i) r.d[i] = slope * a.d[i];
  return r;
}

namespace detail {

Dual square_of(const Dual& a) {
  Dual r(sqr(a.v));
  r.n = a.n;
  const Interval twice = Interval(2.0) * a.v;
  for (std::size_t i = 0; i < r.n; ++i) r.d[i] = twice * a.d[i];
  return r;
}

}  // namespace detail

Tape::Tape(std::size_t dim) : dim_(dim) {
  if (dim == 0 || dim > Dual::kMax) throw DomainError("unsupported tape dimension");
  for (std::size_t i = 0; i < dim; ++i) nodes_.push_back({Op::Var});
}

Tape::Node Tape::var(std::size_t i) const {
  if (i >= dim_) throw DomainError("no such state variable");
  return i;
}

void Tape::check(Node n) const {
  if (n >= nodes_.size()) throw DomainError("unknown tape node");
}

Tape::Node Tape::push(Entry e) {
  nodes_.push_back(e);
  return nodes_.size() - 1;
}

Tape::Node Tape::constant(const Interval& c) { return push({Op::Const, 0, 0, 0, c}); }

Tape::Node Tape::add(Node a, Node b) {
  check(a);
  check(b);
  return push({Op::Add, a, b});
}

Tape::Node Tape::sub(Node a, Node b) {
  check(a);
  check(b);
  return push({Op::Sub, a, b});
}

Tape::Node Tape::mul(Node a, Node b) {
  check(a);
  check(b);
  return push({Op::Mul, a, b});
}

Tape::Node Tape::neg(Node a) {
  check(a);
  return push({Op::Neg, a});
}

Tape::Node Tape::sqr(Node a) {
  check(a);
  return push({Op::Sqr, a});
}

Tape::Node Tape::pow_half(Node a, int k) {
  check(a);
  return push({Op::Pow, a, 0, k});
}

void Tape::set_field(std::vector<Node> outputs) {
  if (outputs.size() != dim_) throw DomainError("field needs one output per variable");
  for (Node o : outputs) check(o);
  out_ = std::move(outputs);
}

}  // namespace mc
