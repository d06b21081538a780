#pragma once

#include <array>
#include <cmath>
#include <span>
#include <vector>

#include "mancert/interval.hpp"

namespace mc {

/// Interval value with an interval gradient over at most kMax variables.
struct Dual {
  static constexpr std::size_t kMax = 6;

  Interval v;
  std::array<Interval, kMax> d{};
  std::size_t n = 0;

  Dual() = default;
  Dual(double x) : v(x) {}  // NOLINT(google-explicit-constructor)
  Dual(Interval x) : v(x) {}  // NOLINT(google-explicit-constructor)
  static Dual variable(const Interval& x, std::size_t index, std::size_t count);
};

Dual operator+(const Dual& a, const Dual& b);
Dual operator-(const Dual& a, const Dual& b);
Dual operator-(const Dual& a);
Dual operator*(const Dual& a, const Dual& b);
Dual operator/(const Dual& a, const Dual& b);
/// a^(k/2).
Dual pow_half(const Dual& a, int k);

namespace detail {

template <class T>
T lift(const Interval& c);
template <>
inline double lift<double>(const Interval& c) { return c.mid(); }
template <>
inline Interval lift<Interval>(const Interval& c) { return c; }
template <>
inline Dual lift<Dual>(const Interval& c) { return Dual(c); }

inline double square_of(double a) { return a * a; }
inline Interval square_of(const Interval& a) { return sqr(a); }
Dual square_of(const Dual& a);

inline double pow_half_of(double a, int k) { return std::pow(a, 0.5 * k); }
inline Interval pow_half_of(const Interval& a, int k) { return pow_half(a, k); }
inline Dual pow_half_of(const Dual& a, int k) { return pow_half(a, k); }

}  // namespace detail

/// Expression DAG for an autonomous vector field x' = f(x). Nodes are created
/// in topological order; variables are nodes 0..dim-1. Taylor coefficients of
/// solutions follow from the usual recurrences.
class Tape {
 public:
  using Node = std::size_t;

  explicit Tape(std::size_t dim);

  std::size_t dim() const { return dim_; }
  Node var(std::size_t i) const;
  Node constant(const Interval& c);
  Node add(Node a, Node b);
  Node sub(Node a, Node b);
  Node mul(Node a, Node b);
  Node neg(Node a);
  Node sqr(Node a);
  /// a^(k/2); the base must stay positive.
  Node pow_half(Node a, int k);
  void set_field(std::vector<Node> outputs);

  /// f(x).
  template <class T>
  std::vector<T> eval(std::span<const T> x) const;

  /// Coefficients c[i][k], k = 0..order, of the solution through x.
  template <class T>
  std::vector<std::vector<T>> taylor(std::span<const T> x, int order) const;

 private:
  enum class Op { Var, Const, Add, Sub, Mul, Neg, Sqr, Pow };
  struct Entry {
    Op op;
    Node a = 0;
    Node b = 0;
    int k = 0;
    Interval c{};
  };

  Node push(Entry e);
  void check(Node n) const;

  template <class T>
  T coefficient(std::size_t node, std::size_t k, const std::vector<std::vector<T>>& c) const;

  std::size_t dim_;
  std::vector<Entry> nodes_;
  std::vector<Node> out_;
};

template <class T>
std::vector<T> Tape::eval(std::span<const T> x) const {
  if (x.size() != dim_) throw DomainError("state dimension does not match the tape");
  std::vector<std::vector<T>> c(nodes_.size());
  for (std::size_t i = 0; i < dim_; ++i) c[i].push_back(x[i]);
  for (std::size_t n = dim_; n < nodes_.size(); ++n) c[n].push_back(coefficient(n, 0, c));
  std::vector<T> f;
  f.reserve(dim_);
  for (Node o : out_) f.push_back(c[o][0]);
  return f;
}

template <class T>
std::vector<std::vector<T>> Tape::taylor(std::span<const T> x, int order) const {
  if (x.size() != dim_) throw DomainError("state dimension does not match the tape");
  if (out_.size() != dim_) throw DomainError("tape has no vector field");
  std::vector<std::vector<T>> c(nodes_.size());
  for (auto& v : c) v.reserve(static_cast<std::size_t>(order) + 1);
  for (std::size_t i = 0; i < dim_; ++i) c[i].push_back(x[i]);
  for (int k = 0; k < order; ++k) {
    const auto kk = static_cast<std::size_t>(k);
    for (std::size_t n = dim_; n < nodes_.size(); ++n) c[n].push_back(coefficient(n, kk, c));
    const T divisor(static_cast<double>(k + 1));
    for (std::size_t i = 0; i < dim_; ++i) c[i].push_back(c[out_[i]][kk] / divisor);
  }
  c.resize(dim_);
  return c;
}

template <class T>
T Tape::coefficient(std::size_t node, std::size_t k,
                    const std::vector<std::vector<T>>& c) const {
  const Entry& e = nodes_[node];
  switch (e.op) {
    case Op::Var:
      return c[node][k];
    case Op::Const:
      return k == 0 ? detail::lift<T>(e.c) : T(0.0);
    case Op::Add:
      return c[e.a][k] + c[e.b][k];
    case Op::Sub:
      return c[e.a][k] - c[e.b][k];
    case Op::Neg:
      return -c[e.a][k];
    case Op::Mul: {
      T s = c[e.a][0] * c[e.b][k];
      for (std::size_t j = 1; j <= k; ++j) s = s + c[e.a][j] * c[e.b][k - j];
      return s;
    }
    case Op::Sqr: {
      const auto& a = c[e.a];
      T s(0.0);
      for (std::size_t j = 0; 2 * j < k; ++j) s = s + a[j] * a[k - j];
      s = s + s;
      if (k % 2 == 0) s = s + detail::square_of(a[k / 2]);
      return s;
    }
    case Op::Pow: {
      const auto& a = c[e.a];
      if (k == 0) return detail::pow_half_of(a[0], e.k);
      const auto& p = c[node];
      T s(0.0);
      for (std::size_t j = 0; j < k; ++j) {
        // (α(k − j) − j) with α = e.k / 2 is a multiple of 1/2, hence exact.
        const double w = 0.5 * e.k * static_cast<double>(k - j) - static_cast<double>(j);
        if (w != 0.0) s = s + T(w) * a[k - j] * p[j];
      }
      return s / (T(static_cast<double>(k)) * a[0]);
    }
  }
  return T(0.0);
}

}  // namespace mc
