#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mancert/errors.hpp"

namespace mc {

/// Directed rounding helpers. Results are exact when the floating-point
/// operation was exact, otherwise one representable value outward.
namespace rounding {

inline double next_down(double x) {
  return std::nextafter(x, -std::numeric_limits<double>::infinity());
}
inline double next_up(double x) {
  return std::nextafter(x, std::numeric_limits<double>::infinity());
}

double add_down(double a, double b);
double add_up(double a, double b);
double sub_down(double a, double b);
double sub_up(double a, double b);
double mul_down(double a, double b);
double mul_up(double a, double b);
double div_down(double a, double b);
double div_up(double a, double b);
double sqrt_down(double a);
double sqrt_up(double a);

}  // namespace rounding

/// Closed interval [lo, hi] of doubles, lo <= hi, never NaN.
class Interval {
 public:
  constexpr Interval() = default;
  Interval(double x);  // NOLINT(google-explicit-constructor)
  Interval(double lo, double hi);

  double lo() const { return lo_; }
  double hi() const { return hi_; }

  /// Midpoint rounded to nearest; always inside the interval.
  double mid() const;
  /// Upper bound for the radius: [mid - rad, mid + rad] covers the interval.
  double rad() const;
  /// Upper bound for hi - lo.
  double width() const { return rounding::sub_up(hi_, lo_); }
  /// max |x| over the interval.
  double mag() const { return std::max(std::fabs(lo_), std::fabs(hi_)); }
  /// min |x| over the interval.
  double mig() const;

  bool is_point() const { return lo_ == hi_; }
  bool contains(double x) const { return lo_ <= x && x <= hi_; }
  bool contains_zero() const { return lo_ <= 0.0 && 0.0 <= hi_; }
  /// this ⊆ other
  bool subset_of(const Interval& other) const {
    return other.lo_ <= lo_ && hi_ <= other.hi_;
  }
  /// this ⊂ int(other)
  bool interior_of(const Interval& other) const {
    return other.lo_ < lo_ && hi_ < other.hi_;
  }
  bool certainly_positive() const { return lo_ > 0.0; }
  bool certainly_negative() const { return hi_ < 0.0; }

  Interval operator-() const { return Interval(-hi_, -lo_); }
  Interval& operator+=(const Interval& b);
  Interval& operator-=(const Interval& b);
  Interval& operator*=(const Interval& b);
  Interval& operator/=(const Interval& b);

  friend bool operator==(const Interval&, const Interval&) = default;

 private:
  double lo_ = 0.0;
  double hi_ = 0.0;
};

Interval operator+(const Interval& a, const Interval& b);
Interval operator-(const Interval& a, const Interval& b);
Interval operator*(const Interval& a, const Interval& b);
Interval operator/(const Interval& a, const Interval& b);

Interval sqr(const Interval& a);
Interval sqrt(const Interval& a);
Interval exp(const Interval& a);
Interval log(const Interval& a);
Interval sin(const Interval& a);
Interval cos(const Interval& a);
Interval abs(const Interval& a);
/// a^n for integer n; n < 0 requires 0 ∉ a.
Interval pow_int(const Interval& a, int n);
/// a^(k/2) for odd or even k, computed with sqrt so no libm pow is involved.
Interval pow_half(const Interval& a, int k);

Interval hull(const Interval& a, const Interval& b);
std::optional<Interval> intersect(const Interval& a, const Interval& b);

/// Enclosure of π.
Interval pi();
/// Tight enclosure of a decimal literal such as "0.004253863522".
Interval from_decimal(std::string_view text);

std::ostream& operator<<(std::ostream& os, const Interval& x);
std::string to_string(const Interval& x);

using Point = std::vector<double>;

class IVector {
 public:
  IVector() = default;
  explicit IVector(std::size_t n) : v_(n) {}
  IVector(std::size_t n, const Interval& fill) : v_(n, fill) {}
  IVector(std::initializer_list<Interval> xs) : v_(xs) {}
  explicit IVector(std::vector<Interval> xs) : v_(std::move(xs)) {}
  static IVector from_point(std::span<const double> p);

  std::size_t size() const { return v_.size(); }
  Interval& operator[](std::size_t i) { return v_[i]; }
  const Interval& operator[](std::size_t i) const { return v_[i]; }
  auto begin() { return v_.begin(); }
  auto end() { return v_.end(); }
  auto begin() const { return v_.begin(); }
  auto end() const { return v_.end(); }
  std::span<const Interval> span() const { return v_; }

  friend bool operator==(const IVector&, const IVector&) = default;

 private:
  std::vector<Interval> v_;
};

/// A box is a vector of intervals read as their Cartesian product.
using Box = IVector;

IVector operator+(const IVector& a, const IVector& b);
IVector operator-(const IVector& a, const IVector& b);
IVector operator-(const IVector& a);
IVector operator*(const Interval& s, const IVector& a);
Interval dot(const IVector& a, const IVector& b);

Point mid(const IVector& a);
/// Largest componentwise width.
double max_width(const IVector& a);
bool subset_of(const IVector& a, const IVector& b);
bool interior_of(const IVector& a, const IVector& b);
IVector hull(const IVector& a, const IVector& b);
std::optional<IVector> intersect(const IVector& a, const IVector& b);
/// Split the box into k equal slabs along `axis`.
std::vector<Box> subdivide(const Box& box, std::size_t axis, std::size_t k);

/// Encloses {‖x‖₂ : x ∈ v}.
Interval norm2(const IVector& v);

class IMatrix {
 public:
  IMatrix() = default;
  IMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), a_(rows * cols) {}
  IMatrix(std::initializer_list<std::initializer_list<Interval>> rows);
  static IMatrix identity(std::size_t n);
  /// Row-major point matrix.
  static IMatrix from_point(std::size_t rows, std::size_t cols,
                            std::span<const double> row_major);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  Interval& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  const Interval& operator()(std::size_t i, std::size_t j) const {
    return a_[i * cols_ + j];
  }

  IMatrix transpose() const;
  IMatrix block(std::size_t r0, std::size_t c0, std::size_t nr,
                std::size_t nc) const;
  IVector column(std::size_t j) const;
  void set_column(std::size_t j, const IVector& v);

  friend bool operator==(const IMatrix&, const IMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Interval> a_;
};

IMatrix operator+(const IMatrix& a, const IMatrix& b);
IMatrix operator-(const IMatrix& a, const IMatrix& b);
IMatrix operator*(const IMatrix& a, const IMatrix& b);
IMatrix operator*(const Interval& s, const IMatrix& a);
IVector operator*(const IMatrix& a, const IVector& x);

/// Row-major midpoint matrix.
std::vector<double> mid(const IMatrix& a);
IMatrix hull(const IMatrix& a, const IMatrix& b);
double max_width(const IMatrix& a);

/// Upper bound of the spectral norm over all point matrices in `m`:
/// min(Frobenius, sqrt(‖·‖₁‖·‖∞)) of the absolute-value majorant.
double opnorm_upper(const IMatrix& m);

std::ostream& operator<<(std::ostream& os, const IVector& v);
std::ostream& operator<<(std::ostream& os, const IMatrix& m);

}  // namespace mc
