#include "mancert/interval.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <sstream>

namespace mc {

namespace rounding {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMax = std::numeric_limits<double>::max();
// Below this magnitude the error-free transformations may lose exactness.
constexpr double kTiny = 0x1p-960;

// Exact error of a + b, assuming no overflow (TwoSum).
double sum_error(double a, double b, double s) {
  const double bb = s - a;
  return (a - (s - bb)) + (b - bb);
}

double overflow_down(double s) { return s == kInf ? kMax : s; }
double overflow_up(double s) { return s == -kInf ? -kMax : s; }

}  // namespace

double add_down(double a, double b) {
  const double s = a + b;
  if (std::isinf(s)) {
    return (std::isfinite(a) && std::isfinite(b)) ? overflow_down(s) : s;
  }
  return sum_error(a, b, s) < 0.0 ? next_down(s) : s;
}

double add_up(double a, double b) {
  const double s = a + b;
  if (std::isinf(s)) {
    return (std::isfinite(a) && std::isfinite(b)) ? overflow_up(s) : s;
  }
  return sum_error(a, b, s) > 0.0 ? next_up(s) : s;
}

double sub_down(double a, double b) { return add_down(a, -b); }
double sub_up(double a, double b) { return add_up(a, -b); }

double mul_down(double a, double b) {
  if (a == 0.0 || b == 0.0) return 0.0;
  const double p = a * b;
  if (std::isinf(p)) {
    return (std::isfinite(a) && std::isfinite(b)) ? overflow_down(p) : p;
  }
  if (std::fabs(p) < kTiny) return next_down(p);
  return std::fma(a, b, -p) < 0.0 ? next_down(p) : p;
}

double mul_up(double a, double b) {
  if (a == 0.0 || b == 0.0) return 0.0;
  const double p = a * b;
  if (std::isinf(p)) {
    return (std::isfinite(a) && std::isfinite(b)) ? overflow_up(p) : p;
  }
  if (std::fabs(p) < kTiny) return next_up(p);
  return std::fma(a, b, -p) > 0.0 ? next_up(p) : p;
}

namespace {

// Sign of (a/b - q) where q = fl(a/b); 2 means "unknown".
int div_error_sign(double a, double b, double q) {
  if (std::fabs(a) < kTiny || std::fabs(q) < kTiny || std::isinf(b)) return 2;
  const double r = std::fma(-q, b, a);
  if (r == 0.0) return 0;
  return ((r > 0.0) == (b > 0.0)) ? 1 : -1;
}

}  // namespace

double div_down(double a, double b) {
  if (a == 0.0) return 0.0;
  const double q = a / b;
  if (std::isinf(q)) {
    return (std::isfinite(a) && b != 0.0) ? overflow_down(q) : q;
  }
  const int s = div_error_sign(a, b, q);
  return (s == -1 || s == 2) ? next_down(q) : q;
}

double div_up(double a, double b) {
  if (a == 0.0) return 0.0;
  const double q = a / b;
  if (std::isinf(q)) {
    return (std::isfinite(a) && b != 0.0) ? overflow_up(q) : q;
  }
  const int s = div_error_sign(a, b, q);
  return (s == 1 || s == 2) ? next_up(q) : q;
}

double sqrt_down(double a) {
  if (a == 0.0) return 0.0;
  const double s = std::sqrt(a);
  if (std::isinf(s)) return s;
  if (a < kTiny) return next_down(s);
  return std::fma(-s, s, a) < 0.0 ? next_down(s) : s;
}

double sqrt_up(double a) {
  if (a == 0.0) return 0.0;
  const double s = std::sqrt(a);
  if (std::isinf(s)) return s;
  if (a < kTiny) return next_up(s);
  return std::fma(-s, s, a) > 0.0 ? next_up(s) : s;
}

}  // namespace rounding

using namespace rounding;

Interval::Interval(double x) : lo_(x), hi_(x) {
  if (std::isnan(x)) throw DomainError("interval from NaN");
}

Interval::Interval(double lo, double hi) : lo_(lo), hi_(hi) {
  if (!(lo <= hi)) {
    throw DomainError("invalid interval [" + std::to_string(lo) + ", " +
                      std::to_string(hi) + "]");
  }
}

double Interval::mid() const {
  if (lo_ == hi_) return lo_;
  if (std::isinf(lo_) || std::isinf(hi_)) {
    if (std::isinf(lo_) && std::isinf(hi_)) return 0.0;
    return std::isinf(lo_) ? -std::numeric_limits<double>::max()
                           : std::numeric_limits<double>::max();
  }
  const double m = 0.5 * lo_ + 0.5 * hi_;
  return std::clamp(m, lo_, hi_);
}

double Interval::rad() const {
  const double m = mid();
  return std::max(sub_up(m, lo_), sub_up(hi_, m));
}

double Interval::mig() const {
  if (contains_zero()) return 0.0;
  return std::min(std::fabs(lo_), std::fabs(hi_));
}

Interval& Interval::operator+=(const Interval& b) { return *this = *this + b; }
Interval& Interval::operator-=(const Interval& b) { return *this = *this - b; }
Interval& Interval::operator*=(const Interval& b) { return *this = *this * b; }
Interval& Interval::operator/=(const Interval& b) { return *this = *this / b; }

Interval operator+(const Interval& a, const Interval& b) {
  return {add_down(a.lo(), b.lo()), add_up(a.hi(), b.hi())};
}

Interval operator-(const Interval& a, const Interval& b) {
  return {sub_down(a.lo(), b.hi()), sub_up(a.hi(), b.lo())};
}

Interval operator*(const Interval& a, const Interval& b) {
  if (a.lo() >= 0.0) {
    if (b.lo() >= 0.0) return {mul_down(a.lo(), b.lo()), mul_up(a.hi(), b.hi())};
    if (b.hi() <= 0.0) return {mul_down(a.hi(), b.lo()), mul_up(a.lo(), b.hi())};
    return {mul_down(a.hi(), b.lo()), mul_up(a.hi(), b.hi())};
  }
  if (a.hi() <= 0.0) {
    if (b.lo() >= 0.0) return {mul_down(a.lo(), b.hi()), mul_up(a.hi(), b.lo())};
    if (b.hi() <= 0.0) return {mul_down(a.hi(), b.hi()), mul_up(a.lo(), b.lo())};
    return {mul_down(a.lo(), b.hi()), mul_up(a.lo(), b.lo())};
  }
  if (b.lo() >= 0.0) return {mul_down(a.lo(), b.hi()), mul_up(a.hi(), b.hi())};
  if (b.hi() <= 0.0) return {mul_down(a.hi(), b.lo()), mul_up(a.lo(), b.lo())};
  return {std::min(mul_down(a.lo(), b.hi()), mul_down(a.hi(), b.lo())),
          std::max(mul_up(a.lo(), b.lo()), mul_up(a.hi(), b.hi()))};
}

Interval operator/(const Interval& a, const Interval& b) {
  if (b.contains_zero()) throw DivisionByZeroInterval("divisor contains zero");
  double lo = std::min({div_down(a.lo(), b.lo()), div_down(a.lo(), b.hi()),
                        div_down(a.hi(), b.lo()), div_down(a.hi(), b.hi())});
  double hi = std::max({div_up(a.lo(), b.lo()), div_up(a.lo(), b.hi()),
                        div_up(a.hi(), b.lo()), div_up(a.hi(), b.hi())});
  return {lo, hi};
}

Interval sqr(const Interval& a) {
  if (a.lo() >= 0.0) return {mul_down(a.lo(), a.lo()), mul_up(a.hi(), a.hi())};
  if (a.hi() <= 0.0) return {mul_down(a.hi(), a.hi()), mul_up(a.lo(), a.lo())};
  const double m = a.mag();
  return {0.0, mul_up(m, m)};
}

Interval sqrt(const Interval& a) {
  if (a.lo() < 0.0) throw DomainError("sqrt of interval with negative part");
  return {sqrt_down(a.lo()), sqrt_up(a.hi())};
}

namespace {

double pad_down(double x, int ulps) {
  for (int i = 0; i < ulps; ++i) x = next_down(x);
  return x;
}

double pad_up(double x, int ulps) {
  for (int i = 0; i < ulps; ++i) x = next_up(x);
  return x;
}

constexpr int kElemPad = 2;

// Whether offset + k·period may lie in [lo, hi] for some integer k. Errs on
// the side of "yes".
bool may_hit(double lo, double hi, double offset, double period) {
  const double t_lo = (lo - offset) / period;
  const double t_hi = (hi - offset) / period;
  const double slack = 1e-9 + 1e-14 * std::max(std::fabs(t_lo), std::fabs(t_hi));
  return std::ceil(t_lo - slack) <= std::floor(t_hi + slack);
}

Interval trig(const Interval& a, double max_offset, double min_offset,
              double (*kernel)(double)) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  if (!std::isfinite(a.lo()) || !std::isfinite(a.hi()) || a.width() >= 6.28 ||
      a.mag() > 1e8) {
    return {-1.0, 1.0};
  }
  const double f_lo = kernel(a.lo());
  const double f_hi = kernel(a.hi());
  double lo = std::max(-1.0, pad_down(std::min(f_lo, f_hi), kElemPad));
  double hi = std::min(1.0, pad_up(std::max(f_lo, f_hi), kElemPad));
  if (may_hit(a.lo(), a.hi(), max_offset, kTwoPi)) hi = 1.0;
  if (may_hit(a.lo(), a.hi(), min_offset, kTwoPi)) lo = -1.0;
  return {lo, hi};
}

double pow_pos_down(double x, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i) r = mul_down(r, x);
  return r;
}

double pow_pos_up(double x, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i) r = mul_up(r, x);
  return r;
}

}  // namespace

Interval exp(const Interval& a) {
  const double lo = std::max(0.0, pad_down(std::exp(a.lo()), kElemPad));
  return {lo, pad_up(std::exp(a.hi()), kElemPad)};
}

Interval log(const Interval& a) {
  if (a.lo() <= 0.0) throw DomainError("log of interval with non-positive part");
  return {pad_down(std::log(a.lo()), kElemPad), pad_up(std::log(a.hi()), kElemPad)};
}

Interval sin(const Interval& a) {
  constexpr double kHalfPi = 0.5 * std::numbers::pi;
  return trig(a, kHalfPi, -kHalfPi, [](double x) { return std::sin(x); });
}

Interval cos(const Interval& a) {
  return trig(a, 0.0, std::numbers::pi, [](double x) { return std::cos(x); });
}

Interval abs(const Interval& a) {
  if (a.lo() >= 0.0) return a;
  if (a.hi() <= 0.0) return -a;
  return {0.0, a.mag()};
}

Interval pow_int(const Interval& a, int n) {
  if (n == 0) return Interval(1.0);
  if (n < 0) return Interval(1.0) / pow_int(a, -n);
  if (n % 2 == 1) {
    const double lo = a.lo() >= 0.0 ? pow_pos_down(a.lo(), n)
                                     : -pow_pos_up(-a.lo(), n);
    const double hi = a.hi() >= 0.0 ? pow_pos_up(a.hi(), n)
                                     : -pow_pos_down(-a.hi(), n);
    return {lo, hi};
  }
  return {pow_pos_down(a.mig(), n), pow_pos_up(a.mag(), n)};
}

Interval pow_half(const Interval& a, int k) {
  if (k % 2 == 0) return pow_int(a, k / 2);
  return pow_int(sqrt(a), k);
}

Interval hull(const Interval& a, const Interval& b) {
  return {std::min(a.lo(), b.lo()), std::max(a.hi(), b.hi())};
}

std::optional<Interval> intersect(const Interval& a, const Interval& b) {
  const double lo = std::max(a.lo(), b.lo());
  const double hi = std::min(a.hi(), b.hi());
  if (lo > hi) return std::nullopt;
  return Interval(lo, hi);
}

Interval pi() { return {std::numbers::pi, next_up(std::numbers::pi)}; }

Interval from_decimal(std::string_view text) {
  double value = 0.0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || !std::isfinite(value)) {
    throw DomainError("not a decimal number: '" + std::string(text) + "'");
  }
  return {next_down(value), next_up(value)};
}

std::ostream& operator<<(std::ostream& os, const Interval& x) {
  const auto flags = os.flags();
  const auto prec = os.precision();
  os << std::setprecision(17) << '[' << x.lo() << ", " << x.hi() << ']';
  os.flags(flags);
  os.precision(prec);
  return os;
}

std::string to_string(const Interval& x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

// ---------------------------------------------------------------- vectors

IVector IVector::from_point(std::span<const double> p) {
  IVector v(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) v[i] = Interval(p[i]);
  return v;
}

namespace {

void require_same_size(std::size_t a, std::size_t b) {
  if (a != b) throw DomainError("dimension mismatch");
}

}  // namespace

IVector operator+(const IVector& a, const IVector& b) {
  require_same_size(a.size(), b.size());
  IVector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

IVector operator-(const IVector& a, const IVector& b) {
  require_same_size(a.size(), b.size());
  IVector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

IVector operator-(const IVector& a) {
  IVector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = -a[i];
  return r;
}

IVector operator*(const Interval& s, const IVector& a) {
  IVector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = s * a[i];
  return r;
}

Interval dot(const IVector& a, const IVector& b) {
  require_same_size(a.size(), b.size());
  Interval s(0.0);
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

Point mid(const IVector& a) {
  Point p(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) p[i] = a[i].mid();
  return p;
}

double max_width(const IVector& a) {
  double w = 0.0;
  for (const auto& x : a) w = std::max(w, x.width());
  return w;
}

bool subset_of(const IVector& a, const IVector& b) {
  require_same_size(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a[i].subset_of(b[i])) return false;
  }
  return true;
}

bool interior_of(const IVector& a, const IVector& b) {
  require_same_size(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a[i].interior_of(b[i])) return false;
  }
  return true;
}

IVector hull(const IVector& a, const IVector& b) {
  require_same_size(a.size(), b.size());
  IVector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = hull(a[i], b[i]);
  return r;
}

std::optional<IVector> intersect(const IVector& a, const IVector& b) {
  require_same_size(a.size(), b.size());
  IVector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    auto c = intersect(a[i], b[i]);
    if (!c) return std::nullopt;
    r[i] = *c;
  }
  return r;
}

std::vector<Box> subdivide(const Box& box, std::size_t axis, std::size_t k) {
  if (k == 0) throw DomainError("subdivide needs k >= 1");
  if (axis >= box.size()) throw DomainError("subdivide axis out of range");
  const double lo = box[axis].lo();
  const double hi = box[axis].hi();
  std::vector<Box> out;
  out.reserve(k);
  double left = lo;
  for (std::size_t i = 1; i <= k; ++i) {
    double right = i == k ? hi
                          : lo + (hi - lo) * (static_cast<double>(i) /
                                              static_cast<double>(k));
    right = std::clamp(right, left, hi);
    Box piece = box;
    piece[axis] = Interval(left, right);
    out.push_back(std::move(piece));
    left = right;
  }
  return out;
}

Interval norm2(const IVector& v) {
  Interval s(0.0);
  for (const auto& x : v) s += sqr(x);
  return sqrt(s);
}

// ---------------------------------------------------------------- matrices

IMatrix::IMatrix(std::initializer_list<std::initializer_list<Interval>> rows)
    : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0) {
  a_.reserve(rows_ * cols_);
  for (const auto& row : rows) {
    if (row.size() != cols_) throw DomainError("ragged matrix literal");
    a_.insert(a_.end(), row.begin(), row.end());
  }
}

IMatrix IMatrix::identity(std::size_t n) {
  IMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = Interval(1.0);
  return m;
}

IMatrix IMatrix::from_point(std::size_t rows, std::size_t cols,
                            std::span<const double> row_major) {
  require_same_size(rows * cols, row_major.size());
  IMatrix m(rows, cols);
  for (std::size_t i = 0; i < rows * cols; ++i) m.a_[i] = Interval(row_major[i]);
  return m;
}

IMatrix IMatrix::transpose() const {
  IMatrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  }
  return t;
}

IMatrix IMatrix::block(std::size_t r0, std::size_t c0, std::size_t nr,
                       std::size_t nc) const {
  if (r0 + nr > rows_ || c0 + nc > cols_) throw DomainError("block out of range");
  IMatrix b(nr, nc);
  for (std::size_t i = 0; i < nr; ++i) {
    for (std::size_t j = 0; j < nc; ++j) b(i, j) = (*this)(r0 + i, c0 + j);
  }
  return b;
}

IVector IMatrix::column(std::size_t j) const {
  IVector c(rows_);
  for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
  return c;
}

void IMatrix::set_column(std::size_t j, const IVector& v) {
  require_same_size(rows_, v.size());
  for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = v[i];
}

IMatrix operator+(const IMatrix& a, const IMatrix& b) {
  require_same_size(a.rows(), b.rows());
  require_same_size(a.cols(), b.cols());
  IMatrix r(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) r(i, j) = a(i, j) + b(i, j);
  }
  return r;
}

IMatrix operator-(const IMatrix& a, const IMatrix& b) {
  require_same_size(a.rows(), b.rows());
  require_same_size(a.cols(), b.cols());
  IMatrix r(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) r(i, j) = a(i, j) - b(i, j);
  }
  return r;
}

IMatrix operator*(const IMatrix& a, const IMatrix& b) {
  require_same_size(a.cols(), b.rows());
  IMatrix r(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < b.cols(); ++j) {
      Interval s(0.0);
      for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
      r(i, j) = s;
    }
  }
  return r;
}

IMatrix operator*(const Interval& s, const IMatrix& a) {
  IMatrix r(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) r(i, j) = s * a(i, j);
  }
  return r;
}

IVector operator*(const IMatrix& a, const IVector& x) {
  require_same_size(a.cols(), x.size());
  IVector r(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    Interval s(0.0);
    for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * x[k];
    r[i] = s;
  }
  return r;
}

std::vector<double> mid(const IMatrix& a) {
  std::vector<double> m(a.rows() * a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) m[i * a.cols() + j] = a(i, j).mid();
  }
  return m;
}

IMatrix hull(const IMatrix& a, const IMatrix& b) {
  require_same_size(a.rows(), b.rows());
  require_same_size(a.cols(), b.cols());
  IMatrix r(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) r(i, j) = hull(a(i, j), b(i, j));
  }
  return r;
}

double max_width(const IMatrix& a) {
  double w = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) w = std::max(w, a(i, j).width());
  }
  return w;
}

double opnorm_upper(const IMatrix& m) {
  double frob = 0.0;
  double norm_inf = 0.0;
  std::vector<double> col_sums(m.cols(), 0.0);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < m.cols(); ++j) {
      const double a = m(i, j).mag();
      frob = add_up(frob, mul_up(a, a));
      row = add_up(row, a);
      col_sums[j] = add_up(col_sums[j], a);
    }
    norm_inf = std::max(norm_inf, row);
  }
  double norm_one = 0.0;
  for (double c : col_sums) norm_one = std::max(norm_one, c);
  return std::min(sqrt_up(frob), sqrt_up(mul_up(norm_one, norm_inf)));
}

std::ostream& operator<<(std::ostream& os, const IVector& v) {
  os << '(';
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
  return os << ')';
}

std::ostream& operator<<(std::ostream& os, const IMatrix& m) {
  for (std::size_t i = 0; i < m.rows(); ++i) {
    os << (i ? "\n" : "") << '[';
    for (std::size_t j = 0; j < m.cols(); ++j) os << (j ? ", " : "") << m(i, j);
    os << ']';
  }
  return os;
}

}  // namespace mc
