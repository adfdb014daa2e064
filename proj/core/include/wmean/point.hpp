#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace wmean {

inline constexpr int kMinDim = 2;
inline constexpr int kMaxDim = 16;

/// A point (or vector) in R^m with 2 <= m <= 16. Fixed inline storage so
/// that quadrature inner loops never allocate.
class Point {
 public:
  Point() = default;

  /// Zero vector of dimension m.
  explicit Point(int m);
  Point(std::initializer_list<double> coords);
  explicit Point(std::span<const double> coords);

  static Point unit(int m, int axis);

  int dim() const noexcept { return dim_; }
  double operator[](int i) const noexcept { return c_[static_cast<std::size_t>(i)]; }
  double& operator[](int i) noexcept { return c_[static_cast<std::size_t>(i)]; }

  std::span<const double> coords() const noexcept {
    return {c_.data(), static_cast<std::size_t>(dim_)};
  }
  std::vector<double> to_vector() const { return {c_.begin(), c_.begin() + dim_}; }

  double norm() const noexcept;
  double norm_squared() const noexcept;

  Point& operator+=(const Point& o) noexcept;
  Point& operator-=(const Point& o) noexcept;
  Point& operator*=(double s) noexcept;

  friend Point operator+(Point a, const Point& b) noexcept { return a += b; }
  friend Point operator-(Point a, const Point& b) noexcept { return a -= b; }
  friend Point operator*(Point a, double s) noexcept { return a *= s; }
  friend Point operator*(double s, Point a) noexcept { return a *= s; }

  friend bool operator==(const Point& a, const Point& b) noexcept;

  /// "[x1, x2, ...]" with 17 significant digits.
  std::string str() const;

 private:
  std::array<double, kMaxDim> c_{};
  int dim_ = 0;
};

double distance(const Point& a, const Point& b) noexcept;
double dot(const Point& a, const Point& b) noexcept;

/// a + s * b without temporaries.
inline Point axpy(const Point& a, double s, const Point& b) noexcept {
  Point out = a;
  for (int i = 0; i < a.dim(); ++i) out[i] += s * b[i];
  return out;
}

}  // namespace wmean
