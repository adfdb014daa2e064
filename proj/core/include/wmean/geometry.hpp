#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "wmean/point.hpp"

namespace wmean {

class Expr;

/// Total surface area of the unit sphere S^{m-1}, 2 pi^{m/2} / Gamma(m/2),
/// for 2 <= m <= 16. Built from the closed forms for m = 2, 3 and the
/// two-step recursion omega_m = 2 pi omega_{m-2} / (m - 2).
double sphere_area(int m);

/// Volume of the m-ball of radius r: sphere_area(m) * r^m / m.
double ball_volume(int m, double r);

/// Throws InvalidInput unless 2 <= m <= 16.
void check_dimension(int m);

/// Open ball B_r(x).
class Ball {
 public:
  Ball(Point center, double radius);

  const Point& center() const noexcept { return center_; }
  double radius() const noexcept { return radius_; }
  int dim() const noexcept { return center_.dim(); }

  double volume() const { return ball_volume(dim(), radius_); }
  bool contains(const Point& y) const noexcept;

 private:
  Point center_;
  double radius_;
};

/// Axis-aligned box [lo, hi].
class BoundingBox {
 public:
  BoundingBox(Point lo, Point hi);

  static BoundingBox around(const Ball& b);

  const Point& lo() const noexcept { return lo_; }
  const Point& hi() const noexcept { return hi_; }
  int dim() const noexcept { return lo_.dim(); }

  double volume() const noexcept;
  bool contains(const Point& y) const noexcept;
  bool contains(const BoundingBox& other) const noexcept;
  BoundingBox merged(const BoundingBox& other) const;

 private:
  Point lo_;
  Point hi_;
};

/// One perturbation term of a three-dimensional star boundary:
///   amplitude * cos(polar)^z_power * sin(polar)^k * trig(k * azimuth)
/// with trig = cos or sin. On the unit sphere this is z^j Re/Im((x + iy)^k),
/// so it is continuous at the poles.
struct SeparableTerm {
  double amplitude = 0.0;
  int z_power = 0;
  int azimuth = 0;
  bool sine = false;
};

/// Bounded domain that is star-shaped about `anchor`, with boundary given as
/// a positive radial function over directions.
///
/// Three boundary encodings are supported: a truncated Fourier series in
/// the polar angle (dim 2), a constant plus separable terms (dim 3), and an
/// expression in `theta` (dim 2 angle, or dim 3 polar angle) and `phi`
/// (dim 3 azimuth). Positivity is checked on a dense grid at construction.
class StarDomain {
 public:
  static StarDomain fourier2d(Point anchor, double a0, std::vector<double> cos_coeffs,
                              std::vector<double> sin_coeffs);
  static StarDomain separable3d(Point anchor, double a0, std::vector<SeparableTerm> terms);
  static StarDomain expression(Point anchor, const Expr& rho);
  /// A ball as a star domain anchored at its center (dim 2 or 3).
  static StarDomain ball(const Ball& b);

  int dim() const noexcept { return anchor_.dim(); }
  const Point& anchor() const noexcept { return anchor_; }
  double rho_min() const noexcept { return rho_min_; }
  double rho_max() const noexcept { return rho_max_; }

  /// Boundary distance from the anchor along a unit direction.
  double radius_at(const Point& direction) const;

  /// Set when the boundary is a constant (the domain is a ball about anchor).
  std::optional<double> constant_radius() const;

  bool contains(const Point& y) const;

  /// Box around anchor +- rho_max, padded to absorb sampling error in rho_max.
  BoundingBox bbox() const;

  StarDomain translated(const Point& offset) const;
  /// Rotation by `angle` in the (x1, x2) plane about the anchor. Not available
  /// for expression boundaries.
  StarDomain rotated(double angle) const;

  std::string describe() const;

 private:
  enum class Kind { Fourier, Separable, Expression };

  StarDomain() = default;
  void finish_construction();

  Kind kind_ = Kind::Fourier;
  Point anchor_;
  double a0_ = 0.0;
  std::vector<double> cos_;
  std::vector<double> sin_;
  std::vector<SeparableTerm> terms_;
  std::shared_ptr<const Expr> expr_;
  double rho_min_ = 0.0;
  double rho_max_ = 0.0;
};

/// Domain given only by a membership oracle and a bounding box. The oracle is
/// never consulted outside the box.
class ImplicitDomain {
 public:
  using Indicator = std::function<bool(const Point&)>;

  ImplicitDomain(Indicator indicator, BoundingBox bbox, std::string label);

  /// Built-in catalogue.
  static ImplicitDomain ellipsoid(const Point& center, std::vector<double> semi_axes);
  static ImplicitDomain box(const Point& center, std::vector<double> half_widths);
  static ImplicitDomain ball(const Ball& b);
  static ImplicitDomain union_of_balls(const Ball& a, const Ball& b);
  static ImplicitDomain from_star(const StarDomain& star);

  int dim() const noexcept { return bbox_.dim(); }
  const BoundingBox& bbox() const noexcept { return bbox_; }
  const std::string& label() const noexcept { return label_; }

  bool contains(const Point& y) const;

  /// Same domain with a larger sampling box (must contain the current one).
  ImplicitDomain with_bbox(const BoundingBox& bigger) const;

 private:
  Indicator indicator_;
  BoundingBox bbox_;
  std::string label_;
};

}  // namespace wmean
