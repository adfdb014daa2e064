#include "wmean/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <limits>
#include <numbers>

#include "wmean/error.hpp"
#include "wmean/expr.hpp"

namespace wmean {

// ---------------------------------------------------------------------------
// Point

namespace {

void check_coords(std::span<const double> coords) {
  if (coords.size() < static_cast<std::size_t>(kMinDim) ||
      coords.size() > static_cast<std::size_t>(kMaxDim)) {
    throw InvalidInput("point dimension must lie in [2, 16], got " +
                       std::to_string(coords.size()));
  }
  for (double c : coords) {
    if (!std::isfinite(c)) throw InvalidInput("point coordinates must be finite");
  }
}

}  // namespace

Point::Point(int m) : dim_(m) { check_dimension(m); }

Point::Point(std::initializer_list<double> coords)
    : Point(std::span<const double>(coords.begin(), coords.size())) {}

Point::Point(std::span<const double> coords) : dim_(static_cast<int>(coords.size())) {
  check_coords(coords);
  std::copy(coords.begin(), coords.end(), c_.begin());
}

Point Point::unit(int m, int axis) {
  Point p(m);
  if (axis < 0 || axis >= m) throw InvalidInput("axis out of range");
  p[axis] = 1.0;
  return p;
}

double Point::norm_squared() const noexcept {
  double s = 0.0;
  for (int i = 0; i < dim_; ++i) s += c_[static_cast<std::size_t>(i)] * c_[static_cast<std::size_t>(i)];
  return s;
}

double Point::norm() const noexcept { return std::sqrt(norm_squared()); }

Point& Point::operator+=(const Point& o) noexcept {
  for (int i = 0; i < dim_; ++i) (*this)[i] += o[i];
  return *this;
}

Point& Point::operator-=(const Point& o) noexcept {
  for (int i = 0; i < dim_; ++i) (*this)[i] -= o[i];
  return *this;
}

Point& Point::operator*=(double s) noexcept {
  for (int i = 0; i < dim_; ++i) (*this)[i] *= s;
  return *this;
}

bool operator==(const Point& a, const Point& b) noexcept {
  if (a.dim_ != b.dim_) return false;
  return std::equal(a.c_.begin(), a.c_.begin() + a.dim_, b.c_.begin());
}

std::string Point::str() const {
  std::string s = "[";
  char buf[32];
  for (int i = 0; i < dim_; ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", (*this)[i]);
    s += (i ? ", " : "");
    s += buf;
  }
  return s + "]";
}

double dot(const Point& a, const Point& b) noexcept {
  double s = 0.0;
  for (int i = 0; i < a.dim(); ++i) s += a[i] * b[i];
  return s;
}

double distance(const Point& a, const Point& b) noexcept {
  double s = 0.0;
  for (int i = 0; i < a.dim(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

// ---------------------------------------------------------------------------
// Dimensional constants

void check_dimension(int m) {
  if (m < kMinDim || m > kMaxDim) {
    throw InvalidInput("dimension must lie in [2, 16], got " + std::to_string(m));
  }
}

double sphere_area(int m) {
  check_dimension(m);
  // omega_2 = 2 pi, omega_3 = 4 pi, omega_m = 2 pi omega_{m-2} / (m - 2).
  double omega = (m % 2 == 0) ? 2.0 * std::numbers::pi : 4.0 * std::numbers::pi;
  for (int k = (m % 2 == 0) ? 4 : 5; k <= m; k += 2) {
    omega *= 2.0 * std::numbers::pi / (k - 2);
  }
  return omega;
}

double ball_volume(int m, double r) {
  if (!(r > 0.0) || !std::isfinite(r)) throw InvalidInput("ball radius must be positive");
  return sphere_area(m) * std::pow(r, m) / m;
}

// ---------------------------------------------------------------------------
// Ball, BoundingBox

Ball::Ball(Point center, double radius) : center_(std::move(center)), radius_(radius) {
  check_dimension(center_.dim());
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw InvalidInput("ball radius must be positive and finite");
  }
}

bool Ball::contains(const Point& y) const noexcept {
  return distance(center_, y) < radius_;
}

BoundingBox::BoundingBox(Point lo, Point hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
  if (lo_.dim() != hi_.dim()) throw InvalidInput("bounding box corners differ in dimension");
  for (int i = 0; i < lo_.dim(); ++i) {
    if (!(lo_[i] < hi_[i])) throw InvalidInput("bounding box has an empty side");
  }
}

BoundingBox BoundingBox::around(const Ball& b) {
  Point lo = b.center();
  Point hi = b.center();
  for (int i = 0; i < b.dim(); ++i) {
    lo[i] -= b.radius();
    hi[i] += b.radius();
  }
  return {lo, hi};
}

double BoundingBox::volume() const noexcept {
  double v = 1.0;
  for (int i = 0; i < dim(); ++i) v *= hi_[i] - lo_[i];
  return v;
}

bool BoundingBox::contains(const Point& y) const noexcept {
  for (int i = 0; i < dim(); ++i) {
    if (y[i] < lo_[i] || y[i] > hi_[i]) return false;
  }
  return true;
}

bool BoundingBox::contains(const BoundingBox& other) const noexcept {
  for (int i = 0; i < dim(); ++i) {
    if (other.lo_[i] < lo_[i] || other.hi_[i] > hi_[i]) return false;
  }
  return true;
}

BoundingBox BoundingBox::merged(const BoundingBox& other) const {
  if (other.dim() != dim()) throw InvalidInput("cannot merge boxes of different dimension");
  Point lo = lo_;
  Point hi = hi_;
  for (int i = 0; i < dim(); ++i) {
    lo[i] = std::min(lo[i], other.lo_[i]);
    hi[i] = std::max(hi[i], other.hi_[i]);
  }
  return {lo, hi};
}

// ---------------------------------------------------------------------------
// StarDomain

StarDomain StarDomain::fourier2d(Point anchor, double a0, std::vector<double> cos_coeffs,
                                 std::vector<double> sin_coeffs) {
  if (anchor.dim() != 2) throw InvalidInput("star2d needs a two-dimensional anchor");
  StarDomain d;
  d.kind_ = Kind::Fourier;
  d.anchor_ = std::move(anchor);
  d.a0_ = a0;
  d.cos_ = std::move(cos_coeffs);
  d.sin_ = std::move(sin_coeffs);
  d.finish_construction();
  return d;
}

StarDomain StarDomain::separable3d(Point anchor, double a0, std::vector<SeparableTerm> terms) {
  if (anchor.dim() != 3) throw InvalidInput("star3d needs a three-dimensional anchor");
  for (const auto& t : terms) {
    if (t.z_power < 0 || t.azimuth < 0) {
      throw InvalidInput("star3d term powers must be nonnegative");
    }
  }
  StarDomain d;
  d.kind_ = Kind::Separable;
  d.anchor_ = std::move(anchor);
  d.a0_ = a0;
  d.terms_ = std::move(terms);
  d.finish_construction();
  return d;
}

StarDomain StarDomain::expression(Point anchor, const Expr& rho) {
  if (anchor.dim() != 2 && anchor.dim() != 3) {
    throw InvalidInput("star domains exist in dimension 2 or 3 only");
  }
  const std::vector<std::string> vars =
      anchor.dim() == 2 ? std::vector<std::string>{"theta"}
                        : std::vector<std::string>{"theta", "phi"};
  StarDomain d;
  d.kind_ = Kind::Expression;
  d.anchor_ = std::move(anchor);
  // Re-parse so that slot order matches radius_at() and stray variables are rejected.
  d.expr_ = std::make_shared<const Expr>(Expr::parse(rho.str(), vars));
  d.finish_construction();
  return d;
}

StarDomain StarDomain::ball(const Ball& b) {
  if (b.dim() == 2) return fourier2d(b.center(), b.radius(), {}, {});
  if (b.dim() == 3) return separable3d(b.center(), b.radius(), {});
  throw InvalidInput("star domains exist in dimension 2 or 3 only");
}

double StarDomain::radius_at(const Point& direction) const {
  switch (kind_) {
    case Kind::Fourier: {
      const std::complex<double> z(direction[0], direction[1]);
      std::complex<double> zk(1.0, 0.0);
      double rho = a0_;
      const std::size_t k_max = std::max(cos_.size(), sin_.size());
      for (std::size_t k = 0; k < k_max; ++k) {
        zk *= z;
        if (k < cos_.size()) rho += cos_[k] * zk.real();
        if (k < sin_.size()) rho += sin_[k] * zk.imag();
      }
      return rho;
    }
    case Kind::Separable: {
      const std::complex<double> w(direction[0], direction[1]);
      double rho = a0_;
      for (const auto& t : terms_) {
        std::complex<double> wk(1.0, 0.0);
        for (int k = 0; k < t.azimuth; ++k) wk *= w;
        rho += t.amplitude * std::pow(direction[2], t.z_power) * (t.sine ? wk.imag() : wk.real());
      }
      return rho;
    }
    case Kind::Expression: {
      double theta = std::atan2(direction[1], direction[0]);
      if (dim() == 2) {
        if (theta < 0.0) theta += 2.0 * std::numbers::pi;
        const double vals[] = {theta};
        return expr_->eval(std::span<const double>(vals, 1));
      }
      double phi = theta;
      if (phi < 0.0) phi += 2.0 * std::numbers::pi;
      const double polar = std::acos(std::clamp(direction[2], -1.0, 1.0));
      const double vals[] = {polar, phi};
      return expr_->eval(std::span<const double>(vals, 2));
    }
  }
  return 0.0;
}

void StarDomain::finish_construction() {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  Point where;
  auto visit = [&](const Point& dir) {
    double rho = 0.0;
    try {
      rho = radius_at(dir);
    } catch (const EvalError& e) {
      throw InvalidInput(std::string("star boundary cannot be evaluated: ") + e.what());
    }
    if (!std::isfinite(rho)) throw InvalidInput("star boundary is not finite");
    if (rho < lo) {
      lo = rho;
      where = dir;
    }
    hi = std::max(hi, rho);
  };
  if (dim() == 2) {
    constexpr int kSamples = 4096;
    for (int j = 0; j < kSamples; ++j) {
      const double a = 2.0 * std::numbers::pi * j / kSamples;
      visit(Point{std::cos(a), std::sin(a)});
    }
  } else {
    constexpr int kPolar = 128;
    constexpr int kAzimuth = 256;
    visit(Point{0.0, 0.0, 1.0});
    visit(Point{0.0, 0.0, -1.0});
    for (int i = 0; i < kPolar; ++i) {
      const double polar = std::numbers::pi * (i + 0.5) / kPolar;
      for (int j = 0; j < kAzimuth; ++j) {
        const double phi = 2.0 * std::numbers::pi * j / kAzimuth;
        visit(Point{std::sin(polar) * std::cos(phi), std::sin(polar) * std::sin(phi),
                    std::cos(polar)});
      }
    }
  }
  if (!(lo > 0.0)) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "star boundary must be positive; minimum %.6g", lo);
    throw InvalidInput(std::string(buf) + " in direction " + where.str());
  }
  rho_min_ = lo;
  rho_max_ = hi;
}

std::optional<double> StarDomain::constant_radius() const {
  if (kind_ == Kind::Fourier &&
      std::all_of(cos_.begin(), cos_.end(), [](double c) { return c == 0.0; }) &&
      std::all_of(sin_.begin(), sin_.end(), [](double c) { return c == 0.0; })) {
    return a0_;
  }
  if (kind_ == Kind::Separable &&
      std::all_of(terms_.begin(), terms_.end(),
                  [](const SeparableTerm& t) { return t.amplitude == 0.0; })) {
    return a0_;
  }
  return std::nullopt;
}

bool StarDomain::contains(const Point& y) const {
  Point v = y - anchor_;
  const double t = v.norm();
  if (t == 0.0) return true;
  v *= 1.0 / t;
  return t < radius_at(v);
}

BoundingBox StarDomain::bbox() const {
  const double pad = 1.02 * rho_max_;
  Point lo = anchor_;
  Point hi = anchor_;
  for (int i = 0; i < dim(); ++i) {
    lo[i] -= pad;
    hi[i] += pad;
  }
  return {lo, hi};
}

StarDomain StarDomain::translated(const Point& offset) const {
  StarDomain d = *this;
  d.anchor_ += offset;
  return d;
}

StarDomain StarDomain::rotated(double angle) const {
  StarDomain d = *this;
  switch (kind_) {
    case Kind::Fourier: {
      const std::size_t n = std::max(cos_.size(), sin_.size());
      d.cos_.assign(n, 0.0);
      d.sin_.assign(n, 0.0);
      for (std::size_t k = 0; k < n; ++k) {
        const double a = k < cos_.size() ? cos_[k] : 0.0;
        const double b = k < sin_.size() ? sin_[k] : 0.0;
        const double c = std::cos(static_cast<double>(k + 1) * angle);
        const double s = std::sin(static_cast<double>(k + 1) * angle);
        d.cos_[k] = a * c - b * s;
        d.sin_[k] = a * s + b * c;
      }
      break;
    }
    case Kind::Separable: {
      d.terms_.clear();
      for (const auto& t : terms_) {
        if (t.azimuth == 0) {
          d.terms_.push_back(t);
          continue;
        }
        const double c = std::cos(t.azimuth * angle);
        const double s = std::sin(t.azimuth * angle);
        SeparableTerm tc = t;
        SeparableTerm ts = t;
        tc.sine = false;
        ts.sine = true;
        if (!t.sine) {
          tc.amplitude = t.amplitude * c;
          ts.amplitude = t.amplitude * s;
        } else {
          tc.amplitude = -t.amplitude * s;
          ts.amplitude = t.amplitude * c;
        }
        d.terms_.push_back(tc);
        d.terms_.push_back(ts);
      }
      break;
    }
    case Kind::Expression:
      throw InvalidInput("rotation is not supported for expression boundaries");
  }
  d.finish_construction();
  return d;
}

std::string StarDomain::describe() const {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", a0_);
  switch (kind_) {
    case Kind::Fourier:
      return "star2d(a0=" + std::string(buf) + ",cos=" + std::to_string(cos_.size()) +
             ",sin=" + std::to_string(sin_.size()) + ")";
    case Kind::Separable:
      return "star3d(a0=" + std::string(buf) + ",terms=" + std::to_string(terms_.size()) + ")";
    case Kind::Expression:
      return "star" + std::to_string(dim()) + "d(rho=" + expr_->str() + ")";
  }
  return "star";
}

// ---------------------------------------------------------------------------
// ImplicitDomain

ImplicitDomain::ImplicitDomain(Indicator indicator, BoundingBox bbox, std::string label)
    : indicator_(std::move(indicator)), bbox_(std::move(bbox)), label_(std::move(label)) {
  if (!indicator_) throw InvalidInput("implicit domain needs an indicator");
}

namespace {

std::vector<double> checked_extents(const Point& center, std::vector<double> ext,
                                    const char* what) {
  if (static_cast<int>(ext.size()) != center.dim()) {
    throw InvalidInput(std::string(what) + " needs one extent per coordinate");
  }
  for (double e : ext) {
    if (!(e > 0.0) || !std::isfinite(e)) {
      throw InvalidInput(std::string(what) + " extents must be positive");
    }
  }
  return ext;
}

BoundingBox box_around(const Point& center, const std::vector<double>& ext) {
  Point lo = center;
  Point hi = center;
  for (int i = 0; i < center.dim(); ++i) {
    lo[i] -= ext[static_cast<std::size_t>(i)];
    hi[i] += ext[static_cast<std::size_t>(i)];
  }
  return {lo, hi};
}

}  // namespace

ImplicitDomain ImplicitDomain::ellipsoid(const Point& center, std::vector<double> semi_axes) {
  auto ax = checked_extents(center, std::move(semi_axes), "ellipsoid");
  auto bbox = box_around(center, ax);
  return ImplicitDomain(
      [center, ax](const Point& y) {
        double s = 0.0;
        for (int i = 0; i < y.dim(); ++i) {
          const double q = (y[i] - center[i]) / ax[static_cast<std::size_t>(i)];
          s += q * q;
        }
        return s < 1.0;
      },
      bbox, center.dim() == 2 ? "ellipse" : "ellipsoid");
}

ImplicitDomain ImplicitDomain::box(const Point& center, std::vector<double> half_widths) {
  auto hw = checked_extents(center, std::move(half_widths), "box");
  auto bbox = box_around(center, hw);
  return ImplicitDomain(
      [center, hw](const Point& y) {
        for (int i = 0; i < y.dim(); ++i) {
          if (std::abs(y[i] - center[i]) >= hw[static_cast<std::size_t>(i)]) return false;
        }
        return true;
      },
      bbox, "box");
}

ImplicitDomain ImplicitDomain::ball(const Ball& b) {
  return ImplicitDomain([b](const Point& y) { return b.contains(y); }, BoundingBox::around(b),
                        "ball");
}

ImplicitDomain ImplicitDomain::union_of_balls(const Ball& a, const Ball& b) {
  if (a.dim() != b.dim()) throw InvalidInput("union of balls needs equal dimensions");
  return ImplicitDomain([a, b](const Point& y) { return a.contains(y) || b.contains(y); },
                        BoundingBox::around(a).merged(BoundingBox::around(b)), "union");
}

ImplicitDomain ImplicitDomain::from_star(const StarDomain& star) {
  return ImplicitDomain([star](const Point& y) { return star.contains(y); }, star.bbox(),
                        star.describe());
}

bool ImplicitDomain::contains(const Point& y) const {
  return bbox_.contains(y) && indicator_(y);
}

ImplicitDomain ImplicitDomain::with_bbox(const BoundingBox& bigger) const {
  if (!bigger.contains(bbox_)) {
    throw InvalidInput("replacement bounding box must contain the current one");
  }
  ImplicitDomain d = *this;
  d.bbox_ = bigger;
  return d;
}

}  // namespace wmean
