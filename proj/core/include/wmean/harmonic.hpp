#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "wmean/point.hpp"
#include "wmean/quadrature.hpp"

namespace wmean {

/// Sparse polynomial with exact evaluation and gradient.
struct Polynomial {
  struct Term {
    double coeff = 0.0;
    std::array<std::uint8_t, kMaxDim> exps{};
  };
  int dim = 0;
  std::vector<Term> terms;

  double value(const Point& x) const;
  Point gradient(const Point& x) const;
  int degree() const;
};

/// Analytic harmonic function with closed-form value and gradient.
///
/// Families: constant, coordinate x_i, Re/Im (x + iy)^n (dim 2), named
/// harmonic polynomials (see catalogue_names), the fundamental solution
/// log|y - p| (dim 2) or |y - p|^{2-m} (dim >= 3), and linear combinations.
class HarmonicFn {
 public:
  static HarmonicFn constant(int m, double c);
  /// x_axis, axis zero-based.
  static HarmonicFn coordinate(int m, int axis);
  static HarmonicFn re_z(int n);
  static HarmonicFn im_z(int n);
  /// Named catalogue polynomial such as "x2-y2" or "xyz".
  static HarmonicFn polynomial(int m, std::string_view name);
  /// x_i x_j with i != j, zero-based axes.
  static HarmonicFn product(int m, int i, int j);
  /// x_i^2 - x_j^2 with i != j, zero-based axes.
  static HarmonicFn square_difference(int m, int i, int j);
  static HarmonicFn fundamental(const Point& pole);
  static HarmonicFn combination(std::vector<std::pair<double, HarmonicFn>> terms);

  int dim() const noexcept { return dim_; }
  const std::string& name() const noexcept { return name_; }
  /// Total degree for polynomial families; -1 for the fundamental solution.
  int degree() const noexcept { return degree_; }

  /// Throws InvalidInput at the pole of a fundamental solution.
  double value(const Point& x) const;
  Point gradient(const Point& x) const;

  /// Same function under a different display name.
  HarmonicFn renamed(std::string name) const;

  /// Names accepted by polynomial() for dimension m (2 or 3).
  static std::vector<std::string> catalogue_names(int m);

  /// Adapter for the generic integrators.
  ScalarField field() const;

 private:
  struct Fundamental {
    Point pole;
  };
  struct ReIm {
    int n;
    bool imaginary;
  };
  struct Combination {
    std::vector<std::pair<double, std::shared_ptr<const HarmonicFn>>> terms;
  };
  using Family = std::variant<Polynomial, ReIm, Fundamental, Combination>;

  HarmonicFn(int m, Family f, std::string name, int degree)
      : dim_(m), family_(std::move(f)), name_(std::move(name)), degree_(degree) {}

  int dim_;
  Family family_;
  std::string name_;
  int degree_;
};

/// Σ_i [f(x + h e_i) - 2 f(x) + f(x - h e_i)] / h^2.
double laplacian_fd(const ScalarField& f, const Point& x, double h);

/// Reproducible random combination of catalogue polynomials of degree
/// <= max_degree with coefficients uniform in [-1, 1]. m in {2, 3},
/// max_degree in [0, 4].
HarmonicFn random_harmonic(std::uint64_t seed, int m, int max_degree);

/// Every catalogue polynomial for dimension m, plus constant and coordinates.
std::vector<HarmonicFn> harmonic_catalogue(int m);

/// Parses a function spec: "const:<c>", "coord:<i>" (1-based), "re_z:<n>",
/// "im_z:<n>", "poly:<name>", "fund:<p1>,<p2>[,...]",
/// "random:seed=<s>,deg=<d>".
HarmonicFn parse_function(std::string_view spec, int m);

}  // namespace wmean
