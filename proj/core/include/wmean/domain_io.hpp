#pragma once

#include <string>
#include <string_view>
#include <variant>

#include "wmean/geometry.hpp"

namespace wmean {

/// A domain read from a JSON spec.
///
///   {"kind":"ball","m":2,"center":[0,0],"r":1}
///   {"kind":"star2d","anchor":[0,0],"a0":1,"cos":[0.1],"sin":[]}
///   {"kind":"star2d","anchor":[0,0],"rho":"1 + 0.1*cos(2*theta)"}
///   {"kind":"star3d","anchor":[0,0,0],"a0":1,
///    "terms":[{"amplitude":0.1,"z_power":1,"azimuth":0,"sine":false}]}
///   {"kind":"star3d","anchor":[0,0,0],"rho":"1 + 0.1*cos(theta)^2"}
///   {"kind":"implicit","m":2,"shape":"ellipse","params":[1.2,0.8333],
///    "center":[0,0],"bbox":[[-2,2],[-2,2]]}
///
/// Implicit shapes: ellipse / ellipsoid (semi-axes), box (half widths),
/// ball (radius), union (two balls: center, radius, center, radius,
/// flattened). "center" defaults to the origin and "bbox", when present,
/// must contain the shape's own box. Balls in dimension 2 or 3 become star
/// domains; other dimensions become implicit balls.
struct DomainSpec {
  std::variant<StarDomain, ImplicitDomain> domain;
  std::string kind;
  /// Star anchor, ball center, or implicit "center".
  Point reference;

  int dim() const;
  bool is_star() const noexcept { return std::holds_alternative<StarDomain>(domain); }
  /// The domain as a membership oracle (star domains are wrapped).
  ImplicitDomain as_implicit() const;
};

/// Throws InvalidInput on malformed JSON or an invalid domain.
DomainSpec parse_domain(std::string_view json_text);
DomainSpec load_domain(const std::string& path);

}  // namespace wmean
