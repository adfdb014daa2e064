#include "wmean/domain_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "wmean/error.hpp"
#include "wmean/expr.hpp"

namespace wmean {
namespace {

using nlohmann::json;

const json& field(const json& j, const char* key) {
  if (!j.contains(key)) throw InvalidInput(std::string("domain spec lacks \"") + key + "\"");
  return j.at(key);
}

double real(const json& j, const char* what) {
  if (!j.is_number()) throw InvalidInput(std::string("domain spec: ") + what + " must be a number");
  return j.get<double>();
}

std::vector<double> reals(const json& j, const char* what) {
  if (!j.is_array()) throw InvalidInput(std::string("domain spec: ") + what + " must be an array");
  std::vector<double> out;
  for (const auto& v : j) out.push_back(real(v, what));
  return out;
}

Point point(const json& j, const char* what) {
  const auto v = reals(j, what);
  return Point(std::span<const double>(v));
}

int dimension(const json& j) {
  const auto& m = field(j, "m");
  if (!m.is_number_integer()) throw InvalidInput("domain spec: m must be an integer");
  const int dim = m.get<int>();
  check_dimension(dim);
  return dim;
}

StarDomain star_from_rho(const Point& anchor, const json& rho) {
  if (!rho.is_string()) throw InvalidInput("domain spec: rho must be an expression string");
  const std::vector<std::string> vars =
      anchor.dim() == 2 ? std::vector<std::string>{"theta"}
                        : std::vector<std::string>{"theta", "phi"};
  return StarDomain::expression(anchor, Expr::parse(rho.get<std::string>(), vars));
}

DomainSpec parse_star2d(const json& j) {
  const Point anchor = point(field(j, "anchor"), "anchor");
  if (anchor.dim() != 2) throw InvalidInput("star2d anchor needs two coordinates");
  if (j.contains("rho")) return {star_from_rho(anchor, j.at("rho")), "star2d", anchor};
  const double a0 = real(field(j, "a0"), "a0");
  auto cos_coeffs = j.contains("cos") ? reals(j.at("cos"), "cos") : std::vector<double>{};
  auto sin_coeffs = j.contains("sin") ? reals(j.at("sin"), "sin") : std::vector<double>{};
  return {StarDomain::fourier2d(anchor, a0, std::move(cos_coeffs), std::move(sin_coeffs)),
          "star2d", anchor};
}

DomainSpec parse_star3d(const json& j) {
  const Point anchor = point(field(j, "anchor"), "anchor");
  if (anchor.dim() != 3) throw InvalidInput("star3d anchor needs three coordinates");
  if (j.contains("rho")) return {star_from_rho(anchor, j.at("rho")), "star3d", anchor};
  const double a0 = real(field(j, "a0"), "a0");
  std::vector<SeparableTerm> terms;
  if (j.contains("terms")) {
    if (!j.at("terms").is_array()) throw InvalidInput("domain spec: terms must be an array");
    for (const auto& t : j.at("terms")) {
      SeparableTerm s;
      s.amplitude = real(field(t, "amplitude"), "amplitude");
      s.z_power = t.value("z_power", 0);
      s.azimuth = t.value("azimuth", 0);
      s.sine = t.value("sine", false);
      terms.push_back(s);
    }
  }
  return {StarDomain::separable3d(anchor, a0, std::move(terms)), "star3d", anchor};
}

DomainSpec parse_implicit(const json& j) {
  const int m = dimension(j);
  const Point center = j.contains("center") ? point(j.at("center"), "center") : Point(m);
  if (center.dim() != m) throw InvalidInput("domain spec: center dimension differs from m");
  const std::string shape = field(j, "shape").get<std::string>();
  const auto params = reals(field(j, "params"), "params");

  auto domain = [&]() -> ImplicitDomain {
    if (shape == "ellipse" || shape == "ellipsoid") return ImplicitDomain::ellipsoid(center, params);
    if (shape == "box") return ImplicitDomain::box(center, params);
    if (shape == "ball") {
      if (params.size() != 1) throw InvalidInput("implicit ball needs params [r]");
      return ImplicitDomain::ball(Ball(center, params[0]));
    }
    if (shape == "union") {
      if (params.size() != static_cast<std::size_t>(2 * (m + 1))) {
        throw InvalidInput("union needs params [c1..., r1, c2..., r2]");
      }
      const auto first = params.begin();
      const auto second = params.begin() + m + 1;
      const Ball a(Point(std::span<const double>(&*first, static_cast<std::size_t>(m))), first[m]);
      const Ball b(Point(std::span<const double>(&*second, static_cast<std::size_t>(m))),
                   second[m]);
      return ImplicitDomain::union_of_balls(a, b);
    }
    throw InvalidInput("unknown implicit shape '" + shape + "'");
  }();

  if (j.contains("bbox")) {
    const auto& bb = j.at("bbox");
    if (!bb.is_array() || bb.size() != static_cast<std::size_t>(m)) {
      throw InvalidInput("domain spec: bbox needs one [lo, hi] pair per coordinate");
    }
    Point lo(m);
    Point hi(m);
    for (int i = 0; i < m; ++i) {
      const auto pair = reals(bb.at(static_cast<std::size_t>(i)), "bbox");
      if (pair.size() != 2) throw InvalidInput("domain spec: bbox entries are [lo, hi]");
      lo[i] = pair[0];
      hi[i] = pair[1];
    }
    domain = domain.with_bbox(BoundingBox(lo, hi));
  }
  return {std::move(domain), "implicit", center};
}

}  // namespace

int DomainSpec::dim() const {
  return std::visit([](const auto& d) { return d.dim(); }, domain);
}

ImplicitDomain DomainSpec::as_implicit() const {
  if (const auto* star = std::get_if<StarDomain>(&domain)) return ImplicitDomain::from_star(*star);
  return std::get<ImplicitDomain>(domain);
}

DomainSpec parse_domain(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw InvalidInput(std::string("malformed domain JSON: ") + e.what());
  }
  if (!j.is_object()) throw InvalidInput("domain spec must be a JSON object");
  try {
    const std::string kind = field(j, "kind").get<std::string>();
    if (kind == "ball") {
      const int m = dimension(j);
      const Point center = point(field(j, "center"), "center");
      if (center.dim() != m) throw InvalidInput("domain spec: center dimension differs from m");
      const Ball b(center, real(field(j, "r"), "r"));
      if (m == 2 || m == 3) return {StarDomain::ball(b), "ball", center};
      return {ImplicitDomain::ball(b), "ball", center};
    }
    if (kind == "star2d") return parse_star2d(j);
    if (kind == "star3d") return parse_star3d(j);
    if (kind == "implicit") return parse_implicit(j);
    throw InvalidInput("unknown domain kind '" + kind + "'");
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("domain spec: ") + e.what());
  }
}

DomainSpec load_domain(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open domain file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_domain(ss.str());
}

}  // namespace wmean
