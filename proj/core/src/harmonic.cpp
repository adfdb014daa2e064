#include "wmean/harmonic.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <complex>

#include "wmean/error.hpp"
#include "wmean/montecarlo.hpp"

namespace wmean {
namespace {

using Exps = std::array<std::uint8_t, kMaxDim>;

Exps exps3(int a, int b, int c) {
  Exps e{};
  e[0] = static_cast<std::uint8_t>(a);
  e[1] = static_cast<std::uint8_t>(b);
  e[2] = static_cast<std::uint8_t>(c);
  return e;
}

struct CatalogueEntry {
  const char* name;
  int min_dim;  // 2: uses x, y only; 3: uses z
  std::vector<std::pair<double, Exps>> terms;
};

const std::vector<CatalogueEntry>& catalogue() {
  static const std::vector<CatalogueEntry> entries = {
      {"xy", 2, {{1.0, exps3(1, 1, 0)}}},
      {"x2-y2", 2, {{1.0, exps3(2, 0, 0)}, {-1.0, exps3(0, 2, 0)}}},
      {"x3-3xy2", 2, {{1.0, exps3(3, 0, 0)}, {-3.0, exps3(1, 2, 0)}}},
      {"3x2y-y3", 2, {{3.0, exps3(2, 1, 0)}, {-1.0, exps3(0, 3, 0)}}},
      {"x4-6x2y2+y4", 2,
       {{1.0, exps3(4, 0, 0)}, {-6.0, exps3(2, 2, 0)}, {1.0, exps3(0, 4, 0)}}},
      {"x3y-xy3", 2, {{1.0, exps3(3, 1, 0)}, {-1.0, exps3(1, 3, 0)}}},
      {"xz", 3, {{1.0, exps3(1, 0, 1)}}},
      {"yz", 3, {{1.0, exps3(0, 1, 1)}}},
      {"y2-z2", 3, {{1.0, exps3(0, 2, 0)}, {-1.0, exps3(0, 0, 2)}}},
      {"2z2-x2-y2", 3, {{2.0, exps3(0, 0, 2)}, {-1.0, exps3(2, 0, 0)}, {-1.0, exps3(0, 2, 0)}}},
      {"xyz", 3, {{1.0, exps3(1, 1, 1)}}},
      {"z(x2-y2)", 3, {{1.0, exps3(2, 0, 1)}, {-1.0, exps3(0, 2, 1)}}},
      {"2z3-3x2z-3y2z", 3,
       {{2.0, exps3(0, 0, 3)}, {-3.0, exps3(2, 0, 1)}, {-3.0, exps3(0, 2, 1)}}},
      {"z(x3-3xy2)", 3, {{1.0, exps3(3, 0, 1)}, {-3.0, exps3(1, 2, 1)}}},
  };
  return entries;
}

double ipow(double x, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= x;
  return r;
}

std::complex<double> cpow(std::complex<double> z, int n) {
  std::complex<double> r(1.0, 0.0);
  for (int i = 0; i < n; ++i) r *= z;
  return r;
}

long parse_int(std::string_view text, std::string_view what) {
  long v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw InvalidInput("malformed " + std::string(what) + " '" + std::string(text) + "'");
  }
  return v;
}

double parse_double(std::string_view text, std::string_view what) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size() ||
      !std::isfinite(v)) {
    throw InvalidInput("malformed " + std::string(what) + " '" + std::string(text) + "'");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Polynomial

double Polynomial::value(const Point& x) const {
  double s = 0.0;
  for (const auto& t : terms) {
    double v = t.coeff;
    for (int i = 0; i < dim; ++i) v *= ipow(x[i], t.exps[static_cast<std::size_t>(i)]);
    s += v;
  }
  return s;
}

Point Polynomial::gradient(const Point& x) const {
  Point g(dim);
  for (const auto& t : terms) {
    for (int j = 0; j < dim; ++j) {
      const int ej = t.exps[static_cast<std::size_t>(j)];
      if (ej == 0) continue;
      double v = t.coeff * ej;
      for (int i = 0; i < dim; ++i) {
        const int e = t.exps[static_cast<std::size_t>(i)] - (i == j ? 1 : 0);
        v *= ipow(x[i], e);
      }
      g[j] += v;
    }
  }
  return g;
}

int Polynomial::degree() const {
  int d = 0;
  for (const auto& t : terms) {
    int s = 0;
    for (int i = 0; i < dim; ++i) s += t.exps[static_cast<std::size_t>(i)];
    d = std::max(d, s);
  }
  return d;
}

// ---------------------------------------------------------------------------
// HarmonicFn

HarmonicFn HarmonicFn::constant(int m, double c) {
  check_dimension(m);
  Polynomial p{m, {{c, Exps{}}}};
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof buf, c);
  return HarmonicFn(m, std::move(p), "const:" + std::string(buf, res.ptr), 0);
}

HarmonicFn HarmonicFn::coordinate(int m, int axis) {
  check_dimension(m);
  if (axis < 0 || axis >= m) throw InvalidInput("coordinate axis out of range");
  Exps e{};
  e[static_cast<std::size_t>(axis)] = 1;
  return HarmonicFn(m, Polynomial{m, {{1.0, e}}}, "coord:" + std::to_string(axis + 1), 1);
}

HarmonicFn HarmonicFn::re_z(int n) {
  if (n < 0) throw InvalidInput("re_z needs n >= 0");
  return HarmonicFn(2, ReIm{n, false}, "re_z:" + std::to_string(n), n);
}

HarmonicFn HarmonicFn::im_z(int n) {
  if (n < 0) throw InvalidInput("im_z needs n >= 0");
  return HarmonicFn(2, ReIm{n, true}, "im_z:" + std::to_string(n), n);
}

HarmonicFn HarmonicFn::polynomial(int m, std::string_view name) {
  check_dimension(m);
  for (const auto& entry : catalogue()) {
    if (entry.name != name) continue;
    if (m < entry.min_dim) {
      throw InvalidInput("polynomial '" + std::string(name) + "' needs dimension >= " +
                         std::to_string(entry.min_dim));
    }
    Polynomial p{m, {}};
    for (const auto& [c, e] : entry.terms) p.terms.push_back({c, e});
    const int deg = p.degree();
    return HarmonicFn(m, std::move(p), "poly:" + std::string(name), deg);
  }
  throw InvalidInput("unknown catalogue polynomial '" + std::string(name) + "'");
}

HarmonicFn HarmonicFn::product(int m, int i, int j) {
  check_dimension(m);
  if (i == j || i < 0 || j < 0 || i >= m || j >= m) throw InvalidInput("invalid product axes");
  Exps e{};
  e[static_cast<std::size_t>(i)] = 1;
  e[static_cast<std::size_t>(j)] = 1;
  return HarmonicFn(m, Polynomial{m, {{1.0, e}}},
                    "x" + std::to_string(i + 1) + "*x" + std::to_string(j + 1), 2);
}

HarmonicFn HarmonicFn::square_difference(int m, int i, int j) {
  check_dimension(m);
  if (i == j || i < 0 || j < 0 || i >= m || j >= m) throw InvalidInput("invalid axes");
  Exps a{};
  Exps b{};
  a[static_cast<std::size_t>(i)] = 2;
  b[static_cast<std::size_t>(j)] = 2;
  return HarmonicFn(m, Polynomial{m, {{1.0, a}, {-1.0, b}}},
                    "x" + std::to_string(i + 1) + "^2-x" + std::to_string(j + 1) + "^2", 2);
}

HarmonicFn HarmonicFn::fundamental(const Point& pole) {
  check_dimension(pole.dim());
  std::string name = "fund:";
  for (int i = 0; i < pole.dim(); ++i) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, pole[i]);
    name += (i ? "," : "") + std::string(buf, res.ptr);
  }
  return HarmonicFn(pole.dim(), Fundamental{pole}, name, -1);
}

HarmonicFn HarmonicFn::combination(std::vector<std::pair<double, HarmonicFn>> terms) {
  if (terms.empty()) throw InvalidInput("empty linear combination");
  const int m = terms.front().second.dim();
  std::string name;
  int degree = 0;
  bool all_poly = true;
  for (const auto& [c, f] : terms) {
    if (f.dim() != m) throw InvalidInput("linear combination mixes dimensions");
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, c);
    name += (name.empty() ? "" : " + ") + std::string(buf, res.ptr) + "*" + f.name();
    degree = (f.degree() < 0 || degree < 0) ? -1 : std::max(degree, f.degree());
    all_poly = all_poly && std::holds_alternative<Polynomial>(f.family_);
  }
  if (all_poly) {
    Polynomial merged{m, {}};
    for (const auto& [c, f] : terms) {
      for (auto t : std::get<Polynomial>(f.family_).terms) {
        t.coeff *= c;
        merged.terms.push_back(t);
      }
    }
    return HarmonicFn(m, std::move(merged), name, degree);
  }
  Combination comb;
  for (auto& [c, f] : terms) comb.terms.emplace_back(c, std::make_shared<const HarmonicFn>(f));
  return HarmonicFn(m, std::move(comb), name, degree);
}

double HarmonicFn::value(const Point& x) const {
  return std::visit(
      [&](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Polynomial>) {
          return f.value(x);
        } else if constexpr (std::is_same_v<T, ReIm>) {
          const auto zn = cpow({x[0], x[1]}, f.n);
          return f.imaginary ? zn.imag() : zn.real();
        } else if constexpr (std::is_same_v<T, Fundamental>) {
          const double d = distance(x, f.pole);
          if (d == 0.0) throw InvalidInput("fundamental solution evaluated at its pole");
          return dim_ == 2 ? std::log(d) : std::pow(d, 2 - dim_);
        } else {
          double s = 0.0;
          for (const auto& [c, g] : f.terms) s += c * g->value(x);
          return s;
        }
      },
      family_);
}

Point HarmonicFn::gradient(const Point& x) const {
  return std::visit(
      [&](const auto& f) -> Point {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Polynomial>) {
          return f.gradient(x);
        } else if constexpr (std::is_same_v<T, ReIm>) {
          Point g(2);
          if (f.n == 0) return g;
          const auto d = static_cast<double>(f.n) * cpow({x[0], x[1]}, f.n - 1);
          if (f.imaginary) {
            g[0] = d.imag();
            g[1] = d.real();
          } else {
            g[0] = d.real();
            g[1] = -d.imag();
          }
          return g;
        } else if constexpr (std::is_same_v<T, Fundamental>) {
          Point v = x - f.pole;
          const double d2 = v.norm_squared();
          if (d2 == 0.0) throw InvalidInput("fundamental solution evaluated at its pole");
          const double scale = dim_ == 2 ? 1.0 / d2 : (2.0 - dim_) * std::pow(d2, -0.5 * dim_);
          return v * scale;
        } else {
          Point g(dim_);
          for (const auto& [c, h] : f.terms) g += h->gradient(x) * c;
          return g;
        }
      },
      family_);
}

HarmonicFn HarmonicFn::renamed(std::string name) const {
  HarmonicFn out = *this;
  out.name_ = std::move(name);
  return out;
}

std::vector<std::string> HarmonicFn::catalogue_names(int m) {
  std::vector<std::string> out;
  for (const auto& e : catalogue()) {
    if (m >= e.min_dim && m <= 3) out.emplace_back(e.name);
  }
  return out;
}

ScalarField HarmonicFn::field() const {
  return [self = *this](const Point& y) { return self.value(y); };
}

double laplacian_fd(const ScalarField& f, const Point& x, double h) {
  if (!(h > 0.0)) throw InvalidInput("finite-difference step must be positive");
  const double f0 = f(x);
  double s = 0.0;
  for (int i = 0; i < x.dim(); ++i) {
    Point p = x;
    Point q = x;
    p[i] += h;
    q[i] -= h;
    s += (f(p) - 2.0 * f0 + f(q)) / (h * h);
  }
  return s;
}

std::vector<HarmonicFn> harmonic_catalogue(int m) {
  if (m != 2 && m != 3) throw InvalidInput("the polynomial catalogue covers m = 2, 3");
  std::vector<HarmonicFn> out;
  out.push_back(HarmonicFn::constant(m, 1.0));
  for (int i = 0; i < m; ++i) out.push_back(HarmonicFn::coordinate(m, i));
  for (const auto& name : HarmonicFn::catalogue_names(m)) {
    out.push_back(HarmonicFn::polynomial(m, name));
  }
  return out;
}

HarmonicFn random_harmonic(std::uint64_t seed, int m, int max_degree) {
  if (m != 2 && m != 3) throw InvalidInput("random_harmonic supports m = 2, 3");
  if (max_degree < 0 || max_degree > 4) throw InvalidInput("random_harmonic degree must lie in [0, 4]");
  McRng rng(stream_seed(seed, 0));
  std::vector<std::pair<double, HarmonicFn>> terms;
  for (auto& f : harmonic_catalogue(m)) {
    if (f.degree() > max_degree) continue;
    terms.emplace_back(2.0 * rng.uniform() - 1.0, std::move(f));
  }
  return HarmonicFn::combination(std::move(terms))
      .renamed("random:seed=" + std::to_string(seed) + ",deg=" + std::to_string(max_degree));
}

HarmonicFn parse_function(std::string_view spec, int m) {
  check_dimension(m);
  const auto colon = spec.find(':');
  if (colon == std::string_view::npos) {
    throw InvalidInput("function spec '" + std::string(spec) + "' needs the form family:args");
  }
  const auto family = spec.substr(0, colon);
  const auto args = spec.substr(colon + 1);
  if (family == "const") return HarmonicFn::constant(m, parse_double(args, "constant"));
  if (family == "coord") {
    const long i = parse_int(args, "coordinate index");
    if (i < 1 || i > m) throw InvalidInput("coordinate index must lie in [1, m]");
    return HarmonicFn::coordinate(m, static_cast<int>(i - 1));
  }
  if (family == "re_z" || family == "im_z") {
    if (m != 2) throw InvalidInput(std::string(family) + " is defined for m = 2 only");
    const long n = parse_int(args, "power");
    if (n < 0 || n > 64) throw InvalidInput("power must lie in [0, 64]");
    return family == "re_z" ? HarmonicFn::re_z(static_cast<int>(n))
                            : HarmonicFn::im_z(static_cast<int>(n));
  }
  if (family == "poly") return HarmonicFn::polynomial(m, args);
  if (family == "fund") {
    std::vector<double> coords;
    for (auto part : split(args, ',')) coords.push_back(parse_double(part, "pole coordinate"));
    if (static_cast<int>(coords.size()) != m) {
      throw InvalidInput("pole needs " + std::to_string(m) + " coordinates");
    }
    return HarmonicFn::fundamental(Point(std::span<const double>(coords)));
  }
  if (family == "random") {
    std::uint64_t seed = 0;
    long deg = 3;
    for (auto part : split(args, ',')) {
      const auto eq = part.find('=');
      if (eq == std::string_view::npos) throw InvalidInput("random spec expects key=value pairs");
      const auto key = part.substr(0, eq);
      const auto val = part.substr(eq + 1);
      if (key == "seed") {
        seed = static_cast<std::uint64_t>(parse_int(val, "seed"));
      } else if (key == "deg") {
        deg = parse_int(val, "degree");
      } else {
        throw InvalidInput("unknown random spec key '" + std::string(key) + "'");
      }
    }
    if (deg < 0 || deg > 4) throw InvalidInput("random degree must lie in [0, 4]");
    return random_harmonic(seed, m, static_cast<int>(deg));
  }
  throw InvalidInput("unknown function family '" + std::string(family) + "'");
}

}  // namespace wmean
