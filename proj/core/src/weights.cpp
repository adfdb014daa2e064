#include "wmean/weights.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>

#include "wmean/error.hpp"
#include "wmean/summation.hpp"

namespace wmean {
namespace {

constexpr int kPrimitivePanels = 100;
constexpr int kPrimitiveNodes = 16;
constexpr double kPrimitiveRatio = 0.5;

std::string shortest(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_real(std::string_view text, std::string_view what) {
  double v = 0.0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (text.empty() || ec != std::errc() || ptr != last || !std::isfinite(v)) {
    throw InvalidInput("malformed " + std::string(what) + " value '" + std::string(text) + "'");
  }
  return v;
}

}  // namespace

Weight Weight::log(int m) {
  check_dimension(m);
  return Weight(Kind::Log, m, 0.0);
}

Weight Weight::riesz(int m, double alpha) {
  check_dimension(m);
  if (!(alpha > 0.0 && alpha < m)) {
    throw InvalidInput("Riesz weight needs 0 < alpha < m (m = " + std::to_string(m) +
                       "), got alpha = " + shortest(alpha));
  }
  return Weight(Kind::Riesz, m, alpha);
}

Weight Weight::power(int m, double beta) {
  check_dimension(m);
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw InvalidInput("power weight needs beta > 0, got beta = " + shortest(beta));
  }
  return Weight(Kind::Power, m, beta);
}

Weight Weight::custom(int m, const Expr& w) {
  check_dimension(m);
  Weight out(Kind::Custom, m, 0.0);
  out.expr_ = std::make_shared<const Expr>(Expr::parse(w.str(), {"t", "r"}));
  return out;
}

Weight Weight::custom(int m, std::string_view source) {
  return custom(m, Expr::parse(source, {"t", "r"}));
}

double Weight::value(double t, double r) const {
  switch (kind_) {
    case Kind::Log: return std::log(r / t);
    case Kind::Riesz: return std::pow(t, param_ - m_) - std::pow(r, param_ - m_);
    case Kind::Power: return std::pow(r, param_) - std::pow(t, param_);
    case Kind::Custom: {
      const double vals[] = {t, r};
      return expr_->eval(std::span<const double>(vals, 2));
    }
  }
  return 0.0;
}

double Weight::radial_primitive(double T, double r) const {
  if (!(T > 0.0) || !(r > 0.0)) throw InvalidInput("radial primitive needs T > 0 and r > 0");
  const double m = m_;
  switch (kind_) {
    case Kind::Log: return std::pow(T, m) / (m * m) * (m * std::log(r / T) + 1.0);
    case Kind::Riesz:
      return std::pow(T, param_) / param_ - std::pow(r, param_ - m) * std::pow(T, m) / m;
    case Kind::Power:
      return std::pow(r, param_) * std::pow(T, m) / m - std::pow(T, m + param_) / (m + param_);
    case Kind::Custom: return radial_primitive_numeric(T, r).value;
  }
  return 0.0;
}

Estimate Weight::radial_primitive_numeric(double T, double r) const {
  if (!(T > 0.0) || !(r > 0.0)) throw InvalidInput("radial primitive needs T > 0 and r > 0");
  const auto rule =
      RadialPanelRule::graded(T, kPrimitivePanels, kPrimitiveNodes, kPrimitiveRatio);
  const int m1 = m_ - 1;

  // Panel-wise sums, innermost first, so the decay towards t = 0 can be checked.
  auto panel_sums = [&](const std::vector<RadialPanelRule::Node>& nodes, std::size_t per_panel) {
    std::vector<double> sums;
    sums.reserve(nodes.size() / per_panel);
    for (std::size_t p = 0; p < nodes.size(); p += per_panel) {
      CompensatedSum s;
      for (std::size_t i = p; i < p + per_panel; ++i) {
        const double t = nodes[i].rho;
        const double v = std::pow(t, m1) * value(t, r);
        if (!std::isfinite(v)) throw EvaluationFailure("weight is not finite", t);
        s.add(nodes[i].weight * v);
      }
      sums.push_back(s.value());
    }
    return sums;
  };
  const auto full = panel_sums(rule.nodes(), static_cast<std::size_t>(rule.nodes_per_panel()));
  const auto half = panel_sums(rule.half_nodes(),
                               rule.half_nodes().size() / static_cast<std::size_t>(rule.panels()));

  CompensatedSum total;
  CompensatedSum total_half;
  double total_abs = 0.0;
  for (std::size_t k = 0; k < full.size(); ++k) {
    total.add(full[k]);
    total_half.add(half[k]);
    total_abs += std::abs(full[k]);
  }

  // Geometric tail beyond the innermost panel: c_0 q / (1 - q).
  const double c0 = std::abs(full[0]);
  const double c1 = std::abs(full[1]);
  const double q = c1 > 0.0 ? c0 / c1 : (c0 > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
  const double tail = q < 1.0 ? c0 * q / (1.0 - q) : std::numeric_limits<double>::infinity();
  if (q >= 0.999 || tail > 1e-6 * std::max(total_abs, 1e-300)) {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "weight '%s' is not integrable against t^%d near t = 0 (panel ratio %.3g)",
                  spec().c_str(), m1, q);
    throw DivergenceError(buf);
  }

  Estimate e;
  e.value = total.value();
  e.error = std::abs(total.value() - total_half.value()) + tail;
  e.method = Estimate::Method::ProductRule;
  e.n_evals = rule.nodes().size() + rule.half_nodes().size();
  return e;
}

double Weight::mean_constant(double r) const {
  if (!(r > 0.0)) throw InvalidInput("mean constant needs r > 0");
  return m_ * radial_primitive(r, r) / std::pow(r, m_);
}

std::string Weight::spec() const {
  switch (kind_) {
    case Kind::Log: return "log";
    case Kind::Riesz: return "riesz:alpha=" + shortest(param_);
    case Kind::Power: return "power:beta=" + shortest(param_);
    case Kind::Custom: return "custom:" + expr_->str();
  }
  return "";
}

Weight parse_weight(std::string_view spec, int m) {
  auto trim = [](std::string_view s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string_view::npos) return std::string_view{};
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
  };
  spec = trim(spec);
  if (spec == "log") return Weight::log(m);
  const auto colon = spec.find(':');
  if (colon == std::string_view::npos) {
    throw InvalidInput("unknown weight '" + std::string(spec) +
                       "' (expected log, riesz:alpha=<a>, power:beta=<b> or custom:<expr>)");
  }
  const auto family = spec.substr(0, colon);
  const auto rest = trim(spec.substr(colon + 1));
  auto keyed = [&](std::string_view key) {
    if (rest.substr(0, key.size()) != key || rest.size() <= key.size() ||
        rest[key.size()] != '=') {
      throw InvalidInput("weight '" + std::string(family) + "' expects " + std::string(key) +
                         "=<real>");
    }
    return parse_real(trim(rest.substr(key.size() + 1)), key);
  };
  if (family == "riesz") return Weight::riesz(m, keyed("alpha"));
  if (family == "power") return Weight::power(m, keyed("beta"));
  if (family == "custom") {
    try {
      return Weight::custom(m, rest);
    } catch (const ParseError& e) {
      // Report the position within the whole spec string.
      throw ParseError("in custom weight: " + e.detail(),
                       e.position() + static_cast<std::size_t>(rest.data() - spec.data()));
    }
  }
  throw InvalidInput("unknown weight family '" + std::string(family) + "'");
}

WeightValidity validate_weight(const Weight& w, double r) {
  if (!(r > 0.0)) throw InvalidInput("validate_weight needs r > 0");
  constexpr int kSamples = 10000;
  WeightValidity out;
  const int m1 = w.dim() - 1;

  auto note = [&](const std::string& msg) {
    if (out.detail.empty()) out.detail = msg;
  };
  auto describe = [](const char* what, double t, double v) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "%s: w(%.6g, r) = %.6g", what, t, v);
    return std::string(buf);
  };

  auto sign_check = [&](double lo, double hi, bool want_positive, const char* what) {
    for (int j = 0; j < kSamples; ++j) {
      const double t = lo + (hi - lo) * (j + 1.0) / (kSamples + 1.0);
      try {
        const double v = w.value(t, r);
        if (want_positive ? !(v > 0.0) : !(v < 0.0)) {
          note(describe(what, t, v));
          return false;
        }
      } catch (const EvalError& e) {
        note(std::string(what) + ": " + e.what());
        return false;
      }
    }
    return true;
  };
  out.sign_below = sign_check(0.0, r, true, "sign below r");
  out.sign_above = sign_check(r, 4.0 * r, false, "sign above r");

  try {
    const double v = w.value(r, r);
    out.zero_at_r = std::abs(v) <= 1e-12;
    if (!out.zero_at_r) note(describe("zero at r", r, v));
  } catch (const EvalError& e) {
    note(std::string("zero at r: ") + e.what());
  }

  // Dyadic integrals I_k = ∫_{r 2^{-k-1}}^{r 2^{-k}} t^{m-1} |w| dt.
  constexpr int kFirst = 1;
  constexpr int kLast = 60;
  constexpr int kFit = 20;
  const auto gl = gauss_legendre(16);
  std::vector<double> dyadic;
  try {
    for (int k = kFirst; k <= kLast; ++k) {
      const double b = std::ldexp(r, -k);
      const double a = 0.5 * b;
      const double mid = 0.5 * (a + b);
      const double hw = 0.5 * (b - a);
      CompensatedSum s;
      for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
        const double t = mid + hw * gl.nodes[i];
        s.add(hw * gl.weights[i] * std::pow(t, m1) * std::abs(w.value(t, r)));
      }
      dyadic.push_back(s.value());
    }
  } catch (const EvalError& e) {
    note(std::string("integrability: ") + e.what());
    return out;
  }

  const bool finite = std::all_of(dyadic.begin(), dyadic.end(),
                                  [](double v) { return std::isfinite(v); });
  const double newest = dyadic.back();
  const double oldest = dyadic[dyadic.size() - 1 - kFit];
  if (!finite) {
    out.decay_exponent = -std::numeric_limits<double>::infinity();
  } else if (newest == 0.0) {
    out.decay_exponent = std::numeric_limits<double>::infinity();
  } else if (oldest == 0.0) {
    out.decay_exponent = -std::numeric_limits<double>::infinity();
  } else {
    out.decay_exponent = std::log2(oldest / newest) / kFit;
  }
  out.integrable = out.decay_exponent > 0.01;
  if (!out.integrable) {
    char buf[128];
    std::snprintf(buf, sizeof buf,
                  "integrability: dyadic integrals near t = 0 decay with exponent %.3g",
                  out.decay_exponent);
    note(buf);
  }
  return out;
}

}  // namespace wmean
