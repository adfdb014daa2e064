#include "cli.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "json_writer.hpp"
#include "wmean/characterize.hpp"
#include "wmean/domain_io.hpp"
#include "wmean/error.hpp"
#include "wmean/harmonic.hpp"
#include "wmean/meanvalue.hpp"
#include "wmean/parallel.hpp"
#include "wmean/version.hpp"
#include "wmean/weights.hpp"

namespace wmean::cli {
namespace {

constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();

struct RunConfig {
  std::string subcommand;
  int m = 2;
  std::string center;
  double r = 1.0;
  std::string fn = "const:1";
  std::string weight = "log";
  std::string kind = "weighted";
  int axis = 0;
  double tol = kUnset;
  std::string domain;
  std::string guess;
  std::string x;
  double char_r = kUnset;
  std::string inner_center;
  double inner_r = kUnset;
  std::string x0;
  std::size_t samples = 10'000;
  double r0 = 1.0;
  std::string amplitudes = "0,0.01,0.02,0.05,0.1";
  int mode = 2;
  bool trace = false;

  std::uint64_t seed = 0;
  int sphere_n = 256;
  int radial_panels = 100;
  int radial_nodes = 16;
  double grading_ratio = 0.5;
  std::size_t mc_n = 1'000'000;
  int threads = 0;
  std::string out;
};

std::vector<double> parse_reals(std::string_view text, std::string_view what) {
  std::vector<double> out;
  if (text.empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(',', start);
    auto part = text.substr(start, pos == std::string_view::npos ? text.npos : pos - start);
    while (!part.empty() && part.front() == ' ') part.remove_prefix(1);
    while (!part.empty() && part.back() == ' ') part.remove_suffix(1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (part.empty() || ec != std::errc() || ptr != part.data() + part.size() ||
        !std::isfinite(v)) {
      throw InvalidInput("malformed " + std::string(what) + " entry '" + std::string(part) +
                         "' at position " + std::to_string(start));
    }
    out.push_back(v);
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

Point parse_point(const std::string& text, int m, std::string_view what,
                  const std::optional<Point>& fallback = std::nullopt) {
  if (text.empty()) return fallback ? *fallback : Point(m);
  const auto v = parse_reals(text, what);
  if (static_cast<int>(v.size()) != m) {
    throw InvalidInput(std::string(what) + " needs " + std::to_string(m) + " coordinates, got " +
                       std::to_string(v.size()));
  }
  return Point(std::span<const double>(v));
}

Json point_json(const Point& p) {
  Json a = Json::array();
  for (double c : p.coords()) a.push_back(c);
  return a;
}

Json estimate_json(const Estimate& e) {
  return Json{{"value", e.value},
              {"error", e.error},
              {"method", method_name(e.method)},
              {"n_evals", e.n_evals}};
}

RuleConfig rules_of(const RunConfig& cfg) {
  return RuleConfig{cfg.sphere_n, cfg.radial_panels, cfg.radial_nodes, cfg.grading_ratio};
}

// Builds the rules eagerly so that bad sizes are reported before computing.
void validate_rules(const RunConfig& cfg, int m) {
  const auto rules = rules_of(cfg);
  if (has_product_rule(m)) {
    (void)rules.sphere_rule(m);
    (void)rules.radial_rule(1.0);
  }
  if (cfg.mc_n < 1000) throw InvalidInput("--mc-n must be at least 1000");
}

Json provenance(const RunConfig& cfg, int m, double tol) {
  const auto rules = rules_of(cfg);
  Json p;
  p["tool"] = "wmean";
  p["version"] = kVersion;
  p["subcommand"] = cfg.subcommand;
  p["seed"] = cfg.seed;
  p["tolerance"] = std::isnan(tol) ? Json(nullptr) : Json(tol);
  p["sphere_n"] = cfg.sphere_n;
  p["radial_panels"] = cfg.radial_panels;
  p["radial_nodes"] = cfg.radial_nodes;
  p["grading_ratio"] = cfg.grading_ratio;
  p["mc_n"] = cfg.mc_n;
  p["sphere_rule"] = has_product_rule(m) ? Json(rules.sphere_rule(m).describe()) : Json(nullptr);
  return p;
}

struct TestFn {
  TestFunction fn;
  std::optional<HarmonicFn> harmonic;
};

TestFn parse_test_function(const std::string& spec, int m) {
  if (spec == "control:r2") return {TestFunction::squared_norm(m), std::nullopt};
  auto u = parse_function(spec, m);
  return {TestFunction::from(u), u};
}

Json identity_json(const IdentityReport& rep, const RunConfig& cfg) {
  Json j;
  j["report"] = "identity";
  j["identity"] = rep.identity;
  j["function"] = rep.function;
  j["weight"] = rep.weight.empty() ? Json(nullptr) : Json(rep.weight);
  j["m"] = rep.ball.dim();
  j["center"] = point_json(rep.ball.center());
  j["r"] = rep.ball.radius();
  j["axis"] = rep.axis < 0 ? Json(nullptr) : Json(rep.axis + 1);
  j["claimed"] = rep.claimed;
  j["computed"] = estimate_json(rep.computed);
  j["residual"] = rep.residual;
  j["tolerance"] = rep.tolerance;
  j["pass"] = rep.pass;
  j["provenance"] = provenance(cfg, rep.ball.dim(), cfg.tol);
  return j;
}

MeanOptions mean_options(const RunConfig& cfg) {
  MeanOptions o;
  o.rules = rules_of(cfg);
  o.mc_n = cfg.mc_n;
  o.seed = cfg.seed;
  return o;
}

CharacterizeOptions char_options(const RunConfig& cfg) {
  CharacterizeOptions o;
  o.rules = rules_of(cfg);
  o.mc_n = cfg.mc_n;
  o.seed = cfg.seed;
  return o;
}

struct Output {
  std::string text;
  int code = kExitOk;

  void line(const Json& j) { text += to_json_line(j) + "\n"; }
  void fail_unless(bool ok) {
    if (!ok) code = kExitCheckFailed;
  }
};

Output cmd_verify(RunConfig& cfg) {
  if (std::isnan(cfg.tol)) cfg.tol = kDefaultTolerance;
  check_dimension(cfg.m);
  validate_rules(cfg, cfg.m);
  const Ball ball(parse_point(cfg.center, cfg.m, "--center"), cfg.r);
  const auto fn = parse_test_function(cfg.fn, cfg.m);
  const bool all = cfg.kind == "all";
  if (!all && cfg.kind != "spherical" && cfg.kind != "volume" && cfg.kind != "weighted" &&
      cfg.kind != "gradient") {
    throw InvalidInput("--kind must be spherical, volume, weighted, gradient or all");
  }
  const bool want_gradient = all || cfg.kind == "gradient";
  if (want_gradient && !fn.harmonic) {
    throw InvalidInput("gradient reports need a harmonic function with an analytic gradient");
  }
  if (cfg.axis < 0 || cfg.axis > cfg.m) throw InvalidInput("--axis must lie in [0, m]");
  std::optional<Weight> w;
  if (all || cfg.kind == "weighted") w = parse_weight(cfg.weight, cfg.m);
  const auto opt = mean_options(cfg);

  Output out;
  auto emit = [&](const IdentityReport& rep) {
    out.line(identity_json(rep, cfg));
    out.fail_unless(rep.pass);
  };
  if (all || cfg.kind == "spherical") emit(verify_spherical(fn.fn, ball, cfg.tol, opt));
  if (all || cfg.kind == "volume") emit(verify_volume(fn.fn, ball, cfg.tol, opt));
  if (w) emit(verify_identity(fn.fn, ball, *w, cfg.tol, opt));
  if (want_gradient) {
    for (int i = 0; i < cfg.m; ++i) {
      if (cfg.axis != 0 && cfg.axis != i + 1) continue;
      emit(verify_gradient(*fn.harmonic, ball, i, cfg.tol, opt));
    }
  }
  return out;
}

Output cmd_bounds(RunConfig& cfg) {
  check_dimension(cfg.m);
  const Point c = parse_point(cfg.center, cfg.m, "--center");
  const Ball D(c, cfg.r);
  const Ball Dp(parse_point(cfg.inner_center, cfg.m, "--inner-center", c),
                std::isnan(cfg.inner_r) ? 0.5 * cfg.r : cfg.inner_r);
  const Point x0 = parse_point(cfg.x0, cfg.m, "--x0", c);
  const auto u = parse_function(cfg.fn, cfg.m);

  const auto rep = derivative_bound_check(u, D, Dp, x0, cfg.samples, cfg.seed);
  Json j;
  j["report"] = "derivative_bound";
  j["function"] = u.name();
  j["m"] = cfg.m;
  j["D"] = Json{{"center", point_json(D.center())}, {"r", D.radius()}};
  j["D_prime"] = Json{{"center", point_json(Dp.center())}, {"r", Dp.radius()}};
  j["d"] = rep.d;
  j["max_gradient"] = rep.max_gradient;
  j["sup_abs"] = rep.sup_abs;
  j["bound"] = rep.bound;
  j["bound_holds"] = rep.bound_holds;
  j["min_value"] = rep.min_value;
  j["x0"] = point_json(rep.x0);
  j["d0"] = rep.d0;
  j["gradient_x0"] = rep.gradient_x0;
  j["nonnegative_checked"] = rep.nonnegative_checked;
  j["nonnegative_bound"] =
      rep.nonnegative_checked ? Json(rep.nonnegative_bound) : Json(nullptr);
  j["nonnegative_holds"] = rep.nonnegative_checked ? Json(rep.nonnegative_holds) : Json(nullptr);
  j["samples"] = rep.n_samples;
  j["provenance"] = provenance(cfg, cfg.m, kUnset);
  Output out;
  out.line(j);
  out.fail_unless(rep.all_hold());
  return out;
}

std::string domain_label(const DomainSpec& spec) {
  if (const auto* star = std::get_if<StarDomain>(&spec.domain)) return star->describe();
  return std::get<ImplicitDomain>(spec.domain).label();
}

Output cmd_characterize(RunConfig& cfg) {
  if (std::isnan(cfg.tol)) cfg.tol = 1e-7;
  if (cfg.domain.empty()) throw InvalidInput("--domain is required");
  const auto spec = load_domain(cfg.domain);
  const int m = spec.dim();
  validate_rules(cfg, m);
  const auto w = parse_weight(cfg.weight, m);
  const Point x = parse_point(cfg.x, m, "--x", spec.reference);
  const auto opt = char_options(cfg);

  double r = cfg.char_r;
  if (std::isnan(r)) {
    r = spec.is_star() ? matched_radius(std::get<StarDomain>(spec.domain), opt.rules)
                       : matched_radius(std::get<ImplicitDomain>(spec.domain), cfg.mc_n, cfg.seed);
  }
  const auto def = std::visit([&](const auto& D) { return deficiency(D, x, r, w, opt); },
                              spec.domain);
  const auto verdict = def.ball_verdict(cfg.tol);
  Json j;
  j["report"] = "deficiency";
  j["domain"] = domain_label(spec);
  j["kind"] = spec.kind;
  j["m"] = m;
  j["x"] = point_json(x);
  j["r"] = def.r;
  j["weight"] = w.spec();
  j["deficiency"] = def.value;
  j["error"] = def.error();
  j["c_w"] = def.c_w;
  j["phi"] = estimate_json(def.phi);
  j["domain_volume"] = def.domain_volume;
  j["volume_condition_ok"] = def.volume_condition_ok;
  j["is_ball"] = verdict ? Json(*verdict) : Json(nullptr);
  j["provenance"] = provenance(cfg, m, cfg.tol);
  Output out;
  out.line(j);
  return out;
}

Output cmd_recover(RunConfig& cfg) {
  if (std::isnan(cfg.tol)) cfg.tol = 1e-7;
  if (cfg.domain.empty()) throw InvalidInput("--domain is required");
  const auto spec = load_domain(cfg.domain);
  if (!spec.is_star()) throw InvalidInput("recover needs a ball or star domain");
  const auto& D = std::get<StarDomain>(spec.domain);
  const int m = spec.dim();
  validate_rules(cfg, m);
  const auto w = parse_weight(cfg.weight, m);
  const Point x0 = parse_point(cfg.guess, m, "--guess", spec.reference);

  const auto rep = recover_ball(D, w, x0, cfg.tol, char_options(cfg));
  Json j;
  j["report"] = "recovery";
  j["domain"] = D.describe();
  j["m"] = m;
  j["weight"] = w.spec();
  j["guess"] = point_json(x0);
  j["center"] = point_json(rep.center);
  j["r"] = rep.r;
  j["delta_min"] = rep.delta_min;
  j["error"] = rep.error;
  j["tol"] = rep.tol;
  j["is_ball"] = rep.is_ball;
  j["converged"] = rep.converged;
  j["iterations"] = rep.iterations;
  j["evaluations"] = rep.evaluations;
  j["final_method"] = rep.final_method;
  if (cfg.trace) {
    Json trace = Json::array();
    for (const auto& s : rep.trace) {
      trace.push_back(Json{{"iteration", s.iteration},
                           {"best", point_json(s.best)},
                           {"delta", s.delta},
                           {"diameter", s.diameter}});
    }
    j["trace"] = trace;
  }
  j["provenance"] = provenance(cfg, m, cfg.tol);
  Output out;
  out.line(j);
  return out;
}

Output cmd_sweep(RunConfig& cfg) {
  validate_rules(cfg, 2);
  const auto w = parse_weight(cfg.weight, 2);
  const auto amps = parse_reals(cfg.amplitudes, "--amplitudes");
  if (amps.empty()) throw InvalidInput("--amplitudes needs at least one value");
  for (double a : amps) {
    if (!(std::abs(a) < cfg.r0)) throw InvalidInput("every amplitude must satisfy |a| < r0");
  }
  const auto rows = perturbation_sweep(cfg.r0, amps, cfg.mode, w, char_options(cfg));
  Output out;
  out.text += "# wmean " + std::string(kVersion) + " sweep weight=" + w.spec() +
              " r0=" + format_real(cfg.r0) + " mode=" + std::to_string(cfg.mode) +
              " sphere_n=" + std::to_string(cfg.sphere_n) +
              " radial_panels=" + std::to_string(cfg.radial_panels) +
              " radial_nodes=" + std::to_string(cfg.radial_nodes) +
              " grading_ratio=" + format_real(cfg.grading_ratio) + "\n";
  out.text += "amplitude,r,deficiency,error\n";
  for (const auto& row : rows) {
    out.text += format_real(row.amplitude) + "," + format_real(row.r) + "," +
                format_real(row.deficiency) + "," + format_real(row.error) + "\n";
    out.fail_unless(row.expected_sign);
  }
  return out;
}

Output cmd_probe(RunConfig& cfg) {
  if (std::isnan(cfg.tol)) cfg.tol = 1e-7;
  check_dimension(cfg.m);
  validate_rules(cfg, cfg.m);
  const Ball ball(parse_point(cfg.center, cfg.m, "--center"), cfg.r);
  const auto u = parse_function(cfg.fn, cfg.m);
  const auto w = parse_weight(cfg.weight, cfg.m);
  const auto rep = conjecture_probe(u, ball, w, cfg.tol, mean_options(cfg));
  Output out;
  out.line(identity_json(rep, cfg));
  out.fail_unless(rep.pass);
  return out;
}

Output cmd_validate_weight(RunConfig& cfg) {
  check_dimension(cfg.m);
  const auto w = parse_weight(cfg.weight, cfg.m);
  if (!(cfg.r > 0.0)) throw InvalidInput("--r must be positive");
  const auto v = validate_weight(w, cfg.r);
  Json j;
  j["report"] = "weight_validity";
  j["weight"] = w.spec();
  j["m"] = cfg.m;
  j["r"] = cfg.r;
  j["sign_below"] = v.sign_below;
  j["sign_above"] = v.sign_above;
  j["zero_at_r"] = v.zero_at_r;
  j["integrable"] = v.integrable;
  j["decay_exponent"] = v.decay_exponent;
  j["detail"] = v.detail;
  j["valid"] = v.all_pass();
  j["provenance"] = provenance(cfg, cfg.m, kUnset);
  Output out;
  out.line(j);
  out.fail_unless(v.all_pass());
  return out;
}

void add_common(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--seed", cfg.seed, "Base seed for Monte Carlo sampling")->capture_default_str();
  sub->add_option("--sphere-n", cfg.sphere_n, "Circle node count (3D rule uses n/8 x n/4)")
      ->capture_default_str();
  sub->add_option("--radial-panels", cfg.radial_panels, "Graded radial panels")
      ->capture_default_str();
  sub->add_option("--radial-nodes", cfg.radial_nodes, "Gauss nodes per radial panel")
      ->capture_default_str();
  sub->add_option("--grading-ratio", cfg.grading_ratio, "Geometric panel ratio in (0, 1)")
      ->capture_default_str();
  sub->add_option("--mc-n", cfg.mc_n, "Monte Carlo sample count")->capture_default_str();
  sub->add_option("--threads", cfg.threads, "Worker threads (0 = hardware concurrency)")
      ->capture_default_str();
  sub->add_option("--out", cfg.out, "Write output to this file instead of stdout");
}

void add_ball(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--m", cfg.m, "Dimension")->capture_default_str();
  sub->add_option("--center", cfg.center, "Ball center, comma separated (default origin)");
  sub->add_option("--r", cfg.r, "Ball radius")->capture_default_str();
  sub->add_option("--fn", cfg.fn, "Function spec, e.g. re_z:3, poly:x2-y2, fund:2,0")
      ->capture_default_str();
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Weighted mean-value identities and ball characterization", "wmean"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  auto* verify = app.add_subcommand("verify", "Check a mean-value identity on a ball");
  add_ball(verify, cfg);
  verify->add_option("--kind", cfg.kind, "spherical | volume | weighted | gradient | all")
      ->capture_default_str();
  verify->add_option("--weight", cfg.weight, "Weight spec for --kind weighted")
      ->capture_default_str();
  verify->add_option("--axis", cfg.axis, "Gradient axis, 1-based (0 = every axis)")
      ->capture_default_str();
  verify->add_option("--tol", cfg.tol, "Tolerance (default 1e-8)");

  auto* bounds = app.add_subcommand("bounds", "Check the interior derivative estimates");
  add_ball(bounds, cfg);
  bounds->add_option("--inner-center", cfg.inner_center, "Center of D' (default: center of D)");
  bounds->add_option("--inner-r", cfg.inner_r, "Radius of D' (default: r / 2)");
  bounds->add_option("--x0", cfg.x0, "Point for the nonnegative estimate (default: center)");
  bounds->add_option("--samples", cfg.samples, "Samples per region")->capture_default_str();

  auto* characterize = app.add_subcommand("characterize", "Deficiency of a domain");
  characterize->add_option("--domain", cfg.domain, "Domain spec JSON file")->required();
  characterize->add_option("--weight", cfg.weight, "Weight spec")->capture_default_str();
  characterize->add_option("--x", cfg.x, "Evaluation point (default: anchor or center)");
  characterize->add_option("--r", cfg.char_r, "Radius (default: volume-matched radius)");
  characterize->add_option("--tol", cfg.tol, "Ball verdict tolerance (default 1e-7)");

  auto* recover = app.add_subcommand("recover", "Search for the center of a ball-shaped domain");
  recover->add_option("--domain", cfg.domain, "Domain spec JSON file")->required();
  recover->add_option("--weight", cfg.weight, "Weight spec")->capture_default_str();
  recover->add_option("--guess", cfg.guess, "Initial center (default: anchor)");
  recover->add_option("--tol", cfg.tol, "Ball verdict tolerance (default 1e-7)");
  recover->add_flag("--trace", cfg.trace, "Include the optimizer trace");

  auto* sweep = app.add_subcommand("sweep", "Deficiency of r0 + a cos(k theta) domains (CSV)");
  sweep->add_option("--r0", cfg.r0, "Base radius")->capture_default_str();
  sweep->add_option("--amplitudes", cfg.amplitudes, "Comma separated amplitudes")
      ->capture_default_str();
  sweep->add_option("--mode", cfg.mode, "Fourier index k")->capture_default_str();
  sweep->add_option("--weight", cfg.weight, "Weight spec")->capture_default_str();

  auto* probe = app.add_subcommand("probe", "Weighted mean of u against c_w u(x) for any weight");
  add_ball(probe, cfg);
  probe->add_option("--weight", cfg.weight, "Weight spec")->required();
  probe->add_option("--tol", cfg.tol, "Tolerance (default 1e-7)");

  auto* validate = app.add_subcommand("validate-weight", "Check the sign and integrability conditions");
  validate->add_option("--m", cfg.m, "Dimension")->capture_default_str();
  validate->add_option("--r", cfg.r, "Radius")->capture_default_str();
  validate->add_option("--weight", cfg.weight, "Weight spec")->capture_default_str();

  for (auto* sub : {verify, bounds, characterize, recover, sweep, probe, validate}) {
    add_common(sub, cfg);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kExitOk;
    }
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }

  for (auto* sub : app.get_subcommands()) cfg.subcommand = sub->get_name();
  set_thread_count(cfg.threads > 0 ? cfg.threads
                                   : static_cast<int>(std::max(1u, std::thread::hardware_concurrency())));

  Output result;
  try {
    if (cfg.subcommand == "verify") result = cmd_verify(cfg);
    else if (cfg.subcommand == "bounds") result = cmd_bounds(cfg);
    else if (cfg.subcommand == "characterize") result = cmd_characterize(cfg);
    else if (cfg.subcommand == "recover") result = cmd_recover(cfg);
    else if (cfg.subcommand == "sweep") result = cmd_sweep(cfg);
    else if (cfg.subcommand == "probe") result = cmd_probe(cfg);
    else result = cmd_validate_weight(cfg);
  } catch (const InvalidInput& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }

  if (cfg.out.empty()) {
    out << result.text;
  } else {
    std::ofstream file(cfg.out, std::ios::binary);
    if (!file) {
      err << "error: cannot open output file '" << cfg.out << "'\n";
      return kExitInputError;
    }
    file << result.text;
  }
  return result.code;
}

}  // namespace wmean::cli
