#include "spherecover/cli.hpp"

#include <CLI11.hpp>

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <numbers>
#include <ostream>
#include <sstream>

#include "spherecover/bounds.hpp"
#include "spherecover/capgeom.hpp"
#include "spherecover/construct.hpp"
#include "spherecover/io.hpp"
#include "spherecover/schedule.hpp"
#include "spherecover/verify.hpp"

namespace spherecover {
namespace {

constexpr int kMaxBoundRows = 10'000'000;

std::string u64(std::uint64_t v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%" PRIu64, v);
  return buf;
}

std::string tag_real(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

std::filesystem::path output_dir(const RunConfig& c) {
  if (c.out_dir) return *c.out_dir;
  if (const char* env = std::getenv("SPHERECOVER_OUTPUT_DIR"); env && *env) return env;
  return ".";
}

void emit(const RunConfig& c, std::ostream& out, const std::string& content) {
  if (c.out) {
    atomic_write(*c.out, content);
  } else {
    out << content;
  }
}

ParamSet params_from(const RunConfig& c, const std::string& default_mode) {
  return make_params(parse_schedule_mode(c.mode.value_or(default_mode)), *c.n, c.r, c.b_exponent, c.eps, c.mu,
                     c.trials);
}

std::string csv_from_key_values(const KeyValues& kv) {
  std::string header, row;
  for (const auto& [k, v] : kv) {
    header += (header.empty() ? "" : ",") + k;
    row += (row.empty() ? "" : ",") + v;
  }
  return header + "\n" + row + "\n";
}

int run_params(const RunConfig& c, std::ostream& out) {
  const ParamSet p = params_from(c, "v2");
  const KeyValues kv = param_fields(p);
  emit(c, out, c.format == "csv" ? csv_from_key_values(kv) : render_key_values(kv));
  return kExitPass;
}

int run_bounds(const RunConfig& c, std::ostream& out) {
  const int from = *c.n_from;
  const int to = *c.n_to;
  std::string content;
  if (c.format == "csv") {
    content = bounds_csv_header();
    for (int n = from; n <= to; ++n) content += bounds_csv_row(breakdown(n, c.c1));
  } else {
    for (int n = from; n <= to; ++n) {
      const BoundBreakdown b = breakdown(n, c.c1);
      KeyValues kv = {{"n", std::to_string(n)},
                      {"lower", format_real(b.lower)},
                      {"d-sphe", format_real(b.prior_sphere)},
                      {"est0", format_real(b.delta_star)},
                      {"eps5-fixpoint", format_real(b.delta_fixpoint)},
                      {"d-sph", format_real(b.new_sphere)},
                      {"d-ball", format_real(b.rogers_ball)},
                      {"sph-as", format_real(b.asymptotic)},
                      {"ref", format_real(b.refined)},
                      {"omega_trivial", b.omega_trivial ? "true" : "false"},
                      {"omega_exact", format_real(b.omega_exact_form)},
                      {"omega_relaxed", format_real(b.omega_relaxed_form)},
                      {"log_omega_exact", format_real(b.log_omega_exact_form)},
                      {"log_omega_relaxed", format_real(b.log_omega_relaxed_form)},
                      {"log_p_bad", format_real(b.log_p_bad)},
                      {"h", format_real(b.h_n)},
                      {"psi", format_real(b.psi)},
                      {"phi", format_real(b.phi)}};
      content += render_key_values(kv) + "\n";
    }
    const auto scan = [&](BoundFormula a, BoundFormula b) {
      const auto hit = crossover_scan(a, b, from, to);
      return std::string("crossover ") + std::string(to_string(a)) + " < " + std::string(to_string(b)) + ": " +
             (hit ? std::to_string(*hit) : "none") + "\n";
    };
    content += scan(BoundFormula::d_sph, BoundFormula::est0);
    content += scan(BoundFormula::d_sph, BoundFormula::d_sphe);
    content += scan(BoundFormula::est0, BoundFormula::d_sphe);
  }
  emit(c, out, content);
  return kExitPass;
}

struct CoverVerdict {
  VerificationReport net;
  VerificationReport mc;
  bool passed() const { return net.passed && mc.passed; }
};

// The eps-net a run certifies against: grids stay lazy, random nets are
// materialized.
struct EpsNetHolder {
  std::optional<CubeGridNet> grid;
  std::optional<Covering> cov;

  std::uint64_t size() const { return grid ? grid->size() : cov->size(); }
};

EpsNetHolder make_eps_net(const SphereSpec& sphere, const BaseSpec& spec) {
  EpsNetHolder h;
  if (spec.kind == "grid") {
    h.grid = grid_eps_net(sphere, spec.half_chord);
  } else {
    h.cov = build_base(sphere, spec);
  }
  return h;
}

CoverVerdict verify_final(const Covering& final_cov, const EpsNetHolder& eps_net, double eps, std::uint64_t samples,
                          std::uint64_t seed) {
  CoverVerdict v;
  const double margin = half_angle_of(final_cov.sphere, eps);
  v.net = eps_net.grid ? verify_net(final_cov, *eps_net.grid, margin) : verify_net(final_cov, *eps_net.cov, margin);
  Rng rng = make_rng(seed, "cover-mc");
  v.mc = verify_monte_carlo(final_cov, samples, rng);
  return v;
}

const BaseSpec* find_parent(const std::vector<BaseSpec>& parents, const std::string& role) {
  for (const auto& p : parents) {
    if (p.role == role) return &p;
  }
  return nullptr;
}

int run_verify_only(const RunConfig& c, std::ostream& out) {
  const std::filesystem::path input = *c.input;
  const Covering cov = read_covering_text(read_file(input));
  std::vector<BaseSpec> parents;
  for (const auto& text : cov.provenance.parents) parents.push_back(parse_base_spec(text));
  const BaseSpec* eps_spec = find_parent(parents, "eps_net");
  if (!eps_spec) throw std::invalid_argument("covering file names no eps_net parent; nothing to certify against");
  const EpsNetHolder eps_net = make_eps_net(cov.sphere, *eps_spec);
  const CoverVerdict v =
      verify_final(cov, eps_net, eps_spec->half_chord, c.samples.value_or(1'000'000), cov.provenance.seed);

  KeyValues kv = {{"format_version", std::to_string(kFormatVersion)},
                  {"kind", "verification"},
                  {"input", input.filename().string()},
                  {"n", std::to_string(cov.sphere.n)},
                  {"r", format_real(cov.sphere.r)},
                  {"center_count", u64(cov.size())},
                  {"eps_net", format_base_spec(*eps_spec)},
                  {"eps_net_size", u64(eps_net.size())}};
  for (auto& f : report_fields(v.net, "net.")) kv.push_back(f);
  for (auto& f : report_fields(v.mc, "mc.")) kv.push_back(f);
  kv.emplace_back("passed", v.passed() ? "true" : "false");
  const std::string text = render_key_values(kv);
  const std::filesystem::path dir = output_dir(c);
  atomic_write(dir / (input.stem().string() + ".verify.txt"), text);
  out << text;
  return v.passed() ? kExitPass : kExitVerificationFailed;
}

int run_cover(const RunConfig& c, std::ostream& out) {
  if (c.verify_only) return run_verify_only(c, out);
  const SphereSpec sphere(*c.n, c.r);
  const ParamSet params = params_from(c, "engineering");
  const bool two_level = c.algorithm == "two-level";

  auto base_spec = [&](const std::string& role, double half_chord) {
    BaseSpec spec;
    spec.role = role;
    spec.kind = c.base;
    spec.half_chord = half_chord;
    if (c.base == "random") {
      spec.seed = derive_seed(c.seed, role);
      spec.fail_prob = c.fail_prob;
    }
    return spec;
  };
  const BaseSpec eps_spec = base_spec("eps_net", params.epsilon);
  const EpsNetHolder eps_net = make_eps_net(sphere, eps_spec);
  std::vector<std::string> parents = {format_base_spec(eps_spec)};
  const double eps_density = static_cast<double>(eps_net.size()) * cap_fraction(sphere, params.epsilon).theta;

  KeyValues kv = {{"format_version", std::to_string(kFormatVersion)},
                  {"kind", "cover-run"},
                  {"algorithm", c.algorithm},
                  {"seed", u64(c.seed)}};
  for (auto& f : param_fields(params)) kv.emplace_back("params." + f.first, f.second);
  kv.emplace_back("eps_net", parents.front());
  kv.emplace_back("eps_net_size", u64(eps_net.size()));
  kv.emplace_back("eps_net_density", format_real(eps_density));

  std::optional<Covering> final_cov;
  if (two_level) {
    const BaseSpec mu_spec = base_spec("mu_net", params.mu_value());
    const Covering mu_net = build_base(sphere, mu_spec);
    parents.push_back(format_base_spec(mu_spec));
    TwoLevelResult res = eps_net.grid ? two_level_cover(sphere, mu_net, *eps_net.grid, params, c.seed)
                                      : two_level_cover(sphere, mu_net, *eps_net.cov, params, c.seed);
    kv.emplace_back("mu_net", parents.back());
    kv.emplace_back("mu_net_size", u64(mu_net.size()));
    kv.emplace_back("mu_net_density", format_real(measured_density(mu_net)));
    kv.emplace_back("random_centers", u64(res.y_centers.size()));
    kv.emplace_back("uncovered_eps_centers", u64(res.uncovered_eps));
    kv.emplace_back("bad_centers", u64(res.n_prime_empirical));
    kv.emplace_back("uncovered_good_eps_centers", u64(res.n_double_prime_empirical));
    kv.emplace_back("patched_centers", u64(res.n_bar_empirical));
    kv.emplace_back("set_algebra_ok", res.set_algebra_ok ? "true" : "false");
    final_cov = std::move(res.final_covering);
  } else {
    EmbeddedResult res = eps_net.grid ? embedded_cover(sphere, *eps_net.grid, params, c.seed)
                                      : embedded_cover(sphere, *eps_net.cov, params, c.seed);
    kv.emplace_back("random_centers", u64(res.y_centers.size()));
    kv.emplace_back("uncovered_eps_centers", u64(res.uncovered_eps.size()));
    final_cov = std::move(res.covering);
  }
  final_cov->provenance.parents = parents;

  const CoverVerdict v = verify_final(*final_cov, eps_net, params.epsilon, c.samples.value_or(1'000'000), c.seed);
  const double density = measured_density(*final_cov);
  const double nl = sphere.n * std::log(static_cast<double>(sphere.n));
  kv.emplace_back("center_count", u64(final_cov->size()));
  kv.emplace_back("density", format_real(density));
  kv.emplace_back("density_over_n_ln_n", format_real(density / nl));
  for (auto& f : report_fields(v.net, "net.")) kv.push_back(f);
  for (auto& f : report_fields(v.mc, "mc.")) kv.push_back(f);
  kv.emplace_back("passed", v.passed() ? "true" : "false");

  const std::string stem =
      c.algorithm + "_n" + std::to_string(sphere.n) + "_r" + tag_real(sphere.r) + "_seed" + u64(c.seed);
  const std::filesystem::path dir = output_dir(c);
  const std::filesystem::path cov_path = dir / (stem + ".covering.txt");
  kv.emplace_back("covering_file", cov_path.filename().string());
  const std::string report = render_key_values(kv);
  atomic_write(cov_path, write_covering_text(*final_cov));
  atomic_write(dir / (stem + ".report.txt"), report);
  out << report;
  return v.passed() ? kExitPass : kExitVerificationFailed;
}

int run_lemma(const RunConfig& c, std::ostream& out) {
  const int n = *c.n;
  const SphereSpec sphere(n, c.r);
  const ParamSet params = params_from(c, "v2");
  bool ok = true;
  KeyValues kv = {{"n", std::to_string(n)}, {"r", format_real(c.r)}, {"mode", std::string(to_string(params.mode))}};
  if (n >= 4) {
    const EpsilonInequality e = epsilon_inequality(n);
    kv.emplace_back("epsilon_inequality.lhs", format_real(e.lhs));
    kv.emplace_back("epsilon_inequality.rhs", format_real(e.rhs));
    kv.emplace_back("epsilon_inequality.holds", e.holds ? "true" : "false");
    ok = ok && e.holds;
  }

  struct Check {
    const char* name;
    std::function<double(double)> f, g;
    double a, b;
  };
  const auto est0 = [](double x) { return bound_at(BoundFormula::est0, x); };
  const auto fix = [](double x) { return bound_at(BoundFormula::eps5_fixpoint, x); };
  const Check checks[] = {
      {"moderation.x_vs_ln", [](double x) { return x; }, [](double x) { return std::log(x); },
       std::numbers::e, 100.0},
      {"moderation.est0_vs_fixpoint", est0, fix, 8.0, 1e4},
      {"moderation.dsph_vs_assembly", assembly_target, assembly_product, 100.0, 1e4},
  };
  for (const auto& ch : checks) {
    const ModerationResult m = moderates(ch.f, ch.g, ch.a, ch.b, 2001);
    const std::string p = std::string(ch.name) + ".";
    kv.emplace_back(p + "holds", m.holds ? "true" : "false");
    kv.emplace_back(p + "worst_gap", format_real(m.worst_gap));
    kv.emplace_back(p + "worst_x", format_real(m.worst_x));
    kv.emplace_back(p + "dominates", m.dominates ? "true" : "false");
  }

  const OmegaBound omega = uncovered_fraction_bound(n);
  kv.emplace_back("omega.trivial", omega.trivial ? "true" : "false");
  kv.emplace_back("omega.exact", format_real(omega.omega_exact));
  kv.emplace_back("omega.relaxed", format_real(omega.omega_relaxed));
  const IntersectionGeometry g = intersection_geometry(sphere, params.rho, params.mu_value(), params);
  kv.emplace_back("geometry.d_BN", format_real(g.d_BN));
  kv.emplace_back("geometry.d_AN", format_real(g.d_AN));
  kv.emplace_back("geometry.cos_alpha", format_real(g.cos_alpha));
  kv.emplace_back("geometry.trivial", g.trivial ? "true" : "false");

  Rng rng = make_rng(c.seed, "lemma-lower");
  const VerificationReport rep = lemma_lower_check(sphere, params, c.samples.value_or(100'000), rng, c.placement);
  for (auto& f : report_fields(rep, "lemma_lower.")) kv.push_back(f);
  ok = ok && rep.passed;
  kv.emplace_back("passed", ok ? "true" : "false");
  emit(c, out, render_key_values(kv));
  return ok ? kExitPass : kExitVerificationFailed;
}

int run_oracle(const RunConfig& c, std::ostream& out) {
  const SphereSpec sphere(*c.n, c.r);
  const double rho = c.rho.value_or(1.0);
  const CapFractionOracle o = cap_fraction_oracle(sphere, rho, c.samples.value_or(1'000'000), c.seed);
  const KeyValues kv = {{"n", std::to_string(sphere.n)},    {"r", format_real(sphere.r)},
                        {"rho", format_real(rho)},           {"samples", u64(o.samples)},
                        {"hits", u64(o.hits)},               {"exact", format_real(o.exact)},
                        {"estimate", format_real(o.estimate)}, {"sigma", format_real(o.sigma)},
                        {"z", format_real(o.z)},             {"agrees_3sigma", o.agrees ? "true" : "false"}};
  emit(c, out, render_key_values(kv));
  return o.agrees ? kExitPass : kExitVerificationFailed;
}

}  // namespace

std::optional<RunConfig> parse_args(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
                                    int& exit_code) {
  RunConfig c;
  CLI::App app{"Sphere coverings by equal spherical caps: schedules, bounds, constructions, verification"};
  app.require_subcommand(1, 1);

  auto add_n = [&](CLI::App* sub, bool required) {
    auto* opt = sub->add_option("--n", c.n, "sphere dimension n");
    if (required) opt->required();
  };
  auto add_r = [&](CLI::App* sub) { sub->add_option("--r", c.r, "sphere radius r")->capture_default_str(); };
  auto add_mode = [&](CLI::App* sub) {
    sub->add_option("--mode", c.mode, "schedule: v1, v2, asymptotic, engineering")
        ->check(CLI::IsMember({"v1", "v2", "asymptotic", "engineering"}));
    sub->add_option("--b", c.b_exponent, "asymptotic exponent b > 3/2")->capture_default_str();
    sub->add_option("--eps", c.eps, "engineering eps");
    sub->add_option("--mu", c.mu, "engineering mu");
  };
  auto add_seed = [&](CLI::App* sub) { sub->add_option("--seed", c.seed, "64-bit master seed")->capture_default_str(); };
  auto add_format = [&](CLI::App* sub) {
    sub->add_option("--format", c.format, "csv or text")->check(CLI::IsMember({"csv", "text"}))->capture_default_str();
  };
  auto add_out = [&](CLI::App* sub) { sub->add_option("--out", c.out, "output file (default stdout)"); };

  auto* params = app.add_subcommand("params", "print the parameter set for n, r, mode");
  add_n(params, true);
  add_r(params);
  add_mode(params);
  params->add_option("--trials", c.trials, "engineering: fixed N");
  add_format(params);
  add_out(params);

  auto* bounds = app.add_subcommand("bounds", "density bounds and certificates over an n-range");
  bounds->add_option("--n-from", c.n_from, "first n")->required();
  bounds->add_option("--n-to", c.n_to, "last n")->required();
  bounds->add_option("--c1", c.c1, "constant of the lower bound c1 n (not normative)")->capture_default_str();
  add_format(bounds);
  add_out(bounds);

  auto* cover = app.add_subcommand("cover", "construct and verify a unit-cap covering");
  add_n(cover, false);
  add_r(cover);
  add_mode(cover);
  cover->add_option("--trials", c.trials, "engineering: fixed N");
  add_seed(cover);
  cover->add_option("--samples", c.samples, "Monte Carlo samples (default 1e6)");
  cover->add_option("--algorithm", c.algorithm, "two-level or embedded")
      ->check(CLI::IsMember({"two-level", "embedded"}))
      ->capture_default_str();
  cover->add_option("--base", c.base, "base coverings: grid or random")
      ->check(CLI::IsMember({"grid", "random"}))
      ->capture_default_str();
  cover->add_option("--fail-prob", c.fail_prob, "random base certification failure budget")->capture_default_str();
  cover->add_option("--out-dir", c.out_dir, "output directory (default $SPHERECOVER_OUTPUT_DIR or .)");
  cover->add_flag("--verify-only", c.verify_only, "re-verify a covering file given by --input");
  cover->add_option("--input", c.input, "covering file for --verify-only");

  auto* lemma = app.add_subcommand("lemma", "inequality checks and the empirical uncovered-fraction test");
  add_n(lemma, true);
  add_r(lemma);
  add_mode(lemma);
  add_seed(lemma);
  lemma->add_option("--samples", c.samples, "cap samples (default 1e5)");
  lemma->add_option("--placement", c.placement, "half-chord separation of the two centers (default d)");
  add_out(lemma);

  auto* oracle = app.add_subcommand("oracle", "Monte Carlo cross-check of the exact cap fraction");
  add_n(oracle, true);
  add_r(oracle);
  oracle->add_option("--rho", c.rho, "cap half-chord (default 1)");
  add_seed(oracle);
  oracle->add_option("--samples", c.samples, "samples (default 1e6)");
  add_out(oracle);

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    exit_code = app.exit(e, out, err);
    if (exit_code != 0) exit_code = kExitUsage;
    return std::nullopt;
  }
  c.subcommand = app.get_subcommands().front()->get_name();
  exit_code = kExitPass;
  return c;
}

void validate(const RunConfig& c) {
  const auto& s = c.subcommand;
  auto need_n = [&](int min_n) {
    if (!c.n) throw std::invalid_argument("--n is required");
    if (*c.n < min_n) throw std::invalid_argument("--n must be >= " + std::to_string(min_n));
  };
  if (!(c.r > 0.0) || !std::isfinite(c.r)) throw std::invalid_argument("--r must be positive");
  if (s == "params") {
    need_n(3);
    if (!(c.r > 1.0)) throw std::invalid_argument("--r must exceed 1");
  } else if (s == "bounds") {
    if (*c.n_from < 3) throw std::invalid_argument("--n-from must be >= 3");
    if (*c.n_to < *c.n_from) throw std::invalid_argument("--n-to must be >= --n-from");
    if (static_cast<long long>(*c.n_to) - *c.n_from >= kMaxBoundRows) throw std::invalid_argument("n-range too long");
  } else if (s == "cover") {
    if (c.verify_only) {
      if (!c.input) throw std::invalid_argument("--verify-only needs --input");
      if (c.n || c.mode || c.eps || c.mu || c.trials) {
        throw std::invalid_argument("--verify-only takes the sphere and parents from the input file");
      }
    } else {
      if (c.input) throw std::invalid_argument("--input is only used with --verify-only");
      need_n(3);
      if (!(c.r > 1.0)) throw std::invalid_argument("--r must exceed 1");
      const std::string mode = c.mode.value_or("engineering");
      if (c.algorithm == "embedded" && mode != "v1" && mode != "engineering") {
        throw std::invalid_argument("embedded runs use the v1 or engineering schedule");
      }
      if (c.algorithm == "two-level" && mode == "v1") throw std::invalid_argument("two-level runs need a mu level");
      if (!(c.fail_prob > 0.0 && c.fail_prob < 1.0)) throw std::invalid_argument("--fail-prob must be in (0, 1)");
    }
    if (c.samples && *c.samples < 1) throw std::invalid_argument("--samples must be >= 1");
  } else if (s == "lemma") {
    need_n(3);
    const std::string mode = c.mode.value_or("v2");
    if (mode != "v2" && mode != "engineering") throw std::invalid_argument("lemma runs use v2 or engineering");
    if (!(c.r > 1.0)) throw std::invalid_argument("--r must exceed 1");
    if (c.samples && *c.samples < 1) throw std::invalid_argument("--samples must be >= 1");
  } else if (s == "oracle") {
    need_n(1);
    const double rho = c.rho.value_or(1.0);
    if (!(rho > 0.0) || rho > c.r) throw std::invalid_argument("--rho must be in (0, r]");
    if (c.samples && *c.samples < 1) throw std::invalid_argument("--samples must be >= 1");
  } else {
    throw std::invalid_argument("unknown subcommand '" + s + "'");
  }
  if (c.mode && c.mode != "engineering" && (c.eps || c.mu || c.trials)) {
    throw std::invalid_argument("--eps, --mu and --trials need --mode engineering");
  }
}

int dispatch(const RunConfig& c, std::ostream& out, std::ostream& err) {
  try {
    validate(c);
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }
  try {
    if (c.subcommand == "params") return run_params(c, out);
    if (c.subcommand == "bounds") return run_bounds(c, out);
    if (c.subcommand == "cover") return run_cover(c, out);
    if (c.subcommand == "lemma") return run_lemma(c, out);
    return run_oracle(c, out);
  } catch (const ConstructionFailure& e) {
    err << "construction failed: " << e.what() << "\n";
    return kExitVerificationFailed;
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  int code = kExitPass;
  const auto config = parse_args(args, out, err, code);
  if (!config) return code;
  return dispatch(*config, out, err);
}

}  // namespace spherecover
