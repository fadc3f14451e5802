#include "spherecover/io.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>

#include <unistd.h>

namespace spherecover {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double parse_real(const std::string& text, const std::string& key) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  throw std::invalid_argument("covering file: bad number for '" + key + "': '" + text + "'");
}

std::uint64_t parse_count(const std::string& text, const std::string& key) {
  try {
    std::size_t used = 0;
    if (!text.empty() && text[0] != '-') {
      const unsigned long long v = std::stoull(text, &used);
      if (used == text.size()) return v;
    }
  } catch (const std::exception&) {
  }
  throw std::invalid_argument("covering file: bad integer for '" + key + "': '" + text + "'");
}

std::string u64(std::uint64_t v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%" PRIu64, v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string format_real(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.16e", x);
  return buf;
}

std::string format_real_compact(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string render_key_values(const KeyValues& kv) {
  std::string out;
  for (const auto& [k, v] : kv) out += k + ": " + v + "\n";
  return out;
}

std::string write_covering_text(const Covering& cov) {
  KeyValues kv = {{"format_version", std::to_string(kFormatVersion)},
                  {"kind", "covering"},
                  {"n", std::to_string(cov.sphere.n)},
                  {"r", format_real(cov.sphere.r)},
                  {"half_chord", format_real(cov.half_chord)},
                  {"mode", cov.provenance.mode},
                  {"seed", u64(cov.provenance.seed)},
                  {"center_count", u64(cov.size())}};
  std::string parents;
  for (const auto& p : cov.provenance.parents) parents += (parents.empty() ? "" : ",") + p;
  kv.emplace_back("parents", parents);
  std::string out = render_key_values(kv);
  out += "centers:\n";
  for (std::size_t i = 0; i < cov.size(); ++i) {
    const auto row = cov.centers[i];
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (k) out += ' ';
      out += format_real(row[k]);
    }
    out += '\n';
  }
  return out;
}

Covering read_covering_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  KeyValues header;
  bool saw_centers = false;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t == "centers:") {
      saw_centers = true;
      break;
    }
    const auto colon = t.find(':');
    if (colon == std::string::npos) throw std::invalid_argument("covering file: expected 'key: value', got '" + t + "'");
    header.emplace_back(trim(std::string_view(t).substr(0, colon)), trim(std::string_view(t).substr(colon + 1)));
  }
  if (!saw_centers) throw std::invalid_argument("covering file: missing 'centers:' section");

  std::optional<int> n;
  std::optional<double> r, half_chord;
  std::optional<std::uint64_t> count;
  Provenance prov;
  bool version_ok = false;
  for (const auto& [k, v] : header) {
    if (k == "format_version") {
      if (parse_count(v, k) != static_cast<std::uint64_t>(kFormatVersion)) {
        throw std::invalid_argument("covering file: unsupported format_version " + v);
      }
      version_ok = true;
    } else if (k == "kind") {
      if (v != "covering") throw std::invalid_argument("covering file: kind is '" + v + "'");
    } else if (k == "n") {
      n = static_cast<int>(parse_count(v, k));
    } else if (k == "r") {
      r = parse_real(v, k);
    } else if (k == "half_chord") {
      half_chord = parse_real(v, k);
    } else if (k == "mode") {
      prov.mode = v;
    } else if (k == "seed") {
      prov.seed = parse_count(v, k);
    } else if (k == "center_count") {
      count = parse_count(v, k);
    } else if (k == "parents") {
      std::stringstream ss(v);
      std::string item;
      while (std::getline(ss, item, ',')) {
        if (!trim(item).empty()) prov.parents.push_back(trim(item));
      }
    } else {
      throw std::invalid_argument("covering file: unknown field '" + k + "'");
    }
  }
  if (!version_ok || !n || !r || !half_chord || !count) {
    throw std::invalid_argument("covering file: missing one of format_version, n, r, half_chord, center_count");
  }
  const SphereSpec sphere(*n, *r);
  PointSet centers(sphere.ambient_dim());
  std::vector<double> row(sphere.ambient_dim());
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    std::istringstream fields(line);
    std::string tok;
    std::size_t k = 0;
    while (fields >> tok) {
      if (k >= row.size()) throw std::invalid_argument("covering file: row with too many coordinates");
      row[k++] = parse_real(tok, "centers");
    }
    if (k != row.size()) throw std::invalid_argument("covering file: row with too few coordinates");
    centers.push_back(row);
  }
  if (centers.size() != *count) throw std::invalid_argument("covering file: center_count does not match the rows");
  return Covering(sphere, *half_chord, std::move(centers), std::move(prov));
}

KeyValues param_fields(const ParamSet& p) {
  KeyValues kv = {{"mode", std::string(to_string(p.mode))},
                  {"n", std::to_string(p.n)},
                  {"r", format_real(p.r)},
                  {"epsilon", format_real(p.epsilon)},
                  {"rho", format_real(p.rho)},
                  {"lambda", format_real(p.lambda)}};
  if (p.beta) kv.emplace_back("beta", format_real(*p.beta));
  if (p.mu) kv.emplace_back("mu", format_real(*p.mu));
  if (p.d) kv.emplace_back("d", format_real(*p.d));
  if (p.q) kv.emplace_back("q", format_real(*p.q));
  if (p.s) kv.emplace_back("s", std::to_string(*p.s));
  if (p.b_exponent) kv.emplace_back("b", format_real(*p.b_exponent));
  kv.emplace_back("theta_basis", format_real(p.theta_basis));
  kv.emplace_back("log_theta_basis", format_real(p.log_theta_basis));
  kv.emplace_back("trials_exact", p.trials.exact ? "true" : "false");
  kv.emplace_back("trials", p.trials.exact ? u64(p.trials.as_integer()) : format_real(p.trials.count));
  kv.emplace_back("log_trials", format_real(p.trials.log_count));
  kv.emplace_back("nu", format_real(p.trials.nu));
  kv.emplace_back("trials_overridden", p.trials.overridden ? "true" : "false");
  return kv;
}

KeyValues report_fields(const VerificationReport& r, std::string_view prefix) {
  const std::string p(prefix);
  return {{p + "mode", std::string(to_string(r.mode))},
          {p + "samples_or_net_size", u64(r.samples_or_net_size)},
          {p + "uncovered_count", u64(r.uncovered_count)},
          {p + "uncovered_fraction_estimate", format_real(r.uncovered_fraction_estimate)},
          {p + "ci99_low", format_real(r.ci_low)},
          {p + "ci99_high", format_real(r.ci_high)},
          {p + "margin", format_real(r.margin)},
          {p + "margin_required", format_real(r.margin_required)},
          {p + "density", format_real(r.density)},
          {p + "threshold", format_real(r.threshold)},
          {p + "passed", r.passed ? "true" : "false"}};
}

std::string bounds_csv_header() {
  const char* cols[] = {"n", "lower(c1)", "d-sphe", "est0", "d-sph", "d-ball", "psi", "phi", "omega_relaxed"};
  std::string out;
  for (const char* c : cols) out += (out.empty() ? "" : ",") + csv_field(c);
  return out + "\n";
}

std::string bounds_csv_row(const BoundBreakdown& b) {
  const double values[] = {b.lower, b.prior_sphere, b.delta_star, b.new_sphere, b.rogers_ball, b.psi, b.phi,
                           b.omega_relaxed_form};
  std::string out = std::to_string(b.n);
  for (double v : values) out += "," + format_real_compact(v);
  return out + "\n";
}

void atomic_write(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write to " + tmp.string() + " failed");
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace spherecover
