#include "nskv/config.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <sstream>
#include <vector>

#include "nskv/error.hpp"

namespace nskv {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct Line {
  int number;
  std::string key;
  std::string value;
};

[[noreturn]] void fail(const Line& l, const std::string& what) {
  throw ConfigError("line " + std::to_string(l.number) + ": " + l.key + ": " + what);
}

double to_double(const Line& l) {
  double v = 0.0;
  const char* b = l.value.data();
  const char* e = b + l.value.size();
  auto [p, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || p != e || !std::isfinite(v)) fail(l, "expected a number, got '" + l.value + "'");
  return v;
}

long long to_int(const Line& l) {
  long long v = 0;
  const char* b = l.value.data();
  const char* e = b + l.value.size();
  auto [p, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || p != e) fail(l, "expected an integer, got '" + l.value + "'");
  return v;
}

double positive(const Line& l) {
  const double v = to_double(l);
  if (!(v > 0.0)) fail(l, "must be > 0");
  return v;
}

int int_at_least(const Line& l, long long lo) {
  const long long v = to_int(l);
  if (v < lo || v > 1000000000) fail(l, "must be an integer >= " + std::to_string(lo));
  return static_cast<int>(v);
}

bool to_bool(const Line& l) {
  if (l.value == "true" || l.value == "1" || l.value == "yes") return true;
  if (l.value == "false" || l.value == "0" || l.value == "no") return false;
  fail(l, "expected true/false");
}

using Setter = std::function<void(RunConfig&, const Line&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"seed",
       [](RunConfig& c, const Line& l) {
         if (l.value == "antisymmetric") c.seed = SeedKind::antisymmetric;
         else if (l.value == "complex") c.seed = SeedKind::complex_lobe;
         else if (l.value == "zero") c.seed = SeedKind::zero;
         else fail(l, "expected complex | antisymmetric | zero");
       }},
      {"a", [](RunConfig& c, const Line& l) { c.flow.a = positive(l); }},
      {"b",
       [](RunConfig& c, const Line& l) {
         c.flow.b = to_double(l);
         if (!(c.flow.b > 1.0)) fail(l, "must be > 1");
       }},
      {"eps", [](RunConfig& c, const Line& l) { c.flow.eps = positive(l); }},
      {"amplitude", [](RunConfig& c, const Line& l) { c.flow.amplitude = positive(l); }},
      {"energy", [](RunConfig& c, const Line& l) { c.flow.target_energy = positive(l); }},
      {"step", [](RunConfig& c, const Line& l) { c.flow.step = positive(l); }},
      {"n1", [](RunConfig& c, const Line& l) { c.flow.half_extents[0] = int_at_least(l, 1); }},
      {"n2", [](RunConfig& c, const Line& l) { c.flow.half_extents[1] = int_at_least(l, 1); }},
      {"n3", [](RunConfig& c, const Line& l) { c.flow.half_extents[2] = int_at_least(l, 1); }},
      {"tau", [](RunConfig& c, const Line& l) { c.tau = positive(l); }},
      {"integrator",
       [](RunConfig& c, const Line& l) {
         if (l.value == "etd-rk2") c.integrator = Integrator::etd_rk2;
         else if (l.value == "picard") c.integrator = Integrator::picard;
         else fail(l, "expected etd-rk2 | picard");
       }},
      {"horizon_tau", [](RunConfig& c, const Line& l) { c.horizon_tau = positive(l); }},
      {"record_every_tau", [](RunConfig& c, const Line& l) { c.record_every_tau = positive(l); }},
      {"snapshot_every", [](RunConfig& c, const Line& l) { c.snapshot_every = int_at_least(l, 0); }},
      {"out", [](RunConfig& c, const Line& l) { c.out_dir = l.value; }},
      {"shell_fraction",
       [](RunConfig& c, const Line& l) {
         c.shell_fraction = to_double(l);
         if (!(c.shell_fraction > 0.0 && c.shell_fraction < 1.0)) fail(l, "must be in (0, 1)");
       }},
      {"guard_threshold", [](RunConfig& c, const Line& l) { c.guard_threshold = positive(l); }},
      {"stop_on_guard", [](RunConfig& c, const Line& l) { c.stop_on_guard = to_bool(l); }},
      {"max_correction", [](RunConfig& c, const Line& l) { c.max_correction = positive(l); }},
      {"rng_seed", [](RunConfig& c, const Line& l) { c.rng_seed = static_cast<std::uint64_t>(int_at_least(l, 0)); }},
      {"series_order", [](RunConfig& c, const Line& l) { c.series_order = int_at_least(l, 2); }},
      {"series_points", [](RunConfig& c, const Line& l) { c.series_points = int_at_least(l, 2); }},
      {"series_smax_tau", [](RunConfig& c, const Line& l) { c.series_smax_tau = positive(l); }},
      {"series_amplitude", [](RunConfig& c, const Line& l) { c.series_amplitude = to_double(l); }},
      {"picard_steps", [](RunConfig& c, const Line& l) { c.picard_steps = int_at_least(l, 1); }},
      {"picard_tol", [](RunConfig& c, const Line& l) { c.picard_tol = positive(l); }},
      {"scaling_lambda", [](RunConfig& c, const Line& l) { c.scaling_lambda = int_at_least(l, 1); }},
      {"scaling_tolerance", [](RunConfig& c, const Line& l) { c.scaling_tolerance = positive(l); }},
      {"scaling_steps", [](RunConfig& c, const Line& l) { c.scaling_steps = int_at_least(l, 1); }},
      {"scaling_levels", [](RunConfig& c, const Line& l) { c.scaling_levels = int_at_least(l, 1); }},
      {"steps_per_horizon", [](RunConfig& c, const Line& l) { c.steps_per_horizon = int_at_least(l, 1); }},
      {"memory_budget_mb", [](RunConfig& c, const Line& l) { c.memory_budget_mb = positive(l); }},
  };
  return table;
}

}  // namespace

void apply_preset(RunConfig& cfg, const std::string& name) {
  if (name == "desk") {
    cfg.seed = SeedKind::antisymmetric;
    cfg.flow.a = 6.0;
    cfg.flow.b = 3.0;
    cfg.flow.eps = 0.5;
    cfg.flow.step = 1.0;
    cfg.flow.half_extents = {16, 16, 64};
    cfg.flow.amplitude.reset();
    cfg.flow.target_energy = 5e7;
    cfg.tau = 1.5625e-8;
    cfg.horizon_tau = 80000.0;
    cfg.record_every_tau = 2000.0;
    cfg.steps_per_horizon = 2048;
  } else if (name == "paper2") {
    // Lattice [-254,254]^2 x [-3000,3000]; b and eps are not published.
    cfg.seed = SeedKind::antisymmetric;
    cfg.flow.a = 30.0;
    cfg.flow.b = 15.0;
    cfg.flow.eps = 1.0;
    cfg.flow.step = 1.0;
    cfg.flow.half_extents = {254, 254, 3000};
    cfg.flow.amplitude.reset();
    cfg.flow.target_energy = 2.5e5;
    cfg.tau = 1.5625e-8;
    cfg.horizon_tau = 1000.0;
    cfg.record_every_tau = 10.0;
  } else if (name == "tiny") {
    // Small complex-seed setup for series and critical-amplitude work.
    cfg.seed = SeedKind::complex_lobe;
    cfg.flow.a = 3.0;
    cfg.flow.b = 1.5;
    cfg.flow.eps = 0.5;
    cfg.flow.step = 1.0;
    cfg.flow.half_extents = {6, 6, 24};
    cfg.flow.amplitude = 1.0;
    cfg.flow.target_energy.reset();
    cfg.tau = 1.5625e-8;
    cfg.horizon_tau = 6.4e6;  // t = 0.1
    cfg.record_every_tau = 4e5;
  } else if (name == "scaling") {
    cfg.seed = SeedKind::antisymmetric;
    cfg.flow.a = 3.0;
    cfg.flow.b = 1.5;
    cfg.flow.eps = 1.0;
    cfg.flow.step = 0.25;
    cfg.flow.half_extents = {24, 24, 48};
    cfg.flow.amplitude = 20.0;
    cfg.flow.target_energy.reset();
    cfg.tau = 1.5625e-8;
    cfg.horizon_tau = 3.2e6;  // t = 0.05
    cfg.record_every_tau = 3.2e5;
    cfg.scaling_lambda = 2;
    cfg.scaling_steps = 64;
    cfg.scaling_levels = 3;
  } else {
    throw ConfigError("unknown preset '" + name + "' (known: desk, paper2, tiny, scaling)");
  }
  cfg.preset = name;
}

RunConfig parse_config(const std::string& text) {
  std::vector<Line> lines;
  std::istringstream in(text);
  std::string raw;
  int number = 0;
  while (std::getline(in, raw)) {
    ++number;
    const auto hash = raw.find('#');
    const std::string body = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(number) + ": expected 'key = value'");
    Line l{number, trim(body.substr(0, eq)), trim(body.substr(eq + 1))};
    if (l.key.empty()) throw ConfigError("line " + std::to_string(number) + ": empty key");
    if (l.value.empty()) fail(l, "empty value");
    lines.push_back(std::move(l));
  }

  RunConfig cfg;
  bool have_seed = false;
  // A preset applies first so that explicit keys override it.
  for (const Line& l : lines)
    if (l.key == "preset") {
      try {
        apply_preset(cfg, l.value);
      } catch (const ConfigError& e) {
        fail(l, e.what());
      }
      cfg.echo["preset"] = l.value;
      have_seed = true;  // every preset names its seed
    }
  const auto& table = setters();
  bool set_amp = false, set_energy = false;
  for (const Line& l : lines) {
    if (l.key == "preset") continue;
    const auto it = table.find(l.key);
    if (it == table.end()) fail(l, "unknown key");
    it->second(cfg, l);
    cfg.echo[l.key] = l.value;
    if (l.key == "seed") have_seed = true;
    if (l.key == "amplitude") set_amp = true;
    if (l.key == "energy") set_energy = true;
  }
  if (!have_seed) throw ConfigError("missing required key: seed");
  if (set_amp && set_energy) throw ConfigError("give either amplitude or energy, not both");
  // An explicit amplitude overrides a preset energy and vice versa.
  if (set_amp) cfg.flow.target_energy.reset();
  if (set_energy) cfg.flow.amplitude.reset();
  if (cfg.seed != SeedKind::zero && !cfg.flow.amplitude && !cfg.flow.target_energy)
    throw ConfigError("missing required key: amplitude or energy");
  if (cfg.seed == SeedKind::zero && !cfg.flow.amplitude && !cfg.flow.target_energy) cfg.flow.amplitude = 1.0;
  if (cfg.record_every_tau > cfg.horizon_tau) throw ConfigError("record_every_tau exceeds horizon_tau");
  cfg.flow.validate();
  return cfg;
}

std::string to_string(SeedKind k) {
  switch (k) {
    case SeedKind::zero: return "zero";
    case SeedKind::complex_lobe: return "complex";
    case SeedKind::antisymmetric: return "antisymmetric";
  }
  return "unknown";
}

std::string to_string(Integrator i) { return i == Integrator::picard ? "picard" : "etd-rk2"; }

}  // namespace nskv
