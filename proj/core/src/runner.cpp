#include "burkholder/runner.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <exception>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>
#include <thread>

#include "burkholder/families.hpp"
#include "burkholder/grid_io.hpp"
#include "burkholder/identities.hpp"
#include "burkholder/radial.hpp"
#include "json.hpp"

namespace burkholder {

using ojson = nlohmann::ordered_json;

namespace {

constexpr std::string_view kSchema = "burklab.run";
constexpr int kSchemaVersion = 1;

constexpr std::array<std::pair<Suite, std::string_view>, 7> kSuiteNames{{
    {Suite::minimize, "minimize"},
    {Suite::ray, "ray"},
    {Suite::stretch, "stretch"},
    {Suite::identities, "identities"},
    {Suite::rankone, "rankone"},
    {Suite::families, "families"},
    {Suite::all, "all"},
}};

}  // namespace

std::string_view to_string(Suite s) {
  for (const auto& [suite, name] : kSuiteNames) {
    if (suite == s) return name;
  }
  return "unknown";
}

Suite suite_from_string(std::string_view s) {
  for (const auto& [suite, name] : kSuiteNames) {
    if (name == s) return suite;
  }
  throw ConfigError("suite", "unknown suite \"" + std::string(s) + "\"");
}

std::string_view to_string(OutputFormat f) { return f == OutputFormat::json ? "json" : "csv"; }

OutputFormat format_from_string(std::string_view s) {
  if (s == "json") return OutputFormat::json;
  if (s == "csv") return OutputFormat::csv;
  throw ConfigError("format", "expected json or csv, got \"" + std::string(s) + "\"");
}

std::vector<Suite> expand_suite(Suite s) {
  if (s != Suite::all) return {s};
  return {Suite::minimize,   Suite::ray,     Suite::stretch,
          Suite::identities, Suite::rankone, Suite::families};
}

void ExperimentConfig::validate() const {
  const auto suites = expand_suite(suite);
  auto runs = [&](Suite s) { return std::find(suites.begin(), suites.end(), s) != suites.end(); };
  const bool mesh = runs(Suite::minimize) || (runs(Suite::ray) && !direction);
  if (mesh && N_list.empty()) throw ConfigError("N_list", "must be nonempty for mesh suites");
  for (int N : N_list) {
    if (N < 2) throw ConfigError("N_list", "entries must be >= 2");
  }
  if (starts < 1) throw ConfigError("starts", "must be >= 1");
  if (!(amplitude > 0.0) || !std::isfinite(amplitude)) {
    throw ConfigError("amplitude", "must be finite and > 0");
  }
  if (runs(Suite::identities) && p_list.empty()) {
    throw ConfigError("p_list", "must be nonempty for the identities suite");
  }
  for (double p : p_list) {
    if (!(p > 1.0) || !std::isfinite(p)) throw ConfigError("p_list", "entries must be finite and > 1");
  }
  if (!(tolerances.gradient_tolerance > 0.0)) {
    throw ConfigError("tolerances.gradient_tolerance", "must be > 0");
  }
  if (!(tolerances.function_tolerance > 0.0)) {
    throw ConfigError("tolerances.function_tolerance", "must be > 0");
  }
  if (!(tolerances.line_search_tolerance > 0.0)) {
    throw ConfigError("tolerances.line_search_tolerance", "must be > 0");
  }
  if (threads < 1) throw ConfigError("threads", "must be >= 1");
  if (output_path.empty()) throw ConfigError("output_path", "must be set");
  if (ray_directions < 1) throw ConfigError("ray_directions", "must be >= 1");
  if (ray_points < 3) throw ConfigError("ray_points", "must be >= 3");
  if (!(ray_t_max > 0.0) || !std::isfinite(ray_t_max)) {
    throw ConfigError("ray_t_max", "must be finite and > 0");
  }
  const std::pair<const char*, int> counts[] = {
      {"stretch_profiles", stretch_profiles}, {"rankone_trials", rankone_trials},
      {"gap_samples", gap_samples},           {"theorem3_trials", theorem3_trials},
      {"harmonic_trials", harmonic_trials},   {"composite_trials", composite_trials}};
  for (const auto& [name, n] : counts) {
    if (n < 1) throw ConfigError(name, "must be >= 1");
  }
}

CgOptions ExperimentConfig::cg_options(std::size_t n) const {
  CgOptions o = CgOptions::for_dimension(n);
  o.gradient_tolerance = tolerances.gradient_tolerance;
  o.function_tolerance = tolerances.function_tolerance;
  o.line_search_tolerance = tolerances.line_search_tolerance;
  if (tolerances.max_iterations > 0) o.max_iterations = tolerances.max_iterations;
  if (tolerances.restart_interval > 0) o.restart_interval = tolerances.restart_interval;
  return o;
}

namespace {

ojson config_json(const ExperimentConfig& c) {
  ojson j;
  j["suite"] = to_string(c.suite);
  j["N_list"] = c.N_list;
  j["starts"] = c.starts;
  j["master_seed"] = c.master_seed;
  j["amplitude"] = c.amplitude;
  j["p_list"] = c.p_list;
  j["tolerances"] = {{"max_iterations", c.tolerances.max_iterations},
                     {"gradient_tolerance", c.tolerances.gradient_tolerance},
                     {"function_tolerance", c.tolerances.function_tolerance},
                     {"line_search_tolerance", c.tolerances.line_search_tolerance},
                     {"restart_interval", c.tolerances.restart_interval}};
  j["output_path"] = c.output_path.string();
  j["format"] = to_string(c.format);
  j["threads"] = c.threads;
  j["direction"] = c.direction ? ojson::parse(grid_to_json(*c.direction)) : ojson(nullptr);
  j["ray_directions"] = c.ray_directions;
  j["ray_points"] = c.ray_points;
  j["ray_t_max"] = c.ray_t_max;
  j["stretch_profiles"] = c.stretch_profiles;
  j["rankone_trials"] = c.rankone_trials;
  j["gap_samples"] = c.gap_samples;
  j["theorem3_trials"] = c.theorem3_trials;
  j["harmonic_trials"] = c.harmonic_trials;
  j["composite_trials"] = c.composite_trials;
  return j;
}

template <class T>
void read_field(const ojson& j, const char* name, T& out) {
  if (!j.contains(name)) return;
  try {
    out = j.at(name).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(name, e.what());
  }
}

ExperimentConfig config_from(const ojson& j) {
  ExperimentConfig c;
  if (j.contains("suite")) c.suite = suite_from_string(j.at("suite").get<std::string>());
  read_field(j, "N_list", c.N_list);
  read_field(j, "starts", c.starts);
  read_field(j, "master_seed", c.master_seed);
  read_field(j, "amplitude", c.amplitude);
  read_field(j, "p_list", c.p_list);
  if (j.contains("tolerances")) {
    const auto& t = j.at("tolerances");
    read_field(t, "max_iterations", c.tolerances.max_iterations);
    read_field(t, "gradient_tolerance", c.tolerances.gradient_tolerance);
    read_field(t, "function_tolerance", c.tolerances.function_tolerance);
    read_field(t, "line_search_tolerance", c.tolerances.line_search_tolerance);
    read_field(t, "restart_interval", c.tolerances.restart_interval);
  }
  std::string path = c.output_path.string();
  read_field(j, "output_path", path);
  c.output_path = path;
  if (j.contains("format")) c.format = format_from_string(j.at("format").get<std::string>());
  read_field(j, "threads", c.threads);
  if (j.contains("direction") && !j.at("direction").is_null()) {
    try {
      c.direction = grid_from_json(j.at("direction").dump());
    } catch (const std::exception& e) {
      throw ConfigError("direction", e.what());
    }
  }
  read_field(j, "ray_directions", c.ray_directions);
  read_field(j, "ray_points", c.ray_points);
  read_field(j, "ray_t_max", c.ray_t_max);
  read_field(j, "stretch_profiles", c.stretch_profiles);
  read_field(j, "rankone_trials", c.rankone_trials);
  read_field(j, "gap_samples", c.gap_samples);
  read_field(j, "theorem3_trials", c.theorem3_trials);
  read_field(j, "harmonic_trials", c.harmonic_trials);
  read_field(j, "composite_trials", c.composite_trials);
  return c;
}

}  // namespace

std::string config_to_json(const ExperimentConfig& c) { return config_json(c).dump(); }

ExperimentConfig config_from_json(std::string_view text) {
  ojson j;
  try {
    j = ojson::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config", e.what());
  }
  return config_from(j);
}

const FieldValue* Item::find(std::string_view name) const {
  for (const auto& [key, value] : fields) {
    if (key == name) return &value;
  }
  return nullptr;
}

bool SuiteResult::passed() const {
  if (aborted) return false;
  return std::all_of(items.begin(), items.end(), [](const Item& i) { return i.passed(); });
}

double SuiteResult::worst_margin() const {
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& i : items) worst = std::min(worst, i.margin);
  return worst;
}

bool RunRecord::passed() const {
  return std::all_of(suites.begin(), suites.end(), [](const SuiteResult& s) { return s.passed(); });
}

bool RunRecord::aborted() const {
  return std::any_of(suites.begin(), suites.end(), [](const SuiteResult& s) { return s.aborted; });
}

namespace {

class ItemBuilder {
 public:
  explicit ItemBuilder(std::string_view kind) { add("kind", std::string(kind)); }

  ItemBuilder& add(std::string name, double v) { return put(std::move(name), v); }
  ItemBuilder& add(std::string name, bool v) { return put(std::move(name), v); }
  ItemBuilder& add(std::string name, std::string v) { return put(std::move(name), std::move(v)); }
  ItemBuilder& add(std::string name, const char* v) { return put(std::move(name), std::string(v)); }
  ItemBuilder& add_int(std::string name, std::int64_t v) { return put(std::move(name), v); }
  ItemBuilder& add_seed(std::uint64_t seed) {
    // Seeds are stored as decimal strings so that they survive every JSON
    // and CSV reader unchanged.
    return put("seed", std::to_string(seed));
  }

  Item done(double margin) {
    item_.margin = margin;
    return std::move(item_);
  }

 private:
  ItemBuilder& put(std::string name, FieldValue v) {
    item_.fields.emplace_back(std::move(name), std::move(v));
    return *this;
  }
  Item item_;
};

std::string sanitize(std::string s) {
  std::replace_if(s.begin(), s.end(), [](char c) { return c == ',' || c == '\n' || c == '\r'; }, ';');
  return s;
}

Item error_item(std::string_view kind, std::uint64_t seed, const std::exception& e) {
  ItemBuilder b(kind);
  b.add_seed(seed).add("error", sanitize(e.what()));
  return b.done(-1.0);
}

// Fills out[i] = fn(i) for i < count on up to `threads` threads.
template <class Fn>
std::vector<Item> parallel_items(std::size_t count, int threads, Fn fn) {
  std::vector<Item> out(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        out[i] = fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t n = std::min<std::size_t>(static_cast<std::size_t>(threads), count);
  if (n <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < n; ++t) pool.emplace_back(worker);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

bool has_error(const std::vector<Item>& items) {
  return std::any_of(items.begin(), items.end(), [](const Item& i) { return i.find("error"); });
}

std::uint64_t suite_seed(const ExperimentConfig& c, Suite s) {
  return derive_seed(c.master_seed, static_cast<std::uint64_t>(s));
}

SuiteResult run_minimize(const ExperimentConfig& c) {
  const std::uint64_t base = suite_seed(c, Suite::minimize);
  const std::size_t per_N = static_cast<std::size_t>(c.starts);
  SuiteResult out{Suite::minimize, {}, false};
  out.items = parallel_items(c.N_list.size() * per_N, c.threads, [&](std::size_t i) {
    const int N = c.N_list[i / per_N];
    const int k = static_cast<int>(i % per_N);
    const std::uint64_t seed = derive_seed(derive_seed(base, static_cast<std::uint64_t>(N)),
                                           static_cast<std::uint64_t>(k));
    try {
      const auto opts = c.cg_options(TorusGrid(N).dimension());
      const auto r = minimize_energy(N, seed, c.amplitude, opts);
      ItemBuilder b("minimize");
      b.add_int("N", N).add_int("start", k).add_seed(seed);
      b.add("initial_value", r.initial_value).add("final_value", r.final_value);
      b.add("final_gradient_norm", r.final_gradient_norm).add_int("iterations", r.iterations);
      b.add_int("evaluations", r.evaluations);
      b.add("termination", std::string(to_string(r.termination)));
      b.add("wall_time", r.wall_time);
      return b.done(std::min(r.final_value + 1e-7, r.initial_value - r.final_value));
    } catch (const NumericalError& e) {
      return error_item("minimize", seed, e);
    }
  });
  out.aborted = has_error(out.items);
  return out;
}

Item ray_item(const RayProfile& rp, int N, int direction, std::uint64_t seed) {
  ItemBuilder b("ray");
  b.add_int("N", N).add_int("direction", direction).add_seed(seed);
  b.add("violation_positive", rp.monotonicity_violation_positive);
  b.add("violation_negative", rp.monotonicity_violation_negative);
  b.add_int("concavity_witnesses", static_cast<std::int64_t>(rp.concavity_witnesses.size()));
  b.add_int("sign_changes", static_cast<std::int64_t>(rp.second_difference_sign_changes.size()));
  b.add("first_witness_t", rp.concavity_witnesses.empty() ? 0.0 : rp.concavity_witnesses.front());
  const double worst = std::max(rp.monotonicity_violation_positive, rp.monotonicity_violation_negative);
  return b.done(1e-10 - worst);
}

SuiteResult run_ray(const ExperimentConfig& c) {
  SuiteResult out{Suite::ray, {}, false};
  const auto ts = linspace(-c.ray_t_max, c.ray_t_max, c.ray_points);
  if (c.direction) {
    const auto rp = ray_profile(*c.direction, ts);
    for (const auto& [t, h] : rp.points) {
      ItemBuilder b("ray_point");
      b.add("t", t).add("h", h);
      out.items.push_back(b.done(0.0));
    }
    out.items.push_back(ray_item(rp, c.direction->grid().N(), 0, 0));
    return out;
  }
  const std::uint64_t base = suite_seed(c, Suite::ray);
  const std::size_t per_N = static_cast<std::size_t>(c.ray_directions);
  out.items = parallel_items(c.N_list.size() * per_N, c.threads, [&](std::size_t i) {
    const int N = c.N_list[i / per_N];
    const int d = static_cast<int>(i % per_N);
    const std::uint64_t seed = derive_seed(derive_seed(base, static_cast<std::uint64_t>(N)),
                                           static_cast<std::uint64_t>(d));
    const TorusGrid grid(N);
    const auto dir = GridFunction::from_coefficients(grid, random_start(grid, seed, 1.0));
    return ray_item(ray_profile(dir, ts), N, d, seed);
  });
  return out;
}

void add_power(ItemBuilder& b, const StretchProfile& g) {
  const auto& pp = g.power_params();
  b.add("c", pp.c).add("alpha", pp.alpha).add("beta", pp.beta);
}

SuiteResult run_stretch(const ExperimentConfig& c) {
  const std::uint64_t base = suite_seed(c, Suite::stretch);
  const auto n = static_cast<std::size_t>(c.stretch_profiles);
  SuiteResult out{Suite::stretch, {}, false};

  auto theorem1_L = parallel_items(n, c.threads, [&](std::size_t i) {
    const std::uint64_t seed = derive_seed(derive_seed(base, 0), i);
    Rng rng(seed);
    const auto g = random_power_profile(rng);
    const double cf = integral_L_stretch(g, IntegralMethod::closed_form);
    const double q = integral_L_stretch(g, IntegralMethod::quadrature);
    const auto s1 = is_S1(g);
    ItemBuilder b("theorem1_L");
    b.add_int("profile", static_cast<std::int64_t>(i)).add_seed(seed);
    add_power(b, g);
    b.add("closed_form", cf).add("quadrature", q).add("s1_margin", s1.worst_margin);
    return b.done(std::min({1e-10 - std::abs(cf), 1e-6 - std::abs(q), 1e-12 - s1.worst_margin}));
  });

  const Exponent p15(1.5), p3(3.0);
  auto theorem1_Phi = parallel_items(n, c.threads, [&](std::size_t i) {
    const std::uint64_t seed = derive_seed(derive_seed(base, 1), i);
    Rng rng(seed);
    const auto g = random_power_profile(rng, 0.4, 0.4);
    const double v15 = integral_Phi_stretch(g, p15, false);
    const double v3 = integral_Phi_stretch(g, p3, true);
    ItemBuilder b("theorem1_Phi");
    b.add_int("profile", static_cast<std::int64_t>(i)).add_seed(seed);
    add_power(b, g);
    b.add("phi_1_5", v15).add("phi_3_swapped", v3);
    return b.done(1e-6 - std::max(std::abs(v15), std::abs(v3)));
  });

  auto theorem2 = parallel_items(n, c.threads, [&](std::size_t i) {
    const std::uint64_t seed = derive_seed(derive_seed(base, 2), i);
    Rng rng(seed);
    const auto g = random_sampled_profile(rng);
    const double value = integral_L_stretch(g);
    const auto intervals = telescoping_intervals(g);
    double min_tel = 0.0, agreement = 0.0;
    for (const auto& iv : intervals) {
      min_tel = std::min(min_tel, iv.telescoped);
      agreement = std::max(agreement, std::abs(iv.telescoped - iv.integral) /
                                          std::max(1.0, std::abs(iv.telescoped)));
    }
    ItemBuilder b("theorem2");
    b.add_int("profile", static_cast<std::int64_t>(i)).add_seed(seed);
    b.add_int("segments", static_cast<std::int64_t>(g.sampled_params().radii.size() - 1));
    b.add("R", find_R(g)).add("integral_L", value);
    b.add_int("intervals", static_cast<std::int64_t>(intervals.size()));
    b.add("min_telescoped", min_tel).add("telescoping_agreement", agreement);
    return b.done(std::min({value + 1e-8, min_tel + 1e-12, 1e-8 - agreement}));
  });

  auto theorem2_Phi = parallel_items(n, c.threads, [&](std::size_t i) {
    const std::uint64_t seed = derive_seed(derive_seed(base, 3), i);
    Rng rng(seed);
    const auto g = random_sampled_profile(rng, 0.4);
    const double v15 = integral_Phi_stretch(g, p15, false);
    const double v3 = integral_Phi_stretch(g, p3, false);
    ItemBuilder b("theorem2_Phi");
    b.add_int("profile", static_cast<std::int64_t>(i)).add_seed(seed);
    b.add_int("segments", static_cast<std::int64_t>(g.sampled_params().radii.size() - 1));
    b.add("phi_1_5", v15).add("phi_3", v3);
    return b.done(std::min(v15, v3) + 1e-8);
  });

  for (auto* part : {&theorem1_L, &theorem1_Phi, &theorem2, &theorem2_Phi}) {
    for (auto& item : *part) out.items.push_back(std::move(item));
  }

  // Ratios approach (p - 1)^p = 8 as alpha increases to 1/3.
  constexpr std::array<double, 5> alphas{0.2, 0.3, 0.33, 0.333, 1.0 / 3.0 - 1e-4};
  double previous = 0.0;
  for (std::size_t j = 0; j < alphas.size(); ++j) {
    const double ratio = falpha_ratio(p3, alphas[j]);
    const double rel = std::abs(ratio / 8.0 - 1.0);
    double margin = j > 0 ? ratio - previous : 0.0;
    if (j + 1 == alphas.size()) margin = std::min(margin, 0.05 - rel);
    ItemBuilder b("falpha");
    b.add("p", 3.0).add("alpha", alphas[j]).add("ratio", ratio).add("relative_to_limit", rel);
    out.items.push_back(b.done(margin));
    previous = ratio;
  }
  return out;
}

SuiteResult run_identities(const ExperimentConfig& c) {
  const std::uint64_t base = suite_seed(c, Suite::identities);
  SuiteResult out{Suite::identities, {}, false};
  constexpr std::array<double, 5> z_mod{0.0, 0.25, 1.0, 2.0, 5.0};
  constexpr std::array<double, 5> w_mod{0.1, 0.5, 1.0, 3.0, 7.0};

  struct Case {
    double p;
    Complex z, w;
  };
  std::vector<Case> cases;
  Rng phases(derive_seed(base, 0));
  for (double p : c.p_list) {
    if (p == 2.0) continue;
    for (double a : z_mod) {
      for (double b : w_mod) {
        const double tz = phases.angle(), tw = phases.angle();
        cases.push_back({p, std::polar(a, tz), std::polar(b, tw)});
      }
    }
  }
  out.items = parallel_items(cases.size(), c.threads, [&](std::size_t i) {
    const auto& k = cases[i];
    const bool low = k.p < 2.0;
    const auto r = low ? check_identity_12a(k.z, k.w, k.p) : check_identity_12b(k.z, k.w, k.p);
    ItemBuilder b("identity");
    b.add("which", low ? "p_below_2" : "p_above_2").add("p", k.p);
    b.add("z_re", k.z.real()).add("z_im", k.z.imag()).add("w_re", k.w.real()).add("w_im", k.w.imag());
    b.add("lhs", r.lhs).add("rhs", r.rhs).add("relative_error", r.relative_error());
    return b.done(1e-6 - r.relative_error());
  });

  std::vector<double> gap_p = c.p_list;
  if (std::find(gap_p.begin(), gap_p.end(), 2.0) == gap_p.end()) gap_p.push_back(2.0);
  std::sort(gap_p.begin(), gap_p.end());
  const int per_p = std::max(1, c.gap_samples / static_cast<int>(gap_p.size()));
  auto gaps = parallel_items(gap_p.size(), c.threads, [&](std::size_t i) {
    const Exponent p(gap_p[i]);
    const std::uint64_t seed = derive_seed(derive_seed(base, 1), i);
    Rng rng(seed);
    double worst = std::numeric_limits<double>::infinity();
    Complex wz, ww;
    for (int s = 0; s < per_p; ++s) {
      Complex z, w;
      if (s % 10 == 0) {
        // The extremal ray |w| = (p* - 1)|z|.
        const double a = rng.uniform(0.0, 1.0);
        z = std::polar(a, rng.angle());
        w = std::polar((p.pstar() - 1.0) * a, rng.angle());
      } else {
        z = std::polar(rng.uniform(0.0, 1.5), rng.angle());
        w = std::polar(rng.uniform(0.0, 1.5), rng.angle());
      }
      const double gap = phi_upper_bound_gap(z, w, p);
      if (gap < worst) {
        worst = gap;
        wz = z;
        ww = w;
      }
    }
    const double unit = phi_upper_bound_gap(0.0, 1.0, p);
    worst = std::min(worst, unit);
    ItemBuilder b("upper_bound_gap");
    b.add("p", p.p()).add_seed(seed).add_int("samples", per_p);
    b.add("min_gap", worst).add("z_re", wz.real()).add("z_im", wz.imag());
    b.add("w_re", ww.real()).add("w_im", ww.imag()).add("alpha_p", p.alpha());
    return b.done(worst + 1e-10);
  });
  for (auto& item : gaps) out.items.push_back(std::move(item));
  return out;
}

SuiteResult run_rankone(const ExperimentConfig& c) {
  const std::uint64_t base = suite_seed(c, Suite::rankone);
  const auto grid = linspace(-5.0, 5.0, 101);
  std::vector<RankOneReport> reports(static_cast<std::size_t>(c.rankone_trials));
  // Items are not kept per trial; the reports are merged in trial order.
  parallel_items(reports.size(), c.threads, [&](std::size_t i) {
    Rng rng(derive_seed(base, i));
    reports[i] = probe_rank_one(random_rank_one_probe(rng), grid);
    return Item{};
  });
  RankOneReport total;
  const ConvexityViolation* first = nullptr;
  for (const auto& r : reports) {
    total.trials += r.trials;
    total.midpoint_checks += r.midpoint_checks;
    total.violation_count += r.violation_count;
    total.max_midpoint_excess = std::max(total.max_midpoint_excess, r.max_midpoint_excess);
    total.max_closed_form_discrepancy =
        std::max(total.max_closed_form_discrepancy, r.max_closed_form_discrepancy);
    total.max_det_form_discrepancy =
        std::max(total.max_det_form_discrepancy, r.max_det_form_discrepancy);
    if (!first && !r.violations.empty()) first = &r.violations.front();
  }
  ItemBuilder b("rankone");
  b.add_seed(base).add_int("trials", total.trials).add_int("midpoint_checks", total.midpoint_checks);
  b.add_int("violations", total.violation_count);
  b.add("max_midpoint_excess", total.max_midpoint_excess);
  b.add("max_closed_form_discrepancy", total.max_closed_form_discrepancy);
  b.add("max_det_form_discrepancy", total.max_det_form_discrepancy);
  if (first) {
    const auto& A = first->probe.A;
    const auto& B = first->probe.B;
    b.add("A_a", A.a).add("A_b", A.b).add("A_c", A.c).add("A_d", A.d);
    b.add("B_a", B.a).add("B_b", B.b).add("B_c", B.c).add("B_d", B.d);
    b.add("t1", first->t1).add("t2", first->t2);
  }
  const double margin = std::min(total.violation_count == 0 ? 0.0 : -1.0,
                                 1e-12 - total.max_closed_form_discrepancy);
  return {Suite::rankone, {b.done(margin)}, false};
}

SuiteResult run_families(const ExperimentConfig& c) {
  const std::uint64_t base = suite_seed(c, Suite::families);
  SuiteResult out{Suite::families, {}, false};

  auto t3 = parallel_items(static_cast<std::size_t>(c.theorem3_trials), c.threads, [&](std::size_t i) {
    const std::uint64_t seed = derive_seed(derive_seed(base, 0), i);
    Rng rng(seed);
    const auto f = random_theorem3_instance(rng);
    const double value = theorem3_integral(f);
    const double mismatch = theorem3_boundary_mismatch(f);
    ItemBuilder b("theorem3");
    b.add_seed(seed).add("a_re", f.a.real()).add("a_im", f.a.imag());
    b.add("b_re", f.b.real()).add("b_im", f.b.imag()).add_int("k", f.k);
    b.add("integral", value).add("boundary_mismatch", mismatch);
    return b.done(std::min(value + 1e-8, 1e-10 - mismatch));
  });

  std::vector<double> harmonic_p, composite_p;
  for (double p : c.p_list) {
    if (p > 2.0) harmonic_p.push_back(p);
    if (p > 2.0 / 1.4 && p < 10.0 / 3.0) composite_p.push_back(p);
  }
  if (harmonic_p.empty()) harmonic_p.push_back(3.0);
  if (composite_p.empty()) composite_p.push_back(1.5);

  const auto nh = static_cast<std::size_t>(c.harmonic_trials);
  auto harmonic = parallel_items(nh * harmonic_p.size(), c.threads, [&](std::size_t i) {
    const double p = harmonic_p[i / nh];
    const std::uint64_t seed = derive_seed(derive_seed(base, 1), i % nh);
    Rng rng(seed);
    const auto f = random_harmonic_instance(rng);
    const double value = harmonic_family_integral(f.g, f.h, Exponent(p));
    const auto mono = check_circle_means_monotone(f, p);
    ItemBuilder b("harmonic");
    b.add_seed(seed).add("p", p);
    b.add_int("degree_g", static_cast<std::int64_t>(f.g.size()) - 1);
    b.add_int("degree_h", static_cast<std::int64_t>(f.h.size()) - 1);
    b.add("integral", value).add("circle_mean_drop", mono.worst_drop);
    return b.done(std::min(value + 1e-6, 1e-12 - mono.worst_drop));
  });

  const auto nc = static_cast<std::size_t>(c.composite_trials);
  auto composite = parallel_items(nc * composite_p.size(), c.threads, [&](std::size_t i) {
    const double p = composite_p[i / nc];
    const std::uint64_t seed = derive_seed(derive_seed(base, 2), i % nc);
    Rng rng(seed);
    const auto f = random_composite_instance(rng);
    const double value = composite_family_integral(f, Exponent(p));
    ItemBuilder b("composite");
    b.add_seed(seed).add("p", p).add_int("degree_F", static_cast<std::int64_t>(f.F.size()) - 1);
    b.add("profile_kind", f.g.is_power() ? "power" : "sampled").add("conjugate", f.conjugate);
    b.add("integral", value);
    return b.done(value + 1e-6);
  });

  for (auto* part : {&t3, &harmonic, &composite}) {
    for (auto& item : *part) out.items.push_back(std::move(item));
  }
  return out;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

RunRecord run_experiments(const ExperimentConfig& config) {
  config.validate();
  RunRecord record{config, BURKHOLDER_VERSION, utc_timestamp(), {}};
  for (Suite s : expand_suite(config.suite)) {
    switch (s) {
      case Suite::minimize: record.suites.push_back(run_minimize(config)); break;
      case Suite::ray: record.suites.push_back(run_ray(config)); break;
      case Suite::stretch: record.suites.push_back(run_stretch(config)); break;
      case Suite::identities: record.suites.push_back(run_identities(config)); break;
      case Suite::rankone: record.suites.push_back(run_rankone(config)); break;
      case Suite::families: record.suites.push_back(run_families(config)); break;
      case Suite::all: break;
    }
  }
  return record;
}

namespace {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string format_value(const FieldValue& v) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, bool>) {
          return x ? "true" : "false";
        } else if constexpr (std::is_same_v<T, double>) {
          return format_double(x);
        } else if constexpr (std::is_same_v<T, std::int64_t>) {
          return std::to_string(x);
        } else {
          return x;
        }
      },
      v);
}

ojson value_json(const FieldValue& v) {
  return std::visit([](const auto& x) { return ojson(x); }, v);
}

}  // namespace

std::vector<std::string> summary_lines(const RunRecord& record) {
  std::vector<std::string> lines;
  for (const auto& s : record.suites) {
    std::string line(to_string(s.suite));
    line += " items=" + std::to_string(s.items.size());
    line += " worst_margin=" + format_double(s.worst_margin());
    line += s.passed() ? " PASS" : (s.aborted ? " ABORT" : " FAIL");
    lines.push_back(line);
  }
  return lines;
}

std::string record_to_json(const RunRecord& record) {
  ojson j;
  j["schema"] = kSchema;
  j["schema_version"] = kSchemaVersion;
  j["artifact_version"] = record.artifact_version;
  j["timestamp"] = record.timestamp;
  j["config"] = config_json(record.config);
  j["passed"] = record.passed();
  j["suites"] = ojson::array();
  for (const auto& s : record.suites) {
    ojson js;
    js["name"] = to_string(s.suite);
    js["passed"] = s.passed();
    js["aborted"] = s.aborted;
    js["worst_margin"] = s.items.empty() ? 0.0 : s.worst_margin();
    js["items"] = ojson::array();
    for (const auto& item : s.items) {
      ojson ji;
      for (const auto& [k, v] : item.fields) ji[k] = value_json(v);
      ji["margin"] = item.margin;
      ji["passed"] = item.passed();
      js["items"].push_back(std::move(ji));
    }
    j["suites"].push_back(std::move(js));
  }
  return j.dump(1) + "\n";
}

std::string record_to_csv(const RunRecord& record) {
  std::vector<std::string> columns;
  for (const auto& s : record.suites) {
    for (const auto& item : s.items) {
      for (const auto& [k, v] : item.fields) {
        if (std::find(columns.begin(), columns.end(), k) == columns.end()) columns.push_back(k);
      }
    }
  }
  std::ostringstream os;
  os << "# " << kSchema << ' ' << kSchemaVersion << ' ' << record.artifact_version << ' '
     << record.timestamp << '\n';
  os << "# config " << config_to_json(record.config) << '\n';
  os << "suite";
  for (const auto& c : columns) os << ',' << c;
  os << ",margin,passed\n";
  for (const auto& s : record.suites) {
    for (const auto& item : s.items) {
      os << to_string(s.suite);
      for (const auto& c : columns) {
        os << ',';
        if (const auto* v = item.find(c)) os << format_value(*v);
      }
      os << ',' << format_double(item.margin) << ',' << (item.passed() ? "true" : "false") << '\n';
    }
  }
  return os.str();
}

namespace {

FieldValue parse_cell(const std::string& cell) {
  if (cell == "true") return true;
  if (cell == "false") return false;
  const char* first = cell.data();
  const char* last = first + cell.size();
  std::int64_t i = 0;
  if (auto r = std::from_chars(first, last, i); r.ptr == last) {
    // Integers beyond int64, such as seeds, stay text.
    return r.ec == std::errc{} ? FieldValue(i) : FieldValue(cell);
  }
  double d = 0.0;
  if (auto r = std::from_chars(first, last, d); r.ec == std::errc{} && r.ptr == last) return d;
  return cell;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      cells.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  cells.push_back(std::move(cur));
  return cells;
}

SuiteResult& suite_slot(RunRecord& r, Suite s) {
  for (auto& x : r.suites) {
    if (x.suite == s) return x;
  }
  r.suites.push_back({s, {}, false});
  return r.suites.back();
}

RunRecord record_from_csv(std::string_view text) {
  std::istringstream is{std::string(text)};
  std::string line;
  RunRecord r;
  std::getline(is, line);
  {
    std::istringstream head(line.substr(1));
    std::string schema;
    int version = 0;
    head >> schema >> version >> r.artifact_version >> r.timestamp;
    if (schema != kSchema || version != kSchemaVersion) {
      throw std::runtime_error("record: unsupported CSV header");
    }
  }
  std::getline(is, line);
  const std::string prefix = "# config ";
  if (line.rfind(prefix, 0) != 0) throw std::runtime_error("record: missing config line");
  r.config = config_from_json(line.substr(prefix.size()));
  std::getline(is, line);
  const auto columns = split_csv(line);
  if (columns.size() < 3 || columns.front() != "suite") {
    throw std::runtime_error("record: malformed CSV header");
  }
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != columns.size()) throw std::runtime_error("record: ragged CSV row");
    Item item;
    for (std::size_t k = 1; k + 2 < columns.size(); ++k) {
      if (!cells[k].empty()) item.fields.emplace_back(columns[k], parse_cell(cells[k]));
    }
    item.margin = std::stod(cells[cells.size() - 2]);
    auto& slot = suite_slot(r, suite_from_string(cells[0]));
    if (item.find("error")) slot.aborted = true;
    slot.items.push_back(std::move(item));
  }
  return r;
}

RunRecord record_from_json(std::string_view text) {
  const auto j = ojson::parse(text);
  if (j.at("schema").get<std::string>() != kSchema ||
      j.at("schema_version").get<int>() != kSchemaVersion) {
    throw std::runtime_error("record: unsupported schema");
  }
  RunRecord r;
  r.artifact_version = j.at("artifact_version").get<std::string>();
  r.timestamp = j.at("timestamp").get<std::string>();
  r.config = config_from(j.at("config"));
  for (const auto& js : j.at("suites")) {
    SuiteResult s{suite_from_string(js.at("name").get<std::string>()), {},
                  js.at("aborted").get<bool>()};
    for (const auto& ji : js.at("items")) {
      Item item;
      for (const auto& [k, v] : ji.items()) {
        if (k == "margin") {
          item.margin = v.get<double>();
        } else if (k == "passed") {
          continue;
        } else if (v.is_boolean()) {
          item.fields.emplace_back(k, v.get<bool>());
        } else if (v.is_number_integer()) {
          item.fields.emplace_back(k, v.get<std::int64_t>());
        } else if (v.is_number()) {
          item.fields.emplace_back(k, v.get<double>());
        } else {
          item.fields.emplace_back(k, v.get<std::string>());
        }
      }
      s.items.push_back(std::move(item));
    }
    r.suites.push_back(std::move(s));
  }
  return r;
}

}  // namespace

RunRecord record_from_text(std::string_view text) {
  try {
    if (!text.empty() && text.front() == '#') return record_from_csv(text);
    return record_from_json(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("record: ") + e.what());
  }
}

void write_record(const RunRecord& record, const std::filesystem::path& path, OutputFormat format) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  os << (format == OutputFormat::json ? record_to_json(record) : record_to_csv(record));
  if (!os) throw std::runtime_error("write failed: " + path.string());
}

RunRecord read_record(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return record_from_text(ss.str());
}

int run(const ExperimentConfig& config) {
  const RunRecord record = run_experiments(config);
  write_record(record, config.output_path, config.format);
  for (const auto& line : summary_lines(record)) std::cout << line << '\n';
  for (const auto& s : record.suites) {
    for (std::size_t i = 0; i < s.items.size(); ++i) {
      const auto* err = s.items[i].find("error");
      if (!err) continue;
      const auto* seed = s.items[i].find("seed");
      std::cout << "numerical abort in " << to_string(s.suite) << " item " << i << ": "
                << format_value(*err) << " (replay seed " << (seed ? format_value(*seed) : "?")
                << ")\n";
    }
  }
  std::cout << "record written to " << config.output_path.string() << '\n';
  if (record.aborted()) return 3;
  return record.passed() ? 0 : 1;
}

namespace {

std::optional<double> as_number(const FieldValue& v) {
  if (const auto* d = std::get_if<double>(&v)) return *d;
  if (const auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
  return std::nullopt;
}

bool same(const FieldValue& a, const FieldValue& b, double rel_tol) {
  const auto x = as_number(a), y = as_number(b);
  if (x && y) {
    if (*x == *y) return true;
    return std::abs(*x - *y) <= rel_tol * std::max(std::abs(*x), std::abs(*y));
  }
  return format_value(a) == format_value(b);
}

}  // namespace

std::vector<Drift> compare_records(const RunRecord& recorded, const RunRecord& replayed,
                                   double rel_tol) {
  std::vector<Drift> drifts;
  if (recorded.suites.size() != replayed.suites.size()) {
    drifts.push_back({"*", 0, "suites", std::to_string(recorded.suites.size()),
                      std::to_string(replayed.suites.size())});
    return drifts;
  }
  for (std::size_t s = 0; s < recorded.suites.size(); ++s) {
    const auto& a = recorded.suites[s];
    const auto& b = replayed.suites[s];
    const std::string name(to_string(a.suite));
    if (a.suite != b.suite || a.items.size() != b.items.size()) {
      drifts.push_back({name, 0, "items", std::to_string(a.items.size()),
                        std::string(to_string(b.suite)) + ":" + std::to_string(b.items.size())});
      continue;
    }
    for (std::size_t i = 0; i < a.items.size(); ++i) {
      for (const auto& [k, v] : a.items[i].fields) {
        if (k == "wall_time") continue;
        const FieldValue* w = b.items[i].find(k);
        if (!w) {
          drifts.push_back({name, i, k, format_value(v), "<missing>"});
        } else if (!same(v, *w, rel_tol)) {
          drifts.push_back({name, i, k, format_value(v), format_value(*w)});
        }
      }
      if (!same(a.items[i].margin, b.items[i].margin, rel_tol)) {
        drifts.push_back({name, i, "margin", format_double(a.items[i].margin),
                          format_double(b.items[i].margin)});
      }
    }
  }
  return drifts;
}

ReplayReport replay(const std::filesystem::path& record_path, int threads) {
  const RunRecord recorded = read_record(record_path);
  ExperimentConfig config = recorded.config;
  if (threads > 0) config.threads = threads;
  ReplayReport report{run_experiments(config), {}};
  report.drifts = compare_records(recorded, report.replayed);
  return report;
}

}  // namespace burkholder
