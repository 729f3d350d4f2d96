#include "mbpi/cli.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "keyvalue.hpp"
#include "mbpi/asymptotics.hpp"
#include "mbpi/errors.hpp"
#include "mbpi/invariants.hpp"
#include "mbpi/kernel.hpp"
#include "mbpi/laws.hpp"
#include "mbpi/sim.hpp"
#include "table.hpp"

namespace mbpi {

namespace fs = std::filesystem;

std::string tool_version() { return "mbpi 0.1.0"; }

namespace {

// Config view that remembers every value it hands out, defaults included, so
// the manifest can carry the fully resolved configuration.
class Settings {
 public:
  explicit Settings(KeyValueBlock kv) : kv_(std::move(kv)) {}

  std::string text(const std::string& key, const std::string& fallback) {
    return note(key, kv_.get_string(key, fallback));
  }
  std::string require_text(const std::string& key) { return note(key, kv_.require_string(key)); }
  double num(const std::string& key, double fallback) {
    const double v = kv_.get_double(key, fallback);
    note(key, fmt(v));
    return v;
  }
  int integer(const std::string& key, int fallback) {
    const double v = num(key, fallback);
    if (v != std::floor(v) || std::fabs(v) > 2e9) throw ConfigError("field '" + key + "': expected an integer");
    return static_cast<int>(v);
  }
  std::vector<double> list(const std::string& key, std::vector<double> fallback) {
    auto v = kv_.get_doubles(key, std::move(fallback));
    std::string joined;
    for (std::size_t k = 0; k < v.size(); ++k) joined += (k ? "," : "") + fmt(v[k]);
    note(key, joined);
    return v;
  }
  bool has(const std::string& key) const { return kv_.has(key); }
  void mark(const std::string& key, const std::string& value) { note(key, value); }

  // t grid: explicit list or log-spaced range
  std::vector<double> grid(const std::string& section, double lo, double hi, int per_decade) {
    if (has(section + ".t_grid")) return list(section + ".t_grid", {});
    return log_grid(num(section + ".t_min", lo), num(section + ".t_max", hi), integer(section + ".per_decade", per_decade));
  }

  std::vector<std::string> unused() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : kv_.values()) {
      if (!used_.count(k)) out.push_back(k);
    }
    return out;
  }

  std::string resolved() const {
    std::map<std::string, std::vector<std::pair<std::string, std::string>>> sections;
    for (const auto& [k, v] : used_) {
      const auto dot = k.find('.');
      sections[dot == std::string::npos ? "" : k.substr(0, dot)].emplace_back(
          dot == std::string::npos ? k : k.substr(dot + 1), v);
    }
    std::ostringstream os;
    for (const auto& [name, entries] : sections) {
      if (!name.empty()) os << '[' << name << "]\n";
      for (const auto& [k, v] : entries) os << k << " = " << v << '\n';
    }
    return os.str();
  }

 private:
  std::string note(const std::string& key, std::string value) {
    used_[key] = value;
    return value;
  }

  KeyValueBlock kv_;
  std::map<std::string, std::string> used_;
};

struct Verdict {
  std::string line;
  bool passed = false;
  bool skipped = false;
};

struct Run {
  Settings cfg;
  RunOptions options;
  std::vector<Table> tables;
  std::vector<Verdict> verdicts;
  std::vector<std::string> warnings;
  std::ostream& err;

  void verdict(std::string line, bool passed) { verdicts.push_back({std::move(line), passed, false}); }
  void skip(const std::string& what, const std::string& why) {
    verdicts.push_back({what + " SKIP (" + why + ")", true, true});
    warnings.push_back(what + " skipped: " + why);
  }
};

const char* pass_fail(bool ok) { return ok ? "PASS" : "FAIL"; }

std::string fixed(double v, int digits) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(digits);
  os << v;
  return os.str();
}

std::string sci(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

template <class Law>
Law law_section(Settings& cfg, const KeyValueBlock& raw, const std::string& section,
                const std::function<Law(const std::string&)>& parse) {
  const auto block = raw.section(section);
  if (block.values().empty()) throw ConfigError("missing section [" + section + "]");
  std::ostringstream text;
  for (const auto& [k, v] : block.values()) text << k << '=' << v << '\n';
  try {
    Law law = parse(text.str());
    // resolved form, defaults included
    const auto resolved = KeyValueBlock::parse(to_text(law));
    for (const auto& [k, v] : block.values()) cfg.mark(section + "." + k, v);
    for (const auto& [k, v] : resolved.values()) {
      if (k != "coefficients" || block.has("coefficients")) cfg.mark(section + "." + k, v);
    }
    return law;
  } catch (const ConfigError& e) {
    throw ConfigError("[" + section + "] " + e.what());
  } catch (const DomainError& e) {
    throw ConfigError("[" + section + "] " + e.what());
  }
}

InversionSettings inversion(Settings& cfg, const std::string& section, InversionSettings d) {
  d.j_out = cfg.integer(section + ".j_out", d.j_out);
  d.radius = cfg.num(section + ".radius", d.radius);
  d.samples = cfg.integer(section + ".samples", d.samples);
  d.tolerance = cfg.num(section + ".tolerance", d.tolerance);
  require_inversion_settings(d);
  return d;
}

KernelOptions kernel_options(Settings& cfg) {
  KernelOptions o;
  o.rel_tol = cfg.num("kernel.rel_tol", o.rel_tol);
  o.abs_tol = cfg.num("kernel.abs_tol", o.abs_tol);
  o.quad_rel_tol = cfg.num("kernel.quad_rel_tol", o.quad_rel_tol);
  const auto route = cfg.text("kernel.route", "space");
  if (route == "space") {
    o.route = PRoute::kSpaceIntegral;
  } else if (route == "time") {
    o.route = PRoute::kTimeIntegral;
  } else {
    throw ConfigError("field 'kernel.route': expected space or time, got '" + route + "'");
  }
  return o;
}

Table rate_table(const RateFit& fit) {
  Table t;
  t.name = fit.label;
  t.header = {fit.label, "fitted_slope = " + fmt(fit.fitted_slope), "fitted_intercept = " + fmt(fit.fitted_intercept),
              "predicted_slope = " + fmt(fit.predicted_slope), "r_squared = " + fmt(fit.r_squared),
              "slope_tol = " + fmt(fit.slope_tol), "r2_min = " + fmt(fit.r2_min),
              "points_used = " + std::to_string(fit.points_used), std::string("verdict = ") + pass_fail(fit.passed)};
  t.columns = {"t", "error", "predicted_envelope", "ratio", "floor", "in_window"};
  for (std::size_t k = 0; k < fit.t_grid.size(); ++k) {
    t.add({fit.t_grid[k], fit.errors[k], fit.envelope.empty() ? NAN : fit.envelope[k],
           fit.ratio.empty() ? NAN : fit.ratio[k], fit.floors[k], fit.in_window[k] ? 1.0 : 0.0});
  }
  return t;
}

Table lemma_table(const LemmaReport& r) {
  Table t;
  t.name = r.name;
  t.header = {r.name, "statistic = " + fmt(r.statistic), "bound = " + fmt(r.bound),
              std::string("verdict = ") + pass_fail(r.passed)};
  if (!r.note.empty()) t.header.push_back(r.note);
  t.columns = r.columns;
  for (const auto& row : r.rows) t.add(row);
  return t;
}

FitOptions fit_options(Settings& cfg, const std::string& prefix, const ModelSpec& model, double slope_tol) {
  FitOptions f;
  f.slope_tol = cfg.num(prefix + "slope_tol", slope_tol);
  // closed forms give exact error sequences, so the fit must be clean
  f.r2_min = cfg.num(prefix + "r2_min", model.closed_form() ? 0.999 : 0.99);
  f.decades = cfg.num(prefix + "decades", f.decades);
  return f;
}

void task_validate(Run& run, const ModelSpec& model) {
  Table t;
  t.name = "validation";
  t.columns = {"law", "check", "passed", "residual", "tolerance"};
  const auto add = [&](const std::string& law, const ValidationReport& rep) {
    for (const auto& c : rep.checks) {
      t.add_text({law, c.name, c.passed ? "1" : "0", fmt(c.residual), fmt(c.tolerance)});
    }
    run.verdict("validate " + law + " " + pass_fail(rep.ok()), rep.ok());
  };
  add("offspring", validate_law(model.offspring()));
  add("immigration", validate_law(model.immigration()));
  run.tables.push_back(std::move(t));
}

void task_kernel(Run& run, const ModelSpec& model) {
  auto& cfg = run.cfg;
  const auto opts = kernel_options(cfg);
  const int i = cfg.integer("kernel.i", 0);
  const auto ts = cfg.list("kernel.t_grid", {1.0});
  const auto ss = cfg.list("kernel.s_grid", {0.0, 0.5});
  const auto inv = inversion(cfg, "inversion", {.j_out = 256, .radius = 0.9, .samples = 1024});

  Table gf;
  gf.name = "kernel_gf";
  gf.header = {"i = " + std::to_string(i)};
  gf.columns = {"t", "s_re", "s_im", "F_re", "F_im", "P_re", "P_im", "err"};
  for (double t : ts) {
    for (double s : ss) {
      const auto v = compute_P_i(model, i, t, s, opts);
      gf.add({t, s, 0.0, v.F.real(), v.F.imag(), v.P.real(), v.P.imag(), v.error_estimate});
    }
  }
  run.tables.push_back(std::move(gf));

  Table pt;
  pt.name = "transitions";
  pt.header = {"i = " + std::to_string(i), "radius = " + fmt(inv.radius), "samples = " + std::to_string(inv.samples)};
  pt.columns = {"t", "i", "j", "p_ij", "aliasing_bound", "entry_bound"};
  bool ok = true;
  for (double t : ts) {
    const auto series = transition_probs(model, i, t, inv, opts, run.options.threads);
    const double acc = 10.0 * opts.rel_tol;
    for (int j = 0; j < static_cast<int>(series.values.size()); ++j) {
      pt.add({t, static_cast<double>(i), static_cast<double>(j), series.values[j], series.aliasing_bound,
              series.entry_bound(j, acc)});
    }
    pt.header.push_back("t = " + fmt(t) + ": aliasing_bound = " + fmt(series.aliasing_bound) +
                        ", clamp_magnitude = " + fmt(series.clamp_magnitude) + ", sum = " + fmt(series.sum()));
    ok = ok && series.aliasing_bound <= inv.tolerance;
  }
  run.tables.push_back(std::move(pt));
  run.verdict(std::string("kernel aliasing within tolerance ") + pass_fail(ok), ok);
}

void task_invariant(Run& run, const ModelSpec& model) {
  auto& cfg = run.cfg;
  const auto opts = kernel_options(cfg);
  const auto kind = model.gamma() > 0.0 ? MeasureKind::kDistributionU : MeasureKind::kMeasurePi;
  if (kind == MeasureKind::kMeasurePi) model.require_transient_ready();
  const auto extraction = inversion(cfg, "invariant", {.j_out = 2048, .radius = 0.995, .samples = 1 << 15});
  const auto rows = inversion(cfg, "inversion", {.j_out = 256, .radius = 0.9, .samples = 1024});
  const double tau = cfg.num("invariant.tau", kind == MeasureKind::kDistributionU ? 1.0 : 0.5);
  const int i_max = cfg.integer("invariant.i_max", 1024);
  const int j_max = cfg.integer("invariant.j_max", 128);
  const double tol = cfg.num("invariant.tol", kind == MeasureKind::kDistributionU ? 1e-6 : 1e-5);

  const auto m = extract_measure(model, kind, extraction, run.options.threads);
  Table mt;
  mt.name = "measure";
  mt.header = {std::string("kind = ") + to_string(kind), "model: " + model.describe(), "radius = " + fmt(m.radius),
               "samples = " + std::to_string(m.samples), "aliasing_bound = " + fmt(m.aliasing_bound),
               "sum = " + fmt(m.sum())};
  mt.columns = {"j", "m_j", "bound"};
  for (int j = 0; j < static_cast<int>(m.coefficients.size()); ++j) {
    mt.add({static_cast<double>(j), m.coefficients[j], m.entry_bound(j)});
  }
  run.tables.push_back(std::move(mt));

  const auto rep = check_invariance(m, model, tau, i_max, j_max, rows, opts, run.options.threads);
  Table rt;
  rt.name = "invariance";
  rt.header = {"tau = " + fmt(tau), "i_max = " + std::to_string(i_max), "max_residual = " + fmt(rep.max_residual),
               "tail_bound = " + fmt(rep.tail_bound), "row_aliasing_bound = " + fmt(rep.row_aliasing_bound),
               "measure_bound = " + fmt(rep.measure_bound)};
  rt.columns = {"j", "residual"};
  for (int j = 0; j <= rep.j_max; ++j) rt.add({static_cast<double>(j), rep.residuals[j]});
  run.tables.push_back(std::move(rt));
  const bool ok = rep.max_residual + rep.tail_bound <= tol;
  run.verdict("invariance max residual " + sci(rep.max_residual) + " + tail " + sci(rep.tail_bound) + " (tol " +
                  sci(tol) + ") " + pass_fail(ok),
              ok);
}

void task_rates(Run& run, const ModelSpec& model) {
  auto& cfg = run.cfg;
  const auto opts = kernel_options(cfg);
  const auto grid = cfg.grid("rates", 1e2, 1e6, 4);
  const double s = cfg.num("rates.s", 0.0);
  const int threads = run.options.threads;
  if (model.gamma() > 0.0) {
    const auto fit = rate_theorem1(model, s, grid, fit_options(cfg, "rates.", model, 0.1), opts, threads);
    run.tables.push_back(rate_table(fit));
    run.verdict(fit.summary(), fit.passed);
    return;
  }
  model.require_transient_ready();
  const auto fit = rate_theorem2(model, s, grid, fit_options(cfg, "rates.", model, 0.1), opts, threads);
  run.tables.push_back(rate_table(fit));
  run.verdict(fit.summary(), fit.passed);

  const auto s_grid = cfg.list("rates.uniformity_s", {0.0, 0.25, 0.5, 0.75});
  const double bound = cfg.num("rates.uniformity_bound", 10.0);
  const auto uni = theorem2_uniformity(model, s_grid, grid, fit_options(cfg, "rates.", model, 0.1), bound, opts, threads);
  Table ut;
  ut.name = "theorem2_uniformity";
  ut.header = {"max_ratio = " + fmt(uni.max_ratio), "bound = " + fmt(bound)};
  ut.columns = {"t"};
  for (double sv : s_grid) ut.columns.push_back("s=" + fmt(sv));
  for (std::size_t k = 0; k < uni.t_grid.size(); ++k) {
    std::vector<double> row{uni.t_grid[k]};
    row.insert(row.end(), uni.ratio[k].begin(), uni.ratio[k].end());
    ut.add(row);
  }
  run.tables.push_back(std::move(ut));
  run.verdict("theorem2 uniformity max ratio " + fixed(uni.max_ratio, 3) + " (bound " + fixed(bound, 1) + ") " +
                  pass_fail(uni.passed),
              uni.passed);

  const auto cor = rate_corollary1(model, grid, fit_options(cfg, "rates.corollary_", model, 0.15), opts, threads);
  auto ct = rate_table(cor.fit);
  ct.header.push_back("B0 = " + fmt(cor.B0));
  ct.header.push_back("pi0 = " + fmt(cor.pi0));
  run.tables.push_back(std::move(ct));
  run.verdict(cor.fit.summary(), cor.fit.passed);
}

void task_lemmas(Run& run, const ModelSpec& model) {
  auto& cfg = run.cfg;
  const auto opts = kernel_options(cfg);
  const auto grid = cfg.grid("lemmas", 10.0, 1e6, 2);
  const auto record = [&](const LemmaReport& r) {
    run.tables.push_back(lemma_table(r));
    run.verdict(r.name + " statistic " + sci(r.statistic) + " (bound " + sci(r.bound) + ") " + pass_fail(r.passed),
                r.passed);
  };

  const auto s_grid = cfg.list("lemmas.s_grid", {0.0, 0.3, 0.7});
  if (model.offspring().sv().limit) {
    record(check_lemma1(model, s_grid, grid, cfg.num("lemmas.lemma1_tol", 1e-3), opts));
  } else {
    run.skip("lemma1", "needs a constant or perturbed offspring factor");
  }
  record(check_lemma2(model, cfg.num("lemmas.lemma2_s", 0.0), grid, cfg.num("lemmas.lemma2_bound", 10.0), opts));
  record(check_lemma3(SlowlyVaryingSpec::parse(cfg.text("lemmas.lemma3_sv", "perturbed(1,1,0.5)")),
                      cfg.num("lemmas.lemma3_sigma", 0.25), grid, cfg.num("lemmas.lemma3_bound", 2.0)));
  if (model.gamma() > 0.0 && model.closed_form()) {
    const auto xs = cfg.list("lemmas.lemma4_x", {0.0, 0.5, 0.9, 0.99, 0.999, 0.9999, 1 - 1e-5, 1 - 1e-6});
    record(check_lemma4(model, xs, cfg.num("lemmas.lemma4_bound", 10.0)));
  } else {
    run.skip("lemma4", model.gamma() > 0.0 ? "needs a closed-form law pair" : "requires gamma > 0");
  }
}

SimConfig sim_config(Run& run) {
  auto& cfg = run.cfg;
  SimConfig c;
  c.initial_state = cfg.integer("sim.i", 0);
  c.t_max = cfg.num("sim.t", 5.0);
  c.replicates = cfg.integer("sim.replicates", 1000);
  const double cap = cfg.num("sim.state_cap", 1e6);
  c.state_cap = static_cast<long>(cap);
  if (run.options.seed) {
    c.seed = *run.options.seed;
    cfg.mark("sim.seed", std::to_string(c.seed));
  } else {
    const auto text = cfg.text("sim.seed", "1");
    try {
      std::size_t used = 0;
      c.seed = std::stoull(text, &used);
      if (used != text.size()) throw std::invalid_argument(text);
    } catch (const std::exception&) {
      throw ConfigError("field 'sim.seed': expected an unsigned integer, got '" + text + "'");
    }
  }
  return c;
}

std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << v;
  return os.str();
}

Table sim_table(const SimResult& r, const std::string& config_hash) {
  Table t;
  t.name = "sim_pmf";
  t.header = {"seed = " + std::to_string(r.seed), "config_hash = " + config_hash,
              "replicates = " + std::to_string(r.replicates), "capped_fraction = " + fmt(r.capped_fraction),
              "rng_streams_used = " + std::to_string(r.rng_streams_used)};
  t.columns = {"j", "p_hat", "se", "n"};
  for (std::size_t j = 0; j < r.pmf.size(); ++j) {
    if (r.counts[j] == 0) continue;
    t.add({static_cast<double>(j), r.pmf[j], r.se[j], static_cast<double>(r.replicates)});
  }
  return t;
}

void task_simulate(Run& run, const ModelSpec& model, const std::string& config_hash) {
  const auto c = sim_config(run);
  const double cap_limit = run.cfg.num("sim.cap_limit", 1e-3);
  const auto r = estimate_pmf(model, c, run.options.threads);
  run.tables.push_back(sim_table(r, config_hash));
  const bool ok = r.capped_fraction <= cap_limit;
  run.verdict("simulate capped_fraction " + sci(r.capped_fraction) + " (limit " + sci(cap_limit) + ") " + pass_fail(ok),
              ok);
}

void task_compare(Run& run, const ModelSpec& model, const std::string& config_hash) {
  auto& cfg = run.cfg;
  const auto c = sim_config(run);
  const double p_min = cfg.num("compare.p_min", 1e-2);
  const double z_limit = cfg.num("compare.z_limit", 3.0);
  auto opts = kernel_options(cfg);
  if (!cfg.has("kernel.route")) {
    opts.route = PRoute::kTimeIntegral;
    cfg.mark("kernel.route", "time");
  }
  const auto inv = inversion(cfg, "inversion", {.j_out = 256, .radius = 0.9, .samples = 1024});
  const auto r = estimate_pmf(model, c, run.options.threads);
  run.tables.push_back(sim_table(r, config_hash));
  // same truncated law on both sides
  const auto truncated = model.with_mode(EvalMode::kSeries);
  const auto k = transition_probs(truncated, c.initial_state, c.t_max, inv, opts, run.options.threads);
  const auto cmp = compare_with_kernel(r, k.values, p_min, z_limit);
  Table t;
  t.name = "compare";
  t.header = {"max_abs_z = " + fmt(cmp.max_abs_z), "p_min = " + fmt(p_min), "z_limit = " + fmt(z_limit),
              "kernel_aliasing_bound = " + fmt(k.aliasing_bound)};
  t.columns = {"j", "p_hat", "p_kernel", "se", "z", "checked"};
  for (const auto& row : cmp.rows) {
    if (row.p_hat == 0.0 && row.p_kernel < 1e-12) continue;
    t.add({static_cast<double>(row.j), row.p_hat, row.p_kernel, row.se, row.z, row.checked ? 1.0 : 0.0});
  }
  run.tables.push_back(std::move(t));
  run.verdict("compare max |z| " + fixed(cmp.max_abs_z, 3) + " (limit " + fixed(z_limit, 1) + ") " +
                  pass_fail(cmp.passed),
              cmp.passed);
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

int execute(const std::string& config_path, const RunOptions& options, std::ostream& out, std::ostream& err) {
  const auto started = std::chrono::steady_clock::now();
  const std::string started_utc = utc_now();
  const std::string raw_text = read_file(config_path);
  const std::string config_hash = hex64(fnv1a(raw_text));
  const auto raw = KeyValueBlock::parse(raw_text);
  Run run{Settings(raw), options, {}, {}, {}, err};
  auto& cfg = run.cfg;

  const std::string task = cfg.require_text("task.name");
  static const std::set<std::string> tasks{"validate", "kernel", "invariant", "rates", "lemmas", "simulate", "compare"};
  if (!tasks.count(task)) throw ConfigError("field 'task.name': unknown task '" + task + "'");

  auto offspring = law_section<BranchingLaw>(cfg, raw, "offspring", offspring_from_text);
  auto immigration = law_section<ImmigrationLaw>(cfg, raw, "immigration", immigration_from_text);
  const auto mode_text = cfg.text("model.mode", "auto");
  if (mode_text != "auto" && mode_text != "series") {
    throw ConfigError("field 'model.mode': expected auto or series, got '" + mode_text + "'");
  }
  const ModelSpec model(std::move(offspring), std::move(immigration),
                        mode_text == "auto" ? EvalMode::kAuto : EvalMode::kSeries);
  const fs::path out_dir = options.out_dir ? *options.out_dir : cfg.text("output.dir", "out");

  if (task == "validate") task_validate(run, model);
  if (task == "kernel") task_kernel(run, model);
  if (task == "invariant") task_invariant(run, model);
  if (task == "rates") task_rates(run, model);
  if (task == "lemmas") task_lemmas(run, model);
  if (task == "simulate") task_simulate(run, model, config_hash);
  if (task == "compare") task_compare(run, model, config_hash);

  for (const auto& key : cfg.unused()) run.warnings.push_back("unused config key '" + key + "'");
  for (const auto& w : run.warnings) err << "warning: " << w << '\n';

  fs::create_directories(out_dir);
  std::vector<std::string> files;
  for (const auto& t : run.tables) {
    const std::string name = task + "_" + t.name + ".csv";
    write_file(out_dir / name, t.str());
    files.push_back(name);
  }

  bool all = true;
  std::ostringstream summary;
  summary << "# summary: task " << task << '\n';
  for (const auto& v : run.verdicts) {
    summary << v.line << '\n';
    out << v.line << '\n';
    all = all && v.passed;
  }
  summary << (all ? "ALL PASS" : "SOME CHECKS FAILED") << '\n';
  write_file(out_dir / "summary.txt", summary.str());

  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  std::ostringstream manifest;
  manifest << "# manifest\n"
           << "tool = " << tool_version() << '\n'
           << "config_path = " << config_path << '\n'
           << "config_hash = " << config_hash << '\n'
           << "started_utc = " << started_utc << '\n'
           << "wall_clock_seconds = " << fixed(wall, 3) << '\n'
           << "threads = " << options.threads << '\n'
           << "model = " << model.describe() << '\n';
  for (const auto& f : files) manifest << "file = " << f << '\n';
  for (const auto& w : run.warnings) manifest << "warning = " << w << '\n';
  manifest << "\n# resolved config\n" << cfg.resolved();
  write_file(out_dir / "manifest.txt", manifest.str());

  if (options.strict && !run.warnings.empty()) {
    err << "error: warnings are fatal under --strict\n";
    bool skipped = false;
    for (const auto& v : run.verdicts) skipped = skipped || v.skipped;
    return skipped ? kExitPrecondition : kExitConfig;
  }
  return all ? kExitPass : kExitVerdictFailed;
}

}  // namespace

int run_experiment(const std::string& config_path, const RunOptions& options, std::ostream& out, std::ostream& err) {
  try {
    return execute(config_path, options, out, err);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DomainError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const PreconditionError& e) {
    err << "precondition violated: " << e.what() << '\n';
    return kExitPrecondition;
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::exception& e) {
    err << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  }
}

std::string list_families() {
  return R"(offspring laws  f(s) = sum_j a_j s^j
  stable        f(s) = c (1-s)^{1+nu}
                parameters: nu in (0,1), c > 0, J >= 2 (truncation, default 2000)
                conditions: [f_nu] [L_nu] with L(x) = c (constant limit, remainder 1/x)
  perturbed     f(s) = c (1-s)^{1+nu} (1 + kappa (1-s)^nu)
                parameters: nu in (0,1), c > 0, kappa >= 0, J >= 2
                conditions: [f_nu] [L_nu] with L(x) = c (1 + kappa x^{-nu}) (remainder x^{-nu})
  coefficients  a_0..a_J listed explicitly
                parameters: nu in (0,1) declared, coefficients=a_0,a_1,...
                conditions: sign pattern, mass balance and criticality checked by validate;
                            finite variance, so no closed-form limits

immigration laws  g(s) = sum_j b_j s^j
  stable        g(s) = -d (1-s)^delta
                parameters: delta in (0,1), d > 0, J >= 1
                conditions: [g_delta] [ell_delta] with ell(x) = d (constant limit, remainder 1/x)
  perturbed     g(s) = -d (1-s)^delta (1 + kappa (1-s)^delta)
                parameters: delta in (0,1), d > 0, kappa >= 0 small enough that b_j >= 0 for j >= 1
                conditions: [g_delta] [ell_delta] with ell(x) = d (1 + kappa x^{-delta})
  coefficients  b_0..b_J listed explicitly
                parameters: delta in (0,1) declared, coefficients=b_0,b_1,...
                conditions: checked by validate

pairings
  gamma = delta - nu > 0    positive recurrent; invariant distribution U (tasks: invariant, rates theorem1, lemmas)
  gamma = delta - nu < 0    transient; invariant measure pi
  theorem2-ready pairing rule: d/c = |gamma| (C_L = |gamma|) and mu = 2 delta - nu > 0
  gamma = 0                 rejected
)";
}

}  // namespace mbpi
