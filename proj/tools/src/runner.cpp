#include "kpzc_cli/runner.hpp"

#include <cmath>
#include <fstream>
#include <iterator>
#include <map>
#include "json.hpp"
#include <sstream>
#include <stdexcept>

#include "kpzc/grammar.hpp"
#include "kpzc/kpzc.hpp"
#include "kpzc/version.hpp"

namespace kpzc::cli {

namespace {

using nlohmann::ordered_json;

// One output table: header plus already-formatted rows.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

struct Outcome {
  ordered_json results = ordered_json::object();
  bool pass = true;
  std::string summary;
  std::map<std::string, CsvTable> tables;
};

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string num(double v) { return format_number(v); }

ordered_json config_json(const ExperimentConfig& cfg) {
  ordered_json j = ordered_json::object();
  for (const auto& key : config_keys()) {
    if (key == "threads" || key == "out") continue;
    const std::string text = field_text(cfg, key);
    if (!text.empty()) j[key] = text;
  }
  return j;
}

ordered_json header_json(const ExperimentConfig& cfg) {
  ordered_json j;
  j["tool"] = "kpzc";
  j["tool_version"] = std::string(kVersion);
  j["hash_version"] = std::string(kHashVersion);
  j["command"] = std::string(to_string(cfg.command));
  j["master_seed"] = cfg.master_seed;
  j["config"] = config_json(cfg);
  return j;
}

std::string csv_preamble(const ExperimentConfig& cfg) {
  std::string line = "# kpzc " + std::string(kVersion);
  for (const auto& key : config_keys()) {
    if (key == "threads" || key == "out") continue;
    const std::string text = field_text(cfg, key);
    if (!text.empty()) line += " " + key + "=" + text;
  }
  return line + "\n";
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << content;
  if (!f) throw std::runtime_error("failed writing " + path.string());
}

DepthRange depth_range(const ExperimentConfig& cfg, DepthRange fallback) {
  return {cfg.n_min.value_or(fallback.n_min), cfg.n_max.value_or(fallback.n_max)};
}

EstimatorConfig estimator_config(const ExperimentConfig& cfg) {
  EstimatorConfig e;
  e.n_range = depth_range(cfg, default_depth_range(cfg.d));
  if (cfg.s_grid) e.s_grid = *cfg.s_grid;
  e.enumeration.exec.threads = cfg.threads;
  return e;
}

ordered_json validity_json(const ValidityReport& r) {
  ordered_json j;
  j["mean_ok"] = r.mean_ok;
  j["nondegenerate"] = r.nondegenerate;
  j["phi_monotone"] = r.phi_monotone;
  j["neg_moments_ok"] = r.neg_moments_ok;
  j["diagnostics"] = {{"mean", r.diagnostics.mean},
                      {"entropy_mean", r.diagnostics.entropy_mean},
                      {"dim", r.diagnostics.dim},
                      {"min_phi_increment", r.diagnostics.min_phi_increment},
                      {"max_negative_moment", r.diagnostics.max_negative_moment}};
  return j;
}

ordered_json estimate_json(const DimensionEstimate& e) {
  ordered_json j;
  j["zeta_hat"] = e.zeta_hat;
  j["stderr"] = e.std_error;
  j["n_min"] = e.n_range.n_min;
  j["n_max"] = e.n_range.n_max;
  j["seeds"] = e.seeds_used;
  j["spread"] = e.spread;
  j["per_seed"] = e.per_seed;
  ordered_json slope = ordered_json::array();
  for (const auto& p : e.slope_fn) slope.push_back({{"s", p.s}, {"lambda", p.lambda}});
  j["slope_fn"] = slope;
  return j;
}

void add_partition_rows(CsvTable& t, const DimensionEstimate& e, bool lebesgue) {
  for (const auto& table : e.tables) {
    const DepthRange r = table.depths();
    for (int n = r.n_min; n <= r.n_max; ++n) {
      for (std::size_t i = 0; i < table.s_values().size(); ++i) {
        t.rows.push_back({table.set_id, lebesgue ? "lebesgue" : "cascade",
                          std::to_string(lebesgue ? 0 : table.seed), std::to_string(n),
                          num(table.s_values()[i]), num(table.log2_z(n, i))});
      }
    }
  }
}

CsvTable partition_csv() { return {{"set", "measure", "seed", "n", "s", "log2_Z"}, {}}; }

std::string pass_text(bool pass) { return pass ? "PASS" : "FAIL"; }

Outcome run_validate(const ExperimentConfig& cfg) {
  const auto model = parse_weight_model(cfg.weight, cfg.d);
  const auto r = validate(model);
  Outcome o;
  o.results["model"] = to_string(model);
  o.results["d"] = cfg.d;
  o.results["validity"] = validity_json(r);
  o.pass = r.all();
  std::ostringstream s;
  s << std::boolalpha << "validate " << to_string(model) << " d=" << cfg.d << ": mean_ok=" << r.mean_ok
    << " nondegenerate=" << r.nondegenerate << " phi_monotone=" << r.phi_monotone
    << " neg_moments_ok=" << r.neg_moments_ok << ' ' << pass_text(o.pass);
  o.summary = s.str();
  return o;
}

Outcome run_mass_stats(const ExperimentConfig& cfg) {
  const auto model = parse_weight_model(cfg.weight, cfg.d);
  const auto seeds = experiment_seeds(cfg.master_seed, cfg.seeds);
  std::vector<double> totals(seeds.size());
  parallel_for(seeds.size(), Execution{cfg.threads}, [&](std::size_t i) {
    totals[i] = total_mass(CascadeMeasure(seeds[i], model, cfg.layout), cfg.depth, cfg.tail);
  });
  const double n = static_cast<double>(totals.size());
  double m1 = 0.0;
  double m2 = 0.0;
  for (double l : totals) {
    m1 += l;
    m2 += l * l;
  }
  m1 /= n;
  m2 /= n;
  double v1 = 0.0;
  double v2 = 0.0;
  for (double l : totals) {
    v1 += (l - m1) * (l - m1);
    v2 += (l * l - m2) * (l * l - m2);
  }
  const double se1 = totals.size() > 1 ? std::sqrt(v1 / (n - 1) / n) : 0.0;
  const double se2 = totals.size() > 1 ? std::sqrt(v2 / (n - 1) / n) : 0.0;

  // E[l_n^2] = 2^-d E[W_cube^2] E[l_{n-1}^2] + 1 - 2^-d from the branching identity.
  const double cube_m2 = cfg.layout == CubeWeighting::product_per_axis ? std::pow(moment(model, 2.0), cfg.d)
                                                                       : moment(model, 2.0);
  const double q = std::ldexp(1.0, -cfg.d);
  double expected_m2 = 1.0;
  for (int i = 0; i < cfg.depth + cfg.tail.extra_levels; ++i) expected_m2 = q * cube_m2 * expected_m2 + (1.0 - q);

  Outcome o;
  o.results["model"] = to_string(model);
  o.results["depth"] = cfg.depth;
  o.results["samples"] = totals.size();
  o.results["mean"] = m1;
  o.results["stderr"] = se1;
  o.results["second_moment"] = m2;
  o.results["second_moment_stderr"] = se2;
  o.results["expected_second_moment"] = expected_m2;
  if (q * cube_m2 < 1.0) {
    o.results["second_moment_limit"] = (1.0 - q) / (1.0 - q * cube_m2);
  } else {
    o.results["second_moment_limit"] = nullptr;
  }
  const bool mean_ok = std::abs(m1 - 1.0) <= 3.0 * se1;
  const bool m2_ok = std::abs(m2 - expected_m2) <= 3.0 * se2;
  o.results["mean_ok"] = mean_ok;
  o.results["second_moment_ok"] = m2_ok;
  o.results["per_seed"] = totals;
  o.pass = mean_ok && m2_ok;

  // Cube masses of the first realization down to level 3.
  const CascadeMeasure first(seeds.front(), model, cfg.layout);
  const int levels = std::min(cfg.depth, 3);
  CsvTable t{{"address", "depth", "log2_mass"}, {}};
  std::vector<DyadicAddress> frontier{DyadicAddress::root(cfg.d)};
  for (int m = 0; m <= levels; ++m) {
    std::vector<DyadicAddress> next;
    for (const auto& a : frontier) {
      t.rows.push_back({a.to_string(), std::to_string(m), num(mass(first, a, cfg.depth, cfg.tail).log2_mass)});
      if (m < levels) {
        for (auto& c : children(a)) next.push_back(std::move(c));
      }
    }
    frontier = std::move(next);
  }
  o.tables["mass.csv"] = std::move(t);

  std::ostringstream s;
  s << "mass-stats " << to_string(model) << " d=" << cfg.d << " depth=" << cfg.depth << ": mean=" << m1
    << "±" << se1 << " second_moment=" << m2 << "±" << se2 << " expected=" << expected_m2 << ' '
    << pass_text(o.pass);
  o.summary = s.str();
  return o;
}

// Reference dimension under the configured measure, when one is known.
std::optional<double> reference_zeta(const SetOracle& set, MeasureKind kind, const WeightModel& model) {
  const auto z0 = set.analytic_zeta0();
  if (!z0) return std::nullopt;
  if (kind == MeasureKind::lebesgue) return z0;
  if (!validate(model).phi_monotone) return std::nullopt;
  return phi_inverse(model, *z0);
}

Outcome run_dimension(const ExperimentConfig& cfg) {
  const auto model = parse_weight_model(cfg.weight, cfg.d);
  const auto set = parse_set(cfg.set, cfg.d);
  const MeasureKind kind = cfg.measure.value_or(MeasureKind::cascade);
  const EstimatorConfig ecfg = estimator_config(cfg);
  DimensionEstimate est;
  if (kind == MeasureKind::lebesgue) {
    est = estimate_dimension(MeasureOracle::lebesgue(cfg.d), set, ecfg);
  } else {
    const auto seeds = experiment_seeds(cfg.master_seed, cfg.seeds);
    est = estimate_dimension(CascadeFamily{model, cfg.layout, cfg.tail}, set, ecfg, seeds);
  }
  Outcome o;
  o.results["set"] = set.to_string();
  o.results["measure"] = std::string(to_string(kind));
  o.results["model"] = to_string(model);
  o.results["estimate"] = estimate_json(est);
  const auto ref = reference_zeta(set, kind, model);
  o.results["reference"] = ref ? ordered_json(*ref) : ordered_json(nullptr);
  o.pass = !ref || std::abs(est.zeta_hat - *ref) <= cfg.tolerance;
  o.results["pass"] = o.pass;
  CsvTable t = partition_csv();
  add_partition_rows(t, est, kind == MeasureKind::lebesgue);
  o.tables["partition.csv"] = std::move(t);
  std::ostringstream s;
  s << "dimension " << set.to_string() << " under " << to_string(kind) << ": zeta_hat=" << est.zeta_hat
    << "±" << est.std_error;
  if (ref) s << " reference=" << *ref << ' ' << pass_text(o.pass) << '(' << cfg.tolerance << ')';
  o.summary = s.str();
  return o;
}

Outcome run_energy(const ExperimentConfig& cfg) {
  const auto model = parse_weight_model(cfg.weight, cfg.d);
  const auto set = parse_set(cfg.set, cfg.d);
  const MeasureKind kind = cfg.measure.value_or(MeasureKind::lebesgue);
  const auto seeds = experiment_seeds(cfg.master_seed, cfg.seeds);
  const MeasureOracle m = kind == MeasureKind::lebesgue
                              ? MeasureOracle::lebesgue(cfg.d)
                              : MeasureOracle::cascade(CascadeMeasure(seeds.front(), model, cfg.layout), cfg.tail);
  const DepthRange range = depth_range(cfg, {6, 14});
  ProfileConfig pcfg;
  for (int k = range.n_min; k <= range.n_max; ++k) pcfg.depths.push_back(k);
  pcfg.points = cfg.points;
  pcfg.seeds = seeds;
  pcfg.epsilon = cfg.epsilon;
  pcfg.exec.threads = cfg.threads;
  const std::vector<double> exponents = cfg.exponents.value_or(std::vector<double>{0.3, 0.7});
  const auto ref = reference_zeta(set, kind, model);

  Outcome o;
  o.results["set"] = set.to_string();
  o.results["measure"] = std::string(to_string(kind));
  o.results["points"] = cfg.points;
  o.results["seeds"] = seeds.size();
  o.results["reference"] = ref ? ordered_json(*ref) : ordered_json(nullptr);
  ordered_json profiles = ordered_json::array();
  CsvTable t{{"set", "measure", "seed", "s", "depth", "energy"}, {}};
  std::ostringstream s;
  s << "energy " << set.to_string() << " under " << to_string(kind) << ':';
  for (double t_exp : exponents) {
    const EnergyEstimate e = energy_growth_profile(m, set, t_exp, pcfg);
    ordered_json p;
    p["s"] = t_exp;
    p["growth"] = std::string(to_string(e.growth));
    p["eventual_ratio"] = e.eventual_ratio;
    std::optional<EnergyGrowth> expected;
    if (ref && t_exp < *ref - 0.1) expected = EnergyGrowth::bounded;
    if (ref && t_exp > *ref + 0.1) expected = EnergyGrowth::diverging;
    p["expected"] = expected ? ordered_json(std::string(to_string(*expected))) : ordered_json(nullptr);
    const bool ok = !expected || *expected == e.growth;
    p["pass"] = ok;
    o.pass = o.pass && ok;
    ordered_json rows = ordered_json::array();
    for (const auto& entry : e.profile) {
      rows.push_back({{"depth", entry.depth},
                      {"energy", entry.energy},
                      {"stderr", entry.std_error},
                      {"ratio", entry.ratio}});
      for (std::size_t k = 0; k < seeds.size(); ++k) {
        t.rows.push_back({set.to_string(), std::string(to_string(kind)), std::to_string(seeds[k]), num(t_exp),
                          std::to_string(entry.depth), num(entry.per_seed[k])});
      }
    }
    p["profile"] = rows;
    profiles.push_back(p);
    s << " s=" << t_exp << ' ' << to_string(e.growth) << "(ratio=" << e.eventual_ratio << ')';
  }
  o.results["profiles"] = profiles;
  o.results["pass"] = o.pass;
  o.tables["energy.csv"] = std::move(t);
  s << ' ' << pass_text(o.pass);
  o.summary = s.str();
  return o;
}

Outcome run_kpz(const ExperimentConfig& cfg) {
  const auto model = parse_weight_model(cfg.weight, cfg.d);
  const auto set = parse_set(cfg.set, cfg.d);
  KpzConfig k;
  k.estimator = estimator_config(cfg);
  k.seeds = cfg.seeds;
  k.master_seed = cfg.master_seed;
  k.tail = cfg.tail;
  k.weighting = cfg.layout;
  k.tolerance = cfg.tolerance;
  const KpzReport r = kpz_experiment(model, set, k);

  Outcome o;
  o.results["model"] = to_string(r.model);
  o.results["set"] = r.set_id;
  o.results["zeta0"] = r.zeta0;
  o.results["zeta0_analytic"] = r.zeta0_analytic;
  o.results["zeta_predicted"] = r.zeta_predicted;
  o.results["zeta_measured"] = r.zeta_measured;
  o.results["stderr"] = r.std_error;
  o.results["discrepancy"] = r.discrepancy;
  o.results["tolerance"] = r.tolerance;
  o.results["pass"] = r.pass;
  o.results["validity"] = validity_json(r.validity);
  o.results["seeds"] = r.seeds;
  o.results["measured"] = estimate_json(r.measured);
  if (r.lebesgue) o.results["lebesgue"] = estimate_json(*r.lebesgue);
  o.results["summary"] = summary_line(r);
  o.pass = r.pass;
  CsvTable t = partition_csv();
  if (r.lebesgue) add_partition_rows(t, *r.lebesgue, true);
  add_partition_rows(t, r.measured, false);
  o.tables["partition.csv"] = std::move(t);
  o.summary = summary_line(r);
  return o;
}

Outcome run_bound_check(const ExperimentConfig& cfg) {
  const auto model = parse_weight_model(cfg.weight, cfg.d);
  const CascadeMeasure tmpl(cfg.master_seed, model, cfg.layout);
  const std::vector<double> exponents =
      cfg.exponents.value_or(std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
  const auto rows = verify_mass_bound(tmpl, cfg.depth, exponents, cfg.seeds, cfg.tail, Execution{cfg.threads});
  Outcome o;
  o.results["model"] = to_string(model);
  o.results["depth"] = cfg.depth;
  o.results["trials"] = cfg.seeds;
  ordered_json arr = ordered_json::array();
  std::ostringstream s;
  s << "bound-check " << to_string(model) << " d=" << cfg.d << " depth=" << cfg.depth << ':';
  for (const auto& r : rows) {
    arr.push_back({{"s", r.s}, {"mean", r.mean}, {"stderr", r.std_error}, {"bound", r.bound}, {"pass", r.pass}});
    o.pass = o.pass && r.pass;
    s << " s=" << r.s << (r.pass ? " ok" : " violated");
  }
  o.results["rows"] = arr;
  o.results["pass"] = o.pass;
  s << ' ' << pass_text(o.pass);
  o.summary = s.str();
  return o;
}

}  // namespace

RunResult run(const ExperimentConfig& input, std::ostream& log) {
  ExperimentConfig cfg = input;
  validate_config(cfg);
  Outcome o;
  switch (cfg.command) {
    case Command::validate: o = run_validate(cfg); break;
    case Command::mass_stats: o = run_mass_stats(cfg); break;
    case Command::dimension: o = run_dimension(cfg); break;
    case Command::energy: o = run_energy(cfg); break;
    case Command::kpz: o = run_kpz(cfg); break;
    case Command::bound_check: o = run_bound_check(cfg); break;
  }

  const std::filesystem::path dir(cfg.out);
  std::filesystem::create_directories(dir);
  ordered_json report = header_json(cfg);
  report["pass"] = o.pass;
  report["results"] = o.results;
  write_file(dir / "report.json", report.dump(2) + "\n");

  std::vector<std::string> artifacts{"report.json"};
  const std::string preamble = csv_preamble(cfg);
  for (const auto& [name, table] : o.tables) {
    std::string text = preamble;
    for (std::size_t i = 0; i < table.header.size(); ++i) text += (i ? "," : "") + table.header[i];
    text += '\n';
    for (const auto& row : table.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) text += (i ? "," : "") + csv_field(row[i]);
      text += '\n';
    }
    write_file(dir / name, text);
    artifacts.push_back(name);
  }

  ordered_json prov = header_json(cfg);
  prov["config_text"] = emit_config(cfg, false);
  prov["artifacts"] = artifacts;
  write_file(dir / "provenance.json", prov.dump(2) + "\n");

  log << o.summary << '\n';
  return {o.pass ? kExitPass : kExitToleranceFailure, o.summary};
}

RunResult replay(const std::filesystem::path& provenance, const std::string& out, unsigned threads,
                 std::ostream& log) {
  std::ifstream f(provenance, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read " + provenance.string());
  const std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  const auto prov = nlohmann::json::parse(text);
  const std::string tool_version = prov.at("tool_version").get<std::string>();
  const std::string hash_version = prov.at("hash_version").get<std::string>();
  if (tool_version != kVersion) {
    throw std::runtime_error("refusing to replay: recorded tool version " + tool_version + " differs from " +
                             std::string(kVersion));
  }
  if (hash_version != kHashVersion) {
    throw std::runtime_error("refusing to replay: recorded hash version " + hash_version + " differs from " +
                             std::string(kHashVersion));
  }
  ExperimentConfig cfg = parse_config(prov.at("config_text").get<std::string>());
  cfg.threads = threads;
  cfg.out = out;
  return run(cfg, log);
}

}  // namespace kpzc::cli
