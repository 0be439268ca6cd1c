#include "bimult/runner.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "bimult/error.hpp"
#include "bimult/experiments.hpp"
#include "bimult/rng.hpp"

namespace bimult {
namespace {

using nlohmann::json;

// Exact integers stay integers in the records while they fit.
json exact_count(long double v) {
  if (v >= 0 && v < 9.0e18L && v == std::floor(v)) return static_cast<std::int64_t>(v);
  return static_cast<double>(v);
}

json series(const std::vector<std::pair<double, double>>& xy, const std::string& x, const std::string& y) {
  json pts = json::array();
  for (const auto& [a, b] : xy) pts.push_back({a, b});
  return {{"x", x}, {"y", y}, {"points", std::move(pts)}};
}

bool strictly_increasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] > v[i - 1])) return false;
  return true;
}

json without(json j, std::initializer_list<const char*> keys) {
  for (const char* k : keys) j.erase(k);
  return j;
}

json counterexample_b_defaults(ScheduleMode mode, std::vector<int> Ns) {
  CounterexampleBConfig cfg;
  cfg.mode = mode;
  cfg.Ns = std::move(Ns);
  return without(to_json(cfg), {"seeds"});
}

json config_section(const json& cfg, std::initializer_list<const char*> extras) { return without(cfg, extras); }

void run_counting(const json& cfg, ExperimentRecord& rec) {
  const auto Ms = cfg.at("M").get<std::vector<std::int64_t>>();
  const int n = cfg.at("n").get<int>();
  if (n < 1) throw InvalidArgument("counting: n must be >= 1");
  const auto rows = counting_table(Ms, n, cfg.at("brute_limit").get<std::int64_t>());
  std::vector<std::pair<double, double>> xy;
  std::size_t equal = 0;
  for (const auto& r : rows) {
    rec.trials.push_back({{"M", r.M},
                          {"n", r.n},
                          {"sum_r2", exact_count(r.sum_r2)},
                          {"closed_form", exact_count(r.closed_form)},
                          {"lower_bound", static_cast<double>(r.lower_bound)},
                          {"brute_force_checked", r.brute_force_checked},
                          {"equal", r.equal}});
    xy.emplace_back(static_cast<double>(r.M), static_cast<double>(r.sum_r2));
    equal += r.equal;
  }
  const double frac = rows.empty() ? 1.0 : static_cast<double>(equal) / static_cast<double>(rows.size());
  rec.summary = {{"measured", frac}, {"pass", equal == rows.size()}, {"series", series(xy, "M", "sum_r2")}};
}

void run_khintchine(const json& cfg, std::uint64_t seed, unsigned workers, ExperimentRecord& rec) {
  const auto lengths = cfg.at("lengths").get<std::vector<int>>();
  const auto law = cfg.at("law").get<std::string>();
  const auto trials = cfg.at("trials").get<std::int64_t>();
  const int exact_limit = cfg.at("exact_limit").get<int>();
  const double tol = cfg.at("tolerance").get<double>();
  if (law != "equal" && law != "random") throw SchemaError("khintchine: law must be \"equal\" or \"random\"");
  if (exact_limit > 24) throw InvalidArgument("khintchine: exact_limit must be <= 24");

  const double lower = 1.0 / std::numbers::sqrt2 - 0.02;
  const double gauss = std::sqrt(2.0 / std::numbers::pi);
  bool pass = true;
  std::vector<std::pair<double, double>> xy;
  double last = 0.0;
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    const int len = lengths[i];
    if (len < 1) throw InvalidArgument("khintchine: lengths must be >= 1");
    std::vector<double> a(static_cast<std::size_t>(len), 1.0);
    if (law == "random") {
      Rng rng(derive_seed(seed, i, 0));
      for (double& x : a) x = rng.uniform_open0();
    }
    const auto mc = khintchine_mc(a, trials, derive_seed(seed, i, 1), workers);
    json row{{"length", len}, {"mc_ratio", mc.ratio}, {"mc_mean_abs", mc.mean_abs}};
    pass = pass && mc.ratio >= lower && mc.ratio <= 1.0;
    if (len <= exact_limit) {
      const auto ex = khintchine_exact(a);
      row["exact_ratio"] = ex.ratio;
      row["difference"] = std::abs(ex.ratio - mc.ratio);
      pass = pass && std::abs(ex.ratio - mc.ratio) <= tol && ex.ratio >= lower && ex.ratio <= 1.0;
    }
    rec.trials.push_back(std::move(row));
    xy.emplace_back(len, mc.ratio);
    last = mc.ratio;
  }
  rec.summary = {{"measured", last}, {"series", series(xy, "length", "ratio")}};
  if (law == "equal" && !lengths.empty()) {
    rec.summary["predicted"] = gauss;
    if (*std::max_element(lengths.begin(), lengths.end()) >= 64) {
      const auto it = std::max_element(lengths.begin(), lengths.end()) - lengths.begin();
      pass = pass && std::abs(rec.trials[static_cast<std::size_t>(it)]["mc_ratio"].get<double>() - gauss) <= tol;
    }
  }
  rec.summary["pass"] = pass;
}

void run_growth_A(const json& cfg, std::uint64_t seed, unsigned workers, ExperimentRecord& rec) {
  const auto c = config_A_from_json(config_section(cfg, {"pool", "bounded_factor"}));
  const auto rows = growth_experiment_A(c, cfg.at("pool").get<int>(), seed, workers);
  std::vector<double> measured;
  std::vector<std::pair<double, double>> xy;
  for (const auto& r : rows) {
    rec.trials.push_back({{"K", r.K},
                          {"b", r.b},
                          {"rho", r.rho},
                          {"best_seed", r.best_seed},
                          {"measured", r.measured},
                          {"trend", r.trend},
                          {"predicted", r.predicted},
                          {"pool", r.pool}});
    measured.push_back(r.measured);
    xy.emplace_back(r.K, r.measured);
  }
  const bool growth = c.d_exponent < 0.25;
  const auto [lo, hi] = std::minmax_element(measured.begin(), measured.end());
  const double spread = *lo > 0.0 ? *hi / *lo : INFINITY;
  const bool pass = growth ? strictly_increasing(measured) : spread <= cfg.at("bounded_factor").get<double>();
  rec.summary = {{"measured", measured.back()},
                 {"predicted", rows.back().predicted},
                 {"regime", growth ? "growth" : "bounded"},
                 {"spread", spread},
                 {"pass", pass},
                 {"series", series(xy, "K", "ratio")}};
}

void run_growth_B(const json& cfg, std::uint64_t seed, unsigned workers, ExperimentRecord& rec) {
  const auto c = config_B_from_json(config_section(cfg, {"pool", "band"}));
  const auto band = cfg.at("band").get<std::array<double, 2>>();
  const auto rows = growth_experiment_B(c, cfg.at("pool").get<int>(), seed, workers);
  std::vector<double> measured;
  std::vector<std::pair<double, double>> xy;
  bool in_band = true;
  for (const auto& r : rows) {
    const double q = r.measured / r.predicted;
    rec.trials.push_back({{"N", r.N},
                          {"side", r.side},
                          {"offset", r.offset},
                          {"best_seed", r.best_seed},
                          {"measured", r.measured},
                          {"sum_r2", exact_count(r.sum_r2)},
                          {"bump_factor", r.bump_factor},
                          {"predicted", r.predicted},
                          {"measured_over_predicted", q},
                          {"pool", r.pool}});
    measured.push_back(r.measured);
    xy.emplace_back(r.N, r.measured);
    in_band = in_band && q >= band[0] && q <= band[1];
  }
  rec.summary = {{"measured", measured.back()},
                 {"predicted", rows.back().predicted},
                 {"increasing", strictly_increasing(measured)},
                 {"in_band", in_band},
                 {"pass", in_band && strictly_increasing(measured)},
                 {"series", series(xy, "N", "ratio")}};
}

void run_corpus(const json& cfg, std::uint64_t seed, unsigned workers, ExperimentRecord& rec) {
  CorpusOptions o;
  o.coeff_radius = cfg.at("coeff_radius").get<int>();
  o.besov_radius = cfg.at("besov_radius").get<int>();
  o.resolution = cfg.at("resolution").get<int>();
  o.oversample = cfg.at("oversample").get<int>();
  o.band_exponent = cfg.at("band_exponent").get<int>();
  o.compact_radius = cfg.at("compact_radius").get<int>();
  const auto family = corpus_family_from_name(cfg.at("family").get<std::string>());
  const auto res = boundedness_corpus(family, cfg.at("trials").get<int>(), seed, o, workers);
  std::vector<std::pair<double, double>> xy;
  for (std::size_t i = 0; i < res.trials.size(); ++i) {
    const auto& t = res.trials[i];
    rec.trials.push_back({{"seed", t.seed},
                          {"inputs", t.inputs},
                          {"ratio", t.ratio},
                          {"norm", t.norm},
                          {"normalized", t.normalized}});
    xy.emplace_back(static_cast<double>(i / 2), t.normalized);
  }
  const double bound = cfg.at("factor").get<double>() * res.baseline;
  rec.summary = {{"measured", res.max_normalized},
                 {"baseline", res.baseline},
                 {"bound", bound},
                 {"pass", res.max_normalized <= bound},
                 {"series", series(xy, "trial", "normalized_ratio")}};
}

void run_levelset(const json& cfg, ExperimentRecord& rec) {
  const auto c = config_B_from_json(config_section(cfg, {"lambdas", "alphas", "tolerance"}));
  const auto lambdas = cfg.at("lambdas").get<std::vector<double>>();
  const auto alphas = cfg.at("alphas").get<std::vector<double>>();
  const double tol = cfg.at("tolerance").get<double>();
  const auto rows = levelset_profile(c, lambdas, alphas);
  bool pass = true;
  double worst = 0.0, max_implied = 0.0;
  std::vector<std::pair<double, double>> xy;
  for (const auto& r : rows) {
    const double scale = std::max(r.grid_measure, r.coefficient_measure);
    const double rel = scale > 0.0 ? std::abs(r.grid_measure - r.coefficient_measure) / scale : 0.0;
    worst = std::max(worst, rel);
    pass = pass && rel <= tol;
    for (double v : r.implied) {
      pass = pass && std::isfinite(v);
      max_implied = std::max(max_implied, v);
    }
    rec.trials.push_back({{"lambda", r.lambda},
                          {"grid_measure", r.grid_measure},
                          {"coefficient_measure", r.coefficient_measure},
                          {"continuum_measure", r.continuum_measure},
                          {"relative_difference", rel},
                          {"remark_bound", r.remark_bound},
                          {"alphas", alphas},
                          {"implied", r.implied}});
    xy.emplace_back(r.lambda, r.grid_measure);
  }
  rec.summary = {{"measured", max_implied},
                 {"max_relative_difference", worst},
                 {"pass", pass},
                 {"series", series(xy, "lambda", "measure")}};
}

void run_decomposition(const json& cfg, std::uint64_t seed, unsigned workers, ExperimentRecord& rec) {
  const double C = cfg.at("C").get<double>();
  const auto trials = decomposition_corpus(cfg.at("trials").get<int>(), seed, workers);
  double worst = 0.0;
  std::vector<std::pair<double, double>> xy;
  for (std::size_t i = 0; i < trials.size(); ++i) {
    const auto& t = trials[i];
    rec.trials.push_back({{"seed", t.seed},
                          {"law", t.law},
                          {"rows", t.rows},
                          {"cols", t.cols},
                          {"weak_norm_sq", t.weak_norm_sq},
                          {"constant_sq", t.constant_sq}});
    worst = std::max(worst, t.constant_sq);
    xy.emplace_back(static_cast<double>(i), std::sqrt(t.constant_sq));
  }
  rec.summary = {{"measured", std::sqrt(worst)},
                 {"bound", C},
                 {"pass", worst <= C * C},
                 {"series", series(xy, "trial", "constant")}};
}

void run_lemma_discrete(const json& cfg, std::uint64_t seed, unsigned workers, ExperimentRecord& rec) {
  const double bound = cfg.at("bound").get<double>();
  const double tol = cfg.at("scale_tolerance").get<double>();
  const auto trials = lemma_discrete_corpus(cfg.at("trials").get<int>(), cfg.at("jmax").get<int>(), seed, workers,
                                            cfg.at("resolution").get<int>());
  double worst = 0.0, worst_scale = 0.0;
  std::vector<std::pair<double, double>> xy;
  for (const auto& t : trials) {
    const double dev = t.ratio > 0.0 ? std::abs(t.ratio - t.scaled_ratio) / t.ratio : std::abs(t.scaled_ratio);
    rec.trials.push_back(
        {{"seed", t.seed}, {"j", t.j}, {"mask", t.mask}, {"ratio", t.ratio}, {"scaled_ratio", t.scaled_ratio}});
    worst = std::max(worst, t.ratio);
    worst_scale = std::max(worst_scale, dev);
    xy.emplace_back(t.j, t.ratio);
  }
  rec.summary = {{"measured", worst},
                 {"bound", bound},
                 {"max_scale_deviation", worst_scale},
                 {"pass", worst <= bound && worst_scale <= tol},
                 {"series", series(xy, "j", "ratio")}};
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"counting", "khintchine", "growth-A", "growth-B",
                                              "corpus",   "levelset",   "decomposition", "lemma-discrete"};
  return names;
}

json default_experiment_config(const std::string& name) {
  if (name == "counting") return {{"M", {2, 3, 32}}, {"n", 1}, {"brute_limit", 256}};
  if (name == "khintchine")
    return {{"lengths", {1, 2, 3, 4, 8, 16, 64}},
            {"law", "equal"},
            {"trials", 100000},
            {"exact_limit", 16},
            {"tolerance", 0.01}};
  if (name == "growth-A") {
    CounterexampleAConfig cfg;
    cfg.blocks = {4, 16, 64};
    auto j = without(to_json(cfg), {"seeds"});
    j["pool"] = 32;
    j["bounded_factor"] = 1.5;
    return j;
  }
  if (name == "growth-B") {
    auto j = counterexample_b_defaults(ScheduleMode::Desk, {1, 2, 3});
    j["pool"] = 32;
    j["band"] = {0.5, 2.0};
    return j;
  }
  if (name == "corpus") {
    const CorpusOptions o;
    return {{"family", "lattice"},          {"trials", 100},
            {"factor", 3.0},                {"coeff_radius", o.coeff_radius},
            {"besov_radius", o.besov_radius}, {"resolution", o.resolution},
            {"oversample", o.oversample},   {"band_exponent", o.band_exponent},
            {"compact_radius", o.compact_radius}};
  }
  if (name == "levelset") {
    auto j = counterexample_b_defaults(ScheduleMode::Paper, {2});
    std::vector<double> lambdas;
    for (int k = 1; k <= 8; ++k) lambdas.push_back(std::ldexp(1.0, -k));
    j["lambdas"] = lambdas;
    j["alphas"] = {1.0, 2.0};
    j["tolerance"] = 0.02;
    return j;
  }
  if (name == "decomposition") return {{"trials", 500}, {"C", 2.5}};
  if (name == "lemma-discrete")
    return {{"trials", 50}, {"jmax", 4}, {"resolution", 25}, {"bound", 1.0}, {"scale_tolerance", 1e-12}};
  throw InvalidArgument("unknown experiment '" + name + "'");
}

json resolve_experiment_config(const std::string& name, const json& overrides) {
  auto cfg = default_experiment_config(name);
  if (overrides.is_null()) return cfg;
  if (!overrides.is_object()) throw SchemaError(name + ": config must be a JSON object");
  for (const auto& [key, value] : overrides.items()) {
    if (key == "experiment") {
      if (value != name) throw SchemaError("config is for experiment " + value.dump() + ", not '" + name + "'");
      continue;
    }
    if (!cfg.contains(key)) throw SchemaError(name + ": unknown config key '" + key + "'");
    cfg[key] = value;
  }
  return cfg;
}

ExperimentRecord run_experiment(const std::string& name, const json& overrides, std::uint64_t master_seed,
                                unsigned workers) {
  ExperimentRecord rec;
  rec.experiment = name;
  rec.config = resolve_experiment_config(name, overrides);
  rec.config_hash = config_hash(rec.config);
  rec.master_seed = master_seed;
  try {
    const auto& cfg = rec.config;
    if (name == "counting") run_counting(cfg, rec);
    else if (name == "khintchine") run_khintchine(cfg, master_seed, workers, rec);
    else if (name == "growth-A") run_growth_A(cfg, master_seed, workers, rec);
    else if (name == "growth-B") run_growth_B(cfg, master_seed, workers, rec);
    else if (name == "corpus") run_corpus(cfg, master_seed, workers, rec);
    else if (name == "levelset") run_levelset(cfg, rec);
    else if (name == "decomposition") run_decomposition(cfg, master_seed, workers, rec);
    else run_lemma_discrete(cfg, master_seed, workers, rec);
  } catch (const json::exception& e) {
    throw SchemaError(name + " config: " + e.what());
  }
  return rec;
}

std::string trials_csv(const ExperimentRecord& r) {
  std::vector<std::string> columns;
  for (const auto& t : r.trials)
    for (const auto& [k, v] : t.items())
      if (std::find(columns.begin(), columns.end(), k) == columns.end()) columns.push_back(k);
  std::string out;
  for (const auto& c : columns) out += csv_field(c) + ",";
  out += "config_hash,tool_version\n";
  for (const auto& t : r.trials) {
    for (const auto& c : columns) {
      if (t.contains(c)) {
        const auto& v = t.at(c);
        out += csv_field(v.is_string() ? v.get<std::string>() : v.dump());
      }
      out += ",";
    }
    out += r.config_hash + "," + csv_field(r.tool_version) + "\n";
  }
  return out;
}

}  // namespace bimult
