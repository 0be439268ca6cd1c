#include "bimult/cli.hpp"

#include <glob.h>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <thread>

#include <CLI11.hpp>

#include "bimult/bilinear.hpp"
#include "bimult/error.hpp"
#include "bimult/records.hpp"
#include "bimult/rng.hpp"
#include "bimult/rowcol.hpp"
#include "bimult/runner.hpp"
#include "bimult/symbols.hpp"

namespace bimult::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError(path + ": " + e.what());
  }
}

std::string pretty(const json& j) { return j.dump(2) + "\n"; }

// Options shared by the commands that build symbols or run experiments.
struct Common {
  std::optional<std::uint64_t> seed;
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  std::string config;
  std::string out_dir = ".";
  std::string mode;
  std::optional<int> resolution;
  std::optional<int> oversample;
  bool force = false;
};

void add_seed(CLI::App* app, Common& c) {
  app->add_option("--seed", c.seed, "master seed")->envname("BIMULT_SEED");
}

void add_overrides(CLI::App* app, Common& c) {
  app->add_option("--config", c.config, "JSON config file")->check(CLI::ExistingFile);
  app->add_option("--mode", c.mode, "schedule mode")->check(CLI::IsMember({"paper", "desk"}));
  app->add_option("--resolution", c.resolution, "lattice samples per unit");
  app->add_option("--oversample", c.oversample, "physical grid oversampling");
}

void apply_common(json& overrides, const Common& c) {
  if (!c.mode.empty()) overrides["mode"] = c.mode;
  if (c.resolution) overrides["resolution"] = *c.resolution;
  if (c.oversample) overrides["oversample"] = *c.oversample;
}

json load_overrides(const Common& c) {
  json j = c.config.empty() ? json::object() : read_json_file(c.config);
  if (!j.is_object()) throw SchemaError(c.config + ": config must be a JSON object");
  return j;
}

std::uint64_t require_seed(const Common& c, const std::string& what) {
  if (!c.seed) throw InvalidArgument(what + " is randomized: pass --seed or set BIMULT_SEED");
  return *c.seed;
}

// ---- gen-symbol ------------------------------------------------------------

struct GenSymbol {
  Common common;
  std::string construction;
  std::string coeffs;
  std::optional<int> N;
  std::optional<int> K;
  std::string out;
  std::string test_function;
};

int gen_symbol(const GenSymbol& o, std::ostream& out) {
  json cfg = load_overrides(o.common);
  std::string construction = o.construction;
  if (construction.empty()) construction = cfg.value("construction", std::string(o.coeffs.empty() ? "" : "lattice"));
  apply_common(cfg, o.common);

  SymbolGrid m;
  std::optional<SpectralVector> f;
  int resolution = 0;
  if (construction == "lattice") {
    if (o.coeffs.empty()) throw InvalidArgument("gen-symbol lattice: --coeffs is required");
    const auto c = coeff_from_json(read_json_file(o.coeffs));
    const BumpSpec psi = cfg.contains("psi") ? bump_from_json(cfg.at("psi")) : BumpSpec{};
    resolution = cfg.value("resolution", 20);
    m = lattice_symbol(c, psi, resolution);
    cfg = {{"construction", "lattice"}, {"coefficients", to_json(c)}, {"psi", to_json(psi)}, {"resolution", resolution}};
  } else if (construction == "A") {
    auto a = config_A_from_json(cfg);
    if (a.seeds.empty()) {
      const auto seed = require_seed(o.common, "construction A without seeds");
      for (std::size_t K = 1; K <= a.blocks.size(); ++K) a.seeds.push_back(derive_seed(seed, K));
    }
    m = counterexample_A_symbol(a, counterexample_A(a));
    resolution = a.resolution;
    const int K = o.K.value_or(static_cast<int>(a.blocks.size()));
    if (K < 1 || K > static_cast<int>(a.blocks.size())) throw InvalidArgument("gen-symbol A: --K out of range");
    if (!o.test_function.empty()) f = test_function_A(K, a);
    cfg = to_json(a);
  } else if (construction == "B") {
    auto b = config_B_from_json(cfg);
    if (!o.N) throw InvalidArgument("gen-symbol B: --N selects the block");
    if (std::find(b.Ns.begin(), b.Ns.end(), *o.N) == b.Ns.end()) b.Ns = {*o.N};
    if (b.seeds.empty()) {
      const auto seed = require_seed(o.common, "construction B without seeds");
      for (int N : b.Ns) b.seeds.push_back(derive_seed(seed, static_cast<std::uint64_t>(N)));
    }
    b.validate();
    m = counterexample_B_block(*o.N, b);
    resolution = b.resolution;
    if (!o.test_function.empty()) f = test_function_B(*o.N, b);
    cfg = to_json(b);
    cfg["block"] = *o.N;
  } else {
    throw InvalidArgument("gen-symbol: --construction must be lattice, A or B");
  }

  const auto hash = config_hash(cfg);
  const fs::path bin = o.out;
  fs::path side = bin;
  side.replace_extension(".json");
  for (const auto& p : {bin, side})
    if (!o.common.force && fs::exists(p)) throw InvalidArgument("refusing to overwrite " + p.string() + " (use --force)");
  if (bin.has_parent_path()) fs::create_directories(bin.parent_path());
  m.set_provenance(cfg);
  write_symbol_binary(m, bin.string(), resolution);
  json sidecar = symbol_sidecar(m, resolution);
  sidecar["config_hash"] = hash;
  sidecar["tool_version"] = kToolVersion;
  write_text_file(side, pretty(sidecar), true);
  if (f) {
    json fj = to_json(*f);
    fj["config_hash"] = hash;
    fj["tool_version"] = kToolVersion;
    write_text_file(o.test_function, fj.dump() + "\n", o.common.force);
  }
  out << "wrote " << bin.string() << " (" << m.entries().size() << " entries, config " << hash << ")\n";
  return kOk;
}

// ---- decompose --------------------------------------------------------------

int decompose_cmd(const std::string& in, const std::string& outp, bool force, std::ostream& out) {
  const json input = read_json_file(in);
  const auto f = coeff_from_json(input);
  const auto p = decompose(f);
  const auto sums = verify_partition(f, p);
  const double w = f.weak_norm(4.0);
  json j{{"partition", to_json(p)},
         {"max_row_sum", sums.max_row_sum},
         {"max_col_sum", sums.max_col_sum},
         {"weak_norm", w},
         {"config_hash", config_hash(input)},
         {"tool_version", kToolVersion}};
  write_text_file(outp, pretty(j), force);
  out << "cells " << f.size() << "  max row sum " << sums.max_row_sum << "  max col sum " << sums.max_col_sum
      << "  weak norm^2 " << w * w << "\n";
  return kOk;
}

// ---- apply ------------------------------------------------------------------

SpectralVector read_spectral(const std::string& path) { return spectral_from_json(read_json_file(path)); }

int apply_cmd(const std::string& symbol, const std::string& fpath, const std::string& gpath, const std::string& eval,
              const std::string& outp, bool force, std::ostream& out) {
  const auto m = read_symbol_binary(symbol);
  const auto f = read_spectral(fpath);
  const auto g = gpath.empty() ? f : read_spectral(gpath);
  const auto mode = eval == "direct" ? BilinearMode::Direct : BilinearMode::Antidiagonal;
  const auto field = apply_bilinear(m, f, g, mode);
  const double ratio = l1_norm(field) / (l2_norm(f) * l2_norm(g));
  json samples = json::array();
  for (const cplx& v : field.samples()) {
    samples.push_back(v.real());
    samples.push_back(v.imag());
  }
  const json inputs{{"symbol", symbol_sidecar(m, 0)}, {"f", to_json(f)}, {"g", to_json(g)}, {"eval", eval}};
  json j{{"box", box_to_json(field.box())},
         {"samples", std::move(samples)},
         {"l1_norm", l1_norm(field)},
         {"ratio", ratio},
         {"config_hash", config_hash(inputs)},
         {"tool_version", kToolVersion}};
  write_text_file(outp, j.dump() + "\n", force);
  out << "ratio " << format_double(ratio) << "\n";
  return kOk;
}

// ---- experiment ---------------------------------------------------------------

struct ExperimentOptions {
  Common common;
  std::string name;
  std::vector<int> N;
  std::vector<std::int64_t> M;
  std::vector<std::int64_t> blocks;
  std::optional<int> pool;
  std::optional<int> trials;
  std::optional<double> d_exponent;
  std::string family;
  bool timing = false;
};

bool randomized(const std::string& name) { return name != "counting" && name != "levelset"; }

int experiment_cmd(const ExperimentOptions& o, std::ostream& out) {
  json overrides = load_overrides(o.common);
  apply_common(overrides, o.common);
  if (!o.N.empty()) overrides["N"] = o.N;
  if (!o.M.empty()) overrides["M"] = o.M;
  if (!o.blocks.empty()) overrides["blocks"] = o.blocks;
  if (o.pool) overrides["pool"] = *o.pool;
  if (o.trials) overrides["trials"] = *o.trials;
  if (o.d_exponent) overrides["d_exponent"] = *o.d_exponent;
  if (!o.family.empty()) overrides["family"] = o.family;

  const std::uint64_t seed = randomized(o.name) ? require_seed(o.common, o.name) : o.common.seed.value_or(0);
  const auto start = std::chrono::steady_clock::now();
  auto rec = run_experiment(o.name, overrides, seed, o.common.threads);
  if (o.timing) rec.wall_clock = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const fs::path dir = o.common.out_dir;
  fs::path jsonl = dir / record_file_name(rec);
  fs::path csv = jsonl;
  csv.replace_extension(".csv");
  if (!o.common.force)
    for (const auto& p : {jsonl, csv})
      if (fs::exists(p)) throw InvalidArgument("refusing to overwrite " + p.string() + " (use --force)");
  write_jsonl(jsonl, {rec}, true);
  write_text_file(csv, trials_csv(rec), true);

  out << o.name << " config " << rec.config_hash << " seed " << seed << ": measured "
      << format_double(rec.summary.value("measured", 0.0));
  if (rec.summary.contains("predicted")) out << " predicted " << format_double(rec.summary["predicted"].get<double>());
  out << (rec.passed() ? "  PASS" : "  FAIL") << "\n";
  out << "wrote " << jsonl.string() << "\n" << "wrote " << csv.string() << "\n";
  return rec.passed() ? kOk : kThresholdFailed;
}

// ---- report -----------------------------------------------------------------

std::vector<std::string> expand(const std::vector<std::string>& patterns) {
  std::set<std::string> files;
  for (const auto& p : patterns) {
    glob_t g{};
    const int rc = ::glob(p.c_str(), 0, nullptr, &g);
    if (rc == 0)
      for (std::size_t i = 0; i < g.gl_pathc; ++i) files.insert(g.gl_pathv[i]);
    globfree(&g);
    if (rc != 0 && rc != GLOB_NOMATCH) throw Error("glob failed for " + p);
  }
  return {files.begin(), files.end()};
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

int report_cmd(const std::vector<std::string>& patterns, const std::string& out_dir, bool force, std::ostream& out) {
  std::map<std::pair<std::string, std::string>, std::vector<ExperimentRecord>> groups;
  const auto files = expand(patterns);
  for (const auto& file : files)
    for (auto& r : read_jsonl(file)) groups[{r.experiment, r.config_hash}].push_back(std::move(r));

  const fs::path dir = out_dir;
  std::string csv = "experiment,config_hash,tool_version,records,seeds,max_measured,median_measured,all_pass\n";
  std::vector<std::pair<fs::path, std::string>> plots;
  for (auto& [key, recs] : groups) {
    std::stable_sort(recs.begin(), recs.end(),
                     [](const auto& a, const auto& b) { return a.master_seed < b.master_seed; });
    std::vector<double> measured;
    std::set<std::string> versions;
    std::string seeds;
    bool all_pass = true;
    std::string dat = "# " + key.first + " config " + key.second + "\n";
    for (const auto& r : recs) {
      measured.push_back(r.summary.value("measured", 0.0));
      versions.insert(r.tool_version);
      seeds += (seeds.empty() ? "" : ";") + std::to_string(r.master_seed);
      all_pass = all_pass && r.passed();
      if (r.summary.contains("series")) {
        const auto& s = r.summary.at("series");
        if (dat.find("\n# x") == std::string::npos)
          dat += "# x=" + s.value("x", std::string("x")) + " y=" + s.value("y", std::string("y")) + "\n";
        for (const auto& pt : s.at("points")) dat += format_double(pt.at(0)) + " " + format_double(pt.at(1)) + "\n";
      }
    }
    std::string version;
    for (const auto& v : versions) version += (version.empty() ? "" : ";") + v;
    dat.insert(0, "# " + version + "\n");
    csv += csv_field(key.first) + "," + key.second + "," + csv_field(version) + "," + std::to_string(recs.size()) + "," +
           seeds + "," + format_double(*std::max_element(measured.begin(), measured.end())) + "," +
           format_double(median(measured)) + "," + (all_pass ? "true" : "false") + "\n";
    plots.emplace_back(dir / (key.first + "-" + key.second + ".dat"), dat);
  }
  write_text_file(dir / "summary.csv", csv, force);
  for (const auto& [p, text] : plots) write_text_file(p, text, force);
  out << files.size() << " files, " << groups.size() << " configs -> " << (dir / "summary.csv").string() << "\n";
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Desk-scale laboratory for bilinear Fourier multipliers", "bimult"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  GenSymbol gen;
  auto* gs = app.add_subcommand("gen-symbol", "materialize a symbol to BMSG binary plus JSON sidecar");
  gs->add_option("--construction", gen.construction, "lattice, A or B (default: from config)")
      ->check(CLI::IsMember({"lattice", "A", "B"}));
  gs->add_option("--coeffs", gen.coeffs, "coefficient matrix JSON for lattice symbols")->check(CLI::ExistingFile);
  gs->add_option("--N", gen.N, "block of construction B");
  gs->add_option("--K", gen.K, "test function block of construction A (default: last)");
  gs->add_option("--out", gen.out, "output .bin path")->required();
  gs->add_option("--test-function", gen.test_function, "also write the matching test function JSON");
  gs->add_flag("--force", gen.common.force, "overwrite existing outputs");
  add_seed(gs, gen.common);
  add_overrides(gs, gen.common);

  std::string dec_in, dec_out;
  bool dec_force = false;
  auto* dc = app.add_subcommand("decompose", "split a coefficient matrix into row- and column-controlled parts");
  dc->add_option("--in", dec_in, "coefficient matrix JSON")->required()->check(CLI::ExistingFile);
  dc->add_option("--out", dec_out, "partition JSON")->required();
  dc->add_flag("--force", dec_force, "overwrite existing outputs");

  std::string ap_symbol, ap_f, ap_g, ap_eval = "antidiagonal", ap_out;
  bool ap_force = false;
  auto* ap = app.add_subcommand("apply", "evaluate T_m(f, g) and its operator ratio");
  ap->add_option("--symbol", ap_symbol, "symbol .bin")->required()->check(CLI::ExistingFile);
  ap->add_option("--f", ap_f, "spectral JSON of f")->required()->check(CLI::ExistingFile);
  ap->add_option("--g", ap_g, "spectral JSON of g (default: f)")->check(CLI::ExistingFile);
  ap->add_option("--eval", ap_eval, "evaluation path")->check(CLI::IsMember({"direct", "antidiagonal"}));
  ap->add_option("--out", ap_out, "output JSON")->required();
  ap->add_flag("--force", ap_force, "overwrite existing outputs");

  ExperimentOptions ex;
  auto* ec = app.add_subcommand("experiment", "run a named experiment, write JSONL and CSV");
  ec->add_option("name", ex.name, "experiment")->required()->check(CLI::IsMember(experiment_names()));
  add_seed(ec, ex.common);
  add_overrides(ec, ex.common);
  ec->add_option("--threads", ex.common.threads, "worker cap")->check(CLI::PositiveNumber);
  ec->add_option("--out-dir", ex.common.out_dir, "output directory");
  ec->add_flag("--force", ex.common.force, "overwrite existing outputs");
  ec->add_flag("--timing", ex.timing, "record wall-clock seconds (breaks byte-identical reruns)");
  ec->add_option("--N", ex.N, "block list")->delimiter(',');
  ec->add_option("--M", ex.M, "side lengths")->delimiter(',');
  ec->add_option("--blocks", ex.blocks, "block starts b_K")->delimiter(',');
  ec->add_option("--pool", ex.pool, "seed pool per block");
  ec->add_option("--trials", ex.trials, "trial count");
  ec->add_option("--d-exponent", ex.d_exponent, "d*(t) = t^(-e)");
  ec->add_option("--family", ex.family, "corpus family")
      ->check(CLI::IsMember({"lattice", "besov", "fourier-compact"}));

  std::vector<std::string> rp_inputs;
  std::string rp_out = ".";
  bool rp_force = false;
  auto* rp = app.add_subcommand("report", "merge JSONL records into summary.csv and plot data");
  rp->add_option("inputs", rp_inputs, "JSONL files or glob patterns");
  rp->add_option("--out-dir", rp_out, "output directory");
  rp->add_flag("--force", rp_force, "overwrite existing outputs");

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::CallForHelp&) {
    const auto subs = app.get_subcommands();
    out << (subs.empty() ? app.help() : subs.back()->help("bimult"));
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << "\n";
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "bimult: " << e.what() << "\n";
    return kValidationError;
  }

  try {
    if (*gs) return gen_symbol(gen, out);
    if (*dc) return decompose_cmd(dec_in, dec_out, dec_force, out);
    if (*ap) return apply_cmd(ap_symbol, ap_f, ap_g, ap_eval, ap_out, ap_force, out);
    if (*ec) return experiment_cmd(ex, out);
    return report_cmd(rp_inputs, rp_out, rp_force, out);
  } catch (const std::exception& e) {
    err << "bimult: " << e.what() << "\n";
    return kValidationError;
  }
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace bimult::cli
