// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <string>

#include "bimult/bilinear.hpp"
#include "bimult/experiments.hpp"
#include "bimult/lorentz.hpp"
#include "bimult/rng.hpp"
#include "bimult/rowcol.hpp"
#include "bimult/runner.hpp"
#include "bimult/symbols.hpp"
#include "bimult/wavelets.hpp"

using namespace bimult;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Collects failed checks with a short reason; the first few reasons are kept.
struct Checker {
  Outcome out;
  int failures = 0;
  void require(bool ok, const std::string& why) {
    if (ok) return;
    out.pass = false;
    if (failures++ < 3) out.detail += (out.detail.empty() ? "" : "; ") + why;
  }
  void note(const std::string& s) {
    if (out.pass) out.detail += (out.detail.empty() ? "" : "; ") + s;
  }
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

SpectralVector random_input(const FrequencyBox& box, std::uint64_t seed) {
  Rng rng(seed);
  SpectralVector s(box);
  for (auto& v : s.values()) v = {rng.normal(), rng.normal()};
  return s;
}

std::vector<cplx> product_on_output_grid(const SpectralVector& f, const SpectralVector& g) {
  const int R = 2 * f.box().radius;
  const auto a = synthesize(f.embedded(R)), b = synthesize(g.embedded(R));
  std::vector<cplx> out(a.samples().size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.samples()[i] * b.samples()[i];
  return out;
}

double rel_diff(std::span<const cplx> a, std::span<const cplx> b) {
  double err = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    err = std::max(err, std::abs(a[i] - b[i]));
    scale = std::max(scale, std::abs(b[i]));
  }
  return scale == 0.0 ? err : err / scale;
}

Outcome operator_correctness() {
  Checker c;
  double worst_one = 0.0, worst_tensor = 0.0, worst_modes = 0.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto s = derive_seed(1, seed);
    Rng rng(s);
    const int F = static_cast<int>(rng.integer(1, 16));
    const double h = std::ldexp(1.0, -static_cast<int>(rng.integer(0, 3)));
    const FrequencyBox box{1, F, 4, 1.0 / h};
    const auto f = random_input(box, derive_seed(s, 1)), g = random_input(box, derive_seed(s, 2));
    const std::size_t cells = static_cast<std::size_t>((2 * F + 1) * (2 * F + 1));

    const auto one = SymbolGrid::from_dense(1, F, h, std::vector<cplx>(cells, 1.0));
    worst_one = std::max(worst_one, rel_diff(apply_bilinear(one, f, g).samples(), product_on_output_grid(f, g)));

    const auto s1 = random_input(box, derive_seed(s, 3)), s2 = random_input(box, derive_seed(s, 4));
    std::vector<cplx> dense;
    for (int i = -F; i <= F; ++i)
      for (int j = -F; j <= F; ++j) dense.push_back(s1.at({i}) * s2.at({j}));
    const auto tensor = SymbolGrid::from_dense(1, F, h, dense);
    const auto expect = product_on_output_grid(apply_linear_multiplier(s1, f), apply_linear_multiplier(s2, g));
    for (auto mode : {BilinearMode::Direct, BilinearMode::Antidiagonal})
      worst_tensor = std::max(worst_tensor, rel_diff(apply_bilinear(tensor, f, g, mode).samples(), expect));

    std::vector<SymbolEntry> entries;
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(cells); ++i)
      if (rng.uniform() < 0.7) entries.push_back({i, {rng.normal(), rng.normal()}});
    const SymbolGrid m(1, F, h, std::move(entries));
    worst_modes = std::max(worst_modes, rel_diff(apply_bilinear(m, f, g, BilinearMode::Direct).samples(),
                                                 apply_bilinear(m, f, g, BilinearMode::Antidiagonal).samples()));
  }
  c.require(worst_one <= 1e-9, "m=1 deviation " + fmt(worst_one));
  c.require(worst_tensor <= 1e-9, "tensor deviation " + fmt(worst_tensor));
  c.require(worst_modes <= 1e-10, "direct vs antidiagonal " + fmt(worst_modes));
  c.note("m=1 " + fmt(worst_one) + ", tensor " + fmt(worst_tensor) + ", modes " + fmt(worst_modes));
  return c.out;
}

Outcome decomposition_guarantee() {
  Checker c;
  const auto trials = decomposition_corpus(500, 2024);
  double worst = 0.0;
  for (const auto& t : trials) worst = std::max(worst, t.constant_sq);
  c.require(trials.size() == 500, "corpus size " + std::to_string(trials.size()));
  c.require(worst <= 6.25, "max C^2 " + fmt(worst));
  c.note("max constant " + fmt(std::sqrt(worst)) + " (C^2 = " + fmt(worst) + ")");
  return c.out;
}

Outcome decomposition_necessity() {
  Checker c;
  auto family = [](double e, std::int64_t M) {
    return ShellSequence::from_rearrangement([e](double t) { return std::pow(t, -e); }, M).coefficients();
  };
  auto partial = [](double e, std::int64_t count) {
    double s = 0.0;
    for (std::int64_t j = 1; j <= count; ++j) s += std::pow(static_cast<double>(j), -2.0 * e);
    return s;
  };
  double prev = 0.0, quarter = 0.0;
  std::string eighth;
  for (std::int64_t M : {8, 16, 32, 64}) {
    const double side = 2.0 * static_cast<double>(M) + 1.0;
    const double b = necessity_lower_bound(family(0.125, M), M);
    const double oracle = partial(0.125, (2 * M + 1) * (2 * M + 1)) / (2 * side);
    c.require(std::abs(b - oracle) <= 1e-10 * oracle, "oracle mismatch at M=" + std::to_string(M));
    c.require(b > prev, "not increasing at M=" + std::to_string(M));
    c.require(b > 0.3 * std::sqrt(side), "below 0.3 sqrt(2M+1) at M=" + std::to_string(M));
    prev = b;
    eighth += (eighth.empty() ? "" : ",") + fmt(b);
    quarter = std::max(quarter, necessity_lower_bound(family(0.25, M), M));
  }
  c.require(quarter < 3.0, "quarter-power family reaches " + fmt(quarter));
  c.note("t^-1/8: " + eighth + "; t^-1/4 max " + fmt(quarter));
  return c.out;
}

Outcome counting_lemma() {
  Checker c;
  std::vector<std::int64_t> Ms;
  for (std::int64_t M = 1; M <= 4096; ++M) Ms.push_back(M);
  const auto rows = counting_table(Ms, 1, 256);
  int brute = 0;
  for (const auto& r : rows) {
    c.require(r.equal && r.sum_r2 == r.closed_form, "mismatch at M=" + std::to_string(r.M));
    if (r.brute_force_checked) ++brute;
  }
  c.require(brute == 256, "brute force ran for " + std::to_string(brute) + " sizes");
  c.note("4096 sizes exact, " + std::to_string(brute) + " brute-forced");
  return c.out;
}

Outcome khintchine() {
  Checker c;
  const auto rec = run_experiment("khintchine", nlohmann::json::object(), 11);
  for (const auto& t : rec.trials) {
    const double ratio = t.at("mc_ratio").get<double>();
    c.require(ratio >= 1.0 / std::sqrt(2.0) - 0.02 && ratio <= 1.0, "ratio " + fmt(ratio) + " out of range");
    if (t.contains("exact_ratio"))
      c.require(t.at("difference").get<double>() <= 0.01, "exact vs MC at length " + t.at("length").dump());
  }
  const auto& last = rec.trials.back();
  const double limit = std::sqrt(2.0 / std::numbers::pi);
  c.require(std::abs(last.at("mc_ratio").get<double>() - limit) <= 0.01, "equal weights far from sqrt(2/pi)");
  c.require(rec.passed(), "experiment threshold failed");
  c.note("length " + last.at("length").dump() + " ratio " + fmt(last.at("mc_ratio").get<double>()) + " vs " +
         fmt(limit));
  return c.out;
}

Outcome block_norms() {
  Checker c;
  CounterexampleBConfig full;
  full.mode = ScheduleMode::Paper;
  full.Ns = {2, 4};
  const CounterexampleBConfig desk;
  double worst = 0.0;
  worst = std::max(worst, std::abs(l2_norm(test_function_B(2, full)) - 1.0));
  for (int N : desk.Ns) worst = std::max(worst, std::abs(l2_norm(test_function_B(N, desk)) - 1.0));
  c.require(worst <= 1e-6, "||f_N|| off by " + fmt(worst));

  const double c2 = coefficient_l4_power(2, full) * 4.0, c4 = coefficient_l4_power(4, full) * 16.0;
  c.require(c2 == c4, "2^{-nN} law constants differ: " + fmt(c2) + " vs " + fmt(c4));

  CounterexampleBConfig only2 = full;
  only2.Ns = {2};
  const double grid = std::pow(lp_norm(counterexample_B_block(2, only2).measured_values(), 4.0), 4.0);
  const double rel = std::abs(grid / coefficient_l4_power(2, full) - 1.0);
  c.require(rel <= 0.02, "grid quadrature off by " + fmt(rel));
  c.note("||f_N|| dev " + fmt(worst) + ", law constant " + fmt(c2) + ", grid dev " + fmt(rel));
  return c.out;
}

Outcome growth_trends() {
  Checker c;
  const auto b = run_experiment("growth-B", {{"pool", 32}}, 7);
  std::string bs;
  for (const auto& t : b.trials) bs += (bs.empty() ? "" : ",") + fmt(t.at("measured").get<double>());
  c.require(b.passed(), "growth-B: " + bs);

  const auto a = run_experiment("growth-A", {{"d_exponent", 0.125}}, 7);
  std::string as;
  for (const auto& t : a.trials) as += (as.empty() ? "" : ",") + fmt(t.at("measured").get<double>());
  c.require(a.passed(), "growth-A t^-1/8: " + as);

  const auto q = run_experiment("growth-A", {{"d_exponent", 0.25}}, 7);
  double lo = INFINITY, hi = 0.0;
  for (const auto& t : q.trials) {
    lo = std::min(lo, t.at("measured").get<double>());
    hi = std::max(hi, t.at("measured").get<double>());
  }
  c.require(q.passed(), "growth-A t^-1/4 spread " + fmt(hi / lo));
  c.note("B " + bs + "; A(1/8) " + as + "; A(1/4) spread " + fmt(hi / lo));
  return c.out;
}

Outcome boundedness_corpora() {
  Checker c;
  for (const char* family : {"lattice", "besov", "fourier-compact"}) {
    const auto r = run_experiment("corpus", {{"family", family}, {"trials", 100}}, 5);
    const double measured = r.summary.at("measured").get<double>(), base = r.summary.at("baseline").get<double>();
    c.require(r.passed(), std::string(family) + " max " + fmt(measured) + " vs baseline " + fmt(base));
    c.note(std::string(family) + " " + fmt(measured) + "/" + fmt(base));
  }
  return c.out;
}

Outcome wavelet_suite() {
  Checker c;
  constexpr int kF = 62;
  constexpr double kH = 1.0 / 25;
  const std::vector<WaveletIndex> idx{{0, 0, {0, 0}}, {0, 0, {1, 0}}, {1, 1, {0, 0}}, {1, 2, {2, 1}},
                                      {2, 3, {3, -1}}, {3, 1, {0, 5}}, {4, 2, {7, 3}},  {4, 3, {7, 3}}};
  double ortho = 0.0;
  for (const auto& a : idx) {
    const auto w = synthesize_wavelet(a, 1, kF, kH);
    for (const auto& b : idx)
      ortho = std::max(ortho, std::abs(wavelet_band(w, b.j, b.mask).at(b.beta) - (&a == &b ? 1.0 : 0.0)));
  }
  c.require(ortho <= 1e-5, "orthonormality deviation " + fmt(ortho));

  // Real trigonometric polynomials inside the band tiled by scales j <= 4.
  double parseval = 0.0;
  const int N = 2 * kF + 1;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Rng rng(derive_seed(99, seed));
    std::vector<std::pair<std::array<int, 2>, cplx>> modes;
    for (int i = 0; i < 30; ++i)
      modes.push_back({{static_cast<int>(rng.integer(-24, 24)), static_cast<int>(rng.integer(-24, 24))},
                       {rng.normal(), rng.normal()}});
    std::vector<cplx> dense;
    for (int i = -kF; i <= kF; ++i)
      for (int j = -kF; j <= kF; ++j) {
        double v = 0.0;
        for (const auto& [a, z] : modes)
          v += 2.0 * (z * std::polar(1.0, 2.0 * std::numbers::pi * (a[0] * i + a[1] * j) / N)).real();
        dense.push_back(v);
      }
    const auto m = SymbolGrid::from_dense(1, kF, kH, dense);
    double l2 = 0.0, total = 0.0;
    for (const auto& e : m.entries()) l2 += std::norm(e.value);
    l2 *= m.cell_measure();
    for (const auto& band : wavelet_coefficients(m, 4))
      for (const cplx& v : band.coefficients) total += std::norm(v);
    parseval = std::max(parseval, std::abs(total / l2 - 1.0));
  }
  c.require(parseval <= 0.01, "Parseval deviation " + fmt(parseval));

  const auto rec = run_experiment("lemma-discrete", nlohmann::json::object(), 3);
  c.require(rec.passed(), "lemma corpus max " + fmt(rec.summary.at("measured").get<double>()));
  double scale = 0.0;
  for (const auto& t : rec.trials)
    scale = std::max(scale, std::abs(t.at("scaled_ratio").get<double>() - t.at("ratio").get<double>()));
  c.note("orthonormality " + fmt(ortho) + ", Parseval " + fmt(parseval) + ", lemma max " +
         fmt(rec.summary.at("measured").get<double>()) + " (bound " + rec.summary.at("bound").dump() +
         "), 7m deviation " + fmt(scale));
  return c.out;
}

Outcome levelset() {
  Checker c;
  const auto rec = run_experiment("levelset", nlohmann::json::object(), 0);
  double worst = 0.0;
  for (const auto& t : rec.trials) {
    const double g = t.at("grid_measure").get<double>(), k = t.at("coefficient_measure").get<double>();
    if (g > 0.0 || k > 0.0) worst = std::max(worst, std::abs(g - k) / std::max(g, k));
  }
  c.require(worst <= 0.02, "grid vs coefficient " + fmt(worst));
  c.require(rec.passed(), "experiment threshold failed");
  c.note("grid vs coefficient " + fmt(worst) + " over " + std::to_string(rec.trials.size()) + " levels");
  return c.out;
}

Outcome determinism() {
  Checker c;
  const auto dir = std::filesystem::temp_directory_path() / "bimult_acceptance";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  auto slurp = [](const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
  };
  const std::vector<std::pair<std::string, nlohmann::json>> runs{
      {"growth-B", nlohmann::json::object()},
      {"decomposition", {{"trials", 100}}},
      {"corpus", {{"trials", 10}}},
      {"khintchine", {{"trials", 20000}}},
      {"lemma-discrete", {{"trials", 10}}}};
  for (const auto& [name, overrides] : runs) {
    std::string first;
    for (unsigned workers : {1u, 4u, 8u}) {
      const auto path = dir / (name + "-" + std::to_string(workers) + ".jsonl");
      write_jsonl(path.string(), {run_experiment(name, overrides, 17, workers)}, true);
      const auto bytes = slurp(path);
      if (workers == 1)
        first = bytes;
      else
        c.require(bytes == first, name + " differs at " + std::to_string(workers) + " workers");
    }
  }
  std::filesystem::remove_all(dir);
  c.note(std::to_string(runs.size()) + " experiments byte-identical at 1/4/8 workers");
  return c.out;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"operator correctness", operator_correctness},
      {"decomposition guarantee", decomposition_guarantee},
      {"decomposition necessity", decomposition_necessity},
      {"counting lemma", counting_lemma},
      {"Khintchine", khintchine},
      {"block norms", block_norms},
      {"growth trends", growth_trends},
      {"boundedness corpora", boundedness_corpora},
      {"wavelet suite", wavelet_suite},
      {"level sets", levelset},
      {"determinism", determinism}};
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.pass) ++failed;
    std::printf("%2zu %-24s %s  %.1fs  %s\n", i + 1, criteria[i].first, o.pass ? "PASS" : "FAIL", secs,
                o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
