#include "bimult/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "bimult/error.hpp"
#include "bimult/fft.hpp"
#include "bimult/littlewood_paley.hpp"
#include "bimult/parallel.hpp"
#include "bimult/rng.hpp"
#include "bimult/wavelets.hpp"

namespace bimult {
namespace {

double euclidean(std::span<const double> a) {
  double s = 0.0;
  for (double v : a) s += v * v;
  return std::sqrt(s);
}

std::size_t argmax(const std::vector<double>& v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

cplx random_value(Rng& rng, const std::string& law) {
  if (law == "pareto") return static_cast<double>(rng.sign()) * std::pow(rng.uniform_open0(), -1.0 / 1.5);
  if (law == "sign") return static_cast<double>(rng.sign());
  return std::polar(rng.uniform_open0(), 2.0 * std::numbers::pi * rng.uniform());
}

CoeffMatrix random_lattice_coefficients(Rng& rng, int R) {
  static const char* laws[] = {"uniform", "pareto", "sign"};
  const std::string law = laws[rng.integer(0, 2)];
  const double density = rng.uniform(0.02, 1.0);
  std::vector<CoeffEntry> entries;
  for (std::int64_t k = -R; k <= R; ++k)
    for (std::int64_t l = -R; l <= R; ++l)
      if (rng.uniform() < density) entries.push_back({{k, l}, random_value(rng, law)});
  if (entries.empty()) entries.push_back({{0, 0}, 1.0});
  return CoeffMatrix(std::move(entries));
}

// Bump trains at random lattice points in [-R, R] with random unimodular weights.
SpectralVector random_aligned(Rng& rng, const BumpSpec& phi, int resolution, int radius, int oversample, int R) {
  const auto count = rng.integer(1, 2 * R + 1);
  std::vector<std::int64_t> centers;
  for (std::int64_t j = -R; j <= R; ++j) centers.push_back(j);
  for (std::size_t i = centers.size(); i > 1; --i) std::swap(centers[i - 1], centers[static_cast<std::size_t>(rng.integer(0, static_cast<std::int64_t>(i) - 1))]);
  centers.resize(static_cast<std::size_t>(count));
  std::sort(centers.begin(), centers.end());
  std::vector<cplx> amps;
  for (std::size_t i = 0; i < centers.size(); ++i) amps.push_back(random_value(rng, "uniform"));
  return bump_train(phi, resolution, 1.0 / resolution, radius, oversample, centers, amps);
}

// Complex Gaussian spectrum on a random sub-interval of the box.
SpectralVector random_band_limited(Rng& rng, int resolution, int radius, int oversample) {
  FrequencyBox box{1, radius, oversample, static_cast<double>(resolution)};
  SpectralVector out(box);
  const auto lo = rng.integer(-radius, radius);
  const auto hi = rng.integer(lo, std::min<std::int64_t>(radius, lo + 4 * resolution));
  auto v = out.values();
  for (std::int64_t i = lo; i <= hi; ++i) v[static_cast<std::size_t>(i + radius)] = {rng.normal(), rng.normal()};
  return out;
}

const BumpSpec kPsi{0.1, 0.0, Normalization::None};
const BumpSpec kPhi{0.2, 0.1, Normalization::UnitL2};

// Trigonometric polynomial on the symbol torus whose spectrum lies in |x| < 2^k.
SymbolGrid band_limited_symbol(int radius, double spacing, int k, const std::function<cplx(double)>& coeff) {
  SymbolGrid shape(1, radius, spacing, {});
  const std::int64_t N = shape.side();
  const double P = shape.period(), band = std::ldexp(1.0, k);
  std::vector<cplx> spec(static_cast<std::size_t>(N * N));
  for (std::int64_t a = 0; a < N; ++a)
    for (std::int64_t b = 0; b < N; ++b) {
      const double wa = static_cast<double>(a > radius ? a - N : a) / P;
      const double wb = static_cast<double>(b > radius ? b - N : b) / P;
      const double r = std::hypot(wa, wb);
      if (r < band) spec[static_cast<std::size_t>(a * N + b)] = coeff(r / band);
    }
  fft(spec, {static_cast<int>(N), static_cast<int>(N)}, FftDirection::Backward);
  std::vector<cplx> dense(spec.size());
  for (std::int64_t a = 0; a < N; ++a)
    for (std::int64_t b = 0; b < N; ++b) {
      const std::int64_t pa = a > radius ? a - N : a, pb = b > radius ? b - N : b;
      dense[static_cast<std::size_t>((pa + radius) * N + (pb + radius))] = spec[static_cast<std::size_t>(a * N + b)];
    }
  return SymbolGrid::from_dense(1, radius, spacing, dense);
}

struct FamilyGeometry {
  int R;       // lattice points in [-R, R]
  int radius;  // grid radius
};

FamilyGeometry geometry(CorpusFamily family, const CorpusOptions& o) {
  const int R = family == CorpusFamily::LatticeWeak ? o.coeff_radius
                : family == CorpusFamily::Besov     ? o.besov_radius
                                                    : o.compact_radius;
  return {R, bump_train_radius(kPhi, o.resolution, R)};
}

double family_norm(CorpusFamily family, const SymbolGrid& m, const CoeffMatrix* c, const CorpusOptions& o) {
  switch (family) {
    case CorpusFamily::LatticeWeak:
      return c->weak_norm(4.0);
    case CorpusFamily::Besov:
      return besov_norm(m);
    case CorpusFamily::FourierCompact:
      return std::exp2(m.n() * o.band_exponent / 2.0) * weak_quasinorm(m.measured_values(), 4.0);
  }
  return 0.0;
}

}  // namespace

KhintchineResult khintchine_mc(std::span<const double> a, std::int64_t trials, std::uint64_t seed, unsigned workers) {
  const double norm = euclidean(a);
  if (norm == 0.0) throw InvalidArgument("khintchine_mc: zero vector");
  if (trials < 1) throw InvalidArgument("khintchine_mc: trials must be >= 1");
  std::vector<double> value(static_cast<std::size_t>(trials));
  parallel_for(value.size(), workers, [&](std::size_t t) {
    Rng rng(derive_seed(seed, t));
    double s = 0.0;
    for (double x : a) s += rng.sign() * x;
    value[t] = std::abs(s);
  });
  double sum = 0.0;
  for (double v : value) sum += v;
  const double mean = sum / static_cast<double>(trials);
  return {mean, mean / norm};
}

KhintchineResult khintchine_exact(std::span<const double> a) {
  const double norm = euclidean(a);
  if (norm == 0.0) throw InvalidArgument("khintchine_exact: zero vector");
  if (a.size() > 24) throw InvalidArgument("khintchine_exact: at most 24 entries");
  // |sum| is even in the sign vector, so fix the first sign.
  const std::uint64_t patterns = std::uint64_t{1} << (a.size() - 1);
  double sum = 0.0;
  for (std::uint64_t p = 0; p < patterns; ++p) {
    double s = a[0];
    for (std::size_t i = 1; i < a.size(); ++i) s += ((p >> (i - 1)) & 1u) ? -a[i] : a[i];
    sum += std::abs(s);
  }
  const double mean = sum / static_cast<double>(patterns);
  return {mean, mean / norm};
}

std::vector<GrowthRowA> growth_experiment_A(const CounterexampleAConfig& cfg, int pool, std::uint64_t master_seed,
                                            unsigned workers) {
  cfg.validate();
  if (pool < 1) throw InvalidArgument("growth_experiment_A: pool must be >= 1");
  std::vector<GrowthRowA> rows;
  std::vector<std::uint64_t> best_seeds;
  for (int K = 1; K <= static_cast<int>(cfg.blocks.size()); ++K) {
    CounterexampleAConfig sub = cfg;
    sub.blocks.assign(cfg.blocks.begin(), cfg.blocks.begin() + K);
    sub.seeds.clear();
    const auto f = test_function_A(K, sub);

    GrowthRowA row;
    row.K = K;
    row.b = sub.blocks.back();
    row.rho = sub.rho(K);
    row.pool.resize(static_cast<std::size_t>(pool));
    parallel_for(row.pool.size(), workers, [&](std::size_t i) {
      const auto seed = derive_seed(master_seed, static_cast<std::uint64_t>(K), i);
      const auto m = counterexample_A_symbol(sub, counterexample_A_block(sub, K, seed));
      row.pool[i] = operator_ratio(m, f, f);
    });
    row.best_seed = derive_seed(master_seed, static_cast<std::uint64_t>(K), argmax(row.pool));
    best_seeds.push_back(row.best_seed);

    sub.seeds = best_seeds;
    row.measured = operator_ratio(counterexample_A_symbol(sub, counterexample_A(sub)), f, f);
    row.trend = std::pow(row.rho, 0.25) * sub.dstar(row.rho);
    rows.push_back(std::move(row));
  }
  const double c = rows.front().measured / rows.front().trend;
  for (auto& r : rows) r.predicted = c * r.trend;
  return rows;
}

std::vector<GrowthRowB> growth_experiment_B(const CounterexampleBConfig& cfg, int pool, std::uint64_t master_seed,
                                            unsigned workers) {
  cfg.validate();
  if (pool < 1) throw InvalidArgument("growth_experiment_B: pool must be >= 1");
  std::vector<GrowthRowB> rows;
  for (int N : cfg.Ns) {
    GrowthRowB row;
    row.N = N;
    row.side = cfg.side_count(N);
    row.offset = cfg.offset(N);
    const auto f = test_function_B(N, cfg);
    row.pool.resize(static_cast<std::size_t>(pool));
    parallel_for(row.pool.size(), workers, [&](std::size_t i) {
      const auto seed = derive_seed(master_seed, static_cast<std::uint64_t>(N), i);
      row.pool[i] = operator_ratio(counterexample_B_block(N, cfg, seed), f, f);
    });
    const auto best = argmax(row.pool);
    row.best_seed = derive_seed(master_seed, static_cast<std::uint64_t>(N), best);
    row.measured = row.pool[best];

    const auto counts = count_representations(row.offset, row.offset + row.side - 1, cfg.n);
    row.sum_r2 = counts.sum_squares();
    const double nf = l2_norm(f);
    row.bump_factor = nf * nf / std::pow(static_cast<double>(row.side), cfg.n);
    row.predicted = cfg.amplitude(N) * std::sqrt(static_cast<double>(row.sum_r2)) * row.bump_factor;
    rows.push_back(std::move(row));
  }
  return rows;
}

const char* corpus_family_name(CorpusFamily f) {
  switch (f) {
    case CorpusFamily::LatticeWeak:
      return "lattice";
    case CorpusFamily::Besov:
      return "besov";
    case CorpusFamily::FourierCompact:
      return "fourier-compact";
  }
  return "?";
}

CorpusFamily corpus_family_from_name(const std::string& name) {
  if (name == "lattice") return CorpusFamily::LatticeWeak;
  if (name == "besov") return CorpusFamily::Besov;
  if (name == "fourier-compact") return CorpusFamily::FourierCompact;
  throw InvalidArgument("unknown corpus family '" + name + "' (lattice, besov, fourier-compact)");
}

double corpus_baseline(CorpusFamily family, const CorpusOptions& o) {
  const auto geo = geometry(family, o);
  const double h = 1.0 / o.resolution;
  const std::int64_t origin[] = {0};
  const cplx unit[] = {1.0};
  const auto f = bump_train(kPhi, o.resolution, h, geo.radius, o.oversample, origin, unit);
  if (family == CorpusFamily::FourierCompact) {
    const auto m = band_limited_symbol(geo.radius, h, o.band_exponent, [](double t) { return cplx(mollifier(t)); });
    return operator_ratio(m, f, f) / family_norm(family, m, nullptr, o);
  }
  const CoeffMatrix c({{{0, 0}, 1.0}});
  const auto m = lattice_symbol(c, kPsi, o.resolution, h, geo.radius);
  return operator_ratio(m, f, f) / family_norm(family, m, &c, o);
}

CorpusResult boundedness_corpus(CorpusFamily family, int trials, std::uint64_t master_seed, const CorpusOptions& o,
                                unsigned workers) {
  if (trials < 1) throw InvalidArgument("boundedness_corpus: trials must be >= 1");
  const auto geo = geometry(family, o);
  const double h = 1.0 / o.resolution;
  CorpusResult out;
  out.family = family;
  out.baseline = corpus_baseline(family, o);
  out.trials.resize(2 * static_cast<std::size_t>(trials));
  parallel_for(static_cast<std::size_t>(trials), workers, [&](std::size_t t) {
    const auto seed = derive_seed(master_seed, t);
    Rng rng(seed);
    SymbolGrid m;
    CoeffMatrix c;
    if (family == CorpusFamily::FourierCompact) {
      Rng coeff_rng(derive_seed(seed, 1));
      m = band_limited_symbol(geo.radius, h, o.band_exponent,
                              [&coeff_rng](double) { return cplx(coeff_rng.normal(), coeff_rng.normal()); });
    } else {
      c = random_lattice_coefficients(rng, geo.R);
      m = lattice_symbol(c, kPsi, o.resolution, h, geo.radius);
    }
    const double norm = family_norm(family, m, &c, o);
    const auto fa = random_aligned(rng, kPhi, o.resolution, geo.radius, o.oversample, geo.R);
    const auto ga = random_aligned(rng, kPhi, o.resolution, geo.radius, o.oversample, geo.R);
    const auto fr = random_band_limited(rng, o.resolution, geo.radius, o.oversample);
    const auto gr = random_band_limited(rng, o.resolution, geo.radius, o.oversample);
    const double aligned = operator_ratio(m, fa, ga);
    const double random = operator_ratio(m, fr, gr);
    out.trials[2 * t] = {seed, "aligned", aligned, norm, aligned / norm};
    out.trials[2 * t + 1] = {seed, "random", random, norm, random / norm};
  });
  for (const auto& tr : out.trials) out.max_normalized = std::max(out.max_normalized, tr.normalized);
  return out;
}

std::vector<CountingRow> counting_table(std::span<const std::int64_t> Ms, int n, std::int64_t brute_limit) {
  std::vector<CountingRow> rows;
  for (std::int64_t M : Ms) {
    if (M < 1) throw InvalidArgument("counting_table: M must be >= 1");
    CountingRow row;
    row.M = M;
    row.n = n;
    const auto counts = count_representations(0, M - 1, n);
    row.sum_r2 = counts.sum_squares();
    row.closed_form = std::pow(static_cast<long double>(representation_closed_form(M)), n);
    row.lower_bound = std::pow(2.0L / 3.0L * static_cast<long double>(M) * M * M, n);
    row.equal = counts.sum_squares_1d() == representation_closed_form(M);
    if (M <= brute_limit) {
      row.brute_force_checked = true;
      row.equal = row.equal && count_representations_bruteforce(0, M - 1) == counts.r1;
    }
    rows.push_back(row);
  }
  return rows;
}

namespace {

// Area of {(u, v) : psi(u) psi(v) > t} for the tensor profile, by quadrature.
double continuum_level_area(const BumpSpec& psi, double t) {
  if (t >= 1.0) return 0.0;
  // half-width of {psi > s} on one axis, psi non-increasing in |u|
  auto half_width = [&](double s) {
    if (s >= 1.0) return 0.0;
    double lo = psi.plateau, hi = psi.radius;
    if (bump_profile_1d(psi, lo) <= s) lo = 0.0;
    for (int it = 0; it < 80; ++it) {
      const double mid = 0.5 * (lo + hi);
      (bump_profile_1d(psi, mid) > s ? lo : hi) = mid;
    }
    return lo;
  };
  const double U = half_width(t);
  const int steps = 20000;
  double sum = 0.0;
  for (int i = 0; i < steps; ++i) {
    const double u = (i + 0.5) * U / steps;
    sum += 2.0 * half_width(t / bump_profile_1d(psi, u));
  }
  return 2.0 * sum * U / steps;
}

}  // namespace

std::vector<LevelsetRow> levelset_profile(const CounterexampleBConfig& cfg, std::span<const double> lambdas,
                                          std::span<const double> alphas) {
  cfg.validate();
  const int n = cfg.n;
  std::vector<SymbolGrid> blocks;
  for (int N : cfg.Ns) blocks.push_back(counterexample_B_block(N, cfg));
  const auto tmpl = bump_samples_1d(cfg.psi, 1.0 / cfg.resolution);
  const double scale = bump_scale(cfg.psi, 2, 1.0 / cfg.resolution);

  std::vector<LevelsetRow> rows;
  for (double lambda : lambdas) {
    if (!(lambda > 0.0)) throw InvalidArgument("levelset_profile: lambda must be positive");
    LevelsetRow row;
    row.lambda = lambda;
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      const int N = cfg.Ns[b];
      const double A = cfg.amplitude(N);
      const double s = static_cast<double>(cfg.side_count(N));
      const double coeffs = std::pow(s, 2 * n);
      row.grid_measure += level_measure(blocks[b].measured_values(), lambda);
      std::int64_t count = 0;
      for (double x : tmpl)
        for (double y : tmpl)
          if (A * scale * x * y > lambda) ++count;
      row.coefficient_measure += coeffs * static_cast<double>(count) * blocks[b].cell_measure();
      row.continuum_measure +=
          coeffs * std::ldexp(1.0, -2 * n * N) * continuum_level_area(cfg.psi, lambda / (A * scale));
      if (A > lambda) row.remark_bound += std::exp2(2.0 * n * N * N - n * N);
    }
    for (double alpha : alphas)
      row.implied.push_back(row.grid_measure * std::pow(lambda, 4) * std::pow(std::log(std::numbers::e / lambda), alpha));
    rows.push_back(std::move(row));
  }
  return rows;
}

CoeffMatrix random_coeff_matrix(const std::string& law, std::int64_t rows, std::int64_t cols, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<CoeffEntry> entries;
  if (law == "shell") {
    const std::int64_t M = (std::max(rows, cols) - 1) / 2;
    const double e = rng.uniform(0.1, 0.5);
    for (std::int64_t k = -M; k <= M; ++k)
      for (std::int64_t l = -M; l <= M; ++l) {
        const double d = std::pow(static_cast<double>(ShellSequence::rank({k, l})), -e);
        entries.push_back({{k, l}, static_cast<double>(rng.sign()) * d});
      }
    return CoeffMatrix(std::move(entries));
  }
  if (law != "uniform" && law != "pareto") throw InvalidArgument("random_coeff_matrix: unknown law '" + law + "'");
  const double density = rng.uniform(0.1, 1.0);
  for (std::int64_t k = 0; k < rows; ++k)
    for (std::int64_t l = 0; l < cols; ++l)
      if (rng.uniform() < density) entries.push_back({{k, l}, random_value(rng, law)});
  return CoeffMatrix(std::move(entries));
}

std::vector<DecompositionTrial> decomposition_corpus(int trials, std::uint64_t master_seed, unsigned workers) {
  static const char* laws[] = {"uniform", "pareto", "shell"};
  std::vector<DecompositionTrial> out(static_cast<std::size_t>(trials));
  parallel_for(out.size(), workers, [&](std::size_t t) {
    DecompositionTrial tr;
    tr.seed = derive_seed(master_seed, t);
    tr.law = laws[t % 3];
    Rng rng(derive_seed(tr.seed, 0));
    tr.rows = rng.integer(1, 64);
    tr.cols = tr.law == std::string("shell") ? tr.rows : rng.integer(1, 64);
    const auto f = random_coeff_matrix(tr.law, tr.rows, tr.cols, derive_seed(tr.seed, 1));
    const double w = f.weak_norm(4.0);
    tr.weak_norm_sq = w * w;
    const auto sums = verify_partition(f, decompose(f));
    tr.constant_sq = tr.weak_norm_sq > 0.0 ? std::max(sums.max_row_sum, sums.max_col_sum) / tr.weak_norm_sq : 0.0;
    out[t] = tr;
  });
  return out;
}

std::vector<LemmaDiscreteTrial> lemma_discrete_corpus(int trials, int jMax, std::uint64_t master_seed, unsigned workers,
                                                      int resolution) {
  const auto labels = wavelet_labels(jMax, 2);
  std::vector<LemmaDiscreteTrial> out(static_cast<std::size_t>(trials) * labels.size());
  parallel_for(static_cast<std::size_t>(trials), workers, [&](std::size_t t) {
    const auto seed = derive_seed(master_seed, t);
    Rng rng(seed);
    const int R = static_cast<int>(rng.integer(0, 2));
    const auto c = random_lattice_coefficients(rng, R);
    const auto m = with_integer_period(lattice_symbol(c, kPsi, resolution));
    const auto m7 = m.scaled(7.0);
    for (std::size_t i = 0; i < labels.size(); ++i) {
      const auto [j, mask] = labels[i];
      out[t * labels.size() + i] = {seed, j, mask, lemma_discrete_ratio(m, j, mask), lemma_discrete_ratio(m7, j, mask)};
    }
  });
  return out;
}

}  // namespace bimult
