#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bimult/symbols.hpp"

namespace bimult {

struct KhintchineResult {
  double mean_abs = 0.0;  // E |sum eps_l a_l|
  double ratio = 0.0;     // mean_abs / ||a||_2
};

/// Monte Carlo over `trials` sign vectors; trial t draws from the substream
/// derive_seed(seed, t), so the worker count never changes the result.
KhintchineResult khintchine_mc(std::span<const double> a, std::int64_t trials, std::uint64_t seed,
                               unsigned workers = 1);

/// Exhaustive average over all 2^|a| sign patterns (|a| <= 24).
KhintchineResult khintchine_exact(std::span<const double> a);

struct GrowthRowA {
  int K = 0;
  std::int64_t b = 0;
  double rho = 0.0;
  std::uint64_t best_seed = 0;
  double measured = 0.0;   // operator ratio of the symbol over blocks <= K
  double trend = 0.0;      // rho^{1/4} d*(rho)
  double predicted = 0.0;  // c * trend, c fitted at the first K
  std::vector<double> pool;  // block-only ratio per pool seed
};

std::vector<GrowthRowA> growth_experiment_A(const CounterexampleAConfig& cfg, int pool, std::uint64_t master_seed,
                                            unsigned workers = 1);

struct GrowthRowB {
  int N = 0;
  std::int64_t side = 0;
  std::int64_t offset = 0;
  std::uint64_t best_seed = 0;
  double measured = 0.0;
  long double sum_r2 = 0.0;
  double bump_factor = 0.0;  // ||phi_B||_2^2, one bump of f_N
  double predicted = 0.0;    // A_N (sum r^2)^{1/2} bump_factor
  std::vector<double> pool;
};

std::vector<GrowthRowB> growth_experiment_B(const CounterexampleBConfig& cfg, int pool, std::uint64_t master_seed,
                                            unsigned workers = 1);

enum class CorpusFamily { LatticeWeak, Besov, FourierCompact };

const char* corpus_family_name(CorpusFamily f);
CorpusFamily corpus_family_from_name(const std::string& name);

struct CorpusOptions {
  int coeff_radius = 16;  // lattice families: c supported in [-R, R]^2
  int besov_radius = 6;   // besov family uses a smaller box (dense transforms)
  int resolution = 20;
  int oversample = 4;
  int band_exponent = 1;  // fourier-compact family: spectrum in |x| < 2^k
  int compact_radius = 4;
};

struct CorpusTrial {
  std::uint64_t seed = 0;
  std::string inputs;  // "random" or "aligned"
  double ratio = 0.0;
  double norm = 0.0;
  double normalized = 0.0;
};

struct CorpusResult {
  CorpusFamily family = CorpusFamily::LatticeWeak;
  double baseline = 0.0;  // normalized ratio of the family's single-bump member
  double max_normalized = 0.0;
  std::vector<CorpusTrial> trials;
};

/// Operator ratios of seeded random symbols against random and lattice-aligned
/// inputs, divided by the family's norm.
CorpusResult boundedness_corpus(CorpusFamily family, int trials, std::uint64_t master_seed,
                                const CorpusOptions& opts = {}, unsigned workers = 1);

/// Normalized ratio of the family's single-bump member with aligned inputs.
double corpus_baseline(CorpusFamily family, const CorpusOptions& opts = {});

struct CountingRow {
  std::int64_t M = 0;
  int n = 1;
  long double sum_r2 = 0.0;
  long double closed_form = 0.0;  // (M(2M^2+1)/3)^n
  long double lower_bound = 0.0;  // ((2/3) M^3)^n
  bool brute_force_checked = false;
  bool equal = false;
};

/// Brute force runs alongside the convolution for M <= brute_limit.
std::vector<CountingRow> counting_table(std::span<const std::int64_t> Ms, int n, std::int64_t brute_limit = 256);

struct LevelsetRow {
  double lambda = 0.0;
  double grid_measure = 0.0;         // cell count on the materialized symbol
  double coefficient_measure = 0.0;  // bumps above lambda times the lattice template
  double continuum_measure = 0.0;    // bumps times the quadrature area of the level set
  double remark_bound = 0.0;         // sum over blocks with A_N > lambda of 2^{2nN^2 - nN}
  std::vector<double> implied;       // measure lambda^4 log^alpha(e/lambda), per alpha
};

/// Level sets of the materialized blocks of cfg (the union over cfg.Ns).
std::vector<LevelsetRow> levelset_profile(const CounterexampleBConfig& cfg, std::span<const double> lambdas,
                                          std::span<const double> alphas);

struct DecompositionTrial {
  std::uint64_t seed = 0;
  std::string law;
  std::int64_t rows = 0, cols = 0;
  double weak_norm_sq = 0.0;
  double constant_sq = 0.0;  // max(row sum, col sum) / ||f||^2_{l^{4,inf}}
};

/// Seeded random matrices (uniform, Pareto, shell-monotone laws, up to 64 x 64)
/// run through decompose and verify_partition.
std::vector<DecompositionTrial> decomposition_corpus(int trials, std::uint64_t master_seed, unsigned workers = 1);

/// Random matrix of the given law for decomposition tests.
CoeffMatrix random_coeff_matrix(const std::string& law, std::int64_t rows, std::int64_t cols, std::uint64_t seed);

struct LemmaDiscreteTrial {
  std::uint64_t seed = 0;
  int j = 0;
  unsigned mask = 0;
  double ratio = 0.0;
  double scaled_ratio = 0.0;  // same symbol times 7
};

std::vector<LemmaDiscreteTrial> lemma_discrete_corpus(int trials, int jMax, std::uint64_t master_seed,
                                                      unsigned workers = 1, int resolution = 25);

}  // namespace bimult
