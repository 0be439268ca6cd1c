#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <json.hpp>

#include "bimult/bilinear.hpp"
#include "bimult/bumps.hpp"
#include "bimult/grid.hpp"
#include "bimult/rowcol.hpp"

namespace bimult {

/// m(xi, eta) = sum c_{k,l} Psi(xi - k, eta - l) sampled with `resolution`
/// points per unit. With spacing != 1/resolution the lattice is read in
/// dilated units: sample index i sits at i * spacing but the bumps are placed
/// at multiples of `resolution` indices. `radius` 0 selects the smallest box.
SymbolGrid lattice_symbol(const CoeffMatrix& c, const BumpSpec& psi, int resolution, double spacing = 0.0,
                          int radius = 0);

/// Smallest box radius holding every bump of lattice_symbol.
int lattice_symbol_radius(const CoeffMatrix& c, const BumpSpec& psi, int resolution);

/// Spectral vector spacing * sum_j a_j phi^(u - j), u = i / resolution, with
/// bumps centered on lattice indices j * resolution of a box of the given
/// radius and period 1/spacing. Throws BandLimitExceeded if a bump leaves the box.
SpectralVector bump_train(const BumpSpec& phi, int resolution, double spacing, int radius, int oversample,
                          std::span<const std::int64_t> centers, std::span<const cplx> amplitudes);

/// Radius needed by bump_train for centers within [-R, R].
int bump_train_radius(const BumpSpec& phi, int resolution, std::int64_t R);

/// Shell-monotone sequence on [-M, M]^2: cells ordered by max(|k|,|l|), then
/// lexicographically, carry d*(1), d*(2), ... in that order.
class ShellSequence {
 public:
  ShellSequence() = default;
  static ShellSequence from_rearrangement(const std::function<double(double)>& dstar, std::int64_t M);

  std::int64_t box() const { return box_; }
  std::span<const double> values() const { return values_; }
  double at(Cell c) const;
  CoeffMatrix coefficients() const;

  /// 1-based position of a cell in shell-then-lexicographic order.
  static std::int64_t rank(Cell c);

 private:
  std::int64_t box_ = 0;
  std::vector<double> values_;
};

/// Realizes card{d > lambda} = floor(mu(lambda)) clipped to the box, with
/// d*(j) = sup{lambda in (0,1) : mu(lambda) >= j} found by bisection. Throws
/// InvalidArgument if mu increases at any of the probe points.
ShellSequence make_shell_sequence(const std::function<double(double)>& mu, std::int64_t M);

/// Rademacher signs l -> epsilon_l, deterministic in (seed, l).
struct SignAssignment {
  std::uint64_t seed = 0;
  int operator()(std::int64_t l) const;
};

struct CounterexampleAConfig {
  double d_exponent = 0.125;             // d*(t) = t^(-d_exponent)
  std::vector<std::int64_t> blocks;      // b_K; I_K = {b_K, ..., 2 b_K - 1}
  std::vector<std::uint64_t> seeds;      // one per block
  BumpSpec psi{0.1, 0.0, Normalization::None};
  BumpSpec phi{0.2, 0.1, Normalization::UnitL2};
  int resolution = 20;
  int oversample = 4;
  std::int64_t box = 0;  // shell box M; 0 selects 2 max b_K

  void validate() const;
  std::int64_t shell_box() const;
  double dstar(double t) const;
  /// rho_K = (4 b_K)^2 for the 1-based block number K.
  double rho(int K) const;
  int symbol_radius() const;
};

ShellSequence shell_sequence(const CounterexampleAConfig& cfg);

/// c_{j,k} = epsilon_{j+k} d_{j,k} on each I_K x I_K, d_{j,k} elsewhere.
CoeffMatrix counterexample_A(const CounterexampleAConfig& cfg);

/// Only block K (1-based) with the given seed.
CoeffMatrix counterexample_A_block(const CounterexampleAConfig& cfg, int K, std::uint64_t seed);

SymbolGrid counterexample_A_symbol(const CounterexampleAConfig& cfg, const CoeffMatrix& c);

/// f^_K(xi) = sum_{j in I_K} phi^(xi - j) on the symbol's function box.
SpectralVector test_function_A(int K, const CounterexampleAConfig& cfg);

enum class ScheduleMode { Paper, Desk };

struct CounterexampleBConfig {
  ScheduleMode mode = ScheduleMode::Desk;
  int n = 1;
  std::vector<int> Ns{1, 2, 3};
  std::vector<std::int64_t> offsets;  // b_N per entry of Ns; empty selects disjoint defaults
  std::vector<std::uint64_t> seeds;   // one per entry of Ns
  BumpSpec psi{0.1, 0.05, Normalization::None};
  BumpSpec phi{0.05, 0.0, Normalization::UnitL2};
  int resolution = 80;
  int oversample = 4;

  void validate() const;
  /// s_N: 2^(N^2 + N/2) in paper mode (N even), 2^(2N) in desk mode.
  std::int64_t side_count(int N) const;
  double log2_side_count(int N) const;
  /// Symbol amplitude A_N = s_N^(-n/2) 2^(nN/4); 2^(-nN^2/2) in paper mode.
  double amplitude(int N) const;
  /// Test-function amplitude B_N = 2^(nN/2) s_N^(-n/2).
  double f_amplitude(int N) const;
  std::int64_t offset(int N) const;
  std::uint64_t seed(int N) const;
  /// Symbol spacing 2^(-N) / resolution.
  double spacing(int N) const;
  int symbol_radius(int N) const;
};

/// A_N sum_{j,k in I_N} epsilon_{j+k} psi(2^N xi - j) psi(2^N eta - k).
SymbolGrid counterexample_B_block(int N, const CounterexampleBConfig& cfg, std::uint64_t seed);
SymbolGrid counterexample_B_block(int N, const CounterexampleBConfig& cfg);

/// f^_N(xi) = B_N sum_{j in I_N} phi^(2^N xi - j); unit L2 norm.
SpectralVector test_function_B(int N, const CounterexampleBConfig& cfg);

/// ||F_N||_4^4 from coefficient arithmetic: A_N^4 s_N^{2n} 2^{-2nN} ||psi||_4^{8n},
/// with the axis integral from fine quadrature. In paper mode the power-of-two
/// factor is formed exactly.
double coefficient_l4_power(int N, const CounterexampleBConfig& cfg);

/// r(l) = card{j in I^n : l - j in I^n} for the interval I = [lo, hi].
struct RepresentationCounts {
  std::int64_t lo = 0;
  std::int64_t size = 0;
  int n = 1;
  std::vector<std::int64_t> r1;  // one axis: r1[t] = r(2 lo + t)

  std::int64_t at(std::span<const std::int64_t> l) const;
  std::int64_t sum_squares_1d() const;
  /// sum_l r(l)^2 over Z^n, equal to sum_squares_1d()^n.
  long double sum_squares() const;
};

RepresentationCounts count_representations(std::int64_t lo, std::int64_t hi, int n);

/// Double-loop count on one axis, for cross-checks.
std::vector<std::int64_t> count_representations_bruteforce(std::int64_t lo, std::int64_t hi);

/// M(2M^2 + 1)/3.
std::int64_t representation_closed_form(std::int64_t M);

nlohmann::json to_json(const CounterexampleAConfig& cfg);
CounterexampleAConfig config_A_from_json(const nlohmann::json& j);
nlohmann::json to_json(const CounterexampleBConfig& cfg);
CounterexampleBConfig config_B_from_json(const nlohmann::json& j);

}  // namespace bimult
