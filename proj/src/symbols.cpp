#include "bimult/symbols.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bimult/error.hpp"
#include "bimult/fft.hpp"
#include "bimult/rng.hpp"

namespace bimult {
namespace {

std::int64_t max_shell(const CoeffMatrix& c) {
  std::int64_t s = 0;
  for (const auto& e : c.entries()) s = std::max({s, std::abs(e.cell.k), std::abs(e.cell.l)});
  return s;
}

int template_half(const BumpSpec& psi, int resolution) {
  return static_cast<int>(bump_samples_1d(psi, 1.0 / resolution).size() / 2);
}

void check_lattice_bump(const BumpSpec& psi, int resolution) {
  psi.validate();
  if (psi.radius > 0.1 + 1e-12) throw InvalidArgument("lattice bump radius must not exceed 1/10");
  if (resolution < 1) throw InvalidArgument("resolution must be >= 1");
}

}  // namespace

SpectralVector bump_train(const BumpSpec& phi, int resolution, double spacing, int radius, int oversample,
                          std::span<const std::int64_t> centers, std::span<const cplx> amplitudes) {
  if (centers.size() != amplitudes.size()) throw DimensionMismatch("bump_train: one amplitude per center");
  FrequencyBox box{1, radius, oversample, 1.0 / spacing};
  SpectralVector out(box);
  const auto tmpl = bump_samples_1d(phi, 1.0 / resolution);
  const auto half = static_cast<std::int64_t>(tmpl.size() / 2);
  const double scale = spacing * bump_scale(phi, 1, 1.0 / resolution);
  auto values = out.values();
  for (std::size_t c = 0; c < centers.size(); ++c) {
    const std::int64_t center = centers[c] * resolution;
    if (std::abs(center) + half > radius) throw BandLimitExceeded("bump_train: bump exceeds the box");
    for (std::int64_t a = -half; a <= half; ++a)
      values[static_cast<std::size_t>(center + a + radius)] += amplitudes[c] * (scale * tmpl[static_cast<std::size_t>(a + half)]);
  }
  return out;
}

int bump_train_radius(const BumpSpec& phi, int resolution, std::int64_t R) {
  return static_cast<int>(R * resolution + template_half(phi, resolution));
}

int lattice_symbol_radius(const CoeffMatrix& c, const BumpSpec& psi, int resolution) {
  check_lattice_bump(psi, resolution);
  const std::int64_t r = max_shell(c) * resolution + template_half(psi, resolution);
  if (r > std::numeric_limits<int>::max() / 4) throw InvalidArgument("lattice_symbol: box too large");
  return static_cast<int>(r);
}

SymbolGrid lattice_symbol(const CoeffMatrix& c, const BumpSpec& psi, int resolution, double spacing, int radius) {
  check_lattice_bump(psi, resolution);
  if (spacing == 0.0) spacing = 1.0 / resolution;
  const int needed = lattice_symbol_radius(c, psi, resolution);
  if (radius == 0) radius = needed;
  if (radius < needed) throw BandLimitExceeded("lattice_symbol: requested radius too small for the bumps");

  const auto tmpl = bump_samples_1d(psi, 1.0 / resolution);
  const auto half = static_cast<std::int64_t>(tmpl.size() / 2);
  const double scale = bump_scale(psi, 2, 1.0 / resolution);
  const std::int64_t side = 2 * static_cast<std::int64_t>(radius) + 1;

  std::vector<SymbolEntry> entries;
  entries.reserve(c.size() * tmpl.size() * tmpl.size());
  for (const auto& e : c.entries()) {
    if (e.value == cplx{}) continue;
    const std::int64_t ck = e.cell.k * resolution + radius, cl = e.cell.l * resolution + radius;
    for (std::int64_t a = -half; a <= half; ++a) {
      const double ta = tmpl[static_cast<std::size_t>(a + half)];
      for (std::int64_t b = -half; b <= half; ++b) {
        const double v = ta * tmpl[static_cast<std::size_t>(b + half)];
        if (v == 0.0) continue;
        entries.push_back({(ck + a) * side + (cl + b), e.value * (scale * v)});
      }
    }
  }
  nlohmann::json prov = {{"generator", "lattice_symbol"},
                         {"psi", to_json(psi)},
                         {"resolution", resolution},
                         {"coefficients", c.size()}};
  return SymbolGrid(1, radius, spacing, std::move(entries), std::move(prov));
}

std::int64_t ShellSequence::rank(Cell c) {
  const std::int64_t s = std::max(std::abs(c.k), std::abs(c.l));
  if (s == 0) return 1;
  const std::int64_t before = (2 * s - 1) * (2 * s - 1);
  std::int64_t pos;
  if (c.k == -s)
    pos = c.l + s;
  else if (c.k < s)
    pos = (2 * s + 1) + 2 * (c.k + s - 1) + (c.l == s ? 1 : 0);
  else
    pos = (2 * s + 1) + 2 * (2 * s - 1) + c.l + s;
  return before + pos + 1;
}

ShellSequence ShellSequence::from_rearrangement(const std::function<double(double)>& dstar, std::int64_t M) {
  if (M < 0) throw InvalidArgument("ShellSequence: box must be >= 0");
  ShellSequence out;
  out.box_ = M;
  const std::int64_t cells = (2 * M + 1) * (2 * M + 1);
  out.values_.resize(static_cast<std::size_t>(cells));
  double prev = std::numeric_limits<double>::infinity();
  for (std::int64_t j = 1; j <= cells; ++j) {
    const double v = dstar(static_cast<double>(j));
    if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidArgument("ShellSequence: d* must be finite and >= 0");
    if (v > prev) throw InvalidArgument("ShellSequence: d* must be non-increasing");
    out.values_[static_cast<std::size_t>(j - 1)] = prev = v;
  }
  return out;
}

double ShellSequence::at(Cell c) const {
  if (std::max(std::abs(c.k), std::abs(c.l)) > box_) return 0.0;
  return values_[static_cast<std::size_t>(rank(c) - 1)];
}

CoeffMatrix ShellSequence::coefficients() const {
  std::vector<CoeffEntry> entries;
  for (std::int64_t k = -box_; k <= box_; ++k)
    for (std::int64_t l = -box_; l <= box_; ++l) {
      const double v = at({k, l});
      if (v != 0.0) entries.push_back({{k, l}, v});
    }
  return CoeffMatrix(std::move(entries));
}

ShellSequence make_shell_sequence(const std::function<double(double)>& mu, std::int64_t M) {
  double prev = mu(1.0 / 1024);
  for (int i = 2; i < 1024; ++i) {
    const double v = mu(i / 1024.0);
    if (v > prev * (1 + 1e-12)) throw InvalidArgument("make_shell_sequence: mu must be non-increasing");
    prev = v;
  }
  auto dstar = [&mu](double j) {
    const double lo_probe = 1e-300;
    if (!(mu(lo_probe) >= j)) return 0.0;
    const double hi_probe = std::nextafter(1.0, 0.0);
    if (mu(hi_probe) >= j) return 1.0;
    double lo = lo_probe, hi = hi_probe;  // mu(lo) >= j > mu(hi)
    for (int it = 0; it < 200 && hi - lo > 1e-17 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      (mu(mid) >= j ? lo : hi) = mid;
    }
    return lo;
  };
  return ShellSequence::from_rearrangement(dstar, M);
}

int SignAssignment::operator()(std::int64_t l) const { return rademacher(seed, l); }

void CounterexampleAConfig::validate() const {
  if (!(d_exponent > 0.0)) throw InvalidArgument("counterexample A: d_exponent must be positive");
  if (blocks.empty()) throw InvalidArgument("counterexample A: at least one block required");
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    if (blocks[i] < 1) throw InvalidArgument("counterexample A: b_K must be >= 1");
    if (i > 0 && blocks[i] <= 2 * blocks[i - 1]) throw InvalidArgument("counterexample A: overlapping blocks (need b_{K+1} > 2 b_K)");
  }
  if (!seeds.empty() && seeds.size() != blocks.size()) throw InvalidArgument("counterexample A: one seed per block");
  if (box != 0 && box < 2 * blocks.back() - 1) throw InvalidArgument("counterexample A: box too small for the blocks");
  phi.validate();
  if (phi.radius >= 0.5) throw InvalidArgument("counterexample A: phi radius must be < 1/2");
  check_lattice_bump(psi, resolution);
  if (oversample < 2) throw InvalidArgument("counterexample A: oversample must be >= 2");
}

std::int64_t CounterexampleAConfig::shell_box() const { return box != 0 ? box : 2 * blocks.back(); }

double CounterexampleAConfig::dstar(double t) const { return std::pow(t, -d_exponent); }

double CounterexampleAConfig::rho(int K) const {
  const double b = static_cast<double>(blocks.at(static_cast<std::size_t>(K - 1)));
  return (4 * b) * (4 * b);
}

int CounterexampleAConfig::symbol_radius() const {
  const std::int64_t M = shell_box();
  const int psi_half = template_half(psi, resolution);
  const int phi_half = template_half(phi, resolution);
  const std::int64_t r = std::max(M * resolution + psi_half, (2 * blocks.back() - 1) * resolution + phi_half);
  return static_cast<int>(r);
}

ShellSequence shell_sequence(const CounterexampleAConfig& cfg) {
  cfg.validate();
  const double e = cfg.d_exponent;
  return ShellSequence::from_rearrangement([e](double t) { return std::pow(t, -e); }, cfg.shell_box());
}

CoeffMatrix counterexample_A_block(const CounterexampleAConfig& cfg, int K, std::uint64_t seed) {
  cfg.validate();
  const std::int64_t b = cfg.blocks.at(static_cast<std::size_t>(K - 1));
  const SignAssignment eps{seed};
  std::vector<CoeffEntry> entries;
  for (std::int64_t j = b; j < 2 * b; ++j)
    for (std::int64_t k = b; k < 2 * b; ++k) {
      const double d = std::pow(static_cast<double>(ShellSequence::rank({j, k})), -cfg.d_exponent);
      entries.push_back({{j, k}, static_cast<double>(eps(j + k)) * d});
    }
  return CoeffMatrix(std::move(entries));
}

CoeffMatrix counterexample_A(const CounterexampleAConfig& cfg) {
  const auto d = shell_sequence(cfg);
  std::vector<CoeffEntry> entries;
  const std::int64_t M = d.box();
  for (std::int64_t j = -M; j <= M; ++j)
    for (std::int64_t k = -M; k <= M; ++k) {
      double v = d.at({j, k});
      for (std::size_t K = 0; K < cfg.blocks.size(); ++K) {
        const std::int64_t b = cfg.blocks[K];
        if (j >= b && j < 2 * b && k >= b && k < 2 * b) {
          const std::uint64_t seed = cfg.seeds.empty() ? derive_seed(0, K + 1) : cfg.seeds[K];
          v *= SignAssignment{seed}(j + k);
        }
      }
      if (v != 0.0) entries.push_back({{j, k}, v});
    }
  return CoeffMatrix(std::move(entries));
}

SymbolGrid counterexample_A_symbol(const CounterexampleAConfig& cfg, const CoeffMatrix& c) {
  cfg.validate();
  auto m = lattice_symbol(c, cfg.psi, cfg.resolution, 1.0 / cfg.resolution, cfg.symbol_radius());
  m.set_provenance({{"generator", "counterexample_A"}, {"config", to_json(cfg)}});
  return m;
}

SpectralVector test_function_A(int K, const CounterexampleAConfig& cfg) {
  cfg.validate();
  const std::int64_t b = cfg.blocks.at(static_cast<std::size_t>(K - 1));
  std::vector<std::int64_t> centers;
  for (std::int64_t j = b; j < 2 * b; ++j) centers.push_back(j);
  const std::vector<cplx> amps(centers.size(), 1.0);
  return bump_train(cfg.phi, cfg.resolution, 1.0 / cfg.resolution, cfg.symbol_radius(), cfg.oversample, centers, amps);
}

void CounterexampleBConfig::validate() const {
  if (n != 1) throw InvalidArgument("counterexample B: only n = 1 is materialized");
  if (Ns.empty()) throw InvalidArgument("counterexample B: at least one N required");
  for (std::size_t i = 0; i < Ns.size(); ++i) {
    if (Ns[i] < 1) throw InvalidArgument("counterexample B: N must be >= 1");
    if (i > 0 && Ns[i] <= Ns[i - 1]) throw InvalidArgument("counterexample B: N list must be increasing");
    if (mode == ScheduleMode::Paper && Ns[i] % 2 != 0) throw InvalidArgument("counterexample B: paper mode needs even N");
  }
  if (!offsets.empty() && offsets.size() != Ns.size()) throw InvalidArgument("counterexample B: one offset per N");
  if (!seeds.empty() && seeds.size() != Ns.size()) throw InvalidArgument("counterexample B: one seed per N");
  check_lattice_bump(psi, resolution);
  phi.validate();
  if (phi.radius > psi.plateau + 1e-12)
    throw InvalidArgument("counterexample B: phi support must lie inside the psi plateau");
  if (oversample < 2) throw InvalidArgument("counterexample B: oversample must be >= 2");
  // Block supports in xi: [(b_N - r) 2^-N, (b_N + s_N - 1 + r) 2^-N].
  double prev_end = -std::numeric_limits<double>::infinity();
  for (int N : Ns) {
    const double scale = std::ldexp(1.0, -N);
    const double begin = (static_cast<double>(offset(N)) - psi.radius) * scale;
    const double end = (static_cast<double>(offset(N) + side_count(N) - 1) + psi.radius) * scale;
    if (begin <= prev_end) throw InvalidArgument("counterexample B: block supports are not disjoint");
    prev_end = end;
  }
}

double CounterexampleBConfig::log2_side_count(int N) const {
  return mode == ScheduleMode::Paper ? N * N + N / 2.0 : 2.0 * N;
}

std::int64_t CounterexampleBConfig::side_count(int N) const {
  const double e = log2_side_count(N);
  if (e != std::floor(e)) throw InvalidArgument("counterexample B: paper mode needs even N");
  if (e > 62) throw InvalidArgument("counterexample B: block side count overflows");
  return std::int64_t{1} << static_cast<int>(e);
}

double CounterexampleBConfig::amplitude(int N) const {
  return std::exp2(-n * log2_side_count(N) / 2.0 + n * N / 4.0);
}

double CounterexampleBConfig::f_amplitude(int N) const {
  return std::exp2(n * N / 2.0 - n * log2_side_count(N) / 2.0);
}

std::int64_t CounterexampleBConfig::offset(int N) const {
  auto it = std::find(Ns.begin(), Ns.end(), N);
  if (it == Ns.end()) throw InvalidArgument("counterexample B: N not in the schedule");
  const auto idx = static_cast<std::size_t>(it - Ns.begin());
  if (!offsets.empty()) return offsets[idx];
  // Each block starts one unit (in xi) after the previous block's support ends.
  std::int64_t b = 1;
  double prev_end = 0.0;
  for (std::size_t i = 0; i <= idx; ++i) {
    const int Ni = Ns[i];
    if (i > 0) b = static_cast<std::int64_t>(std::ceil(std::ldexp(prev_end + 1.0, Ni)));
    prev_end = (static_cast<double>(b + side_count(Ni) - 1) + psi.radius) * std::ldexp(1.0, -Ni);
  }
  return b;
}

std::uint64_t CounterexampleBConfig::seed(int N) const {
  auto it = std::find(Ns.begin(), Ns.end(), N);
  if (it == Ns.end()) throw InvalidArgument("counterexample B: N not in the schedule");
  if (seeds.empty()) return derive_seed(0, static_cast<std::uint64_t>(N));
  return seeds[static_cast<std::size_t>(it - Ns.begin())];
}

double CounterexampleBConfig::spacing(int N) const { return std::ldexp(1.0, -N) / resolution; }

int CounterexampleBConfig::symbol_radius(int N) const {
  const std::int64_t r = (offset(N) + side_count(N) - 1) * resolution + template_half(psi, resolution);
  if (r > std::numeric_limits<int>::max() / 4) throw InvalidArgument("counterexample B: block too large to materialize");
  return static_cast<int>(r);
}

SymbolGrid counterexample_B_block(int N, const CounterexampleBConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  const std::int64_t b = cfg.offset(N), s = cfg.side_count(N);
  const double A = cfg.amplitude(N);
  const SignAssignment eps{seed};
  std::vector<CoeffEntry> coeffs;
  coeffs.reserve(static_cast<std::size_t>(s * s));
  for (std::int64_t j = b; j < b + s; ++j)
    for (std::int64_t k = b; k < b + s; ++k) coeffs.push_back({{j, k}, A * eps(j + k)});
  auto m = lattice_symbol(CoeffMatrix(std::move(coeffs)), cfg.psi, cfg.resolution, cfg.spacing(N),
                          cfg.symbol_radius(N));
  m.set_provenance({{"generator", "counterexample_B_block"}, {"N", N}, {"seed", seed}, {"config", to_json(cfg)}});
  return m;
}

SymbolGrid counterexample_B_block(int N, const CounterexampleBConfig& cfg) {
  return counterexample_B_block(N, cfg, cfg.seed(N));
}

SpectralVector test_function_B(int N, const CounterexampleBConfig& cfg) {
  cfg.validate();
  std::vector<std::int64_t> centers;
  for (std::int64_t j = cfg.offset(N); j < cfg.offset(N) + cfg.side_count(N); ++j) centers.push_back(j);
  const std::vector<cplx> amps(centers.size(), cfg.f_amplitude(N));
  return bump_train(cfg.phi, cfg.resolution, cfg.spacing(N), cfg.symbol_radius(N), cfg.oversample, centers, amps);
}

double coefficient_l4_power(int N, const CounterexampleBConfig& cfg) {
  const double A = cfg.amplitude(N);
  const double s = std::exp2(cfg.log2_side_count(N));
  const double axis = bump_axis_lp_power(cfg.psi, 4.0);
  const int n = cfg.n;
  // |A|^4 per coefficient, s^{2n} coefficients, dilation by 2^N on 2n axes.
  const double dyadic = std::pow(A, 4) * std::pow(s, 2 * n) * std::ldexp(1.0, -2 * n * N);
  return dyadic * std::pow(axis, 2 * n);
}

std::int64_t RepresentationCounts::at(std::span<const std::int64_t> l) const {
  if (static_cast<int>(l.size()) != n) throw DimensionMismatch("RepresentationCounts: wrong dimension");
  std::int64_t r = 1;
  for (std::int64_t c : l) {
    const std::int64_t t = c - 2 * lo;
    if (t < 0 || t >= static_cast<std::int64_t>(r1.size())) return 0;
    r *= r1[static_cast<std::size_t>(t)];
  }
  return r;
}

std::int64_t RepresentationCounts::sum_squares_1d() const {
  std::int64_t s = 0;
  for (std::int64_t v : r1) s += v * v;
  return s;
}

long double RepresentationCounts::sum_squares() const {
  return std::pow(static_cast<long double>(sum_squares_1d()), n);
}

RepresentationCounts count_representations(std::int64_t lo, std::int64_t hi, int n) {
  if (hi < lo) throw InvalidArgument("count_representations: empty interval");
  if (n < 1) throw InvalidArgument("count_representations: n must be >= 1");
  RepresentationCounts out;
  out.lo = lo;
  out.size = hi - lo + 1;
  out.n = n;
  const std::vector<long long> indicator(static_cast<std::size_t>(out.size), 1);
  const auto conv = integer_convolution(indicator, indicator);
  out.r1.assign(conv.begin(), conv.end());
  return out;
}

std::vector<std::int64_t> count_representations_bruteforce(std::int64_t lo, std::int64_t hi) {
  if (hi < lo) throw InvalidArgument("count_representations: empty interval");
  std::vector<std::int64_t> r(static_cast<std::size_t>(2 * (hi - lo) + 1), 0);
  for (std::int64_t l = 2 * lo; l <= 2 * hi; ++l)
    for (std::int64_t j = lo; j <= hi; ++j)
      if (l - j >= lo && l - j <= hi) ++r[static_cast<std::size_t>(l - 2 * lo)];
  return r;
}

std::int64_t representation_closed_form(std::int64_t M) { return M * (2 * M * M + 1) / 3; }

nlohmann::json to_json(const CounterexampleAConfig& cfg) {
  return {{"construction", "A"},     {"d_exponent", cfg.d_exponent}, {"blocks", cfg.blocks},
          {"seeds", cfg.seeds},      {"psi", to_json(cfg.psi)},      {"phi", to_json(cfg.phi)},
          {"resolution", cfg.resolution}, {"oversample", cfg.oversample}, {"box", cfg.box}};
}

CounterexampleAConfig config_A_from_json(const nlohmann::json& j) {
  try {
    CounterexampleAConfig cfg;
    if (j.contains("construction") && j.at("construction") != "A") throw SchemaError("config: construction must be \"A\"");
    cfg.d_exponent = j.value("d_exponent", cfg.d_exponent);
    cfg.blocks = j.at("blocks").get<std::vector<std::int64_t>>();
    cfg.seeds = j.value("seeds", std::vector<std::uint64_t>{});
    if (j.contains("psi")) cfg.psi = bump_from_json(j.at("psi"));
    if (j.contains("phi")) cfg.phi = bump_from_json(j.at("phi"));
    cfg.resolution = j.value("resolution", cfg.resolution);
    cfg.oversample = j.value("oversample", cfg.oversample);
    cfg.box = j.value("box", cfg.box);
    cfg.validate();
    return cfg;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("counterexample A config: ") + e.what());
  }
}

nlohmann::json to_json(const CounterexampleBConfig& cfg) {
  return {{"construction", "B"},
          {"mode", cfg.mode == ScheduleMode::Paper ? "paper" : "desk"},
          {"n", cfg.n},
          {"N", cfg.Ns},
          {"offsets", cfg.offsets},
          {"seeds", cfg.seeds},
          {"psi", to_json(cfg.psi)},
          {"phi", to_json(cfg.phi)},
          {"resolution", cfg.resolution},
          {"oversample", cfg.oversample}};
}

CounterexampleBConfig config_B_from_json(const nlohmann::json& j) {
  try {
    CounterexampleBConfig cfg;
    if (j.contains("construction") && j.at("construction") != "B") throw SchemaError("config: construction must be \"B\"");
    const auto mode = j.value("mode", std::string("desk"));
    if (mode != "paper" && mode != "desk") throw SchemaError("config: mode must be \"paper\" or \"desk\"");
    cfg.mode = mode == "paper" ? ScheduleMode::Paper : ScheduleMode::Desk;
    cfg.n = j.value("n", 1);
    if (j.contains("N")) cfg.Ns = j.at("N").get<std::vector<int>>();
    cfg.offsets = j.value("offsets", std::vector<std::int64_t>{});
    cfg.seeds = j.value("seeds", std::vector<std::uint64_t>{});
    if (j.contains("psi")) cfg.psi = bump_from_json(j.at("psi"));
    if (j.contains("phi")) cfg.phi = bump_from_json(j.at("phi"));
    cfg.resolution = j.value("resolution", cfg.resolution);
    cfg.oversample = j.value("oversample", cfg.oversample);
    cfg.validate();
    return cfg;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("counterexample B config: ") + e.what());
  }
}

}  // namespace bimult
