#pragma once

#include <functional>
#include <vector>

#include "bimult/bilinear.hpp"

namespace bimult {

/// Inhomogeneous dyadic family: phi_0 is radial, 1 on |w| <= 1 and 0 on
/// |w| >= 3/2; phi_k(w) = phi_0(2^-k w) - phi_0(2^{1-k} w).
struct LPFamily {
  double phi0(double r) const;
  double piece(int k, double r) const;
};

/// Lambda_k m: the grid is treated as one period of a torus of period (2F+1)h,
/// its DFT is multiplied by phi_k and transformed back (periodized convolution).
SymbolGrid littlewood_paley_piece(const SymbolGrid& m, int k);

/// Lambda_0 m, ..., Lambda_kMax m from a single forward transform.
std::vector<SymbolGrid> littlewood_paley_pieces(const SymbolGrid& m, int kMax);

/// ceil(log2(band)) + 2 where band = 1/(2h) is the Nyquist frequency of the grid.
int default_kmax(const SymbolGrid& m);

/// sum_{k <= kMax} 2^{nk/2} ||Lambda_k m||_{L^{4,inf}}; kMax < 0 selects default_kmax.
double besov_norm(const SymbolGrid& m, int kMax = -1);

/// ||(I - Delta)^{s/2} m||_{L^{4,inf}} with the multiplier (1 + 4 pi^2 |w|^2)^{s/2}.
double sobolev_weak_norm(const SymbolGrid& m, double s);

/// Applies a radial Fourier multiplier w -> mult(|w|) (w in cycles per unit)
/// to the dense grid.
SymbolGrid apply_radial_multiplier(const SymbolGrid& m, const std::function<double(double)>& mult);

}  // namespace bimult
