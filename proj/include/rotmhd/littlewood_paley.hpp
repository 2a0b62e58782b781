// Anisotropic Littlewood-Paley calculus: dyadic blocks in the horizontal and
// vertical frequency variables, the dyadic Sobolev norm, vertical Bony
// paraproducts, and an empirical harness for Bernstein, product and energy
// inequalities.
//
// Block q >= 0 uses the multiplier phi(|xi_dir| / 2^q), block -1 uses
// psi(|xi_dir|), with psi = 1 on [0, 3/4], psi = 0 beyond 4/3 and
// phi(z) = psi(z/2) - psi(z).
#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "rotmhd/field.hpp"

namespace rotmhd {

double lp_low(double z);   // psi
double lp_ring(double z);  // phi

enum class Direction { horizontal, vertical };

// Multiplier of block q (q >= -1; zero for q <= -2).
double block_multiplier(double z, int q);
// Multiplier of S_q = sum_{q' <= q-1} Delta_{q'}, i.e. psi(z / 2^q) for q >= 0.
double low_pass_multiplier(double z, int q);

// Largest q whose block can be nonzero on the grid.
int max_block(const Grid& g, Direction d);

SpectralField dyadic_block(const SpectralField& u, int q, Direction d);
SpectralField low_pass(const SpectralField& u, int q, Direction d);

// ||Delta_q^v u||^2_{L^2} for q = -1 .. max_block (index q + 1).
std::vector<double> vertical_block_energies(const SpectralField& u);

struct DyadicLadder {
  int j_max = 0;
  int q_max = 0;
  std::map<std::pair<int, int>, SpectralField> blocks;  // (j, q)
  std::map<std::pair<int, int>, double> block_norms;
  SpectralField reconstruct() const;
};

DyadicLadder build_ladder(const SpectralField& u, bool keep_blocks = true);

// (sum_{j,q} 2^{2(j s1 + q s2)} ||Delta^h_j Delta^v_q u||^2)^{1/2}.
double dyadic_sobolev_norm(const SpectralField& u, double sigma_h, double sigma_v);

// Isotropic inhomogeneous Sobolev norm with weight (1 + |xi|^2)^sigma.
double iso_sobolev_norm(const SpectralField& u, double sigma);

// Vertical paraproduct split of the scalar product a_i * b_j:
// T(a,b) = sum_q S_{q-1} a Delta_q b, T(b,a) likewise, R = sum_{|q-q'|<=1}.
struct BonyParts {
  std::vector<cplx> t_ab;
  std::vector<cplx> t_ba;
  std::vector<cplx> remainder;
  std::vector<cplx> product;  // dealiased a_i b_j
};
BonyParts bony_decompose(const SpectralField& a, int i, const SpectralField& b, int j);

enum class BernsteinMode { isotropic, horizontal, vertical };

struct BernsteinReport {
  double lhs = 0.0;       // ||d^k u||_{L^q}
  double rhs_band = 0.0;  // lambda^{k + d(1/p - 1/q)} ||u||_{L^p}
  double ratio = 0.0;
};

// Derivative of order k along x1 (x3 for the vertical mode); mixed norms
// L^q_h L^q_v, L^q_h L^2_v or L^2_h L^q_v with dimension 3, 2 or 1.
BernsteinReport check_bernstein(const SpectralField& u, int k, double p, double q,
                                BernsteinMode mode, double lambda);

enum class ProductLaw { isotropic, anisotropic, vertical };

struct ProductExponents {
  // isotropic: s, t.  anisotropic: (s, s') and (t, t').
  // vertical: sigma = s, sigma' = t, s0 = s_v, s1 = t_v.
  double s = 0.0, t = 0.0;
  double s_v = 0.0, t_v = 0.0;
};

struct ProductReport {
  double lhs_norm = 0.0;
  double rhs_product = 0.0;
  double empirical_C = 0.0;
};

// Scalar fields are taken from component 0 of u and v.  Throws
// ParameterError naming the violated hypothesis.
ProductReport check_product_law(const SpectralField& u, const SpectralField& v,
                                ProductLaw law, const ProductExponents& e);

// regular: s1 >= s0.  rough: s1 < s0 with s0 + s1 > 0.
enum class EnergyLemma { advection_regular, symmetric_regular, advection_rough, symmetric_rough };

struct EnergyReport {
  std::vector<int> q;
  std::vector<double> lhs;     // per-block bracket
  std::vector<double> rhs;     // 2^{-2 q s1} times the norm product
  std::vector<double> ratio;   // empirical d_q C
  double ratio_sum = 0.0;
  double advection_bracket = 0.0;  // <u.grad v, v>
  double symmetric_bracket = 0.0;  // <u.grad v, w> + <u.grad w, v>
  double scale = 0.0;              // natural scale of the two brackets
};

EnergyReport check_energy_lemma(const SpectralField& u, const SpectralField& v,
                                const SpectralField& w, EnergyLemma lemma,
                                double s0, double s1, int q_max);

}  // namespace rotmhd
