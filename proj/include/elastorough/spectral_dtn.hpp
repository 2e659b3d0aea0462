#ifndef ELASTOROUGH_SPECTRAL_DTN_HPP
#define ELASTOROUGH_SPECTRAL_DTN_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "elastorough/elastic_core.hpp"
#include "elastorough/spectral_grid.hpp"

namespace elastorough
{

using Vec3c = Eigen::Vector3cd;
using Mat3c = Eigen::Matrix3cd;

struct DecompositionMatrices
{
  Eigen::Matrix4cd D_tilde;
  Eigen::Matrix<cplx, 4, 3> D;  // first three columns of D_tilde^-1
};

// D is obtained by inverting D_tilde numerically; the closed form is only used in tests.
DecompositionMatrices decomposition_matrices(std::array<double, 2> xi, const ElasticParams &params);

struct DtnSymbol
{
  Mat3c M;
  std::array<double, 2> xi = {0.0, 0.0};
  cplx rho;  // |xi|^2 + beta gamma
  cplx beta, gamma;
};

DtnSymbol dtn_symbol(std::array<double, 2> xi, const ElasticParams &params);

// Upward extension matrices: u(t) = (M_p e^{i beta t} + M_s e^{i gamma t}) / rho * u(0).
void propagation_matrices(const DtnSymbol &sym, Mat3c &M_p, Mat3c &M_s);

//
// Angular-spectrum amplitudes of one mode. The field above the boundary is
//   A_p (xi, beta) e^{i beta t} + A_s e^{i gamma t},  A_s = (xi, gamma) x A_s_tilde.
//
struct ModeAmplitude
{
  cplx A_p{0.0, 0.0};
  Vec3c A_s = Vec3c::Zero();
  Vec3c A_s_tilde = Vec3c::Zero();
};

using ModeAmplitudes = std::vector<ModeAmplitude>;

// Displacement trace on the artificial boundary, stored as lattice coefficients.
struct BoundaryTrace
{
  SpectralGrid grid;
  std::vector<Vec3c> coefficients;

  // Values on the n1 x n2 collocation grid of the cell (exact round trip).
  std::vector<Vec3c> values() const;
  static BoundaryTrace from_values(const SpectralGrid &grid, const std::vector<Vec3c> &values);
};

// Cross product without conjugation; Eigen's cross() conjugates complex results.
Vec3c bilinear_cross(const Vec3c &a, const Vec3c &b);

ModeAmplitude decompose_mode(std::array<double, 2> xi, const Vec3c &u_hat, const ElasticParams &params);
ModeAmplitudes decompose_trace(const BoundaryTrace &trace, const ElasticParams &params);

// Boundary value rebuilt from amplitudes: A_p (xi, beta) + A_s.
Vec3c mode_boundary_value(std::array<double, 2> xi, const ModeAmplitude &amp,
                          const ElasticParams &params);

// Field at height x3 >= h on the n1 x n2 collocation grid.
std::vector<Vec3c> extend_field(const BoundaryTrace &trace, double h, double x3,
                                const ElasticParams &params);

// Traction on the plane x3 = h (normal e3) from differentiating the single-mode field.
Vec3c mode_traction(std::array<double, 2> xi, const ModeAmplitude &amp, const ElasticParams &params);

// Lattice coefficients of the traction i M(xi) u_hat.
BoundaryTrace apply_dtn(const BoundaryTrace &trace, const ElasticParams &params);

//
// Im of the boundary flux per unit cell, evaluated on the mode side:
//   omega^2 (sum_{|xi|<k_p} beta |A_p|^2 + sum_{|xi|<k_s} gamma |A_s_tilde|^2) |cell|.
//
double radiated_power(const BoundaryTrace &trace, const ElasticParams &params);

// Im sum_k conj(u_hat_k) . (i M_k u_hat_k) |cell|, evaluated from the symbol.
double boundary_flux(const BoundaryTrace &trace, const ElasticParams &params);

struct SymbolViolation
{
  std::string check;
  std::array<double, 2> xi;
  double value;
};

struct SymbolBoundsReport
{
  int n_samples = 0;
  double min_eig_outer = 0.0;    // min eigenvalue of Re(-iM) over Komega < |xi| <= 10 Komega
  double max_ratio_inner = 0.0;  // max |M_ij| / (C_K omega) over |xi| <= Komega
  double min_rho_band_ratio = 0.0;  // min |rho| / lower band bound over |xi| <= Komega
  double max_gap_ratio = 0.0;       // max |gamma - beta| / sqrt(k_s^2 - k_p^2)
  std::vector<SymbolViolation> violations;
};

SymbolBoundsReport verify_symbol_bounds(const ElasticParams &params, int n_samples, std::uint64_t seed,
                                      double slack = 1e-12);

}  // namespace elastorough

#endif  // ELASTOROUGH_SPECTRAL_DTN_HPP
