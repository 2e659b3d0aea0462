#ifndef ELASTOROUGH_ELASTIC_CORE_HPP
#define ELASTOROUGH_ELASTIC_CORE_HPP

#include <array>
#include <complex>
#include <optional>

namespace elastorough
{

using cplx = std::complex<double>;

//
// Lame constants and angular frequency of a homogeneous isotropic medium with unit
// mass density. Construct through validate_params().
//
struct ElasticParams
{
  double lambda = 1.0;
  double mu = 1.0;
  double omega = 1.0;
  double k_p = 0.0;  // omega / sqrt(lambda + 2 mu)
  double k_s = 0.0;  // omega / sqrt(mu)
};

// Throws ConstraintViolation naming the failed inequality.
ElasticParams validate_params(double lambda, double mu, double omega);

// sqrt(k^2 - |xi|^2) on the upward branch: real and nonnegative below the cutoff,
// i*sqrt(|xi|^2 - k^2) above it, and exactly 0 at |xi| = k.
cplx vertical_wavenumber(double k, std::array<double, 2> xi);
cplx vertical_wavenumber(double k, double xi_norm);

//
// Truncated strip geometry: the rough surface lives in the slab (m, M_sup) and the
// transparent boundary sits at height h.
//
struct StripGeometry
{
  double m = 0.0;
  double M_sup = 0.5;
  double h = 1.25;
  std::array<double, 2> cell = {4.0, 4.0};

  double aux_height() const { return h + 1.0; }
};

void validate_geometry(const StripGeometry &geom);

// Raises ConstraintViolation unless (M_sup - m) / gamma_gap < 1 with
// gamma_gap = h - sup f0.
void validate_gap_condition(const StripGeometry &geom, double sup_f0);

struct StabilityConstants
{
  double K = 0.0;    // Re(-iM) > 0 for |xi| > K omega
  double C_K = 0.0;  // max |M_ij| <= C_K omega for |xi| <= K omega
  double c_K = 0.0;  // |rho| >= c_K omega^2 on k_s <= |xi| <= K omega
};

StabilityConstants stability_constants(const ElasticParams &params);

//
// Explicit constants of the a priori estimate. Each carries the unspecified generic
// constant C (generic_C) as a factor. The total follows the squared-C5 form
//   total = (h - m + 2) (C4 + C5^2 + C6),
// while the stochastic bound uses the unsquared sum, see stochastic_factor().
//
// The sharper trace constant 4 mu^-1 (1 + L^2)^(1/2) (omega / sqrt(mu) (h - m) + 1) from the
// Rellich argument is not used; C1 is the simplified closed form that enters the bound.
//
struct BoundReport
{
  double C1 = 0.0, C2 = 0.0, C3 = 0.0, C4 = 0.0, C5 = 0.0, C6 = 0.0;
  double total_bound = 0.0;
  double generic_C = 1.0;
  std::optional<double> measured_ratio;
};

BoundReport bound_constants(const ElasticParams &params, const StripGeometry &geom,
                            double lipschitz, double generic_C = 1.0);

// (h - m + 2)^2 (C4 + C5 + C6)^2, the factor multiplying E||g||^2 in the ensemble bound.
double stochastic_factor(const BoundReport &bound, const StripGeometry &geom);

}  // namespace elastorough

#endif  // ELASTOROUGH_ELASTIC_CORE_HPP
