#ifndef ELASTOROUGH_DIAGNOSTICS_HPP
#define ELASTOROUGH_DIAGNOSTICS_HPP

#include <cstdint>
#include <functional>
#include <vector>

#include "elastorough/variational.hpp"

namespace elastorough
{

struct EnergyBalance
{
  double boundary_flux = 0.0;  // Im int_top conj(u) . T u
  double source_term = 0.0;    // Im int g . conj(u)
  double residual = 0.0;       // |flux - source| / max(|source|, 1e-14)
  double radiated_power = 0.0; // omega^2 (sum beta |A_p|^2 + sum gamma |A_s_tilde|^2) |cell|
  double power_mismatch = 0.0; // |power - flux| / max(|flux|, 1e-14)
};

EnergyBalance energy_balance(const DiscreteField &u, const LinearSystem &system);

// Throws InvariantViolation when residual > tol or power < -power_floor.
void require_energy_balance(const EnergyBalance &eb, double tol = 1e-8, double power_floor = 1e-12);

struct PoincareCheck
{
  double l2_sq = 0.0;    // ||u||^2
  double bound = 0.0;    // (h - z_b) ||d3 u||^2
  bool holds = true;
};

PoincareCheck poincare_check(const DiscreteField &u, double slack = 1e-12);

struct CoercivityReport
{
  double probe_min = 0.0;          // min Re B(v, v) / ||v||^2 over the probes
  double rayleigh_min = 0.0;       // smallest generalized eigenvalue over all modes
  double C0_estimate = 0.0;        // smallest C0 consistent with the probe set
  double predicted_lower = 0.0;    // mu / C0 - omega C0 C_K - omega^2 (h - z_b)
  int n_probes = 0;
};

// Probes on the flat strip of `mesh`: half white-noise fields, half smooth random fields.
CoercivityReport coercivity_probe(std::shared_ptr<const StripMesh> mesh, const ElasticParams &params, int n_probes,
                                  std::uint64_t seed);

// Lattice coefficients of the body force at height z.
using ModalSourceFn = std::function<std::vector<Vec3c>(double z)>;
ModalSourceFn modal_source(const SourceTerm &g, const SpectralGrid &grid);

enum class TopTraction
{
  Dtn,        // i M(xi) u, valid for solver output
  FromField,  // sigma(grad u) e3 with one-sided differences
};

struct RellichReport
{
  double volume = 0.0;   // 2 Re int (Lu + omega^2 u) . d3 conj(u)
  double top = 0.0;
  double bottom = 0.0;
  double residual = 0.0; // |volume - (top - bottom)| / scale
};

// Flat strips only: throws UnsupportedConfiguration when `map` is not the identity.
RellichReport rellich_residual(const DiscreteField &u, const ModalSourceFn &g, const ElasticParams &params,
                               const StripMap &map, TopTraction top = TopTraction::Dtn);

}  // namespace elastorough

#endif  // ELASTOROUGH_DIAGNOSTICS_HPP
