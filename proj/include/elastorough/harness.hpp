#ifndef ELASTOROUGH_HARNESS_HPP
#define ELASTOROUGH_HARNESS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "elastorough/config.hpp"
#include "elastorough/diagnostics.hpp"

namespace elastorough
{

struct RunReport
{
  RunConfig config;
  double u_norm = 0.0;  // ||u||_{V_h} over the physical strip
  double g_l2 = 0.0;
  double g_h1 = 0.0;
  double lipschitz = 0.0;
  BoundReport bound;  // measured_ratio uses g_h1
  EnergyBalance energy;
  PoincareCheck poincare;
  SolveStats solve;
  Eigen::Index unknowns = 0;
  std::string invariant_failure;  // empty when every diagnostic passed
  double wall_seconds = 0.0;
};

// Surface used by deterministic runs: f0 plus the configured perturbation.
ProfileSpec configured_surface(const RunConfig &cfg);

// Box bottom shared by every run of a configuration.
double box_bottom(const RunConfig &cfg);

std::shared_ptr<const StripMesh> make_run_mesh(const RunConfig &cfg);

//
// One solve on the strip above f0 + perturbation with the configured source, plus the bound
// constants and the diagnostics. A failed diagnostic is recorded in invariant_failure and
// the report is still returned.
//
RunReport deterministic_run(const RunConfig &cfg);

enum class SweepAxis
{
  Omega,
  H,
  LAmplitude,
};

SweepAxis parse_sweep_axis(const std::string &name);
std::string sweep_axis_name(SweepAxis axis);

struct SweepPoint
{
  double value = 0.0;
  std::optional<RunReport> report;
  std::string error;  // set when the point failed
};

struct SweepTable
{
  SweepAxis axis = SweepAxis::Omega;
  std::vector<SweepPoint> points;
};

// The configuration of one sweep point; L_amplitude scales the perturbation coefficients.
RunConfig sweep_point_config(const RunConfig &cfg, SweepAxis axis, double value);

SweepTable parameter_sweep(const RunConfig &cfg, SweepAxis axis, const std::vector<double> &values);

struct McSample
{
  std::uint64_t sample_id = 0;
  bool ok = false;
  std::string error;
  double u_h1_sq = 0.0;  // ||u~||^2_{H1} on the reference strip
  double g_h1_sq = 0.0;
  int iterations = 0;
  double relative_residual = 0.0;
  double energy_residual = 0.0;
  double distance_to_reference = 0.0;
  int rejections = 0;
};

struct McReport
{
  RunConfig config;
  int n_samples = 0;
  int n_completed = 0;
  double completeness = 0.0;
  std::uint64_t seed = 0;
  double mean_u_sq = 0.0;
  double mean_g_sq = 0.0;
  double stderr_u_sq = 0.0;
  double stderr_g_sq = 0.0;
  double L0 = 0.0;  // M0 + Lipschitz constant of f0
  BoundReport bound;
  double stochastic_factor = 0.0;
  double ratio = 0.0;  // mean_u_sq / (stochastic_factor * mean_g_sq)
  std::vector<McSample> samples;
  double wall_seconds = 0.0;
};

EnsembleLaw configured_law(const RunConfig &cfg);

// Cutoff of the transform: gamma_gap = h - sup f0.
CutoffFn configured_cutoff(const RunConfig &cfg, const SurfaceProfile &f0);

McReport monte_carlo(const RunConfig &cfg, int n, std::uint64_t seed);

struct PushforwardLevel
{
  int Nz = 0;
  double difference = 0.0;  // ||u_A - u_B o H||_{V_h} / ||u_A||_{V_h}
  double u_norm = 0.0;
};

struct PushforwardReport
{
  std::vector<PushforwardLevel> levels;
  std::vector<double> orders;  // log2 ratios between consecutive levels
  double sample_distance = 0.0;
};

//
// Solves the transformed problem on the reference strip (path A) and the problem with the
// sample surface installed directly (path B, source pulled through the inverse transform),
// compares them on the box of path A at cfg.Nz.
//
double pushforward_check(const RandomSample &sample, const RunConfig &cfg);

PushforwardReport pushforward_study(const RandomSample &sample, const RunConfig &cfg, const std::vector<int> &Nz);

}  // namespace elastorough

#endif  // ELASTOROUGH_HARNESS_HPP
