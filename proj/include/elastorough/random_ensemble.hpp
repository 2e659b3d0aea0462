#ifndef ELASTOROUGH_RANDOM_ENSEMBLE_HPP
#define ELASTOROUGH_RANDOM_ENSEMBLE_HPP

#include <array>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "elastorough/elastic_core.hpp"
#include "elastorough/geometry.hpp"

namespace elastorough
{

//
// amp * exp(i xi_j . y') * G(y3), G a Gaussian of the given center and width multiplied by
// the taper (4 (t - lo)(hi - t) / (hi - lo)^2)^3 on (lo, hi) and zero outside. The taper
// makes G twice continuously differentiable.
//
struct SourceBump
{
  int j1 = 0, j2 = 0;
  Eigen::Vector3cd amp = Eigen::Vector3cd::Zero();
  double center = 0.75;
  double width = 0.15;
  double lo = 0.4;
  double hi = 1.1;

  double profile(double t) const;
  double profile_derivative(double t) const;
  double profile_second_derivative(double t) const;
};

// Body force defined in reference-strip coordinates.
struct SourceTerm
{
  std::array<double, 2> cell = {4.0, 4.0};
  std::vector<SourceBump> bumps;

  Eigen::Vector3cd value(const Eigen::Vector3d &y) const;
  // grad(i, c) = d g_c / d y_i
  Eigen::Matrix3cd gradient(const Eigen::Vector3d &y) const;
  bool is_zero() const;
  double support_low() const;
  double support_high() const;
};

// Rejects sources whose vertical support is not strictly inside (sup f0, h).
void validate_source(const SourceTerm &g, double sup_f0, double h);

//
// Uniform law for the surface perturbation and the source amplitudes:
//   f = f0 + sum_j (a_j cos + b_j sin)(xi_j . x'),  a_j, b_j ~ U[-s_j, s_j]
// and each template bump gets amplitude amp_scale * (U[-1,1] + i U[-1,1]) per component.
//
struct PerturbationMode
{
  int j1 = 0, j2 = 0;
  double scale = 0.0;
};

struct EnsembleLaw
{
  std::vector<PerturbationMode> modes;
  double M0 = 0.1;
  std::vector<SourceBump> source_templates;
  double amp_scale = 1.0;
  int max_retries = 100;
};

// sum_j 2 s_j (1 + |xi_j|): worst case of ||f - f0||_{1,inf} on the law's support.
double law_worst_case(const EnsembleLaw &law, std::array<double, 2> cell);

struct RandomSample
{
  SurfaceProfile surface;
  SourceTerm source;
  std::uint64_t sample_id = 0;
  std::uint64_t stream = 0;
  int rejections = 0;
  double distance_to_reference = 0.0;  // ||f - f0||_{1,inf}
};

RandomSample sample_one(std::uint64_t seed, std::uint64_t sample_id, const EnsembleLaw &law,
                        const StripGeometry &geom, const SurfaceProfile &f0,
                        std::array<int, 2> solver_points = {16, 16});

std::vector<RandomSample> sample_ensemble(std::uint64_t seed, int n, const EnsembleLaw &law,
                                          const StripGeometry &geom, const SurfaceProfile &f0,
                                          std::array<int, 2> solver_points = {16, 16});

}  // namespace elastorough

#endif  // ELASTOROUGH_RANDOM_ENSEMBLE_HPP
