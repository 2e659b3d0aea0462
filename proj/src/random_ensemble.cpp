#include "elastorough/random_ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/core.h>

#include "elastorough/errors.hpp"
#include "elastorough/rng.hpp"

namespace elastorough
{

namespace
{

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct ProfileParts
{
  double e, de, d2e, T, dT, d2T;
};

ProfileParts parts(const SourceBump &b, double t)
{
  const double w2 = b.width * b.width, s = t - b.center;
  const double L2 = (b.hi - b.lo) * (b.hi - b.lo);
  const double tau = 4.0 * (t - b.lo) * (b.hi - t) / L2;
  const double dtau = 4.0 * (b.hi + b.lo - 2.0 * t) / L2;
  const double d2tau = -8.0 / L2;
  ProfileParts p;
  p.e = std::exp(-0.5 * s * s / w2);
  p.de = -s / w2 * p.e;
  p.d2e = (s * s / (w2 * w2) - 1.0 / w2) * p.e;
  p.T = tau * tau * tau;
  p.dT = 3.0 * tau * tau * dtau;
  p.d2T = 6.0 * tau * dtau * dtau + 3.0 * tau * tau * d2tau;
  return p;
}

}  // namespace

double SourceBump::profile(double t) const
{
  if (!(t > lo && t < hi))
  {
    return 0.0;
  }
  const auto p = parts(*this, t);
  return p.e * p.T;
}

double SourceBump::profile_derivative(double t) const
{
  if (!(t > lo && t < hi))
  {
    return 0.0;
  }
  const auto p = parts(*this, t);
  return p.de * p.T + p.e * p.dT;
}

double SourceBump::profile_second_derivative(double t) const
{
  if (!(t > lo && t < hi))
  {
    return 0.0;
  }
  const auto p = parts(*this, t);
  return p.d2e * p.T + 2.0 * p.de * p.dT + p.e * p.d2T;
}

Eigen::Vector3cd SourceTerm::value(const Eigen::Vector3d &y) const
{
  Eigen::Vector3cd v = Eigen::Vector3cd::Zero();
  for (const auto &b : bumps)
  {
    const double G = b.profile(y(2));
    if (G == 0.0)
    {
      continue;
    }
    const double ph = kTwoPi * (b.j1 * y(0) / cell[0] + b.j2 * y(1) / cell[1]);
    v += b.amp * (std::polar(G, ph));
  }
  return v;
}

Eigen::Matrix3cd SourceTerm::gradient(const Eigen::Vector3d &y) const
{
  Eigen::Matrix3cd g = Eigen::Matrix3cd::Zero();
  const std::complex<double> I(0.0, 1.0);
  for (const auto &b : bumps)
  {
    const double G = b.profile(y(2)), dG = b.profile_derivative(y(2));
    if (G == 0.0 && dG == 0.0)
    {
      continue;
    }
    const double k1 = kTwoPi * b.j1 / cell[0], k2 = kTwoPi * b.j2 / cell[1];
    const std::complex<double> e = std::polar(1.0, k1 * y(0) + k2 * y(1));
    g.row(0) += (I * k1 * G * e) * b.amp.transpose();
    g.row(1) += (I * k2 * G * e) * b.amp.transpose();
    g.row(2) += (dG * e) * b.amp.transpose();
  }
  return g;
}

bool SourceTerm::is_zero() const
{
  return std::all_of(bumps.begin(), bumps.end(), [](const SourceBump &b) { return b.amp.isZero(0.0); });
}

double SourceTerm::support_low() const
{
  double lo = 1e300;
  for (const auto &b : bumps)
  {
    lo = std::min(lo, b.lo);
  }
  return lo;
}

double SourceTerm::support_high() const
{
  double hi = -1e300;
  for (const auto &b : bumps)
  {
    hi = std::max(hi, b.hi);
  }
  return hi;
}

void validate_source(const SourceTerm &g, double sup_f0, double h)
{
  for (const auto &b : g.bumps)
  {
    if (!(b.width > 0.0) || !(b.lo < b.hi))
    {
      throw ConstraintViolation("source bump needs width > 0 and lo < hi");
    }
    if (!(b.lo > sup_f0) || !(b.hi < h))
    {
      throw ConstraintViolation(fmt::format(
        "source support ({}, {}) must lie strictly inside ({}, {})", b.lo, b.hi, sup_f0, h));
    }
  }
}

double law_worst_case(const EnsembleLaw &law, std::array<double, 2> cell)
{
  double w = 0.0;
  for (const auto &m : law.modes)
  {
    const double k = std::hypot(kTwoPi * m.j1 / cell[0], kTwoPi * m.j2 / cell[1]);
    w += 2.0 * std::abs(m.scale) * (1.0 + k);
  }
  return w;
}

RandomSample sample_one(std::uint64_t seed, std::uint64_t sample_id, const EnsembleLaw &law,
                        const StripGeometry &geom, const SurfaceProfile &f0, std::array<int, 2> solver_points)
{
  Stream rng(seed, sample_id);
  RandomSample s;
  s.sample_id = sample_id;
  s.stream = mix64(seed) ^ mix64(~sample_id);

  for (int attempt = 0;; ++attempt)
  {
    if (attempt > law.max_retries)
    {
      throw ConstraintViolation(fmt::format("sample {} stayed outside the admissible class after {} retries",
                                            sample_id, law.max_retries));
    }
    ProfileSpec spec = f0.spec();
    for (const auto &m : law.modes)
    {
      const double a = rng.uniform(-m.scale, m.scale);
      const double b = rng.uniform(-m.scale, m.scale);
      if (m.scale != 0.0)
      {
        spec.terms.push_back({m.j1, m.j2, a, b});
      }
    }
    try
    {
      SurfaceProfile f = make_profile(spec, geom, solver_points);
      const double dist = sobolev_sup_distance(f, f0, solver_points);
      if (dist <= law.M0)
      {
        s.surface = std::move(f);
        s.distance_to_reference = dist;
        break;
      }
    }
    catch (const ConstraintViolation &)
    {
    }
    ++s.rejections;
  }

  s.source.cell = geom.cell;
  for (const auto &tmpl : law.source_templates)
  {
    SourceBump b = tmpl;
    for (int c = 0; c < 3; ++c)
    {
      const double re = rng.uniform(-1.0, 1.0), im = rng.uniform(-1.0, 1.0);
      b.amp(c) = law.amp_scale * std::complex<double>(re, im);
    }
    s.source.bumps.push_back(b);
  }
  return s;
}

std::vector<RandomSample> sample_ensemble(std::uint64_t seed, int n, const EnsembleLaw &law,
                                          const StripGeometry &geom, const SurfaceProfile &f0,
                                          std::array<int, 2> solver_points)
{
  if (n <= 0)
  {
    throw ConstraintViolation("ensemble size must be positive");
  }
  std::vector<RandomSample> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i)
  {
    out.push_back(sample_one(seed, static_cast<std::uint64_t>(i), law, geom, f0, solver_points));
  }
  return out;
}

}  // namespace elastorough
