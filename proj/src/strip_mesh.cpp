#include "elastorough/strip_mesh.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss.hpp>

#include "elastorough/errors.hpp"

namespace elastorough
{

namespace
{

template <unsigned N>
QuadRule mapped_rule()
{
  using G = boost::math::quadrature::gauss<double, N>;
  QuadRule r;
  const auto &x = G::abscissa();
  const auto &w = G::weights();
  // Boost stores the nonnegative half of a symmetric rule.
  for (std::size_t i = 0; i < x.size(); ++i)
  {
    if (x[i] == 0.0)
    {
      r.s.push_back(0.5);
      r.w.push_back(0.5 * w[i]);
      continue;
    }
    r.s.push_back(0.5 * (1.0 - x[i]));
    r.w.push_back(0.5 * w[i]);
    r.s.push_back(0.5 * (1.0 + x[i]));
    r.w.push_back(0.5 * w[i]);
  }
  std::vector<std::size_t> idx(r.s.size());
  for (std::size_t i = 0; i < idx.size(); ++i)
  {
    idx[i] = i;
  }
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return r.s[a] < r.s[b]; });
  QuadRule sorted;
  for (auto i : idx)
  {
    sorted.s.push_back(r.s[i]);
    sorted.w.push_back(r.w[i]);
  }
  return sorted;
}

}  // namespace

QuadRule gauss_rule(int points)
{
  switch (points)
  {
    case 1: return mapped_rule<1>();
    case 2: return mapped_rule<2>();
    case 3: return mapped_rule<3>();
    case 4: return mapped_rule<4>();
    case 5: return mapped_rule<5>();
    default: throw ConstraintViolation("quadrature order must be between 1 and 5");
  }
}

StripMesh make_mesh(const SpectralGrid &grid, double z_bottom, double h, int Nz, int quad_points, double kink)
{
  if (!(z_bottom < h))
  {
    throw ConstraintViolation("mesh requires z_bottom < h");
  }
  if (Nz < 1)
  {
    throw ConstraintViolation("mesh requires at least one vertical element");
  }
  if (quad_points < 2 || quad_points > 5)
  {
    throw ConstraintViolation("quadrature order must be between 2 and 5");
  }
  StripMesh m;
  m.grid = grid;
  m.quad_points = quad_points;
  m.z.resize(Nz + 1);
  const double H = h - z_bottom;
  const bool split = std::isfinite(kink) && kink > z_bottom && kink < h && Nz >= 2;
  if (!split)
  {
    for (int i = 0; i <= Nz; ++i)
    {
      m.z[i] = z_bottom + H * i / Nz;
    }
  }
  else
  {
    const int n_low = std::clamp(static_cast<int>(std::lround(Nz * (kink - z_bottom) / H)), 1, Nz - 1);
    const int n_high = Nz - n_low;
    for (int i = 0; i <= n_low; ++i)
    {
      m.z[i] = z_bottom + (kink - z_bottom) * i / n_low;
    }
    for (int i = 1; i <= n_high; ++i)
    {
      m.z[n_low + i] = kink + (h - kink) * i / n_high;
    }
  }
  m.z.front() = z_bottom;
  m.z.back() = h;
  return m;
}

}  // namespace elastorough
