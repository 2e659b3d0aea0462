#include "elastorough/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>

#include <boost/math/tools/toms748_solve.hpp>
#include <fmt/core.h>

#include "elastorough/errors.hpp"

namespace elastorough
{

namespace
{

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::array<int, 2> evaluation_points(const ProfileSpec &spec, std::array<int, 2> solver_points)
{
  int m1 = 0, m2 = 0;
  for (const auto &t : spec.terms)
  {
    m1 = std::max(m1, std::abs(t.j1));
    m2 = std::max(m2, std::abs(t.j2));
  }
  return {std::max({8 * solver_points[0], 64 * m1, 64}), std::max({8 * solver_points[1], 64 * m2, 64})};
}

struct GridStats
{
  double f_min, f_max, grad_sup, abs_sup;
  std::array<double, 2> argmin, argmax;
};

GridStats scan(const SurfaceProfile &f, std::array<int, 2> pts)
{
  GridStats s{1e300, -1e300, 0.0, 0.0, {0, 0}, {0, 0}};
  const auto cell = f.cell();
  for (int i = 0; i < pts[0]; ++i)
  {
    const double x1 = cell[0] * i / pts[0];
    for (int j = 0; j < pts[1]; ++j)
    {
      const double x2 = cell[1] * j / pts[1];
      const double v = f.value(x1, x2);
      const auto g = f.gradient(x1, x2);
      if (v < s.f_min)
      {
        s.f_min = v;
        s.argmin = {x1, x2};
      }
      if (v > s.f_max)
      {
        s.f_max = v;
        s.argmax = {x1, x2};
      }
      s.grad_sup = std::max(s.grad_sup, std::hypot(g[0], g[1]));
      s.abs_sup = std::max(s.abs_sup, std::abs(v));
    }
  }
  return s;
}

}  // namespace

SurfaceProfile::SurfaceProfile(ProfileSpec spec, std::array<double, 2> cell)
  : spec_(std::move(spec)), cell_(cell)
{
  if (!(cell[0] > 0.0 && cell[1] > 0.0))
  {
    throw ConstraintViolation("cell lengths must be positive");
  }
  f_min = f_max = spec_.offset;
}

double SurfaceProfile::value(double x1, double x2) const
{
  double v = spec_.offset;
  for (const auto &t : spec_.terms)
  {
    const double ph = kTwoPi * (t.j1 * x1 / cell_[0] + t.j2 * x2 / cell_[1]);
    v += t.a * std::cos(ph) + t.b * std::sin(ph);
  }
  return v;
}

std::array<double, 2> SurfaceProfile::gradient(double x1, double x2) const
{
  std::array<double, 2> g = {0.0, 0.0};
  for (const auto &t : spec_.terms)
  {
    const double k1 = kTwoPi * t.j1 / cell_[0], k2 = kTwoPi * t.j2 / cell_[1];
    const double ph = k1 * x1 + k2 * x2;
    const double d = -t.a * std::sin(ph) + t.b * std::cos(ph);
    g[0] += k1 * d;
    g[1] += k2 * d;
  }
  return g;
}

bool SurfaceProfile::is_flat() const
{
  return std::all_of(spec_.terms.begin(), spec_.terms.end(), [](const FourierTerm &t) {
    return (t.j1 == 0 && t.j2 == 0) || (t.a == 0.0 && t.b == 0.0);
  });
}

int SurfaceProfile::max_index() const
{
  int m = 0;
  for (const auto &t : spec_.terms)
  {
    m = std::max({m, std::abs(t.j1), std::abs(t.j2)});
  }
  return m;
}

SurfaceProfile make_profile_unchecked(const ProfileSpec &spec, std::array<double, 2> cell,
                                      std::array<int, 2> solver_points)
{
  SurfaceProfile f(spec, cell);
  const auto s = scan(f, evaluation_points(spec, solver_points));
  f.f_min = s.f_min;
  f.f_max = s.f_max;
  f.lipschitz_estimate = s.grad_sup;
  f.lipschitz = kLipschitzSafety * s.grad_sup;
  return f;
}

SurfaceProfile make_profile(const ProfileSpec &spec, const StripGeometry &geom, std::array<int, 2> solver_points)
{
  validate_geometry(geom);
  SurfaceProfile f(spec, geom.cell);
  const auto s = scan(f, evaluation_points(spec, solver_points));
  if (!(s.f_min > geom.m))
  {
    throw ConstraintViolation(fmt::format("surface leaves the slab: f = {} <= m = {} at x' = ({}, {})",
                                          s.f_min, geom.m, s.argmin[0], s.argmin[1]));
  }
  if (!(s.f_max < geom.M_sup))
  {
    throw ConstraintViolation(fmt::format("surface leaves the slab: f = {} >= M_sup = {} at x' = ({}, {})",
                                          s.f_max, geom.M_sup, s.argmax[0], s.argmax[1]));
  }
  f.f_min = s.f_min;
  f.f_max = s.f_max;
  f.lipschitz_estimate = s.grad_sup;
  f.lipschitz = kLipschitzSafety * s.grad_sup;
  return f;
}

double sobolev_sup_distance(const SurfaceProfile &f, const SurfaceProfile &g, std::array<int, 2> solver_points)
{
  ProfileSpec d;
  d.offset = f.spec().offset - g.spec().offset;
  d.terms = f.spec().terms;
  for (auto t : g.spec().terms)
  {
    t.a = -t.a;
    t.b = -t.b;
    d.terms.push_back(t);
  }
  const SurfaceProfile diff(d, f.cell());
  const auto s = scan(diff, evaluation_points(d, solver_points));
  return s.abs_sup + s.grad_sup;
}

CutoffFn::CutoffFn(double delta_, double gamma_gap_) : delta(delta_), gamma_gap(gamma_gap_)
{
  if (!(gamma_gap > 0.0))
  {
    throw ConstraintViolation("cutoff requires gamma_gap > 0");
  }
  if (!(delta > 0.0 && delta < 0.5 * gamma_gap))
  {
    throw ConstraintViolation("cutoff requires 0 < delta < gamma_gap / 2");
  }
}

double CutoffFn::operator()(double t) const
{
  if (t <= delta)
  {
    return 1.0;
  }
  if (t >= gamma_gap)
  {
    return 0.0;
  }
  return (gamma_gap - t) / (gamma_gap - delta);
}

double CutoffFn::derivative(double t) const
{
  return (t >= delta && t < gamma_gap) ? -1.0 / (gamma_gap - delta) : 0.0;
}

TransformData transform_map(const Eigen::Vector3d &y, const SurfaceProfile &f0, const SurfaceProfile &f,
                            const CutoffFn &cutoff)
{
  const double v0 = f0.value(y(0), y(1)), v = f.value(y(0), y(1));
  const auto g0 = f0.gradient(y(0), y(1)), g = f.gradient(y(0), y(1));
  const double t = y(2) - v0, d = v - v0;
  const double al = cutoff(t), dal = cutoff.derivative(t);

  TransformData out;
  out.row << al * (g[0] - g0[0]) - dal * g0[0] * d, al * (g[1] - g0[1]) - dal * g0[1] * d, dal * d;
  if (!(std::abs(out.row(2)) < 1.0))
  {
    throw SingularTransform(fmt::format("transform Jacobian is singular: |J3| = {} at y = ({}, {}, {})",
                                        std::abs(out.row(2)), y(0), y(1), y(2)));
  }
  out.x = y;
  out.x(2) += al * d;
  out.J.setIdentity();
  out.J.row(2) += out.row.transpose();
  out.det = 1.0 + out.row(2);
  out.J_inv.setIdentity();
  out.J_inv.row(2) -= out.row.transpose() / out.det;
  return out;
}

Eigen::Vector3d inverse_transform(const Eigen::Vector3d &x, const SurfaceProfile &f0, const SurfaceProfile &f,
                                  const CutoffFn &cutoff)
{
  const double v0 = f0.value(x(0), x(1));
  const double d = f.value(x(0), x(1)) - v0;
  Eigen::Vector3d y = x;
  if (d == 0.0)
  {
    return y;
  }
  auto resid = [&](double y3) { return y3 + cutoff(y3 - v0) * d - x(2); };
  const double pad = 1e-9 * (1.0 + std::abs(x(2)));
  double lo = x(2) - std::abs(d) - pad, hi = x(2) + std::abs(d) + pad;
  std::uintmax_t iters = 200;
  const auto r = boost::math::tools::toms748_solve(resid, lo, hi, boost::math::tools::eps_tolerance<double>(52),
                                                   iters);
  y(2) = 0.5 * (r.first + r.second);
  return y;
}

StripMap::StripMap(const SurfaceProfile &f_ref, const SurfaceProfile &f_phys, const CutoffFn &cutoff,
                   double z_bottom, double h)
  : f_ref_(f_ref), f_phys_(f_phys), cutoff_(cutoff), z_b_(z_bottom), h_(h)
{
  if (!(z_b_ < h_))
  {
    throw ConstraintViolation("box bottom must lie below h");
  }
  ref_flat_at_bottom_ = f_ref_.is_flat() && f_ref_.value(0.0, 0.0) == z_b_;
  identity_ = ref_flat_at_bottom_ && f_phys_.is_flat() && f_phys_.value(0.0, 0.0) == z_b_;
}

StripMap::Column StripMap::column(double x1, double x2) const
{
  Column c;
  c.x1 = x1;
  c.x2 = x2;
  c.f_ref = f_ref_.value(x1, x2);
  c.f_phys = f_phys_.value(x1, x2);
  c.grad_ref = f_ref_.gradient(x1, x2);
  c.grad_phys = f_phys_.gradient(x1, x2);
  return c;
}

StripMap::Point StripMap::eval(const Column &c, double z3) const
{
  Point p;
  if (identity_)
  {
    p.y3 = p.x3 = z3;
    return p;
  }
  // Linear stretch of [z_b, h] onto [f_ref, h].
  const double s = (z3 - z_b_) / (h_ - z_b_);
  p.y3 = c.f_ref + s * (h_ - c.f_ref);
  const Eigen::Vector3d q(c.grad_ref[0] * (1.0 - s), c.grad_ref[1] * (1.0 - s), (h_ - c.f_ref) / (h_ - z_b_) - 1.0);

  // Transform carrying f_ref to f_phys, evaluated at the reference point.
  const double t = p.y3 - c.f_ref, d = c.f_phys - c.f_ref;
  const double al = cutoff_(t), dal = cutoff_.derivative(t);
  const Eigen::Vector3d r(al * (c.grad_phys[0] - c.grad_ref[0]) - dal * c.grad_ref[0] * d,
                          al * (c.grad_phys[1] - c.grad_ref[1]) - dal * c.grad_ref[1] * d, dal * d);
  if (!(std::abs(r(2)) < 1.0))
  {
    throw SingularTransform(fmt::format("transform Jacobian is singular: |J3| = {} at ({}, {}, {})", std::abs(r(2)),
                                        c.x1, c.x2, p.y3));
  }
  p.x3 = p.y3 + al * d;
  p.a = r + q + r(2) * q;
  p.det = 1.0 + p.a(2);
  if (!(p.det > 0.0))
  {
    throw SingularTransform("strip map is not orientation preserving");
  }
  return p;
}

double StripMap::box_height(const Column &c, double y3) const
{
  if (identity_ || ref_flat_at_bottom_)
  {
    return y3;
  }
  const double s = (y3 - c.f_ref) / (h_ - c.f_ref);
  return z_b_ + s * (h_ - z_b_);
}

double StripMap::box_height_of_physical(const Column &c, double x3) const
{
  const double tol = 1e-12 * (1.0 + std::abs(h_));
  if (x3 < c.f_phys - tol || x3 > h_ + tol)
  {
    throw ConstraintViolation(fmt::format("point ({}, {}, {}) lies outside the strip", c.x1, c.x2, x3));
  }
  if (identity_)
  {
    return x3;
  }
  auto resid = [&](double z) { return eval(c, z).x3 - x3; };
  double lo = z_b_, hi = h_;
  const double rlo = resid(lo), rhi = resid(hi);
  if (rlo >= 0.0)
  {
    return lo;
  }
  if (rhi <= 0.0)
  {
    return hi;
  }
  std::uintmax_t iters = 200;
  const auto r = boost::math::tools::toms748_solve(resid, lo, hi, rlo, rhi,
                                                   boost::math::tools::eps_tolerance<double>(52), iters);
  return 0.5 * (r.first + r.second);
}

}  // namespace elastorough
