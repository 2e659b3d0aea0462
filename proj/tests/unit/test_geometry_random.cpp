#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "elastorough/errors.hpp"
#include "elastorough/geometry.hpp"
#include "elastorough/random_ensemble.hpp"
#include "elastorough/rng.hpp"

using namespace elastorough;

namespace
{

StripGeometry unit_geometry()
{
  StripGeometry g;
  g.m = 0.0;
  g.M_sup = 0.5;
  g.h = 1.25;
  g.cell = {4.0, 4.0};
  return g;
}

SurfaceProfile wavy(double offset, double a)
{
  return make_profile(ProfileSpec{offset, {{1, 0, a, 0.5 * a}, {1, -1, -0.5 * a, 0.3 * a}}}, unit_geometry());
}

}  // namespace

TEST(Profile, FlatHasZeroLipschitz)
{
  const auto f = make_profile(ProfileSpec{0.25, {}}, unit_geometry());
  EXPECT_TRUE(f.is_flat());
  EXPECT_EQ(f.lipschitz, 0.0);
  EXPECT_DOUBLE_EQ(f.f_min, 0.25);
  EXPECT_DOUBLE_EQ(f.f_max, 0.25);
}

TEST(Profile, CosineLipschitz)
{
  const double a = 0.05, L1 = 4.0;
  const auto f = make_profile(ProfileSpec{0.25, {{1, 0, a, 0.0}}}, unit_geometry());
  const double exact = 2.0 * std::numbers::pi * a / L1;
  EXPECT_NEAR(f.lipschitz_estimate, exact, 0.01 * exact);
  EXPECT_NEAR(f.lipschitz, kLipschitzSafety * f.lipschitz_estimate, 1e-15);
  EXPECT_GE(f.lipschitz, exact);
  EXPECT_FALSE(f.is_flat());
  EXPECT_NEAR(f.f_max, 0.25 + a, 1e-12);
  EXPECT_NEAR(f.f_min, 0.25 - a, 1e-12);
}

TEST(Profile, RejectsSlabExit)
{
  EXPECT_THROW(make_profile(ProfileSpec{0.25, {{1, 0, 0.3, 0.0}}}, unit_geometry()), ConstraintViolation);
  EXPECT_THROW(make_profile(ProfileSpec{0.0, {}}, unit_geometry()), ConstraintViolation);
}

TEST(Profile, GradientMatchesFiniteDifferences)
{
  const auto f = wavy(0.25, 0.04);
  const double s = 1e-6;
  for (double x1 : {0.1, 1.7, 3.3})
  {
    for (double x2 : {0.4, 2.9})
    {
      const auto g = f.gradient(x1, x2);
      EXPECT_NEAR(g[0], (f.value(x1 + s, x2) - f.value(x1 - s, x2)) / (2 * s), 1e-8);
      EXPECT_NEAR(g[1], (f.value(x1, x2 + s) - f.value(x1, x2 - s)) / (2 * s), 1e-8);
    }
  }
}

TEST(Cutoff, OrientationAndSlope)
{
  const CutoffFn a(0.125, 1.0);
  EXPECT_EQ(a(0.0), 1.0);
  EXPECT_EQ(a(0.1), 1.0);
  EXPECT_EQ(a(1.0), 0.0);
  EXPECT_EQ(a(1.3), 0.0);
  EXPECT_NEAR(a(0.5625), 0.5, 1e-15);
  EXPECT_NEAR(a.slope_bound(), 1.0 / 0.875, 1e-15);
  for (double d : {0.01, 0.1, 0.3, 0.49})
  {
    const CutoffFn c(d, 1.0);
    EXPECT_LT(c.slope_bound(), 1.0 / (1.0 - 2.0 * d));
  }
  EXPECT_THROW(CutoffFn(0.5, 1.0), ConstraintViolation);
  EXPECT_THROW(CutoffFn(0.0, 1.0), ConstraintViolation);
}

TEST(Transform, IdentityForEqualSurfaces)
{
  const auto f0 = wavy(0.25, 0.03);
  const CutoffFn cut(0.125, 1.25 - f0.f_max);
  const auto t = transform_map(Eigen::Vector3d(1.1, 0.3, 0.6), f0, f0, cut);
  EXPECT_NEAR((t.x - Eigen::Vector3d(1.1, 0.3, 0.6)).norm(), 0.0, 1e-15);
  EXPECT_NEAR((t.J - Eigen::Matrix3d::Identity()).norm(), 0.0, 1e-15);
  EXPECT_EQ(t.det, 1.0);
}

TEST(Transform, SurfaceToSurfaceAndTopFixed)
{
  const auto f0 = make_profile(ProfileSpec{0.25, {}}, unit_geometry());
  const auto f = wavy(0.25, 0.04);
  const CutoffFn cut(0.125, 1.25 - f0.f_max);
  for (double x1 : {0.2, 1.9, 3.7})
  {
    const double x2 = 0.5 * x1;
    const auto s = transform_map(Eigen::Vector3d(x1, x2, f0.value(x1, x2)), f0, f, cut);
    EXPECT_NEAR(s.x(2), f.value(x1, x2), 1e-15);
    const auto top = transform_map(Eigen::Vector3d(x1, x2, 1.25), f0, f, cut);
    EXPECT_NEAR((top.x - Eigen::Vector3d(x1, x2, 1.25)).norm(), 0.0, 1e-15);
  }
}

TEST(Transform, JacobianMatchesRichardsonDifferences)
{
  const auto f0 = wavy(0.25, 0.02);
  const auto f = make_profile(ProfileSpec{0.27, {{0, 1, 0.03, -0.01}, {2, 1, 0.01, 0.0}}}, unit_geometry());
  const CutoffFn cut(0.125, 1.25 - f0.f_max);
  Stream rng(41, 0);
  for (int i = 0; i < 100; ++i)
  {
    const double y1 = rng.uniform(0.0, 4.0), y2 = rng.uniform(0.0, 4.0);
    // Stay off the cutoff kinks so that the map is smooth at y.
    double y3 = 0.0;
    double t = 0.0;
    do
    {
      y3 = rng.uniform(f0.value(y1, y2), 1.25);
      t = y3 - f0.value(y1, y2);
    } while (std::abs(t - cut.delta) < 0.02 || std::abs(t - cut.gamma_gap) < 0.02);
    const Eigen::Vector3d y(y1, y2, y3);
    const auto T = transform_map(y, f0, f, cut);
    EXPECT_NEAR(T.det, 1.0 + T.row(2), 1e-15);
    EXPECT_NEAR((T.J_inv * T.J - Eigen::Matrix3d::Identity()).norm(), 0.0, 1e-13);
    Eigen::Matrix3d fd;
    for (int c = 0; c < 3; ++c)
    {
      auto central = [&](double s) {
        Eigen::Vector3d e = Eigen::Vector3d::Zero();
        e(c) = s;
        return Eigen::Vector3d((transform_map(y + e, f0, f, cut).x - transform_map(y - e, f0, f, cut).x) / (2 * s));
      };
      fd.col(c) = (4.0 * central(5e-4) - central(1e-3)) / 3.0;
    }
    EXPECT_LT((fd - T.J).norm(), 1e-8) << "sample " << i;
  }
}

TEST(Transform, InverseRoundTrip)
{
  const auto f0 = wavy(0.25, 0.02);
  const auto f = wavy(0.28, 0.05);
  const CutoffFn cut(0.125, 1.25 - f0.f_max);
  Stream rng(43, 0);
  for (int i = 0; i < 100; ++i)
  {
    const double y1 = rng.uniform(0.0, 4.0), y2 = rng.uniform(0.0, 4.0);
    const Eigen::Vector3d y(y1, y2, rng.uniform(f0.value(y1, y2), 1.25));
    const auto x = transform_map(y, f0, f, cut).x;
    EXPECT_LT((inverse_transform(x, f0, f, cut) - y).norm(), 1e-10);
  }
}

TEST(StripMap, IdentityFlagAndColumns)
{
  const auto flat = make_profile(ProfileSpec{0.25, {}}, unit_geometry());
  const auto f = wavy(0.25, 0.04);
  const CutoffFn cut(0.125, 1.0);
  EXPECT_TRUE(StripMap(flat, flat, cut, 0.25, 1.25).is_identity());
  EXPECT_FALSE(StripMap(flat, f, cut, 0.25, 1.25).is_identity());
  EXPECT_FALSE(StripMap(f, f, cut, 0.25, 1.25).is_identity());

  const StripMap m(flat, f, cut, 0.25, 1.25);
  const auto col = m.column(1.3, 2.2);
  EXPECT_NEAR(m.eval(col, 0.25).x3, f.value(1.3, 2.2), 1e-14);
  EXPECT_NEAR(m.eval(col, 1.25).x3, 1.25, 1e-14);
  for (double z : {0.3, 0.6, 1.1})
  {
    const auto pt = m.eval(col, z);
    EXPECT_NEAR(m.box_height_of_physical(col, pt.x3), z, 1e-10);
    EXPECT_NEAR(pt.det, 1.0 + pt.a(2), 1e-15);
  }
  EXPECT_THROW(m.box_height_of_physical(col, 1.5), ConstraintViolation);
}

TEST(SourceBump, ProfileDerivatives)
{
  SourceBump b;
  const double s = 1e-5;
  for (double t : {0.45, 0.6, 0.75, 0.93, 1.05})
  {
    EXPECT_NEAR(b.profile_derivative(t), (b.profile(t + s) - b.profile(t - s)) / (2 * s), 1e-6);
    EXPECT_NEAR(b.profile_second_derivative(t),
                (b.profile_derivative(t + s) - b.profile_derivative(t - s)) / (2 * s), 1e-5);
  }
  EXPECT_EQ(b.profile(0.39), 0.0);
  EXPECT_EQ(b.profile(1.11), 0.0);
}

TEST(SourceTerm, GradientAndSupport)
{
  SourceTerm g;
  SourceBump b;
  b.j1 = 1;
  b.j2 = -1;
  b.amp << 1.0, cplx(0.0, 0.5), 0.25;
  g.bumps.push_back(b);
  const Eigen::Vector3d y(0.7, 1.9, 0.8);
  const double s = 1e-6;
  const Eigen::Matrix3cd G = g.gradient(y);
  for (int i = 0; i < 3; ++i)
  {
    Eigen::Vector3d e = Eigen::Vector3d::Zero();
    e(i) = s;
    const Eigen::Vector3cd fd = (g.value(y + e) - g.value(y - e)) / (2 * s);
    EXPECT_LT((G.row(i).transpose() - fd).norm(), 1e-7);
  }
  EXPECT_NO_THROW(validate_source(g, 0.3, 1.25));
  EXPECT_THROW(validate_source(g, 0.45, 1.25), ConstraintViolation);
  EXPECT_THROW(validate_source(g, 0.3, 1.05), ConstraintViolation);
  EXPECT_TRUE(SourceTerm{}.is_zero());
}

TEST(Rng, StreamsAreReproducibleAndDistinct)
{
  Stream a(9, 0), b(9, 0), c(9, 1);
  for (int i = 0; i < 10; ++i)
  {
    const double x = a.uniform();
    EXPECT_EQ(x, b.uniform());
    EXPECT_NE(x, c.uniform());
    EXPECT_GE(x, 0.0);
    EXPECT_LT(x, 1.0);
  }
}

TEST(Ensemble, ZeroAmplitudeLawReproducesReference)
{
  const auto f0 = make_profile(ProfileSpec{0.25, {}}, unit_geometry());
  EnsembleLaw law;
  law.modes = {{1, 0, 0.0}};
  const auto s = sample_ensemble(5, 1, law, unit_geometry(), f0);
  ASSERT_EQ(s.size(), 1u);
  for (double x : {0.0, 1.3, 2.9})
  {
    EXPECT_EQ(s[0].surface.value(x, 0.5 * x), f0.value(x, 0.5 * x));
  }
  EXPECT_EQ(s[0].distance_to_reference, 0.0);
}

TEST(Ensemble, DeterministicForFixedSeed)
{
  const auto f0 = make_profile(ProfileSpec{0.25, {}}, unit_geometry());
  EnsembleLaw law;
  law.modes = {{1, 0, 0.01}, {0, 1, 0.01}, {1, 1, 0.005}};
  SourceBump b;
  b.amp << 1.0, 1.0, 1.0;
  law.source_templates = {b};
  const auto a = sample_ensemble(77, 100, law, unit_geometry(), f0);
  const auto c = sample_ensemble(77, 100, law, unit_geometry(), f0);
  const auto d = sample_ensemble(78, 100, law, unit_geometry(), f0);
  ASSERT_EQ(a.size(), 100u);
  bool differs = false;
  for (std::size_t i = 0; i < a.size(); ++i)
  {
    EXPECT_EQ(a[i].sample_id, i);
    EXPECT_EQ(a[i].surface.spec(), c[i].surface.spec());
    EXPECT_EQ(a[i].source.bumps[0].amp, c[i].source.bumps[0].amp);
    differs = differs || !(a[i].surface.spec() == d[i].surface.spec());
  }
  EXPECT_TRUE(differs);
  // A single sample is independent of how many siblings are drawn.
  const auto one = sample_one(77, 42, law, unit_geometry(), f0);
  EXPECT_EQ(one.surface.spec(), a[42].surface.spec());
}

TEST(Ensemble, NoRejectionsWhenWorstCaseFits)
{
  const auto f0 = make_profile(ProfileSpec{0.25, {}}, unit_geometry());
  EnsembleLaw law;
  law.M0 = 0.1;
  law.modes = {{1, 0, 1.0}, {0, 1, 1.0}, {1, 1, 1.0}};
  const double worst = law_worst_case(law, unit_geometry().cell);
  for (auto &m : law.modes)
  {
    m.scale *= 0.999 * law.M0 / worst;
  }
  ASSERT_LE(law_worst_case(law, unit_geometry().cell), law.M0);
  const auto s = sample_ensemble(123, 10000, law, unit_geometry(), f0, {9, 9});
  int rejections = 0;
  for (const auto &r : s)
  {
    rejections += r.rejections;
    ASSERT_LE(r.distance_to_reference, law.M0);
  }
  EXPECT_EQ(rejections, 0);
}
