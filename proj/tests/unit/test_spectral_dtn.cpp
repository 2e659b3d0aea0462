#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "elastorough/rng.hpp"
#include "elastorough/spectral_dtn.hpp"
#include "elastorough/spectral_grid.hpp"

using namespace elastorough;

namespace
{

const cplx I(0.0, 1.0);

Vec3c random_vec(Stream &rng)
{
  Vec3c v;
  for (int c = 0; c < 3; ++c)
  {
    v(c) = cplx(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
  }
  return v;
}

ElasticParams random_params(Stream &rng)
{
  const double mu = rng.uniform(0.2, 3.0);
  const double lam = rng.uniform(-0.6 * mu, 5.0);
  return validate_params(lam, mu, rng.uniform(0.1, 6.0));
}

BoundaryTrace random_trace(const SpectralGrid &grid, Stream &rng)
{
  BoundaryTrace t{grid, std::vector<Vec3c>(grid.size())};
  for (auto &c : t.coefficients)
  {
    c = random_vec(rng);
  }
  return t;
}

// Bilinear (non-conjugating) product.
cplx bdot(const Vec3c &a, const Vec3c &b)
{
  return a(0) * b(0) + a(1) * b(1) + a(2) * b(2);
}

}  // namespace

TEST(SpectralGrid, LatticeLayoutAndSymmetry)
{
  const SpectralGrid g(3, 2, {4.0, 2.0});
  EXPECT_EQ(g.size(), 35);
  const int z = g.zero_mode();
  EXPECT_EQ(g.j1(z), 0);
  EXPECT_EQ(g.j2(z), 0);
  for (int k = 0; k < g.size(); ++k)
  {
    EXPECT_EQ(g.index(g.j1(k), g.j2(k)), k);
    const int m = g.mirror(k);
    EXPECT_EQ(g.j1(m), -g.j1(k));
    EXPECT_EQ(g.j2(m), -g.j2(k));
  }
  const auto xi = g.xi(g.index(1, -1));
  EXPECT_NEAR(xi[0], std::numbers::pi / 2.0, 1e-15);
  EXPECT_NEAR(xi[1], -std::numbers::pi, 1e-15);
  EXPECT_EQ(dealiased_size(9), 15);
  EXPECT_EQ(dealiased_size(17), 27);
}

TEST(SpectralGrid, TransformRoundTrip)
{
  const SpectralGrid g(3, 4, {4.0, 3.0});
  for (auto [P1, P2] : {std::pair{g.n1(), g.n2()}, std::pair{dealiased_size(g.n1()), dealiased_size(g.n2())}})
  {
    const FourierTransform ft(g, P1, P2);
    Stream rng(7, 0);
    std::vector<cplx> modes(g.size()), vals(ft.points()), back(g.size());
    for (auto &m : modes)
    {
      m = cplx(rng.uniform(-1, 1), rng.uniform(-1, 1));
    }
    ft.to_physical(modes.data(), vals.data());
    // Amplitude convention: values are the plain trigonometric sum.
    const int p = 5;
    const auto x = ft.point(p);
    cplx direct = 0.0;
    for (int k = 0; k < g.size(); ++k)
    {
      const auto xi = g.xi(k);
      direct += modes[k] * std::exp(I * (xi[0] * x[0] + xi[1] * x[1]));
    }
    EXPECT_NEAR(std::abs(direct - vals[p]), 0.0, 1e-12);
    ft.to_modes(vals.data(), back.data());
    for (int k = 0; k < g.size(); ++k)
    {
      EXPECT_NEAR(std::abs(back[k] - modes[k]), 0.0, 1e-13);
    }
  }
}

TEST(Decomposition, ZeroFrequency)
{
  const auto p = validate_params(1.0, 1.0, 1.0);
  const auto dm = decomposition_matrices({0.0, 0.0}, p);
  Eigen::Matrix4cd expected = Eigen::Matrix4cd::Zero();
  expected(0, 1) = 1.0;
  expected(1, 2) = 1.0;
  expected(2, 0) = p.k_p;
  expected(2, 3) = 1.0;
  expected(3, 3) = p.k_s;
  EXPECT_NEAR((dm.D_tilde - expected).norm(), 0.0, 1e-15);
  const Eigen::Vector4cd col = dm.D * Vec3c(0.0, 0.0, 1.0);
  EXPECT_NEAR(std::abs(col(0) - 1.0 / p.k_p), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(col(1)) + std::abs(col(2)) + std::abs(col(3)), 0.0, 1e-14);
}

TEST(Decomposition, RestrictedInverse)
{
  Stream rng(11, 0);
  for (int i = 0; i < 200; ++i)
  {
    const auto p = random_params(rng);
    const std::array<double, 2> xi = {rng.uniform(-3.0, 3.0) * p.k_s, rng.uniform(-3.0, 3.0) * p.k_s};
    const auto dm = decomposition_matrices(xi, p);
    const Vec3c v = random_vec(rng);
    const Eigen::Vector4cd r = dm.D_tilde * (dm.D * v);
    EXPECT_LE((r.head<3>() - v).norm(), 1e-12 * v.norm());
    EXPECT_LE(std::abs(r(3)), 1e-12 * v.norm());
  }
}

TEST(Decomposition, FirstRowMatchesPrintedForm)
{
  const auto p = validate_params(1.0, 1.0, 10.0);
  const std::array<double, 2> xi = {1.0, 0.0};
  const auto dm = decomposition_matrices(xi, p);
  const auto sym = dtn_symbol(xi, p);
  const Eigen::Vector3cd row(xi[0] / sym.rho, xi[1] / sym.rho, sym.gamma / sym.rho);
  for (int c = 0; c < 3; ++c)
  {
    EXPECT_NEAR(std::abs(dm.D(0, c) - row(c)), 0.0, 1e-14);
  }
}

TEST(DtnSymbol, ZeroFrequencyIsDiagonal)
{
  const auto p = validate_params(2.0, 0.5, 1.7);
  const Mat3c M = dtn_symbol({0.0, 0.0}, p).M;
  Mat3c expected = Mat3c::Zero();
  expected(0, 0) = p.omega * std::sqrt(p.mu);
  expected(1, 1) = p.omega * std::sqrt(p.mu);
  expected(2, 2) = p.omega * std::sqrt(p.lambda + 2.0 * p.mu);
  EXPECT_NEAR((M - expected).norm(), 0.0, 1e-13);
}

TEST(DtnSymbol, SignStructureAndParity)
{
  Stream rng(3, 1);
  for (int i = 0; i < 100; ++i)
  {
    const auto p = random_params(rng);
    const std::array<double, 2> xi = {rng.uniform(-4.0, 4.0), rng.uniform(-4.0, 4.0)};
    const Mat3c M = dtn_symbol(xi, p).M;
    const Mat3c Mm = dtn_symbol({-xi[0], -xi[1]}, p).M;
    const double s = M.norm();
    EXPECT_NEAR(std::abs(M(0, 1) - M(1, 0)), 0.0, 1e-14 * s);
    EXPECT_NEAR(std::abs(M(0, 2) + M(2, 0)), 0.0, 1e-14 * s);
    EXPECT_NEAR(std::abs(M(1, 2) + M(2, 1)), 0.0, 1e-14 * s);
    for (int a = 0; a < 3; ++a)
    {
      for (int b = 0; b < 3; ++b)
      {
        const bool odd = (a == 2) != (b == 2);
        const cplx expected = odd ? -M(a, b) : M(a, b);
        EXPECT_NEAR(std::abs(Mm(a, b) - expected), 0.0, 1e-13 * s);
      }
    }
  }
}

TEST(DtnSymbol, RhoBandsAndGap)
{
  const auto p = validate_params(1.0, 1.0, 1.0);
  const auto sc = stability_constants(p);
  const double gap = std::sqrt(p.k_s * p.k_s - p.k_p * p.k_p);
  for (double r = 0.0; r <= sc.K * p.omega; r += 0.01)
  {
    const auto sym = dtn_symbol({r, 0.0}, p);
    const double rho = std::abs(sym.rho);
    if (r <= p.k_s)
    {
      EXPECT_GE(rho, p.k_p * p.k_p * (1.0 - 1e-12)) << r;
    }
    else
    {
      EXPECT_GE(rho, sc.c_K * p.omega * p.omega * (1.0 - 1e-12)) << r;
    }
    const double gb = std::abs(sym.gamma - sym.beta);
    EXPECT_LE(gb, gap * (1.0 + 1e-12));
    if (r > p.k_p && r < p.k_s)
    {
      EXPECT_NEAR(gb, gap, 1e-12);
    }
  }
  // Boundary case |xi| = k_s: gamma = 0 and rho = k_s^2.
  const auto edge = dtn_symbol({p.k_s, 0.0}, p);
  EXPECT_EQ(edge.gamma, cplx(0.0, 0.0));
  EXPECT_NEAR(edge.rho.imag(), 0.0, 1e-15);
  EXPECT_NEAR(edge.rho.real(), p.k_s * p.k_s, 1e-14);
  EXPECT_GE(edge.rho.real(), sc.c_K * p.omega * p.omega);
}

TEST(DtnSymbol, BoundChecksHaveNoViolations)
{
  const auto rep = verify_symbol_bounds(validate_params(1.0, 1.0, 1.0), 10000, 1);
  EXPECT_EQ(rep.n_samples, 10000);
  EXPECT_TRUE(rep.violations.empty());
  EXPECT_GT(rep.min_eig_outer, 0.0);
  EXPECT_LE(rep.max_ratio_inner, 1.0);
}

TEST(Amplitudes, PurePressureMode)
{
  const auto p = validate_params(1.0, 1.0, 3.0);
  for (std::array<double, 2> xi : {std::array<double, 2>{0.4, -0.3}, std::array<double, 2>{2.5, 1.0}})
  {
    const auto sym = dtn_symbol(xi, p);
    const cplx Ap(0.7, -0.2);
    const Vec3c u = Ap * Vec3c(xi[0], xi[1], sym.beta);
    const ModeAmplitude a = decompose_mode(xi, u, p);
    EXPECT_NEAR(std::abs(a.A_p - Ap), 0.0, 1e-10);
    EXPECT_NEAR(a.A_s.norm(), 0.0, 1e-10);
  }
}

TEST(Amplitudes, OrthogonalityRoundTripAndZero)
{
  Stream rng(5, 2);
  for (int i = 0; i < 200; ++i)
  {
    const auto p = random_params(rng);
    const std::array<double, 2> xi = {rng.uniform(-3.0, 3.0) * p.k_s, rng.uniform(-3.0, 3.0) * p.k_s};
    const Vec3c u = random_vec(rng);
    const auto sym = dtn_symbol(xi, p);
    const ModeAmplitude a = decompose_mode(xi, u, p);
    const Vec3c w(xi[0], xi[1], sym.gamma);
    EXPECT_LE(std::abs(bdot(w, a.A_s)), 1e-12 * std::max(1.0, w.norm() * a.A_s.norm()));
    EXPECT_LE((mode_boundary_value(xi, a, p) - u).norm(), 1e-12 * u.norm());
    const double r = std::hypot(xi[0], xi[1]);
    if (r < p.k_s)
    {
      EXPECT_NEAR(a.A_s.squaredNorm(), p.k_s * p.k_s * a.A_s_tilde.squaredNorm(),
                  1e-10 * std::max(1.0, a.A_s.squaredNorm()));
    }
  }
  const ModeAmplitude z = decompose_mode({0.3, 0.2}, Vec3c::Zero(), validate_params(1, 1, 1));
  EXPECT_EQ(z.A_p, cplx(0.0, 0.0));
  EXPECT_EQ(z.A_s.norm(), 0.0);
}

TEST(Traction, MatchesSymbolOnRandomTriples)
{
  Stream rng(17, 3);
  for (int i = 0; i < 100; ++i)
  {
    const auto p = random_params(rng);
    const std::array<double, 2> xi = {rng.uniform(-3.0, 3.0) * p.k_s, rng.uniform(-3.0, 3.0) * p.k_s};
    const Vec3c u = random_vec(rng);
    const Vec3c Mu = dtn_symbol(xi, p).M * u;
    const Vec3c t = mode_traction(xi, decompose_mode(xi, u, p), p);
    EXPECT_LE((t - I * Mu).norm(), 1e-10 * Mu.norm()) << "sample " << i;
  }
  EXPECT_EQ(mode_traction({1.0, 2.0}, ModeAmplitude{}, validate_params(1, 1, 1)).norm(), 0.0);
}

TEST(Traction, PressureModeAtZeroFrequency)
{
  const auto p = validate_params(2.0, 1.0, 1.5);
  const Vec3c u(0.0, 0.0, cplx(0.3, 0.4));
  const Vec3c t = mode_traction({0.0, 0.0}, decompose_mode({0.0, 0.0}, u, p), p);
  const Vec3c expected = I * p.omega * std::sqrt(p.lambda + 2.0 * p.mu) * u;
  EXPECT_NEAR((t - expected).norm(), 0.0, 1e-13);
}

TEST(ApplyDtn, ConstantTraceAndAgreementWithTraction)
{
  const auto p = validate_params(1.0, 1.0, 2.0);
  const SpectralGrid g(3, 3, {4.0, 4.0});
  BoundaryTrace c{g, std::vector<Vec3c>(g.size(), Vec3c::Zero())};
  const Vec3c u0(1.0, cplx(0.0, 2.0), -0.5);
  c.coefficients[g.zero_mode()] = u0;
  const auto vals = apply_dtn(c, p).values();
  const Vec3c expected(I * p.omega * std::sqrt(p.mu) * u0(0), I * p.omega * std::sqrt(p.mu) * u0(1),
                       I * p.omega * std::sqrt(p.lambda + 2.0 * p.mu) * u0(2));
  for (const auto &v : vals)
  {
    EXPECT_NEAR((v - expected).norm(), 0.0, 1e-12);
  }

  Stream rng(23, 0);
  const BoundaryTrace t = random_trace(g, rng);
  const BoundaryTrace Tt = apply_dtn(t, p);
  for (int k = 0; k < g.size(); ++k)
  {
    const Vec3c ref = mode_traction(g.xi(k), decompose_mode(g.xi(k), t.coefficients[k], p), p);
    EXPECT_LE((Tt.coefficients[k] - ref).norm(), 1e-10 * std::max(1.0, ref.norm()));
  }
}

TEST(ApplyDtn, MirroredModesFollowSymbolParity)
{
  // For a real trace u(-xi) = conj(u(xi)); the traction at -xi is then fixed by the
  // entrywise parity of the symbol (even diagonal and (1,2) block, odd third row/column).
  const auto p = validate_params(1.0, 1.0, 2.0);
  const SpectralGrid g(2, 3, {4.0, 3.0});
  Stream rng(29, 0);
  BoundaryTrace t = random_trace(g, rng);
  for (int k = 0; k < g.size(); ++k)
  {
    const int m = g.mirror(k);
    if (m < k)
    {
      t.coefficients[k] = t.coefficients[m].conjugate();
    }
  }
  t.coefficients[g.zero_mode()] = t.coefficients[g.zero_mode()].real().cast<cplx>();
  for (const auto &v : t.values())
  {
    EXPECT_NEAR(v.imag().norm(), 0.0, 1e-12);
  }
  const BoundaryTrace Tt = apply_dtn(t, p);
  const Eigen::Vector3d sgn(1.0, 1.0, -1.0);
  for (int k = 0; k < g.size(); ++k)
  {
    const int m = g.mirror(k);
    const Mat3c M = dtn_symbol(g.xi(k), p).M;
    const Mat3c parity = (sgn * sgn.transpose()).cast<cplx>();
    const Mat3c Mm = M.cwiseProduct(parity);
    EXPECT_LE((Tt.coefficients[m] - I * Mm * t.coefficients[k].conjugate()).norm(), 1e-12 * (1.0 + M.norm()));
  }
}

TEST(Extension, IdentityAtBoundary)
{
  Stream rng(31, 0);
  const auto p = validate_params(1.0, 1.0, 2.5);
  const SpectralGrid g(3, 2, {4.0, 4.0});
  const BoundaryTrace t = random_trace(g, rng);
  const auto base = t.values();
  const auto ext = extend_field(t, 1.25, 1.25, p);
  ASSERT_EQ(base.size(), ext.size());
  for (std::size_t i = 0; i < ext.size(); ++i)
  {
    EXPECT_LE((ext[i] - base[i]).norm(), 1e-12 * std::max(1.0, base[i].norm()));
  }
  const auto back = BoundaryTrace::from_values(g, base);
  for (int k = 0; k < g.size(); ++k)
  {
    EXPECT_NEAR((back.coefficients[k] - t.coefficients[k]).norm(), 0.0, 1e-13);
  }
}

TEST(Extension, EvanescentDecay)
{
  const auto p = validate_params(1.0, 1.0, 1.0);
  const SpectralGrid g(3, 0, {4.0, 4.0});
  BoundaryTrace t{g, std::vector<Vec3c>(g.size(), Vec3c::Zero())};
  const int k = g.index(3, 0);  // |xi| = 3 pi / 2 > k_s
  const auto sym = dtn_symbol(g.xi(k), p);
  // A pure shear mode decays with gamma alone.
  const Vec3c w(g.xi(k)[0], 0.0, sym.gamma);
  t.coefficients[k] = bilinear_cross(w, Vec3c(0.0, 1.0, 0.0));
  for (double dt : {0.1, 0.3, 0.7})
  {
    const auto e = extend_field(t, 1.0, 1.0 + dt, p);
    const auto b = t.values();
    const double ratio = e[0].norm() / b[0].norm();
    EXPECT_NEAR(ratio, std::exp(-sym.gamma.imag() * dt), 1e-12);
  }
}

TEST(Extension, SatisfiesNavierEquation)
{
  const auto p = validate_params(1.0, 1.0, 3.0);
  const std::array<double, 2> xi = {std::numbers::pi / 2.0, -std::numbers::pi / 2.0};  // propagating
  const auto sym = dtn_symbol(xi, p);
  Mat3c Mp, Ms;
  propagation_matrices(sym, Mp, Ms);
  const Vec3c u0(0.3, cplx(-0.2, 0.5), 0.8);
  const auto field = [&](double x1, double x2, double x3) {
    const double t = x3 - 1.0;
    return Vec3c(std::exp(I * (xi[0] * x1 + xi[1] * x2)) *
                 ((Mp * std::exp(I * sym.beta * t) + Ms * std::exp(I * sym.gamma * t)) / sym.rho * u0));
  };
  const Eigen::Vector3d x0(0.3, 0.7, 1.4);
  const auto residual = [&](double s) {
    // Central differences for mu Lap u + (lambda + mu) grad div u + omega^2 u.
    std::array<std::array<Vec3c, 3>, 3> H;  // H[a][b] = d_a d_b u
    for (int a = 0; a < 3; ++a)
    {
      for (int b = 0; b < 3; ++b)
      {
        auto at = [&](double da, double db) {
          Eigen::Vector3d x = x0;
          x(a) += da;
          x(b) += db;
          return field(x(0), x(1), x(2));
        };
        if (a == b)
        {
          H[a][b] = (at(s, 0) - 2.0 * at(0, 0) + at(-s, 0)) / (s * s);
        }
        else
        {
          H[a][b] = (at(s, s) - at(s, -s) - at(-s, s) + at(-s, -s)) / (4.0 * s * s);
        }
      }
    }
    Vec3c r = p.omega * p.omega * field(x0(0), x0(1), x0(2));
    for (int c = 0; c < 3; ++c)
    {
      for (int a = 0; a < 3; ++a)
      {
        r(c) += p.mu * H[a][a](c) + (p.lambda + p.mu) * H[c][a](a);
      }
    }
    return r.norm();
  };
  const double r1 = residual(0.02), r2 = residual(0.01);
  EXPECT_LT(r1, 1e-2);
  EXPECT_NEAR(r1 / r2, 4.0, 0.2);
}

TEST(Flux, PowerEqualsBoundaryFluxAndIsNonnegative)
{
  Stream rng(37, 0);
  for (int i = 0; i < 20; ++i)
  {
    const auto p = random_params(rng);
    const SpectralGrid g(3, 3, {rng.uniform(2.0, 6.0), rng.uniform(2.0, 6.0)});
    const BoundaryTrace t = random_trace(g, rng);
    const double flux = boundary_flux(t, p);
    const double power = radiated_power(t, p);
    EXPECT_GE(power, 0.0);
    EXPECT_LE(std::abs(flux - power), 1e-10 * std::max(std::abs(flux), 1e-14));

    // Physical-space quadrature of Im conj(u) . T u against the mode sum.
    const auto u = t.values();
    const auto Tu = apply_dtn(t, p).values();
    double q = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j)
    {
      q += u[j].dot(Tu[j]).imag();
    }
    q *= g.cell_area() / static_cast<double>(u.size());
    EXPECT_LE(std::abs(q - flux), 1e-10 * std::max(std::abs(flux), 1e-14));
  }
  const SpectralGrid g(1, 1, {1.0, 1.0});
  const BoundaryTrace zero{g, std::vector<Vec3c>(g.size(), Vec3c::Zero())};
  EXPECT_EQ(radiated_power(zero, validate_params(1, 1, 1)), 0.0);
}
