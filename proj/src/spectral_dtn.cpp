#include "elastorough/spectral_dtn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "elastorough/errors.hpp"
#include "elastorough/rng.hpp"

namespace elastorough
{

Vec3c bilinear_cross(const Vec3c &a, const Vec3c &b)
{
  return Vec3c(a(1) * b(2) - a(2) * b(1), a(2) * b(0) - a(0) * b(2), a(0) * b(1) - a(1) * b(0));
}

namespace
{

const cplx I(0.0, 1.0);

// Traction 2 mu d3 u + lambda div(u) e3 + mu e3 x curl(u) of a plane wave a e^{i w . x} at
// the plane, where w = (xi1, xi2, kappa).
Vec3c plane_wave_traction(const Vec3c &w, const Vec3c &a, const ElasticParams &p)
{
  const Vec3c e3(0.0, 0.0, 1.0);
  // Bilinear products: Eigen's dot() would conjugate w.
  const cplx div_u = I * (w(0) * a(0) + w(1) * a(1) + w(2) * a(2));
  const Vec3c curl_u = I * bilinear_cross(w, a);
  const Vec3c d3u = I * w(2) * a;
  return 2.0 * p.mu * d3u + p.lambda * div_u * e3 + p.mu * bilinear_cross(e3, curl_u);
}

}  // namespace

DecompositionMatrices decomposition_matrices(std::array<double, 2> xi, const ElasticParams &p)
{
  const double r = std::hypot(xi[0], xi[1]);
  const cplx beta = vertical_wavenumber(p.k_p, r);
  const cplx gamma = vertical_wavenumber(p.k_s, r);
  DecompositionMatrices out;
  auto &Dt = out.D_tilde;
  Dt << xi[0], 1.0, 0.0, 0.0,
        xi[1], 0.0, 1.0, 0.0,
        beta, 0.0, 0.0, 1.0,
        0.0, xi[0], xi[1], gamma;
  const cplx det = beta * gamma + r * r;
  if (std::abs(det) <= 1e-14 * std::max(1.0, r * r))
  {
    throw NumericalFailure("decomposition matrix is singular");
  }
  const Eigen::Matrix4cd inv = Dt.partialPivLu().inverse();
  out.D = inv.leftCols<3>();
  return out;
}

DtnSymbol dtn_symbol(std::array<double, 2> xi, const ElasticParams &p)
{
  const double x1 = xi[0], x2 = xi[1];
  const double r2 = x1 * x1 + x2 * x2;
  const double r = std::sqrt(r2);
  DtnSymbol s;
  s.xi = xi;
  s.beta = vertical_wavenumber(p.k_p, r);
  s.gamma = vertical_wavenumber(p.k_s, r);
  const cplx bg = s.beta * s.gamma;
  s.rho = r2 + bg;
  const double mu = p.mu, w2 = p.omega * p.omega, ks2 = p.k_s * p.k_s;
  const cplx gb = s.gamma - s.beta;
  const cplx c = 2.0 * mu * r2 - w2 + 2.0 * mu * bg;
  s.M << mu * (gb * x2 * x2 + ks2 * s.beta), -mu * x1 * x2 * gb, c * x1,
         -mu * x1 * x2 * gb, mu * (gb * x1 * x1 + ks2 * s.beta), c * x2,
         -c * x1, -c * x2, s.gamma * w2;
  s.M /= s.rho;
  return s;
}

void propagation_matrices(const DtnSymbol &s, Mat3c &M_p, Mat3c &M_s)
{
  const double x1 = s.xi[0], x2 = s.xi[1];
  const cplx b = s.beta, g = s.gamma, bg = b * g;
  M_p << x1 * x1, x1 * x2, x1 * g,
         x1 * x2, x2 * x2, x2 * g,
         x1 * b, x2 * b, bg;
  M_s << bg + x2 * x2, -x1 * x2, -g * x1,
         -x1 * x2, bg + x1 * x1, -g * x2,
         -x1 * b, -x2 * b, x1 * x1 + x2 * x2;
}

std::vector<Vec3c> BoundaryTrace::values() const
{
  FourierTransform ft(grid, grid.n1(), grid.n2());
  std::vector<Vec3c> out(grid.size());
  for (int c = 0; c < 3; ++c)
  {
    ft.to_physical(coefficients[0].data() + c, out[0].data() + c, 3);
  }
  return out;
}

BoundaryTrace BoundaryTrace::from_values(const SpectralGrid &grid, const std::vector<Vec3c> &values)
{
  if (static_cast<int>(values.size()) != grid.size())
  {
    throw ConstraintViolation("trace values do not match the collocation grid");
  }
  FourierTransform ft(grid, grid.n1(), grid.n2());
  BoundaryTrace t{grid, std::vector<Vec3c>(grid.size())};
  for (int c = 0; c < 3; ++c)
  {
    ft.to_modes(values[0].data() + c, t.coefficients[0].data() + c, 3);
  }
  return t;
}

ModeAmplitude decompose_mode(std::array<double, 2> xi, const Vec3c &u_hat, const ElasticParams &p)
{
  const auto dm = decomposition_matrices(xi, p);
  const Eigen::Vector4cd A = dm.D * u_hat;
  ModeAmplitude a;
  a.A_p = A(0);
  a.A_s = A.tail<3>();
  const Vec3c w(xi[0], xi[1], vertical_wavenumber(p.k_s, xi));
  a.A_s_tilde = -bilinear_cross(w, a.A_s) / (p.k_s * p.k_s);
  return a;
}

ModeAmplitudes decompose_trace(const BoundaryTrace &trace, const ElasticParams &p)
{
  ModeAmplitudes out(trace.grid.size());
  for (int k = 0; k < trace.grid.size(); ++k)
  {
    out[k] = decompose_mode(trace.grid.xi(k), trace.coefficients[k], p);
  }
  return out;
}

Vec3c mode_boundary_value(std::array<double, 2> xi, const ModeAmplitude &a, const ElasticParams &p)
{
  const Vec3c dir(xi[0], xi[1], vertical_wavenumber(p.k_p, xi));
  return a.A_p * dir + a.A_s;
}

std::vector<Vec3c> extend_field(const BoundaryTrace &trace, double h, double x3, const ElasticParams &p)
{
  if (!(x3 >= h))
  {
    throw ConstraintViolation("extension height must satisfy x3 >= h");
  }
  const double t = x3 - h;
  BoundaryTrace up{trace.grid, std::vector<Vec3c>(trace.grid.size())};
  for (int k = 0; k < trace.grid.size(); ++k)
  {
    const DtnSymbol s = dtn_symbol(trace.grid.xi(k), p);
    Mat3c Mp, Ms;
    propagation_matrices(s, Mp, Ms);
    const Mat3c P = (Mp * std::exp(I * s.beta * t) + Ms * std::exp(I * s.gamma * t)) / s.rho;
    up.coefficients[k] = P * trace.coefficients[k];
  }
  return up.values();
}

Vec3c mode_traction(std::array<double, 2> xi, const ModeAmplitude &a, const ElasticParams &p)
{
  const cplx beta = vertical_wavenumber(p.k_p, xi);
  const cplx gamma = vertical_wavenumber(p.k_s, xi);
  const Vec3c wp(xi[0], xi[1], beta);
  const Vec3c ws(xi[0], xi[1], gamma);
  return plane_wave_traction(wp, a.A_p * wp, p) + plane_wave_traction(ws, a.A_s, p);
}

BoundaryTrace apply_dtn(const BoundaryTrace &trace, const ElasticParams &p)
{
  BoundaryTrace out{trace.grid, std::vector<Vec3c>(trace.grid.size())};
  for (int k = 0; k < trace.grid.size(); ++k)
  {
    out.coefficients[k] = I * (dtn_symbol(trace.grid.xi(k), p).M * trace.coefficients[k]);
  }
  return out;
}

double radiated_power(const BoundaryTrace &trace, const ElasticParams &p)
{
  const auto amps = decompose_trace(trace, p);
  double sum = 0.0;
  for (int k = 0; k < trace.grid.size(); ++k)
  {
    const double r = trace.grid.xi_norm(k);
    if (r < p.k_p)
    {
      sum += vertical_wavenumber(p.k_p, r).real() * std::norm(amps[k].A_p);
    }
    if (r < p.k_s)
    {
      sum += vertical_wavenumber(p.k_s, r).real() * amps[k].A_s_tilde.squaredNorm();
    }
  }
  return p.omega * p.omega * sum * trace.grid.cell_area();
}

double boundary_flux(const BoundaryTrace &trace, const ElasticParams &p)
{
  double sum = 0.0;
  for (int k = 0; k < trace.grid.size(); ++k)
  {
    const Vec3c &u = trace.coefficients[k];
    const Vec3c Tu = I * (dtn_symbol(trace.grid.xi(k), p).M * u);
    sum += u.dot(Tu).imag();  // Eigen's dot conjugates the left operand
  }
  return sum * trace.grid.cell_area();
}

SymbolBoundsReport verify_symbol_bounds(const ElasticParams &p, int n_samples, std::uint64_t seed,
                                      double slack)
{
  if (n_samples <= 0)
  {
    throw ConstraintViolation("n_samples must be positive");
  }
  const auto sc = stability_constants(p);
  const double w = p.omega, Kw = sc.K * w;
  const double kp = p.k_p, ks = p.k_s;
  const double gap_bound = std::sqrt(ks * ks - kp * kp);

  SymbolBoundsReport rep;
  rep.n_samples = n_samples;
  rep.min_eig_outer = std::numeric_limits<double>::infinity();
  rep.min_rho_band_ratio = std::numeric_limits<double>::infinity();

  Stream outer(seed, 1), inner(seed, 2);
  for (int i = 0; i < n_samples; ++i)
  {
    // Outer annulus: Re(-iM) positive definite.
    {
      const double r = Kw * (10.0 - 9.0 * outer.uniform());  // (Kw, 10 Kw]
      const double th = 2.0 * std::numbers::pi * outer.uniform();
      const std::array<double, 2> xi = {r * std::cos(th), r * std::sin(th)};
      const Mat3c A = -I * dtn_symbol(xi, p).M;
      const Mat3c herm = 0.5 * (A + A.adjoint());
      const double e = Eigen::SelfAdjointEigenSolver<Mat3c>(herm, Eigen::EigenvaluesOnly)
                         .eigenvalues()
                         .minCoeff();
      rep.min_eig_outer = std::min(rep.min_eig_outer, e);
      if (!(e > 0.0))
      {
        rep.violations.push_back({"re_minus_iM_positive", xi, e});
      }
    }
    // Inner disk: entry bound, rho bands, |gamma - beta|.
    {
      const double r = Kw * inner.uniform();
      const double th = 2.0 * std::numbers::pi * inner.uniform();
      const std::array<double, 2> xi = {r * std::cos(th), r * std::sin(th)};
      const DtnSymbol s = dtn_symbol(xi, p);
      const double ratio = s.M.cwiseAbs().maxCoeff() / (sc.C_K * w);
      rep.max_ratio_inner = std::max(rep.max_ratio_inner, ratio);
      if (ratio > 1.0 + slack)
      {
        rep.violations.push_back({"entry_bound", xi, ratio});
      }

      const double arho = std::abs(s.rho);
      const double lower = r <= ks ? kp * kp : sc.c_K * w * w;
      const double upper = r <= kp ? kp * ks : ks * ks;
      rep.min_rho_band_ratio = std::min(rep.min_rho_band_ratio, arho / lower);
      if (arho < lower * (1.0 - slack) || arho > upper * (1.0 + slack))
      {
        rep.violations.push_back({"rho_band", xi, arho});
      }

      const double gap = std::abs(s.gamma - s.beta);
      rep.max_gap_ratio = std::max(rep.max_gap_ratio, gap / gap_bound);
      const bool equality_band = r > kp && r <= ks;
      const bool bad = equality_band ? std::abs(gap - gap_bound) > slack * std::max(1.0, gap_bound) * 1e3
                                     : gap > gap_bound * (1.0 + slack);
      if (bad)
      {
        rep.violations.push_back({"gamma_minus_beta", xi, gap});
      }
    }
  }
  return rep;
}

}  // namespace elastorough
