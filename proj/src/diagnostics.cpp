#include "elastorough/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <fmt/core.h>

#include "elastorough/errors.hpp"
#include "elastorough/rng.hpp"

namespace elastorough
{

namespace
{

const cplx I(0.0, 1.0);

// Weights of the derivative at z0 of the quadratic through (z0, z1, z2).
std::array<double, 3> one_sided_weights(double z0, double z1, double z2)
{
  const double d1 = z1 - z0, d2 = z2 - z0;
  const double w1 = d2 / (d1 * (d2 - d1));
  const double w2 = -d1 / (d2 * (d2 - d1));
  return {-(w1 + w2), w1, w2};
}

Mat3c stress(const Mat3c &P, const ElasticParams &p)
{
  Mat3c s = p.mu * (P + P.transpose());
  s.diagonal().array() += p.lambda * P.trace();
  return s;
}

double energy_density(const Mat3c &P, const ElasticParams &p)
{
  return (stress(P, p).array() * P.conjugate().array()).sum().real();
}

Mat3c mode_gradient(std::array<double, 2> xi, const Vec3c &u, const Vec3c &du)
{
  Mat3c P;
  P.col(0) = I * xi[0] * u;
  P.col(1) = I * xi[1] * u;
  P.col(2) = du;
  return P;
}

}  // namespace

EnergyBalance energy_balance(const DiscreteField &u, const LinearSystem &sys)
{
  EnergyBalance eb;
  const BoundaryTrace top = u.top_trace();
  eb.boundary_flux = boundary_flux(top, sys.params);
  // rhs = -int g conj(v), so u^H rhs = -int g . conj(u).
  eb.source_term = -u.coefficients.dot(sys.rhs).imag();
  eb.residual = std::abs(eb.boundary_flux - eb.source_term) / std::max(std::abs(eb.source_term), 1e-14);
  eb.radiated_power = radiated_power(top, sys.params);
  eb.power_mismatch =
    std::abs(eb.radiated_power - eb.boundary_flux) / std::max(std::abs(eb.boundary_flux), 1e-14);
  return eb;
}

void require_energy_balance(const EnergyBalance &eb, double tol, double power_floor)
{
  if (!(eb.residual <= tol))
  {
    throw InvariantViolation(fmt::format("energy balance residual {:.3e} exceeds {:.1e}", eb.residual, tol));
  }
  if (!(eb.radiated_power >= -power_floor))
  {
    throw InvariantViolation(fmt::format("negative radiated power {:.3e}", eb.radiated_power));
  }
}

PoincareCheck poincare_check(const DiscreteField &u, double slack)
{
  const auto n = box_norms(u);
  PoincareCheck pc;
  pc.l2_sq = n.l2_sq;
  pc.bound = (u.mesh->h() - u.mesh->z_bottom()) * n.dz_sq;
  pc.holds = pc.l2_sq <= pc.bound + slack * std::max(1.0, pc.bound);
  return pc;
}

CoercivityReport coercivity_probe(std::shared_ptr<const StripMesh> mesh, const ElasticParams &params, int n_probes,
                                  std::uint64_t seed)
{
  if (n_probes <= 0)
  {
    throw ConstraintViolation("n_probes must be positive");
  }
  const StripMesh &m = *mesh;
  const FlatOperator op(mesh, params);
  const int nk = m.grid.size(), nb = m.block_size();
  std::vector<Eigen::MatrixXcd> H(nk), G(nk);
  CoercivityReport rep;
  rep.n_probes = n_probes;
  rep.rayleigh_min = std::numeric_limits<double>::infinity();
  for (int k = 0; k < nk; ++k)
  {
    const Eigen::MatrixXcd A(op.block(k));
    H[k] = 0.5 * (A + A.adjoint());
    G[k] = Eigen::MatrixXcd(op.gram_block(k));
    const Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXcd> es(H[k], G[k], Eigen::EigenvaluesOnly);
    rep.rayleigh_min = std::min(rep.rayleigh_min, es.eigenvalues().minCoeff());
  }

  const double area = m.grid.cell_area();
  const double depth = m.h() - m.z_bottom();
  rep.probe_min = std::numeric_limits<double>::infinity();
  double c0 = 0.0;
  for (int i = 0; i < n_probes; ++i)
  {
    Stream rng(seed, static_cast<std::uint64_t>(i));
    DiscreteField v;
    v.mesh = mesh;
    v.coefficients = CVec::Zero(m.unknowns());
    if (i % 2 == 0)
    {
      for (Eigen::Index d = 0; d < v.coefficients.size(); ++d)
      {
        v.coefficients(d) = cplx(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
      }
    }
    else
    {
      // A few low vertical sine modes on a few lattice modes.
      for (int k = 0; k < nk; ++k)
      {
        const double decay = 1.0 / (1.0 + std::abs(m.grid.j1(k)) + std::abs(m.grid.j2(k)));
        for (int s = 1; s <= 3; ++s)
        {
          Vec3c amp;
          for (int c = 0; c < 3; ++c)
          {
            amp(c) = decay * cplx(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)) / double(s);
          }
          for (int node = 1; node <= m.Nz(); ++node)
          {
            const double t = (m.z[node] - m.z_bottom()) / depth;
            v.coefficients.segment<3>(m.dof(k, node, 0)) += amp * std::sin((s - 0.5) * std::numbers::pi * t);
          }
        }
      }
    }
    double reB = 0.0, vnorm = 0.0;
    for (int k = 0; k < nk; ++k)
    {
      const auto seg = v.coefficients.segment(static_cast<Eigen::Index>(k) * nb, nb);
      reB += seg.dot(H[k] * seg).real();
      vnorm += seg.dot(G[k] * seg).real();
    }
    rep.probe_min = std::min(rep.probe_min, reB / vnorm);

    const auto bn = box_norms(v);
    double half = 0.0;
    for (int k = 0; k < nk; ++k)
    {
      half += std::sqrt(1.0 + std::pow(m.grid.xi_norm(k), 2)) * v.at(k, m.Nz()).squaredNorm();
    }
    half *= area;
    const double vh2 = bn.l2_sq + bn.grad_sq;
    c0 = std::max({c0, vh2 / bn.grad_sq, half / vh2});
  }
  rep.C0_estimate = c0;
  const auto sc = stability_constants(params);
  rep.predicted_lower = params.mu / c0 - params.omega * c0 * sc.C_K - params.omega * params.omega * depth;
  return rep;
}

ModalSourceFn modal_source(const SourceTerm &g, const SpectralGrid &grid)
{
  auto ft = std::make_shared<FourierTransform>(grid, dealiased_size(grid.n1()), dealiased_size(grid.n2()));
  return [g, ft](double z) {
    const int P = ft->points();
    std::vector<Vec3c> vals(P), modes(ft->grid().size());
    for (int p = 0; p < P; ++p)
    {
      const auto x = ft->point(p);
      vals[p] = g.value(Eigen::Vector3d(x[0], x[1], z));
    }
    for (int c = 0; c < 3; ++c)
    {
      ft->to_modes(vals[0].data() + c, modes[0].data() + c, 3);
    }
    return modes;
  };
}

RellichReport rellich_residual(const DiscreteField &u, const ModalSourceFn &g, const ElasticParams &params,
                               const StripMap &map, TopTraction top_mode)
{
  if (!map.is_identity())
  {
    throw UnsupportedConfiguration("the Rellich diagnostic is restricted to flat surfaces");
  }
  const StripMesh &m = *u.mesh;
  if (m.Nz() < 2)
  {
    throw ConstraintViolation("the Rellich diagnostic needs at least two elements");
  }
  const double area = m.grid.cell_area(), w2 = params.omega * params.omega;
  const int nk = m.grid.size(), Nz = m.Nz();
  RellichReport rep;

  // Volume term with the piecewise-constant d3 u.
  const QuadRule rule = gauss_rule(5);
  double vol = 0.0;
  for (int e = 0; e < Nz; ++e)
  {
    const double hz = m.z[e + 1] - m.z[e];
    std::vector<Vec3c> du(nk);
    for (int k = 0; k < nk; ++k)
    {
      du[k] = (u.at(k, e + 1) - u.at(k, e)) / hz;
    }
    for (std::size_t q = 0; q < rule.s.size(); ++q)
    {
      const auto gm = g(m.z[e] + rule.s[q] * hz);
      double s = 0.0;
      for (int k = 0; k < nk; ++k)
      {
        s += du[k].dot(gm[k]).real();
      }
      vol += rule.w[q] * hz * s;
    }
  }
  rep.volume = 2.0 * area * vol;

  const auto wt = one_sided_weights(m.z[Nz], m.z[Nz - 1], m.z[Nz - 2]);
  const auto wb = one_sided_weights(m.z[0], m.z[1], m.z[2]);
  double top = 0.0, bottom = 0.0;
  for (int k = 0; k < nk; ++k)
  {
    const auto xi = m.grid.xi(k);
    const Vec3c ut = u.at(k, Nz);
    const Vec3c dut = wt[0] * ut + wt[1] * u.at(k, Nz - 1) + wt[2] * u.at(k, Nz - 2);
    const Mat3c Pt = mode_gradient(xi, ut, dut);
    const Vec3c Tt = top_mode == TopTraction::Dtn ? Vec3c(I * (dtn_symbol(xi, params).M * ut))
                                                  : Vec3c(stress(Pt, params).col(2));
    top += 2.0 * dut.dot(Tt).real() - energy_density(Pt, params) + w2 * ut.squaredNorm();

    const Vec3c dub = wb[1] * u.at(k, 1) + wb[2] * u.at(k, 2);
    const Mat3c Pb = mode_gradient(xi, Vec3c::Zero(), dub);
    const Vec3c Tb = stress(Pb, params).col(2);
    bottom += 2.0 * dub.dot(Tb).real() - energy_density(Pb, params);
  }
  rep.top = area * top;
  rep.bottom = area * bottom;
  const double scale = std::max({std::abs(rep.volume), std::abs(rep.top), std::abs(rep.bottom), 1e-300});
  rep.residual = std::abs(rep.volume - (rep.top - rep.bottom)) / scale;
  return rep;
}

}  // namespace elastorough
