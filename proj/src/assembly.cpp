#include <array>
#include <cmath>
#include <mutex>

#include <Eigen/SparseLU>
#include <fmt/core.h>

#include "elastorough/errors.hpp"
#include "elastorough/parallel.hpp"
#include "elastorough/variational.hpp"

namespace elastorough
{

namespace
{

const cplx I(0.0, 1.0);

struct LocalBasis
{
  std::array<double, 2> phi;
  std::array<double, 2> dphi;
};

LocalBasis basis(double s, double hz)
{
  return {{1.0 - s, s}, {-1.0 / hz, 1.0 / hz}};
}

std::vector<MappedOperator::QuadPoint> build_quad_points(const StripMesh &mesh, const StripMap &map,
                                                        const FourierTransform &ft)
{
  const QuadRule rule = gauss_rule(mesh.quad_points);
  const int P = ft.points();
  std::vector<StripMap::Column> cols(P);
  for (int p = 0; p < P; ++p)
  {
    const auto x = ft.point(p);
    cols[p] = map.column(x[0], x[1]);
  }
  std::vector<MappedOperator::QuadPoint> qps;
  qps.reserve(static_cast<std::size_t>(mesh.Nz()) * rule.s.size());
  for (int e = 0; e < mesh.Nz(); ++e)
  {
    const double hz = mesh.z[e + 1] - mesh.z[e];
    for (std::size_t g = 0; g < rule.s.size(); ++g)
    {
      MappedOperator::QuadPoint q;
      q.element = e;
      q.s = rule.s[g];
      q.weight = rule.w[g] * hz;
      q.z = mesh.z[e] + rule.s[g] * hz;
      q.y3.resize(P);
      q.det.resize(P);
      q.a.resize(P);
      for (int p = 0; p < P; ++p)
      {
        const auto pt = map.eval(cols[p], q.z);
        q.y3[p] = pt.y3;
        q.det[p] = pt.det;
        q.a[p] = pt.a;
      }
      qps.push_back(std::move(q));
    }
  }
  return qps;
}

std::unique_ptr<FourierTransform> padded_transform(const SpectralGrid &grid)
{
  return std::make_unique<FourierTransform>(grid, dealiased_size(grid.n1()), dealiased_size(grid.n2()));
}

void add_dtn_top(const StripMesh &mesh, const ElasticParams &params, const CVec &in, CVec &out)
{
  const double area = mesh.grid.cell_area();
  const int top = mesh.Nz();
  for (int k = 0; k < mesh.grid.size(); ++k)
  {
    const Mat3c M = dtn_symbol(mesh.grid.xi(k), params).M;
    const Eigen::Index d = mesh.dof(k, top, 0);
    out.segment<3>(d) -= area * I * (M * in.segment<3>(d));
  }
}

}  // namespace

SourceFn as_source_fn(const SourceTerm &g)
{
  return [g](const Eigen::Vector3d &y) { return g.value(y); };
}

// ---------------------------------------------------------------------------------------
// Flat operator

struct FlatOperator::Factors
{
  std::once_flag once;
  std::vector<std::unique_ptr<Eigen::SparseLU<SpMat>>> lu;
  std::vector<std::string> errors;
};

FlatOperator::FlatOperator(std::shared_ptr<const StripMesh> mesh, const ElasticParams &params)
  : mesh_(std::move(mesh)), params_(params), factors_(std::make_shared<Factors>())
{
  const StripMesh &m = *mesh_;
  const QuadRule rule = gauss_rule(m.quad_points);
  const double area = m.grid.cell_area();
  const double lam = params.lambda, mu = params.mu, w2 = params.omega * params.omega;
  const int nb = m.block_size();
  blocks_.resize(m.grid.size());

  for (int k = 0; k < m.grid.size(); ++k)
  {
    const auto xi = m.grid.xi(k);
    std::vector<Eigen::Triplet<cplx>> trip;
    trip.reserve(static_cast<std::size_t>(m.Nz()) * 36 + 9);
    for (int e = 0; e < m.Nz(); ++e)
    {
      const double hz = m.z[e + 1] - m.z[e];
      // Local 6 x 6 element matrix, index a * 3 + c.
      Eigen::Matrix<cplx, 6, 6> Ke = Eigen::Matrix<cplx, 6, 6>::Zero();
      for (std::size_t q = 0; q < rule.s.size(); ++q)
      {
        const auto b = basis(rule.s[q], hz);
        const double wq = rule.w[q] * hz;
        for (int am = 0; am < 2; ++am)
        {
          const Vec3c gm(I * xi[0] * b.phi[am], I * xi[1] * b.phi[am], b.dphi[am]);
          for (int an = 0; an < 2; ++an)
          {
            const Vec3c gn(I * xi[0] * b.phi[an], I * xi[1] * b.phi[an], b.dphi[an]);
            const cplx gg = gm.dot(gn);  // sum conj(gm) gn
            for (int cp = 0; cp < 3; ++cp)
            {
              for (int c = 0; c < 3; ++c)
              {
                cplx v = mu * gn(cp) * std::conj(gm(c)) + lam * gn(c) * std::conj(gm(cp));
                if (c == cp)
                {
                  v += mu * gg - w2 * b.phi[an] * b.phi[am];
                }
                Ke(am * 3 + cp, an * 3 + c) += wq * v;
              }
            }
          }
        }
      }
      for (int am = 0; am < 2; ++am)
      {
        const int nm = e + am;
        if (nm == 0)
        {
          continue;
        }
        for (int an = 0; an < 2; ++an)
        {
          const int nn = e + an;
          if (nn == 0)
          {
            continue;
          }
          for (int cp = 0; cp < 3; ++cp)
          {
            for (int c = 0; c < 3; ++c)
            {
              trip.emplace_back((nm - 1) * 3 + cp, (nn - 1) * 3 + c, area * Ke(am * 3 + cp, an * 3 + c));
            }
          }
        }
      }
    }
    const Mat3c M = dtn_symbol(xi, params).M;
    const int top = (m.Nz() - 1) * 3;
    for (int cp = 0; cp < 3; ++cp)
    {
      for (int c = 0; c < 3; ++c)
      {
        trip.emplace_back(top + cp, top + c, -area * I * M(cp, c));
      }
    }
    SpMat A(nb, nb);
    A.setFromTriplets(trip.begin(), trip.end());
    A.makeCompressed();
    blocks_[k] = std::move(A);
  }
}

SpMat FlatOperator::gram_block(int k) const
{
  const StripMesh &m = *mesh_;
  const QuadRule rule = gauss_rule(std::max(2, m.quad_points));
  const double area = m.grid.cell_area();
  const auto xi = m.grid.xi(k);
  const double xi2 = xi[0] * xi[0] + xi[1] * xi[1];
  std::vector<Eigen::Triplet<cplx>> trip;
  for (int e = 0; e < m.Nz(); ++e)
  {
    const double hz = m.z[e + 1] - m.z[e];
    for (int am = 0; am < 2; ++am)
    {
      for (int an = 0; an < 2; ++an)
      {
        if (e + am == 0 || e + an == 0)
        {
          continue;
        }
        double v = 0.0;
        for (std::size_t q = 0; q < rule.s.size(); ++q)
        {
          const auto b = basis(rule.s[q], hz);
          v += rule.w[q] * hz * ((1.0 + xi2) * b.phi[am] * b.phi[an] + b.dphi[am] * b.dphi[an]);
        }
        for (int c = 0; c < 3; ++c)
        {
          trip.emplace_back((e + am - 1) * 3 + c, (e + an - 1) * 3 + c, area * v);
        }
      }
    }
  }
  SpMat G(m.block_size(), m.block_size());
  G.setFromTriplets(trip.begin(), trip.end());
  return G;
}

SpMat FlatOperator::dtn_block(int k) const
{
  const StripMesh &m = *mesh_;
  const Mat3c M = dtn_symbol(m.grid.xi(k), params_).M;
  const int top = (m.Nz() - 1) * 3;
  std::vector<Eigen::Triplet<cplx>> trip;
  for (int cp = 0; cp < 3; ++cp)
  {
    for (int c = 0; c < 3; ++c)
    {
      trip.emplace_back(top + cp, top + c, -m.grid.cell_area() * I * M(cp, c));
    }
  }
  SpMat D(m.block_size(), m.block_size());
  D.setFromTriplets(trip.begin(), trip.end());
  return D;
}

void FlatOperator::apply(const CVec &in, CVec &out) const
{
  const int nb = mesh_->block_size();
  out.resize(in.size());
  parallel_for(mesh_->grid.size(), [&](int k) {
    out.segment(static_cast<Eigen::Index>(k) * nb, nb) = blocks_[k] * in.segment(static_cast<Eigen::Index>(k) * nb, nb);
  });
}

void FlatOperator::factorize() const
{
  auto f = factors_;
  std::call_once(f->once, [&] {
    const int n = mesh_->grid.size();
    f->lu.resize(n);
    f->errors.assign(n, {});
    parallel_for(n, [&](int k) {
      auto lu = std::make_unique<Eigen::SparseLU<SpMat>>();
      lu->analyzePattern(blocks_[k]);
      lu->factorize(blocks_[k]);
      if (lu->info() != Eigen::Success)
      {
        f->errors[k] = lu->lastErrorMessage();
      }
      f->lu[k] = std::move(lu);
    });
  });
  for (int k = 0; k < mesh_->grid.size(); ++k)
  {
    if (!f->errors[k].empty())
    {
      throw NumericalFailure(fmt::format("singular block for mode (j1, j2) = ({}, {}): {}", mesh_->grid.j1(k),
                                         mesh_->grid.j2(k), f->errors[k]));
    }
  }
}

void FlatOperator::solve(const CVec &rhs, CVec &out) const
{
  factorize();
  const int nb = mesh_->block_size();
  out.resize(rhs.size());
  parallel_for(mesh_->grid.size(), [&](int k) {
    const Eigen::Index off = static_cast<Eigen::Index>(k) * nb;
    out.segment(off, nb) = factors_->lu[k]->solve(rhs.segment(off, nb));
  });
}

// ---------------------------------------------------------------------------------------
// Mapped operator

MappedOperator::MappedOperator(std::shared_ptr<const StripMesh> mesh, const ElasticParams &params,
                               const StripMap &map)
  : mesh_(std::move(mesh)), params_(params), ft_(padded_transform(mesh_->grid))
{
  qp_ = build_quad_points(*mesh_, map, *ft_);
}

void MappedOperator::apply(const CVec &in, CVec &out) const
{
  const StripMesh &m = *mesh_;
  const SpectralGrid &grid = m.grid;
  const int nk = grid.size(), P = ft_->points(), Nz = m.Nz();
  const int nq = static_cast<int>(qp_.size()) / Nz;
  const double area = grid.cell_area(), lam = params_.lambda, mu = params_.mu;
  const double w2 = params_.omega * params_.omega;

  // Per element: contributions to its two nodes, [a][k * 3 + c].
  std::vector<std::array<CVec, 2>> contrib(Nz);

  parallel_for(Nz, [&](int e) {
    const double hz = m.z[e + 1] - m.z[e];
    auto &acc = contrib[e];
    acc[0] = CVec::Zero(nk * 3);
    acc[1] = CVec::Zero(nk * 3);
    // Modal inputs: 0..2 u_c, 3 + 3c + j gradient G_{cj}.
    std::vector<CVec> modal(12, CVec(nk)), phys(12, CVec(P)), out_phys(12, CVec(P)), out_modal(12, CVec(nk));
    for (int g = 0; g < nq; ++g)
    {
      const QuadPoint &q = qp_[e * nq + g];
      const auto b = basis(q.s, hz);
      for (int k = 0; k < nk; ++k)
      {
        const auto xi = grid.xi(k);
        for (int c = 0; c < 3; ++c)
        {
          const cplx u0 = e == 0 ? cplx(0.0) : in(m.dof(k, e, c));
          const cplx u1 = in(m.dof(k, e + 1, c));
          const cplx u = b.phi[0] * u0 + b.phi[1] * u1;
          modal[c](k) = u;
          modal[3 + 3 * c + 0](k) = I * xi[0] * u;
          modal[3 + 3 * c + 1](k) = I * xi[1] * u;
          modal[3 + 3 * c + 2](k) = b.dphi[0] * u0 + b.dphi[1] * u1;
        }
      }
      for (int i = 0; i < 12; ++i)
      {
        ft_->to_physical(modal[i].data(), phys[i].data());
      }
      for (int p = 0; p < P; ++p)
      {
        const Eigen::Vector3d &a = q.a[p];
        const double det = q.det[p];
        const double inv1 = 1.0 / (1.0 + a(2));
        Mat3c Pg;
        for (int c = 0; c < 3; ++c)
        {
          const cplx G3 = phys[3 + 3 * c + 2](p);
          for (int j = 0; j < 3; ++j)
          {
            Pg(c, j) = phys[3 + 3 * c + j](p) - G3 * a(j) * inv1;
          }
        }
        const cplx tr = Pg.trace();
        Mat3c sig = mu * (Pg + Pg.transpose());
        sig.diagonal().array() += lam * tr;
        for (int c = 0; c < 3; ++c)
        {
          const cplx sa = sig(c, 0) * a(0) + sig(c, 1) * a(1) + sig(c, 2) * a(2);
          out_phys[3 + 3 * c + 0](p) = det * sig(c, 0);
          out_phys[3 + 3 * c + 1](p) = det * sig(c, 1);
          out_phys[3 + 3 * c + 2](p) = det * (sig(c, 2) - sa * inv1);
          out_phys[c](p) = det * phys[c](p);
        }
      }
      for (int i = 0; i < 12; ++i)
      {
        ft_->to_modes(out_phys[i].data(), out_modal[i].data());
      }
      const double wq = q.weight * area;
      for (int k = 0; k < nk; ++k)
      {
        const auto xi = grid.xi(k);
        for (int c = 0; c < 3; ++c)
        {
          const cplx F1 = out_modal[3 + 3 * c + 0](k), F2 = out_modal[3 + 3 * c + 1](k);
          const cplx F3 = out_modal[3 + 3 * c + 2](k), mm = out_modal[c](k);
          const cplx tang = -I * xi[0] * F1 - I * xi[1] * F2 - w2 * mm;
          for (int a = 0; a < 2; ++a)
          {
            acc[a](k * 3 + c) += wq * (tang * b.phi[a] + F3 * b.dphi[a]);
          }
        }
      }
    }
  });

  out = CVec::Zero(in.size());
  for (int e = 0; e < Nz; ++e)
  {
    for (int a = 0; a < 2; ++a)
    {
      const int node = e + a;
      if (node == 0)
      {
        continue;
      }
      for (int k = 0; k < nk; ++k)
      {
        out.segment<3>(m.dof(k, node, 0)) += contrib[e][a].segment<3>(k * 3);
      }
    }
  }
  add_dtn_top(m, params_, in, out);
}

void LinearSystem::apply(const CVec &in, CVec &out) const
{
  if (mode_coupling)
  {
    mapped->apply(in, out);
  }
  else
  {
    flat->apply(in, out);
  }
}

LinearSystem assemble_system(std::shared_ptr<const StripMesh> mesh, const ElasticParams &params, const StripMap &map,
                             const SourceFn &source, std::shared_ptr<const FlatOperator> preconditioner)
{
  const StripMesh &m = *mesh;
  if (std::abs(map.z_bottom() - m.z_bottom()) > 1e-14 || std::abs(map.h() - m.h()) > 1e-14)
  {
    throw ConstraintViolation("strip map and mesh disagree on the box");
  }
  LinearSystem sys;
  sys.mesh = mesh;
  sys.params = params;
  sys.mode_coupling = !map.is_identity();
  if (preconditioner)
  {
    if (!(preconditioner->mesh().grid == m.grid) || preconditioner->mesh().z != m.z ||
        preconditioner->params().omega != params.omega || preconditioner->params().mu != params.mu ||
        preconditioner->params().lambda != params.lambda)
    {
      throw ConstraintViolation("preconditioner does not match the mesh or parameters");
    }
    sys.flat = std::move(preconditioner);
  }
  else
  {
    sys.flat = std::make_shared<FlatOperator>(mesh, params);
  }
  if (sys.mode_coupling)
  {
    sys.mapped = std::make_shared<MappedOperator>(mesh, params, map);
  }

  // Right-hand side: -int g . conj(v) det dz on the padded grid.
  auto ft_own = sys.mapped ? nullptr : padded_transform(m.grid);
  const FourierTransform &ft = sys.mapped ? sys.mapped->transform() : *ft_own;
  const auto qps = sys.mapped ? sys.mapped->quad_points() : build_quad_points(m, map, ft);
  const int nk = m.grid.size(), P = ft.points();
  const double area = m.grid.cell_area();
  sys.rhs = CVec::Zero(m.unknowns());
  std::vector<Vec3c> vals(P);
  std::vector<Vec3c> modes(nk);
  for (const auto &q : qps)
  {
    const double hz = m.z[q.element + 1] - m.z[q.element];
    const auto b = basis(q.s, hz);
    bool any = false;
    for (int p = 0; p < P; ++p)
    {
      const auto x = ft.point(p);
      vals[p] = source(Eigen::Vector3d(x[0], x[1], q.y3[p])) * q.det[p];
      any = any || !vals[p].isZero(0.0);
    }
    if (!any)
    {
      continue;
    }
    for (int c = 0; c < 3; ++c)
    {
      ft.to_modes(vals[0].data() + c, modes[0].data() + c, 3);
    }
    for (int a = 0; a < 2; ++a)
    {
      const int node = q.element + a;
      if (node == 0)
      {
        continue;
      }
      for (int k = 0; k < nk; ++k)
      {
        sys.rhs.segment<3>(m.dof(k, node, 0)) -= area * q.weight * b.phi[a] * modes[k];
      }
    }
  }
  return sys;
}

LinearSystem assemble_system(std::shared_ptr<const StripMesh> mesh, const ElasticParams &params,
                             const SurfaceProfile &f0, const SurfaceProfile &f, const CutoffFn &cutoff,
                             const SourceTerm &g, std::shared_ptr<const FlatOperator> preconditioner)
{
  const StripMap map(f0, f, cutoff, mesh->z_bottom(), mesh->h());
  return assemble_system(std::move(mesh), params, map, as_source_fn(g), std::move(preconditioner));
}

}  // namespace elastorough
