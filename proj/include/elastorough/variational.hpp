#ifndef ELASTOROUGH_VARIATIONAL_HPP
#define ELASTOROUGH_VARIATIONAL_HPP

#include <complex>
#include <functional>
#include <memory>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "elastorough/elastic_core.hpp"
#include "elastorough/geometry.hpp"
#include "elastorough/krylov.hpp"
#include "elastorough/random_ensemble.hpp"
#include "elastorough/spectral_dtn.hpp"
#include "elastorough/strip_mesh.hpp"

namespace elastorough
{

using CVec = Eigen::VectorXcd;
using SpMat = Eigen::SparseMatrix<cplx>;

// Body force evaluated at a reference-strip point y.
using SourceFn = std::function<Eigen::Vector3cd(const Eigen::Vector3d &y)>;
SourceFn as_source_fn(const SourceTerm &g);

// Displacement coefficients per (mode, vertical node, component) on the box.
struct DiscreteField
{
  std::shared_ptr<const StripMesh> mesh;
  CVec coefficients;  // nodes 1..Nz; the bottom node is implicit
  bool bottom_trace_zero = true;

  Vec3c at(int k, int node) const;  // node 0 returns zero
  BoundaryTrace top_trace() const;
};

//
// Per-mode Galerkin blocks of the identity-map operator (flat reference strip), with an
// LU factorization of each. Shared as a preconditioner across rough solves on one mesh.
//
class FlatOperator
{
public:
  FlatOperator(std::shared_ptr<const StripMesh> mesh, const ElasticParams &params);

  const StripMesh &mesh() const { return *mesh_; }
  const ElasticParams &params() const { return params_; }
  const SpMat &block(int k) const { return blocks_[k]; }

  void apply(const CVec &in, CVec &out) const;
  void solve(const CVec &rhs, CVec &out) const;  // throws NumericalFailure naming the mode
  void factorize() const;

  // Gram matrix of the box H1 inner product for one mode (same layout as block(k)).
  SpMat gram_block(int k) const;
  SpMat dtn_block(int k) const;  // the boundary part alone, -|cell| i M at the top node

private:
  std::shared_ptr<const StripMesh> mesh_;
  ElasticParams params_;
  std::vector<SpMat> blocks_;
  struct Factors;
  mutable std::shared_ptr<Factors> factors_;
};

// Variable-coefficient operator of the mapped strip, applied pseudospectrally.
class MappedOperator
{
public:
  MappedOperator(std::shared_ptr<const StripMesh> mesh, const ElasticParams &params, const StripMap &map);

  void apply(const CVec &in, CVec &out) const;
  const FourierTransform &transform() const { return *ft_; }

  struct QuadPoint
  {
    int element = 0;
    double s = 0.0;       // local coordinate in [0, 1]
    double weight = 0.0;  // includes the element length
    double z = 0.0;
    std::vector<double> y3, det;
    std::vector<Eigen::Vector3d> a;
  };
  const std::vector<QuadPoint> &quad_points() const { return qp_; }

private:
  std::shared_ptr<const StripMesh> mesh_;
  ElasticParams params_;
  std::unique_ptr<FourierTransform> ft_;
  std::vector<QuadPoint> qp_;
};

struct SolverOptions
{
  double rtol = 1e-12;
  int restart = 60;
  double iteration_cap_factor = 10.0;  // cap = factor * sqrt(unknowns)
};

struct LinearSystem
{
  std::shared_ptr<const StripMesh> mesh;
  ElasticParams params;
  bool mode_coupling = false;
  std::shared_ptr<const FlatOperator> flat;      // operator itself when !mode_coupling
  std::shared_ptr<const MappedOperator> mapped;  // null when !mode_coupling
  CVec rhs;
  SolverOptions options;

  void apply(const CVec &in, CVec &out) const;
};

//
// Galerkin system on the box for the strip described by `map`. The right-hand side is
// -int g . conj(v) over the physical strip with g = source(y) at reference point y.
// When `preconditioner` is given it must match mesh and params.
//
LinearSystem assemble_system(std::shared_ptr<const StripMesh> mesh, const ElasticParams &params, const StripMap &map,
                             const SourceFn &source,
                             std::shared_ptr<const FlatOperator> preconditioner = nullptr);

LinearSystem assemble_system(std::shared_ptr<const StripMesh> mesh, const ElasticParams &params,
                             const SurfaceProfile &f0, const SurfaceProfile &f, const CutoffFn &cutoff,
                             const SourceTerm &g, std::shared_ptr<const FlatOperator> preconditioner = nullptr);

struct SolveStats
{
  int iterations = 0;
  double relative_residual = 0.0;
};

DiscreteField solve_field(const LinearSystem &system, SolveStats *stats = nullptr);

// Box H1 norm (||grad u||^2 + ||u||^2)^(1/2), exact for linear elements.
double vh_norm(const DiscreteField &field);
// Same split into the pieces used by the diagnostics.
struct BoxNorms
{
  double l2_sq = 0.0;       // ||u||^2
  double grad_sq = 0.0;     // ||grad u||^2
  double dz_sq = 0.0;       // ||d3 u||^2
};
BoxNorms box_norms(const DiscreteField &field);

// H1 norm over the physical image of the box under `map`.
double vh_norm_physical(const DiscreteField &field, const StripMap &map);

struct SourceNorms
{
  double l2 = 0.0;
  double h1 = 0.0;
};
// Norms of the source over the physical image of the box (g evaluated at reference points,
// gradients taken in reference coordinates; exact when the map's transform is the identity).
SourceNorms source_norms(const SourceTerm &g, const StripMesh &mesh, const StripMap &map);

//
// Independent check for flat strips: second-order finite differences for the mode ODE
//   mu u'' - mu |xi|^2 u + (lambda + mu) grad div u + omega^2 u = g(x3)
// with u(z_b) = 0 and traction = i M(xi) u at x3 = h (ghost-point closure), solved with a
// block-tridiagonal elimination.
//
struct ModeProfile
{
  std::vector<double> z;
  std::vector<Vec3c> u;

  Vec3c operator()(double x3) const;  // piecewise-linear interpolation
};

using ModeSourceFn = std::function<Vec3c(double x3)>;

ModeProfile flat_mode_oracle(std::array<double, 2> xi, const ElasticParams &params, const ModeSourceFn &g,
                             double h, double z_bottom, int n_fine);

}  // namespace elastorough

#endif  // ELASTOROUGH_VARIATIONAL_HPP
