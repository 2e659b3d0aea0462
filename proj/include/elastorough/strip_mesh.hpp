#ifndef ELASTOROUGH_STRIP_MESH_HPP
#define ELASTOROUGH_STRIP_MESH_HPP

#include <limits>
#include <vector>

#include <Eigen/Core>

#include "elastorough/spectral_grid.hpp"

namespace elastorough
{

// Gauss-Legendre rule mapped to [0, 1].
struct QuadRule
{
  std::vector<double> s;
  std::vector<double> w;
};

QuadRule gauss_rule(int points);

//
// Fourier lattice in x' times linear elements on the vertical nodes z_0 < ... < z_Nz.
// Node 0 is the bottom (Dirichlet); unknowns live on nodes 1..Nz with the layout
// ((k * Nz + node - 1) * 3 + c).
//
struct StripMesh
{
  SpectralGrid grid;
  std::vector<double> z;
  int quad_points = 3;

  int Nz() const { return static_cast<int>(z.size()) - 1; }
  double z_bottom() const { return z.front(); }
  double h() const { return z.back(); }
  int block_size() const { return 3 * Nz(); }
  Eigen::Index unknowns() const { return static_cast<Eigen::Index>(grid.size()) * block_size(); }
  Eigen::Index dof(int k, int node, int c) const
  {
    return (static_cast<Eigen::Index>(k) * Nz() + node - 1) * 3 + c;
  }
};

// Uniform spacing, except that when `kink` lies strictly inside (z_b, h) a node is placed on
// it and the element count is split proportionally between the two sub-intervals.
StripMesh make_mesh(const SpectralGrid &grid, double z_bottom, double h, int Nz, int quad_points = 3,
                    double kink = std::numeric_limits<double>::quiet_NaN());

}  // namespace elastorough

#endif  // ELASTOROUGH_STRIP_MESH_HPP
