#ifndef ELASTOROUGH_GEOMETRY_HPP
#define ELASTOROUGH_GEOMETRY_HPP

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "elastorough/elastic_core.hpp"

namespace elastorough
{

// One real trigonometric term a cos(xi_j . x') + b sin(xi_j . x') with xi_j = 2 pi j / cell.
struct FourierTerm
{
  int j1 = 0, j2 = 0;
  double a = 0.0, b = 0.0;

  bool operator==(const FourierTerm &) const = default;
};

struct ProfileSpec
{
  double offset = 0.0;
  std::vector<FourierTerm> terms;

  bool operator==(const ProfileSpec &) const = default;
};

//
// Cell-periodic surface graph x3 = f(x'). Construct with make_profile(), which also fills
// the extrema and the Lipschitz estimate.
//
class SurfaceProfile
{
public:
  SurfaceProfile() = default;
  SurfaceProfile(ProfileSpec spec, std::array<double, 2> cell);

  double value(double x1, double x2) const;
  std::array<double, 2> gradient(double x1, double x2) const;

  const ProfileSpec &spec() const { return spec_; }
  std::array<double, 2> cell() const { return cell_; }
  bool is_flat() const;
  int max_index() const;  // largest |j_i| among the terms

  double f_min = 0.0;
  double f_max = 0.0;
  double lipschitz_estimate = 0.0;  // raw sup |grad f| on the evaluation grid
  double lipschitz = 0.0;           // lipschitz_estimate times the safety factor

private:
  ProfileSpec spec_;
  std::array<double, 2> cell_ = {1.0, 1.0};
};

inline constexpr double kLipschitzSafety = 1.05;

// Evaluation grid: at least 8x the solver resolution and 64 points per shortest
// wavelength in each direction. Rejects profiles leaving the open slab (m, M_sup).
SurfaceProfile make_profile(const ProfileSpec &spec, const StripGeometry &geom,
                            std::array<int, 2> solver_points = {16, 16});

// Same estimates without the slab check.
SurfaceProfile make_profile_unchecked(const ProfileSpec &spec, std::array<double, 2> cell,
                                      std::array<int, 2> solver_points = {16, 16});

// sup |f - g| + sup |grad (f - g)| over the evaluation grid of the pair.
double sobolev_sup_distance(const SurfaceProfile &f, const SurfaceProfile &g,
                            std::array<int, 2> solver_points = {16, 16});

//
// Piecewise-linear cutoff in the height above the reference surface: 1 up to delta,
// linear descent, 0 from gamma_gap on.
//
struct CutoffFn
{
  double delta = 0.125;
  double gamma_gap = 1.0;

  CutoffFn() = default;
  CutoffFn(double delta_, double gamma_gap_);

  double operator()(double t) const;
  double derivative(double t) const;  // right derivative at the kinks
  double slope_bound() const { return 1.0 / (gamma_gap - delta); }
};

struct TransformData
{
  Eigen::Vector3d x;
  Eigen::Matrix3d J;
  Eigen::Matrix3d J_inv;
  Eigen::Vector3d row;  // (J1, J2, J3): J = I + e3 (x) row
  double det = 1.0;
};

// x = y + alpha(y3 - f0(y')) (f(y') - f0(y')) e3. Throws SingularTransform if |J3| >= 1.
TransformData transform_map(const Eigen::Vector3d &y, const SurfaceProfile &f0, const SurfaceProfile &f,
                            const CutoffFn &cutoff);

// Inverse of transform_map by a bracketed root find in y3.
Eigen::Vector3d inverse_transform(const Eigen::Vector3d &x, const SurfaceProfile &f0,
                                  const SurfaceProfile &f, const CutoffFn &cutoff);

//
// Map from the computational box [z_b, h] (per column) to the physical strip, as the
// composition of a linear stretch that flattens the reference surface f_ref onto z_b and
// the transform carrying f_ref to f_phys. Both factors are rank-one updates of I, so the
// total Jacobian is I + e3 (x) a with det = 1 + a3.
//
class StripMap
{
public:
  struct Column
  {
    double x1 = 0.0, x2 = 0.0;
    double f_ref = 0.0, f_phys = 0.0;
    std::array<double, 2> grad_ref = {0.0, 0.0}, grad_phys = {0.0, 0.0};
  };

  struct Point
  {
    double y3 = 0.0;  // reference-strip height
    double x3 = 0.0;  // physical height
    Eigen::Vector3d a = Eigen::Vector3d::Zero();
    double det = 1.0;
  };

  StripMap(const SurfaceProfile &f_ref, const SurfaceProfile &f_phys, const CutoffFn &cutoff,
           double z_bottom, double h);

  Column column(double x1, double x2) const;
  Point eval(const Column &col, double z3) const;
  // Box height z3 whose image in the reference strip is y3.
  double box_height(const Column &col, double y3) const;
  // Box height whose physical image is x3 (bracketed root find).
  double box_height_of_physical(const Column &col, double x3) const;

  bool is_identity() const { return identity_; }
  double z_bottom() const { return z_b_; }
  double h() const { return h_; }
  const SurfaceProfile &reference() const { return f_ref_; }
  const SurfaceProfile &physical() const { return f_phys_; }
  const CutoffFn &cutoff() const { return cutoff_; }

private:
  SurfaceProfile f_ref_, f_phys_;
  CutoffFn cutoff_;
  double z_b_, h_;
  bool identity_;
  bool ref_flat_at_bottom_;
};

}  // namespace elastorough

#endif  // ELASTOROUGH_GEOMETRY_HPP
