#ifndef ELASTOROUGH_KRYLOV_HPP
#define ELASTOROUGH_KRYLOV_HPP

#include <functional>

#include <Eigen/Core>

namespace elastorough
{

using CVec = Eigen::VectorXcd;
using LinearMap = std::function<void(const CVec &in, CVec &out)>;

struct GmresOptions
{
  double rtol = 1e-12;
  int restart = 60;
  int max_iterations = 1000;
};

struct GmresResult
{
  int iterations = 0;
  double relative_residual = 0.0;  // true residual ||b - A x|| / ||b||
  bool converged = false;
};

//
// Restarted GMRES with right preconditioning (A M^-1 z = b, x = M^-1 z), modified
// Gram-Schmidt and Givens rotations. x holds the initial guess on entry.
//
GmresResult gmres(const LinearMap &A, const LinearMap &M_inv, const CVec &b, CVec &x,
                  const GmresOptions &opts);

}  // namespace elastorough

#endif  // ELASTOROUGH_KRYLOV_HPP
