#include "elastorough/krylov.hpp"

#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace elastorough
{

namespace
{

using cplx = std::complex<double>;

// Rotation (c, s) with c real that zeroes b in (a, b).
void givens(cplx a, cplx b, double &c, cplx &s)
{
  const double na = std::abs(a), nb = std::abs(b);
  if (nb == 0.0)
  {
    c = 1.0;
    s = 0.0;
    return;
  }
  if (na == 0.0)
  {
    c = 0.0;
    s = std::conj(b) / nb;
    return;
  }
  const double r = std::hypot(na, nb);
  c = na / r;
  s = (a / na) * std::conj(b) / r;
}

}  // namespace

GmresResult gmres(const LinearMap &A, const LinearMap &M_inv, const CVec &b, CVec &x, const GmresOptions &opts)
{
  const Eigen::Index n = b.size();
  GmresResult res;
  const double bnorm = b.norm();
  if (bnorm == 0.0)
  {
    x.setZero(n);
    res.converged = true;
    return res;
  }
  if (x.size() != n)
  {
    x.setZero(n);
  }
  const int m = opts.restart;
  std::vector<CVec> V(m + 1);
  Eigen::MatrixXcd Hm = Eigen::MatrixXcd::Zero(m + 1, m);
  std::vector<double> cs(m);
  std::vector<cplx> sn(m);
  CVec g(m + 1), r(n), w(n), z(n);

  A(x, w);
  r = b - w;
  double rnorm = r.norm();
  while (res.iterations < opts.max_iterations)
  {
    if (rnorm <= opts.rtol * bnorm)
    {
      break;
    }
    V[0] = r / rnorm;
    g.setZero();
    g(0) = rnorm;
    Hm.setZero();
    int j = 0;
    for (; j < m && res.iterations < opts.max_iterations; ++j)
    {
      ++res.iterations;
      M_inv(V[j], z);
      A(z, w);
      for (int i = 0; i <= j; ++i)
      {
        Hm(i, j) = V[i].dot(w);
        w -= Hm(i, j) * V[i];
      }
      Hm(j + 1, j) = w.norm();
      if (std::abs(Hm(j + 1, j)) > 0.0)
      {
        V[j + 1] = w / Hm(j + 1, j);
      }
      for (int i = 0; i < j; ++i)
      {
        const cplx t = cs[i] * Hm(i, j) + sn[i] * Hm(i + 1, j);
        Hm(i + 1, j) = -std::conj(sn[i]) * Hm(i, j) + cs[i] * Hm(i + 1, j);
        Hm(i, j) = t;
      }
      givens(Hm(j, j), Hm(j + 1, j), cs[j], sn[j]);
      Hm(j, j) = cs[j] * Hm(j, j) + sn[j] * Hm(j + 1, j);
      Hm(j + 1, j) = 0.0;
      g(j + 1) = -std::conj(sn[j]) * g(j);
      g(j) = cs[j] * g(j);
      if (std::abs(g(j + 1)) <= opts.rtol * bnorm * 0.5 || std::abs(Hm(j, j)) == 0.0)
      {
        ++j;
        break;
      }
    }
    // Back substitution on the leading j x j triangle.
    CVec y = Hm.topLeftCorner(j, j).triangularView<Eigen::Upper>().solve(g.head(j));
    CVec upd = CVec::Zero(n);
    for (int i = 0; i < j; ++i)
    {
      upd += y(i) * V[i];
    }
    M_inv(upd, z);
    x += z;
    A(x, w);
    r = b - w;
    rnorm = r.norm();
  }
  res.relative_residual = rnorm / bnorm;
  res.converged = res.relative_residual <= opts.rtol;
  return res;
}

}  // namespace elastorough
