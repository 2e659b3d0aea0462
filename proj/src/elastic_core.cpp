#include "elastorough/elastic_core.hpp"

#include <cmath>
#include <string>

#include "elastorough/errors.hpp"

namespace elastorough
{

ElasticParams validate_params(double lambda, double mu, double omega)
{
  if (!std::isfinite(lambda) || !std::isfinite(mu) || !std::isfinite(omega))
  {
    throw ConstraintViolation("lambda, mu and omega must be finite");
  }
  if (!(mu > 0.0))
  {
    throw ConstraintViolation("mu must be positive (mu > 0)");
  }
  if (!(lambda + 2.0 * mu / 3.0 > 0.0))
  {
    throw ConstraintViolation("lambda + 2 mu / 3 must be positive");
  }
  if (!(omega > 0.0))
  {
    throw ConstraintViolation("omega must be positive (omega > 0)");
  }
  ElasticParams p;
  p.lambda = lambda;
  p.mu = mu;
  p.omega = omega;
  p.k_p = omega / std::sqrt(lambda + 2.0 * mu);
  p.k_s = omega / std::sqrt(mu);
  return p;
}

cplx vertical_wavenumber(double k, double xi_norm)
{
  if (xi_norm < k)
  {
    return {std::sqrt((k - xi_norm) * (k + xi_norm)), 0.0};
  }
  if (xi_norm > k)
  {
    return {0.0, std::sqrt((xi_norm - k) * (xi_norm + k))};
  }
  return {0.0, 0.0};
}

cplx vertical_wavenumber(double k, std::array<double, 2> xi)
{
  return vertical_wavenumber(k, std::hypot(xi[0], xi[1]));
}

void validate_geometry(const StripGeometry &geom)
{
  if (!(geom.m < geom.M_sup))
  {
    throw ConstraintViolation("geometry requires m < M_sup");
  }
  if (!(geom.M_sup < geom.h))
  {
    throw ConstraintViolation("geometry requires M_sup < h");
  }
  if (!(geom.cell[0] > 0.0 && geom.cell[1] > 0.0))
  {
    throw ConstraintViolation("cell lengths must be positive");
  }
}

void validate_gap_condition(const StripGeometry &geom, double sup_f0)
{
  const double gap = geom.h - sup_f0;
  if (!(gap > 0.0) || !((geom.M_sup - geom.m) / gap < 1.0))
  {
    throw ConstraintViolation("gap condition (M_sup - m) / (h - sup f0) < 1 violated: gap = " +
                              std::to_string(gap));
  }
}

StabilityConstants stability_constants(const ElasticParams &p)
{
  const double lam = p.lambda, mu = p.mu;
  const double lp2 = lam + 2.0 * mu;
  StabilityConstants s;
  s.K = lp2 / (mu * std::sqrt(lam + mu));
  const double K2 = s.K * s.K;
  s.C_K = 2.0 * (lam + 4.0 * mu) * s.K +
          (mu * lp2 * K2 + 2.0 * lp2 / mu) * std::sqrt((lam + mu) / (mu * lp2));
  s.c_K = K2 - std::sqrt((K2 - 1.0 / mu) * (K2 - 1.0 / lp2));
  return s;
}

BoundReport bound_constants(const ElasticParams &params, const StripGeometry &geom,
                            double lipschitz, double generic_C)
{
  if (!(lipschitz >= 0.0))
  {
    throw ConstraintViolation("Lipschitz constant must be nonnegative");
  }
  if (!(generic_C > 0.0))
  {
    throw ConstraintViolation("generic_C must be positive");
  }
  const double C = generic_C;
  const double w = params.omega;
  const double L2 = 1.0 + lipschitz * lipschitz;
  const double depth = geom.h - geom.m;  // h - m
  const double aux = depth + 1.0;        // h + 1 - m

  BoundReport b;
  b.generic_C = C;
  b.C1 = C * w * w * w * std::sqrt(L2) * aux;
  b.C2 = C * std::pow(L2, 0.25) * std::sqrt(aux) * (1.0 + w * aux);
  b.C3 = C * aux * (1.0 + w * aux) * (1.0 + w * aux) / w;
  b.C4 = C * aux * w;
  b.C5 = C * std::sqrt(1.0 + 1.0 / w) * b.C3;
  b.C6 = C * (1.0 / w + 1.0) * b.C1 * b.C2 * b.C2;
  b.total_bound = (depth + 2.0) * (b.C4 + b.C5 * b.C5 + b.C6);
  return b;
}

double stochastic_factor(const BoundReport &b, const StripGeometry &geom)
{
  const double lead = geom.h - geom.m + 2.0;
  const double sum = b.C4 + b.C5 + b.C6;
  return lead * lead * sum * sum;
}

}  // namespace elastorough
