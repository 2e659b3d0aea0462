#include "elastorough/spectral_grid.hpp"

#include <cmath>
#include <mutex>
#include <numbers>

#include <fftw3.h>

#include "elastorough/errors.hpp"

namespace elastorough
{

namespace
{

// The FFTW planner is not reentrant.
std::mutex &planner_mutex()
{
  static std::mutex m;
  return m;
}

int wrap(int j, int P)
{
  return j >= 0 ? j : j + P;
}

}  // namespace

SpectralGrid::SpectralGrid(int N1_, int N2_, std::array<double, 2> cell_)
  : N1(N1_), N2(N2_), cell(cell_)
{
  if (N1 < 0 || N2 < 0)
  {
    throw ConstraintViolation("mode counts must be nonnegative");
  }
  if (!(cell[0] > 0.0 && cell[1] > 0.0))
  {
    throw ConstraintViolation("cell lengths must be positive");
  }
}

std::array<double, 2> SpectralGrid::xi(int k) const
{
  const double two_pi = 2.0 * std::numbers::pi;
  return {two_pi * j1(k) / cell[0], two_pi * j2(k) / cell[1]};
}

double SpectralGrid::xi_norm(int k) const
{
  const auto x = xi(k);
  return std::hypot(x[0], x[1]);
}

int dealiased_size(int n)
{
  int p = (3 * n + 1) / 2;
  for (;; ++p)
  {
    int r = p;
    for (int f : {2, 3, 5})
    {
      while (r % f == 0)
      {
        r /= f;
      }
    }
    if (r == 1)
    {
      return p;
    }
  }
}

struct FourierTransform::Plans
{
  fftw_plan backward = nullptr;
  fftw_plan forward = nullptr;
};

FourierTransform::FourierTransform(const SpectralGrid &grid, int P1, int P2)
  : grid_(grid), P1_(P1), P2_(P2), plans_(std::make_unique<Plans>())
{
  if (P1 < grid.n1() || P2 < grid.n2())
  {
    throw ConstraintViolation("collocation grid smaller than the mode lattice");
  }
  std::vector<cplx> scratch(static_cast<std::size_t>(P1) * P2);
  auto *buf = reinterpret_cast<fftw_complex *>(scratch.data());
  std::lock_guard<std::mutex> lock(planner_mutex());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  plans_->backward = fftw_plan_dft_2d(P1, P2, buf, buf, FFTW_BACKWARD, flags);
  plans_->forward = fftw_plan_dft_2d(P1, P2, buf, buf, FFTW_FORWARD, flags);
  if (!plans_->backward || !plans_->forward)
  {
    throw NumericalFailure("FFTW planning failed");
  }
}

FourierTransform::~FourierTransform()
{
  std::lock_guard<std::mutex> lock(planner_mutex());
  if (plans_->backward)
  {
    fftw_destroy_plan(plans_->backward);
  }
  if (plans_->forward)
  {
    fftw_destroy_plan(plans_->forward);
  }
}

std::array<double, 2> FourierTransform::point(int p) const
{
  return {grid_.cell[0] * (p / P2_) / P1_, grid_.cell[1] * (p % P2_) / P2_};
}

void FourierTransform::to_physical(const cplx *modes, cplx *values, int stride) const
{
  std::vector<cplx> buf(static_cast<std::size_t>(P1_) * P2_, cplx(0.0));
  for (int k = 0; k < grid_.size(); ++k)
  {
    const int q1 = wrap(grid_.j1(k), P1_), q2 = wrap(grid_.j2(k), P2_);
    buf[q1 * P2_ + q2] = modes[static_cast<std::size_t>(k) * stride];
  }
  auto *b = reinterpret_cast<fftw_complex *>(buf.data());
  fftw_execute_dft(plans_->backward, b, b);
  for (int p = 0; p < P1_ * P2_; ++p)
  {
    values[static_cast<std::size_t>(p) * stride] = buf[p];
  }
}

void FourierTransform::to_modes(const cplx *values, cplx *modes, int stride) const
{
  std::vector<cplx> buf(static_cast<std::size_t>(P1_) * P2_);
  for (int p = 0; p < P1_ * P2_; ++p)
  {
    buf[p] = values[static_cast<std::size_t>(p) * stride];
  }
  auto *b = reinterpret_cast<fftw_complex *>(buf.data());
  fftw_execute_dft(plans_->forward, b, b);
  const double scale = 1.0 / (static_cast<double>(P1_) * P2_);
  for (int k = 0; k < grid_.size(); ++k)
  {
    const int q1 = wrap(grid_.j1(k), P1_), q2 = wrap(grid_.j2(k), P2_);
    modes[static_cast<std::size_t>(k) * stride] = buf[q1 * P2_ + q2] * scale;
  }
}

}  // namespace elastorough
