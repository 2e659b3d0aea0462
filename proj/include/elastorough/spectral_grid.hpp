#ifndef ELASTOROUGH_SPECTRAL_GRID_HPP
#define ELASTOROUGH_SPECTRAL_GRID_HPP

#include <array>
#include <complex>
#include <memory>
#include <vector>

namespace elastorough
{

using cplx = std::complex<double>;

//
// Lattice of horizontal frequencies xi = 2 pi (j1 / L1, j2 / L2), |j_i| <= N_i, for
// cell-periodic fields. Mode k is stored at k = (j1 + N1) * n2 + (j2 + N2).
//
struct SpectralGrid
{
  int N1 = 0, N2 = 0;
  std::array<double, 2> cell = {1.0, 1.0};

  SpectralGrid() = default;
  SpectralGrid(int N1_, int N2_, std::array<double, 2> cell_);

  int n1() const { return 2 * N1 + 1; }
  int n2() const { return 2 * N2 + 1; }
  int size() const { return n1() * n2(); }
  double cell_area() const { return cell[0] * cell[1]; }

  int j1(int k) const { return k / n2() - N1; }
  int j2(int k) const { return k % n2() - N2; }
  int index(int j1, int j2) const { return (j1 + N1) * n2() + (j2 + N2); }
  int mirror(int k) const { return index(-j1(k), -j2(k)); }
  int zero_mode() const { return index(0, 0); }

  std::array<double, 2> xi(int k) const;
  double xi_norm(int k) const;

  bool operator==(const SpectralGrid &o) const
  {
    return N1 == o.N1 && N2 == o.N2 && cell == o.cell;
  }
};

// Smallest size >= ceil(3 n / 2) with only factors 2, 3, 5.
int dealiased_size(int n);

//
// Discrete Fourier pair between the lattice coefficients of a SpectralGrid and values
// on a uniform P1 x P2 collocation grid of the cell (P_i >= n_i). Coefficients are
// amplitudes: u(x) = sum_k c_k exp(i xi_k . x). Point (p1, p2) sits at
// (p1 L1 / P1, p2 L2 / P2) and is stored at p1 * P2 + p2.
//
// Thread-safe: plans are created once and executed with the new-array interface.
//
class FourierTransform
{
public:
  FourierTransform(const SpectralGrid &grid, int P1, int P2);
  ~FourierTransform();
  FourierTransform(const FourierTransform &) = delete;
  FourierTransform &operator=(const FourierTransform &) = delete;

  const SpectralGrid &grid() const { return grid_; }
  int P1() const { return P1_; }
  int P2() const { return P2_; }
  int points() const { return P1_ * P2_; }
  std::array<double, 2> point(int p) const;

  // Strided access so that 3-vector fields can be transformed per component:
  // element i of the logical array is at ptr[i * stride].
  void to_physical(const cplx *modes, cplx *values, int stride = 1) const;
  void to_modes(const cplx *values, cplx *modes, int stride = 1) const;

private:
  SpectralGrid grid_;
  int P1_, P2_;
  struct Plans;
  std::unique_ptr<Plans> plans_;
};

}  // namespace elastorough

#endif  // ELASTOROUGH_SPECTRAL_GRID_HPP
