#pragma once

// Uniform periodic grid and the unitary Fourier transform
//   f^(xi) = (2 pi)^{-1/2} \int e^{-i x xi} f(x) dx
// discretised as dx/sqrt(2 pi) * sum_m f(x_m) e^{-i x_m xi_k}.

#include "mkdv/precision.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace mkdv {

/// x_m = center - L + m dx, m = 0..M-1, dx = 2L/M.
/// xi_k = (k - M/2) pi / L, k = 0..M-1 (ascending, zero at k = M/2).
class FourierGrid {
public:
    /// Throws std::invalid_argument unless L > 0 and M >= 16 is a power of two.
    FourierGrid(double half_width, std::size_t samples, double center = 0.0);

    double half_width() const noexcept { return L_; }
    double center() const noexcept { return center_; }
    std::size_t size() const noexcept { return M_; }
    double dx() const noexcept { return 2.0 * L_ / static_cast<double>(M_); }
    double dxi() const noexcept { return kPi / L_; }
    double nyquist() const noexcept { return kPi / dx(); }
    double x(std::size_t m) const noexcept { return center_ - L_ + static_cast<double>(m) * dx(); }
    double xi(std::size_t k) const noexcept {
        return (static_cast<double>(k) - static_cast<double>(M_ / 2)) * dxi();
    }
    std::vector<double> xs() const;
    std::vector<double> xis() const;

    /// Same centre, doubled half width and doubled sample count (dx unchanged).
    FourierGrid widened() const { return FourierGrid(2.0 * L_, 2 * M_, center_); }
    /// Same window, twice the samples.
    FourierGrid refined() const { return FourierGrid(L_, 2 * M_, center_); }

private:
    double L_;
    std::size_t M_;
    double center_;
};

/// Smallest power of two M >= 16 with 2L/M <= max_dx.
std::size_t samples_for_spacing(double half_width, double max_dx);

/// L = max(40, 4 (2N-1)^2 t + 40), dx <= min(0.05, 0.2/(2N-1)).
FourierGrid default_grid(int N, double t);

using Spectrum = std::vector<Complex>;

/// Spectrum on the ascending dual grid.
Spectrum forward_transform(std::span<const Complex> samples, const FourierGrid& grid);
Spectrum forward_transform(std::span<const double> samples, const FourierGrid& grid);

/// Inverse of forward_transform.
std::vector<Complex> inverse_transform(std::span<const Complex> spectrum, const FourierGrid& grid);

namespace fft {

/// Raw unnormalised DFT in place: sign -1 forward, +1 backward.
/// Plans are cached per (size, sign); planning is serialised internally.
void transform(std::vector<Complex>& data, int sign);

}  // namespace fft

}  // namespace mkdv
