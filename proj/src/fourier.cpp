#include "mkdv/fourier.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <utility>

namespace mkdv {

FourierGrid::FourierGrid(double half_width, std::size_t samples, double center)
    : L_(half_width), M_(samples), center_(center) {
    if (!(half_width > 0.0) || !std::isfinite(half_width))
        throw std::invalid_argument("FourierGrid: half width must be positive");
    if (samples < 16 || (samples & (samples - 1)) != 0)
        throw std::invalid_argument("FourierGrid: sample count must be a power of two >= 16");
    if (!std::isfinite(center)) throw std::invalid_argument("FourierGrid: non-finite centre");
}

std::vector<double> FourierGrid::xs() const {
    std::vector<double> v(M_);
    for (std::size_t m = 0; m < M_; ++m) v[m] = x(m);
    return v;
}

std::vector<double> FourierGrid::xis() const {
    std::vector<double> v(M_);
    for (std::size_t k = 0; k < M_; ++k) v[k] = xi(k);
    return v;
}

std::size_t samples_for_spacing(double half_width, double max_dx) {
    if (!(max_dx > 0.0)) throw std::invalid_argument("samples_for_spacing: spacing must be positive");
    std::size_t m = 16;
    while (2.0 * half_width / static_cast<double>(m) > max_dx) m *= 2;
    return m;
}

FourierGrid default_grid(int N, double t) {
    if (N < 1) throw std::invalid_argument("default_grid: N must be positive");
    const double w = 2.0 * N - 1.0;
    const double L = std::max(40.0, 4.0 * w * w * std::abs(t) + 40.0);
    return FourierGrid(L, samples_for_spacing(L, std::min(0.05, 0.2 / w)));
}

namespace fft {

namespace {

std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

fftw_plan plan_for(std::size_t n, int sign) {
    static std::map<std::pair<std::size_t, int>, fftw_plan> cache;
    std::lock_guard<std::mutex> lock(planner_mutex());
    auto it = cache.find({n, sign});
    if (it != cache.end()) return it->second;
    auto* buf = fftw_alloc_complex(n);
    fftw_plan p = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(buf);
    if (p == nullptr) throw std::runtime_error("fft: planning failed");
    cache.emplace(std::make_pair(n, sign), p);
    return p;
}

}  // namespace

void transform(std::vector<Complex>& data, int sign) {
    if (data.empty()) return;
    fftw_plan p = plan_for(data.size(), sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD);
    auto* d = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(p, d, d);
}

}  // namespace fft

namespace {

// Phase e^{-i (center - L) xi_k} that moves the DFT origin to x_0.
Complex origin_phase(const FourierGrid& grid, std::size_t k) {
    const long q = static_cast<long>(k) - static_cast<long>(grid.size() / 2);
    if (grid.center() == 0.0) return (q % 2 == 0) ? 1.0 : -1.0;
    const double arg = -(grid.center() - grid.half_width()) * grid.xi(k);
    return std::polar(1.0, arg);
}

}  // namespace

Spectrum forward_transform(std::span<const Complex> samples, const FourierGrid& grid) {
    const std::size_t M = grid.size();
    if (samples.size() != M) throw std::invalid_argument("forward_transform: sample count does not match grid");
    std::vector<Complex> buf(samples.begin(), samples.end());
    fft::transform(buf, -1);
    const double scale = grid.dx() / std::sqrt(2.0 * kPi);
    Spectrum out(M);
    for (std::size_t k = 0; k < M; ++k) {
        const std::size_t idx = (k + M / 2) % M;  // DFT index of q = k - M/2
        out[k] = scale * origin_phase(grid, k) * buf[idx];
    }
    return out;
}

Spectrum forward_transform(std::span<const double> samples, const FourierGrid& grid) {
    std::vector<Complex> c(samples.begin(), samples.end());
    return forward_transform(std::span<const Complex>(c), grid);
}

std::vector<Complex> inverse_transform(std::span<const Complex> spectrum, const FourierGrid& grid) {
    const std::size_t M = grid.size();
    if (spectrum.size() != M) throw std::invalid_argument("inverse_transform: size does not match grid");
    std::vector<Complex> buf(M);
    const double scale = grid.dx() / std::sqrt(2.0 * kPi);
    for (std::size_t k = 0; k < M; ++k) buf[(k + M / 2) % M] = spectrum[k] / (scale * origin_phase(grid, k));
    fft::transform(buf, +1);
    for (auto& v : buf) v /= static_cast<double>(M);
    return buf;
}

}  // namespace mkdv
