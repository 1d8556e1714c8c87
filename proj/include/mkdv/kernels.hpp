#pragma once

// Grid kernels with a serial reference and an OpenMP variant. Each output
// element is computed by exactly one iteration with no cross-iteration
// reduction, so both variants return bit-identical results.

#include "mkdv/precision.hpp"
#include "mkdv/spectral.hpp"

#include <span>
#include <vector>

namespace mkdv::kernels {

Backend default_backend() noexcept;

/// Sets the OpenMP team size; values < 1 leave the runtime default.
void set_thread_count(int threads);
int thread_count() noexcept;

/// Satsuma-Yajima u_N(t, x) through the naive/stable router.
std::vector<double> evaluate_grid(int N, double t, std::span<const double> xs, Backend backend);

/// u_N(t,x) - v_N(t,x) evaluated in 50-digit arithmetic, rounded to double.
std::vector<double> resolution_difference(int N, double t, std::span<const double> xs, double epsilon,
                                          Backend backend);

/// S(t_m) = sum_{n=1}^{N} a_n e^{i n^2 t_m}, t_m = t0 + 2 pi m / K.
std::vector<Complex> exp_sum_samples(std::span<const Complex> a, std::size_t K, double t0, Backend backend);

/// window_integrand at each tau.
std::vector<double> window_integrals(int N, double lambda, const NormSpec& norm, std::span<const double> taus,
                                     const EtaQuadrature& quad, Backend backend);

namespace serial {
std::vector<double> evaluate_grid(int N, double t, std::span<const double> xs);
std::vector<double> resolution_difference(int N, double t, std::span<const double> xs, double epsilon);
std::vector<Complex> exp_sum_samples(std::span<const Complex> a, std::size_t K, double t0);
std::vector<double> window_integrals(int N, double lambda, const NormSpec& norm, std::span<const double> taus,
                                     const EtaQuadrature& quad);
}  // namespace serial

namespace omp {
std::vector<double> evaluate_grid(int N, double t, std::span<const double> xs);
std::vector<double> resolution_difference(int N, double t, std::span<const double> xs, double epsilon);
std::vector<Complex> exp_sum_samples(std::span<const Complex> a, std::size_t K, double t0);
std::vector<double> window_integrals(int N, double lambda, const NormSpec& norm, std::span<const double> taus,
                                     const EtaQuadrature& quad);
}  // namespace omp

}  // namespace mkdv::kernels
