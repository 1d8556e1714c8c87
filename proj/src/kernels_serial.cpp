#include "mkdv/kernels.hpp"

#include "mkdv/stable_asymptotics.hpp"

#include <cmath>

namespace mkdv::kernels {

namespace detail {

double resolution_point(int N, const Extended& t, double x, double epsilon) {
    const Extended X = x;
    const Extended d = asymptotics::evaluate_stable<Extended>(N, t, X, epsilon) -
                       asymptotics::resolution_sum<Extended>(N, t, X);
    return to_double(d);
}

Complex exp_sum_point(std::span<const Complex> a, std::size_t K, double t0, std::size_t m) {
    Complex s(0.0);
    for (std::size_t n = 1; n <= a.size(); ++n) {
        const unsigned long long n2 = static_cast<unsigned long long>(n) * n;
        const unsigned long long r = (n2 % K) * (m % K) % K;  // exact n^2 m mod K
        const double arg = 2.0 * kPi * static_cast<double>(r) / static_cast<double>(K) + static_cast<double>(n2) * t0;
        s += a[n - 1] * std::polar(1.0, arg);
    }
    return s;
}

}  // namespace detail

namespace serial {

std::vector<double> evaluate_grid(int N, double t, std::span<const double> xs) {
    std::vector<double> out(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) out[i] = asymptotics::evaluate_sy(N, t, xs[i]).value;
    return out;
}

std::vector<double> resolution_difference(int N, double t, std::span<const double> xs, double epsilon) {
    const Extended T = t;
    std::vector<double> out(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) out[i] = detail::resolution_point(N, T, xs[i], epsilon);
    return out;
}

std::vector<Complex> exp_sum_samples(std::span<const Complex> a, std::size_t K, double t0) {
    std::vector<Complex> out(K);
    for (std::size_t m = 0; m < K; ++m) out[m] = detail::exp_sum_point(a, K, t0, m);
    return out;
}

std::vector<double> window_integrals(int N, double lambda, const NormSpec& norm, std::span<const double> taus,
                                     const EtaQuadrature& quad) {
    std::vector<double> out(taus.size());
    for (std::size_t i = 0; i < taus.size(); ++i) out[i] = window_integrand(N, lambda, norm, taus[i], quad);
    return out;
}

}  // namespace serial

Backend default_backend() noexcept { return Backend::OpenMP; }

std::vector<double> evaluate_grid(int N, double t, std::span<const double> xs, Backend backend) {
    return backend == Backend::Serial ? serial::evaluate_grid(N, t, xs) : omp::evaluate_grid(N, t, xs);
}

std::vector<double> resolution_difference(int N, double t, std::span<const double> xs, double epsilon,
                                          Backend backend) {
    return backend == Backend::Serial ? serial::resolution_difference(N, t, xs, epsilon)
                                      : omp::resolution_difference(N, t, xs, epsilon);
}

std::vector<Complex> exp_sum_samples(std::span<const Complex> a, std::size_t K, double t0, Backend backend) {
    return backend == Backend::Serial ? serial::exp_sum_samples(a, K, t0) : omp::exp_sum_samples(a, K, t0);
}

std::vector<double> window_integrals(int N, double lambda, const NormSpec& norm, std::span<const double> taus,
                                     const EtaQuadrature& quad, Backend backend) {
    return backend == Backend::Serial ? serial::window_integrals(N, lambda, norm, taus, quad)
                                      : omp::window_integrals(N, lambda, norm, taus, quad);
}

}  // namespace mkdv::kernels
