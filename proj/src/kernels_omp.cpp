#include "mkdv/kernels.hpp"

#include "mkdv/stable_asymptotics.hpp"

#include <omp.h>

#include <exception>

namespace mkdv::kernels {

namespace detail {
double resolution_point(int N, const Extended& t, double x, double epsilon);
Complex exp_sum_point(std::span<const Complex> a, std::size_t K, double t0, std::size_t m);
}  // namespace detail

void set_thread_count(int threads) {
    if (threads >= 1) omp_set_num_threads(threads);
}

int thread_count() noexcept { return omp_get_max_threads(); }

namespace {

// Exceptions must not escape an OpenMP region; keep the first one and rethrow.
template <typename F>
void parallel_for(std::size_t n, F&& body) {
    std::exception_ptr error;
    const long count = static_cast<long>(n);
#pragma omp parallel for schedule(dynamic, 1)
    for (long i = 0; i < count; ++i) {
        try {
            body(static_cast<std::size_t>(i));
        } catch (...) {
#pragma omp critical(mkdv_kernel_error)
            if (!error) error = std::current_exception();
        }
    }
    if (error) std::rethrow_exception(error);
}

}  // namespace

namespace omp {

std::vector<double> evaluate_grid(int N, double t, std::span<const double> xs) {
    std::vector<double> out(xs.size());
    parallel_for(xs.size(), [&](std::size_t i) { out[i] = asymptotics::evaluate_sy(N, t, xs[i]).value; });
    return out;
}

std::vector<double> resolution_difference(int N, double t, std::span<const double> xs, double epsilon) {
    std::vector<double> out(xs.size());
    parallel_for(xs.size(), [&](std::size_t i) {
        const Extended T = t;
        out[i] = detail::resolution_point(N, T, xs[i], epsilon);
    });
    return out;
}

std::vector<Complex> exp_sum_samples(std::span<const Complex> a, std::size_t K, double t0) {
    std::vector<Complex> out(K);
    parallel_for(K, [&](std::size_t m) { out[m] = detail::exp_sum_point(a, K, t0, m); });
    return out;
}

std::vector<double> window_integrals(int N, double lambda, const NormSpec& norm, std::span<const double> taus,
                                     const EtaQuadrature& quad) {
    std::vector<double> out(taus.size());
    parallel_for(taus.size(), [&](std::size_t i) { out[i] = window_integrand(N, lambda, norm, taus[i], quad); });
    return out;
}

}  // namespace omp

}  // namespace mkdv::kernels
