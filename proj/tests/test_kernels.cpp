// The OpenMP kernels must reproduce the serial reference bit for bit.

#include "mkdv/kernels.hpp"
#include "mkdv/stable_asymptotics.hpp"

#include <doctest.h>

#include <omp.h>

#include <random>

using namespace mkdv;

namespace {

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> v(n);
    for (int k = 0; k < n; ++k) v[k] = lo + (hi - lo) * k / (n - 1);
    return v;
}

}  // namespace

TEST_CASE("thread control") {
    kernels::set_thread_count(3);
    CHECK(kernels::thread_count() == 3);
    kernels::set_thread_count(0);
    CHECK(kernels::thread_count() >= 1);
}

TEST_CASE("evaluate_grid") {
    kernels::set_thread_count(4);
    for (int N : {1, 3, 5})
        for (double t : {0.0, 0.5, 6.0}) {
            const auto xs = linspace(-30, 30 + 81 * t, 1201);
            const auto a = kernels::serial::evaluate_grid(N, t, xs);
            const auto b = kernels::omp::evaluate_grid(N, t, xs);
            CHECK(a == b);
            CHECK(kernels::evaluate_grid(N, t, xs, Backend::Serial) == a);
            for (std::size_t m = 0; m < xs.size(); m += 97)
                CHECK(a[m] == asymptotics::evaluate_sy(N, t, xs[m]).value);
        }
}

TEST_CASE("resolution_difference") {
    kernels::set_thread_count(4);
    const auto xs = linspace(-10, 60, 301);
    const auto a = kernels::serial::resolution_difference(3, 6.0, xs, 0.0);
    const auto b = kernels::omp::resolution_difference(3, 6.0, xs, 0.0);
    CHECK(a == b);
    double worst = 0;
    for (double v : a) worst = std::max(worst, std::abs(v));
    CHECK(worst < 1e-3);
    CHECK(worst > 0);
}

TEST_CASE("exp_sum_samples") {
    kernels::set_thread_count(4);
    std::mt19937_64 rng(1);
    std::normal_distribution<double> n01;
    std::vector<Complex> a(40);
    for (auto& z : a) z = Complex(n01(rng), n01(rng));
    const auto s = kernels::serial::exp_sum_samples(a, 32 * 1600, 0.0);
    CHECK(s == kernels::omp::exp_sum_samples(a, 32 * 1600, 0.0));
    Complex direct = 0;
    for (std::size_t n = 0; n < a.size(); ++n) direct += a[n] * std::polar(1.0, double((n + 1) * (n + 1)) * 2 * kPi * 5 / (32 * 1600));
    CHECK(std::abs(s[5] - direct) < 1e-10);
}

TEST_CASE("window_integrals") {
    kernels::set_thread_count(4);
    const NormSpec n{6, 1};
    const double lambda = 30;
    const EtaQuadrature q = eta_quadrature(4, lambda, n, 4.0);
    const auto taus = linspace(2.0, 4.0, 64);
    const auto a = kernels::serial::window_integrals(4, lambda, n, taus, q);
    CHECK(a == kernels::omp::window_integrals(4, lambda, n, taus, q));
    CHECK(a[7] == window_integrand(4, lambda, n, taus[7], q));
}

TEST_CASE("window norms do not depend on the backend") {
    const NormSpec n{3, 0};
    const double lambda = 10, T = 4000;
    for (int threads : {1, 2, 5}) {
        kernels::set_thread_count(threads);
        const WindowResult a = windowed_average_norm(3, lambda, n, T, 64, Backend::Serial);
        const WindowResult b = windowed_average_norm(3, lambda, n, T, 64, Backend::OpenMP);
        CHECK(a.value == b.value);
        CHECK(a.norms == b.norms);
    }
}
