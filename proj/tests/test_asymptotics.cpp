#include "mkdv/errors.hpp"
#include "mkdv/regression.hpp"
#include "mkdv/soliton_state.hpp"
#include "mkdv/stable_asymptotics.hpp"

#include <doctest.h>

#include <random>

using namespace mkdv;
using namespace mkdv::asymptotics;

TEST_CASE("regime_index") {
    CHECK(regime_index(10.0, 10.0, 2, 0.25) == 1);
    CHECK(regime_index(50.0, 10.0, 2, 0.25) == 2);
    CHECK(regime_index(-1e9, 10.0, 2, 0.25) == 0);
    CHECK(regime_index(1e9, 10.0, 2, 0.25) == 4);
    // endpoints belong to the odd interval
    CHECK(regime_index(7.5, 10.0, 2, 0.25) == 1);
    CHECK(regime_index(12.5, 10.0, 2, 0.25) == 1);
    CHECK(regime_index(87.5, 10.0, 2, 0.25) == 3);
    CHECK_THROWS_AS(regime_index(0.0, 0.0, 2, 0.25), std::invalid_argument);
    CHECK_THROWS_AS(regime_index(0.0, 1.0, 2, 0.3), std::invalid_argument);

    const RegimePartition part(3, 4.0, default_epsilon(3));
    REQUIRE(part.boundaries().size() == 6);
    for (std::size_t i = 1; i < part.boundaries().size(); ++i) CHECK(part.boundaries()[i - 1] < part.boundaries()[i]);
}

TEST_CASE("binomials") {
    CHECK(binomial(0, 0) == 1);
    CHECK(binomial(10, 3) == 120);
    CHECK(binomial(62, 31) == 465428353255261088ULL);
    CHECK_THROWS_AS(binomial(63, 31), std::overflow_error);
    CHECK(log_binomial(80, 40) == doctest::Approx(std::lgamma(81.0) - 2 * std::lgamma(41.0)).epsilon(1e-12));
}

TEST_CASE("shift_c and a_tilde") {
    CHECK(shift_c(1, 1) == 0.0);
    CHECK(shift_c(2, 1) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
    CHECK(shift_c(2, 2) == doctest::Approx(-std::log(2.0) / 3).epsilon(1e-15));
    CHECK(shift_c(3, 2) == doctest::Approx(std::log(2.0) / 3).epsilon(1e-15));
    CHECK(a_tilde(2, 2) == doctest::Approx(2.0));
    for (int N = 1; N <= 10; ++N) {
        CHECK(a_tilde(N, 1) == doctest::Approx(1.0 / N).epsilon(1e-15));
        for (int l = 1; l <= N; ++l)
            CHECK(shift_c(N, l) == doctest::Approx(-std::log(a_tilde(N, l)) / (2 * l - 1)).epsilon(1e-13));
    }
    CHECK_THROWS_AS(shift_c(2, 3), std::invalid_argument);
}

TEST_CASE("shift consistency in rational and 50-digit arithmetic") {
    for (int N = 1; N <= 20; ++N)
        for (int j = 1; j <= N; ++j) {
            const ShiftRatio r = shift_ratio(N, j);
            CHECK(r.numerator == binomial(N + j - 1, N - j));
            CHECK(r.denominator == binomial(2 * j - 2, j - 1));
            const Extended c = shift_c<Extended>(N, j);
            const Extended lhs = boost::multiprecision::exp(-(2 * j - 1) * c) * Extended(r.numerator);
            const Extended relerr = boost::multiprecision::abs(lhs - Extended(r.denominator)) / Extended(r.denominator);
            CHECK(to_double(relerr) < 1e-45);
        }
}

TEST_CASE("profiles") {
    for (double t : {0.0, 1.0, 3.0})
        for (double x : {-2.0, 0.5, 4.0})
            CHECK(soliton_profile(1, 1, t, x) == doctest::Approx(-1.0 / std::cosh(x - t)).epsilon(1e-15));
    CHECK(resolution_sum(2, 0.0, 0.0) == doctest::Approx(16.0 / 5).epsilon(1e-14));
    CHECK(resolution_sum(1, 2.0, 1.0) == doctest::Approx(soliton_profile(1, 1, 2.0, 1.0)));
    for (int N = 1; N <= 5; ++N)
        for (int j = 1; j <= N; ++j) {
            const double c = soliton_center(N, j, 3.0);
            CHECK(c == doctest::Approx((2 * j - 1) * (2 * j - 1) * 3.0 - shift_c(N, j)));
            CHECK(soliton_profile(N, j, 3.0, c) == doctest::Approx((N % 2 ? -1.0 : 1.0) * (2 * j - 1)));
        }
    CHECK(std::abs(resolution_sum(3, 50.0, 250.0)) < 1e-80);  // midway between the first two solitons

    const AsymptoticProfile p = asymptotic_profile(3);
    CHECK(p.shifts.size() == 3);
    CHECK(p.speeds[2] == 25.0);
    CHECK(p.widths[1] == 3.0);
}

TEST_CASE("Schur scalars") {
    CHECK(schur_scalars(1, 1).inv_diag_left == doctest::Approx(2.0));
    CHECK(schur_scalars(2, 2).inv_diag_left == doctest::Approx(24.0));
    CHECK(schur_scalars(2, 1).inv_diag_right == doctest::Approx(8.0));
    for (int N = 1; N <= 8; ++N)
        for (int l = 1; l <= N; ++l) {
            const SchurScalars a = schur_scalars(N, l), b = schur_scalars_direct(N, l);
            CHECK(b.inv_diag_left == doctest::Approx(a.inv_diag_left).epsilon(1e-8));
            CHECK(b.inv_diag_right == doctest::Approx(a.inv_diag_right).epsilon(1e-8));
            CHECK(b.row_left == doctest::Approx(a.row_left).epsilon(1e-8));
            CHECK(b.row_right == doctest::Approx(a.row_right).epsilon(1e-8));
        }
}

TEST_CASE("block inverse") {
    const std::complex<double> g(1.7, 0.3);
    const auto b1 = block_decomposition<double>(1, 1, g);
    const auto inv1 = block_inverse(b1);
    CHECK(std::abs(inv1(0, 0) - 2.0 / (1.0 / g + g)) < 1e-15);
    CHECK(std::abs(b1.z - 2.0 / (1.0 / g + g)) < 1e-15);
    CHECK_THROWS_AS(block_decomposition<double>(2, 1, std::complex<double>(0, 0)), std::invalid_argument);

    using C50 = std::complex<Extended>;
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> lg(-50, 50), ph(-kPi, kPi);
    double worst = 0;
    for (int trial = 0; trial < 500; ++trial) {
        const int N = 1 + trial % 8;
        const int l = 1 + static_cast<int>(rng() % N);
        const double lm = lg(rng), phase = ph(rng);
        const C50 gl(boost::multiprecision::exp(Extended(lm)) * Extended(std::cos(phase)),
                     boost::multiprecision::exp(Extended(lm)) * Extended(std::sin(phase)));
        const auto blocks = block_decomposition<Extended>(N, l, gl);
        const auto inv = block_inverse(blocks);
        const auto I = (blocks.A * inv).eval();
        for (int r = 0; r < N; ++r)
            for (int c = 0; c < N; ++c) {
                const C50 e = I(r, c) - C50(Extended(r == c ? 1 : 0), Extended(0));
                const Extended mag = boost::multiprecision::abs(e.real()) + boost::multiprecision::abs(e.imag());
                worst = std::max(worst, to_double(mag));
            }
    }
    CHECK(worst < 1e-8);
}

TEST_CASE("psi representation and uniform z bound") {
    for (int N = 1; N <= 8; ++N)
        for (int l = 1; l <= N; ++l)
            for (double lm : {-30.0, -3.0, 0.0, 0.4, 5.0, 30.0}) {
                const std::complex<long double> g(std::exp((long double)lm) * std::cos(0.3L),
                                                  std::exp((long double)lm) * std::sin(0.3L));
                const auto blocks = block_decomposition<long double>(N, l, g);
                const auto rep = psi_representation(blocks);
                const auto cf = psi_closed_form<long double>(N, l, g);
                CHECK(static_cast<double>(std::abs(rep - cf)) < 1e-9 * (1 + static_cast<double>(std::abs(cf))));
            }
    // |z| + |z g| + |z/g| and the row-sum norm of A^{-1} stay bounded as |log g| grows
    double z_near = 0, z_all = 0, inv_near = 0, inv_all = 0;
    for (double lm = -100; lm <= 100; lm += 0.5) {
        const std::complex<long double> g(std::exp((long double)lm), 0);
        const auto b = block_decomposition<long double>(4, 2, g);
        const double z = static_cast<double>(std::abs(b.z) + std::abs(b.z * g) + std::abs(b.z / g));
        const double inv = static_cast<double>(block_inverse(b).cwiseAbs().rowwise().sum().maxCoeff());
        z_all = std::max(z_all, z);
        inv_all = std::max(inv_all, inv);
        if (std::abs(lm) <= 5) {
            z_near = std::max(z_near, z);
            inv_near = std::max(inv_near, inv);
        }
    }
    CHECK(z_all <= 1.01 * z_near);
    CHECK(inv_all <= 1.5 * inv_near);
}

TEST_CASE("conjugated W decomposition") {
    const int N = 3;
    std::vector<double> ts, odd, even;
    for (double t : {3.0, 4.0, 5.0, 6.0}) {
        const auto o = conjugated_w<long double>(N, 2, Parity::Odd, (long double)t, (long double)(9 * t), false);
        const auto e = conjugated_w<long double>(N, 1, Parity::Even, (long double)t, (long double)(5 * t), false);
        ts.push_back(t);
        odd.push_back(std::log(o.o_norm));
        even.push_back(std::log(e.o_norm));
    }
    CHECK(fit_line(ts, odd).slope <= -6.0);
    CHECK(fit_line(ts, even).slope < -default_epsilon(N));

    // far from any crossing the limit matrix is block diagonal: W -> A
    const auto late = conjugated_w<long double>(N, 1, Parity::Even, 10.0L, 50.0L);
    CHECK(static_cast<double>((late.W - late.A).cwiseAbs().maxCoeff()) < 1e-12);
    CHECK(static_cast<double>(late.A(0, 1)) == 0.0);
    CHECK(static_cast<double>(late.A(0, 2)) == 0.0);

    CHECK_THROWS_AS(conjugated_w<double>(3, 1, Parity::Even, 0.05, -1.0), NumericalError);
}

TEST_CASE("stable evaluation") {
    CHECK(evaluate_stable<double>(1, 5.0, 5.0) == doctest::Approx(-1.0).epsilon(1e-14));
    double worst = 0;
    for (double x = -20; x <= 230; x += 0.25)
        worst = std::max(worst, static_cast<double>(std::abs(evaluate_stable<long double>(3, 8.0L, (long double)x) -
                                                              resolution_sum<long double>(3, 8.0L, (long double)x))));
    CHECK(worst < 1e-6);

    const SolitonSpec sy3 = satsuma_yajima_spec(3);
    worst = 0;
    for (double x = -20; x <= 20; x += 0.1) {
        FlowPoint p;
        p.t = 1.5;
        p.x = x;
        worst = std::max(worst, std::abs(evaluate_stable<double>(3, 1.5, x) - evaluate_naive(sy3, p).real()));
    }
    CHECK(worst < 1e-8);
    CHECK(evaluate_naive_sy<double>(2, 0.0, 0.0) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("router") {
    const RoutedValue a = evaluate_sy(3, 0.1, 0.3);
    CHECK(a.path == EvalPath::Naive);
    const RoutedValue b = evaluate_sy(3, 12.0, 3 * 3 * 12.0);
    CHECK(b.path == EvalPath::Stable);
    CHECK(std::abs(b.value) > 1.0);
    const RoutedValue c = evaluate_sy(3, -12.0, -10.0);
    CHECK(c.path == EvalPath::ScaledNaive);
    // even data: u(-t, -x) = u(t, x)
    CHECK(c.value == doctest::Approx(evaluate_sy(3, 12.0, 10.0).value).epsilon(1e-8));
}

TEST_CASE("peaks sit at the shifted soliton centres") {
    for (int N = 1; N <= 5; ++N)
        for (int j = 1; j <= N; ++j) CHECK(std::abs(locate_peak(N, j, 20.0) - soliton_center(N, j, 20.0)) < 5e-3);
}
