#include "mkdv/errors.hpp"
#include "mkdv/soliton_state.hpp"
#include "mkdv/verify_suite.hpp"

#include <doctest.h>

#include <random>

using namespace mkdv;

namespace {

FlowPoint at(double t, double x) {
    FlowPoint p;
    p.t = t;
    p.x = x;
    return p;
}

FlowPoint random_point(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    FlowPoint p;
    p.theta = 3 * u(rng);
    p.y = u(rng);
    p.s = 0.3 * u(rng);
    p.t = 0.1 * u(rng);
    p.x = 2 * u(rng);
    return p;
}

}  // namespace

TEST_CASE("satsuma_yajima_spec") {
    for (int N = 1; N <= 3; ++N) {
        const SolitonSpec s = satsuma_yajima_spec(N);
        REQUIRE(s.size() == N);
        for (int j = 0; j < N; ++j) {
            CHECK(s.lambda()[j] == Complex(0, 2 * j + 1));
            CHECK(s.a()[j] == Complex(j % 2 ? 1 : -1, 0));
        }
    }
    CHECK_THROWS_AS(satsuma_yajima_spec(0), std::invalid_argument);
    CHECK_THROWS_AS(SolitonSpec(VectorC::Constant(1, Complex(0, -1)), VectorC::Ones(1)), std::invalid_argument);
    CHECK_THROWS_AS(SolitonSpec(VectorC::Constant(1, Complex(0, 1)), VectorC::Zero(1)), std::invalid_argument);
}

TEST_CASE("gamma_vector") {
    CHECK(std::abs(gamma_vector(satsuma_yajima_spec(1), at(0, 0)).gamma[0] + 1.0) < 1e-15);
    const GammaVector g2 = gamma_vector(satsuma_yajima_spec(2), at(0, 0));
    CHECK(std::abs(g2.gamma[0] + 1.0) < 1e-15);
    CHECK(std::abs(g2.gamma[1] - 1.0) < 1e-15);
    CHECK(std::abs(gamma_vector(satsuma_yajima_spec(1), at(0, 1)).gamma[0] + std::exp(-1.0)) < 1e-15);
    const GammaVector big = gamma_vector(satsuma_yajima_spec(3), at(100, 0));
    CHECK(big.overflow);
    CHECK(big.exponent[2].real() == doctest::Approx(12500.0));
}

TEST_CASE("state_matrix") {
    CHECK(std::abs(state_matrix(satsuma_yajima_spec(1), at(0, 0)).M(0, 0) - 1.0) < 1e-15);
    const MatrixC M = state_matrix(satsuma_yajima_spec(2), at(0, 0)).M;
    CHECK((M - MatrixC{{1.0, 0.0}, {0.0, 1.0 / 3}}).cwiseAbs().maxCoeff() < 1e-15);
    CHECK_THROWS_AS(state_matrix(satsuma_yajima_spec(3), at(100, 0)), NumericalError);

    std::mt19937_64 rng(3);
    for (const auto& spec : verify::random_specs(20, 4, 9)) {
        const StateMatrices st = state_matrix(spec, random_point(rng));
        CHECK((st.M - st.M.adjoint()).cwiseAbs().maxCoeff() < 1e-13 * st.M.cwiseAbs().maxCoeff());
        Eigen::SelfAdjointEigenSolver<MatrixC> es(st.M);
        CHECK(es.eigenvalues().minCoeff() > 0);
    }
}

TEST_CASE("evaluate_naive closed forms") {
    const SolitonSpec s1 = satsuma_yajima_spec(1);
    for (double t : {0.0, 0.7, 2.0})
        for (double x : {-3.0, 0.0, 1.3, 4.0})
            CHECK(std::abs(evaluate_naive(s1, at(t, x)) + 1.0 / std::cosh(x - t)) < 1e-14);
    CHECK(std::abs(evaluate_naive(satsuma_yajima_spec(2), at(0, 0)) - 2.0) < 1e-14);
    for (int N = 1; N <= 6; ++N)
        for (double x : {-2.5, 0.0, 0.4, 3.0}) {
            const double want = (N % 2 ? -1.0 : 1.0) * N / std::cosh(x);
            CHECK(std::abs(evaluate_naive(satsuma_yajima_spec(N), at(0, x)) - want) < 1e-10);
        }
}

TEST_CASE("evaluate_naive signals ill conditioning") {
    NaiveOptions strict;
    strict.max_condition = 10.0;
    CHECK_THROWS_AS(evaluate_naive_checked(satsuma_yajima_spec(5), at(0, 0), strict), NumericalError);
}

TEST_CASE("Satsuma-Yajima values are real") {
    for (int N = 1; N <= 5; ++N)
        for (double x = -5; x <= 5; x += 0.5) CHECK(std::abs(evaluate_naive(satsuma_yajima_spec(N), at(0.2, x)).imag()) < 1e-10);
}

TEST_CASE("flow covariance") {
    std::mt19937_64 rng(17);
    for (const auto& spec : verify::random_specs(10, 3, 4)) {
        FlowPoint p = random_point(rng);
        const Complex base = evaluate_naive(spec, p);

        FlowPoint q = p;
        q.theta += 0.8;
        CHECK(std::abs(evaluate_naive(spec, q) - std::polar(1.0, 0.8) * base) < 1e-10);

        q = p;
        q.y += 0.37;
        q.x += 0.37;
        CHECK(std::abs(evaluate_naive(spec, q) - base) < 1e-10);

        const SolitonSpec rotated(spec.lambda(), spec.a() * std::polar(1.0, 0.8));
        q = p;
        q.theta += 0.8;
        CHECK(std::abs(evaluate_naive(rotated, p) - evaluate_naive(spec, q)) < 1e-10);
    }
}

TEST_CASE("analytic derivatives") {
    const AnalyticDerivatives d1 = analytic_derivatives(satsuma_yajima_spec(1), at(0, 0));
    CHECK(std::abs(d1.M1(0, 0) + 1.0) < 1e-15);

    std::mt19937_64 rng(23);
    for (const auto& spec : verify::random_specs(20, 4, 5)) {
        const FlowPoint p = random_point(rng);
        const AnalyticDerivatives d = analytic_derivatives(spec, p);
        const VectorC g = gamma_vector(spec, p).gamma;
        const auto L = spec.lambda().asDiagonal();
        CHECK((d.gamma2 + (L * (L * g))).norm() < 1e-12 * (1 + d.gamma2.norm()));
        CHECK((d.gamma1 - Complex(0, 1) * (L * g)).norm() < 1e-12 * (1 + d.gamma1.norm()));
        CHECK(identity66_residual(spec, p) < 1e-12 * (1 + state_matrix(spec, p).M.norm()));
        const AnalyticResiduals r = analytic_flow_residuals(spec, p);
        CHECK(r.mkdv < 1e-9);
        CHECK(r.nls < 1e-9);
    }
}

TEST_CASE("identity residual over 200 random samples") {
    std::mt19937_64 rng(29);
    for (int N = 1; N <= 5; ++N)
        for (const auto& spec : verify::random_specs(40, N, 100 + N)) {
            const FlowPoint p = random_point(rng);
            CHECK(identity66_residual(spec, p) < 1e-12 * (1 + state_matrix(spec, p).M.norm()));
        }
}

TEST_CASE("initial data and binomial conjugation") {
    std::vector<double> grid;
    for (int m = 0; m <= 2000; ++m) grid.push_back(-10.0 + 0.01 * m);
    CHECK(verify_initial_data(1, grid).max_deviation < 1e-14);
    const InitialDataReport r3 = verify_initial_data(3, grid);
    CHECK(r3.max_deviation < 1e-8);
    CHECK(r3.max_conjugation < 1e-9);

    const ConjugationCheck c = binomial_conjugation(4, 0.7);
    CHECK(c.gamma_residual < 1e-9);
    CHECK(c.ones_residual < 1e-9);
    CHECK(c.gram_residual < 1e-9);
    CHECK_THROWS_AS(verify_initial_data(13, grid), std::invalid_argument);
}
