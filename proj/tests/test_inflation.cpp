#include "mkdv/inflation.hpp"
#include "mkdv/pde_verify.hpp"
#include "mkdv/stable_asymptotics.hpp"

#include <doctest.h>

using namespace mkdv;
using namespace mkdv::inflation;

namespace {

double sech(double x) { return 1.0 / std::cosh(x); }

Evaluator sy(int N) {
    return [N](double t, double x) { return asymptotics::evaluate_sy(N, t, x).value; };
}

}  // namespace

TEST_CASE("exponents") {
    const ExponentTable e6 = exponents(6);
    CHECK(e6.theta == doctest::Approx(1.0));
    CHECK(e6.alpha == doctest::Approx(1.0 / 6));
    CHECK(exponents(4, 0.5).alpha == doctest::Approx(1.0 / 8));
    CHECK(exponents(4).alpha == doctest::Approx(1.0 / 8));
    CHECK(exponents(1).alpha == doctest::Approx(0.25));
    CHECK(exponents(1).theta == doctest::Approx(0.5));
    for (double p : {4.5, 5.0, 8.0, 12.0}) CHECK(exponents(p).alpha == doctest::Approx(1.0 / p));
    for (double p : {1.0, 1.5, 1.9, 2.5, 3.0, 4.0, 6.0}) CHECK(exponents(p).alpha > 0);
    CHECK(default_theta(3) == doctest::Approx(0.25));

    CHECK_THROWS_AS(exponents(2), std::invalid_argument);
    CHECK_THROWS_AS(exponents(0.5), std::invalid_argument);
    CHECK_THROWS_AS(exponents(3, 0.6), std::invalid_argument);
    CHECK_THROWS_AS(exponents(3, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(exponents(6, 0.5), std::invalid_argument);
    CHECK(exponents(3, 0.4).alpha == doctest::Approx(0.5 - 1.0 / 3 - 0.4 / 3));
    CHECK(exponents(1, 0.25).alpha == doctest::Approx((0.5 - 0.25 - 0.25 / 4) * 2));
}

TEST_CASE("initial norm") {
    CHECK(initial_norm(1, 1, {2, 0}) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-10));
    CHECK(initial_norm(4, 16, {2, 0}) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-10));
    CHECK(initial_norm(6, 40, {3, 1}) == doctest::Approx(2 * initial_norm(3, 40, {3, 1})).epsilon(1e-10));
    CHECK(initial_norm(1, 1, {1, 0}) == doctest::Approx(std::sqrt(2 * kPi)).epsilon(1e-10));
    CHECK_THROWS_AS(initial_norm(4, 2, {2, 0}), std::invalid_argument);
    CHECK(conserved_l2(4, 16) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("window minimum") {
    const NormSpec n{6, 0};
    const WindowMinimum w1 = min_norm_over_window(1, 1.0, n, 5.0, 64);
    CHECK(w1.value == doctest::Approx(w1.average).epsilon(1e-9));
    for (int N : {2, 3, 5}) {
        const double lambda = std::pow(N, 6 * (1 - 1.0 / 12));
        const WindowMinimum w = min_norm_over_window(N, lambda, n, std::pow(lambda, 3), 64);
        CHECK(w.value <= w.average);
        CHECK(w.t_star >= std::pow(lambda, 3));
        CHECK(w.t_star <= 2 * std::pow(lambda, 3));
    }
    CHECK_THROWS_AS(min_norm_over_window(2, 4.0, {1.5, 0}, 10.0, 64), std::invalid_argument);
}

TEST_CASE("Hoelder bound direction") {
    // f = sech: the bound must not exceed the actual FL^p_s norm
    for (double p : {1.0, 1.25, 1.5, 1.75})
        for (double s : {-1.0, 0.0, 1.0}) {
            auto mod = [](double xi) { return std::sqrt(kPi / 2) * sech(kPi * xi / 2); };
            const double flp = fl_norm(mod, {p, s});
            const double fl4 = fl_norm(mod, {4, dual_regularity(p, s)});
            CHECK(holder_lower_bound(std::sqrt(2.0), fl4, p) <= flp * (1 + 1e-9));
        }
    CHECK(dual_regularity(1, 1) == doctest::Approx(-0.5));
    CHECK(dual_regularity(1.5, 0) == 0.0);
    CHECK_THROWS_AS(holder_lower_bound(1, 1, 2.5), std::invalid_argument);
}

TEST_CASE("dual lower bound uses the conserved L2 norm") {
    const double lambda = 16, t = 200;
    const double fl4 = v_fl_norm(4, lambda, t, {4, 0});
    CHECK(dual_lower_bound(4, lambda, 1, 0, t) == doctest::Approx(holder_lower_bound(std::sqrt(2.0), fl4, 1)));
}

TEST_CASE("time reversal") {
    const Evaluator u = sy(2);
    const Evaluator r = reverse_solution(3.0, u);
    const Evaluator rr = reverse_solution(3.0, r);
    for (double t : {0.0, 0.4, 1.1})
        for (double x : {-2.0, 0.3, 5.0}) {
            CHECK(rr(t, x) == doctest::Approx(u(t, x)).epsilon(1e-13));
            CHECK(r(t, x) == doctest::Approx(u(3.0 - t, -x)).epsilon(1e-13));
        }
    const pde::Field2 field = [&](double t, double x) { return Complex(r(t, x), 0); };
    for (double x : {-1.0, 0.5, 2.0}) CHECK(pde::residual_mkdv(field, 0.7, x, 1e-2, 1e-2 / 9) < 1e-5);

    // reflection leaves |f^| unchanged
    const FourierGrid g(60.0, 4096);
    std::vector<double> a(g.size()), b(g.size());
    for (std::size_t m = 0; m < g.size(); ++m) {
        a[m] = u(3.0, g.x(m));
        b[m] = r(0.0, g.x(m));
    }
    for (double p : {1.0, 3.0}) {
        const NormSpec n{p, 1};
        CHECK(fl_norm(forward_transform(b, g), g, n) == doctest::Approx(fl_norm(forward_transform(a, g), g, n)).epsilon(1e-6).scale(0));
    }
}

TEST_CASE("schedules") {
    ExperimentSchedule s;
    s.norm = {6, 0};
    s.N_list = {2, 3, 4};
    s.validate();
    CHECK(s.effective_sign() == -1);
    CHECK(s.lambda_for(4) == doctest::Approx(std::pow(4.0, 6 * (1 - 1.0 / 12))));
    CHECK(s.T_for(4) == doctest::Approx(std::pow(s.lambda_for(4), 3) * std::pow(4.0, 3 - 1 - 1)));
    for (int N : s.N_list) CHECK(s.lambda_for(N) >= N);

    ExperimentSchedule d;
    d.norm = {1, 0};
    d.N_list = {2};
    CHECK(d.effective_sign() == 1);
    CHECK(d.lambda_for(2) == doctest::Approx(std::pow(2.0, 1 + 0.125)));
    CHECK(d.T_for(2) == doctest::Approx(std::pow(d.lambda_for(2), 3) * std::pow(2.0, 2 - 1 - 0.5)));

    ExperimentSchedule bad = s;
    bad.N_list = {0};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = s;
    bad.K = 10;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = s;
    bad.norm.p = 2;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    const ExperimentResult empty = run_inflation([] {
        ExperimentSchedule e;
        e.norm = {3, 0};
        return e;
    }());
    CHECK(empty.rows.empty());
    CHECK_FALSE(empty.final_slope.has_value());

    for (const auto& name : preset_names()) CHECK_FALSE(preset(name).empty());
    CHECK(preset("desk").size() == 12);
    CHECK_THROWS_AS(preset("nope"), std::invalid_argument);
}

TEST_CASE("small-norm regime with reversal") {
    ExperimentSchedule s;
    s.norm = {6, 0};
    s.N_list = {2, 3, 4, 5};
    const ExperimentResult r = run_inflation(s);
    REQUIRE(r.all_ok());
    for (const auto& row : r.rows) {
        CHECK(row.final_norm < row.initial_norm);
        CHECK(row.ratio == doctest::Approx(row.initial_norm / row.final_norm));
        CHECK(row.lower_bound == 0.0);
    }
    REQUIRE(r.initial_slope.has_value());
    // initial norm ~ N lambda^{-1/p} = N^{alpha/2}
    CHECK(r.initial_slope->slope == doctest::Approx(r.exponents.alpha / 2).epsilon(0.5).scale(0));
    CHECK(r.final_slope->slope < 0);
    CHECK(r.ratio_slope->slope > 0);
}

TEST_CASE("dual regime") {
    ExperimentSchedule s;
    s.norm = {1, 0};
    s.N_list = {2, 3, 4, 5};
    const ExperimentResult r = run_inflation(s);
    REQUIRE(r.all_ok());
    for (const auto& row : r.rows) {
        CHECK(row.final_norm == row.lower_bound);
        CHECK(row.final_norm > row.initial_norm);
    }
    CHECK(r.initial_slope->slope == doctest::Approx(-r.exponents.alpha / 2).epsilon(0.5).scale(0));
    CHECK(r.final_slope->slope > 0);
}

TEST_CASE("dual regime slopes have the predicted magnitude") {
    ExperimentSchedule s;
    s.norm = {1, 0};
    s.N_list = {2, 3, 4, 5};
    const ExperimentResult r = run_inflation(s);
    REQUIRE(r.all_ok());
    const double half = r.exponents.alpha / 2;
    CHECK(r.initial_slope->slope == doctest::Approx(-half).epsilon(0.5).scale(0));
    CHECK(r.final_slope->slope == doctest::Approx(half).epsilon(0.5).scale(0));
}

TEST_CASE("rows record failures and the run continues") {
    ExperimentSchedule s;
    s.norm = {1, 0};
    s.N_list = {1, 2, 1};
    s.lambda_sign = -1;  // lambda_N = N^{1 - alpha/2} < N for N > 1
    const ExperimentResult r = run_inflation(s);
    REQUIRE(r.rows.size() == 3);
    CHECK(r.rows[0].ok());
    CHECK(r.rows[1].status == "invalid");
    CHECK_FALSE(r.rows[1].message.empty());
    CHECK(r.rows[2].ok());
    CHECK_FALSE(r.all_ok());
}
