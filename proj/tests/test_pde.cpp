#include "mkdv/errors.hpp"
#include "mkdv/pde_verify.hpp"
#include "mkdv/regression.hpp"
#include "mkdv/stable_asymptotics.hpp"
#include "mkdv/verify_suite.hpp"

#include <doctest.h>

#include <sstream>

using namespace mkdv;
using namespace mkdv::pde;

namespace {

double sech(double x) { return 1.0 / std::cosh(x); }

Field2 sy_field(int N) {
    const SolitonSpec spec = satsuma_yajima_spec(N);
    return [spec](double t, double x) {
        FlowPoint p;
        p.t = t;
        p.x = x;
        return evaluate_naive(spec, p);
    };
}

std::vector<double> sy_initial(int N, const FourierGrid& g) {
    std::vector<double> u(g.size());
    for (std::size_t m = 0; m < g.size(); ++m) u[m] = (N % 2 ? -1.0 : 1.0) * N * sech(g.x(m));
    return u;
}

double max_error_vs_exact(int N, const FourierGrid& g, std::span<const double> u, double t) {
    double worst = 0;
    for (std::size_t m = 0; m < g.size(); ++m)
        worst = std::max(worst, std::abs(u[m] - asymptotics::evaluate_sy(N, t, g.x(m)).value));
    return worst;
}

}  // namespace

TEST_CASE("mKdV residual of the exact formula") {
    const Field2 u1 = sy_field(1);
    const double r1 = residual_mkdv(u1, 0.3, 1.1, 1e-2, 1e-2);
    CHECK(r1 < 1e-5);
    CHECK(residual_mkdv(u1, 0.3, 1.1, 5e-3, 5e-3) < r1 / 10);

    const Field2 u3 = sy_field(3);
    const OrderFit fit = convergence_order([&](double h) { return residual_mkdv(u3, 0.2, 0.5, h, h / 25); },
                                           {4e-2, 2e-2, 1e-2});
    CHECK(fit.slope == doctest::Approx(4.0).epsilon(0.1).scale(0));

    const Field2 zero = [](double, double) { return Complex(0, 0); };
    CHECK(residual_mkdv(zero, 0.1, 0.2, 1e-2, 1e-2) == 0.0);
}

TEST_CASE("companion flows") {
    StencilConfig fine;
    fine.k = 1e-3;
    for (const auto& spec : verify::random_specs(3, 3, 42)) {
        FlowPoint p;
        p.x = 0.3;
        p.theta = 0.4;
        CHECK(residual_phase(spec, p, fine) < 1e-12 * (1 + std::abs(evaluate_naive(spec, p))));
    }
    StencilConfig cfg;
    FlowPoint p;
    p.x = 0.4;
    CHECK(residual_translation(satsuma_yajima_spec(2), p, cfg) < 1e-6);
    CHECK(residual_nls(satsuma_yajima_spec(1), p, cfg) < 1e-5);
    CHECK(residual_mkdv(satsuma_yajima_spec(2), p, cfg) < 1e-5);
}

TEST_CASE("fourth-order convergence of the flow residuals") {
    std::vector<SolitonSpec> specs;
    for (int N = 1; N <= 3; ++N) specs.push_back(satsuma_yajima_spec(N));
    for (const auto& s : verify::random_specs(3, 3, 7)) specs.push_back(s);
    FlowPoint p;
    p.x = 0.35;
    p.t = 0.05;
    for (const auto& spec : specs) {
        using Residual = double (*)(const SolitonSpec&, const FlowPoint&, const StencilConfig&);
        for (Residual residual : {static_cast<Residual>(&residual_mkdv), static_cast<Residual>(&residual_nls)}) {
            const OrderFit fit = convergence_order(
                [&](double h) {
                    StencilConfig c;
                    c.h = h;
                    return residual(spec, p, c);
                },
                {4e-2, 2e-2, 1e-2, 5e-3});
            CHECK(fit.slope == doctest::Approx(4.0).epsilon(0.1).scale(0));
            CHECK(fit.residuals[2] < 1e-5);
        }
    }
}

TEST_CASE("integrator: one soliton") {
    const FourierGrid g(40.0, 2048);
    std::vector<double> u0(g.size());
    for (std::size_t m = 0; m < g.size(); ++m) u0[m] = -sech(g.x(m));
    MkdvIntegrator in(g, u0, 1e-4);
    in.advance_to(0.5);
    CHECK(in.time() == doctest::Approx(0.5));
    const auto u = in.field();
    double worst = 0;
    for (std::size_t m = 0; m < g.size(); ++m) worst = std::max(worst, std::abs(u[m] + sech(g.x(m) - 0.5)));
    CHECK(worst < 1e-6);
    CHECK(in.max_mass_drift() < 1e-8);
    CHECK(in.max_imag() < 1e-10);
}

TEST_CASE("integrator: zero data stays zero") {
    const FourierGrid g(40.0, 512);
    const auto u = integrate_mkdv(std::vector<double>(g.size(), 0.0), g, 0.2, 1e-3);
    for (double v : u) CHECK(v == 0.0);
}

TEST_CASE("integrator matches the exact three-soliton") {
    const FourierGrid g(40.0, 2048);
    for (Scheme s : {Scheme::IntegratingFactorRK4, Scheme::ETDRK4}) {
        IntegratorOptions o;
        o.scheme = s;
        MkdvIntegrator in(g, sy_initial(3, g), 1e-4, o);
        in.advance_to(0.5);
        CHECK(max_error_vs_exact(3, g, in.field(), 0.5) < 1e-5);
        CHECK(in.max_mass_drift() < 1e-8);
        CHECK(in.max_imag() < 1e-10);
    }
}

TEST_CASE("integrator is fourth order in time") {
    const FourierGrid g(40.0, 2048);
    IntegratorOptions o;
    o.substeps = 1;
    std::vector<double> dts, errs;
    for (double dt : {4e-4, 2e-4, 1e-4}) {
        const auto u = integrate_mkdv(sy_initial(2, g), g, 0.1, dt, o);
        dts.push_back(std::log(dt));
        errs.push_back(std::log(max_error_vs_exact(2, g, u, 0.1)));
    }
    CHECK(fit_line(dts, errs).slope == doctest::Approx(4.0).epsilon(0.1).scale(0));
}

TEST_CASE("automatic substepping") {
    const FourierGrid g(40.0, 2048);
    MkdvIntegrator in(g, sy_initial(3, g), 1e-4);
    in.step();
    CHECK(in.last_substeps() >= 2);
    MkdvIntegrator one(g, sy_initial(1, g), 1e-4);
    one.step();
    CHECK(one.last_substeps() == 1);
}

TEST_CASE("integrator guards") {
    const FourierGrid g(40.0, 2048);
    CHECK_THROWS_AS(MkdvIntegrator(g, sy_initial(1, g), 1.0), std::invalid_argument);
    CHECK_THROWS_AS(MkdvIntegrator(g, std::vector<double>(10, 0.0), 1e-4), std::invalid_argument);
    std::vector<double> rough(g.size(), 0.0);
    rough[g.size() / 2] = 1.0;
    CHECK_THROWS_AS(MkdvIntegrator(g, rough, 1e-4), std::invalid_argument);
    IntegratorOptions bad;
    bad.substeps = -1;
    CHECK_THROWS_AS(MkdvIntegrator(g, sy_initial(1, g), 1e-4, bad), std::invalid_argument);
}

TEST_CASE("blow-up is reported") {
    const FourierGrid g(40.0, 256);
    std::vector<double> u0(g.size());
    for (std::size_t m = 0; m < g.size(); ++m) u0[m] = 30 * sech(g.x(m));
    IntegratorOptions o;
    o.substeps = 1;
    o.tail_tolerance = 1.0;
    o.cfl = 100;
    CHECK_THROWS_AS(integrate_mkdv(u0, g, 1.0, 0.3, o), NumericalError);
}

TEST_CASE("snapshot csv") {
    const FourierGrid g(10.0, 16);
    std::ostringstream out;
    write_snapshot_csv(out, 0.5, g, std::vector<double>(16, 1.0));
    const std::string s = out.str();
    CHECK(s.find("t,x,u\n") != std::string::npos);
    CHECK(std::count(s.begin(), s.end(), '\n') >= 17);
}
