#include "mkdv/verify_suite.hpp"

#include "mkdv/cauchy.hpp"
#include "mkdv/errors.hpp"
#include "mkdv/fourier.hpp"
#include "mkdv/kernels.hpp"
#include "mkdv/pde_verify.hpp"
#include "mkdv/stable_asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace mkdv::verify {

namespace {

struct Worst {
    double value = 0.0;
    std::string where;
    void add(double v, const std::string& at) {
        if (!(v <= value)) {  // NaN propagates as the worst case
            value = v;
            where = at;
        }
    }
};

Check upper(const std::string& name, const Worst& w, double threshold) {
    return {name, w.value < threshold, w.value, threshold, w.where};
}

std::string at(double t, double x) {
    std::ostringstream s;
    s << " t=" << t << " x=" << x;
    return s.str();
}

std::string at_n(int N, double t) {
    std::ostringstream s;
    s << "N=" << N << " t=" << t;
    return s.str();
}

std::vector<double> arange(double a, double b, double h) {
    std::vector<double> v;
    const long n = static_cast<long>(std::floor((b - a) / h + 1e-9));
    for (long k = 0; k <= n; ++k) v.push_back(a + k * h);
    return v;
}

double sup_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double e : v) m = std::max(m, std::abs(e));
    return m;
}

/// Runs `body`; a thrown breakdown turns into a failed check carrying the message.
template <typename F>
Check guarded(const std::string& name, double threshold, F&& body) {
    try {
        return body();
    } catch (const NumericalError& e) {
        return {name, false, e.diagnostic(), threshold, std::string(to_string(e.kind())) + ": " + e.what()};
    } catch (const std::exception& e) {
        return {name, false, 0.0, threshold, e.what()};
    }
}

}  // namespace

std::vector<SolitonSpec> random_specs(int count, int N, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> re(-0.5, 0.5), im(0.5, 1.5), mod(0.5, 2.0), arg(-kPi, kPi);
    std::vector<SolitonSpec> out;
    while (static_cast<int>(out.size()) < count) {
        VectorC lam(N), a(N);
        for (int j = 0; j < N; ++j) {
            bool ok = false;
            while (!ok) {
                lam[j] = Complex(re(rng), im(rng));
                ok = true;
                for (int k = 0; k < j; ++k) ok = ok && std::abs(lam[j] - lam[k]) >= 0.2;
            }
            a[j] = std::polar(mod(rng), arg(rng));
        }
        out.emplace_back(lam, a);
    }
    return out;
}

cauchy::CauchyPair random_cauchy_pair(std::mt19937_64& rng, int n) {
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    cauchy::VectorC a(n), b(n);
    auto draw = [&](cauchy::VectorC& v, int j, auto&& ok) {
        do v[j] = Complex(u(rng), u(rng));
        while (!ok(v[j]));
    };
    for (int j = 0; j < n; ++j)
        draw(a, j, [&](Complex z) {
            for (int k = 0; k < j; ++k)
                if (std::abs(z - a[k]) < 0.1) return false;
            return true;
        });
    for (int j = 0; j < n; ++j)
        draw(b, j, [&](Complex z) {
            for (int k = 0; k < j; ++k)
                if (std::abs(z - b[k]) < 0.1) return false;
            for (int k = 0; k < n; ++k)
                if (std::abs(z + a[k]) < 0.1) return false;
            return true;
        });
    return cauchy::CauchyPair(a, b);
}

VerifyConfig config_from_json(const io::Json& j) {
    io::require_keys_within(j,
                            {"schema_version", "command", "N_max", "seed", "random_specs", "integrator_t",
                             "peak_time", "test_hooks", "output"},
                            "verify config");
    VerifyConfig c;
    try {
        c.N_max = j.value("N_max", c.N_max);
        c.seed = j.value("seed", c.seed);
        c.random_specs = j.value("random_specs", c.random_specs);
        c.integrator_t = j.value("integrator_t", c.integrator_t);
        c.peak_time = j.value("peak_time", c.peak_time);
        if (j.contains("test_hooks")) {
            io::require_keys_within(j["test_hooks"], {"corrupt_shift"}, "test_hooks");
            c.corrupt_shift = j["test_hooks"].value("corrupt_shift", 0.0);
        }
    } catch (const io::Json::exception& e) {
        throw io::ConfigError(std::string("verify config: ") + e.what());
    }
    if (c.N_max < 1 || c.N_max > 6) throw io::ConfigError("verify config: N_max must be in 1..6");
    if (c.random_specs < 0) throw io::ConfigError("verify config: random_specs must be >= 0");
    if (c.integrator_t < 0.0 || c.integrator_t > 1.0) throw io::ConfigError("verify config: integrator_t in [0, 1]");
    if (!(c.peak_time >= 5.0)) throw io::ConfigError("verify config: peak_time must be >= 5");
    return c;
}

io::Json config_to_json(const VerifyConfig& c) {
    io::Json j{{"N_max", c.N_max},
               {"seed", c.seed},
               {"random_specs", c.random_specs},
               {"integrator_t", c.integrator_t},
               {"peak_time", c.peak_time}};
    if (c.corrupt_shift != 0.0) j["test_hooks"] = io::Json{{"corrupt_shift", c.corrupt_shift}};
    return j;
}

bool Report::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

Report run_suite(const VerifyConfig& cfg, Backend backend) {
    Report rep;
    rep.config = cfg;
    auto& out = rep.checks;
    const int Nmax = cfg.N_max;

    // Cauchy closed forms against a dense solve.
    out.push_back(guarded("cauchy_closed_forms", 1e-8, [&] {
        std::mt19937_64 rng(cfg.seed);
        Worst w;
        for (int trial = 0; trial < 50; ++trial) {
            const int n = 1 + trial % 10;
            const cauchy::CauchyPair pair = random_cauchy_pair(rng, n);
            const cauchy::MatrixC C = cauchy::cauchy_matrix(pair);
            const auto lu = C.fullPivLu();
            const Complex det = lu.determinant();
            w.add(std::abs(cauchy::cauchy_det(pair).value() - det) / std::abs(det), "trial " + std::to_string(trial));
            const cauchy::VectorC ref = lu.solve(cauchy::VectorC::Ones(n));
            w.add((cauchy::cauchy_inv_apply_ones(pair) - ref).norm() / ref.norm(), "trial " + std::to_string(trial));
        }
        return upper("cauchy_closed_forms", w, 1e-8);
    }));

    out.push_back(guarded("initial_data", 1e-8, [&] {
        Worst w;
        const auto xs = arange(-10.0, 10.0, 0.05);
        for (int N = 1; N <= Nmax; ++N) {
            const InitialDataReport r = verify_initial_data(N, xs);
            w.add(std::max(r.max_deviation, r.max_conjugation), "N=" + std::to_string(N));
        }
        return upper("initial_data", w, 1e-8);
    }));

    std::vector<std::pair<std::string, SolitonSpec>> specs;
    for (int N = 1; N <= Nmax; ++N) specs.emplace_back("SY N=" + std::to_string(N), satsuma_yajima_spec(N));
    {
        const auto rs = random_specs(cfg.random_specs, std::min(Nmax, 3), cfg.seed);
        for (std::size_t i = 0; i < rs.size(); ++i) specs.emplace_back("random #" + std::to_string(i), rs[i]);
    }
    std::vector<FlowPoint> points;
    for (const auto& [t, x, s] : {std::tuple{0.05, -0.7, 0.1}, std::tuple{0.2, 0.4, -0.2}, std::tuple{0.4, 2.0, 0.3}}) {
        FlowPoint p;
        p.t = t;
        p.x = x;
        p.s = s;
        points.push_back(p);
    }

    out.push_back(guarded("lambda_M_identity", 1e-10, [&] {
        Worst w;
        for (const auto& [name, spec] : specs)
            for (const auto& p : points) {
                const auto g = gamma_vector(spec, p);
                const double scale = 1.0 + g.gamma.squaredNorm();
                w.add(identity66_residual(spec, p) / scale, name);
            }
        return upper("lambda_M_identity", w, 1e-10);
    }));

    const pde::StencilConfig stencil{};
    auto residual_check = [&](const std::string& name, auto fn) {
        return guarded(name, 1e-5, [&] {
            Worst w;
            for (const auto& [sname, spec] : specs)
                for (const auto& p : points) w.add(fn(spec, p), sname + at(p.t, p.x));
            return upper(name, w, 1e-5);
        });
    };
    out.push_back(residual_check("mkdv_residual", [&](const SolitonSpec& s, const FlowPoint& p) {
        return pde::residual_mkdv(s, p, stencil);
    }));
    out.push_back(residual_check("nls_residual", [&](const SolitonSpec& s, const FlowPoint& p) {
        return pde::residual_nls(s, p, stencil);
    }));
    out.push_back(residual_check("phase_residual", [&](const SolitonSpec& s, const FlowPoint& p) {
        return pde::residual_phase(s, p, stencil);
    }));
    out.push_back(residual_check("translation_residual", [&](const SolitonSpec& s, const FlowPoint& p) {
        return pde::residual_translation(s, p, stencil);
    }));

    out.push_back(guarded("mkdv_residual_order", 0.4, [&] {
        Worst w;
        const std::vector<double> steps{0.08, 0.04, 0.02, 0.01};
        for (const auto& [name, spec] : specs) {
            const FlowPoint p = points[1];
            const auto fit = pde::convergence_order(
                [&](double h) { return pde::residual_mkdv(spec, p, pde::StencilConfig{h, 0.0}); }, steps);
            w.add(std::abs(fit.slope - 4.0), name);
        }
        return upper("mkdv_residual_order", w, 0.4);
    }));

    out.push_back(guarded("stable_vs_naive", 1e-10, [&] {
        Worst w;
        const double t = 1.5;
        for (int N = 2; N <= Nmax; ++N)
            for (double x : arange(-5.0, 5.0 + (2 * N - 1) * (2 * N - 1) * t, 0.25)) {
                FlowPoint p;
                p.t = t;
                p.x = x;
                const double naive = evaluate_naive(satsuma_yajima_spec(N), p).real();
                const double stable = asymptotics::evaluate_stable<long double>(N, t, x);
                w.add(std::abs(naive - stable), "N=" + std::to_string(N) + at(t, x));
            }
        return upper("stable_vs_naive", w, 1e-10);
    }));

    out.push_back(guarded("shift_consistency", 5e-3, [&] {
        Worst w;
        const double t = cfg.peak_time;
        for (int N = 2; N <= Nmax; ++N)
            for (int j = 1; j <= N; ++j) {
                const double w2 = (2.0 * j - 1.0) * (2.0 * j - 1.0);
                const double predicted = w2 * t - (asymptotics::shift_c<double>(N, j) + cfg.corrupt_shift);
                const double peak = asymptotics::locate_peak(N, j, t);
                w.add(std::abs(peak - predicted), "N=" + std::to_string(N) + " j=" + std::to_string(j));
            }
        return upper("shift_consistency", w, 5e-3);
    }));

    out.push_back(guarded("resolution_decay", 1e-6, [&] {
        Worst at12;
        bool monotone = true;
        std::string where;
        for (int N = 1; N <= Nmax; ++N) {
            double prev = INFINITY;
            for (double t : {5.0, 8.0, 12.0}) {
                const double w = 2.0 * N - 1.0;
                const auto xs = arange(-10.0, w * w * t + 10.0, 0.05);
                const double e = sup_abs(kernels::resolution_difference(N, t, xs, 0.0, backend));
                if (N > 1 && !(e < prev)) {
                    monotone = false;
                    where = at_n(N, t);
                }
                prev = e;
                if (t == 12.0) at12.add(e, "N=" + std::to_string(N));
            }
        }
        Check c = upper("resolution_decay", at12, 1e-6);
        if (!monotone) {
            c.passed = false;
            c.detail = "not decreasing at " + where;
        }
        return c;
    }));

    out.push_back(guarded("l2_conservation", 1e-6, [&] {
        Worst w;
        for (int N = 1; N <= Nmax; ++N) {
            const double expected = N * std::sqrt(2.0);
            for (double t : {0.0, 0.25, 0.5}) {
                const FourierGrid g = default_grid(N, t);
                const auto u = kernels::evaluate_grid(N, t, g.xs(), backend);
                const Spectrum f = forward_transform(u, g);
                const double l2 = fl_norm(f, g, NormSpec{2.0, 0.0});
                w.add(std::abs(l2 - expected) / expected, at_n(N, t));
            }
        }
        return upper("l2_conservation", w, 1e-6);
    }));

    if (cfg.integrator_t > 0.0) {
        out.push_back(guarded("integrator_cross_validation", 1e-5, [&] {
            Worst w;
            const FourierGrid g(40.0, 2048);
            for (int N = 1; N <= std::min(Nmax, 3); ++N) {
                const auto u0 = kernels::evaluate_grid(N, 0.0, g.xs(), backend);
                const auto u = pde::integrate_mkdv(u0, g, cfg.integrator_t, 1e-4);
                const auto ref = kernels::evaluate_grid(N, cfg.integrator_t, g.xs(), backend);
                double e = 0.0;
                for (std::size_t m = 0; m < u.size(); ++m) e = std::max(e, std::abs(u[m] - ref[m]));
                w.add(e, "N=" + std::to_string(N));
            }
            return upper("integrator_cross_validation", w, 1e-5);
        }));
    }
    return rep;
}

io::Json report_to_json(const Report& r) {
    io::Json checks = io::Json::array();
    for (const auto& c : r.checks)
        checks.push_back(io::Json{{"name", c.name},
                                  {"passed", c.passed},
                                  {"measured", c.measured},
                                  {"threshold", c.threshold},
                                  {"detail", c.detail}});
    return io::Json{{"schema_version", io::kSchemaVersion},
                    {"suite", "verify"},
                    {"config", config_to_json(r.config)},
                    {"checks", checks},
                    {"passed", r.passed()}};
}

}  // namespace mkdv::verify
