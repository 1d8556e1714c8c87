// mkdv-lab: evaluate multisolitons, run the invariant suite, compute norms,
// run inflation experiments and exponential-sum sweeps.
//
// Exit codes: 0 success, 1 verification failure, 2 usage or config error,
// 3 numerical breakdown.

#include "mkdv/errors.hpp"
#include "mkdv/fourier.hpp"
#include "mkdv/inflation.hpp"
#include "mkdv/io.hpp"
#include "mkdv/kernels.hpp"
#include "mkdv/regression.hpp"
#include "mkdv/soliton_state.hpp"
#include "mkdv/spectral.hpp"
#include "mkdv/stable_asymptotics.hpp"
#include "mkdv/verify_suite.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <iostream>
#include <mutex>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace {

using mkdv::io::ConfigError;
using mkdv::io::Json;

enum Exit { kOk = 0, kVerifyFailed = 1, kUsage = 2, kBreakdown = 3 };

std::mutex g_log_mutex;
int g_verbosity = 0;

void progress(const std::string& msg) {
    if (g_verbosity < 1) return;
    std::lock_guard lock(g_log_mutex);
    std::cerr << msg << '\n';
}

/// "-" means stdout; anything else goes through an atomic file write.
void emit(const std::string& path, const std::function<void(std::ostream&)>& body) {
    if (path == "-") {
        body(std::cout);
        std::cout.flush();
        return;
    }
    mkdv::io::write_atomic(path, body);
}

struct Range {
    double lo = -20.0, hi = 20.0, step = 0.1;
    std::vector<double> points() const {
        std::vector<double> v;
        const long n = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
        for (long k = 0; k <= n; ++k) v.push_back(lo + k * step);
        return v;
    }
};

Range parse_range(const std::string& s) {
    Range r;
    char c1 = 0, c2 = 0;
    std::istringstream in(s);
    if (!(in >> r.lo >> c1 >> r.hi >> c2 >> r.step) || c1 != ':' || c2 != ':' || !in.eof())
        throw ConfigError("x range must look like lo:hi:step, got '" + s + "'");
    if (!(r.hi > r.lo) || !(r.step > 0.0)) throw ConfigError("x range needs lo < hi and step > 0");
    if ((r.hi - r.lo) / r.step > 2e7) throw ConfigError("x range has too many points");
    return r;
}

/// Fills a field from the config unless the flag was given on the command line.
template <typename T>
void fill(const Json& cfg, const char* key, const CLI::Option* opt, T& field) {
    if (!cfg.contains(key) || (opt && opt->count() > 0)) return;
    try {
        field = cfg[key].get<T>();
    } catch (const Json::exception& e) {
        throw ConfigError(std::string("config key '") + key + "': " + e.what());
    }
}

Json load_for(const std::string& path, const std::string& command, const std::vector<std::string>& keys) {
    Json cfg = mkdv::io::load_config(path);
    if (cfg.contains("command") && cfg["command"] != command)
        throw ConfigError("config is for command '" + cfg["command"].get<std::string>() + "', not '" + command + "'");
    std::vector<std::string> allowed = keys;
    allowed.insert(allowed.end(), {"schema_version", "command"});
    mkdv::io::require_keys_within(cfg, allowed, "config");
    return cfg;
}

mkdv::VectorC complex_list(const Json& j, const char* what) {
    if (!j.is_array() || j.empty()) throw ConfigError(std::string("spec '") + what + "' must be a non-empty array");
    mkdv::VectorC v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t k = 0; k < j.size(); ++k) {
        const Json& e = j[k];
        if (e.is_number()) v[k] = e.get<double>();
        else if (e.is_array() && e.size() == 2) v[k] = mkdv::Complex(e[0].get<double>(), e[1].get<double>());
        else throw ConfigError(std::string("spec '") + what + "' entries must be numbers or [re, im]");
    }
    return v;
}

// ---------------------------------------------------------------- eval

struct EvalArgs {
    int sy = 0;
    Json spec;  // {"lambda": [...], "a": [...]}
    std::vector<double> times{0.0};
    std::string x_range = "-20:20:0.1";
    double lambda = 1.0;
    std::string output;
    std::string config;
};

int run_eval(EvalArgs a, const CLI::App& sub) {
    if (!a.config.empty()) {
        const Json cfg = load_for(a.config, "eval", {"sy", "spec", "t", "x_range", "lambda", "output"});
        fill(cfg, "sy", sub.get_option("--sy"), a.sy);
        fill(cfg, "t", sub.get_option("--t"), a.times);
        fill(cfg, "x_range", sub.get_option("--x-range"), a.x_range);
        fill(cfg, "lambda", sub.get_option("--lambda"), a.lambda);
        fill(cfg, "output", sub.get_option("--output"), a.output);
        if (cfg.contains("spec")) a.spec = cfg["spec"];
    }
    if (a.output.empty()) throw mkdv::io::OutputError("eval needs --output (use - for stdout)");
    if ((a.sy > 0) == !a.spec.is_null()) throw ConfigError("eval needs exactly one of --sy N or a config 'spec'");
    if (!(a.lambda > 0.0)) throw ConfigError("--lambda must be positive");
    if (a.times.empty()) throw ConfigError("eval needs at least one time");
    const Range r = parse_range(a.x_range);
    const auto xs = r.points();

    if (a.sy > 0) {
        const int N = a.sy;
        const double lam = a.lambda;
        // u_{N,lambda}(t, x) = lambda^{-1} u_N(t / lambda^3, x / lambda)
        std::vector<std::vector<double>> fields;
        std::vector<double> scaled(xs.size());
        for (std::size_t m = 0; m < xs.size(); ++m) scaled[m] = xs[m] / lam;
        for (double t : a.times) {
            progress("eval N=" + std::to_string(N) + " t=" + mkdv::io::format_double(t));
            auto u = mkdv::kernels::evaluate_grid(N, t / (lam * lam * lam), scaled, mkdv::kernels::default_backend());
            for (double& v : u) v /= lam;
            fields.push_back(std::move(u));
        }
        emit(a.output, [&](std::ostream& out) {
            mkdv::io::write_field_header(out, "Satsuma-Yajima N=" + std::to_string(N) +
                                                  " lambda=" + mkdv::io::format_double(lam) +
                                                  " (data (-1)^N (N/lambda) sech(x/lambda) at t=0)");
            for (std::size_t i = 0; i < a.times.size(); ++i) mkdv::io::write_field_rows(out, a.times[i], xs, fields[i]);
        });
        return kOk;
    }

    mkdv::io::require_keys_within(a.spec, {"lambda", "a", "theta", "y", "s"}, "spec");
    const mkdv::SolitonSpec spec(complex_list(a.spec.at("lambda"), "lambda"), complex_list(a.spec.at("a"), "a"));
    mkdv::FlowPoint base;
    base.theta = a.spec.value("theta", 0.0);
    base.y = a.spec.value("y", 0.0);
    base.s = a.spec.value("s", 0.0);
    std::vector<std::vector<mkdv::Complex>> fields;
    for (double t : a.times) {
        std::vector<mkdv::Complex> u(xs.size());
        for (std::size_t m = 0; m < xs.size(); ++m) {
            mkdv::FlowPoint p = base;
            p.t = t / (a.lambda * a.lambda * a.lambda);
            p.x = xs[m] / a.lambda;
            u[m] = mkdv::evaluate_naive(spec, p) / a.lambda;
        }
        fields.push_back(std::move(u));
    }
    emit(a.output, [&](std::ostream& out) {
        out << "# multisoliton u = e^* M^{-1} gamma, N=" << spec.size() << " lambda=" << mkdv::io::format_double(a.lambda)
            << "\n# complex u solves u_t + u_xxx = -6 |u|^2 u_x\nt,x,u_re,u_im\n";
        for (std::size_t i = 0; i < a.times.size(); ++i)
            for (std::size_t m = 0; m < xs.size(); ++m)
                out << mkdv::io::format_double(a.times[i]) << ',' << mkdv::io::format_double(xs[m]) << ','
                    << mkdv::io::format_double(fields[i][m].real()) << ',' << mkdv::io::format_double(fields[i][m].imag())
                    << '\n';
    });
    return kOk;
}

// ---------------------------------------------------------------- verify

struct VerifyArgs {
    mkdv::verify::VerifyConfig cfg;
    std::string output = "-";
    std::string config;
};

int run_verify(VerifyArgs a, const CLI::App& sub) {
    if (!a.config.empty()) {
        const Json cfg = load_for(a.config, "verify",
                                  {"N_max", "seed", "random_specs", "integrator_t", "peak_time", "test_hooks", "output"});
        const auto from_file = mkdv::verify::config_from_json(cfg);
        auto given = [&](const char* flag) { return sub.get_option(flag)->count() > 0; };
        if (!given("--N-max")) a.cfg.N_max = from_file.N_max;
        if (!given("--seed")) a.cfg.seed = from_file.seed;
        if (!given("--random-specs")) a.cfg.random_specs = from_file.random_specs;
        if (!given("--integrator-t")) a.cfg.integrator_t = from_file.integrator_t;
        if (!given("--peak-time")) a.cfg.peak_time = from_file.peak_time;
        a.cfg.corrupt_shift = from_file.corrupt_shift;
        fill(cfg, "output", sub.get_option("--output"), a.output);
    }
    // Range checks shared with config files.
    a.cfg = mkdv::verify::config_from_json(mkdv::verify::config_to_json(a.cfg));
    const auto report = mkdv::verify::run_suite(a.cfg, mkdv::kernels::default_backend());
    for (const auto& c : report.checks)
        progress(std::string(c.passed ? "pass " : "FAIL ") + c.name + " measured=" +
                 mkdv::io::format_double(c.measured) + " threshold=" + mkdv::io::format_double(c.threshold));
    emit(a.output, [&](std::ostream& out) { out << mkdv::verify::report_to_json(report).dump(2) << '\n'; });
    return report.passed() ? kOk : kVerifyFailed;
}

// ---------------------------------------------------------------- norms

struct NormsArgs {
    int sy = 1;
    std::vector<double> times{0.0};
    double lambda = 1.0;
    double p = 2.0;
    double s = 0.0;
    std::string kind = "fl";
    std::string source = "exact";
    std::string output = "-";
    std::string config;
};

double sech(double v) {
    const double e = std::exp(-std::abs(v));
    return 2.0 * e / (1.0 + e * e);
}

/// Spectrum of u_{N,lambda}(t) on a grid fine enough for the solution at t / lambda^3.
std::pair<mkdv::Spectrum, mkdv::FourierGrid> scaled_spectrum(int N, double lambda, double t) {
    const double tau = t / (lambda * lambda * lambda);
    const mkdv::FourierGrid g0 = mkdv::default_grid(N, tau);
    const mkdv::FourierGrid g(lambda * g0.half_width(), g0.size(), lambda * g0.center());
    auto xs = g0.xs();
    auto u = mkdv::kernels::evaluate_grid(N, tau, xs, mkdv::kernels::default_backend());
    for (double& v : u) v /= lambda;
    return {mkdv::forward_transform(u, g), g};
}

int run_norms(NormsArgs a, const CLI::App& sub) {
    if (!a.config.empty()) {
        const Json cfg = load_for(a.config, "norms", {"sy", "t", "lambda", "p", "s", "kind", "source", "output"});
        fill(cfg, "sy", sub.get_option("--sy"), a.sy);
        fill(cfg, "t", sub.get_option("--t"), a.times);
        fill(cfg, "lambda", sub.get_option("--lambda"), a.lambda);
        fill(cfg, "p", sub.get_option("--p"), a.p);
        fill(cfg, "s", sub.get_option("--s"), a.s);
        fill(cfg, "kind", sub.get_option("--kind"), a.kind);
        fill(cfg, "source", sub.get_option("--source"), a.source);
        fill(cfg, "output", sub.get_option("--output"), a.output);
    }
    if (a.sy < 1) throw ConfigError("--sy must be positive");
    if (!(a.lambda > 0.0)) throw ConfigError("--lambda must be positive");
    if (a.kind != "fl" && a.kind != "modulation") throw ConfigError("--kind must be fl or modulation");
    if (a.source != "exact" && a.source != "resolution") throw ConfigError("--source must be exact or resolution");
    if (a.source == "resolution" && a.kind != "fl") throw ConfigError("--source resolution supports --kind fl only");
    const mkdv::NormSpec norm{a.p, a.s};
    try {
        norm.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    const int N = a.sy;
    std::vector<double> values;
    for (double t : a.times) {
        progress("norms N=" + std::to_string(N) + " t=" + mkdv::io::format_double(t));
        if (a.source == "resolution") {
            values.push_back(mkdv::v_fl_norm(N, a.lambda, t, norm));
        } else if (a.kind == "fl" && t == 0.0) {
            const double amp = std::sqrt(mkdv::kPi / 2.0) * N;
            mkdv::QuadratureOptions q;
            q.scale = 1.0 / a.lambda;
            values.push_back(
                mkdv::fl_norm([&](double xi) { return amp * sech(0.5 * mkdv::kPi * a.lambda * xi); }, norm, q));
        } else {
            const auto [f, g] = scaled_spectrum(N, a.lambda, t);
            values.push_back(a.kind == "fl" ? mkdv::fl_norm(f, g, norm) : mkdv::modulation_norm(f, g, a.s, a.p));
        }
    }
    emit(a.output, [&](std::ostream& out) {
        out << "# norms of u_{N,lambda}(t); f^(xi) = (2 pi)^(-1/2) int e^(-i x xi) f(x) dx; weight (1 + xi^2)^(s/2)\n"
            << "# source exact: closed form at t=0, FFT of the evaluated solution otherwise; resolution: soliton sum v\n"
            << "N,lambda,t,p,s,kind,source,norm\n";
        for (std::size_t i = 0; i < a.times.size(); ++i)
            out << N << ',' << mkdv::io::format_double(a.lambda) << ',' << mkdv::io::format_double(a.times[i]) << ','
                << mkdv::io::format_double(a.p) << ',' << mkdv::io::format_double(a.s) << ',' << a.kind << ','
                << a.source << ',' << mkdv::io::format_double(values[i]) << '\n';
    });
    return kOk;
}

// ---------------------------------------------------------------- inflate

struct InflateArgs {
    std::string preset;
    std::string schedule;
    std::string output_dir;
    std::string prefix = "inflation";
    std::string config;
};

std::string tag(double v) {
    std::string s = mkdv::io::format_double(v);
    for (char& c : s)
        if (c == '-') c = 'm';
    return s;
}

int run_inflate(InflateArgs a, const CLI::App& sub) {
    std::vector<mkdv::inflation::ExperimentSchedule> schedules;
    if (!a.config.empty()) {
        const Json cfg = load_for(a.config, "inflate", {"preset", "schedule", "schedules", "output_dir", "prefix"});
        fill(cfg, "preset", sub.get_option("--preset"), a.preset);
        fill(cfg, "output_dir", sub.get_option("--output-dir"), a.output_dir);
        fill(cfg, "prefix", sub.get_option("--prefix"), a.prefix);
        if (sub.get_option("--schedule")->count() == 0 && sub.get_option("--preset")->count() == 0) {
            if (cfg.contains("schedule")) schedules.push_back(mkdv::io::schedule_from_json(cfg["schedule"]));
            if (cfg.contains("schedules"))
                for (const auto& s : cfg["schedules"]) schedules.push_back(mkdv::io::schedule_from_json(s));
        }
    }
    if (a.output_dir.empty()) throw mkdv::io::OutputError("inflate needs --output-dir");
    if (!a.preset.empty() && !a.schedule.empty()) throw ConfigError("give either --preset or --schedule, not both");
    if (!a.preset.empty()) {
        try {
            schedules = mkdv::inflation::preset(a.preset);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    } else if (!a.schedule.empty()) {
        schedules = {mkdv::io::schedule_from_json(mkdv::io::load_config(a.schedule))};
    }
    if (schedules.empty()) throw ConfigError("inflate needs --preset, --schedule or a config with schedule(s)");
    if (!std::filesystem::is_directory(a.output_dir))
        throw mkdv::io::OutputError("output directory does not exist: " + a.output_dir);

    bool hard_failure = false;
    Json summary = Json::array();
    for (const auto& sc : schedules) {
        progress("inflate p=" + mkdv::io::format_double(sc.norm.p) + " s=" + mkdv::io::format_double(sc.norm.s));
        const auto res = mkdv::inflation::run_inflation(sc, mkdv::kernels::default_backend());
        hard_failure = hard_failure || !res.all_ok();
        const std::string stem = a.prefix + "_p" + tag(sc.norm.p) + "_s" + tag(sc.norm.s);
        const std::filesystem::path dir(a.output_dir);
        const Json j = mkdv::io::result_to_json(res);
        mkdv::io::write_atomic(dir / (stem + ".csv"), [&](std::ostream& o) { mkdv::io::write_result_csv(o, res); });
        mkdv::io::write_atomic(dir / (stem + ".json"), [&](std::ostream& o) { o << j.dump(2) << '\n'; });
        mkdv::io::write_atomic(dir / (stem + "_series.csv"), [&](std::ostream& o) { mkdv::io::write_series_csv(o, res); });
        summary.push_back(Json{{"file", stem}, {"p", sc.norm.p}, {"s", sc.norm.s}, {"alpha", res.exponents.alpha},
                               {"slopes", j["slopes"]}, {"all_ok", res.all_ok()}});
        std::cout << stem << ": alpha=" << mkdv::io::format_double(res.exponents.alpha);
        if (res.scaled_final_slope)
            std::cout << " scaled final slope=" << mkdv::io::format_double(res.scaled_final_slope->slope) << " +- "
                      << mkdv::io::format_double(res.scaled_final_slope->halfwidth);
        if (res.ratio_slope) std::cout << " ratio slope=" << mkdv::io::format_double(res.ratio_slope->slope);
        std::cout << (res.all_ok() ? "" : " (row failures)") << '\n';
    }
    mkdv::io::write_atomic(std::filesystem::path(a.output_dir) / (a.prefix + "_summary.json"),
                           [&](std::ostream& o) { o << Json{{"schema_version", 1}, {"runs", summary}}.dump(2) << '\n'; });
    return hard_failure ? kBreakdown : kOk;
}

// ---------------------------------------------------------------- expsum

struct ExpsumArgs {
    std::vector<int> N_list{4, 8, 16, 32, 64};
    double p = 6.0;
    std::string coeffs = "ones";
    std::uint64_t seed = 1;
    int points_factor = 32;
    std::string output = "-";
    std::string config;
};

int run_expsum(ExpsumArgs a, const CLI::App& sub) {
    if (!a.config.empty()) {
        const Json cfg = load_for(a.config, "expsum", {"N_list", "p", "coeffs", "seed", "points_factor", "output"});
        fill(cfg, "N_list", sub.get_option("--N-list"), a.N_list);
        fill(cfg, "p", sub.get_option("--p"), a.p);
        fill(cfg, "coeffs", sub.get_option("--coeffs"), a.coeffs);
        fill(cfg, "seed", sub.get_option("--seed"), a.seed);
        fill(cfg, "points_factor", sub.get_option("--points-factor"), a.points_factor);
        fill(cfg, "output", sub.get_option("--output"), a.output);
    }
    if (a.coeffs != "ones" && a.coeffs != "random") throw ConfigError("--coeffs must be ones or random");
    if (a.points_factor < 32) throw ConfigError("--points-factor must be >= 32");
    if (!(a.p >= 1.0)) throw ConfigError("--p must be >= 1");
    for (int N : a.N_list)
        if (N < 1 || N > 4096) throw ConfigError("N values must lie in 1..4096");

    struct Row {
        int N;
        std::size_t points;
        double l2, norm;
    };
    std::vector<Row> rows;
    std::mt19937_64 rng(a.seed);
    std::normal_distribution<double> gauss;
    for (int N : a.N_list) {
        std::vector<mkdv::Complex> c(N, 1.0);
        if (a.coeffs == "random")
            for (auto& v : c) v = mkdv::Complex(gauss(rng), gauss(rng));
        double l2 = 0.0;
        for (const auto& v : c) l2 += std::norm(v);
        l2 = std::sqrt(l2);
        const std::size_t pts = static_cast<std::size_t>(a.points_factor) * N * N;
        rows.push_back({N, pts, l2, mkdv::exp_sum_norm(c, a.p, pts)});
    }
    std::optional<mkdv::LineFit> fit;
    if (rows.size() >= 2) {
        std::vector<double> x, y;
        for (const auto& r : rows) {
            x.push_back(std::log(static_cast<double>(r.N)));
            y.push_back(a.p * std::log(r.norm / r.l2));
        }
        fit = mkdv::fit_line(x, y);
    }
    emit(a.output, [&](std::ostream& out) {
        out << "# S(t) = sum_{n=1}^N a_n e^(i n^2 t); norm = ||S||_{L^p[0, 2 pi]}; normalized_pow = (norm/||a||_2)^p\n";
        if (fit)
            out << "# slope of ln normalized_pow vs ln N: " << mkdv::io::format_double(fit->slope) << " +- "
                << mkdv::io::format_double(fit->slope_halfwidth) << "\n";
        out << "N,p,points,coeff_l2,norm,normalized_pow\n";
        for (const auto& r : rows)
            out << r.N << ',' << mkdv::io::format_double(a.p) << ',' << r.points << ',' << mkdv::io::format_double(r.l2)
                << ',' << mkdv::io::format_double(r.norm) << ',' << mkdv::io::format_double(std::pow(r.norm / r.l2, a.p))
                << '\n';
    });
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mkdv-lab: multisoliton evaluation, verification and norm-inflation experiments"};
    app.require_subcommand(1);
    int threads = 0;
    app.add_option("--threads", threads, "OpenMP threads (default: MKDV_THREADS or the runtime default)");
    app.add_flag("-v,--verbose", g_verbosity, "progress messages on stderr");

    EvalArgs ea;
    auto* eval = app.add_subcommand("eval", "write u(t, x) samples as CSV");
    eval->add_option("--sy", ea.sy, "Satsuma-Yajima data with N solitons");
    eval->add_option("--t", ea.times, "times (comma separated or repeated)")->delimiter(',');
    eval->add_option("--x-range", ea.x_range, "lo:hi:step");
    eval->add_option("--lambda", ea.lambda, "spatial scale of the data (N/lambda) sech(x/lambda)");
    eval->add_option("-o,--output", ea.output, "output CSV path, - for stdout");
    eval->add_option("--config", ea.config, "JSON config (schema_version 1)");

    VerifyArgs va;
    auto* verify = app.add_subcommand("verify", "run the invariant suite and write a JSON report");
    verify->add_option("--N-max", va.cfg.N_max, "largest Satsuma-Yajima N");
    verify->add_option("--seed", va.cfg.seed, "seed for random spectra and Cauchy pairs");
    verify->add_option("--random-specs", va.cfg.random_specs, "number of random complex spectra");
    verify->add_option("--integrator-t", va.cfg.integrator_t, "end time of the integrator check (0 skips)");
    verify->add_option("--peak-time", va.cfg.peak_time, "time of the soliton-position check");
    verify->add_option("-o,--output", va.output, "report path, - for stdout");
    verify->add_option("--config", va.config, "JSON config (schema_version 1)");

    NormsArgs na;
    auto* norms = app.add_subcommand("norms", "Fourier-Lebesgue or modulation norms of u_{N,lambda}(t)");
    norms->add_option("--sy", na.sy, "Satsuma-Yajima N");
    norms->add_option("--t", na.times, "times")->delimiter(',');
    norms->add_option("--lambda", na.lambda, "spatial scale");
    norms->add_option("--p", na.p, "integrability exponent p >= 1");
    norms->add_option("--s", na.s, "regularity s");
    norms->add_option("--kind", na.kind, "fl or modulation");
    norms->add_option("--source", na.source, "exact or resolution");
    norms->add_option("-o,--output", na.output, "output CSV path, - for stdout");
    norms->add_option("--config", na.config, "JSON config (schema_version 1)");

    InflateArgs ia;
    auto* inflate = app.add_subcommand("inflate", "run norm-inflation experiments");
    inflate->add_option("--preset", ia.preset, "p1, p1.5, p3, p6 or desk");
    inflate->add_option("--schedule", ia.schedule, "schedule JSON file");
    inflate->add_option("--output-dir", ia.output_dir, "directory for CSV/JSON results");
    inflate->add_option("--prefix", ia.prefix, "file name prefix");
    inflate->add_option("--config", ia.config, "JSON config (schema_version 1)");

    ExpsumArgs xa;
    auto* expsum = app.add_subcommand("expsum", "L^p norms of quadratic-phase exponential sums");
    expsum->add_option("--N-list", xa.N_list, "sizes")->delimiter(',');
    expsum->add_option("--p", xa.p, "exponent");
    expsum->add_option("--coeffs", xa.coeffs, "ones or random");
    expsum->add_option("--seed", xa.seed, "seed for random coefficients");
    expsum->add_option("--points-factor", xa.points_factor, "quadrature points per N^2 (>= 32)");
    expsum->add_option("-o,--output", xa.output, "output CSV path, - for stdout");
    expsum->add_option("--config", xa.config, "JSON config (schema_version 1)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    if (threads == 0)
        if (const char* env = std::getenv("MKDV_THREADS")) threads = std::atoi(env);
    mkdv::kernels::set_thread_count(threads);

    try {
        if (*eval) return run_eval(ea, *eval);
        if (*verify) return run_verify(va, *verify);
        if (*norms) return run_norms(na, *norms);
        if (*inflate) return run_inflate(ia, *inflate);
        if (*expsum) return run_expsum(xa, *expsum);
    } catch (const ConfigError& e) {
        std::cerr << "mkdv-lab: config error: " << e.what() << '\n';
        return kUsage;
    } catch (const mkdv::io::OutputError& e) {
        std::cerr << "mkdv-lab: output error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "mkdv-lab: invalid argument: " << e.what() << '\n';
        return kUsage;
    } catch (const mkdv::NumericalError& e) {
        std::cerr << "mkdv-lab: numerical breakdown (" << mkdv::to_string(e.kind()) << "): " << e.what()
                  << " [diagnostic " << e.diagnostic() << "]\n";
        return kBreakdown;
    } catch (const std::exception& e) {
        std::cerr << "mkdv-lab: error: " << e.what() << '\n';
        return kBreakdown;
    }
    return kUsage;
}
