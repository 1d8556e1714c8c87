#include "mkdv/spectral.hpp"

#include "mkdv/errors.hpp"
#include "mkdv/kernels.hpp"
#include "mkdv/stable_asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>

namespace mkdv {

void NormSpec::validate() const {
    if (!(p >= 1.0) || !std::isfinite(p)) throw std::invalid_argument("NormSpec: p must be finite and >= 1");
    if (!std::isfinite(s)) throw std::invalid_argument("NormSpec: s must be finite");
}

double fl_norm(std::span<const Complex> spectrum, const FourierGrid& grid, const NormSpec& norm) {
    norm.validate();
    if (spectrum.size() != grid.size()) throw std::invalid_argument("fl_norm: spectrum does not match grid");
    double sum = 0.0;
    for (std::size_t k = 0; k < spectrum.size(); ++k) {
        const double a = std::abs(spectrum[k]);
        if (a == 0.0) continue;
        sum += std::pow(japanese_bracket(grid.xi(k)), norm.p * norm.s) * std::pow(a, norm.p);
    }
    return std::pow(sum * grid.dxi(), 1.0 / norm.p);
}

double integrate_line(const std::function<double(double)>& f, const QuadratureOptions& opts) {
    if (!(opts.scale > 0.0)) throw std::invalid_argument("integrate_line: scale must be positive");
    double h = opts.scale / 8.0;
    double X = 16.0 * opts.scale;
    auto trapezoid = [&](double step, double half) {
        const long n = static_cast<long>(std::ceil(half / step));
        double s = f(0.0);
        for (long k = 1; k <= n; ++k) s += f(k * step) + f(-k * step);
        return s * step;
    };
    double value = trapezoid(h, X);
    double change = 1.0;
    int doublings = 0;
    for (; doublings < opts.max_doublings; ++doublings) {
        const double wider = trapezoid(h, 2.0 * X);
        change = std::abs(wider - value) / std::max(std::abs(wider), 1e-300);
        X *= 2.0;
        value = wider;
        if (change <= opts.rel_tol) break;
    }
    if (doublings == opts.max_doublings && change > 0.01)
        throw NumericalError(Breakdown::NonConvergence, "integrate_line: tails do not decay", change);
    int halvings = 0;
    for (; halvings < opts.max_halvings; ++halvings) {
        const double finer = trapezoid(h / 2.0, X);
        change = std::abs(finer - value) / std::max(std::abs(finer), 1e-300);
        h /= 2.0;
        value = finer;
        if (change <= opts.rel_tol) break;
    }
    if (halvings == opts.max_halvings && change > 0.01)
        throw NumericalError(Breakdown::NonConvergence, "integrate_line: step refinement does not settle", change);
    return value;
}

double fl_norm(const std::function<double(double)>& spectrum_modulus, const NormSpec& norm,
               const QuadratureOptions& opts) {
    norm.validate();
    const double ps = norm.p * norm.s;
    const double p = norm.p;
    const double I = integrate_line(
        [&](double xi) {
            const double a = spectrum_modulus(xi);
            if (a == 0.0) return 0.0;
            return std::pow(japanese_bracket(xi), ps) * std::pow(a, p);
        },
        opts);
    return std::pow(I, 1.0 / p);
}

double modulation_norm(std::span<const Complex> spectrum, const FourierGrid& grid, double s, double p) {
    NormSpec{p, s}.validate();
    if (spectrum.size() != grid.size()) throw std::invalid_argument("modulation_norm: spectrum does not match grid");
    // Spectrum samples are ascending, so window masses accumulate in order.
    double total = 0.0;
    long current = 0;
    double mass = 0.0;
    bool open = false;
    auto flush = [&]() {
        if (open && mass > 0.0)
            total += std::pow(japanese_bracket(static_cast<double>(current)), s * p) * std::pow(std::sqrt(mass), p);
        mass = 0.0;
    };
    for (std::size_t k = 0; k < spectrum.size(); ++k) {
        const long w = static_cast<long>(std::floor(grid.xi(k)));
        if (!open || w != current) {
            flush();
            current = w;
            open = true;
        }
        mass += std::norm(spectrum[k]) * grid.dxi();
    }
    flush();
    return std::pow(total, 1.0 / p);
}

namespace {

double sech(double v) {
    const double e = std::exp(-std::abs(v));
    return 2.0 * e / (1.0 + e * e);
}

void require_scaling(int N, double lambda) {
    if (N < 1) throw std::invalid_argument("spectral: N must be positive");
    if (!(lambda >= N) || !std::isfinite(lambda)) throw std::invalid_argument("spectral: requires lambda >= N");
}

}  // namespace

Complex spectral_amplitude(int N, int j, double eta) {
    const double w = 2.0 * j - 1.0;
    const double amp = std::sqrt(kPi / 2.0) * sech(kPi * eta / (2.0 * w));
    const Complex v = std::polar(amp, asymptotics::shift_c<double>(N, j) * eta);
    return (N % 2 == 0) ? v : -v;
}

Complex v_hat_exact(int N, double lambda, double t, double xi) {
    require_scaling(N, lambda);
    Complex s(0.0);
    const double eta = lambda * xi;
    for (int j = 1; j <= N; ++j) {
        const double w2 = (2.0 * j - 1.0) * (2.0 * j - 1.0);
        s += spectral_amplitude(N, j, eta) * std::polar(1.0, -w2 * xi * t / (lambda * lambda));
    }
    return s;
}

EtaQuadrature eta_quadrature(int N, double lambda, const NormSpec& norm, double tau_max) {
    require_scaling(N, lambda);
    norm.validate();
    const double w = 2.0 * N - 1.0;
    const double p = norm.p;
    // Envelope |v^| <= N sqrt(pi/2) 2 e^{-pi |eta| / (2w)}; solve for the
    // cut-off including the polynomial weight by a few fixed-point sweeps.
    double X = 10.0;
    for (int it = 0; it < 8; ++it) {
        const double weight = std::max(0.0, p * norm.s) * std::log1p(X / lambda);
        X = 2.0 * w / (p * kPi) * (40.0 + p * std::log(2.0 * N) + weight);
    }
    const double c_spread = [&] {
        double lo = 0.0, hi = 0.0;
        for (int j = 1; j <= N; ++j) {
            const double c = asymptotics::shift_c<double>(N, j);
            lo = std::min(lo, c);
            hi = std::max(hi, c);
        }
        return hi - lo;
    }();
    const double beat = (w * w - 1.0) * std::abs(tau_max) + c_spread;
    const double h = std::min(0.05, kPi / (0.5 * std::max(p, 2.0) * beat + 10.0));
    return {X, h};
}

double window_integrand(int N, double lambda, const NormSpec& norm, double tau, const EtaQuadrature& quad) {
    require_scaling(N, lambda);
    const double h = quad.step;
    const long n = static_cast<long>(std::ceil(quad.half_width / h));
    const double p = norm.p;
    const double ps = p * norm.s;
    const bool weighted = ps != 0.0;
    const bool even_int = p == std::floor(p) && static_cast<long>(p) % 2 == 0 && p <= 16;

    std::vector<double> phase(N), width(N), shift(N);
    for (int j = 1; j <= N; ++j) {
        const double w = 2.0 * j - 1.0;
        width[j - 1] = kPi / (2.0 * w);
        phase[j - 1] = asymptotics::shift_c<double>(N, j) - w * w * tau;
    }
    std::vector<Complex> rot(N), cur(N);
    for (int j = 0; j < N; ++j) rot[j] = std::polar(1.0, phase[j] * h);

    const double amp = std::sqrt(kPi / 2.0);
    double sum = 0.0;
    constexpr long kReseed = 256;
    for (long k = -n; k <= n; ++k) {
        const double eta = k * h;
        if ((k + n) % kReseed == 0)
            for (int j = 0; j < N; ++j) cur[j] = std::polar(1.0, phase[j] * eta);
        Complex S(0.0);
        for (int j = 0; j < N; ++j) {
            S += sech(width[j] * eta) * cur[j];
            cur[j] *= rot[j];
        }
        const double m2 = std::norm(S) * amp * amp;
        double v;
        if (even_int) {
            v = 1.0;
            for (long q = 0; q < static_cast<long>(p) / 2; ++q) v *= m2;
        } else if (p == 1.0) {
            v = std::sqrt(m2);
        } else {
            v = std::pow(m2, 0.5 * p);
        }
        if (weighted) v *= std::pow(1.0 + (eta / lambda) * (eta / lambda), 0.5 * ps);
        sum += v;
    }
    return sum * h;
}

double v_fl_norm(int N, double lambda, double t, const NormSpec& norm) {
    const double tau = t / (lambda * lambda * lambda);
    // |v^|^p has kinks at zeros of v^ when p is small, where the trapezoid rule
    // drops to second order; keep halving until two levels agree.
    EtaQuadrature q = eta_quadrature(N, lambda, norm, tau);
    double a = window_integrand(N, lambda, norm, tau, q);
    double change = INFINITY;
    for (int level = 0; level < 8; ++level) {
        q = q.refined();
        const double b = window_integrand(N, lambda, norm, tau, q);
        change = std::abs(a - b) / std::max(b, 1e-300);
        a = b;
        if (change <= 1e-3) return std::pow(b / lambda, 1.0 / norm.p);
    }
    throw NumericalError(Breakdown::UnderResolved, "v_fl_norm: eta step not resolved", change);
}

double exp_sum_norm(std::span<const Complex> a, double p, std::size_t points, double t0) {
    NormSpec{p, 0.0}.validate();
    const std::size_t N = a.size();
    if (N == 0) return 0.0;
    if (points < 32 * N * N)
        throw NumericalError(Breakdown::UnderResolved, "exp_sum_norm: fewer than 32 N^2 quadrature points",
                             static_cast<double>(points));
    const auto samples = kernels::exp_sum_samples(a, points, t0, kernels::default_backend());
    double sum = 0.0;
    for (const Complex& s : samples) sum += std::pow(std::abs(s), p);
    return std::pow(sum * 2.0 * kPi / static_cast<double>(points), 1.0 / p);
}

namespace {

struct Sampled {
    std::vector<double> times;
    std::vector<double> integrals;  // lambda * ||v(t)||^p
};

Sampled sample_window(int N, double lambda, const NormSpec& norm, double T, std::size_t K,
                      const EtaQuadrature& quad, Backend backend) {
    Sampled s;
    s.times.resize(K);
    std::vector<double> taus(K);
    for (std::size_t k = 0; k < K; ++k) {
        s.times[k] = T + T * static_cast<double>(k) / static_cast<double>(K - 1);
        taus[k] = s.times[k] / (lambda * lambda * lambda);
    }
    s.integrals = kernels::window_integrals(N, lambda, norm, taus, quad, backend);
    return s;
}

double trapezoid_mean(const std::vector<double>& v) {
    double s = 0.5 * (v.front() + v.back());
    for (std::size_t k = 1; k + 1 < v.size(); ++k) s += v[k];
    return s / static_cast<double>(v.size() - 1);
}

enum class Reduce { Mean, Min };

WindowResult window_norm(int N, double lambda, const NormSpec& norm, double T, std::size_t K, Backend backend,
                         double eta_refinement, Reduce reduce) {
    require_scaling(N, lambda);
    norm.validate();
    if (!(T > 0.0) || !std::isfinite(T)) throw std::invalid_argument("window norm: T must be positive");
    if (K < 64) throw std::invalid_argument("window norm: need at least 64 time samples");
    const double tau_max = 2.0 * T / (lambda * lambda * lambda);
    if (!(eta_refinement >= 1.0) || !std::isfinite(eta_refinement))
        throw std::invalid_argument("window norm: eta refinement must be >= 1");
    EtaQuadrature quad = eta_quadrature(N, lambda, norm, tau_max);
    quad.step /= eta_refinement;
    const Sampled base = sample_window(N, lambda, norm, T, K, quad, backend);

    auto reduce_of = [&](const std::vector<double>& v) {
        return reduce == Reduce::Mean ? trapezoid_mean(v) : *std::min_element(v.begin(), v.end());
    };
    const double value = reduce_of(base.integrals);

    // Twice the time samples: the base samples plus midpoints.
    const Sampled mid = [&] {
        Sampled m;
        std::vector<double> taus(K - 1);
        for (std::size_t k = 0; k + 1 < K; ++k) {
            m.times.push_back(0.5 * (base.times[k] + base.times[k + 1]));
            taus[k] = m.times.back() / (lambda * lambda * lambda);
        }
        m.integrals = kernels::window_integrals(N, lambda, norm, taus, quad, backend);
        return m;
    }();
    std::vector<double> doubled;
    doubled.reserve(2 * K - 1);
    for (std::size_t k = 0; k < K; ++k) {
        doubled.push_back(base.integrals[k]);
        if (k + 1 < K) doubled.push_back(mid.integrals[k]);
    }
    const double value_k = reduce_of(doubled);
    const double change_k = std::abs(value_k - value) / value;
    if (change_k > 0.01)
        throw NumericalError(Breakdown::UnderResolved, "window norm: doubling K moves the result by more than 1%",
                             change_k);

    const Sampled fine = sample_window(N, lambda, norm, T, K, quad.refined(), backend);
    const double value_h = reduce_of(fine.integrals);
    const double change_h = std::abs(value_h - value) / value;
    if (change_h > 0.01)
        throw NumericalError(Breakdown::UnderResolved,
                             "window norm: doubling the frequency resolution moves the result by more than 1%",
                             change_h);

    WindowResult r;
    r.value = std::pow(value / lambda, 1.0 / norm.p);
    r.times = base.times;
    r.norms.resize(K);
    std::size_t arg = 0;
    for (std::size_t k = 0; k < K; ++k) {
        r.norms[k] = std::pow(base.integrals[k] / lambda, 1.0 / norm.p);
        if (base.integrals[k] < base.integrals[arg]) arg = k;
    }
    r.argmin_t = base.times[arg];
    return r;
}

}  // namespace

WindowResult windowed_average_norm(int N, double lambda, const NormSpec& norm, double T, std::size_t K,
                                   Backend backend, double eta_refinement) {
    return window_norm(N, lambda, norm, T, K, backend, eta_refinement, Reduce::Mean);
}

WindowResult min_window_norm(int N, double lambda, const NormSpec& norm, double T, std::size_t K, Backend backend,
                             double eta_refinement) {
    return window_norm(N, lambda, norm, T, K, backend, eta_refinement, Reduce::Min);
}

void write_spectrum_csv(std::ostream& out, std::span<const Complex> spectrum, const FourierGrid& grid) {
    if (spectrum.size() != grid.size()) throw std::invalid_argument("write_spectrum_csv: size mismatch");
    out << "# spectrum f^(xi) = (2 pi)^(-1/2) int e^(-i x xi) f(x) dx; dxi = pi/L; L = "
        << std::setprecision(17) << grid.half_width() << ", M = " << grid.size() << "\n";
    out << "xi,re,im\n";
    out << std::setprecision(17);
    for (std::size_t k = 0; k < spectrum.size(); ++k)
        out << grid.xi(k) << ',' << spectrum[k].real() << ',' << spectrum[k].imag() << '\n';
}

}  // namespace mkdv
