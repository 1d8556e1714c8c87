#include "mkdv/soliton_state.hpp"

#include "mkdv/errors.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mkdv {

namespace {

using MatrixCL = Eigen::Matrix<ComplexL, Eigen::Dynamic, Eigen::Dynamic>;
using VectorCL = Eigen::Matrix<ComplexL, Eigen::Dynamic, 1>;

const Complex kI(0.0, 1.0);

template <typename P>
bool finite(const P& pt) {
    return std::isfinite(pt.theta) && std::isfinite(pt.y) && std::isfinite(pt.s) &&
           std::isfinite(pt.t) && std::isfinite(pt.x);
}

FlowPointL widen(const FlowPoint& pt) { return {pt.theta, pt.y, pt.s, pt.t, pt.x}; }

// Exponents in long double so that x and t enter without double rounding of
// lambda^3 t when |t| is large.
std::vector<ComplexL> exponents_l(const SolitonSpec& spec, const FlowPointL& pt) {
    if (!finite(pt)) throw std::invalid_argument("FlowPoint: non-finite parameter");
    const ComplexL i(0.0L, 1.0L);
    std::vector<ComplexL> e(spec.size());
    for (int j = 0; j < spec.size(); ++j) {
        const ComplexL l(spec.lambda()(j).real(), spec.lambda()(j).imag());
        const ComplexL a(spec.a()(j).real(), spec.a()(j).imag());
        e[j] = i * pt.theta + i * l * (pt.x - pt.y) - i * l * l * pt.s + i * l * l * l * pt.t + std::log(a);
    }
    return e;
}

struct NaiveCore {
    ComplexL value;
    double condition = 0.0;
    double max_exponent = 0.0;
};

NaiveCore naive_core(const SolitonSpec& spec, const FlowPointL& pt, double max_condition) {
    const auto e = exponents_l(spec, pt);
    const int n = spec.size();
    const ComplexL i(0.0L, 1.0L);
    NaiveCore out;
    for (int j = 0; j < n; ++j)
        out.max_exponent = std::max(out.max_exponent, std::abs(static_cast<double>(e[j].real())));

    const long double limit = std::log(LDBL_MAX);
    for (int j = 0; j < n; ++j)
        if (2.0L * e[j].real() > limit)
            throw NumericalError(Breakdown::Overflow, "evaluate_naive: exponent beyond extended range",
                                 static_cast<double>(e[j].real()));

    std::vector<ComplexL> lambda(n);
    for (int j = 0; j < n; ++j) lambda[j] = ComplexL(spec.lambda()(j).real(), spec.lambda()(j).imag());

    MatrixCL M(n, n);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
            M(j, k) = i * (1.0L + std::exp(e[j] + std::conj(e[k]))) / (lambda[j] - std::conj(lambda[k]));

    // Jacobi scaling D M D with D_j = M_jj^{-1/2}; M_jj is real and positive.
    std::vector<long double> d(n);
    for (int j = 0; j < n; ++j) {
        const long double mjj = M(j, j).real();
        if (!(mjj > 0.0L))
            throw NumericalError(Breakdown::NotPositiveDefinite, "evaluate_naive: nonpositive diagonal");
        d[j] = 1.0L / std::sqrt(mjj);
    }
    VectorCL rhs(n);
    for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) M(j, k) *= d[j] * d[k];
        rhs(j) = d[j] * std::exp(e[j]);
    }

    Eigen::LLT<MatrixCL> llt(M);
    if (llt.info() != Eigen::Success)
        throw NumericalError(Breakdown::NotPositiveDefinite, "evaluate_naive: Cholesky failed");
    const long double rcond = llt.rcond();
    out.condition = rcond > 0.0L ? static_cast<double>(1.0L / rcond) : std::numeric_limits<double>::infinity();
    if (!(out.condition <= max_condition))
        throw NumericalError(Breakdown::IllConditioned, "evaluate_naive: condition estimate above threshold",
                             out.condition);

    const VectorCL y = llt.solve(rhs);
    out.value = ComplexL(0.0L, 0.0L);
    for (int j = 0; j < n; ++j) out.value += d[j] * y(j);
    return out;
}

}  // namespace

SolitonSpec::SolitonSpec(VectorC lambda, VectorC a) : lambda_(std::move(lambda)), a_(std::move(a)) {
    if (lambda_.size() == 0 || lambda_.size() != a_.size())
        throw std::invalid_argument("SolitonSpec: lambda and a must be non-empty and of equal length");
    for (Eigen::Index j = 0; j < lambda_.size(); ++j) {
        if (!(lambda_(j).imag() > 0.0) || !std::isfinite(lambda_(j).real()) || !std::isfinite(lambda_(j).imag()))
            throw std::invalid_argument("SolitonSpec: Im lambda_j must be positive and finite");
        if (a_(j) == Complex(0.0) || !std::isfinite(std::abs(a_(j))))
            throw std::invalid_argument("SolitonSpec: a_j must be nonzero and finite");
    }
}

double SolitonSpec::spectral_radius() const { return lambda_.cwiseAbs().maxCoeff(); }

SolitonSpec satsuma_yajima_spec(int N) {
    if (N < 1) throw std::invalid_argument("satsuma_yajima_spec: N must be positive");
    VectorC lambda(N), a(N);
    for (int j = 1; j <= N; ++j) {
        lambda(j - 1) = Complex(0.0, 2.0 * j - 1.0);
        a(j - 1) = (j % 2 == 0) ? 1.0 : -1.0;
    }
    return SolitonSpec(lambda, a);
}

GammaVector gamma_vector(const SolitonSpec& spec, const FlowPoint& pt) {
    const auto el = exponents_l(spec, widen(pt));
    GammaVector g;
    g.gamma.resize(spec.size());
    g.exponent.resize(spec.size());
    const double limit = std::log(DBL_MAX);
    for (int j = 0; j < spec.size(); ++j) {
        g.exponent(j) = Complex(static_cast<double>(el[j].real()), static_cast<double>(el[j].imag()));
        if (g.exponent(j).real() > limit) g.overflow = true;
        const ComplexL v = std::exp(el[j]);
        g.gamma(j) = Complex(static_cast<double>(v.real()), static_cast<double>(v.imag()));
    }
    return g;
}

StateMatrices state_matrix(const SolitonSpec& spec, const FlowPoint& pt) {
    const GammaVector g = gamma_vector(spec, pt);
    const int n = spec.size();
    const double limit = std::log(DBL_MAX);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
            if (g.exponent(j).real() + g.exponent(k).real() > limit)
                throw NumericalError(Breakdown::Overflow, "state_matrix: gamma_j conj(gamma_k) overflows",
                                     g.exponent(j).real() + g.exponent(k).real());
    StateMatrices s{g.gamma, MatrixC(n, n), spec.lambda()};
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
            const Complex prod = std::exp(g.exponent(j) + std::conj(g.exponent(k)));
            s.M(j, k) = kI * (1.0 + prod) / (spec.lambda()(j) - std::conj(spec.lambda()(k)));
        }
    return s;
}

NaiveResult evaluate_naive_checked(const SolitonSpec& spec, const FlowPoint& pt, const NaiveOptions& opts) {
    const NaiveCore c = naive_core(spec, widen(pt), opts.max_condition);
    NaiveResult out;
    out.value = Complex(static_cast<double>(c.value.real()), static_cast<double>(c.value.imag()));
    out.condition = c.condition;
    out.max_exponent = c.max_exponent;
    return out;
}

ComplexL evaluate_naive_long(const SolitonSpec& spec, const FlowPointL& pt) {
    return naive_core(spec, pt, std::numeric_limits<double>::infinity()).value;
}

AnalyticDerivatives analytic_derivatives(const SolitonSpec& spec, const FlowPoint& pt) {
    const StateMatrices st = state_matrix(spec, pt);
    const MatrixC L = spec.lambda().asDiagonal();
    const MatrixC Ls = L.adjoint();
    const VectorC& g = st.gamma;
    AnalyticDerivatives d;
    d.gamma1 = kI * (L * g);
    d.gamma2 = -(L * L * g);
    d.gamma3 = -kI * (L * L * L * g);
    d.M1 = -(g * g.adjoint());
    d.M2 = kI * (L * d.M1) - kI * (d.M1 * Ls);
    d.M3 = -(L * L * d.M1) + 2.0 * (L * d.M1 * Ls) - d.M1 * Ls * Ls;
    d.gamma_s = -kI * (L * L * g);
    d.gamma_t = kI * (L * L * L * g);
    d.M_s = -(L * d.M1) - d.M1 * Ls;
    d.M_t = L * L * d.M1 + L * d.M1 * Ls + d.M1 * Ls * Ls;
    return d;
}

double identity66_residual(const SolitonSpec& spec, const FlowPoint& pt) {
    const StateMatrices st = state_matrix(spec, pt);
    const int n = spec.size();
    const MatrixC L = spec.lambda().asDiagonal();
    const MatrixC ones = MatrixC::Ones(n, n);
    const MatrixC r = L * st.M - st.M * L.adjoint() - kI * ones - kI * (st.gamma * st.gamma.adjoint());
    return r.cwiseAbs().maxCoeff();
}

AnalyticResiduals analytic_flow_residuals(const SolitonSpec& spec, const FlowPoint& pt) {
    const StateMatrices st = state_matrix(spec, pt);
    const AnalyticDerivatives d = analytic_derivatives(spec, pt);
    Eigen::LLT<MatrixC> llt(st.M);
    if (llt.info() != Eigen::Success)
        throw NumericalError(Breakdown::NotPositiveDefinite, "analytic_flow_residuals: Cholesky failed");
    const VectorC p0 = llt.solve(st.gamma);
    const VectorC p1 = llt.solve(d.gamma1 - d.M1 * p0);
    const VectorC p2 = llt.solve(d.gamma2 - 2.0 * d.M1 * p1 - d.M2 * p0);
    const VectorC p3 = llt.solve(d.gamma3 - 3.0 * d.M1 * p2 - 3.0 * d.M2 * p1 - d.M3 * p0);
    const VectorC ps = llt.solve(d.gamma_s - d.M_s * p0);
    const VectorC pt_ = llt.solve(d.gamma_t - d.M_t * p0);
    const Complex u = p0.sum(), u1 = p1.sum(), u2 = p2.sum(), u3 = p3.sum();
    const Complex us = ps.sum(), ut = pt_.sum();
    const double m2 = std::norm(u);
    return {std::abs(ut + u3 + 6.0 * m2 * u1), std::abs(kI * us + u2 + 2.0 * m2 * u)};
}

ConjugationCheck binomial_conjugation(int N, double x) {
    if (N < 1) throw std::invalid_argument("binomial_conjugation: N must be positive");
    using ML = MatrixR<long double>;
    const long double xl = x;
    const long double y0 = -std::exp(-2.0L * xl);
    ML T = ML::Zero(N, N);
    for (int k = 1; k <= N; ++k) {
        long double binom = 1.0L;  // C(k-1, j-1) built incrementally in j
        for (int j = 1; j <= k; ++j) {
            if (j > 1) binom = binom * (k - j + 1) / (j - 1);
            const long double sign = (j % 2 == 1) ? 1.0L : -1.0L;
            T(j - 1, k - 1) = std::pow(1.0L - y0, static_cast<long double>(1 - k)) * binom * sign;
        }
    }
    ML M(N, N);
    VectorR<long double> g(N);
    for (int j = 1; j <= N; ++j) g(j - 1) = ((j % 2 == 0) ? 1.0L : -1.0L) * std::exp(-(2.0L * j - 1.0L) * xl);
    for (int j = 1; j <= N; ++j)
        for (int k = 1; k <= N; ++k) M(j - 1, k - 1) = (1.0L + g(j - 1) * g(k - 1)) / (2.0L * (j + k - 1));

    const ML G = T.transpose() * M * T;
    const VectorR<long double> te = T.transpose() * VectorR<long double>::Ones(N);
    const VectorR<long double> tg = T.transpose() * g;
    ConjugationCheck c;
    c.T = T.cast<double>().cast<Complex>();
    const long double ex2 = std::exp(-2.0L * xl), ex1 = std::exp(-xl);
    long double gram = 0.0L, ones = 0.0L, gam = 0.0L;
    for (int j = 1; j <= N; ++j) {
        for (int k = 1; k <= N; ++k) {
            const long double expect = (1.0L + ex2) / (2.0L * (j + k - 1));
            gram = std::max(gram, std::abs(G(j - 1, k - 1) - expect) / expect);
        }
        ones = std::max(ones, std::abs(te(j - 1) - (j == 1 ? 1.0L : 0.0L)));
        gam = std::max(gam, std::abs(tg(j - 1) + ex1) / ex1);
    }
    c.gram_residual = static_cast<double>(gram);
    c.ones_residual = static_cast<double>(ones);
    c.gamma_residual = static_cast<double>(gam);
    return c;
}

InitialDataReport verify_initial_data(int N, const std::vector<double>& xs) {
    if (N < 1 || N > 12) throw std::invalid_argument("verify_initial_data: needs 1 <= N <= 12");
    const SolitonSpec spec = satsuma_yajima_spec(N);
    InitialDataReport r;
    const double sign = (N % 2 == 0) ? 1.0 : -1.0;
    for (double x : xs) {
        if (std::abs(x) > 12.0) throw std::invalid_argument("verify_initial_data: |x| must be <= 12");
        FlowPoint pt;
        pt.x = x;
        NaiveOptions opts;
        opts.max_condition = std::numeric_limits<double>::infinity();
        const Complex u = evaluate_naive(spec, pt, opts);
        r.max_deviation = std::max(r.max_deviation, std::abs(u - sign * N / std::cosh(x)));
        const ConjugationCheck c = binomial_conjugation(N, x);
        r.max_conjugation = std::max({r.max_conjugation, c.gram_residual, c.ones_residual, c.gamma_residual});
    }
    return r;
}

}  // namespace mkdv
