#include "mkdv/stable_asymptotics.hpp"

#include "mkdv/errors.hpp"
#include "mkdv/soliton_state.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace mkdv::asymptotics {

namespace {

void check_ell(int N, int ell) {
    if (N < 1 || ell < 1 || ell > N) throw std::invalid_argument("soliton index out of range");
}

template <typename Real>
Real sech(const Real& v) {
    using std::abs;
    using std::exp;
    // 2 e^{-|v|} / (1 + e^{-2|v|}) never overflows
    const Real e = exp(-abs(v));
    return Real(2) * e / (Real(1) + e * e);
}

inline int sign_pow(int sigma, int power) { return (sigma < 0 && (power % 2 != 0)) ? -1 : 1; }

inline int sy_sign(int j) { return (j % 2 == 0) ? 1 : -1; }

// log|gamma_j| for Satsuma-Yajima data: (2j-1)((2j-1)^2 t - x).
template <typename Real>
std::vector<Real> log_gamma(int N, const Real& t, const Real& x) {
    std::vector<Real> g(N);
    for (int j = 1; j <= N; ++j) {
        const Real w = 2 * j - 1;
        g[j - 1] = w * (w * w * t - x);
    }
    return g;
}

}  // namespace

// ---------------------------------------------------------------- partition

RegimePartition::RegimePartition(int N, double t, double epsilon) : N_(N), t_(t), epsilon_(epsilon) {
    if (N < 1) throw std::invalid_argument("RegimePartition: N must be positive");
    if (!(t > 0.0) || !std::isfinite(t)) throw std::invalid_argument("RegimePartition: t must be positive");
    if (!(epsilon > 0.0) || epsilon > default_epsilon(N) * (1.0 + 1e-15))
        throw std::invalid_argument("RegimePartition: epsilon must lie in (0, 1/(2N)]");
    bounds_.reserve(2 * N);
    for (int l = 1; l <= N; ++l) {
        const double c = (2.0 * l - 1.0) * (2.0 * l - 1.0) * t;
        bounds_.push_back(c - epsilon * t);
        bounds_.push_back(c + epsilon * t);
    }
}

int RegimePartition::index(double x) const {
    for (int l = 1; l <= N_; ++l) {
        const double lo = bounds_[2 * (l - 1)];
        const double hi = bounds_[2 * (l - 1) + 1];
        if (x < lo) return 2 * (l - 1);
        if (x <= hi) return 2 * l - 1;
    }
    return 2 * N_;
}

int regime_index(double x, double t, int N, double epsilon) { return RegimePartition(N, t, epsilon).index(x); }

// ---------------------------------------------------------------- binomials and shifts

std::uint64_t binomial(int n, int k) {
    if (n < 0 || k < 0 || k > n) return 0;
    if (n > 62) throw std::overflow_error("binomial: n too large for exact 64-bit evaluation");
    k = std::min(k, n - k);
    // r * (n-k+i) / i is an integer at every step; dividing by the gcd first
    // keeps the intermediate product below the final value times 62.
    std::uint64_t r = 1;
    for (int i = 1; i <= k; ++i) {
        const std::uint64_t g = std::gcd(r, static_cast<std::uint64_t>(i));
        r = (r / g) * (static_cast<std::uint64_t>(n - k + i) / (static_cast<std::uint64_t>(i) / g));
    }
    return r;
}

double log_binomial(int n, int k) {
    if (n < 0 || k < 0 || k > n) throw std::invalid_argument("log_binomial: need 0 <= k <= n");
    if (n <= 60) return std::log(static_cast<double>(binomial(n, k)));
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

ShiftRatio shift_ratio(int N, int j) {
    check_ell(N, j);
    if (N > 30) throw std::invalid_argument("shift_ratio: exact ratio supported for N <= 30");
    return {binomial(N + j - 1, N - j), binomial(2 * j - 2, j - 1)};
}

template <typename Real>
Real shift_c(int N, int j) {
    check_ell(N, j);
    using std::log;
    const int w = 2 * j - 1;
    if (N <= 30) {
        const ShiftRatio r = shift_ratio(N, j);
        return log(Real(r.numerator) / Real(r.denominator)) / Real(w);
    }
    return Real((log_binomial(N + j - 1, N - j) - log_binomial(2 * j - 2, j - 1)) / w);
}

double a_tilde(int N, int ell) {
    check_ell(N, ell);
    return std::exp(log_binomial(2 * ell - 2, ell - 1) - log_binomial(N + ell - 1, N - ell));
}

AsymptoticProfile asymptotic_profile(int N) {
    if (N < 1) throw std::invalid_argument("asymptotic_profile: N must be positive");
    AsymptoticProfile p;
    p.N = N;
    for (int j = 1; j <= N; ++j) {
        p.shifts.push_back(shift_c<double>(N, j));
        p.widths.push_back(2.0 * j - 1.0);
        p.speeds.push_back((2.0 * j - 1.0) * (2.0 * j - 1.0));
    }
    return p;
}

template <typename Real>
Real soliton_center(int N, int j, const Real& t) {
    const Real w = 2 * j - 1;
    return w * w * t - shift_c<Real>(N, j);
}

template <typename Real>
Real soliton_profile(int N, int j, const Real& t, const Real& x) {
    const Real w = 2 * j - 1;
    const Real v = w * sech<Real>(w * (x - soliton_center<Real>(N, j, t)));
    return (N % 2 == 0) ? v : Real(-v);
}

template <typename Real>
Real resolution_sum(int N, const Real& t, const Real& x) {
    if (N < 1) throw std::invalid_argument("resolution_sum: N must be positive");
    Real s = 0;
    for (int j = 1; j <= N; ++j) s += soliton_profile<Real>(N, j, t, x);
    return s;
}

// ---------------------------------------------------------------- Schur scalars and block inverse

SchurScalars schur_scalars(int N, int ell) {
    check_ell(N, ell);
    const double w = 2.0 * ell - 1.0;
    const double cl = static_cast<double>(binomial(2 * ell - 2, ell - 1));
    const double cr = std::exp(log_binomial(N + ell - 1, 2 * ell - 1));
    const double sign = ((N - ell) % 2 == 0) ? 1.0 : -1.0;
    return {2.0 * w * cl * cl, 2.0 * w * cr * cr, 2.0 * w * cl, 2.0 * sign * w * cr};
}

namespace {

template <typename Real>
void fill_blocks(int N, int ell, MatrixR<Real>& B, MatrixR<Real>& H, VectorR<Real>& b, VectorR<Real>& f, Real& d) {
    const int nb = ell - 1, nh = N - ell;
    auto h = [](int j, int k) { return Real(1) / Real(2 * (j + k - 1)); };
    B.resize(nb, nb);
    b.resize(nb);
    for (int j = 1; j <= nb; ++j) {
        b(j - 1) = h(j, ell);
        for (int k = 1; k <= nb; ++k) B(j - 1, k - 1) = h(j, k);
    }
    H.resize(nh, nh);
    f.resize(nh);
    for (int j = ell + 1; j <= N; ++j) {
        f(j - ell - 1) = h(ell, j);
        for (int k = ell + 1; k <= N; ++k) H(j - ell - 1, k - ell - 1) = h(j, k);
    }
    d = h(ell, ell);
}

template <typename Real>
VectorR<Real> solve_or_empty(const MatrixR<Real>& m, const VectorR<Real>& v) {
    if (m.rows() == 0) return VectorR<Real>(0);
    return m.partialPivLu().solve(v);
}

}  // namespace

SchurScalars schur_scalars_direct(int N, int ell) {
    check_ell(N, ell);
    using L = long double;
    MatrixR<L> B, H;
    VectorR<L> b, f;
    L d;
    fill_blocks<L>(N, ell, B, H, b, f, d);
    const VectorR<L> Bib = solve_or_empty(B, b);
    const VectorR<L> Hif = solve_or_empty(H, f);
    const L sl = d - b.dot(Bib);
    const L sr = d - f.dot(Hif);
    return {static_cast<double>(1.0L / sl), static_cast<double>(1.0L / sr),
            static_cast<double>((1.0L - Bib.sum()) / sl), static_cast<double>((1.0L - Hif.sum()) / sr)};
}

template <typename Real>
BlockDecomposition<Real> block_decomposition(int N, int ell, std::complex<Real> gamma_ell) {
    check_ell(N, ell);
    if (gamma_ell == std::complex<Real>(0)) throw std::invalid_argument("block_decomposition: gamma_ell = 0");
    using S = std::complex<Real>;
    BlockDecomposition<Real> r;
    r.N = N;
    r.ell = ell;
    r.gamma_ell = gamma_ell;
    fill_blocks<Real>(N, ell, r.B, r.H, r.b, r.f, r.d);
    const VectorR<Real> Bib = solve_or_empty(r.B, r.b);
    const VectorR<Real> Hif = solve_or_empty(r.H, r.f);
    const S gi = S(1) / gamma_ell;
    r.z = S(1) / (gi * (r.d - r.b.dot(Bib)) + gamma_ell * (r.d - r.f.dot(Hif)));

    const int m = ell - 1;
    r.A = BlockDecomposition<Real>::MatrixS::Zero(N, N);
    for (int j = 0; j < N; ++j)
        for (int k = 0; k < N; ++k) {
            const Real h = Real(1) / Real(2 * (j + k + 1));
            if (j < m && k <= m) r.A(j, k) = h;
            else if (j == m && k < m) r.A(j, k) = gi * h;
            else if (j == m && k == m) r.A(j, k) = (gi + gamma_ell) * h;
            else if (j == m && k > m) r.A(j, k) = h;
            else if (j > m && k == m) r.A(j, k) = gamma_ell * h;
            else if (j > m && k > m) r.A(j, k) = h;
        }
    return r;
}

template <typename Real>
typename BlockDecomposition<Real>::MatrixS block_inverse(const BlockDecomposition<Real>& blk) {
    using S = std::complex<Real>;
    using MS = typename BlockDecomposition<Real>::MatrixS;
    const int N = blk.N, m = blk.ell - 1, nh = N - blk.ell;
    const MatrixR<Real> Bi = m > 0 ? MatrixR<Real>(blk.B.partialPivLu().inverse()) : MatrixR<Real>(0, 0);
    const MatrixR<Real> Hi = nh > 0 ? MatrixR<Real>(blk.H.partialPivLu().inverse()) : MatrixR<Real>(0, 0);
    const VectorR<Real> Bib = Bi * blk.b;
    const VectorR<Real> Hif = Hi * blk.f;
    const S z = blk.z, g = blk.gamma_ell, gi = S(1) / blk.gamma_ell;

    MS X(N, N);
    const MS BibC = Bib.template cast<S>();
    const MS HifC = Hif.template cast<S>();
    if (m > 0) {
        X.topLeftCorner(m, m) = Bi.template cast<S>() + z * gi * BibC * BibC.transpose();
        X.block(0, m, m, 1) = -z * BibC;
        X.block(m, 0, 1, m) = -z * gi * BibC.transpose();
    }
    X(m, m) = z;
    if (nh > 0) {
        X.block(m, m + 1, 1, nh) = -z * HifC.transpose();
        X.block(m + 1, m, nh, 1) = -z * g * HifC;
        X.bottomRightCorner(nh, nh) = Hi.template cast<S>() + z * g * HifC * HifC.transpose();
    }
    if (m > 0 && nh > 0) {
        X.block(0, m + 1, m, nh) = z * BibC * HifC.transpose();
        X.block(m + 1, 0, nh, m) = z * HifC * BibC.transpose();
    }
    return X;
}

template <typename Real>
std::complex<Real> psi_representation(const BlockDecomposition<Real>& blk) {
    const auto X = block_inverse(blk);
    std::complex<Real> s(0);
    for (int j = 0; j < blk.ell; ++j)
        for (int k = blk.ell - 1; k < blk.N; ++k) s += X(j, k);
    return s;
}

template <typename Real>
std::complex<Real> psi_closed_form(int N, int ell, std::complex<Real> gamma_ell) {
    check_ell(N, ell);
    using S = std::complex<Real>;
    const S w = Real(a_tilde(N, ell)) * gamma_ell;
    const Real sign = ((N - ell) % 2 == 0) ? Real(1) : Real(-1);
    return sign * Real(2 * ell - 1) * Real(2) / (w + S(1) / w);
}

// ---------------------------------------------------------------- conjugated W

template <typename Real>
ConjugatedW<Real> conjugated_w(int N, int ell, Parity parity, const Real& t, const Real& x, bool guard) {
    using std::exp;
    if (N < 1) throw std::invalid_argument("conjugated_w: N must be positive");
    if (parity == Parity::Even ? (ell < 0 || ell > N) : (ell < 1 || ell > N))
        throw std::invalid_argument("conjugated_w: ell out of range for parity");
    const std::vector<Real> g = log_gamma(N, t, x);
    const bool odd = parity == Parity::Odd;

    // Powers of gamma in the left/right diagonal conjugations.
    std::vector<int> alpha(N), beta(N);
    for (int j = 1; j <= N; ++j) {
        alpha[j - 1] = (odd ? j < ell : j <= ell) ? 0 : -1;
        beta[j - 1] = (j <= ell) ? 0 : -1;
    }

    ConjugatedW<Real> w;
    w.N = N;
    w.ell = ell;
    w.parity = parity;
    w.W = MatrixR<Real>::Zero(N, N);
    w.A = MatrixR<Real>::Zero(N, N);
    w.O = MatrixR<Real>::Zero(N, N);
    for (int j = 0; j < N; ++j)
        for (int k = 0; k < N; ++k) {
            const Real h = Real(1) / Real(2 * (j + k + 1));
            for (int shift = 0; shift <= 1; ++shift) {
                const int pj = alpha[j] + shift, pk = beta[k] + shift;
                // Which gamma indices carry a nonzero total power?
                bool only_ell = true;
                if (j == k) {
                    if (pj + pk != 0 && !(odd && j == ell - 1)) only_ell = false;
                } else {
                    if (pj != 0 && !(odd && j == ell - 1)) only_ell = false;
                    if (pk != 0 && !(odd && k == ell - 1)) only_ell = false;
                }
                const Real lg = Real(pj) * g[j] + Real(pk) * g[k];
                const int sign = sign_pow(sy_sign(j + 1), pj) * sign_pow(sy_sign(k + 1), pk);
                const Real term = (sign > 0 ? exp(lg) : Real(-exp(lg))) * h;
                w.W(j, k) += term;
                if (only_ell) w.A(j, k) += term;
                else w.O(j, k) += term;
            }
        }

    w.row.resize(N);
    w.col.resize(N);
    for (int j = 0; j < N; ++j) {
        const Real gj = exp(g[j]);
        const Real sgj = sy_sign(j + 1) > 0 ? gj : Real(-gj);
        w.row(j) = (j < ell) ? Real(1) : Real(1) / sgj;
        const int last_gamma = odd ? ell - 1 : ell;
        w.col(j) = (j < last_gamma) ? sgj : Real(1);
    }

    const Eigen::MatrixXd Od = w.O.unaryExpr([](const Real& v) { return to_double(v); });
    w.o_max = N > 0 ? Od.cwiseAbs().maxCoeff() : 0.0;
    w.o_norm = Eigen::JacobiSVD<Eigen::MatrixXd>(Od).singularValues()(0);
    if (guard && !(w.o_max <= 0.5))
        throw NumericalError(Breakdown::RegimeTooEarly, "conjugated_w: remainder not dominated by the limit", w.o_max);
    return w;
}

template <typename Real>
Real evaluate_naive_sy(int N, const Real& t, const Real& x) {
    using std::exp;
    using std::log;
    using std::sqrt;
    if (N < 1) throw std::invalid_argument("evaluate_naive_sy: N must be positive");
    const std::vector<Real> g = log_gamma(N, t, x);
    // h_j = log sqrt(M_jj), M_jj = (1 + e^{2 g_j}) / (2(2j-1))
    std::vector<Real> h(N);
    for (int j = 0; j < N; ++j) {
        const Real two_g = 2 * g[j];
        const Real softplus = two_g > 0 ? Real(two_g + log(Real(1) + exp(-two_g))) : Real(log(Real(1) + exp(two_g)));
        h[j] = (softplus - log(Real(2 * (2 * j + 1)))) / 2;
    }
    MatrixR<Real> M(N, N);
    VectorR<Real> rhs(N);
    for (int j = 0; j < N; ++j) {
        for (int k = 0; k < N; ++k) {
            const int s = sy_sign(j + 1) * sy_sign(k + 1);
            const Real a = exp(-h[j] - h[k]);
            const Real b = exp(g[j] + g[k] - h[j] - h[k]);
            M(j, k) = (a + (s > 0 ? b : Real(-b))) / Real(2 * (j + k + 1));
        }
        const Real r = exp(g[j] - h[j]);
        rhs(j) = sy_sign(j + 1) > 0 ? r : Real(-r);
    }
    Eigen::LLT<MatrixR<Real>> llt(M);
    if (llt.info() != Eigen::Success)
        throw NumericalError(Breakdown::NotPositiveDefinite, "evaluate_naive_sy: Cholesky failed");
    const VectorR<Real> y = llt.solve(rhs);
    Real u = 0;
    for (int j = 0; j < N; ++j) u += exp(-h[j]) * y(j);
    return u;
}

template <typename Real>
Real evaluate_stable(int N, const Real& t, const Real& x, double epsilon) {
    if (N < 1) throw std::invalid_argument("evaluate_stable: N must be positive");
    if (!(to_double(t) > 0.0)) return evaluate_naive_sy<Real>(N, t, x);
    const double eps = epsilon > 0.0 ? epsilon : default_epsilon(N);
    const int m = regime_index(to_double(x), to_double(t), N, eps);
    const Parity parity = (m % 2 == 0) ? Parity::Even : Parity::Odd;
    const int ell = parity == Parity::Even ? m / 2 : (m + 1) / 2;
    try {
        const ConjugatedW<Real> w = conjugated_w<Real>(N, ell, parity, t, x, true);
        const VectorR<Real> y = w.W.partialPivLu().solve(w.col);
        return w.row.dot(y);
    } catch (const NumericalError& e) {
        if (e.kind() != Breakdown::RegimeTooEarly) throw;
        return evaluate_naive_sy<Real>(N, t, x);
    }
}

// ---------------------------------------------------------------- router

const char* to_string(EvalPath path) noexcept {
    switch (path) {
        case EvalPath::Naive: return "naive";
        case EvalPath::Stable: return "stable";
        case EvalPath::ScaledNaive: return "scaled-naive";
    }
    return "unknown";
}

RoutedValue evaluate_sy(int N, double t, double x, const RouterOptions& opts) {
    if (N < 1) throw std::invalid_argument("evaluate_sy: N must be positive");
    double max_exp = 0.0;
    for (int j = 1; j <= N; ++j) {
        const double w = 2.0 * j - 1.0;
        max_exp = std::max(max_exp, std::abs(w * (w * w * t - x)));
    }
    if (max_exp <= opts.max_naive_exponent) {
        try {
            FlowPoint pt;
            pt.t = t;
            pt.x = x;
            NaiveOptions no;
            no.max_condition = opts.max_condition;
            return {evaluate_naive(satsuma_yajima_spec(N), pt, no).real(), EvalPath::Naive};
        } catch (const NumericalError& e) {
            if (e.kind() != Breakdown::IllConditioned) throw;
        }
    }
    if (t > 0.0)
        return {static_cast<double>(evaluate_stable<long double>(N, t, x, opts.epsilon)), EvalPath::Stable};
    return {static_cast<double>(evaluate_naive_sy<long double>(N, t, x)), EvalPath::ScaledNaive};
}

double locate_peak(int N, int j, double t) {
    check_ell(N, j);
    if (!(t >= 2.0)) throw std::invalid_argument("locate_peak: solitons are not separated before t = 2");
    const double w = 2.0 * j - 1.0;
    const double mid = w * w * t;
    double half = std::abs(shift_c<double>(N, j)) + 1.0;
    if (j > 1) half = std::min(half, 0.5 * (mid - (w - 2.0) * (w - 2.0) * t));
    if (j < N) half = std::min(half, 0.5 * ((w + 2.0) * (w + 2.0) * t - mid));
    auto neg_abs = [&](long double x) {
        return -std::abs(evaluate_stable<long double>(N, static_cast<long double>(t), x));
    };
    const double step = 0.02 / w;
    const long n = static_cast<long>(std::ceil(half / step));
    long best = -n;
    long double best_v = neg_abs(mid - n * step);
    for (long k = -n + 1; k <= n; ++k) {
        const long double v = neg_abs(mid + k * step);
        if (v < best_v) {
            best_v = v;
            best = k;
        }
    }
    const long double lo = mid + (best - 1) * step, hi = mid + (best + 1) * step;
    const auto r = boost::math::tools::brent_find_minima(neg_abs, lo, hi, std::numeric_limits<long double>::digits / 2);
    return static_cast<double>(r.first);
}

// ---------------------------------------------------------------- instantiations

#define MKDV_REAL_INSTANTIATIONS(R)                                                              \
    template R shift_c<R>(int, int);                                                             \
    template R soliton_center<R>(int, int, const R&);                                            \
    template R soliton_profile<R>(int, int, const R&, const R&);                                 \
    template R resolution_sum<R>(int, const R&, const R&);                                       \
    template ConjugatedW<R> conjugated_w<R>(int, int, Parity, const R&, const R&, bool);         \
    template R evaluate_stable<R>(int, const R&, const R&, double);                              \
    template R evaluate_naive_sy<R>(int, const R&, const R&);

MKDV_REAL_INSTANTIATIONS(double)
MKDV_REAL_INSTANTIATIONS(long double)
MKDV_REAL_INSTANTIATIONS(Extended)

#define MKDV_BLOCK_INSTANTIATIONS(R)                                                                        \
    template BlockDecomposition<R> block_decomposition<R>(int, int, std::complex<R>);                        \
    template typename BlockDecomposition<R>::MatrixS block_inverse<R>(const BlockDecomposition<R>&);         \
    template std::complex<R> psi_representation<R>(const BlockDecomposition<R>&);                            \
    template std::complex<R> psi_closed_form<R>(int, int, std::complex<R>);

MKDV_BLOCK_INSTANTIATIONS(double)
MKDV_BLOCK_INSTANTIATIONS(long double)
MKDV_BLOCK_INSTANTIATIONS(Extended)

}  // namespace mkdv::asymptotics
