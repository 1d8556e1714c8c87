#pragma once

// Large-time evaluation of the Satsuma-Yajima N-soliton (lambda_j = i(2j-1),
// a_j = (-1)^j) by conjugating M with powers of gamma so that every entry
// stays O(1), plus the limiting profile v_N = sum_j psi_j.
//
// Templates are instantiated for double, long double and Extended.
// Block-inverse helpers (complex gamma_ell) likewise.

#include "mkdv/precision.hpp"

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

namespace mkdv::asymptotics {

/// Largest admissible epsilon, and the default.
inline double default_epsilon(int N) { return 1.0 / (2.0 * N); }

/// Partition of the line into I_0 .. I_{2N}; odd I_{2l-1} are closed and
/// centred on the l-th soliton, so interval endpoints fall in the odd ones.
class RegimePartition {
public:
    RegimePartition(int N, double t, double epsilon);

    int N() const noexcept { return N_; }
    double t() const noexcept { return t_; }
    double epsilon() const noexcept { return epsilon_; }
    /// 2N ascending endpoints: (2l-1)^2 t -/+ eps t for l = 1..N.
    const std::vector<double>& boundaries() const noexcept { return bounds_; }
    int index(double x) const;

private:
    int N_;
    double t_;
    double epsilon_;
    std::vector<double> bounds_;
};

/// Requires t > 0 and 0 < epsilon <= 1/(2N).
int regime_index(double x, double t, int N, double epsilon);

/// Exact binomial for n <= 62; throws std::overflow_error beyond.
std::uint64_t binomial(int n, int k);
/// log C(n, k); exact integers for n <= 60, lgamma beyond.
double log_binomial(int n, int k);

/// c_j = ln[C(N+j-1, N-j) / C(2j-2, j-1)] / (2j-1), 1 <= j <= N.
template <typename Real = double>
Real shift_c(int N, int j);

/// The integer ratio behind c_j (numerator C(N+j-1,N-j), denominator C(2j-2,j-1)); N <= 30.
struct ShiftRatio {
    std::uint64_t numerator;
    std::uint64_t denominator;
};
ShiftRatio shift_ratio(int N, int j);

/// a~_l = C(2l-2, l-1) / C(N+l-1, N-l).
double a_tilde(int N, int ell);

struct AsymptoticProfile {
    int N = 0;
    std::vector<double> shifts;  ///< c_j
    std::vector<double> widths;  ///< 2j-1
    std::vector<double> speeds;  ///< (2j-1)^2
};
AsymptoticProfile asymptotic_profile(int N);

/// Position of the j-th soliton of the exact solution at time t: (2j-1)^2 t - c_j.
/// (The block-inverse representation fixes the sign: the fast soliton is
/// advanced and the slow one delayed.)
template <typename Real = double>
Real soliton_center(int N, int j, const Real& t);

/// psi_j(t,x) = (-1)^N (2j-1) sech((2j-1)(x - soliton_center(N,j,t))).
template <typename Real = double>
Real soliton_profile(int N, int j, const Real& t, const Real& x);

/// v_N(t,x) = sum_j psi_j(t,x).
template <typename Real = double>
Real resolution_sum(int N, const Real& t, const Real& x);

struct SchurScalars {
    double inv_diag_left = 0.0;   ///< (d - b^T B^{-1} b)^{-1}
    double inv_diag_right = 0.0;  ///< (d - f^T H^{-1} f)^{-1}
    double row_left = 0.0;        ///< (1 - e^T B^{-1} b) / (d - b^T B^{-1} b)
    double row_right = 0.0;       ///< (1 - f^T H^{-1} e) / (d - f^T H^{-1} f)
};

/// Closed forms in binomial coefficients.
SchurScalars schur_scalars(int N, int ell);
/// The same four numbers from linear solves on the explicit blocks.
SchurScalars schur_scalars_direct(int N, int ell);

/// The block structure of the limit matrix A on the l-th odd interval:
///   [[B, b, 0], [g^{-1} b^T, (g^{-1} + g) d, f^T], [0, g f, H]].
template <typename Real>
struct BlockDecomposition {
    using Scalar = std::complex<Real>;
    using MatrixS = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

    int N = 0;
    int ell = 0;
    MatrixR<Real> B, H;
    VectorR<Real> b, f;
    Real d{};
    Scalar gamma_ell;
    Scalar z;
    MatrixS A;
};

template <typename Real>
BlockDecomposition<Real> block_decomposition(int N, int ell, std::complex<Real> gamma_ell);

/// A^{-1} assembled from the nine-block formula.
template <typename Real>
typename BlockDecomposition<Real>::MatrixS block_inverse(const BlockDecomposition<Real>& blocks);

/// (1,..,1 [l], 0,..) A^{-1} (0,.. [l-1], 1,..,1).
template <typename Real>
std::complex<Real> psi_representation(const BlockDecomposition<Real>& blocks);

/// (-1)^{N-l} (2l-1) 2 / (a~ g + (a~ g)^{-1}).
template <typename Real>
std::complex<Real> psi_closed_form(int N, int ell, std::complex<Real> gamma_ell);

enum class Parity { Even, Odd };

/// W = A + O after conjugation, row/col the outer vectors of the rewritten
/// solution: u = row^T W^{-1} col. Every entry is formed from a single
/// exponential of a difference of logs, so nothing overflows.
template <typename Real>
struct ConjugatedW {
    int N = 0;
    int ell = 0;
    Parity parity = Parity::Even;
    MatrixR<Real> W, A, O;
    VectorR<Real> row, col;
    double o_max = 0.0;   ///< max |O_jk|
    double o_norm = 0.0;  ///< spectral norm of O
};

/// Even parity: 0 <= ell <= N; odd parity: 1 <= ell <= N. Throws
/// NumericalError(RegimeTooEarly) when some |O_jk| > 0.5 and `guard` is set.
template <typename Real>
ConjugatedW<Real> conjugated_w(int N, int ell, Parity parity, const Real& t, const Real& x, bool guard = true);

/// u_N(t,x) through the regime-appropriate conjugation. For t <= 0 or when
/// the dominance guard trips it falls back to a scaled naive solve in Real.
template <typename Real>
Real evaluate_stable(int N, const Real& t, const Real& x, double epsilon = 0.0);

/// Jacobi-scaled Cholesky solve of the real Satsuma-Yajima system in Real,
/// with entries formed in log space. Valid at any (t, x).
template <typename Real>
Real evaluate_naive_sy(int N, const Real& t, const Real& x);

enum class EvalPath { Naive, Stable, ScaledNaive };
const char* to_string(EvalPath path) noexcept;

struct RouterOptions {
    double max_naive_exponent = 30.0;
    double max_condition = 1e12;
    double epsilon = 0.0;  ///< 0 means default_epsilon(N)
};

struct RoutedValue {
    double value = 0.0;
    EvalPath path = EvalPath::Naive;
};

/// Naive evaluation inside its trust region, the conjugated path beyond it.
RoutedValue evaluate_sy(int N, double t, double x, const RouterOptions& opts = {});

/// Location of the maximum of |u_N(t, .)| belonging to the j-th soliton:
/// a scan of the stable evaluator over (2j-1)^2 t +- (|c_j| + 1), clipped to
/// half the distance to the neighbouring solitons, then Brent refinement.
/// Requires t large enough that the solitons are separated (t >= 2 is ample).
double locate_peak(int N, int j, double t);

}  // namespace mkdv::asymptotics
