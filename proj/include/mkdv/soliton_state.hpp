#pragma once

// Multisoliton state (gamma, M) and the closed-form solution u = e^* M^{-1} gamma.
//   gamma_j = a_j exp(i theta + i lambda_j (x - y) - i lambda_j^2 s + i lambda_j^3 t)
//   M_jk    = i (1 + gamma_j conj(gamma_k)) / (lambda_j - conj(lambda_k))
// e is the all-ones vector and is never stored.

#include "mkdv/precision.hpp"

#include <Eigen/Dense>

#include <vector>

namespace mkdv {

using VectorC = Eigen::VectorXcd;
using MatrixC = Eigen::MatrixXcd;

class SolitonSpec {
public:
    /// Throws std::invalid_argument unless sizes match, Im lambda_j > 0 and a_j != 0.
    SolitonSpec(VectorC lambda, VectorC a);

    int size() const noexcept { return static_cast<int>(lambda_.size()); }
    const VectorC& lambda() const noexcept { return lambda_; }
    const VectorC& a() const noexcept { return a_; }

    /// max_j |lambda_j|
    double spectral_radius() const;

private:
    VectorC lambda_;
    VectorC a_;
};

struct FlowPoint {
    double theta = 0.0;
    double y = 0.0;
    double s = 0.0;
    double t = 0.0;
    double x = 0.0;
};

/// FlowPoint in long double, for stencils whose abscissae must not be rounded to double.
struct FlowPointL {
    long double theta = 0.0L;
    long double y = 0.0L;
    long double s = 0.0L;
    long double t = 0.0L;
    long double x = 0.0L;
};

/// lambda_j = i(2j-1), a_j = (-1)^j, j = 1..N.
SolitonSpec satsuma_yajima_spec(int N);

struct GammaVector {
    VectorC gamma;
    /// i theta + i lambda_j (x-y) - i lambda_j^2 s + i lambda_j^3 t + log a_j
    VectorC exponent;
    bool overflow = false;
};

GammaVector gamma_vector(const SolitonSpec& spec, const FlowPoint& pt);

struct StateMatrices {
    VectorC gamma;
    MatrixC M;
    VectorC lambda;  ///< diagonal of Lambda
};

/// Throws NumericalError(Overflow) if some gamma_j conj(gamma_k) leaves the double range.
StateMatrices state_matrix(const SolitonSpec& spec, const FlowPoint& pt);

struct NaiveOptions {
    double max_condition = 1e12;
};

struct NaiveResult {
    Complex value;
    /// 1-norm condition estimate of the Jacobi-equilibrated M.
    double condition = 0.0;
    /// max_j |Re exponent_j|
    double max_exponent = 0.0;
};

/// e^* M^{-1} gamma by Cholesky. M is assembled and factored in extended
/// (long double) precision after symmetric diagonal scaling, since the
/// Satsuma-Yajima Gram matrices are Hilbert-like. Throws NumericalError with
/// IllConditioned, NotPositiveDefinite or Overflow.
NaiveResult evaluate_naive_checked(const SolitonSpec& spec, const FlowPoint& pt,
                                   const NaiveOptions& opts = {});

inline Complex evaluate_naive(const SolitonSpec& spec, const FlowPoint& pt,
                              const NaiveOptions& opts = {}) {
    return evaluate_naive_checked(spec, pt, opts).value;
}

/// The same solve with parameters and result kept in long double and no
/// condition threshold; finite-difference residuals use it to push their
/// rounding floor (~eps/h^3) below the truncation error.
ComplexL evaluate_naive_long(const SolitonSpec& spec, const FlowPointL& pt);

/// Closed-form x-, s- and t-derivatives of gamma and M.
struct AnalyticDerivatives {
    VectorC gamma1, gamma2, gamma3;  ///< gamma', gamma'', gamma'''
    MatrixC M1, M2, M3;              ///< M', M'', M'''
    VectorC gamma_s, gamma_t;
    MatrixC M_s, M_t;
};

AnalyticDerivatives analytic_derivatives(const SolitonSpec& spec, const FlowPoint& pt);

/// max |Lambda M - M Lambda^* - i e e^* - i gamma gamma^*|
double identity66_residual(const SolitonSpec& spec, const FlowPoint& pt);

/// Derivatives of u built from the closed forms above (no finite differences):
/// returns |u_t + u''' + 6|u|^2 u'| and |i u_s + u'' + 2|u|^2 u|.
struct AnalyticResiduals {
    double mkdv = 0.0;
    double nls = 0.0;
};
AnalyticResiduals analytic_flow_residuals(const SolitonSpec& spec, const FlowPoint& pt);

/// The binomial change of basis diagonalising the t=0 Satsuma-Yajima data.
struct ConjugationCheck {
    MatrixC T;
    double gram_residual = 0.0;   ///< relative max |T^* M T - (1+e^{-2x})/(2(j+k-1))|
    double ones_residual = 0.0;   ///< max |T^* e - delta_{k1}|
    double gamma_residual = 0.0;  ///< max |T^* gamma + e^{-x}|
};
ConjugationCheck binomial_conjugation(int N, double x);

struct InitialDataReport {
    double max_deviation = 0.0;   ///< max |u(0,x) - (-1)^N N sech x| over the grid
    double max_conjugation = 0.0; ///< worst of the ConjugationCheck residuals
};

/// Requires N <= 12 and |x| <= 12 for all grid points.
InitialDataReport verify_initial_data(int N, const std::vector<double>& xs);

}  // namespace mkdv
