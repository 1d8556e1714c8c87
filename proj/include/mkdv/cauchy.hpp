#pragma once

// Closed-form determinant and inverse entries of Cauchy matrices
// C_jk = 1 / (a_j + b_k), plus the Hermitian variant A_jk = i / (lambda_j - conj(lambda_k))
// built from upper-half-plane spectra. Indices are zero-based.

#include "mkdv/precision.hpp"

#include <Eigen/Dense>

namespace mkdv::cauchy {

using VectorC = Eigen::VectorXcd;
using MatrixC = Eigen::MatrixXcd;
using Index = Eigen::Index;

/// Pairs closer than this (and sums a_j + b_k smaller than this) are rejected.
inline constexpr double kSeparationTolerance = 1e-12;

class CauchyPair {
public:
    /// Throws std::invalid_argument on length mismatch, empty input, or a_j + b_k ~ 0.
    CauchyPair(VectorC a, VectorC b);

    const VectorC& a() const noexcept { return a_; }
    const VectorC& b() const noexcept { return b_; }
    Index size() const noexcept { return a_.size(); }

    /// True iff the a_j are pairwise distinct and so are the b_j.
    bool regular() const noexcept { return regular_; }

private:
    VectorC a_;
    VectorC b_;
    bool regular_ = false;
};

class UpperHalfPlaneSpectrum {
public:
    /// Throws std::invalid_argument unless Im lambda_j > 0 for every j.
    explicit UpperHalfPlaneSpectrum(VectorC lambda);

    const VectorC& lambda() const noexcept { return lambda_; }
    Index size() const noexcept { return lambda_.size(); }

private:
    VectorC lambda_;
};

/// A complex number carried as log|z| and arg z, so that products of many
/// factors neither overflow nor underflow.
struct PolarValue {
    double log_abs = 0.0;
    double arg = 0.0;

    /// Raw complex value; throws NumericalError(Overflow) if |z| exceeds the double range.
    Complex value() const;
};

MatrixC cauchy_matrix(const CauchyPair& pair);

/// det C = prod_{j<k} (a_k - a_j)(b_k - b_j) / prod_{j,k} (a_j + b_k).
PolarValue cauchy_det(const CauchyPair& pair);

/// (C^{-1})_jj. Requires a regular pair.
Complex cauchy_inv_diag(const CauchyPair& pair, Index j);

/// C^{-1} e, with e the all-ones vector. Requires a regular pair.
VectorC cauchy_inv_apply_ones(const CauchyPair& pair);

/// The row vector e^T C^{-1}, returned as a column. Requires a regular pair.
VectorC ones_apply_cauchy_inv(const CauchyPair& pair);

/// A_jk = i / (lambda_j - conj(lambda_k)); Hermitian positive definite.
MatrixC hermitian_cauchy_matrix(const UpperHalfPlaneSpectrum& spectrum);

/// det A for the Hermitian matrix above; always positive.
double hermitian_cauchy_det(const UpperHalfPlaneSpectrum& spectrum);

struct InverseResult {
    MatrixC inverse;
    /// One-norm condition estimate (reciprocal of LAPACK-style rcond).
    double condition_estimate = 0.0;
};

/// Full inverse by pivoted LU. Throws NumericalError(Singular) when the
/// matrix is singular to working precision; the diagnostic is the estimate.
InverseResult cauchy_inverse_full(const CauchyPair& pair);

}  // namespace mkdv::cauchy
