#include "mkdv/cauchy.hpp"

#include "mkdv/errors.hpp"

#include <cfloat>
#include <cmath>
#include <stdexcept>

namespace mkdv::cauchy {

namespace {

void require_regular(const CauchyPair& pair) {
    if (!pair.regular())
        throw std::invalid_argument("cauchy: operation needs pairwise distinct a_j and b_j");
}

// Accumulates a product as sum of log|z| and arg z.
struct LogProduct {
    double log_abs = 0.0;
    double arg = 0.0;

    void mul(Complex z) {
        log_abs += std::log(std::abs(z));
        arg += std::arg(z);
    }
    void div(Complex z) {
        log_abs -= std::log(std::abs(z));
        arg -= std::arg(z);
    }
    PolarValue result() const { return {log_abs, std::remainder(arg, 2.0 * kPi)}; }
};

}  // namespace

CauchyPair::CauchyPair(VectorC a, VectorC b) : a_(std::move(a)), b_(std::move(b)) {
    if (a_.size() == 0 || a_.size() != b_.size())
        throw std::invalid_argument("CauchyPair: a and b must be non-empty and of equal length");
    const Index n = a_.size();
    for (Index j = 0; j < n; ++j) {
        if (!std::isfinite(a_(j).real()) || !std::isfinite(a_(j).imag()) ||
            !std::isfinite(b_(j).real()) || !std::isfinite(b_(j).imag()))
            throw std::invalid_argument("CauchyPair: non-finite entry");
        for (Index k = 0; k < n; ++k)
            if (std::abs(a_(j) + b_(k)) < kSeparationTolerance)
                throw std::invalid_argument("CauchyPair: a_j + b_k vanishes");
    }
    regular_ = true;
    for (Index j = 0; j < n && regular_; ++j)
        for (Index k = j + 1; k < n; ++k)
            if (std::abs(a_(j) - a_(k)) < kSeparationTolerance ||
                std::abs(b_(j) - b_(k)) < kSeparationTolerance) {
                regular_ = false;
                break;
            }
}

UpperHalfPlaneSpectrum::UpperHalfPlaneSpectrum(VectorC lambda) : lambda_(std::move(lambda)) {
    if (lambda_.size() == 0) throw std::invalid_argument("UpperHalfPlaneSpectrum: empty");
    for (Index j = 0; j < lambda_.size(); ++j)
        if (!(lambda_(j).imag() > 0.0) || !std::isfinite(lambda_(j).real()))
            throw std::invalid_argument("UpperHalfPlaneSpectrum: Im lambda must be positive");
}

Complex PolarValue::value() const {
    if (log_abs > std::log(DBL_MAX))
        throw NumericalError(Breakdown::Overflow, "PolarValue: magnitude exceeds double range", log_abs);
    return std::polar(std::exp(log_abs), arg);
}

MatrixC cauchy_matrix(const CauchyPair& pair) {
    const Index n = pair.size();
    MatrixC c(n, n);
    for (Index j = 0; j < n; ++j)
        for (Index k = 0; k < n; ++k) c(j, k) = 1.0 / (pair.a()(j) + pair.b()(k));
    return c;
}

PolarValue cauchy_det(const CauchyPair& pair) {
    const auto& a = pair.a();
    const auto& b = pair.b();
    const Index n = pair.size();
    if (!pair.regular()) return {-std::numeric_limits<double>::infinity(), 0.0};
    LogProduct p;
    for (Index j = 0; j < n; ++j)
        for (Index k = j + 1; k < n; ++k) {
            p.mul(a(k) - a(j));
            p.mul(b(k) - b(j));
        }
    for (Index j = 0; j < n; ++j)
        for (Index k = 0; k < n; ++k) p.div(a(j) + b(k));
    return p.result();
}

Complex cauchy_inv_diag(const CauchyPair& pair, Index j) {
    require_regular(pair);
    if (j < 0 || j >= pair.size()) throw std::invalid_argument("cauchy_inv_diag: index out of range");
    const auto& a = pair.a();
    const auto& b = pair.b();
    Complex r = a(j) + b(j);
    for (Index k = 0; k < pair.size(); ++k) {
        if (k == j) continue;
        r *= (a(k) + b(j)) * (b(k) + a(j)) / ((a(k) - a(j)) * (b(k) - b(j)));
    }
    return r;
}

VectorC cauchy_inv_apply_ones(const CauchyPair& pair) {
    require_regular(pair);
    const auto& a = pair.a();
    const auto& b = pair.b();
    const Index n = pair.size();
    VectorC out(n);
    for (Index j = 0; j < n; ++j) {
        Complex r = a(j) + b(j);
        for (Index k = 0; k < n; ++k)
            if (k != j) r *= (b(j) + a(k)) / (b(j) - b(k));
        out(j) = r;
    }
    return out;
}

VectorC ones_apply_cauchy_inv(const CauchyPair& pair) {
    require_regular(pair);
    const auto& a = pair.a();
    const auto& b = pair.b();
    const Index n = pair.size();
    VectorC out(n);
    for (Index j = 0; j < n; ++j) {
        Complex r = a(j) + b(j);
        for (Index k = 0; k < n; ++k)
            if (k != j) r *= (a(j) + b(k)) / (a(j) - a(k));
        out(j) = r;
    }
    return out;
}

MatrixC hermitian_cauchy_matrix(const UpperHalfPlaneSpectrum& spectrum) {
    const auto& l = spectrum.lambda();
    const Index n = l.size();
    const Complex i(0.0, 1.0);
    MatrixC m(n, n);
    for (Index j = 0; j < n; ++j)
        for (Index k = 0; k < n; ++k) m(j, k) = i / (l(j) - std::conj(l(k)));
    return m;
}

double hermitian_cauchy_det(const UpperHalfPlaneSpectrum& spectrum) {
    const auto& l = spectrum.lambda();
    const Index n = l.size();
    double log_det = 0.0;
    for (Index j = 0; j < n; ++j) {
        log_det -= std::log(2.0 * l(j).imag());
        for (Index k = j + 1; k < n; ++k)
            log_det += 2.0 * (std::log(std::abs(l(j) - l(k))) - std::log(std::abs(l(j) - std::conj(l(k)))));
    }
    return std::exp(log_det);
}

InverseResult cauchy_inverse_full(const CauchyPair& pair) {
    require_regular(pair);
    const MatrixC c = cauchy_matrix(pair);
    Eigen::PartialPivLU<MatrixC> lu(c);
    const double rcond = lu.rcond();
    const double cond = rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
    if (!(rcond > DBL_EPSILON))
        throw NumericalError(Breakdown::Singular, "cauchy_inverse_full: singular to working precision", cond);
    return {lu.inverse(), cond};
}

}  // namespace mkdv::cauchy
