#pragma once

// Working-precision types. The Satsuma-Yajima matrices are Hilbert-like, so
// double loses ~N digits per soliton; `long double` is the default working
// type for matrix solves and `Extended` (50 decimal digits) is used where
// exponentially small differences have to be resolved.

#include <boost/multiprecision/mpfr.hpp>
#include <boost/multiprecision/eigen.hpp>
#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>

namespace mkdv {

using Extended = boost::multiprecision::mpfr_float_50;

template <typename Real>
using MatrixR = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Real>
using VectorR = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

using Complex = std::complex<double>;
using ComplexL = std::complex<long double>;

inline constexpr double kPi = std::numbers::pi;

/// Conversion to double that works for builtin and multiprecision reals.
template <typename Real>
double to_double(const Real& v) {
    if constexpr (std::is_arithmetic_v<Real>) {
        return static_cast<double>(v);
    } else {
        return v.template convert_to<double>();
    }
}

}  // namespace mkdv
