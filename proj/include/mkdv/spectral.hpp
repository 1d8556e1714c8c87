#pragma once

// Fourier-Lebesgue and modulation norms, the closed-form spectrum of the
// scaled soliton sum v_{N,lambda}, and quadratic-phase exponential sums.
//
//   ||f||_{FL^p_s} = ( \int <xi>^{ps} |f^(xi)|^p dxi )^{1/p},  <xi> = sqrt(1 + xi^2)

#include "mkdv/fourier.hpp"
#include "mkdv/precision.hpp"

#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace mkdv {

struct NormSpec {
    double p = 2.0;
    double s = 0.0;

    /// Throws std::invalid_argument unless 1 <= p < inf and s finite.
    void validate() const;
};

inline double japanese_bracket(double xi) { return std::sqrt(1.0 + xi * xi); }

/// Trapezoid (plain sum, the spectrum being periodic) over the dual grid.
double fl_norm(std::span<const Complex> spectrum, const FourierGrid& grid, const NormSpec& norm);

struct QuadratureOptions {
    double scale = 1.0;     ///< characteristic width of the integrand
    double rel_tol = 1e-11;
    int max_halvings = 24;
    int max_doublings = 40;
};

/// \int_R f by trapezoid rules, doubling the window until the tails stop
/// contributing and halving the step until successive results agree.
/// Throws NonConvergence when the caps are hit with a relative change > 1%.
double integrate_line(const std::function<double(double)>& f, const QuadratureOptions& opts = {});

/// FL^p_s norm of a function given through |f^(xi)|.
double fl_norm(const std::function<double(double)>& spectrum_modulus, const NormSpec& norm,
               const QuadratureOptions& opts = {});

/// ( sum_k <k>^{sp} ||f^||_{L^2[k,k+1)}^p )^{1/p} over integer k.
double modulation_norm(std::span<const Complex> spectrum, const FourierGrid& grid, double s, double p);

/// A_j(eta) = (-1)^N sqrt(pi/2) e^{i c_j eta} sech(pi eta / (2(2j-1))).
/// The phase sign matches the soliton centres (2j-1)^2 t - c_j of the exact solution.
Complex spectral_amplitude(int N, int j, double eta);

/// v^_{N,lambda}(t, xi) = sum_j A_j(lambda xi) e^{-i (2j-1)^2 lambda^{-2} xi t}.
/// Requires lambda >= N >= 1.
Complex v_hat_exact(int N, double lambda, double t, double xi);

/// eta-grid for integrals of |v^|^p in the scaled variable eta = lambda xi.
struct EtaQuadrature {
    double half_width = 0.0;
    double step = 0.0;
    EtaQuadrature refined() const { return {half_width, 0.5 * step}; }
};

/// Picks a window where the envelope is below 1e-17 relative and a step that
/// resolves the beat frequencies of |v^|^p up to tau_max = t_max / lambda^3.
EtaQuadrature eta_quadrature(int N, double lambda, const NormSpec& norm, double tau_max);

/// \int <eta/lambda>^{ps} |sum_j A_j(eta) e^{-i (2j-1)^2 eta tau}|^p d eta, i.e.
/// lambda * ||v_{N,lambda}(lambda^3 tau)||^p_{FL^p_s}.
double window_integrand(int N, double lambda, const NormSpec& norm, double tau, const EtaQuadrature& quad);

/// ||v_{N,lambda}(t)||_{FL^p_s} from the closed-form spectrum. Halves the eta
/// step (at most 8 times) until the result moves by < 0.1%; throws UnderResolved otherwise.
double v_fl_norm(int N, double lambda, double t, const NormSpec& norm);

/// ||sum_{n=1}^N a_n e^{i n^2 t}||_{L^p([t0, t0 + 2 pi])} from `points`
/// uniform samples. Throws UnderResolved when points < 32 N^2.
double exp_sum_norm(std::span<const Complex> a, double p, std::size_t points, double t0 = 0.0);

enum class Backend { Serial, OpenMP };

struct WindowResult {
    double value = 0.0;              ///< the window norm (average or minimum)
    double argmin_t = 0.0;           ///< sample time of the minimum
    std::vector<double> times;       ///< the K sample times
    std::vector<double> norms;       ///< FL^p_s norm at each sample
};

/// (T^{-1} \int_T^{2T} ||v_{N,lambda}(t)||^p dt)^{1/p} by the trapezoid rule on
/// K >= 64 equispaced times. Throws UnderResolved if doubling K or the eta
/// resolution moves the result by more than 1%. `eta_refinement` >= 1 divides
/// the automatic eta step.
WindowResult windowed_average_norm(int N, double lambda, const NormSpec& norm, double T, std::size_t K,
                                   Backend backend = Backend::OpenMP, double eta_refinement = 1.0);

/// Same sampling, minimum instead of average.
WindowResult min_window_norm(int N, double lambda, const NormSpec& norm, double T, std::size_t K,
                             Backend backend = Backend::OpenMP, double eta_refinement = 1.0);

/// CSV columns xi, Re f^, Im f^ with a header naming the transform convention.
void write_spectrum_csv(std::ostream& out, std::span<const Complex> spectrum, const FourierGrid& grid);

}  // namespace mkdv
