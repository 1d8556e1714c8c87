#pragma once

// Finite-difference residuals of the flows satisfied by the multisoliton
// formula, and an integrating-factor RK4 pseudospectral solver for
//   u_t + u_xxx = -6 u^2 u_x
// used as an independent oracle.

#include "mkdv/fourier.hpp"
#include "mkdv/soliton_state.hpp"

#include <functional>
#include <iosfwd>
#include <map>
#include <span>
#include <vector>

namespace mkdv::pde {

/// 4th-order central stencils. k <= 0 selects the flow-parameter step
/// automatically from the spectrum (see residual_* overloads taking a spec).
struct StencilConfig {
    double h = 1e-2;
    double k = 0.0;
};

using Field2 = std::function<Complex(double, double)>;

/// |u_t + u_xxx + 6 |u|^2 u_x| at (t, x); for real u this is the mKdV residual.
double residual_mkdv(const Field2& u_tx, double t, double x, double h, double k);
/// |i u_s + u_xx + 2 |u|^2 u| at (s, x).
double residual_nls(const Field2& u_sx, double s, double x, double h, double k);
/// |u_theta - i u|.
double residual_phase(const std::function<Complex(double)>& u_theta, double theta, double k);
/// |u_y + u_x| at (y, x).
double residual_translation(const Field2& u_yx, double y, double x, double h, double k);

/// The same residuals for the closed-form solution of `spec`, varying the
/// relevant flow parameter of `pt`. With cfg.k <= 0 the t-step is
/// h / max(1, max|lambda|^2) and the s- and y-steps are h / max(1, max|lambda|),
/// which keeps the flow-direction truncation error below the spatial one.
double residual_mkdv(const SolitonSpec& spec, const FlowPoint& pt, const StencilConfig& cfg);
double residual_nls(const SolitonSpec& spec, const FlowPoint& pt, const StencilConfig& cfg);
double residual_phase(const SolitonSpec& spec, const FlowPoint& pt, const StencilConfig& cfg);
double residual_translation(const SolitonSpec& spec, const FlowPoint& pt, const StencilConfig& cfg);

/// Log-log least-squares slope of residual(h) over the given steps.
struct OrderFit {
    std::vector<double> steps;
    std::vector<double> residuals;
    double slope = 0.0;
};
OrderFit convergence_order(const std::function<double(double)>& residual_at, const std::vector<double>& steps);

/// Both schemes treat u_xxx exactly through the multiplier e^{i xi^3 tau}.
/// IntegratingFactorRK4 applies classical RK4 to the transformed variable;
/// ETDRK4 (exponential time differencing) integrates the nonlinear term
/// against the exact propagator, which removes the fast xi^3 rotation from
/// the RK error constant.
enum class Scheme { IntegratingFactorRK4, ETDRK4 };

struct IntegratorOptions {
    Scheme scheme = Scheme::IntegratingFactorRK4;
    double cfl = 1.0;               ///< require dt <= cfl * dx
    double dealias_fraction = 2.0 / 3.0;
    double tail_tolerance = 1e-12;  ///< max relative |u0^| beyond the dealiasing cut
    /// Internal steps per dt; 0 picks them so that h max|u|^3 <= stiffness_budget,
    /// max|u|^3 being the time-frequency of the fastest soliton.
    int substeps = 0;
    double stiffness_budget = 2e-3;
};

class MkdvIntegrator {
public:
    /// Throws std::invalid_argument if dt violates the CFL guard, u0 is not
    /// sampled on `grid`, or u0 is not resolved.
    MkdvIntegrator(const FourierGrid& grid, std::span<const double> u0, double dt, IntegratorOptions opts = {});

    void step();
    /// Steps until time() reaches t_end; the final step is shortened if needed.
    void advance_to(double t_end);

    double time() const noexcept { return time_; }
    double dt() const noexcept { return dt_; }
    /// Internal steps used for the latest dt.
    int last_substeps() const noexcept { return last_substeps_; }
    const FourierGrid& grid() const noexcept { return grid_; }
    std::vector<double> field() const;
    /// max |Im u| after the latest inverse transform
    double max_imag() const noexcept { return max_imag_; }
    double mass() const;
    double initial_mass() const noexcept { return mass0_; }
    /// max over completed steps of |mass - mass0| / mass0
    double max_mass_drift() const noexcept { return max_drift_; }

private:
    std::vector<Complex> nonlinear(const std::vector<Complex>& uh) const;
    void advance(double dt);
    void if_rk4(double dt);
    void etd_rk4(double dt);

    struct EtdCoefficients {
        double dt = 0.0;
        std::vector<Complex> E, E2, Q, f1, f2, f3;
    };
    const EtdCoefficients& etd_coefficients(double h);

    FourierGrid grid_;
    double dt_;
    Scheme scheme_;
    int substeps_;
    double stiffness_budget_;
    int last_substeps_ = 1;
    std::map<double, EtdCoefficients> etd_cache_;
    mutable double peak_ = 0.0;  // max |u| seen by the latest nonlinear evaluation
    double time_ = 0.0;
    std::vector<double> xi_;
    std::vector<double> mask_;
    std::vector<Complex> uh_;  // DFT coefficients, FFT order
    double mass0_ = 0.0;
    double max_drift_ = 0.0;
    mutable double max_imag_ = 0.0;
};

/// Convenience wrapper: integrate u0 to t_end and return the real field.
/// Throws NumericalError(BlowUp) if non-finite values appear.
std::vector<double> integrate_mkdv(std::span<const double> u0, const FourierGrid& grid, double t_end, double dt,
                                   const IntegratorOptions& opts = {});

/// CSV rows t,x,u with a header line.
void write_snapshot_csv(std::ostream& out, double t, const FourierGrid& grid, std::span<const double> u);

}  // namespace mkdv::pde
