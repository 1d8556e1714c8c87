#pragma once

// Norm-inflation experiments for the rescaled Satsuma-Yajima data
//   u_{N,lambda}(0, x) = (-1)^N (N / lambda) sech(x / lambda),
// with the long-time solution replaced by its soliton resolution v_{N,lambda}.
//
// Regimes: p > 2 looks for a small FL^p_s norm at some t_* in [T, 2T]
// (then reverses time); 1 <= p < 2 bounds the norm at t_* from below by
// Hoelder against the conserved L^2 norm and a small FL^4 norm.

#include "mkdv/spectral.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace mkdv::inflation {

struct ExponentTable {
    double p = 0.0;
    /// For p < 2 this is theta(4), the exponent the bound is inherited from.
    double theta = 0.0;
    double alpha = 0.0;
};

/// theta(p) = p/2 - 2 for p > 4, (p - 2)/4 on (2, 4].
double default_theta(double p);

/// Throws std::invalid_argument for p = 2, p < 1, or a theta outside the
/// admissible range (p > 4 pins theta = p/2 - 2; 2 < p <= 4 needs 0 < theta < p/2 - 1;
/// for p < 2 the override is theta(4) in (0, 1)).
ExponentTable exponents(double p, std::optional<double> theta = std::nullopt);

/// ||u_{N,lambda}(0)||_{FL^p_s} from the exact spectrum (-1)^N sqrt(pi/2) N sech(pi lambda xi / 2).
/// Requires lambda >= N.
double initial_norm(int N, double lambda, const NormSpec& norm);

/// ||u_{N,lambda}(t)||_{L^2} = N sqrt(2 / lambda) for every t.
double conserved_l2(int N, double lambda);

struct WindowMinimum {
    double t_star = 0.0;
    double value = 0.0;
    double average = 0.0;  ///< the windowed average on the same samples, >= value
};

/// Minimum over K samples of ||v_{N,lambda}(t)||_{FL^p_s}, t in [T, 2T]. Requires p > 2.
WindowMinimum min_norm_over_window(int N, double lambda, const NormSpec& norm, double T, std::size_t K,
                                   Backend backend = Backend::OpenMP, double eta_refinement = 1.0);

/// ||f||_p >= ||f||_2^{(4-p)/p} / ||<xi>^{-ps/(4-2p)} f^||_4^{(4-2p)/p}, for 1 <= p < 2.
double holder_lower_bound(double l2, double fl4, double p);

/// FL^4 regularity paired with (p, s) in the bound above: -ps / (4 - 2p).
double dual_regularity(double p, double s);

/// The bound at t_*, using the conserved L^2 norm and ||v_{N,lambda}(t_*)||_{FL^4_{s4}}.
double dual_lower_bound(int N, double lambda, double p, double s, double t_star);

using Evaluator = std::function<double(double, double)>;

/// u~(t, x) = u(t_* - t, -x), again an mKdV solution.
Evaluator reverse_solution(double t_star, Evaluator u);

struct ExperimentSchedule {
    NormSpec norm;
    std::vector<int> N_list;
    std::optional<double> theta;
    /// Sign in lambda_N = N^{p(1 + sign alpha/2)}; 0 picks +1 for p < 2 and -1 for p > 2.
    int lambda_sign = 0;
    double C_T = 1.0;
    std::size_t K = 64;
    double eta_refinement = 1.0;
    /// Recorded with the outputs; no quantity in the current experiments is sampled randomly.
    std::uint64_t seed = 0;

    /// Throws std::invalid_argument on an inconsistent schedule.
    void validate() const;
    ExponentTable exponent_table() const;
    int effective_sign() const;
    double lambda_for(int N) const;
    /// C_T lambda^3 N^{q/2 - 1 - theta(q)} with q = p (p > 2) or q = 4 (p < 2).
    double T_for(int N) const;
};

struct ExperimentRow {
    int N = 0;
    double lambda = 0.0;
    double T = 0.0;
    double initial_norm = 0.0;
    /// min window norm: at (p, s) for p > 2, at (4, s4) for p < 2
    double min_norm = 0.0;
    double t_star = 0.0;
    double lower_bound = 0.0;  ///< p < 2 only, else 0
    /// the norm at t_*: min_norm (p > 2) or lower_bound (p < 2)
    double final_norm = 0.0;
    /// large over small: initial/final for p > 2, final/initial for p < 2
    double ratio = 0.0;
    std::string status = "ok";
    std::string message;

    bool ok() const noexcept { return status == "ok"; }
};

struct SlopeFit {
    double slope = 0.0;
    double halfwidth = 0.0;
};

struct ExperimentResult {
    ExperimentSchedule schedule;
    ExponentTable exponents;
    std::vector<ExperimentRow> rows;
    /// Least-squares slopes against ln N over the rows with status ok (needs two distinct N).
    std::optional<SlopeFit> initial_slope;        ///< ln initial_norm
    std::optional<SlopeFit> final_slope;          ///< ln final_norm
    std::optional<SlopeFit> scaled_final_slope;   ///< ln (final_norm lambda^{1/p})
    std::optional<SlopeFit> ratio_slope;          ///< ln ratio

    bool all_ok() const;
};

/// Rows in N_list order. A failing row records the breakdown in `status`
/// and the run continues. An empty N_list gives an empty result.
ExperimentResult run_inflation(const ExperimentSchedule& schedule, Backend backend = Backend::OpenMP);

/// Named schedules: p1, p1.5, p3, p6 (s = 0, N = 2..8) and desk (p in {1, 1.5, 3, 6} x s in {0, 1, -1}).
std::vector<ExperimentSchedule> preset(const std::string& name);
std::vector<std::string> preset_names();

}  // namespace mkdv::inflation
