#include "mkdv/inflation.hpp"

#include <algorithm>

#include "mkdv/errors.hpp"
#include "mkdv/regression.hpp"

#include <cmath>
#include <stdexcept>

namespace mkdv::inflation {

namespace {

double sech(double v) {
    const double e = std::exp(-std::abs(v));
    return 2.0 * e / (1.0 + e * e);
}

void require_lambda(int N, double lambda) {
    if (N < 1) throw std::invalid_argument("N must be positive");
    if (!(lambda >= N) || !std::isfinite(lambda)) throw std::invalid_argument("requires lambda >= N");
}

}  // namespace

double default_theta(double p) {
    if (!(p > 2.0)) throw std::invalid_argument("default_theta: needs p > 2");
    return p > 4.0 ? 0.5 * p - 2.0 : 0.25 * (p - 2.0);
}

ExponentTable exponents(double p, std::optional<double> theta) {
    if (!(p >= 1.0) || !std::isfinite(p)) throw std::invalid_argument("exponents: needs 1 <= p < inf");
    if (p == 2.0) throw std::invalid_argument("exponents: p = 2 has no inflation exponent");
    ExponentTable e;
    e.p = p;
    if (p > 2.0) {
        e.theta = theta.value_or(default_theta(p));
        if (p > 4.0) {
            if (std::abs(e.theta - (0.5 * p - 2.0)) > 1e-12)
                throw std::invalid_argument("exponents: theta(p) = p/2 - 2 is fixed for p > 4");
        } else if (!(e.theta > 0.0 && e.theta < 0.5 * p - 1.0)) {
            throw std::invalid_argument("exponents: theta(p) must lie in (0, p/2 - 1)");
        }
        e.alpha = 0.5 - 1.0 / p - e.theta / p;
    } else {
        const ExponentTable four = exponents(4.0, theta);
        e.theta = four.theta;
        e.alpha = four.alpha * (4.0 - 2.0 * p) / p;
    }
    if (!(e.alpha > 0.0)) throw std::invalid_argument("exponents: alpha(p) is not positive");
    return e;
}

double initial_norm(int N, double lambda, const NormSpec& norm) {
    require_lambda(N, lambda);
    norm.validate();
    const double amp = std::sqrt(kPi / 2.0) * N;
    QuadratureOptions q;
    q.scale = 1.0 / lambda;
    return fl_norm([&](double xi) { return amp * sech(0.5 * kPi * lambda * xi); }, norm, q);
}

double conserved_l2(int N, double lambda) {
    require_lambda(N, lambda);
    return N * std::sqrt(2.0 / lambda);
}

WindowMinimum min_norm_over_window(int N, double lambda, const NormSpec& norm, double T, std::size_t K,
                                   Backend backend, double eta_refinement) {
    if (!(norm.p > 2.0)) throw std::invalid_argument("min_norm_over_window: needs p > 2");
    const WindowResult w = min_window_norm(N, lambda, norm, T, K, backend, eta_refinement);
    // Average from the same samples (trapezoid in t), so min <= average holds exactly.
    double s = 0.5 * (std::pow(w.norms.front(), norm.p) + std::pow(w.norms.back(), norm.p));
    for (std::size_t k = 1; k + 1 < w.norms.size(); ++k) s += std::pow(w.norms[k], norm.p);
    const double avg = std::pow(s / static_cast<double>(w.norms.size() - 1), 1.0 / norm.p);
    return {w.argmin_t, w.value, std::max(avg, w.value)};
}

double holder_lower_bound(double l2, double fl4, double p) {
    if (!(p >= 1.0 && p < 2.0)) throw std::invalid_argument("holder_lower_bound: needs 1 <= p < 2");
    if (!(l2 > 0.0) || !(fl4 > 0.0)) throw std::invalid_argument("holder_lower_bound: norms must be positive");
    return std::pow(l2, (4.0 - p) / p) / std::pow(fl4, (4.0 - 2.0 * p) / p);
}

double dual_regularity(double p, double s) { return -p * s / (4.0 - 2.0 * p); }

double dual_lower_bound(int N, double lambda, double p, double s, double t_star) {
    const double fl4 = v_fl_norm(N, lambda, t_star, NormSpec{4.0, dual_regularity(p, s)});
    return holder_lower_bound(conserved_l2(N, lambda), fl4, p);
}

Evaluator reverse_solution(double t_star, Evaluator u) {
    return [t_star, u = std::move(u)](double t, double x) { return u(t_star - t, -x); };
}

void ExperimentSchedule::validate() const {
    norm.validate();
    (void)exponent_table();
    if (lambda_sign < -1 || lambda_sign > 1) throw std::invalid_argument("schedule: lambda_sign must be -1, 0 or 1");
    if (!(C_T > 0.0) || !std::isfinite(C_T)) throw std::invalid_argument("schedule: C_T must be positive");
    if (K < 64) throw std::invalid_argument("schedule: K must be at least 64");
    if (!(eta_refinement >= 1.0)) throw std::invalid_argument("schedule: eta_refinement must be >= 1");
    for (int N : N_list)
        if (N < 1) throw std::invalid_argument("schedule: N values must be positive");
}

ExponentTable ExperimentSchedule::exponent_table() const { return exponents(norm.p, theta); }

int ExperimentSchedule::effective_sign() const {
    if (lambda_sign != 0) return lambda_sign;
    return norm.p < 2.0 ? 1 : -1;
}

double ExperimentSchedule::lambda_for(int N) const {
    const double a = exponent_table().alpha;
    return std::pow(static_cast<double>(N), norm.p * (1.0 + 0.5 * effective_sign() * a));
}

double ExperimentSchedule::T_for(int N) const {
    const double q = norm.p > 2.0 ? norm.p : 4.0;
    const double th = exponent_table().theta;
    const double lam = lambda_for(N);
    return C_T * lam * lam * lam * std::pow(static_cast<double>(N), 0.5 * q - 1.0 - th);
}

bool ExperimentResult::all_ok() const {
    for (const auto& r : rows)
        if (!r.ok()) return false;
    return true;
}

namespace {

std::optional<SlopeFit> slope_over(const std::vector<ExperimentRow>& rows, double (*value)(const ExperimentRow&, double),
                                   double p) {
    std::vector<double> x, y;
    for (const auto& r : rows) {
        if (!r.ok()) continue;
        x.push_back(std::log(static_cast<double>(r.N)));
        y.push_back(std::log(value(r, p)));
    }
    if (x.size() < 2 || std::all_of(x.begin(), x.end(), [&](double v) { return v == x.front(); })) return std::nullopt;
    const LineFit f = fit_line(x, y);
    return SlopeFit{f.slope, f.slope_halfwidth};
}

ExperimentRow run_row(const ExperimentSchedule& sc, int N, Backend backend) {
    ExperimentRow r;
    r.N = N;
    try {
        r.lambda = sc.lambda_for(N);
        r.T = sc.T_for(N);
        if (!(r.lambda >= N)) throw std::invalid_argument("lambda_N < N for this schedule");
        r.initial_norm = initial_norm(N, r.lambda, sc.norm);
        const double p = sc.norm.p;
        if (p > 2.0) {
            const WindowMinimum m = min_norm_over_window(N, r.lambda, sc.norm, r.T, sc.K, backend, sc.eta_refinement);
            r.min_norm = m.value;
            r.t_star = m.t_star;
            r.final_norm = m.value;
            r.ratio = r.initial_norm / r.final_norm;
        } else {
            const NormSpec four{4.0, dual_regularity(p, sc.norm.s)};
            const WindowMinimum m = min_norm_over_window(N, r.lambda, four, r.T, sc.K, backend, sc.eta_refinement);
            r.min_norm = m.value;
            r.t_star = m.t_star;
            r.lower_bound = holder_lower_bound(conserved_l2(N, r.lambda), m.value, p);
            r.final_norm = r.lower_bound;
            r.ratio = r.final_norm / r.initial_norm;
        }
        const double vals[] = {r.initial_norm, r.final_norm, r.ratio, r.t_star};
        for (double v : vals)
            if (!(v > 0.0) || !std::isfinite(v))
                throw NumericalError(Breakdown::NonConvergence, "non-finite or non-positive entry in row");
    } catch (const NumericalError& e) {
        r.status = to_string(e.kind());
        r.message = e.what();
    } catch (const std::invalid_argument& e) {
        r.status = "invalid";
        r.message = e.what();
    }
    return r;
}

}  // namespace

ExperimentResult run_inflation(const ExperimentSchedule& schedule, Backend backend) {
    schedule.validate();
    ExperimentResult res;
    res.schedule = schedule;
    res.exponents = schedule.exponent_table();
    // Rows run one after another; each window scan is parallel inside.
    for (int N : schedule.N_list) res.rows.push_back(run_row(schedule, N, backend));
    const double p = schedule.norm.p;
    res.initial_slope = slope_over(res.rows, [](const ExperimentRow& r, double) { return r.initial_norm; }, p);
    res.final_slope = slope_over(res.rows, [](const ExperimentRow& r, double) { return r.final_norm; }, p);
    res.scaled_final_slope = slope_over(
        res.rows, [](const ExperimentRow& r, double q) { return r.final_norm * std::pow(r.lambda, 1.0 / q); }, p);
    res.ratio_slope = slope_over(res.rows, [](const ExperimentRow& r, double) { return r.ratio; }, p);
    return res;
}

std::vector<std::string> preset_names() { return {"p1", "p1.5", "p3", "p6", "desk"}; }

std::vector<ExperimentSchedule> preset(const std::string& name) {
    auto make = [](double p, double s) {
        ExperimentSchedule sc;
        sc.norm = {p, s};
        sc.N_list = {2, 3, 4, 5, 6, 7, 8};
        return sc;
    };
    if (name == "p1") return {make(1.0, 0.0)};
    if (name == "p1.5") return {make(1.5, 0.0)};
    if (name == "p3") return {make(3.0, 0.0)};
    if (name == "p6") return {make(6.0, 0.0)};
    if (name == "desk") {
        std::vector<ExperimentSchedule> out;
        for (double p : {1.0, 1.5, 3.0, 6.0})
            for (double s : {0.0, 1.0, -1.0}) out.push_back(make(p, s));
        return out;
    }
    throw std::invalid_argument("unknown preset '" + name + "'");
}

}  // namespace mkdv::inflation
