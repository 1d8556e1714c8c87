#pragma once

// The invariant suite behind `mkdv-lab verify`: closed-form identities,
// flow residuals, solver cross-validation and large-time consistency, each
// reported with its measured value and threshold.

#include "mkdv/cauchy.hpp"
#include "mkdv/io.hpp"
#include "mkdv/soliton_state.hpp"
#include "mkdv/spectral.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace mkdv::verify {

struct VerifyConfig {
    int N_max = 3;
    std::uint64_t seed = 1;
    int random_specs = 3;
    /// End time of the integrator cross-check; 0 skips it.
    double integrator_t = 0.1;
    double peak_time = 20.0;
    /// Test hook: added to every c_j in the shift-consistency check.
    double corrupt_shift = 0.0;
};

VerifyConfig config_from_json(const io::Json& j);
io::Json config_to_json(const VerifyConfig& c);

struct Check {
    std::string name;
    bool passed = false;
    double measured = 0.0;
    double threshold = 0.0;
    std::string detail;
};

struct Report {
    VerifyConfig config;
    std::vector<Check> checks;
    bool passed() const;
};

Report run_suite(const VerifyConfig& config, Backend backend = Backend::OpenMP);

/// Deterministic: no timings or host data, so reruns are byte-identical.
io::Json report_to_json(const Report& r);

/// `count` specs of size N with Re lambda in [-0.5, 0.5], Im lambda in [0.5, 1.5]
/// (pairwise |lambda_j - lambda_k| >= 0.2) and |a_j| in [0.5, 2] with a uniform phase.
std::vector<SolitonSpec> random_specs(int count, int N, std::uint64_t seed);

/// a_j, b_j uniform in the square |Re|, |Im| <= 10 with |a_j - a_k|, |b_j - b_k|
/// and |a_j + b_k| all >= 0.1.
cauchy::CauchyPair random_cauchy_pair(std::mt19937_64& rng, int n);

}  // namespace mkdv::verify
