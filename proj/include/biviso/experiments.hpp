#pragma once

// Replicated studies over synthetic data: how often the unweighted pair is
// simultaneously optimal, and how many alternating cycles each weight
// function needs. Results are keyed per cell and reproduce exactly for a
// given seed regardless of the worker count.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "biviso/joint.hpp"

namespace biviso {

// How the heteroskedastic noise parameter is read for mean/variance data.
enum class NoiseScale { Variance, Sd };

struct StudyConfig {
    std::uint64_t seed = 20260401;
    int replications = 200;
    int jobs = 1;
    NoiseScale noise_scale = NoiseScale::Variance;
    ConvergenceConfig convergence;
};

struct StudyKey {
    std::string pair;
    std::size_t n = 0;
    double noise = 0.0;  // sigma for quantile pairs, scale c otherwise
    double alpha = 0.0;  // 0 when the pair has no level
    std::string weight_fn;
};

struct StudyCellResult {
    StudyKey key;
    double value = 0.0;  // pass rate or mean iteration count
    int replications = 0;
    int failures = 0;    // failed audits, or non-converged runs
    int clamped = 0;     // runs where some weight hit its domain floor
};

struct StudyResult {
    std::vector<StudyCellResult> cells;
};

// Covariates uniform on [0, 100]; responses follow the covariate with
// centered gaussian noise. Replications share data across alpha levels.
ChainSample gen_qes_data(std::uint64_t seed, std::size_t n, double sigma, int rep);

// Noise variance (or deviation, per scale) grows linearly in covariate rank
// as c * rank / sqrt(n).
ChainSample gen_meanvar_data(std::uint64_t seed, std::size_t n, double c, int rep,
                             NoiseScale scale);

StudyResult run_simultaneity_study(const StudyConfig& cfg, const std::string& pair_name,
                                   const std::vector<std::size_t>& ns,
                                   const std::vector<double>& noises,
                                   const std::vector<double>& alphas);

StudyResult run_iteration_study(const StudyConfig& cfg, const std::string& pair_name,
                                const std::vector<std::string>& weight_fns,
                                const std::vector<std::size_t>& ns,
                                const std::vector<double>& noises,
                                const std::vector<double>& alphas);

void write_table_csv(const StudyResult& result, std::ostream& os);

// Pivoted layout, one block per sample size (and weight function when the
// study varies it).
void write_table_text(const StudyResult& result, std::ostream& os);

}  // namespace biviso
