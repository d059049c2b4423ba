#pragma once

// Independent slow-path references the fast solvers are checked against, plus
// shared random-instance builders.

#include <cstdint>
#include <vector>

#include "biviso/functional.hpp"
#include "biviso/joint.hpp"
#include "biviso/monotone.hpp"
#include "biviso/rng.hpp"

namespace support {

// Random covariate/response rows; dup_share of covariates repeat an earlier
// value so row merging is exercised.
biviso::ChainSample random_chain(biviso::Rng& rng, std::size_t n, double dup_share = 0.2);

std::vector<double> random_weights(biviso::Rng& rng, std::size_t n);

// Interval functional value T^bound over rows i..j, recomputed from scratch
// by pooling atoms.
double pooled_interval_value(const biviso::ChainSample& sample,
                             const biviso::FunctionalSpec& spec, std::size_t i, std::size_t j,
                             const std::vector<double>& weights, biviso::Bound bound);

// Candidate fitted values that contain every optimizer: all atoms plus every
// interval value at both bounds, padded with midpoints.
std::vector<double> candidate_values(const biviso::ChainSample& sample,
                                     const biviso::FunctionalSpec& spec,
                                     const std::vector<double>& weights);

// Exhaustive optimum of the weighted base loss over monotone vectors with
// entries confined to grid; dynamic program over rows * grid values.
double best_monotone_loss(const biviso::ChainSample& sample, const biviso::FunctionalSpec& spec,
                          const std::vector<double>& grid, biviso::Direction direction,
                          const std::vector<double>& weights = {});

// Composite trapezoid integral of the clamped weight function on [a, b].
double integrate_clamped_h(const biviso::WeightFunction& w, double a, double b, int steps);

// Ten-point dataset pinned from the seeded counterexample search: the
// unweighted median/shortfall pair on it is not simultaneously optimal and
// the score curves cross.
biviso::ChainSample counterexample_chain();

}  // namespace support
