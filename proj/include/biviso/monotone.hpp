#pragma once

// Monotone regression over a totally ordered covariate. Fits come from the
// interval formulas: lower fit at position l is min over j >= l of
// max over i <= j of T-(pooled rows i..j), equivalently max-min; both
// representations are evaluated and must agree.

#include <cstddef>
#include <utility>
#include <vector>

#include "biviso/functional.hpp"

namespace biviso {

enum class Direction { Increasing, Decreasing };
enum class Bound { Lower, Upper };

// Covariate-sorted responses. Rows with equal z collapse into one covariate
// point whose WeightedSample holds every response observed there; fitted
// values are constant on such a row by construction.
class ChainSample {
public:
    ChainSample(std::vector<double> z, std::vector<double> y);
    ChainSample(std::vector<double> z, std::vector<double> y, std::vector<double> multiplicity);
    static ChainSample from_rows(std::vector<double> z, std::vector<WeightedSample> rows);

    std::size_t size() const { return z_.size(); }
    double z(std::size_t k) const { return z_[k]; }
    const WeightedSample& obs(std::size_t k) const { return obs_[k]; }
    double y(std::size_t k) const;
    double multiplicity(std::size_t k) const;
    double total_multiplicity() const;

    ChainSample reversed() const;
    ChainSample slice(std::size_t first, std::size_t last) const;

private:
    ChainSample() = default;
    std::vector<double> z_;
    std::vector<WeightedSample> obs_;
};

struct MonotoneFit {
    std::vector<double> values;
    std::vector<std::pair<std::size_t, std::size_t>> blocks;  // inclusive runs of equal value
    Direction direction = Direction::Increasing;
    Bound bound = Bound::Lower;
};

MonotoneFit make_monotone_fit(std::vector<double> values, Direction direction, Bound bound);

// Slice [first, last] of a fit; blocks are recomputed for the slice.
MonotoneFit restrict_fit(const MonotoneFit& fit, std::size_t first, std::size_t last);

// T^bound of the pooled distribution of rows i..j (inclusive), under
// per-row solver weights times atom multiplicities. Quantile tables are
// materialized; mean tables evaluate from prefix sums.
class IntervalValueTable {
public:
    IntervalValueTable(const ChainSample& sample, const FunctionalSpec& spec,
                       std::vector<double> row_weights, Bound bound);

    std::size_t size() const { return n_; }
    Bound bound() const { return bound_; }
    bool is_quantile() const { return dense_; }
    double operator()(std::size_t i, std::size_t j) const;

private:
    std::size_t n_;
    Bound bound_;
    bool dense_;
    std::vector<double> tri_;       // quantile: value at tri_[j*(j+1)/2 + i]
    std::vector<double> prefix_w_;  // mean: cumulative weight
    std::vector<double> prefix_wy_;
};

// Lower/upper optimal monotone fit for the interval functional. Both the
// min-max and max-min forms are computed; disagreement beyond the functional's
// tolerance (exact for quantiles, 1e-9 relative for means) throws.
MonotoneFit minmax_fit(const ChainSample& sample, const FunctionalSpec& spec,
                       const std::vector<double>& weights = {},
                       Direction direction = Direction::Increasing, Bound bound = Bound::Lower);

// Increasing fit straight from a prepared table.
MonotoneFit minmax_fit(const IntervalValueTable& table);

// Weighted pool-adjacent-violators for the mean; agrees with
// minmax_fit(Mean) and runs in linear time.
std::vector<double> pava_mean(const std::vector<double>& values,
                              const std::vector<double>& weights, Direction direction);

MonotoneFit pooled_mean_fit(const ChainSample& sample, const std::vector<double>& weights = {},
                            Direction direction = Direction::Increasing);

// Decreasing mean fit of plain values, unit weights unless given.
MonotoneFit antitonic_mean_fit(const std::vector<double>& values,
                               const std::vector<double>& weights = {});

// Minimizers l in {1..n+1} of sum over i >= l of the weighted identification
// at eta; the empty suffix (l = n+1) contributes zero. Selector choice pins
// which optimal solution the level-set correspondence reproduces.
struct MinimizingIndexSet {
    std::vector<std::size_t> indices;  // 1-based, sorted
    std::size_t lower_select() const { return indices.back(); }
    std::size_t upper_select() const { return indices.front(); }
};

MinimizingIndexSet minimizing_indices(const ChainSample& sample, const FunctionalSpec& spec,
                                      double eta, const std::vector<double>& weights = {});

// Sum of per-row weighted base losses at the fitted values.
double base_loss_total(const ChainSample& sample, const FunctionalSpec& spec,
                       const std::vector<double>& g, const std::vector<double>& weights = {});

// Resolves empty weight vectors to units and validates length and positivity.
std::vector<double> resolve_row_weights(const ChainSample& sample,
                                        const std::vector<double>& weights);

}  // namespace biviso
