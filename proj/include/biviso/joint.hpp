#pragma once

// Bivariate fits: an increasing first coordinate for the functional and a
// monotone second coordinate for its risk, tied together by the weighted
// joint loss. The canonical pair fixes constant weights; the alternating
// pass refits each coordinate holding the other.

#include <cstdint>
#include <string>
#include <vector>

#include "biviso/functional.hpp"
#include "biviso/monotone.hpp"

namespace biviso {

class PairKind {
public:
    static PairKind quantile_es(double alpha);
    static PairKind mean_variance();

    bool is_quantile_es() const { return quantile_; }
    double alpha() const { return alpha_; }
    FunctionalSpec spec() const;
    Direction g1_direction() const { return Direction::Increasing; }
    // The risk drops with the covariate for quantile/shortfall pairs and
    // rises for mean/variance.
    Direction g2_direction() const {
        return quantile_ ? Direction::Decreasing : Direction::Increasing;
    }
    std::string name() const;

private:
    PairKind(bool q, double a) : quantile_(q), alpha_(a) {}
    bool quantile_;
    double alpha_;
};

struct ConvergenceConfig {
    double loss_tolerance = 1e-10;
    int max_iterations = 200;
};

struct BivariateFit {
    MonotoneFit g1;
    MonotoneFit g2;
    std::string weight_name;
    int iterations = 0;
    bool converged = true;
    long clamp_events = 0;
    double final_loss = 0.0;
};

// Sum of joint losses over all observations; clamp_events counts rows whose
// g2 value fell below the weight function's domain floor.
double total_joint_loss(const ChainSample& sample, const PairKind& pair, const WeightFunction& w,
                        const std::vector<double>& g1, const std::vector<double>& g2,
                        long* clamp_events = nullptr);

// Monotone mean fit of the per-row base losses at g1; optimal second
// coordinate for any positive decreasing weight function.
MonotoneFit fit_g2_given_g1(const ChainSample& sample, const PairKind& pair,
                            const std::vector<double>& g1);

// Lower monotone fit of the functional under row weights h(g2), rescaled to
// sum to the number of rows.
MonotoneFit fit_g1_given_g2(const ChainSample& sample, const PairKind& pair,
                            const WeightFunction& w, const std::vector<double>& g2,
                            long* clamp_events = nullptr);

// Unweighted lower fit plus the matching risk fit; the alternating pass
// starts here and counts away from it.
BivariateFit canonical_pair(const ChainSample& sample, const PairKind& pair);

BivariateFit alternating_solve(const ChainSample& sample, const PairKind& pair,
                               const WeightFunction& w, const ConvergenceConfig& cfg = {});

}  // namespace biviso
