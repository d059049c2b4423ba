#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "biviso/audit.hpp"

namespace support {

using namespace biviso;

ChainSample random_chain(Rng& rng, std::size_t n, double dup_share) {
    std::vector<double> z(n), y(n);
    for (std::size_t k = 0; k < n; ++k) {
        if (k > 0 && rng.uniform01() < dup_share)
            z[k] = z[static_cast<std::size_t>(rng.uniform01() * k)];
        else
            z[k] = rng.uniform(0.0, 10.0);
        y[k] = 0.5 * z[k] + rng.normal(0.0, 2.0);
    }
    return ChainSample(std::move(z), std::move(y));
}

std::vector<double> random_weights(Rng& rng, std::size_t n) {
    std::vector<double> w(n);
    for (double& v : w) v = 0.1 + 2.0 * rng.uniform01();
    return w;
}

double pooled_interval_value(const ChainSample& sample, const FunctionalSpec& spec,
                             std::size_t i, std::size_t j, const std::vector<double>& weights,
                             Bound bound) {
    std::vector<double> u = resolve_row_weights(sample, weights);
    std::vector<double> vals, wts;
    for (std::size_t k = i; k <= j; ++k) {
        const WeightedSample& row = sample.obs(k);
        for (std::size_t a = 0; a < row.size(); ++a) {
            vals.push_back(row.values[a]);
            wts.push_back(u[k] * row.weights[a]);
        }
    }
    FunctionalBounds b = functional_bounds(spec, WeightedSample(vals, wts));
    return bound == Bound::Lower ? b.t_minus : b.t_plus;
}

std::vector<double> candidate_values(const ChainSample& sample, const FunctionalSpec& spec,
                                     const std::vector<double>& weights) {
    std::vector<double> grid;
    for (std::size_t k = 0; k < sample.size(); ++k) {
        const WeightedSample& row = sample.obs(k);
        grid.insert(grid.end(), row.values.begin(), row.values.end());
    }
    for (std::size_t i = 0; i < sample.size(); ++i) {
        for (std::size_t j = i; j < sample.size(); ++j) {
            grid.push_back(pooled_interval_value(sample, spec, i, j, weights, Bound::Lower));
            grid.push_back(pooled_interval_value(sample, spec, i, j, weights, Bound::Upper));
        }
    }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    std::vector<double> out;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        out.push_back(grid[k]);
        if (k + 1 < grid.size()) out.push_back(0.5 * (grid[k] + grid[k + 1]));
    }
    return out;
}

double best_monotone_loss(const ChainSample& sample, const FunctionalSpec& spec,
                          const std::vector<double>& grid, Direction direction,
                          const std::vector<double>& weights) {
    if (grid.empty()) throw std::invalid_argument("empty grid");
    std::vector<double> u = resolve_row_weights(sample, weights);
    const std::size_t g = grid.size();
    std::vector<double> prev(g, 0.0), cur(g, 0.0);

    auto cost = [&](std::size_t k, double v) {
        const WeightedSample& row = sample.obs(k);
        double acc = 0.0;
        for (std::size_t a = 0; a < row.size(); ++a)
            acc += row.weights[a] * spec.base_loss(v, row.values[a]);
        return u[k] * acc;
    };

    for (std::size_t i = 0; i < g; ++i) prev[i] = cost(0, grid[i]);
    for (std::size_t k = 1; k < sample.size(); ++k) {
        if (direction == Direction::Increasing) {
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < g; ++i) {
                best = std::min(best, prev[i]);
                cur[i] = cost(k, grid[i]) + best;
            }
        } else {
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t i = g; i-- > 0;) {
                best = std::min(best, prev[i]);
                cur[i] = cost(k, grid[i]) + best;
            }
        }
        std::swap(prev, cur);
    }
    double best = std::numeric_limits<double>::infinity();
    for (double v : prev) best = std::min(best, v);
    return best;
}

double integrate_clamped_h(const WeightFunction& w, double a, double b, int steps) {
    double h = (b - a) / steps;
    double acc = 0.5 * (w.h(a) + w.h(b));
    for (int i = 1; i < steps; ++i) acc += w.h(a + i * h);
    return acc * h;
}

ChainSample counterexample_chain() {
    // Seeded search, pinned base seed; returns the first dataset whose audit
    // fails with crossing score curves.
    PairKind pair = PairKind::quantile_es(0.5);
    for (int attempt = 0; attempt < 2000; ++attempt) {
        Rng rng(derive_seed(20260821, "counterexample", 0, 0, attempt));
        std::size_t n = 4 + static_cast<std::size_t>(rng.uniform01() * 7.0);
        std::vector<double> z(n), y(n);
        for (double& v : z) v = rng.uniform(0.0, 100.0);
        std::sort(z.begin(), z.end());
        for (std::size_t k = 0; k < n; ++k) y[k] = z[k] + rng.normal(0.0, 30.0);
        ChainSample sample(z, y);
        SimultaneityReport report = check_simultaneous(sample, pair);
        if (report.simultaneous) continue;
        bool crossing = false;
        for (const BreakpointCheck& c : report.checks) {
            if (c.passed) continue;
            FitPair competitor = refit_competitor(sample, pair, report, c);
            std::vector<FitPair> fits = {{"canonical", report.g1.values, report.g2.values},
                                         competitor};
            EtaGrid grid = default_murphy_grid(sample, pair, fits, 201);
            MurphyCurves curves = murphy_curves(sample, pair, fits, grid);
            if (dominance(curves, 0, 1) == DominanceVerdict::Crossing) crossing = true;
        }
        if (crossing) return sample;
    }
    throw std::runtime_error("counterexample search exhausted its attempt budget");
}

}  // namespace support
