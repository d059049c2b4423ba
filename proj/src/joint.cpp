#include "biviso/joint.hpp"

#include <cmath>
#include <stdexcept>

namespace biviso {

PairKind PairKind::quantile_es(double alpha) {
    if (!std::isfinite(alpha) || alpha <= 0.0 || alpha >= 1.0)
        throw DomainError("quantile level must lie in (0, 1)");
    return PairKind(true, alpha);
}

PairKind PairKind::mean_variance() { return PairKind(false, 0.0); }

FunctionalSpec PairKind::spec() const {
    return quantile_ ? FunctionalSpec::quantile(alpha_) : FunctionalSpec::mean();
}

std::string PairKind::name() const {
    if (quantile_) return "quantile_es(" + std::to_string(alpha_) + ")";
    return "mean_variance";
}

double total_joint_loss(const ChainSample& sample, const PairKind& pair, const WeightFunction& w,
                        const std::vector<double>& g1, const std::vector<double>& g2,
                        long* clamp_events) {
    if (g1.size() != sample.size() || g2.size() != sample.size())
        throw DimensionMismatchError("total_joint_loss: fitted values length mismatch");
    FunctionalSpec spec = pair.spec();
    double total = 0.0;
    for (std::size_t k = 0; k < sample.size(); ++k) {
        if (clamp_events && w.clamps(g2[k])) ++*clamp_events;
        double Hv = w.H(g2[k]);
        double hv = w.h(g2[k]);
        const WeightedSample& row = sample.obs(k);
        for (std::size_t a = 0; a < row.size(); ++a) {
            double L = spec.base_loss(g1[k], row.values[a]);
            total += row.weights[a] * (Hv + hv * (L - g2[k]));
        }
    }
    return total;
}

MonotoneFit fit_g2_given_g1(const ChainSample& sample, const PairKind& pair,
                            const std::vector<double>& g1) {
    if (g1.size() != sample.size())
        throw DimensionMismatchError("fit_g2_given_g1: fitted values length mismatch");
    FunctionalSpec spec = pair.spec();
    std::vector<double> losses(sample.size()), mult(sample.size());
    for (std::size_t k = 0; k < sample.size(); ++k) {
        const WeightedSample& row = sample.obs(k);
        double wsum = 0.0, lsum = 0.0;
        for (std::size_t a = 0; a < row.size(); ++a) {
            wsum += row.weights[a];
            lsum += row.weights[a] * spec.base_loss(g1[k], row.values[a]);
        }
        mult[k] = wsum;
        losses[k] = lsum / wsum;
    }
    std::vector<double> vals = pava_mean(losses, mult, pair.g2_direction());
    return make_monotone_fit(std::move(vals), pair.g2_direction(), Bound::Lower);
}

MonotoneFit fit_g1_given_g2(const ChainSample& sample, const PairKind& pair,
                            const WeightFunction& w, const std::vector<double>& g2,
                            long* clamp_events) {
    if (g2.size() != sample.size())
        throw DimensionMismatchError("fit_g1_given_g2: fitted values length mismatch");
    std::vector<double> u(sample.size());
    double usum = 0.0;
    for (std::size_t k = 0; k < sample.size(); ++k) {
        if (clamp_events && w.clamps(g2[k])) ++*clamp_events;
        u[k] = w.h(g2[k]);
        usum += u[k];
    }
    double scale = static_cast<double>(sample.size()) / usum;
    for (double& v : u) v *= scale;

    FunctionalSpec spec = pair.spec();
    if (spec.kind() == FunctionalKind::Mean)
        return pooled_mean_fit(sample, u, Direction::Increasing);
    return minmax_fit(sample, spec, u, Direction::Increasing, Bound::Lower);
}

BivariateFit canonical_pair(const ChainSample& sample, const PairKind& pair) {
    BivariateFit fit;
    FunctionalSpec spec = pair.spec();
    fit.g1 = spec.kind() == FunctionalKind::Mean
                 ? pooled_mean_fit(sample, {}, Direction::Increasing)
                 : minmax_fit(sample, spec, {}, Direction::Increasing, Bound::Lower);
    fit.g2 = fit_g2_given_g1(sample, pair, fit.g1.values);
    fit.weight_name = "unweighted-canonical";
    fit.iterations = 0;
    fit.converged = true;
    // constant weights collapse the joint loss to the base loss total
    fit.final_loss =
        total_joint_loss(sample, pair, WeightFunction::constant(), fit.g1.values, fit.g2.values);
    return fit;
}

BivariateFit alternating_solve(const ChainSample& sample, const PairKind& pair,
                               const WeightFunction& w, const ConvergenceConfig& cfg) {
    if (!(cfg.loss_tolerance > 0.0) || cfg.max_iterations < 1)
        throw DomainError("alternating_solve: bad convergence configuration");

    BivariateFit out = canonical_pair(sample, pair);
    out.weight_name = w.name();
    long clamps = 0;
    double loss = total_joint_loss(sample, pair, w, out.g1.values, out.g2.values, &clamps);
    out.final_loss = loss;

    out.converged = false;
    for (int iter = 0; iter < cfg.max_iterations; ++iter) {
        MonotoneFit g1_next = fit_g1_given_g2(sample, pair, w, out.g2.values, &clamps);
        MonotoneFit g2_next = fit_g2_given_g1(sample, pair, g1_next.values);
        double loss_next =
            total_joint_loss(sample, pair, w, g1_next.values, g2_next.values, &clamps);

        double step_tol = 1e-9 * std::max(1.0, std::fabs(loss));
        if (loss_next > loss + step_tol)
            throw std::logic_error("alternating_solve: loss increased across a refit cycle");

        bool repeated = g1_next.values == out.g1.values && g2_next.values == out.g2.values;
        double improvement = loss - loss_next;
        out.g1 = std::move(g1_next);
        out.g2 = std::move(g2_next);
        out.final_loss = loss_next;
        if (repeated || improvement < cfg.loss_tolerance) {
            out.converged = true;
            break;
        }
        loss = loss_next;
        ++out.iterations;
    }
    out.clamp_events = clamps;
    return out;
}

}  // namespace biviso
