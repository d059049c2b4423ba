#include "biviso/functional.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace biviso {

namespace {

void check_finite(double v, const char* what) {
    if (!std::isfinite(v)) throw DomainError(std::string(what) + " must be finite");
}

}  // namespace

WeightedSample::WeightedSample(std::vector<double> vals, std::vector<double> wts)
    : values(std::move(vals)), weights(std::move(wts)) {
    if (values.empty()) throw EmptyInputError("WeightedSample: no atoms");
    if (values.size() != weights.size())
        throw DimensionMismatchError("WeightedSample: values/weights length mismatch");
    for (double v : values) check_finite(v, "WeightedSample value");
    for (double w : weights) {
        check_finite(w, "WeightedSample weight");
        if (w <= 0.0) throw DomainError("WeightedSample: weights must be strictly positive");
    }
}

WeightedSample::WeightedSample(std::vector<double> vals)
    : WeightedSample(std::move(vals), {}) {}

WeightedSample WeightedSample::point(double value, double weight) {
    return WeightedSample({value}, {weight});
}

double WeightedSample::total_weight() const {
    return std::accumulate(weights.begin(), weights.end(), 0.0);
}

FunctionalSpec FunctionalSpec::quantile(double alpha) {
    if (!std::isfinite(alpha) || alpha <= 0.0 || alpha >= 1.0)
        throw DomainError("quantile level must lie in (0, 1)");
    return FunctionalSpec(FunctionalKind::Quantile, alpha);
}

FunctionalSpec FunctionalSpec::mean() { return FunctionalSpec(FunctionalKind::Mean, 0.0); }

std::string FunctionalSpec::name() const {
    if (kind_ == FunctionalKind::Mean) return "mean";
    return "quantile(" + std::to_string(alpha_) + ")";
}

double FunctionalSpec::identification(double x, double y) const {
    check_finite(x, "identification point");
    check_finite(y, "observation");
    if (kind_ == FunctionalKind::Mean) return x - y;
    return (y < x ? 1.0 : 0.0) - alpha_;
}

double FunctionalSpec::identification(double x, const WeightedSample& dist) const {
    double acc = 0.0, tot = 0.0;
    for (std::size_t i = 0; i < dist.size(); ++i) {
        acc += dist.weights[i] * identification(x, dist.values[i]);
        tot += dist.weights[i];
    }
    return acc / tot;
}

double FunctionalSpec::base_loss(double x, double y) const {
    check_finite(x, "forecast");
    check_finite(y, "observation");
    if (kind_ == FunctionalKind::Mean) {
        double d = x - y;
        return d * d;
    }
    double hit = y <= x ? (x - y) : 0.0;
    return hit / alpha_ - x;
}

double FunctionalSpec::base_loss(double x, const WeightedSample& dist) const {
    double acc = 0.0, tot = 0.0;
    for (std::size_t i = 0; i < dist.size(); ++i) {
        acc += dist.weights[i] * base_loss(x, dist.values[i]);
        tot += dist.weights[i];
    }
    return acc / tot;
}

FunctionalBounds functional_bounds(const FunctionalSpec& spec, const WeightedSample& dist) {
    if (spec.kind() == FunctionalKind::Mean) {
        double acc = 0.0, tot = 0.0;
        for (std::size_t i = 0; i < dist.size(); ++i) {
            acc += dist.weights[i] * dist.values[i];
            tot += dist.weights[i];
        }
        double m = acc / tot;
        return {m, m};
    }

    std::vector<std::size_t> order(dist.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return dist.values[a] < dist.values[b]; });

    double total = dist.total_weight();
    double tol = quantile_tie_tol(total);
    double lo_target = spec.alpha() * total - tol;
    double hi_target = spec.alpha() * total + tol;

    double cum = 0.0;
    double t_minus = dist.values[order.back()];
    double t_plus = dist.values[order.back()];
    bool lo_found = false, hi_found = false;
    for (std::size_t k = 0; k < order.size(); ++k) {
        cum += dist.weights[order[k]];
        if (!lo_found && cum >= lo_target) {
            t_minus = dist.values[order[k]];
            lo_found = true;
        }
        if (!hi_found && cum >= hi_target) {
            t_plus = dist.values[order[k]];
            hi_found = true;
        }
        if (lo_found && hi_found) break;
    }
    return {t_minus, t_plus};
}

double elementary_score_1(const FunctionalSpec& spec, double eta, double x1, double y) {
    check_finite(eta, "eta");
    double gate = (eta <= x1 ? 1.0 : 0.0) - (eta <= y ? 1.0 : 0.0);
    if (gate == 0.0) return 0.0;
    return gate * spec.identification(eta, y);
}

double elementary_score_2(const FunctionalSpec& spec, double eta, double x1, double x2, double y) {
    check_finite(eta, "eta");
    check_finite(x2, "risk coordinate");
    double s = 0.0;
    if (eta <= -x2) s += spec.base_loss(x1, y) + eta;
    if (eta <= 0.0) s -= eta;
    return s;
}

WeightFunction WeightFunction::h1_es() {
    return WeightFunction(Kind::H1ES, "h1_es", 1e-3);
}
WeightFunction WeightFunction::h2_es() {
    return WeightFunction(Kind::H2ES, "h2_es", -std::numeric_limits<double>::infinity());
}
WeightFunction WeightFunction::h1_var() {
    return WeightFunction(Kind::H1Var, "h1_var", -0.1 + 1e-3);
}
WeightFunction WeightFunction::h2_var() {
    return WeightFunction(Kind::H2Var, "h2_var", -std::numeric_limits<double>::infinity());
}
WeightFunction WeightFunction::constant() {
    return WeightFunction(Kind::Constant, "constant", -std::numeric_limits<double>::infinity());
}

WeightFunction WeightFunction::by_name(const std::string& name) {
    if (name == "h1_es") return h1_es();
    if (name == "h2_es") return h2_es();
    if (name == "h1_var") return h1_var();
    if (name == "h2_var") return h2_var();
    if (name == "constant") return constant();
    throw DomainError("unknown weight function: " + name);
}

double WeightFunction::h_raw(double x) const {
    switch (kind_) {
        case Kind::H1ES: return 0.5 / std::sqrt(x);
        case Kind::H2ES: return std::exp(-x);
        case Kind::H1Var: return 1.0 / (x + 0.1);
        case Kind::H2Var: return std::exp(-x / 50.0 + 0.1);
        case Kind::Constant: return 1.0;
    }
    return 0.0;
}

double WeightFunction::H_raw(double r) const {
    switch (kind_) {
        case Kind::H1ES: return std::sqrt(r);
        case Kind::H2ES: return 1.0 - std::exp(-r);
        case Kind::H1Var: return std::log1p(10.0 * r);
        case Kind::H2Var: return 50.0 * std::exp(0.1) * (1.0 - std::exp(-r / 50.0));
        case Kind::Constant: return r;
    }
    return 0.0;
}

double WeightFunction::h(double x) const {
    check_finite(x, "weight argument");
    return h_raw(x < floor_ ? floor_ : x);
}

double WeightFunction::H(double r) const {
    check_finite(r, "primitive argument");
    if (!std::isfinite(floor_)) return H_raw(r);
    double hf = h_raw(floor_);
    if (floor_ > 0.0) {
        // clamped on [0, floor], symbolic above
        if (r >= floor_) return floor_ * hf + H_raw(r) - H_raw(floor_);
        return r * hf;
    }
    // floor <= 0: symbolic on [floor, inf), linear continuation below
    if (r >= floor_) return H_raw(r);
    return H_raw(floor_) + (r - floor_) * hf;
}

double joint_loss(const FunctionalSpec& spec, const WeightFunction& w, double x1, double x2,
                  double y) {
    return w.H(x2) + w.h(x2) * (spec.base_loss(x1, y) - x2);
}

EtaGrid make_eta_grid(const std::vector<double>& values, int resolution) {
    if (values.empty()) throw EmptyInputError("make_eta_grid: no values");
    if (resolution < 2) throw DomainError("make_eta_grid: resolution must be at least 2");
    double lo = values[0], hi = values[0];
    for (double v : values) {
        check_finite(v, "grid value");
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    double span = hi - lo;
    double pad = span > 0.0 ? 0.1 * span : 1.0;
    double a = lo - pad, b = hi + pad;

    std::vector<double> pts;
    pts.reserve(static_cast<std::size_t>(resolution) + values.size());
    for (int k = 0; k < resolution; ++k)
        pts.push_back(a + (b - a) * static_cast<double>(k) / (resolution - 1));
    pts.insert(pts.end(), values.begin(), values.end());
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return EtaGrid{std::move(pts)};
}

}  // namespace biviso
