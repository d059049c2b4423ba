#pragma once

// Scalar building blocks: identification functions, set-valued functional
// bounds, elementary scores, and the joint loss family built from a positive
// decreasing weight function and its primitive.

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "biviso/errors.hpp"

namespace biviso {

// Discrete distribution given by atoms with strictly positive weights.
struct WeightedSample {
    std::vector<double> values;
    std::vector<double> weights;

    WeightedSample(std::vector<double> vals, std::vector<double> wts);
    explicit WeightedSample(std::vector<double> vals);
    static WeightedSample point(double value, double weight = 1.0);

    std::size_t size() const { return values.size(); }
    double total_weight() const;
};

enum class FunctionalKind { Quantile, Mean };

class FunctionalSpec {
public:
    static FunctionalSpec quantile(double alpha);
    static FunctionalSpec mean();

    FunctionalKind kind() const { return kind_; }
    double alpha() const { return alpha_; }
    std::string name() const;

    // V(x, y): nondecreasing and left-continuous in x, zero crossing at the
    // functional value.
    double identification(double x, double y) const;
    double identification(double x, const WeightedSample& dist) const;

    // Strictly consistent loss whose minimum over x defines the risk tied to
    // the second coordinate (pinball with risk = expected shortfall, squared
    // error with risk = variance).
    double base_loss(double x, double y) const;
    double base_loss(double x, const WeightedSample& dist) const;

private:
    FunctionalSpec(FunctionalKind kind, double alpha) : kind_(kind), alpha_(alpha) {}
    FunctionalKind kind_;
    double alpha_;
};

struct FunctionalBounds {
    double t_minus;
    double t_plus;
};

// Cumulative-weight comparisons at rational alpha boundaries must resolve
// exact ties as ties; alpha*W itself rounds in double.
inline double quantile_tie_tol(double total_weight) {
    double scale = total_weight > 1.0 ? total_weight : 1.0;
    return 1e-9 * scale;
}

// [t_minus, t_plus]: sup{x : V(x,P) < 0} and inf{x : V(x,P) > 0}.
FunctionalBounds functional_bounds(const FunctionalSpec& spec, const WeightedSample& dist);

// S_eta,1: scores the first coordinate through the identification function.
double elementary_score_1(const FunctionalSpec& spec, double eta, double x1, double y);

// S_eta,2: scores the (value, risk) pair; the eta <= -x2 gate ties the second
// coordinate to sublevel sets of -x2.
double elementary_score_2(const FunctionalSpec& spec, double eta, double x1, double x2, double y);

class WeightFunction {
public:
    enum class Kind { H1ES, H2ES, H1Var, H2Var, Constant };

    static WeightFunction h1_es();
    static WeightFunction h2_es();
    static WeightFunction h1_var();
    static WeightFunction h2_var();
    static WeightFunction constant();
    static WeightFunction by_name(const std::string& name);

    Kind kind() const { return kind_; }
    const std::string& name() const { return name_; }
    double domain_floor() const { return floor_; }
    bool clamps(double x) const { return x < floor_; }

    // h evaluated at max(x, floor); positive and decreasing.
    double h(double x) const;
    // Primitive of the clamped h with H(0) = 0.
    double H(double r) const;

private:
    WeightFunction(Kind kind, std::string name, double floor)
        : kind_(kind), name_(std::move(name)), floor_(floor) {}
    double h_raw(double x) const;
    double H_raw(double r) const;

    Kind kind_;
    std::string name_;
    double floor_;
};

// tilde L(x1, x2, y) = H(x2) + h(x2) * (L(x1, y) - x2).
double joint_loss(const FunctionalSpec& spec, const WeightFunction& w, double x1, double x2,
                  double y);

struct EtaGrid {
    std::vector<double> points;  // strictly increasing
};

// Linearly spaced points over the padded data range, plus every distinct
// observed value so piecewise-linear score segments keep their knots.
EtaGrid make_eta_grid(const std::vector<double>& values, int resolution = 401);

}  // namespace biviso
