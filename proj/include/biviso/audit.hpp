#pragma once

// Simultaneous-optimality audit for a canonical pair: wherever the risk fit
// jumps, the first-coordinate fit restricted to the gated tail must still be
// an optimal monotone solution there. Murphy curves compare pairs through
// mean elementary scores over an eta grid.

#include <cstddef>
#include <string>
#include <vector>

#include "biviso/joint.hpp"

namespace biviso {

enum class TailSide { Suffix, Prefix };

// With the side condition, a jump only triggers a check when g1 is flat
// across it; the plain mode checks every jump.
enum class TriggerMode { Proposition, Prose };

struct BreakpointCheck {
    std::size_t m = 0;  // 1-based; jump sits between rows m-1 and m
    double g2_jump = 0.0;
    TailSide side = TailSide::Suffix;
    double restricted_loss = 0.0;
    double refit_loss = 0.0;
    bool passed = false;
    std::vector<double> refit_values;  // lower fit on the gated tail
};

struct SimultaneityReport {
    bool simultaneous = true;
    std::vector<BreakpointCheck> checks;
    double tolerance = 1e-9;
    TriggerMode mode = TriggerMode::Proposition;
    MonotoneFit g1;
    MonotoneFit g2;
};

SimultaneityReport check_simultaneous(const ChainSample& sample, const PairKind& pair,
                                      double tolerance = 1e-9,
                                      TriggerMode mode = TriggerMode::Proposition);

struct FitPair {
    std::string id;
    std::vector<double> g1;
    std::vector<double> g2;
};

struct MurphyCurves {
    std::vector<double> etas;
    std::vector<std::string> fit_ids;
    std::vector<std::vector<double>> s1;  // [fit][eta], mean first elementary score
    std::vector<std::vector<double>> s2;
};

// Grid spanning observations, fitted values, negated risks, transformed
// losses, and the origin kink.
EtaGrid default_murphy_grid(const ChainSample& sample, const PairKind& pair,
                            const std::vector<FitPair>& fits, int resolution = 401);

MurphyCurves murphy_curves(const ChainSample& sample, const PairKind& pair,
                           const std::vector<FitPair>& fits, const EtaGrid& grid);

enum class DominanceVerdict { ADominates, BDominates, Equal, Crossing };

// Pointwise comparison of both score curves between fits a and b.
DominanceVerdict dominance(const MurphyCurves& curves, std::size_t a, std::size_t b,
                           double tolerance = 1e-12);

// Monotone competitor that adopts the tail refit at a breakpoint and caps the
// remaining side so the whole vector stays ordered.
FitPair refit_competitor(const ChainSample& sample, const PairKind& pair,
                         const SimultaneityReport& report, const BreakpointCheck& check);

}  // namespace biviso
