#include "biviso/audit.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "biviso/errors.hpp"

namespace biviso {

namespace {

// Unweighted base loss of rows [lo, hi] at values given by value_at(row).
template <typename F>
double range_loss(const ChainSample& sample, const FunctionalSpec& spec, std::size_t lo,
                  std::size_t hi, F value_at) {
    double total = 0.0;
    for (std::size_t k = lo; k <= hi; ++k) {
        const WeightedSample& row = sample.obs(k);
        double acc = 0.0;
        for (std::size_t a = 0; a < row.size(); ++a)
            acc += row.weights[a] * spec.base_loss(value_at(k), row.values[a]);
        total += acc;
    }
    return total;
}

double flat_scale(const std::vector<double>& g) {
    double m = 1.0;
    for (double v : g) m = std::max(m, std::abs(v));
    return m;
}

}  // namespace

SimultaneityReport check_simultaneous(const ChainSample& sample, const PairKind& pair,
                                      double tolerance, TriggerMode mode) {
    const std::size_t n = sample.size();
    BivariateFit canon = canonical_pair(sample, pair);

    SimultaneityReport report;
    report.tolerance = tolerance;
    report.mode = mode;
    report.g1 = canon.g1;
    report.g2 = canon.g2;

    const std::vector<double>& g1 = canon.g1.values;
    const std::vector<double>& g2 = canon.g2.values;
    const FunctionalSpec spec = pair.spec();
    const double g1_tol = 1e-12 * flat_scale(g1);
    const bool qes = pair.is_quantile_es();

    // 1-based rows m where the risk fit jumps in its strict direction; with
    // the side condition the functional fit must also be flat across the jump.
    std::vector<char> triggered(n + 1, 0);
    bool any = false;
    for (std::size_t m = 2; m <= n; ++m) {
        double jump = g2[m - 1] - g2[m - 2];
        bool trig = qes ? (jump < 0.0) : (jump > 0.0);
        if (trig && mode == TriggerMode::Proposition)
            trig = std::abs(g1[m - 1] - g1[m - 2]) <= g1_tol;
        triggered[m] = trig ? 1 : 0;
        any = any || trig;
    }
    if (!any) {
        report.simultaneous = true;
        return report;
    }

    IntervalValueTable table(sample, spec, {}, Bound::Lower);
    const double inf = std::numeric_limits<double>::infinity();

    auto record = [&](std::size_t m, std::size_t lo, std::size_t hi,
                      std::vector<double> refit) {
        BreakpointCheck check;
        check.m = m;
        check.g2_jump = g2[m - 1] - g2[m - 2];
        check.side = qes ? TailSide::Suffix : TailSide::Prefix;
        check.restricted_loss =
            range_loss(sample, spec, lo, hi, [&](std::size_t k) { return g1[k]; });
        check.refit_loss =
            range_loss(sample, spec, lo, hi, [&](std::size_t k) { return refit[k - lo]; });
        double scale = std::max(1.0, std::abs(check.refit_loss));
        check.passed = std::abs(check.restricted_loss - check.refit_loss) <= tolerance * scale;
        check.refit_values = std::move(refit);
        report.checks.push_back(std::move(check));
    };

    if (qes) {
        // Suffix refits, tail start descending. M[j] tracks the running
        // column max over rows i in [b, j]; the tail's lower fit is its
        // suffix min.
        std::vector<double> colmax(n, -inf);
        for (std::size_t b = n - 1; b >= 1; --b) {
            for (std::size_t j = b; j < n; ++j)
                colmax[j] = std::max(colmax[j], table(b, j));
            if (!triggered[b + 1]) continue;
            std::vector<double> refit(n - b);
            double running = inf;
            for (std::size_t j = n; j-- > b;) {
                running = std::min(running, colmax[j]);
                refit[j - b] = running;
            }
            record(b + 1, b, n - 1, std::move(refit));
        }
        std::sort(report.checks.begin(), report.checks.end(),
                  [](const BreakpointCheck& a, const BreakpointCheck& b) { return a.m < b.m; });
    } else {
        // Prefix refits, prefix end ascending; mirror with row mins and a
        // prefix max.
        std::vector<double> rowmin(n, inf);
        for (std::size_t e = 0; e + 1 < n; ++e) {
            for (std::size_t i = 0; i <= e; ++i)
                rowmin[i] = std::min(rowmin[i], table(i, e));
            if (!triggered[e + 2]) continue;
            std::vector<double> refit(e + 1);
            double running = -inf;
            for (std::size_t i = 0; i <= e; ++i) {
                running = std::max(running, rowmin[i]);
                refit[i] = running;
            }
            record(e + 2, 0, e, std::move(refit));
        }
    }

    report.simultaneous = true;
    for (const BreakpointCheck& c : report.checks)
        report.simultaneous = report.simultaneous && c.passed;
    return report;
}

namespace {

void require_covered(const std::vector<double>& grid, double v, const char* what) {
    auto it = std::lower_bound(grid.begin(), grid.end(), v);
    double tol = 1e-9 * std::max(1.0, std::abs(v));
    if (it != grid.end() && std::abs(*it - v) <= tol) return;
    if (it != grid.begin() && std::abs(*(it - 1) - v) <= tol) return;
    throw GridMismatchError(std::string("eta grid misses ") + what + " " + std::to_string(v));
}

void check_fit_shape(const FitPair& fit, std::size_t n) {
    if (fit.g1.size() != n || fit.g2.size() != n)
        throw DimensionMismatchError("fit '" + fit.id + "' does not match the sample length");
}

}  // namespace

EtaGrid default_murphy_grid(const ChainSample& sample, const PairKind& pair,
                            const std::vector<FitPair>& fits, int resolution) {
    const FunctionalSpec spec = pair.spec();
    std::vector<double> pts;
    pts.push_back(0.0);
    for (std::size_t k = 0; k < sample.size(); ++k) {
        const WeightedSample& row = sample.obs(k);
        pts.insert(pts.end(), row.values.begin(), row.values.end());
    }
    for (const FitPair& fit : fits) {
        check_fit_shape(fit, sample.size());
        for (double v : fit.g1) pts.push_back(v);
        for (double v : fit.g2) pts.push_back(-v);
        for (std::size_t k = 0; k < sample.size(); ++k) {
            const WeightedSample& row = sample.obs(k);
            for (double y : row.values) pts.push_back(spec.base_loss(fit.g1[k], y));
        }
    }
    return make_eta_grid(pts, resolution);
}

MurphyCurves murphy_curves(const ChainSample& sample, const PairKind& pair,
                           const std::vector<FitPair>& fits, const EtaGrid& grid) {
    if (fits.empty()) throw EmptyInputError("murphy curves need at least one fit");
    if (grid.points.empty()) throw EmptyInputError("eta grid is empty");
    const std::size_t n = sample.size();
    const FunctionalSpec spec = pair.spec();

    for (std::size_t k = 0; k < n; ++k)
        for (double y : sample.obs(k).values)
            require_covered(grid.points, y, "observation");
    require_covered(grid.points, 0.0, "origin");
    for (const FitPair& fit : fits) {
        check_fit_shape(fit, n);
        for (double v : fit.g1) require_covered(grid.points, v, "functional value");
        for (double v : fit.g2) require_covered(grid.points, -v, "negated risk value");
    }

    MurphyCurves out;
    out.etas = grid.points;
    const double total = sample.total_multiplicity();
    for (const FitPair& fit : fits) {
        out.fit_ids.push_back(fit.id);
        std::vector<double> c1(out.etas.size(), 0.0);
        std::vector<double> c2(out.etas.size(), 0.0);
        for (std::size_t e = 0; e < out.etas.size(); ++e) {
            double eta = out.etas[e];
            double a1 = 0.0, a2 = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                const WeightedSample& row = sample.obs(k);
                for (std::size_t a = 0; a < row.size(); ++a) {
                    double w = row.weights[a];
                    double y = row.values[a];
                    a1 += w * elementary_score_1(spec, eta, fit.g1[k], y);
                    a2 += w * elementary_score_2(spec, eta, fit.g1[k], fit.g2[k], y);
                }
            }
            c1[e] = a1 / total;
            c2[e] = a2 / total;
        }
        out.s1.push_back(std::move(c1));
        out.s2.push_back(std::move(c2));
    }
    return out;
}

DominanceVerdict dominance(const MurphyCurves& curves, std::size_t a, std::size_t b,
                           double tolerance) {
    if (a >= curves.fit_ids.size() || b >= curves.fit_ids.size())
        throw RangeError("dominance fit index out of range");
    bool a_strict = false, b_strict = false;
    auto scan = [&](const std::vector<std::vector<double>>& s) {
        for (std::size_t e = 0; e < curves.etas.size(); ++e) {
            double va = s[a][e], vb = s[b][e];
            double tol = tolerance * std::max({1.0, std::abs(va), std::abs(vb)});
            if (va < vb - tol) a_strict = true;
            if (vb < va - tol) b_strict = true;
        }
    };
    scan(curves.s1);
    scan(curves.s2);
    if (a_strict && b_strict) return DominanceVerdict::Crossing;
    if (a_strict) return DominanceVerdict::ADominates;
    if (b_strict) return DominanceVerdict::BDominates;
    return DominanceVerdict::Equal;
}

FitPair refit_competitor(const ChainSample& sample, const PairKind& pair,
                         const SimultaneityReport& report, const BreakpointCheck& check) {
    const std::size_t n = sample.size();
    if (check.m < 2 || check.m > n) throw RangeError("breakpoint row out of range");
    const std::vector<double>& g1 = report.g1.values;
    std::vector<double> comp(n);

    if (check.side == TailSide::Suffix) {
        std::size_t b = check.m - 1;
        if (check.refit_values.size() != n - b)
            throw DimensionMismatchError("suffix refit length does not match the tail");
        double cap = check.refit_values.front();
        for (std::size_t k = 0; k < b; ++k) comp[k] = std::min(g1[k], cap);
        for (std::size_t k = b; k < n; ++k) comp[k] = check.refit_values[k - b];
    } else {
        std::size_t e = check.m - 2;
        if (check.refit_values.size() != e + 1)
            throw DimensionMismatchError("prefix refit length does not match the head");
        double floor_v = check.refit_values.back();
        for (std::size_t k = 0; k <= e; ++k) comp[k] = check.refit_values[k];
        for (std::size_t k = e + 1; k < n; ++k) comp[k] = std::max(g1[k], floor_v);
    }

    MonotoneFit g2 = fit_g2_given_g1(sample, pair, comp);
    FitPair out;
    out.id = "refit-m" + std::to_string(check.m);
    out.g1 = std::move(comp);
    out.g2 = std::move(g2.values);
    return out;
}

}  // namespace biviso
