#include "biviso/monotone.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace biviso {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_finite(double v, const char* what) {
    if (!std::isfinite(v)) throw DomainError(std::string(what) + " must be finite");
}

// Cumulative-weight counts over value-compressed atoms.
class Fenwick {
public:
    void init(std::size_t n) {
        n_ = n;
        msb_ = 1;
        while ((msb_ << 1) <= n_) msb_ <<= 1;
        tree_.assign(n_ + 1, 0.0);
    }
    void clear() { std::fill(tree_.begin(), tree_.end(), 0.0); }
    void add(std::size_t i, double w) {
        for (std::size_t k = i + 1; k <= n_; k += k & (~k + 1)) tree_[k] += w;
    }
    // Smallest 0-based index whose prefix sum reaches target; n if none does.
    std::size_t descend(double target) const {
        std::size_t pos = 0;
        double rem = target;
        for (std::size_t step = msb_; step > 0; step >>= 1) {
            std::size_t next = pos + step;
            if (next <= n_ && tree_[next] < rem) {
                pos = next;
                rem -= tree_[next];
            }
        }
        return pos;
    }

private:
    std::size_t n_ = 0;
    std::size_t msb_ = 1;
    std::vector<double> tree_;
};

std::vector<std::pair<std::size_t, std::size_t>> equal_runs(const std::vector<double>& v) {
    std::vector<std::pair<std::size_t, std::size_t>> blocks;
    std::size_t start = 0;
    for (std::size_t k = 1; k <= v.size(); ++k) {
        if (k == v.size() || v[k] != v[start]) {
            blocks.emplace_back(start, k - 1);
            start = k;
        }
    }
    return blocks;
}

struct PavaPoint {
    double w;
    double wy;
};

std::vector<double> pava_weighted_sums(const std::vector<PavaPoint>& pts) {
    struct Blk {
        double w, wy;
        std::size_t count;
    };
    std::vector<Blk> stack;
    stack.reserve(pts.size());
    for (const auto& p : pts) {
        stack.push_back({p.w, p.wy, 1});
        while (stack.size() > 1) {
            const Blk& a = stack[stack.size() - 2];
            const Blk& b = stack.back();
            // means compared by cross-multiplication, weights positive
            if (a.wy * b.w <= b.wy * a.w) break;
            Blk merged{a.w + b.w, a.wy + b.wy, a.count + b.count};
            stack.pop_back();
            stack.back() = merged;
        }
    }
    std::vector<double> out;
    out.reserve(pts.size());
    for (const auto& blk : stack) {
        double v = blk.wy / blk.w;
        for (std::size_t k = 0; k < blk.count; ++k) out.push_back(v);
    }
    return out;
}

}  // namespace

ChainSample::ChainSample(std::vector<double> z, std::vector<double> y)
    : ChainSample(std::move(z), std::move(y), {}) {}

ChainSample::ChainSample(std::vector<double> z, std::vector<double> y,
                         std::vector<double> multiplicity) {
    if (z.empty()) throw EmptyInputError("ChainSample: no observations");
    if (z.size() != y.size())
        throw DimensionMismatchError("ChainSample: z/y length mismatch");
    if (!multiplicity.empty() && multiplicity.size() != z.size())
        throw DimensionMismatchError("ChainSample: multiplicity length mismatch");
    for (double v : z) check_finite(v, "covariate");
    for (double v : y) check_finite(v, "response");
    for (double m : multiplicity) {
        check_finite(m, "multiplicity");
        if (m <= 0.0) throw DomainError("ChainSample: multiplicities must be positive");
    }

    std::vector<std::size_t> order(z.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (z[a] != z[b]) return z[a] < z[b];
        return y[a] < y[b];
    });

    for (std::size_t k = 0; k < order.size(); ++k) {
        std::size_t idx = order[k];
        double m = multiplicity.empty() ? 1.0 : multiplicity[idx];
        if (!z_.empty() && z[idx] == z_.back()) {
            WeightedSample& row = obs_.back();
            if (row.values.back() == y[idx]) {
                row.weights.back() += m;
            } else {
                row.values.push_back(y[idx]);
                row.weights.push_back(m);
            }
        } else {
            z_.push_back(z[idx]);
            obs_.push_back(WeightedSample::point(y[idx], m));
        }
    }
}

ChainSample ChainSample::from_rows(std::vector<double> z, std::vector<WeightedSample> rows) {
    if (z.empty()) throw EmptyInputError("ChainSample: no observations");
    if (z.size() != rows.size())
        throw DimensionMismatchError("ChainSample: z/rows length mismatch");
    for (std::size_t k = 0; k < z.size(); ++k) {
        check_finite(z[k], "covariate");
        if (k > 0 && z[k] <= z[k - 1])
            throw DomainError("ChainSample: covariates must be strictly increasing");
    }
    ChainSample s;
    s.z_ = std::move(z);
    s.obs_ = std::move(rows);
    return s;
}

double ChainSample::y(std::size_t k) const {
    const WeightedSample& row = obs_.at(k);
    if (row.size() != 1)
        throw DomainError("ChainSample: covariate point carries multiple distinct responses");
    return row.values[0];
}

double ChainSample::multiplicity(std::size_t k) const { return obs_.at(k).total_weight(); }

double ChainSample::total_multiplicity() const {
    double t = 0.0;
    for (const auto& row : obs_) t += row.total_weight();
    return t;
}

ChainSample ChainSample::reversed() const {
    ChainSample s;
    s.z_.reserve(size());
    s.obs_.reserve(size());
    for (std::size_t k = size(); k-- > 0;) {
        s.z_.push_back(-z_[k]);
        s.obs_.push_back(obs_[k]);
    }
    return s;
}

ChainSample ChainSample::slice(std::size_t first, std::size_t last) const {
    if (first > last || last >= size()) throw RangeError("ChainSample::slice: bad range");
    ChainSample s;
    s.z_.assign(z_.begin() + first, z_.begin() + last + 1);
    s.obs_.assign(obs_.begin() + first, obs_.begin() + last + 1);
    return s;
}

MonotoneFit make_monotone_fit(std::vector<double> values, Direction direction, Bound bound) {
    if (values.empty()) throw EmptyInputError("MonotoneFit: no values");
    for (std::size_t k = 1; k < values.size(); ++k) {
        bool ok = direction == Direction::Increasing ? values[k - 1] <= values[k]
                                                     : values[k - 1] >= values[k];
        if (!ok) throw DomainError("MonotoneFit: values violate the direction");
    }
    MonotoneFit fit;
    fit.blocks = equal_runs(values);
    fit.values = std::move(values);
    fit.direction = direction;
    fit.bound = bound;
    return fit;
}

MonotoneFit restrict_fit(const MonotoneFit& fit, std::size_t first, std::size_t last) {
    if (first > last || last >= fit.values.size())
        throw RangeError("restrict_fit: bad range");
    std::vector<double> vals(fit.values.begin() + first, fit.values.begin() + last + 1);
    return make_monotone_fit(std::move(vals), fit.direction, fit.bound);
}

std::vector<double> resolve_row_weights(const ChainSample& sample,
                                        const std::vector<double>& weights) {
    if (weights.empty()) return std::vector<double>(sample.size(), 1.0);
    if (weights.size() != sample.size())
        throw DimensionMismatchError("row weights length must match the sample");
    for (double w : weights) {
        check_finite(w, "row weight");
        if (w <= 0.0) throw DomainError("row weights must be strictly positive");
    }
    return weights;
}

IntervalValueTable::IntervalValueTable(const ChainSample& sample, const FunctionalSpec& spec,
                                       std::vector<double> row_weights, Bound bound)
    : n_(sample.size()), bound_(bound) {
    std::vector<double> u = resolve_row_weights(sample, row_weights);

    if (spec.kind() == FunctionalKind::Mean) {
        dense_ = false;
        prefix_w_.assign(n_ + 1, 0.0);
        prefix_wy_.assign(n_ + 1, 0.0);
        for (std::size_t k = 0; k < n_; ++k) {
            const WeightedSample& row = sample.obs(k);
            double w = 0.0, wy = 0.0;
            for (std::size_t a = 0; a < row.size(); ++a) {
                w += row.weights[a];
                wy += row.weights[a] * row.values[a];
            }
            prefix_w_[k + 1] = prefix_w_[k] + u[k] * w;
            prefix_wy_[k + 1] = prefix_wy_[k] + u[k] * wy;
        }
        return;
    }

    dense_ = true;
    std::vector<double> grid;
    for (std::size_t k = 0; k < n_; ++k)
        for (double v : sample.obs(k).values) grid.push_back(v);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    // per-row atoms as (compressed index, solver weight * multiplicity)
    std::vector<std::vector<std::pair<std::size_t, double>>> atoms(n_);
    std::vector<double> row_total(n_, 0.0);
    for (std::size_t k = 0; k < n_; ++k) {
        const WeightedSample& row = sample.obs(k);
        atoms[k].reserve(row.size());
        for (std::size_t a = 0; a < row.size(); ++a) {
            std::size_t idx = static_cast<std::size_t>(
                std::lower_bound(grid.begin(), grid.end(), row.values[a]) - grid.begin());
            double w = u[k] * row.weights[a];
            atoms[k].emplace_back(idx, w);
            row_total[k] += w;
        }
    }

    double alpha = spec.alpha();
    Fenwick tree;
    tree.init(grid.size());
    tri_.resize(n_ * (n_ + 1) / 2);
    for (std::size_t j = 0; j < n_; ++j) {
        tree.clear();
        double total = 0.0;
        std::size_t base = j * (j + 1) / 2;
        for (std::size_t i = j + 1; i-- > 0;) {
            for (const auto& [idx, w] : atoms[i]) tree.add(idx, w);
            total += row_total[i];
            double tol = quantile_tie_tol(total);
            double target = bound_ == Bound::Lower ? alpha * total - tol : alpha * total + tol;
            std::size_t pos = tree.descend(target);
            if (pos >= grid.size()) pos = grid.size() - 1;
            tri_[base + i] = grid[pos];
        }
    }
}

double IntervalValueTable::operator()(std::size_t i, std::size_t j) const {
    if (i > j || j >= n_) throw RangeError("IntervalValueTable: bad interval");
    if (dense_) return tri_[j * (j + 1) / 2 + i];
    return (prefix_wy_[j + 1] - prefix_wy_[i]) / (prefix_w_[j + 1] - prefix_w_[i]);
}

namespace {

MonotoneFit fit_from_table(const IntervalValueTable& table, bool exact_match) {
    std::size_t n = table.size();
    std::vector<double> colmax(n, -kInf), rowmin(n, kInf);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            double v = table(i, j);
            if (v > colmax[j]) colmax[j] = v;
            if (v < rowmin[i]) rowmin[i] = v;
        }
    }
    // min-max: suffix minimum of column maxima
    std::vector<double> fit_a(n);
    double acc = kInf;
    for (std::size_t j = n; j-- > 0;) {
        acc = std::min(acc, colmax[j]);
        fit_a[j] = acc;
    }
    // max-min: prefix maximum of row minima
    std::vector<double> fit_b(n);
    acc = -kInf;
    for (std::size_t i = 0; i < n; ++i) {
        acc = std::max(acc, rowmin[i]);
        fit_b[i] = acc;
    }
    for (std::size_t k = 0; k < n; ++k) {
        if (exact_match) {
            if (fit_a[k] != fit_b[k])
                throw std::logic_error("minmax_fit: min-max and max-min representations differ");
        } else {
            double scale = std::max({1.0, std::fabs(fit_a[k]), std::fabs(fit_b[k])});
            if (std::fabs(fit_a[k] - fit_b[k]) > 1e-9 * scale)
                throw std::logic_error("minmax_fit: representations differ beyond tolerance");
        }
    }
    return make_monotone_fit(std::move(fit_a), Direction::Increasing, table.bound());
}

ChainSample negated_sample(const ChainSample& sample) {
    std::vector<double> z;
    std::vector<WeightedSample> rows;
    z.reserve(sample.size());
    rows.reserve(sample.size());
    for (std::size_t k = 0; k < sample.size(); ++k) {
        z.push_back(sample.z(k));
        WeightedSample row = sample.obs(k);
        for (double& v : row.values) v = -v;
        rows.push_back(std::move(row));
    }
    return ChainSample::from_rows(std::move(z), std::move(rows));
}

}  // namespace

MonotoneFit minmax_fit(const IntervalValueTable& table) {
    return fit_from_table(table, table.is_quantile());
}

MonotoneFit minmax_fit(const ChainSample& sample, const FunctionalSpec& spec,
                       const std::vector<double>& weights, Direction direction, Bound bound) {
    if (direction == Direction::Decreasing) {
        // fit -g increasing on negated responses with the mirrored functional;
        // pointwise order flips, so the requested bound swaps underneath
        FunctionalSpec mirrored = spec.kind() == FunctionalKind::Mean
                                      ? FunctionalSpec::mean()
                                      : FunctionalSpec::quantile(1.0 - spec.alpha());
        Bound swapped = bound == Bound::Lower ? Bound::Upper : Bound::Lower;
        MonotoneFit inner =
            minmax_fit(negated_sample(sample), mirrored, weights, Direction::Increasing, swapped);
        std::vector<double> vals = std::move(inner.values);
        for (double& v : vals) v = -v;
        return make_monotone_fit(std::move(vals), Direction::Decreasing, bound);
    }
    IntervalValueTable table(sample, spec, weights, bound);
    return minmax_fit(table);
}

std::vector<double> pava_mean(const std::vector<double>& values,
                              const std::vector<double>& weights, Direction direction) {
    if (values.empty()) throw EmptyInputError("pava_mean: no values");
    if (!weights.empty() && weights.size() != values.size())
        throw DimensionMismatchError("pava_mean: weights length mismatch");
    double sign = direction == Direction::Increasing ? 1.0 : -1.0;
    std::vector<PavaPoint> pts(values.size());
    for (std::size_t k = 0; k < values.size(); ++k) {
        double w = weights.empty() ? 1.0 : weights[k];
        check_finite(values[k], "pava value");
        check_finite(w, "pava weight");
        if (w <= 0.0) throw DomainError("pava_mean: weights must be strictly positive");
        pts[k] = {w, w * sign * values[k]};
    }
    std::vector<double> out = pava_weighted_sums(pts);
    if (sign < 0.0)
        for (double& v : out) v = -v;
    return out;
}

MonotoneFit pooled_mean_fit(const ChainSample& sample, const std::vector<double>& weights,
                            Direction direction) {
    std::vector<double> u = resolve_row_weights(sample, weights);
    double sign = direction == Direction::Increasing ? 1.0 : -1.0;
    std::vector<PavaPoint> pts(sample.size());
    for (std::size_t k = 0; k < sample.size(); ++k) {
        const WeightedSample& row = sample.obs(k);
        double w = 0.0, wy = 0.0;
        for (std::size_t a = 0; a < row.size(); ++a) {
            w += row.weights[a];
            wy += row.weights[a] * row.values[a];
        }
        pts[k] = {u[k] * w, u[k] * sign * wy};
    }
    std::vector<double> vals = pava_weighted_sums(pts);
    if (sign < 0.0)
        for (double& v : vals) v = -v;
    return make_monotone_fit(std::move(vals), direction, Bound::Lower);
}

MonotoneFit antitonic_mean_fit(const std::vector<double>& values,
                               const std::vector<double>& weights) {
    std::vector<double> vals = pava_mean(values, weights, Direction::Decreasing);
    return make_monotone_fit(std::move(vals), Direction::Decreasing, Bound::Lower);
}

MinimizingIndexSet minimizing_indices(const ChainSample& sample, const FunctionalSpec& spec,
                                      double eta, const std::vector<double>& weights) {
    std::vector<double> u = resolve_row_weights(sample, weights);
    std::size_t n = sample.size();
    // f(l) = sum over i >= l of the row's weighted identification at eta
    std::vector<double> f(n + 1, 0.0);
    for (std::size_t i = n; i-- > 0;) {
        const WeightedSample& row = sample.obs(i);
        double v = 0.0;
        for (std::size_t a = 0; a < row.size(); ++a)
            v += row.weights[a] * spec.identification(eta, row.values[a]);
        f[i] = f[i + 1] + u[i] * v;
    }
    double fmin = kInf, fmax_abs = 0.0;
    for (double v : f) {
        fmin = std::min(fmin, v);
        fmax_abs = std::max(fmax_abs, std::fabs(v));
    }
    double tol = 1e-9 * std::max(1.0, fmax_abs);
    MinimizingIndexSet out;
    for (std::size_t l = 0; l <= n; ++l)
        if (f[l] <= fmin + tol) out.indices.push_back(l + 1);
    return out;
}

double base_loss_total(const ChainSample& sample, const FunctionalSpec& spec,
                       const std::vector<double>& g, const std::vector<double>& weights) {
    if (g.size() != sample.size())
        throw DimensionMismatchError("base_loss_total: fitted values length mismatch");
    std::vector<double> u = resolve_row_weights(sample, weights);
    double total = 0.0;
    for (std::size_t k = 0; k < sample.size(); ++k) {
        const WeightedSample& row = sample.obs(k);
        double acc = 0.0;
        for (std::size_t a = 0; a < row.size(); ++a)
            acc += row.weights[a] * spec.base_loss(g[k], row.values[a]);
        total += u[k] * acc;
    }
    return total;
}

}  // namespace biviso
