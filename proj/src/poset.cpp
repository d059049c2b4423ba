#include "biviso/poset.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "biviso/audit.hpp"
#include "biviso/errors.hpp"

namespace biviso {

namespace {

constexpr std::size_t kMaskCapacity = 32;
constexpr std::size_t kEnumerationCap = 20;

std::vector<std::size_t> postorder(std::size_t n,
                                   const std::vector<std::vector<std::size_t>>& adj,
                                   const std::vector<std::string>& names) {
    // 0 unseen, 1 on the current path, 2 done
    std::vector<int> state(n, 0);
    std::vector<std::size_t> order;
    std::vector<std::size_t> path;

    std::function<void(std::size_t)> visit = [&](std::size_t k) {
        state[k] = 1;
        path.push_back(k);
        for (std::size_t next : adj[k]) {
            if (state[next] == 2) continue;
            if (state[next] == 1) {
                std::string msg = "precedence relation contains a cycle: ";
                std::size_t start = 0;
                while (path[start] != next) ++start;
                for (std::size_t p = start; p < path.size(); ++p)
                    msg += names[path[p]] + " -> ";
                msg += names[next];
                throw DomainError(msg);
            }
            visit(next);
        }
        path.pop_back();
        state[k] = 2;
        order.push_back(k);
    };
    for (std::size_t k = 0; k < n; ++k)
        if (state[k] == 0) visit(k);
    return order;
}

}  // namespace

PosetSample PosetSample::make(std::vector<std::string> nodes,
                              const std::vector<std::pair<std::string, std::string>>& edges,
                              std::vector<WeightedSample> obs) {
    const std::size_t n = nodes.size();
    if (n == 0) throw EmptyInputError("partial order needs at least one node");
    if (n > kMaskCapacity) throw TooLargeError("partial order larger than 32 nodes");
    if (obs.size() != n)
        throw DimensionMismatchError("one response sample per node is required");

    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t k = 0; k < n; ++k) {
        if (nodes[k].empty()) throw DomainError("node names must be nonempty");
        if (!index.emplace(nodes[k], k).second)
            throw DomainError("duplicate node name '" + nodes[k] + "'");
    }

    std::vector<std::vector<std::size_t>> adj(n);
    {
        std::vector<std::unordered_set<std::size_t>> seen(n);
        for (const auto& e : edges) {
            auto a = index.find(e.first);
            auto b = index.find(e.second);
            if (a == index.end())
                throw DomainError("edge references unknown node '" + e.first + "'");
            if (b == index.end())
                throw DomainError("edge references unknown node '" + e.second + "'");
            if (a->second == b->second)
                throw DomainError("precedence relation contains a cycle: " + e.first +
                                  " -> " + e.second);
            if (seen[a->second].insert(b->second).second) adj[a->second].push_back(b->second);
        }
    }

    std::vector<std::size_t> order = postorder(n, adj, nodes);

    PosetSample out;
    out.succ_.assign(n, 0);
    for (std::size_t k : order) {
        std::uint32_t mask = std::uint32_t{1} << k;
        for (std::size_t next : adj[k]) mask |= out.succ_[next];
        out.succ_[k] = mask;
    }

    // Keep only cover edges: (a, b) is implied when some other out-neighbor
    // of a already reaches b.
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b : adj[a]) {
            bool implied = false;
            for (std::size_t c : adj[a]) {
                if (c == b) continue;
                if ((out.succ_[c] >> b) & 1u) {
                    implied = true;
                    break;
                }
            }
            if (!implied) out.edges_.emplace_back(a, b);
        }
    }
    std::sort(out.edges_.begin(), out.edges_.end());

    out.nodes_ = std::move(nodes);
    out.obs_ = std::move(obs);
    return out;
}

std::size_t PosetSample::node_index(const std::string& name) const {
    for (std::size_t k = 0; k < nodes_.size(); ++k)
        if (nodes_[k] == name) return k;
    throw DomainError("unknown node '" + name + "'");
}

bool PosetSample::is_chain() const {
    for (std::size_t a = 0; a < size(); ++a)
        for (std::size_t b = a + 1; b < size(); ++b)
            if (!((succ_[a] >> b) & 1u) && !((succ_[b] >> a) & 1u)) return false;
    return true;
}

std::vector<std::pair<std::string, std::string>> parse_edge_list(const std::string& text) {
    std::vector<std::pair<std::string, std::string>> edges;
    std::istringstream lines(text);
    std::string line;
    long line_no = 0;
    while (std::getline(lines, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        std::size_t pos;
        while ((pos = line.find("->")) != std::string::npos) line.replace(pos, 2, " ");
        std::istringstream tokens(line);
        std::string a, b, extra;
        if (!(tokens >> a)) continue;
        if (!(tokens >> b) || (tokens >> extra))
            throw ParseError("expected 'node node' per edge line", line_no);
        edges.emplace_back(std::move(a), std::move(b));
    }
    return edges;
}

namespace {

void generate_upper_sets(const PosetSample& poset, const std::vector<std::size_t>& order,
                         std::size_t depth, std::uint32_t mask,
                         std::vector<std::uint32_t>& out) {
    if (depth == order.size()) {
        out.push_back(mask);
        return;
    }
    std::size_t k = order[depth];
    generate_upper_sets(poset, order, depth + 1, mask, out);
    std::uint32_t bit = std::uint32_t{1} << k;
    // Admissible once every strict successor is already in.
    if ((poset.successors(k) & ~mask & ~bit) == 0)
        generate_upper_sets(poset, order, depth + 1, mask | bit, out);
}

}  // namespace

std::vector<std::uint32_t> enumerate_upper_sets(const PosetSample& poset) {
    const std::size_t n = poset.size();
    if (n > kEnumerationCap)
        throw TooLargeError("upper-set enumeration supports at most 20 nodes");

    std::vector<std::vector<std::size_t>> adj(n);
    for (const auto& e : poset.cover_edges()) adj[e.first].push_back(e.second);
    std::vector<std::string> names(n);
    for (std::size_t k = 0; k < n; ++k) names[k] = poset.node(k);
    std::vector<std::size_t> order = postorder(n, adj, names);

    std::vector<std::uint32_t> out;
    generate_upper_sets(poset, order, 0, 0, out);
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

// Both closed forms over the upper-set lattice: per node, the min over sets
// excluding it of the max pooled value on strict extensions, and the max over
// sets containing it of the min pooled value on strict restrictions.
std::vector<double> minmax_over_upper_sets(const PosetSample& poset,
                                           const std::vector<std::uint32_t>& masks,
                                           const std::function<double(std::uint32_t)>& eval,
                                           bool exact_check) {
    const std::size_t n = poset.size();
    const std::uint32_t full =
        n == 32 ? ~std::uint32_t{0} : ((std::uint32_t{1} << n) - 1);
    const double inf = std::numeric_limits<double>::infinity();

    std::unordered_map<std::uint32_t, std::size_t> index;
    index.reserve(masks.size() * 2);
    for (std::size_t p = 0; p < masks.size(); ++p) index.emplace(masks[p], p);

    std::unordered_map<std::uint32_t, double> cache;
    auto pooled = [&](std::uint32_t s) {
        auto it = cache.find(s);
        if (it != cache.end()) return it->second;
        double v = eval(s);
        cache.emplace(s, v);
        return v;
    };

    std::vector<double> ext_max(masks.size(), -inf);  // over strict supersets
    std::vector<double> res_min(masks.size(), inf);   // over strict subsets

    if (masks.size() <= 4096) {
        for (std::size_t p = 0; p < masks.size(); ++p) {
            for (std::size_t q = 0; q < masks.size(); ++q) {
                std::uint32_t a = masks[p], b = masks[q];
                if (a == b || (a & ~b) != 0) continue;
                double t = pooled(b & ~a);
                ext_max[p] = std::max(ext_max[p], t);
                res_min[q] = std::min(res_min[q], t);
            }
        }
    } else {
        std::vector<char> is_upper(std::size_t{1} << n, 0);
        for (std::uint32_t m : masks) is_upper[m] = 1;
        for (std::size_t p = 0; p < masks.size(); ++p) {
            std::uint32_t a = masks[p];
            std::uint32_t comp = full & ~a;
            for (std::uint32_t s = comp; s; s = (s - 1) & comp) {
                std::uint32_t b = a | s;
                if (!is_upper[b]) continue;
                double t = pooled(s);
                ext_max[p] = std::max(ext_max[p], t);
                res_min[index.at(b)] = std::min(res_min[index.at(b)], t);
            }
        }
    }

    std::vector<double> lower(n), upper_form(n);
    for (std::size_t z = 0; z < n; ++z) {
        std::uint32_t bit = std::uint32_t{1} << z;
        double a_form = inf, b_form = -inf;
        for (std::size_t p = 0; p < masks.size(); ++p) {
            if (masks[p] & bit)
                b_form = std::max(b_form, res_min[p]);
            else
                a_form = std::min(a_form, ext_max[p]);
        }
        lower[z] = a_form;
        upper_form[z] = b_form;
    }

    for (std::size_t z = 0; z < n; ++z) {
        double a = lower[z], b = upper_form[z];
        bool ok = exact_check
                      ? a == b
                      : std::abs(a - b) <=
                            1e-9 * std::max({1.0, std::abs(a), std::abs(b)});
        if (!ok)
            throw std::logic_error("partial-order min-max and max-min forms disagree");
    }
    return lower;
}

}  // namespace

std::vector<double> poset_minmax_fit(const PosetSample& poset, const FunctionalSpec& spec,
                                     Bound bound) {
    std::vector<std::uint32_t> masks = enumerate_upper_sets(poset);
    auto eval = [&](std::uint32_t s) {
        std::vector<double> vals, wts;
        for (std::size_t k = 0; k < poset.size(); ++k) {
            if (!((s >> k) & 1u)) continue;
            const WeightedSample& row = poset.obs(k);
            vals.insert(vals.end(), row.values.begin(), row.values.end());
            wts.insert(wts.end(), row.weights.begin(), row.weights.end());
        }
        FunctionalBounds b = functional_bounds(spec, WeightedSample(vals, wts));
        return bound == Bound::Lower ? b.t_minus : b.t_plus;
    };
    bool exact = spec.kind() == FunctionalKind::Quantile;
    return minmax_over_upper_sets(poset, masks, eval, exact);
}

namespace {

std::vector<double> poset_weighted_mean_fit(const PosetSample& poset,
                                            const std::vector<std::uint32_t>& masks,
                                            const std::vector<double>& values,
                                            const std::vector<double>& weights,
                                            Direction direction) {
    const std::size_t n = poset.size();
    std::vector<double> v = values;
    if (direction == Direction::Decreasing)
        for (double& x : v) x = -x;
    auto eval = [&](std::uint32_t s) {
        double w = 0.0, wv = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            if (!((s >> k) & 1u)) continue;
            w += weights[k];
            wv += weights[k] * v[k];
        }
        return wv / w;
    };
    std::vector<double> fit = minmax_over_upper_sets(poset, masks, eval, false);
    if (direction == Direction::Decreasing)
        for (double& x : fit) x = -x;
    return fit;
}

}  // namespace

std::vector<double> poset_fit_g2_given_g1(const PosetSample& poset, const PairKind& pair,
                                          const std::vector<double>& g1) {
    const std::size_t n = poset.size();
    if (g1.size() != n)
        throw DimensionMismatchError("fitted values must match the node count");
    const FunctionalSpec spec = pair.spec();
    std::vector<double> loss(n), weight(n);
    for (std::size_t k = 0; k < n; ++k) {
        const WeightedSample& row = poset.obs(k);
        double w = 0.0, acc = 0.0;
        for (std::size_t a = 0; a < row.size(); ++a) {
            w += row.weights[a];
            acc += row.weights[a] * spec.base_loss(g1[k], row.values[a]);
        }
        loss[k] = acc / w;
        weight[k] = w;
    }
    std::vector<std::uint32_t> masks = enumerate_upper_sets(poset);
    return poset_weighted_mean_fit(poset, masks, loss, weight, pair.g2_direction());
}

PosetSimultaneityReport poset_check_simultaneous(const PosetSample& poset, const PairKind& pair,
                                                 double tolerance) {
    const std::size_t n = poset.size();
    const FunctionalSpec spec = pair.spec();

    PosetSimultaneityReport report;
    report.tolerance = tolerance;
    report.g1 = poset_minmax_fit(poset, spec, Bound::Lower);
    report.g2 = poset_fit_g2_given_g1(poset, pair, report.g1);
    report.is_chain = poset.is_chain();

    // Risk levels cluster under a small gap so a region boundary never splits
    // values that differ only by roundoff.
    std::vector<double> levels = report.g2;
    std::sort(levels.begin(), levels.end());
    double level_tol = 1e-9;
    for (double v : levels) level_tol = std::max(level_tol, 1e-9 * std::abs(v));
    std::vector<double> reps;
    for (double v : levels)
        if (reps.empty() || v - reps.back() > level_tol) reps.push_back(v);
    std::vector<std::size_t> cluster(n);
    for (std::size_t k = 0; k < n; ++k)
        cluster[k] = static_cast<std::size_t>(
            std::upper_bound(reps.begin(), reps.end(), report.g2[k]) - reps.begin() - 1);

    auto node_loss = [&](std::size_t k, double x) {
        const WeightedSample& row = poset.obs(k);
        double acc = 0.0;
        for (std::size_t a = 0; a < row.size(); ++a)
            acc += row.weights[a] * spec.base_loss(x, row.values[a]);
        return acc;
    };

    for (std::size_t t = 1; t < reps.size(); ++t) {
        PosetRegionCheck check;
        check.g2_level = reps[t];
        std::vector<std::size_t> members;
        for (std::size_t k = 0; k < n; ++k) {
            if (cluster[k] < t) {
                check.region_mask |= std::uint32_t{1} << k;
                check.region_nodes.push_back(poset.node(k));
                members.push_back(k);
            }
        }

        std::vector<std::string> sub_nodes;
        std::vector<WeightedSample> sub_obs;
        std::vector<std::pair<std::string, std::string>> sub_edges;
        for (std::size_t k : members) {
            sub_nodes.push_back(poset.node(k));
            sub_obs.push_back(poset.obs(k));
        }
        for (std::size_t a : members)
            for (std::size_t b : members)
                if (a != b && ((poset.successors(a) >> b) & 1u))
                    sub_edges.emplace_back(poset.node(a), poset.node(b));
        PosetSample sub = PosetSample::make(sub_nodes, sub_edges, std::move(sub_obs));
        check.refit_values = poset_minmax_fit(sub, spec, Bound::Lower);

        double restricted = 0.0, refit = 0.0;
        for (std::size_t i = 0; i < members.size(); ++i) {
            restricted += node_loss(members[i], report.g1[members[i]]);
            refit += node_loss(members[i], check.refit_values[i]);
        }
        check.restricted_loss = restricted;
        check.refit_loss = refit;
        double scale = std::max(1.0, std::abs(refit));
        check.passed = std::abs(restricted - refit) <= tolerance * scale;
        report.simultaneous = report.simultaneous && check.passed;
        report.checks.push_back(std::move(check));
    }

    if (report.is_chain && n > 1) {
        std::vector<std::size_t> order(n);
        for (std::size_t k = 0; k < n; ++k) order[k] = k;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return __builtin_popcount(poset.successors(a)) >
                   __builtin_popcount(poset.successors(b));
        });
        std::vector<double> z(n);
        std::vector<WeightedSample> rows;
        rows.reserve(n);
        for (std::size_t p = 0; p < n; ++p) {
            z[p] = static_cast<double>(p);
            rows.push_back(poset.obs(order[p]));
        }
        ChainSample chain = ChainSample::from_rows(std::move(z), std::move(rows));
        SimultaneityReport linear =
            check_simultaneous(chain, pair, tolerance, TriggerMode::Prose);
        report.chain_agrees_with_total_order = linear.simultaneous == report.simultaneous;
    }
    return report;
}

}  // namespace biviso
