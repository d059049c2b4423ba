#pragma once

// Partial-order generalization of the monotone solver. Nodes carry weighted
// response samples; fits respect a user-given precedence relation through the
// lattice of upper sets. Runtime grows with the number of upper-set pairs, so
// the enumeration caps node count.

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "biviso/joint.hpp"
#include "biviso/monotone.hpp"

namespace biviso {

class PosetSample {
public:
    // Edges state "first precedes second" by node name; any acyclic relation
    // is accepted and stored transitively reduced.
    static PosetSample make(std::vector<std::string> nodes,
                            const std::vector<std::pair<std::string, std::string>>& edges,
                            std::vector<WeightedSample> obs);

    std::size_t size() const { return nodes_.size(); }
    const std::string& node(std::size_t k) const { return nodes_[k]; }
    const WeightedSample& obs(std::size_t k) const { return obs_[k]; }
    const std::vector<std::pair<std::size_t, std::size_t>>& cover_edges() const {
        return edges_;
    }
    // Reachability mask of node k, k itself included.
    std::uint32_t successors(std::size_t k) const { return succ_[k]; }
    std::size_t node_index(const std::string& name) const;
    bool is_chain() const;

private:
    PosetSample() = default;
    std::vector<std::string> nodes_;
    std::vector<std::pair<std::size_t, std::size_t>> edges_;
    std::vector<WeightedSample> obs_;
    std::vector<std::uint32_t> succ_;
};

// Lines of "a b" or "a -> b"; '#' starts a comment.
std::vector<std::pair<std::string, std::string>> parse_edge_list(const std::string& text);

// All upward-closed node sets as bitmasks, empty and full included.
// Throws TooLargeError beyond 20 nodes.
std::vector<std::uint32_t> enumerate_upper_sets(const PosetSample& poset);

// Lower/upper optimal isotonic fit per node. Evaluates the functional on
// pooled differences of nested upper sets; the two closed forms are cross
// checked before returning.
std::vector<double> poset_minmax_fit(const PosetSample& poset, const FunctionalSpec& spec,
                                     Bound bound = Bound::Lower);

// Monotone mean fit of per-node base losses at g1, antitonic for the
// quantile/shortfall pair and isotonic for mean/variance.
std::vector<double> poset_fit_g2_given_g1(const PosetSample& poset, const PairKind& pair,
                                          const std::vector<double>& g1);

struct PosetRegionCheck {
    std::uint32_t region_mask = 0;
    std::vector<std::string> region_nodes;
    double g2_level = 0.0;  // region gathers nodes with risk strictly below
    double restricted_loss = 0.0;
    double refit_loss = 0.0;
    bool passed = false;
    std::vector<double> refit_values;  // node-index order within the region
};

struct PosetSimultaneityReport {
    bool simultaneous = true;
    std::vector<PosetRegionCheck> checks;
    double tolerance = 1e-9;
    bool is_chain = false;
    // When the relation is a total order, the region checks and the chain
    // audit with every jump eligible must reach the same verdict.
    bool chain_agrees_with_total_order = true;
    std::vector<double> g1;
    std::vector<double> g2;
};

// Audits every distinct gated region of the risk fit by refitting g1 on the
// induced sub-relation; no flatness condition gates the checks.
PosetSimultaneityReport poset_check_simultaneous(const PosetSample& poset, const PairKind& pair,
                                                 double tolerance = 1e-9);

}  // namespace biviso
